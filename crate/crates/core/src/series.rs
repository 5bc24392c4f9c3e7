//! Transform arithmetic at nilpotent points and the three additive
//! convolutions.
//!
//! At a nilpotent point every series is a finite sum and every functional
//! equation is solved exactly by a finite fixed-point iteration: a
//! correction of filtration degree `s` only influences degrees `> s`, so
//! `index` sweeps reach the fixed point from any start.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::algebra::{max_abs, re, shift_embed, MatricialElement, NilpotentPoint};
use crate::error::{Error, Result};
use crate::laws::{check_dim, check_order, Distribution};

/// Relative size below which two successive iterates count as equal.
const STALL_TOL: f64 = 1e-15;

fn unit_like(p: &NilpotentPoint) -> MatricialElement {
    MatricialElement::identity(p.level(), p.base_dim())
}

fn check_point(dist: &dyn Distribution, p: &NilpotentPoint) -> Result<()> {
    check_dim(dist.base_dim(), p.value())?;
    check_order(dist.order_cap(), p.index() - 1)
}

fn stalled(prev: &MatricialElement, next: &MatricialElement) -> bool {
    let diff = max_abs(&(next.matrix() - prev.matrix()));
    diff <= STALL_TOL * (1.0 + max_abs(next.matrix()))
}

/// `M(p) = Σ_{k < index} μ̃((X·p)^k)`.
pub fn eval_m(dist: &dyn Distribution, p: &NilpotentPoint) -> Result<MatricialElement> {
    check_point(dist, p)?;
    dist.moment_series(p)
}

/// `B(p) = (M(p) - 1)·M(p)^{-1}`.
pub fn eval_b(dist: &dyn Distribution, p: &NilpotentPoint) -> Result<MatricialElement> {
    let m = eval_m(dist, p)?;
    let inv = m.inverse()?;
    Ok(&m.shift(re(-1.0)) * &inv)
}

/// `ℌ(p) = p·M(p)`.
pub fn eval_h(dist: &dyn Distribution, p: &NilpotentPoint) -> Result<MatricialElement> {
    Ok(p.value() * &eval_m(dist, p)?)
}

/// `R(c) = M(b_c) - 1` where `b_c·M(b_c) = c`.
pub fn eval_r(dist: &dyn Distribution, c: &NilpotentPoint) -> Result<MatricialElement> {
    let (_, m) = solve_r(dist, c, None)?;
    Ok(m.shift(re(-1.0)))
}

/// Solve `b·M(b) = c` by `b ← c·M(b)^{-1}`; returns `(b, M(b))`.
fn solve_r(
    dist: &dyn Distribution,
    c: &NilpotentPoint,
    start: Option<MatricialElement>,
) -> Result<(MatricialElement, MatricialElement)> {
    check_point(dist, c)?;
    let mut b = start.unwrap_or_else(|| c.value().clone());
    let mut m = dist.moment_series(&c.derived(b.clone()))?;
    for _ in 0..c.index() {
        let next = c.value() * &m.inverse()?;
        let done = stalled(&b, &next);
        b = next;
        m = dist.moment_series(&c.derived(b.clone()))?;
        if done {
            break;
        }
    }
    Ok((b, m))
}

#[derive(Clone)]
enum Recipe {
    /// `B = Σ t_i B_i`.
    Boolean(Vec<(Arc<dyn Distribution>, f64)>),
    /// `R = Σ t_i R_i`.
    Free(Vec<(Arc<dyn Distribution>, f64)>),
    /// `ℌ = ℌ_1 ∘ ℌ_2 ∘ ... ∘ ℌ_k`.
    Monotone(Vec<Arc<dyn Distribution>>),
}

/// A distribution defined through a convolution of parent distributions,
/// valid up to a fixed moment order.
pub struct SeriesDistribution {
    recipe: Recipe,
    base_dim: usize,
    cap: usize,
    memo: Mutex<HashMap<(usize, Vec<u64>), MatricialElement>>,
}

impl fmt::Debug for SeriesDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (op, n) = match &self.recipe {
            Recipe::Boolean(p) => ("boolean", p.len()),
            Recipe::Free(p) => ("free", p.len()),
            Recipe::Monotone(p) => ("monotone", p.len()),
        };
        f.debug_struct("SeriesDistribution")
            .field("op", &op)
            .field("factors", &n)
            .field("base_dim", &self.base_dim)
            .field("cap", &self.cap)
            .finish()
    }
}

fn check_parents<'a>(
    parents: impl IntoIterator<Item = &'a Arc<dyn Distribution>>,
    n: usize,
) -> Result<usize> {
    let mut dim = None;
    for p in parents {
        check_order(p.order_cap(), n)?;
        match dim {
            None => dim = Some(p.base_dim()),
            Some(d) if d != p.base_dim() => {
                return Err(crate::error::dim_err(format!(
                    "convolving laws over M_{d} and M_{}",
                    p.base_dim()
                )))
            }
            _ => {}
        }
    }
    dim.ok_or_else(|| Error::Argument("convolution of no distributions".into()))
}

fn check_power(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Argument(format!(
            "convolution power {t} must be positive"
        )));
    }
    Ok(())
}

impl SeriesDistribution {
    fn build(recipe: Recipe, base_dim: usize, cap: usize) -> Arc<dyn Distribution> {
        Arc::new(Self {
            recipe,
            base_dim,
            cap,
            memo: Mutex::new(HashMap::new()),
        })
    }

    fn weighted(parts: &[(Arc<dyn Distribution>, f64)], n: usize) -> Result<usize> {
        for (_, t) in parts {
            check_power(*t)?;
        }
        check_parents(parts.iter().map(|(d, _)| d), n)
    }

    fn series_at(&self, p: &NilpotentPoint) -> Result<MatricialElement> {
        match &self.recipe {
            Recipe::Boolean(parts) => {
                let mut total = MatricialElement::zeros(p.level(), p.base_dim());
                for (dist, t) in parts {
                    total = &total + &eval_b(dist.as_ref(), p)?.scale_re(*t);
                }
                (-total).shift(re(1.0)).inverse()
            }
            Recipe::Free(parts) => {
                let mut m = unit_like(p);
                let mut subs: Vec<Option<MatricialElement>> = vec![None; parts.len()];
                for _ in 0..p.index() {
                    let c = p.derived(p.value() * &m);
                    let mut next = unit_like(p);
                    for ((dist, t), sub) in parts.iter().zip(subs.iter_mut()) {
                        let (b, mb) = solve_r(dist.as_ref(), &c, sub.take())?;
                        next = &next + &mb.shift(re(-1.0)).scale_re(*t);
                        *sub = Some(b);
                    }
                    let done = stalled(&m, &next);
                    m = next;
                    if done {
                        break;
                    }
                }
                Ok(m)
            }
            Recipe::Monotone(parts) => {
                // M_{1..k}(p) = M_{2..k}(p) · M_1(p · M_{2..k}(p))
                let mut m = unit_like(p);
                for dist in parts.iter().rev() {
                    let inner = p.derived(p.value() * &m);
                    m = &m * &eval_m(dist.as_ref(), &inner)?;
                }
                Ok(m)
            }
        }
    }
}

impl Distribution for SeriesDistribution {
    fn base_dim(&self) -> usize {
        self.base_dim
    }

    fn order_cap(&self) -> Option<usize> {
        Some(self.cap)
    }

    fn matricial_moment(&self, b: &MatricialElement, n: usize) -> Result<MatricialElement> {
        Ok(self.matricial_moments(b, n)?.pop().expect("n + 1 moments"))
    }

    /// Read off the coarse first row of `M(S_{n+1} ⊗ b)`.
    fn matricial_moments(&self, b: &MatricialElement, n: usize) -> Result<Vec<MatricialElement>> {
        check_dim(self.base_dim, b)?;
        check_order(Some(self.cap), n)?;
        let p = shift_embed(b, n);
        let m = self.moment_series(&p)?;
        Ok((0..=n).map(|k| m.coarse_block(b.level(), 0, k)).collect())
    }

    fn moment_series(&self, p: &NilpotentPoint) -> Result<MatricialElement> {
        check_dim(self.base_dim, p.value())?;
        check_order(Some(self.cap), p.index() - 1)?;
        if p.index() == 1 {
            return Ok(unit_like(p));
        }
        let key = (p.index(), p.value().bit_key());
        if let Some(m) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(m.clone());
        }
        let m = self.series_at(p)?;
        self.memo.lock().expect("memo lock").insert(key, m.clone());
        Ok(m)
    }
}

/// `μ ⊎ ν` up to order `n`.
pub fn boolean_convolve(
    mu: Arc<dyn Distribution>,
    nu: Arc<dyn Distribution>,
    n: usize,
) -> Result<Arc<dyn Distribution>> {
    boolean_sum(vec![(mu, 1.0), (nu, 1.0)], n)
}

/// `μ^{⊎t}`, defined by `B_{μ^{⊎t}} = t·B_μ`.
pub fn boolean_power(mu: Arc<dyn Distribution>, t: f64, n: usize) -> Result<Arc<dyn Distribution>> {
    boolean_sum(vec![(mu, t)], n)
}

/// `⊎_i μ_i^{⊎t_i}`.
pub fn boolean_sum(
    parts: Vec<(Arc<dyn Distribution>, f64)>,
    n: usize,
) -> Result<Arc<dyn Distribution>> {
    let d = SeriesDistribution::weighted(&parts, n)?;
    Ok(SeriesDistribution::build(Recipe::Boolean(parts), d, n))
}

/// `μ ⊞ ν` up to order `n`.
pub fn free_convolve(
    mu: Arc<dyn Distribution>,
    nu: Arc<dyn Distribution>,
    n: usize,
) -> Result<Arc<dyn Distribution>> {
    free_sum(vec![(mu, 1.0), (nu, 1.0)], n)
}

/// `μ^{⊞t}`, defined by `R_{μ^{⊞t}} = t·R_μ`.
pub fn free_power(mu: Arc<dyn Distribution>, t: f64, n: usize) -> Result<Arc<dyn Distribution>> {
    free_sum(vec![(mu, t)], n)
}

/// `⊞_i μ_i^{⊞t_i}`.
pub fn free_sum(
    parts: Vec<(Arc<dyn Distribution>, f64)>,
    n: usize,
) -> Result<Arc<dyn Distribution>> {
    let d = SeriesDistribution::weighted(&parts, n)?;
    Ok(SeriesDistribution::build(Recipe::Free(parts), d, n))
}

/// `μ ▷ ν` up to order `n`: `ℌ_{μ▷ν} = ℌ_μ ∘ ℌ_ν`.
pub fn monotone_convolve(
    mu: Arc<dyn Distribution>,
    nu: Arc<dyn Distribution>,
    n: usize,
) -> Result<Arc<dyn Distribution>> {
    monotone_chain(vec![mu, nu], n)
}

/// `μ_1 ▷ μ_2 ▷ ... ▷ μ_k`.
pub fn monotone_chain(
    parts: Vec<Arc<dyn Distribution>>,
    n: usize,
) -> Result<Arc<dyn Distribution>> {
    let d = check_parents(parts.iter(), n)?;
    Ok(SeriesDistribution::build(Recipe::Monotone(parts), d, n))
}

/// `μ ▷ μ ▷ ... ▷ μ`, `k` factors.
pub fn monotone_power(
    mu: Arc<dyn Distribution>,
    k: usize,
    n: usize,
) -> Result<Arc<dyn Distribution>> {
    if k == 0 {
        return Err(Error::Argument(
            "monotone power needs at least one factor".into(),
        ));
    }
    monotone_chain(vec![mu; k], n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{superdiag_embed, BElement, CPMap};
    use crate::laws::{dilate, CentralLaw, MatrixModel, ZeroLaw};

    fn scalar_corner(dist: &dyn Distribution, n: usize) -> f64 {
        let bs = vec![BElement::identity(1); n];
        let z = dist.multilinear_moment(&bs).unwrap().matrix()[(0, 0)];
        assert!(z.im.abs() < 1e-12);
        z.re
    }

    fn ber1() -> Arc<dyn Distribution> {
        Arc::new(CentralLaw::bernoulli(CPMap::identity(1)))
    }

    #[test]
    fn zero_point_gives_unit() {
        let p = NilpotentPoint::zero(3, 2);
        let law = CentralLaw::arcsine(CPMap::identity(2));
        assert_eq!(eval_m(&law, &p).unwrap(), MatricialElement::identity(3, 2));
        assert!(eval_b(&law, &p).unwrap().is_zero());
        assert!(eval_r(&law, &p).unwrap().is_zero());
        assert!(eval_h(&law, &p).unwrap().is_zero());
    }

    #[test]
    fn bernoulli_corner_and_semicircle_corner() {
        let p = superdiag_embed(&[BElement::identity(1), BElement::identity(1)]).unwrap();
        let m = eval_m(ber1().as_ref(), &p).unwrap();
        assert!((m.block(0, 2).matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
        let semi = CentralLaw::semicircle(CPMap::identity(1));
        let p4 = superdiag_embed(&vec![BElement::identity(1); 4]).unwrap();
        assert!((eval_m(&semi, &p4).unwrap().block(0, 4).matrix()[(0, 0)].re - 2.0).abs() < 1e-13);
    }

    #[test]
    fn scalar_transform_coefficients() {
        // arcsine (variance 2): M = 1 + 2z² + 6z⁴ gives B = 2z² + 2z⁴ + ...
        let arc = CentralLaw::arcsine(CPMap::identity(1).scaled(2.into()).unwrap());
        let p4 = superdiag_embed(&vec![BElement::identity(1); 4]).unwrap();
        let b = eval_b(&arc, &p4).unwrap();
        assert!((b.block(0, 4).matrix()[(0, 0)].re - 2.0).abs() < 1e-13);
        assert!((b.block(0, 2).matrix()[(0, 0)].re - 2.0).abs() < 1e-13);
        // Bernoulli ±1: free cumulants κ₂ = 1, κ₄ = -1
        let r = eval_r(ber1().as_ref(), &p4).unwrap();
        assert!((r.block(0, 2).matrix()[(0, 0)].re - 1.0).abs() < 1e-13);
        assert!((r.block(0, 4).matrix()[(0, 0)].re + 1.0).abs() < 1e-13);
    }

    #[test]
    fn boolean_bernoulli_doubles_variance() {
        let conv = boolean_convolve(ber1(), ber1(), 6).unwrap();
        assert!((scalar_corner(conv.as_ref(), 4) - 4.0).abs() < 1e-12);
        assert!((scalar_corner(conv.as_ref(), 6) - 8.0).abs() < 1e-12);
        let doubled = boolean_power(ber1(), 2.0, 6).unwrap();
        assert!((scalar_corner(doubled.as_ref(), 4) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn free_bernoulli_square_is_arcsine() {
        let conv = free_convolve(ber1(), ber1(), 8).unwrap();
        for (n, want) in [(2, 2.0), (4, 6.0), (6, 20.0), (8, 70.0)] {
            assert!(
                (scalar_corner(conv.as_ref(), n) - want).abs() < 1e-10,
                "order {n}"
            );
        }
        assert!(scalar_corner(conv.as_ref(), 5).abs() < 1e-12);
    }

    #[test]
    fn monotone_arcsine_is_stable() {
        let arc: Arc<dyn Distribution> = Arc::new(CentralLaw::arcsine(CPMap::identity(1)));
        let conv = monotone_convolve(arc.clone(), arc.clone(), 8).unwrap();
        assert!((scalar_corner(conv.as_ref(), 4) - 6.0).abs() < 1e-12);
        let wide = dilate(arc, 2f64.sqrt()).unwrap();
        for n in [2, 6, 8] {
            assert!(
                (scalar_corner(conv.as_ref(), n) - scalar_corner(wide.as_ref(), n)).abs() < 1e-10
            );
        }
        let bb = monotone_convolve(ber1(), ber1(), 4).unwrap();
        assert!((scalar_corner(bb.as_ref(), 2) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn zero_law_is_a_unit() {
        let zero: Arc<dyn Distribution> = Arc::new(ZeroLaw::new(1));
        let arc: Arc<dyn Distribution> = Arc::new(CentralLaw::arcsine(CPMap::identity(1)));
        for conv in [
            free_convolve(arc.clone(), zero.clone(), 6).unwrap(),
            boolean_convolve(arc.clone(), zero.clone(), 6).unwrap(),
            monotone_convolve(arc.clone(), zero.clone(), 6).unwrap(),
            monotone_convolve(zero.clone(), arc.clone(), 6).unwrap(),
        ] {
            assert!((scalar_corner(conv.as_ref(), 4) - 1.5).abs() < 1e-13);
            assert!(
                (scalar_corner(conv.as_ref(), 6) - scalar_corner(arc.as_ref(), 6)).abs() < 1e-13
            );
        }
    }

    #[test]
    fn monotone_is_not_commutative() {
        // composing z/(1-z²) and z + z³ + 2z⁵ + 5z⁷ in both orders: 20 vs 22
        let semi: Arc<dyn Distribution> = Arc::new(CentralLaw::semicircle(CPMap::identity(1)));
        let lr = monotone_convolve(ber1(), semi.clone(), 6).unwrap();
        let rl = monotone_convolve(semi, ber1(), 6).unwrap();
        assert!((scalar_corner(lr.as_ref(), 4) - 6.0).abs() < 1e-12);
        assert!((scalar_corner(rl.as_ref(), 4) - 6.0).abs() < 1e-12);
        assert!((scalar_corner(lr.as_ref(), 6) - 20.0).abs() < 1e-11);
        assert!((scalar_corner(rl.as_ref(), 6) - 22.0).abs() < 1e-11);
    }

    #[test]
    fn capacity_is_enforced() {
        let conv = free_convolve(ber1(), ber1(), 4).unwrap();
        assert!(matches!(
            conv.matricial_moment(&MatricialElement::identity(1, 1), 5),
            Err(Error::Capacity { .. })
        ));
        let capped: Arc<dyn Distribution> = Arc::new(CentralLaw::semicircle(CPMap::identity(1)));
        assert!(free_convolve(capped, ber1(), 20).is_err());
    }

    #[test]
    fn matricial_moments_match_parents_for_unit_power() {
        let a = BElement::from_real_diag(&[1.0, 0.5]);
        let model: Arc<dyn Distribution> = Arc::new(MatrixModel::two_point(&a).unwrap());
        let same = free_power(model.clone(), 1.0, 6).unwrap();
        let b = MatricialElement::from_blocks(2, 2, |i, j| {
            crate::algebra::CMat::from_fn(2, 2, |p, q| {
                re(0.3 * (i + 2 * j) as f64 - 0.2 * (p * q) as f64)
            })
        });
        let want = model.matricial_moments(&b, 6).unwrap();
        let got = same.matricial_moments(&b, 6).unwrap();
        for (w, g) in want.iter().zip(&got) {
            assert!(max_abs(&(w.matrix() - g.matrix())) < 1e-11);
        }
    }
}
