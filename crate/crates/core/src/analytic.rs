//! Cauchy and F-transforms on the matricial upper half-plane.
//!
//! Fixed points are found by damped iteration with continuation in the
//! imaginary direction: solve at `b + iT·1` for `T = T₀, T₀/2, ...`,
//! warm-starting each stage, and finish at `T = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    herm_positive, max_abs, min_imaginary_eigenvalue, principal_sqrt, BElement, CPMap,
    HalfPlanePoint, MatricialElement,
};
use crate::error::{dim_err, Error, Result};
use crate::laws::Distribution;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IterationConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Weight of the new iterate, in `(0, 1]`.
    pub damping: f64,
    /// Starting lift `T₀`; `None` picks `8·‖a‖` for the law at hand.
    pub continuation_lift: Option<f64>,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 10_000,
            damping: 1.0,
            continuation_lift: None,
        }
    }
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Config(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if let Some(t) = self.continuation_lift {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Config(format!(
                    "continuation lift must be finite and non-negative, got {t}"
                )));
            }
        }
        Ok(())
    }

    fn lift_or(&self, scale: f64) -> f64 {
        self.continuation_lift.unwrap_or(8.0 * scale)
    }
}

/// Outcome of a fixed-point solve.
#[derive(Clone, Debug)]
pub struct Solved {
    pub value: MatricialElement,
    /// Residual of the defining equation at the final iterate.
    pub residual: f64,
    pub iterations: usize,
}

fn lifted(b: &MatricialElement, t: f64) -> MatricialElement {
    b.shift(Complex64::new(0.0, t))
}

fn diff_norm(x: &MatricialElement, y: &MatricialElement) -> f64 {
    max_abs(&(x.matrix() - y.matrix()))
}

/// Damped fixed-point iteration `x ← (1-θ)x + θ·step(b_T, x)` along the
/// continuation path.
fn continuation_solve(
    b: &MatricialElement,
    lift: f64,
    cfg: &IterationConfig,
    init: MatricialElement,
    step: impl Fn(&MatricialElement, &MatricialElement) -> Result<MatricialElement>,
) -> Result<(MatricialElement, usize)> {
    cfg.validate()?;
    let mut stages = Vec::new();
    let floor = 1e-3 * (1.0 + min_imaginary_eigenvalue(b).max(0.0));
    let mut t = lift;
    while t > floor {
        stages.push(t);
        t *= 0.5;
    }
    stages.push(0.0);

    let theta = cfg.damping;
    let mut x = init;
    let mut total = 0;
    let last = stages.len() - 1;
    for (k, &t) in stages.iter().enumerate() {
        let bt = lifted(b, t);
        let tol = if k == last { cfg.tol } else { cfg.tol.sqrt() };
        let mut converged = false;
        let mut change = f64::INFINITY;
        for _ in 0..cfg.max_iter {
            let fx = step(&bt, &x)?;
            let next = if theta == 1.0 {
                fx
            } else {
                &x.scale_re(1.0 - theta) + &fx.scale_re(theta)
            };
            change = diff_norm(&next, &x);
            x = next;
            total += 1;
            if !x.matrix().iter().all(|z| z.is_finite()) {
                return Err(Error::Convergence {
                    iterations: total,
                    residual: f64::NAN,
                });
            }
            if change <= tol * (1.0 + max_abs(x.matrix())) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence {
                iterations: total,
                residual: change,
            });
        }
    }
    Ok((x, total))
}

/// `F_Ber(b) = b - η(b^{-1})`.
pub fn f_bernoulli(eta: &CPMap, b: &MatricialElement) -> Result<MatricialElement> {
    Ok(b - &eta.apply(&b.inverse()?)?)
}

/// `G_Ber(b) = [b - η(b^{-1})]^{-1}`.
pub fn cauchy_bernoulli(eta: &CPMap, b: &HalfPlanePoint) -> Result<MatricialElement> {
    f_bernoulli(eta, b.value())?
        .inverse()
        .map_err(|_| Error::Domain("b - η(b^{-1}) is singular at this point".into()))
}

fn variance_scale(eta: &CPMap) -> f64 {
    eta.apply_base(&BElement::identity(eta.dim()))
        .map(|x| x.norm().sqrt())
        .unwrap_or(1.0)
}

/// `G = (b - η(G))^{-1}`.
pub fn cauchy_semicircle(eta: &CPMap, b: &HalfPlanePoint, cfg: &IterationConfig) -> Result<Solved> {
    let b = b.value();
    let lift = cfg.lift_or(variance_scale(eta));
    let init = lifted(b, lift).inverse()?;
    let (g, iterations) =
        continuation_solve(b, lift, cfg, init, |bt, g| (bt - &eta.apply(g)?).inverse())?;
    let residual = diff_norm(&(b - &eta.apply(&g)?).inverse()?, &g);
    Ok(Solved {
        value: g,
        residual,
        iterations,
    })
}

/// `ω_n(b) = b/n + (1 - 1/n)·F_Ber(ω_n(b))` for the Bernoulli law of `η`.
pub fn subordination_omega(
    eta: &CPMap,
    n: usize,
    b: &HalfPlanePoint,
    cfg: &IterationConfig,
) -> Result<Solved> {
    if n < 2 {
        return Err(Error::Argument(format!(
            "subordination needs n >= 2, got {n}"
        )));
    }
    let b = b.value();
    let (w_b, w_f) = (1.0 / n as f64, 1.0 - 1.0 / n as f64);
    let lift = cfg.lift_or(variance_scale(eta));
    let (omega, iterations) = continuation_solve(b, lift, cfg, lifted(b, lift), |bt, w| {
        Ok(&bt.scale_re(w_b) + &f_bernoulli(eta, w)?.scale_re(w_f))
    })?;
    let rhs = &b.scale_re(w_b) + &f_bernoulli(eta, &omega)?.scale_re(w_f);
    let residual = diff_norm(&omega, &rhs);
    Ok(Solved {
        value: omega,
        residual,
        iterations,
    })
}

/// `F` of `Ber(η)^{⊞n}`, through subordination.
pub fn f_bernoulli_power(
    eta: &CPMap,
    n: usize,
    b: &HalfPlanePoint,
    cfg: &IterationConfig,
) -> Result<MatricialElement> {
    let omega = subordination_omega(eta, n, b, cfg)?;
    f_bernoulli(eta, &omega.value)
}

#[derive(Clone, Debug)]
pub struct ArcsineF {
    pub value: MatricialElement,
    pub omega: MatricialElement,
    /// Subordination equation residual.
    pub residual: f64,
    pub iterations: usize,
    /// `‖F - (±√((ba^{-1})² - 4))·a‖`, `None` when the square root is off
    /// its branch or neither sign lands in the half-plane.
    pub sqrt_check: Option<f64>,
}

fn check_a(a: &BElement, b: &MatricialElement) -> Result<BElement> {
    if !a.is_self_adjoint(1e-12) {
        return Err(Error::Argument("a must be self-adjoint".into()));
    }
    if a.dim() != b.base_dim() {
        return Err(dim_err(format!(
            "a is {0}x{0}, point is over M_{1}",
            a.dim(),
            b.base_dim()
        )));
    }
    a.inverse()
        .map_err(|_| Error::Argument("a must be invertible".into()))
}

/// `F` of `Ber(a·a) ⊞ Ber(a·a)`, the arcsine law of variance `2a·a`.
///
/// Solves `ω = b/2 + F_Ber(ω)/2` and returns `2ω - b`.
pub fn f_arcsine(a: &BElement, b: &HalfPlanePoint, cfg: &IterationConfig) -> Result<ArcsineF> {
    let a_inv = check_a(a, b.value())?;
    let eta = CPMap::single(a.clone())?;
    let cfg = IterationConfig {
        continuation_lift: Some(cfg.lift_or(a.norm())),
        ..*cfg
    };
    let omega = subordination_omega(&eta, 2, b, &cfg)?;
    let bv = b.value();
    let value = &omega.value.scale_re(2.0) - bv;

    let m = bv.level();
    let (al, ail) = (a.lift(m), a_inv.lift(m));
    let u = bv * &ail;
    let sqrt_check = principal_sqrt(&(&u * &u).shift(Complex64::new(-4.0, 0.0)))
        .ok()
        .and_then(|s| {
            [1.0, -1.0]
                .into_iter()
                .map(|sign| (&s * &al).scale_re(sign))
                .filter(|cand| herm_positive(cand).unwrap_or(false))
                .map(|cand| diff_norm(&cand, &value))
                .reduce(f64::min)
        });
    Ok(ArcsineF {
        value,
        omega: omega.value,
        residual: omega.residual,
        iterations: omega.iterations,
        sqrt_check,
    })
}

fn arcsine_value(
    a: &BElement,
    b: &MatricialElement,
    cfg: &IterationConfig,
) -> Result<MatricialElement> {
    Ok(f_arcsine(a, &HalfPlanePoint::new(b.clone())?, cfg)?.value)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AbelReport {
    pub n: usize,
    /// `‖φ(F^{∘n}(b)) - (φ(b) - 4n)‖` with `φ(w) = w a^{-1} w a^{-1}`.
    pub residual: f64,
    /// Smallest eigenvalue of `Im F^{∘k}(b)` over the iterates.
    pub min_imaginary: f64,
}

/// `φ(w) = w a^{-1} w a^{-1}`.
pub fn abel_phi(a_inv: &MatricialElement, w: &MatricialElement) -> MatricialElement {
    let x = w * a_inv;
    &x * &x
}

pub fn abel_check(
    a: &BElement,
    b: &HalfPlanePoint,
    n: usize,
    cfg: &IterationConfig,
) -> Result<AbelReport> {
    let a_inv = check_a(a, b.value())?.lift(b.value().level());
    let mut w = b.value().clone();
    let mut min_im = f64::INFINITY;
    for k in 0..n {
        w = arcsine_value(a, &w, cfg)?;
        let lam = min_imaginary_eigenvalue(&w);
        if !(lam > 0.0) {
            return Err(Error::Domain(format!(
                "iterate {} left the upper half-plane (min Im eigenvalue {lam:e})",
                k + 1
            )));
        }
        min_im = min_im.min(lam);
    }
    let target = abel_phi(&a_inv, b.value()).shift(Complex64::new(-4.0 * n as f64, 0.0));
    let residual = diff_norm(&abel_phi(&a_inv, &w), &target);
    Ok(AbelReport {
        n,
        residual,
        min_imaginary: min_im,
    })
}

/// `F^{∘n}(b)` by repeated application.
pub fn f_arcsine_iterate(
    a: &BElement,
    b: &HalfPlanePoint,
    n: usize,
    cfg: &IterationConfig,
) -> Result<MatricialElement> {
    let mut w = b.value().clone();
    for _ in 0..n {
        w = arcsine_value(a, &w, cfg)?;
    }
    Ok(w)
}

/// `F(t, b) = √t·F(b/√t)`.
pub fn semigroup_f(
    a: &BElement,
    t: f64,
    b: &HalfPlanePoint,
    cfg: &IterationConfig,
) -> Result<MatricialElement> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Argument(format!(
            "semigroup time {t} must be positive"
        )));
    }
    let s = t.sqrt();
    Ok(arcsine_value(a, &b.value().scale_re(1.0 / s), cfg)?.scale_re(s))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OdeReport {
    pub h: f64,
    /// Direction `b - 2η(b^{-1})` with `η = a·a`, the Bernoulli variance.
    pub residual_bernoulli_variance: f64,
    /// Direction with `η = 2a·a`, the variance of the arcsine law itself.
    pub residual_arcsine_variance: f64,
}

/// Central difference of `F` along `v`, one Richardson step (`h`, `h/2`).
fn directional_derivative(
    a: &BElement,
    b: &MatricialElement,
    v: &MatricialElement,
    h: f64,
    cfg: &IterationConfig,
) -> Result<MatricialElement> {
    let central = |h: f64| -> Result<MatricialElement> {
        let plus = arcsine_value(a, &(b + &v.scale_re(h)), cfg)?;
        let minus = arcsine_value(a, &(b - &v.scale_re(h)), cfg)?;
        Ok((&plus - &minus).scale_re(0.5 / h))
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok(&fine.scale_re(4.0 / 3.0) - &coarse.scale_re(1.0 / 3.0))
}

/// `‖F(b) - F'(b)[b - 2η(b^{-1})]‖` under both readings of `η`.
///
/// `h = None` uses `1e-5·‖b‖`, measured along the unit direction.
pub fn ode_residual(
    a: &BElement,
    b: &HalfPlanePoint,
    h: Option<f64>,
    cfg: &IterationConfig,
) -> Result<OdeReport> {
    check_a(a, b.value())?;
    let bv = b.value();
    let h = h.unwrap_or(1e-5 * bv.norm());
    if !(h > 0.0) {
        return Err(Error::Argument(format!("step {h} must be positive")));
    }
    let f = arcsine_value(a, bv, cfg)?;
    let inv = bv.inverse()?;
    let eta = CPMap::single(a.clone())?;
    let mut out = [0.0; 2];
    for (slot, factor) in [(0usize, 2.0), (1, 4.0)] {
        let v = bv - &eta.apply(&inv)?.scale_re(factor);
        let vn = v.norm().max(f64::MIN_POSITIVE);
        let unit = v.scale_re(1.0 / vn);
        let d = directional_derivative(a, bv, &unit, h, cfg)?.scale_re(vn);
        out[slot] = diff_norm(&f, &d);
    }
    Ok(OdeReport {
        h,
        residual_bernoulli_variance: out[0],
        residual_arcsine_variance: out[1],
    })
}

/// `‖(bG)² - 1 - 4(aG)²‖` with `G = F^{-1}` for the arcsine law of
/// variance `2a·a`.
pub fn quadratic_g_check(a: &BElement, b: &HalfPlanePoint, cfg: &IterationConfig) -> Result<f64> {
    let bv = b.value();
    let g = f_arcsine(a, b, cfg)?.value.inverse()?;
    let al = a.lift(bv.level());
    let bg = bv * &g;
    let ag = &al * &g;
    let lhs = &bg * &bg;
    let rhs = (&ag * &ag).scale_re(4.0).shift(Complex64::new(1.0, 0.0));
    Ok(diff_norm(&lhs, &rhs))
}

/// `|(z - 2a)G(z)(z + 2a)G(z) - 1|` for scalar `z`, `a`.
pub fn quadratic_g_scalar(a: f64, z: Complex64, cfg: &IterationConfig) -> Result<f64> {
    let b = HalfPlanePoint::scalar(1, z)?;
    let g = f_arcsine(&BElement::from_real_diag(&[a]), &b, cfg)?
        .value
        .inverse()?
        .matrix()[(0, 0)];
    Ok(((z - 2.0 * a) * g * (z + 2.0 * a) * g - 1.0).norm())
}

#[derive(Clone, Debug)]
pub struct PartialTraceReport {
    /// `tr_m` of the level-`m` semicircular transform.
    pub traced: BElement,
    /// Semicircular transform of the averaged variance.
    pub direct: BElement,
    pub residual: f64,
}

/// Compare `tr_m G_S(b ⊗ 1_m)`, `S` semicircular over `M_m(B)` with
/// variance `B ↦ A B A`, `A = diag(a_1, ..., a_m)`, against `G_s(b)` for
/// `η(b) = (1/m) Σ a_j b a_j`.
pub fn partial_trace_semicircle_check(
    a_list: &[BElement],
    b: &HalfPlanePoint,
    cfg: &IterationConfig,
) -> Result<PartialTraceReport> {
    let first = a_list
        .first()
        .ok_or_else(|| Error::Argument("need at least one a_j".into()))?;
    let d = first.dim();
    if b.value().level() != 1 || b.value().base_dim() != d {
        return Err(dim_err(
            "partial-trace check takes a level-1 point over the base of the a_j",
        ));
    }
    let m = a_list.len();
    let big_a = MatricialElement::from_blocks(m, d, |i, j| {
        if i == j {
            a_list[i].matrix().clone()
        } else {
            crate::algebra::CMat::zeros(d, d)
        }
    });
    let big_eta = CPMap::single(BElement::new(big_a.into_matrix())?)?;
    let bb = b.value().as_base()?.lift(m).flatten();
    let big = cauchy_semicircle(&big_eta, &HalfPlanePoint::new(bb)?, cfg)?;
    let traced = MatricialElement::new(m, d, big.value.into_matrix())?.partial_trace();
    let eta = CPMap::averaged(a_list.to_vec())?;
    let direct = cauchy_semicircle(&eta, b, cfg)?.value.as_base()?;
    let residual = max_abs(&(traced.matrix() - direct.matrix()));
    Ok(PartialTraceReport {
        traced,
        direct,
        residual,
    })
}

#[derive(Clone, Debug)]
pub struct SeriesCauchy {
    pub value: MatricialElement,
    /// `‖b^{-1}‖ (M r)^{N+1} / (1 - M r)`, `r = ‖b^{-1}‖`.
    pub tail_bound: f64,
}

/// Truncated series `Σ_{k ≤ N} (μ ⊗ 1)(b^{-1}(X b^{-1})^k)`.
pub fn cauchy_generic(
    dist: &dyn Distribution,
    b: &MatricialElement,
    order: usize,
    growth: f64,
) -> Result<SeriesCauchy> {
    let inv = b.inverse()?;
    let r = inv.norm();
    let q = growth * r;
    if !(q < 1.0) {
        return Err(Error::Domain(format!(
            "series diverges: M·‖b^{{-1}}‖ = {q:.4} ≥ 1"
        )));
    }
    let moments = dist.matricial_moments(&inv, order)?;
    let sum = moments
        .iter()
        .skip(1)
        .fold(moments[0].clone(), |acc, m| &acc + m);
    let tail_bound = r * q.powi(order as i32 + 1) / (1.0 - q);
    Ok(SeriesCauchy {
        value: &inv * &sum,
        tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(zz: Complex64) -> HalfPlanePoint {
        HalfPlanePoint::scalar(1, zz).unwrap()
    }

    fn one() -> BElement {
        BElement::identity(1)
    }

    fn val(m: &MatricialElement) -> Complex64 {
        m.matrix()[(0, 0)]
    }

    #[test]
    fn bernoulli_closed_form() {
        let eta = CPMap::identity(1);
        assert!(
            (val(&cauchy_bernoulli(&eta, &pt(z(0.0, 2.0))).unwrap()) - z(0.0, -0.4)).norm() < 1e-14
        );
        let eta2 = CPMap::single(BElement::from_real_diag(&[1.0, 2.0])).unwrap();
        let b = HalfPlanePoint::new(MatricialElement::identity(1, 2).scale(z(0.0, 3.0))).unwrap();
        let g = cauchy_bernoulli(&eta2, &b).unwrap();
        assert!((g.matrix()[(0, 0)] - z(0.0, -0.3)).norm() < 1e-14);
        assert!((g.matrix()[(1, 1)] - z(0.0, -3.0 / 13.0)).norm() < 1e-14);
    }

    #[test]
    fn semicircle_scalar_roots() {
        let eta = CPMap::identity(1);
        let cfg = IterationConfig::default();
        let g = cauchy_semicircle(&eta, &pt(z(0.0, 2.0)), &cfg).unwrap();
        assert!((val(&g.value) - z(0.0, 1.0 - 2f64.sqrt())).norm() < 1e-10);
        assert!(g.residual < 1e-11);
    }

    #[test]
    fn arcsine_scalar_values() {
        let cfg = IterationConfig::default();
        let f = f_arcsine(&one(), &pt(z(0.0, 2.0)), &cfg).unwrap();
        assert!((val(&f.value) - z(0.0, 2.0 * 2f64.sqrt())).norm() < 1e-9);
        // z² - 4 = -8 sits on the branch cut
        assert!(f.sqrt_check.is_none());
        let f = f_arcsine(&one(), &pt(z(1.0, 2.0)), &cfg).unwrap();
        let want = (z(1.0, 2.0) * z(1.0, 2.0) - 4.0).sqrt();
        let want = if want.im > 0.0 { want } else { -want };
        assert!((val(&f.value) - want).norm() < 1e-9);
        assert!(f.sqrt_check.unwrap() < 1e-9);
    }

    #[test]
    fn arcsine_scalar_abel_and_semigroup() {
        let cfg = IterationConfig::default();
        let rep = abel_check(&one(), &pt(z(0.5, 1.0)), 2, &cfg).unwrap();
        assert!(rep.residual < 1e-8, "{}", rep.residual);
        let f2 = semigroup_f(&one(), 2.0, &pt(z(0.5, 1.0)), &cfg).unwrap();
        let want = (z(0.5, 1.0) * z(0.5, 1.0) - 8.0).sqrt();
        let want = if want.im > 0.0 { want } else { -want };
        assert!((val(&f2) - want).norm() < 1e-9);
    }

    #[test]
    fn ode_scalar_both_readings() {
        let cfg = IterationConfig {
            tol: 1e-15,
            ..Default::default()
        };
        let zz = z(0.0, 2.0);
        let rep = ode_residual(&one(), &pt(zz), Some(1e-3), &cfg).unwrap();
        let root = (zz * zz - 4.0).sqrt();
        assert!((rep.residual_bernoulli_variance - 2.0 / root.norm()).abs() < 1e-6);
        assert!(rep.residual_arcsine_variance < 1e-6);
    }

    #[test]
    fn quadratic_scalar_factored() {
        let cfg = IterationConfig::default();
        assert!(quadratic_g_scalar(1.0, z(1.0, 1.5), &cfg).unwrap() < 1e-10);
    }

    #[test]
    fn partial_trace_equal_weights_agree() {
        let cfg = IterationConfig::default();
        let rep = partial_trace_semicircle_check(&[one(), one()], &pt(z(0.3, 1.0)), &cfg).unwrap();
        assert!(rep.residual < 1e-10);
    }

    #[test]
    fn generic_series_vs_closed_form() {
        let law = crate::laws::CentralLaw::bernoulli(CPMap::identity(1));
        let b = MatricialElement::identity(1, 1).scale_re(10.0);
        let s = cauchy_generic(&law, &b, 12, 1.0).unwrap();
        let exact = 10.0 / 99.0;
        assert!((val(&s.value).re - exact).abs() <= s.tail_bound);
        assert!(cauchy_generic(&law, &MatricialElement::identity(1, 1), 12, 1.0).is_err());
    }
}
