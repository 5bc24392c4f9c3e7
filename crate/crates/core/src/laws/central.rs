//! Bernoulli, semicircular and arcsine central limit laws of a variance `η`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{check_dim, check_order, Distribution};
use crate::algebra::{CPMap, MatricialElement, NilpotentPoint};
use crate::error::Result;
use crate::partitions::{enumerate_nc2, Decomposition, NcPairPartition};

/// Order cap for the partition-enumeration engines (`Catalan(8) = 1430`).
pub const DEFAULT_ENUM_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    Bernoulli,
    Semicircle,
    Arcsine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ArcsineEngine {
    /// Nesting-weighted sum over `NC₂(n)`.
    Enumeration,
    /// `B`-transform recurrence, `O(n²)` products.
    #[default]
    Recurrence,
}

/// `(η_m(b)·b)^{n/2}` for even `n`, zero for odd `n`.
pub fn bernoulli_moment(eta: &CPMap, b: &MatricialElement, n: usize) -> Result<MatricialElement> {
    check_dim(eta.dim(), b)?;
    if n % 2 == 1 {
        return Ok(MatricialElement::zeros(b.level(), b.base_dim()));
    }
    let step = &eta.apply_unchecked(b) * b;
    Ok(step.pow(n / 2))
}

/// Sum over `NC₂(n)` of `W(γ, b)·b`.
pub fn semicircle_moment(
    eta: &CPMap,
    b: &MatricialElement,
    n: usize,
    cap: usize,
) -> Result<MatricialElement> {
    check_dim(eta.dim(), b)?;
    check_order(Some(cap), n)?;
    Ok(PairingSum::new(eta, b, false).moment(n))
}

/// Sum over `NC₂(n)` of `V(γ, b)·b`, where an enclosure `σ̃` carries the
/// extra factor `1 / (|σ| + 1)`.
pub fn arcsine_moment_enum(
    eta: &CPMap,
    b: &MatricialElement,
    n: usize,
    cap: usize,
) -> Result<MatricialElement> {
    check_dim(eta.dim(), b)?;
    check_order(Some(cap), n)?;
    Ok(PairingSum::new(eta, b, true).moment(n))
}

pub fn arcsine_moment_fast(
    eta: &CPMap,
    b: &MatricialElement,
    n: usize,
) -> Result<MatricialElement> {
    Ok(arcsine_moments_fast(eta, b, n)?
        .pop()
        .expect("n + 1 moments"))
}

/// Arcsine moments of orders `0..=n` from the `B`-transform recurrence
/// `B_{2k}(b) = (1/k) η(b·a_{2k-2}(b))·b` and `a_n = Σ_j B_j a_{n-j}`.
pub fn arcsine_moments_fast(
    eta: &CPMap,
    b: &MatricialElement,
    n: usize,
) -> Result<Vec<MatricialElement>> {
    check_dim(eta.dim(), b)?;
    let (m, d) = (b.level(), b.base_dim());
    let mut moments = vec![MatricialElement::identity(m, d)];
    // boolean[k] holds B_{2k}
    let mut boolean: Vec<MatricialElement> = vec![MatricialElement::zeros(m, d)];
    for order in 1..=n {
        if order % 2 == 1 {
            moments.push(MatricialElement::zeros(m, d));
            continue;
        }
        let k = order / 2;
        let inner = b * &moments[order - 2];
        boolean.push((&eta.apply_unchecked(&inner) * b).scale_re(1.0 / k as f64));
        let mut acc = MatricialElement::zeros(m, d);
        for j in 1..=k {
            acc = &acc + &(&boolean[j] * &moments[order - 2 * j]);
        }
        moments.push(acc);
    }
    Ok(moments)
}

/// Memoised partition weights at one fixed argument `b`.
struct PairingSum<'a> {
    eta: &'a CPMap,
    b: &'a MatricialElement,
    nesting: bool,
    memo: HashMap<Vec<u16>, MatricialElement>,
}

impl<'a> PairingSum<'a> {
    fn new(eta: &'a CPMap, b: &'a MatricialElement, nesting: bool) -> Self {
        Self {
            eta,
            b,
            nesting,
            memo: HashMap::new(),
        }
    }

    fn weight(&mut self, g: &NcPairPartition) -> MatricialElement {
        if let Some(w) = self.memo.get(g.key()) {
            return w.clone();
        }
        let w = match g.decompose() {
            Decomposition::Atom => self.eta.apply_unchecked(self.b),
            Decomposition::Concat(left, right) => {
                let l = self.weight(&left);
                let r = self.weight(&right);
                &(&l * self.b) * &r
            }
            Decomposition::Tilde(inner) => {
                let v = self.weight(&inner);
                let w = self.eta.apply_unchecked(&(&(self.b * &v) * self.b));
                if self.nesting {
                    w.scale_re(1.0 / (inner.blocks() + 1) as f64)
                } else {
                    w
                }
            }
        };
        self.memo.insert(g.key().to_vec(), w.clone());
        w
    }

    fn moment(&mut self, n: usize) -> MatricialElement {
        let (m, d) = (self.b.level(), self.b.base_dim());
        if n == 0 {
            return MatricialElement::identity(m, d);
        }
        let mut acc = MatricialElement::zeros(m, d);
        for g in enumerate_nc2(n) {
            acc = &acc + &self.weight(&g);
        }
        &acc * self.b
    }
}

/// A central limit law with variance `η`.
#[derive(Clone, Debug)]
pub struct CentralLaw {
    kind: LawKind,
    variance: CPMap,
    engine: ArcsineEngine,
    order_cap: Option<usize>,
}

impl CentralLaw {
    pub fn new(kind: LawKind, variance: CPMap) -> Self {
        let order_cap = match kind {
            LawKind::Semicircle => Some(DEFAULT_ENUM_CAP),
            LawKind::Bernoulli | LawKind::Arcsine => None,
        };
        Self {
            kind,
            variance,
            engine: ArcsineEngine::default(),
            order_cap,
        }
    }

    pub fn bernoulli(variance: CPMap) -> Self {
        Self::new(LawKind::Bernoulli, variance)
    }

    pub fn semicircle(variance: CPMap) -> Self {
        Self::new(LawKind::Semicircle, variance)
    }

    pub fn arcsine(variance: CPMap) -> Self {
        Self::new(LawKind::Arcsine, variance)
    }

    /// Switch the arcsine law to the enumeration engine (capped at
    /// [`DEFAULT_ENUM_CAP`]).
    pub fn with_engine(mut self, engine: ArcsineEngine) -> Self {
        self.engine = engine;
        if self.kind == LawKind::Arcsine {
            self.order_cap = match engine {
                ArcsineEngine::Enumeration => Some(DEFAULT_ENUM_CAP),
                ArcsineEngine::Recurrence => None,
            };
        }
        self
    }

    pub fn with_order_cap(mut self, cap: Option<usize>) -> Self {
        self.order_cap = cap;
        self
    }

    pub fn kind(&self) -> LawKind {
        self.kind
    }

    pub fn variance(&self) -> &CPMap {
        &self.variance
    }

    fn enum_cap(&self) -> usize {
        self.order_cap.unwrap_or(usize::MAX)
    }
}

impl Distribution for CentralLaw {
    fn base_dim(&self) -> usize {
        self.variance.dim()
    }

    fn order_cap(&self) -> Option<usize> {
        self.order_cap
    }

    fn matricial_moment(&self, b: &MatricialElement, n: usize) -> Result<MatricialElement> {
        check_order(self.order_cap, n)?;
        match (self.kind, self.engine) {
            (LawKind::Bernoulli, _) => bernoulli_moment(&self.variance, b, n),
            (LawKind::Semicircle, _) => semicircle_moment(&self.variance, b, n, self.enum_cap()),
            (LawKind::Arcsine, ArcsineEngine::Enumeration) => {
                arcsine_moment_enum(&self.variance, b, n, self.enum_cap())
            }
            (LawKind::Arcsine, ArcsineEngine::Recurrence) => {
                arcsine_moment_fast(&self.variance, b, n)
            }
        }
    }

    fn matricial_moments(&self, b: &MatricialElement, n: usize) -> Result<Vec<MatricialElement>> {
        check_dim(self.base_dim(), b)?;
        check_order(self.order_cap, n)?;
        match (self.kind, self.engine) {
            (LawKind::Arcsine, ArcsineEngine::Recurrence) => {
                arcsine_moments_fast(&self.variance, b, n)
            }
            (LawKind::Bernoulli, _) => {
                let step = &self.variance.apply_unchecked(b) * b;
                let zero = MatricialElement::zeros(b.level(), b.base_dim());
                let mut out = Vec::with_capacity(n + 1);
                let mut power = MatricialElement::identity(b.level(), b.base_dim());
                for k in 0..=n {
                    if k % 2 == 0 {
                        if k > 0 {
                            power = &power * &step;
                        }
                        out.push(power.clone());
                    } else {
                        out.push(zero.clone());
                    }
                }
                Ok(out)
            }
            (kind, _) => {
                let mut sum = PairingSum::new(&self.variance, b, kind == LawKind::Arcsine);
                Ok((0..=n).map(|k| sum.moment(k)).collect())
            }
        }
    }

    fn moment_series(&self, p: &NilpotentPoint) -> Result<MatricialElement> {
        check_dim(self.base_dim(), p.value())?;
        if self.kind == LawKind::Bernoulli {
            // M_Ber(p) = [1 - η(p)p]^{-1}; the bracket is unipotent
            let b = p.value();
            let step = &self.variance.apply_unchecked(b) * b;
            return (-step).shift(crate::algebra::re(1.0)).inverse();
        }
        let top = p.index() - 1;
        check_order(self.order_cap, top)?;
        let moments = self.matricial_moments(p.value(), top)?;
        Ok(moments
            .iter()
            .skip(1)
            .fold(moments[0].clone(), |acc, m| &acc + m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::max_abs;
    use crate::algebra::BElement;

    fn scalar(x: f64) -> MatricialElement {
        BElement::from_real_diag(&[x]).to_matricial()
    }

    fn val(m: &MatricialElement) -> f64 {
        let z = m.matrix()[(0, 0)];
        assert!(z.im.abs() < 1e-14);
        z.re
    }

    #[test]
    fn scalar_bernoulli_moments() {
        let eta = CPMap::identity(1);
        for n in [2, 4, 6] {
            assert!((val(&bernoulli_moment(&eta, &scalar(1.0), n).unwrap()) - 1.0).abs() < 1e-14);
        }
        assert!(bernoulli_moment(&eta, &scalar(1.0), 3).unwrap().is_zero());
    }

    #[test]
    fn bernoulli_sandwich() {
        let eta = CPMap::single(BElement::from_real_diag(&[1.0, 2.0])).unwrap();
        let out = bernoulli_moment(&eta, &MatricialElement::identity(1, 2), 2).unwrap();
        assert_eq!(
            out.as_base().unwrap(),
            BElement::from_real_diag(&[1.0, 4.0])
        );
    }

    #[test]
    fn scalar_semicircle_is_catalan() {
        let eta = CPMap::identity(1);
        let got: Vec<f64> = (0..=8)
            .map(|n| val(&semicircle_moment(&eta, &scalar(1.0), n, 16).unwrap()))
            .collect();
        assert_eq!(got, vec![1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 5.0, 0.0, 14.0]);
    }

    #[test]
    fn second_moment_is_variance_times_b() {
        let a = BElement::new(crate::algebra::CMat::from_fn(2, 2, |i, j| {
            num_complex::Complex64::new(if i == j { 1.0 + i as f64 } else { 0.5 }, 0.0)
        }))
        .unwrap();
        let eta = CPMap::single(a).unwrap();
        let b = BElement::new(crate::algebra::CMat::from_fn(2, 2, |i, j| {
            num_complex::Complex64::new(i as f64 - j as f64, 0.25 * (i + j) as f64)
        }))
        .unwrap()
        .to_matricial();
        let expect = &eta.apply(&b).unwrap() * &b;
        for kind in [LawKind::Bernoulli, LawKind::Semicircle, LawKind::Arcsine] {
            let law = CentralLaw::new(kind, eta.clone());
            assert!(
                max_abs(&(law.matricial_moment(&b, 2).unwrap().matrix() - expect.matrix())) < 1e-14
            );
            assert!(law.matricial_moment(&b, 3).unwrap().is_zero());
        }
    }

    #[test]
    fn scalar_arcsine_nesting_weights() {
        let eta = CPMap::identity(1);
        assert!(
            (val(&arcsine_moment_enum(&eta, &scalar(1.0), 4, 16).unwrap()) - 1.5).abs() < 1e-14
        );
        let eta2 = eta.scaled(2.into()).unwrap();
        for (n, want) in [(2, 2.0), (4, 6.0), (6, 20.0)] {
            assert!(
                (val(&arcsine_moment_enum(&eta2, &scalar(1.0), n, 16).unwrap()) - want).abs()
                    < 1e-12
            );
            assert!(
                (val(&arcsine_moment_fast(&eta2, &scalar(1.0), n).unwrap()) - want).abs() < 1e-12
            );
        }
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let eta = CPMap::identity(1);
        assert!(matches!(
            semicircle_moment(&eta, &scalar(1.0), 18, 16),
            Err(crate::error::Error::Capacity {
                requested: 18,
                cap: 16
            })
        ));
        let law = CentralLaw::semicircle(eta);
        assert!(law.matricial_moment(&scalar(1.0), 18).is_err());
    }

    #[test]
    fn no_nesting_means_equal_weights() {
        // (12)(34)...: pure juxtaposition of atoms, V = W
        let eta = CPMap::identity(1);
        let b = scalar(0.7);
        let g = NcPairPartition::atom()
            .oplus(&NcPairPartition::atom())
            .oplus(&NcPairPartition::atom());
        let mut v = PairingSum::new(&eta, &b, true);
        let mut w = PairingSum::new(&eta, &b, false);
        assert_eq!(v.weight(&g), w.weight(&g));
        for g in enumerate_nc2(8) {
            assert!(val(&v.weight(&g)) <= val(&w.weight(&g)) + 1e-15);
        }
    }
}
