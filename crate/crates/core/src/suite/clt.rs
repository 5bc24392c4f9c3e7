//! Central limit experiments: distance of normalized `N`-fold convolution
//! powers from the matching central law.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{max_abs, MatricialElement};
use crate::error::{Error, Result};
use crate::laws::{dilate, variance_of, CentralLaw, Distribution, LawKind};
use crate::sampling;
use crate::series::{boolean_power, free_power, monotone_convolve};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CltKind {
    Boolean,
    Free,
    Monotone,
}

impl CltKind {
    pub fn limit(self) -> LawKind {
        match self {
            Self::Boolean => LawKind::Bernoulli,
            Self::Free => LawKind::Semicircle,
            Self::Monotone => LawKind::Arcsine,
        }
    }
}

impl std::str::FromStr for CltKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boolean" => Ok(Self::Boolean),
            "free" => Ok(Self::Free),
            "monotone" => Ok(Self::Monotone),
            other => Err(Error::Argument(format!(
                "unknown convolution kind {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CltCurve {
    pub kind: CltKind,
    pub n_values: Vec<usize>,
    /// Max moment deviation from the limit law, per `N`.
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log N`.
    pub slope: Option<f64>,
    /// Same curve with the composition order reversed (monotone only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opposite_order_errors: Option<Vec<f64>>,
    /// `‖μ(X)‖` and the largest sampled third moment of the base.
    pub base_first_moment: f64,
    pub base_third_moment: f64,
}

/// Threshold on `‖μ(X)‖` above which a base counts as not centered.
pub const CENTERED_TOL: f64 = 1e-10;

/// Least-squares slope through `(ln N, ln e)`; points with `e = 0` or
/// `N < min_n` are skipped.
pub fn fit_slope(n_values: &[usize], errors: &[f64], min_n: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> = n_values
        .iter()
        .zip(errors)
        .filter(|(&n, &e)| n >= min_n && e > 0.0 && e.is_finite())
        .map(|(&n, &e)| ((n as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Count of steps where the curve rises, allowing `slack` relative noise on
/// the last two points.
pub fn monotonicity_violations(errors: &[f64], slack: f64) -> usize {
    let n = errors.len();
    (1..n)
        .filter(|&k| {
            let allow = if k + 2 >= n { 1.0 + slack } else { 1.0 };
            errors[k] > errors[k - 1] * allow
        })
        .count()
}

fn sample_points(d: usize, seed: u64) -> Vec<MatricialElement> {
    let mut rng = sampling::rng(seed);
    vec![
        MatricialElement::identity(1, d),
        sampling::random_unit(&mut rng, d).to_matricial(),
    ]
}

fn deviation(
    a: &dyn Distribution,
    b: &dyn Distribution,
    points: &[MatricialElement],
    order: usize,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in points {
        let x = a.matricial_moments(p, order)?;
        let y = b.matricial_moments(p, order)?;
        for (u, v) in x.iter().zip(&y) {
            worst = worst.max(max_abs(&(u.matrix() - v.matrix())));
        }
    }
    Ok(worst)
}

/// `N`-fold convolution power of `base` dilated by `1/√N`.
pub fn normalized_power(
    kind: CltKind,
    base: &Arc<dyn Distribution>,
    n: usize,
    order: usize,
) -> Result<Arc<dyn Distribution>> {
    let x = dilate(base.clone(), 1.0 / (n as f64).sqrt())?;
    match kind {
        CltKind::Boolean => boolean_power(x, n as f64, order),
        CltKind::Free => free_power(x, n as f64, order),
        CltKind::Monotone => monotone_iterate(&x, n, order, false),
    }
}

/// `x ▷ (x ▷ (... ▷ x))` built left-first, or the mirrored nesting.
fn monotone_iterate(
    x: &Arc<dyn Distribution>,
    n: usize,
    order: usize,
    mirrored: bool,
) -> Result<Arc<dyn Distribution>> {
    let mut acc = x.clone();
    for _ in 1..n {
        acc = if mirrored {
            monotone_convolve(acc, x.clone(), order)?
        } else {
            monotone_convolve(x.clone(), acc, order)?
        };
    }
    Ok(acc)
}

pub fn clt_experiment(
    kind: CltKind,
    base: Arc<dyn Distribution>,
    n_values: &[usize],
    order: usize,
    seed: u64,
) -> Result<CltCurve> {
    let d = base.base_dim();
    let first = base
        .matricial_moment(&MatricialElement::identity(1, d), 1)?
        .norm();
    if first > CENTERED_TOL {
        return Err(Error::Precondition(format!(
            "base is not centered: ‖μ(X)‖ = {first:.3e}"
        )));
    }
    let points = sample_points(d, seed);
    let mut third = 0.0f64;
    for p in &points {
        third = third.max(base.matricial_moment(p, 3)?.norm());
    }
    let limit = CentralLaw::new(kind.limit(), variance_of(base.as_ref())?);

    let mut errors = Vec::with_capacity(n_values.len());
    let mut opposite = Vec::new();
    for &n in n_values {
        if n == 0 {
            return Err(Error::Argument("N must be positive".into()));
        }
        let s = normalized_power(kind, &base, n, order)?;
        errors.push(deviation(s.as_ref(), &limit, &points, order)?);
        if kind == CltKind::Monotone {
            let x = dilate(base.clone(), 1.0 / (n as f64).sqrt())?;
            let mirrored = monotone_iterate(&x, n, order, true)?;
            opposite.push(deviation(mirrored.as_ref(), &limit, &points, order)?);
        }
    }
    let slope = fit_slope(n_values, &errors, 4);
    Ok(CltCurve {
        kind,
        n_values: n_values.to_vec(),
        errors,
        slope,
        opposite_order_errors: (kind == CltKind::Monotone).then_some(opposite),
        base_first_moment: first,
        base_third_moment: third,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{BElement, CPMap};
    use crate::laws::MatrixModel;

    #[test]
    fn slope_of_power_law() {
        let n = [1, 2, 4, 8, 16];
        let e: Vec<f64> = n.iter().map(|&k| 3.0 / k as f64).collect();
        assert!((fit_slope(&n, &e, 1).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(fit_slope(&[4], &[1.0], 1), None);
    }

    #[test]
    fn monotonicity_counts_rises() {
        assert_eq!(monotonicity_violations(&[4.0, 3.0, 2.0, 1.0], 0.1), 0);
        assert_eq!(monotonicity_violations(&[4.0, 5.0, 2.0, 2.1], 0.1), 1);
        assert_eq!(monotonicity_violations(&[4.0, 3.0, 2.0, 2.5], 0.1), 1);
    }

    #[test]
    fn free_bernoulli_fourth_moment() {
        let ber: Arc<dyn Distribution> = Arc::new(CentralLaw::bernoulli(CPMap::identity(1)));
        let b = MatricialElement::identity(1, 1);
        for n in [1usize, 2, 4] {
            let s = normalized_power(CltKind::Free, &ber, n, 4).unwrap();
            let m4 = s.matricial_moment(&b, 4).unwrap().matrix()[(0, 0)].re;
            assert!((m4 - (2.0 - 1.0 / n as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_single_step_is_base() {
        let ber: Arc<dyn Distribution> = Arc::new(CentralLaw::bernoulli(CPMap::identity(1)));
        let curve = clt_experiment(CltKind::Monotone, ber, &[1], 4, 1).unwrap();
        // |b| = 1 at d = 1, so only |m4 - 3/2| = 1/2 survives
        assert!((curve.errors[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn uncentered_base_rejected() {
        let x = BElement::from_real_diag(&[1.0, 0.0]).to_matricial();
        let model =
            MatrixModel::new(crate::algebra::MatricialElement::new(2, 1, x.into_matrix()).unwrap())
                .unwrap();
        assert!(clt_experiment(CltKind::Free, Arc::new(model), &[1, 2], 4, 1).is_err());
    }
}
