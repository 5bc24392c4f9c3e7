use serde::{Deserialize, Serialize};

use super::MatricialElement;
use crate::error::Result;
use crate::laws::Distribution;
use crate::sampling;

/// Empirical exponential growth rate of a distribution's moments.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthEstimate {
    /// `max_n max_samples ‖moment_n‖^{1/n}`.
    pub m: f64,
    /// Per-order maxima, index `n - 1` for order `n`.
    pub per_order: Vec<f64>,
    pub samples: usize,
}

/// Estimate `M` with `‖μ(X b_1 ⋯ X b_n)‖ ≤ M^n` over unit-norm samples.
///
/// Samples multilinear moments at random unit-norm tuples and matricial
/// moments at level 2, plus the identity argument. Diagnostic only: a
/// finite sample gives a lower estimate of the true constant.
pub fn moment_growth_bound(
    dist: &dyn Distribution,
    order_cap: usize,
    trials: usize,
    seed: u64,
) -> Result<GrowthEstimate> {
    let d = dist.base_dim();
    let cap = dist.order_cap().map_or(order_cap, |c| c.min(order_cap));
    let mut rng = sampling::rng(seed);
    let mut per_order = vec![0.0f64; cap];
    let mut samples = 0;

    let id = MatricialElement::identity(1, d);
    for (k, mom) in dist.matricial_moments(&id, cap)?.iter().enumerate().skip(1) {
        per_order[k - 1] = per_order[k - 1].max(mom.norm().powf(1.0 / k as f64));
    }
    samples += 1;

    for _ in 0..trials {
        for n in 1..=cap {
            let bs: Vec<_> = (0..n).map(|_| sampling::random_unit(&mut rng, d)).collect();
            let mom = dist.multilinear_moment(&bs)?;
            per_order[n - 1] = per_order[n - 1].max(mom.norm().powf(1.0 / n as f64));
        }
        let b2 = sampling::random_matricial(&mut rng, 2, d);
        let b2 = b2.scale_re(1.0 / b2.norm().max(f64::MIN_POSITIVE));
        for (k, mom) in dist.matricial_moments(&b2, cap)?.iter().enumerate().skip(1) {
            per_order[k - 1] = per_order[k - 1].max(mom.norm().powf(1.0 / k as f64));
        }
        samples += 1;
    }
    let m = per_order.iter().cloned().fold(0.0, f64::max);
    Ok(GrowthEstimate {
        m,
        per_order,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{BElement, CPMap};
    use crate::laws::{CentralLaw, ZeroLaw};

    #[test]
    fn bernoulli_unit_norm_bounded_by_one() {
        let a = BElement::from_real_diag(&[1.0, -0.5]);
        let law = CentralLaw::bernoulli(CPMap::single(a).unwrap());
        let est = moment_growth_bound(&law, 8, 5, 11).unwrap();
        assert!(est.m <= 1.0 + 1e-9, "{}", est.m);
    }

    #[test]
    fn zero_law_has_zero_growth() {
        let est = moment_growth_bound(&ZeroLaw::new(2), 6, 3, 1).unwrap();
        assert_eq!(est.m, 0.0);
    }

    #[test]
    fn semicircle_below_two() {
        let law = CentralLaw::semicircle(CPMap::identity(1));
        let est = moment_growth_bound(&law, 12, 3, 5).unwrap();
        assert!(est.m <= 2.0 && est.m > 1.0, "{}", est.m);
    }
}
