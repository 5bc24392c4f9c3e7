use std::sync::Arc;

use super::{check_dim, check_order, Distribution};
use crate::algebra::{MatricialElement, NilpotentPoint};
use crate::error::{Error, Result};

/// `δ₀`, the law of `X = 0`. Unit for all three additive convolutions.
#[derive(Clone, Copy, Debug)]
pub struct ZeroLaw {
    base_dim: usize,
}

impl ZeroLaw {
    pub fn new(base_dim: usize) -> Self {
        Self { base_dim }
    }
}

impl Distribution for ZeroLaw {
    fn base_dim(&self) -> usize {
        self.base_dim
    }

    fn order_cap(&self) -> Option<usize> {
        None
    }

    fn matricial_moment(&self, b: &MatricialElement, n: usize) -> Result<MatricialElement> {
        check_dim(self.base_dim, b)?;
        Ok(if n == 0 {
            MatricialElement::identity(b.level(), b.base_dim())
        } else {
            MatricialElement::zeros(b.level(), b.base_dim())
        })
    }

    fn moment_series(&self, p: &NilpotentPoint) -> Result<MatricialElement> {
        check_dim(self.base_dim, p.value())?;
        Ok(MatricialElement::identity(p.level(), p.base_dim()))
    }
}

/// The law of `λX`.
#[derive(Clone, Debug)]
pub struct Dilated {
    inner: Arc<dyn Distribution>,
    lambda: f64,
}

impl Dilated {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

pub fn dilate(dist: Arc<dyn Distribution>, lambda: f64) -> Result<Arc<dyn Distribution>> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Argument(format!(
            "dilation factor {lambda} must be finite and non-zero"
        )));
    }
    Ok(Arc::new(Dilated {
        inner: dist,
        lambda,
    }))
}

impl Distribution for Dilated {
    fn base_dim(&self) -> usize {
        self.inner.base_dim()
    }

    fn order_cap(&self) -> Option<usize> {
        self.inner.order_cap()
    }

    fn matricial_moment(&self, b: &MatricialElement, n: usize) -> Result<MatricialElement> {
        Ok(self
            .inner
            .matricial_moment(b, n)?
            .scale_re(self.lambda.powi(n as i32)))
    }

    fn matricial_moments(&self, b: &MatricialElement, n: usize) -> Result<Vec<MatricialElement>> {
        check_order(self.order_cap(), n)?;
        let raw = self.inner.matricial_moments(b, n)?;
        Ok(raw
            .into_iter()
            .enumerate()
            .map(|(k, m)| m.scale_re(self.lambda.powi(k as i32)))
            .collect())
    }

    fn moment_series(&self, p: &NilpotentPoint) -> Result<MatricialElement> {
        // (λX·p)^k = (X·λp)^k
        self.inner.moment_series(&p.scaled(self.lambda))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{BElement, CPMap};
    use crate::laws::CentralLaw;

    #[test]
    fn zero_factor_rejected() {
        let law: Arc<dyn Distribution> = Arc::new(CentralLaw::arcsine(CPMap::identity(1)));
        assert!(dilate(law, 0.0).is_err());
    }

    #[test]
    fn dilation_scales_by_lambda_power() {
        let law: Arc<dyn Distribution> = Arc::new(CentralLaw::arcsine(CPMap::identity(1)));
        let b = BElement::from_real_diag(&[1.0]).to_matricial();
        let wide = dilate(law.clone(), 2f64.sqrt()).unwrap();
        let m4 = law.matricial_moment(&b, 4).unwrap().matrix()[(0, 0)].re;
        let w4 = wide.matricial_moment(&b, 4).unwrap().matrix()[(0, 0)].re;
        assert!((w4 - 4.0 * m4).abs() < 1e-13);
        let same = dilate(law.clone(), 1.0).unwrap();
        assert_eq!(
            same.matricial_moment(&b, 6).unwrap(),
            law.matricial_moment(&b, 6).unwrap()
        );
    }

    #[test]
    fn dilated_semicircle_fourth_moment() {
        let law: Arc<dyn Distribution> = Arc::new(CentralLaw::semicircle(CPMap::identity(1)));
        let wide = dilate(law, 2f64.sqrt()).unwrap();
        let b = BElement::from_real_diag(&[1.0]).to_matricial();
        assert!((wide.matricial_moment(&b, 4).unwrap().matrix()[(0, 0)].re - 8.0).abs() < 1e-12);
    }
}
