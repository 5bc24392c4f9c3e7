//! Completely positive variance maps in Kraus form.

use num_rational::Ratio;

use super::element::{re, BElement, CMat, MatricialElement};
use crate::error::{dim_err, Error, Result};

/// Tolerance for the self-adjointness of Kraus operators.
pub const KRAUS_SA_TOL: f64 = 1e-12;

/// `η(b) = w · Σ_j K_j b K_j*`.
///
/// The usual constructor takes self-adjoint operators `a_j`, so that
/// `η(b) = w Σ a_j b a_j`. The weight defaults to `1 / len`.
#[derive(Clone, Debug, PartialEq)]
pub struct CPMap {
    kraus: Vec<BElement>,
    adjoints: Vec<BElement>,
    weight: Ratio<u64>,
    self_adjoint: bool,
}

impl CPMap {
    pub fn new(kraus: Vec<BElement>, weight: Ratio<u64>) -> Result<Self> {
        Self::check_shapes(&kraus, weight)?;
        for (j, a) in kraus.iter().enumerate() {
            if !a.is_self_adjoint(KRAUS_SA_TOL) {
                return Err(Error::Argument(format!(
                    "Kraus operator {j} is not self-adjoint"
                )));
            }
        }
        Ok(Self {
            adjoints: kraus.clone(),
            kraus,
            weight,
            self_adjoint: true,
        })
    }

    /// Weight `1 / len(kraus)`.
    pub fn averaged(kraus: Vec<BElement>) -> Result<Self> {
        let m = kraus.len().max(1) as u64;
        Self::new(kraus, Ratio::new(1, m))
    }

    /// `η(b) = a b a`.
    pub fn single(a: BElement) -> Result<Self> {
        Self::new(vec![a], Ratio::from_integer(1))
    }

    /// Identity map on `M_d(C)`.
    pub fn identity(d: usize) -> Self {
        Self::single(BElement::identity(d)).expect("identity is self-adjoint")
    }

    /// Arbitrary Kraus operators, `η(b) = w Σ K b K*`.
    pub fn from_general_kraus(kraus: Vec<BElement>, weight: Ratio<u64>) -> Result<Self> {
        Self::check_shapes(&kraus, weight)?;
        let self_adjoint = kraus.iter().all(|k| k.is_self_adjoint(KRAUS_SA_TOL));
        let adjoints = kraus.iter().map(BElement::adjoint).collect();
        Ok(Self {
            kraus,
            adjoints,
            weight,
            self_adjoint,
        })
    }

    fn check_shapes(kraus: &[BElement], weight: Ratio<u64>) -> Result<()> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::Argument("empty Kraus list".into()))?;
        if kraus.iter().any(|k| k.dim() != first.dim()) {
            return Err(dim_err("Kraus operators of different sizes"));
        }
        if *weight.numer() == 0 {
            return Err(Error::Argument("Kraus weight must be positive".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }

    pub fn kraus(&self) -> &[BElement] {
        &self.kraus
    }

    pub fn weight(&self) -> Ratio<u64> {
        self.weight
    }

    pub fn weight_f64(&self) -> f64 {
        *self.weight.numer() as f64 / *self.weight.denom() as f64
    }

    pub fn is_self_adjoint_form(&self) -> bool {
        self.self_adjoint
    }

    /// Same operators, weight multiplied by `factor`.
    pub fn scaled(&self, factor: Ratio<u64>) -> Result<Self> {
        if *factor.numer() == 0 {
            return Err(Error::Argument("scale factor must be positive".into()));
        }
        let mut out = self.clone();
        out.weight = self.weight * factor;
        Ok(out)
    }

    /// When `η(b) = w·aba`, return `sqrt(w)·a`, the `c` with `η(b) = cbc`.
    pub fn as_single_sandwich(&self) -> Option<BElement> {
        if self.kraus.len() != 1 || !self.self_adjoint {
            return None;
        }
        let s = self.weight_f64().sqrt();
        Some(BElement::new(self.kraus[0].matrix() * re(s)).expect("finite"))
    }

    /// `(η ⊗ 1_m)(b)`, applying `η` to every `d x d` block.
    pub fn apply(&self, b: &MatricialElement) -> Result<MatricialElement> {
        if b.base_dim() != self.dim() {
            return Err(dim_err(format!(
                "η acts on M_{}, argument is over M_{}",
                self.dim(),
                b.base_dim()
            )));
        }
        Ok(self.apply_unchecked(b))
    }

    pub(crate) fn apply_unchecked(&self, b: &MatricialElement) -> MatricialElement {
        let d = self.dim();
        let m = b.level();
        let w = re(self.weight_f64());
        let mut out = CMat::zeros(m * d, m * d);
        let mut tmp = CMat::zeros(d, d);
        for i in 0..m {
            for j in 0..m {
                if b.block_is_zero(i, j) {
                    continue;
                }
                let blk = b.matrix().view((i * d, j * d), (d, d));
                let mut acc = CMat::zeros(d, d);
                for (k, ka) in self.kraus.iter().zip(&self.adjoints) {
                    tmp.gemm(re(1.0), k.matrix(), &blk, re(0.0));
                    acc.gemm(re(1.0), &tmp, ka.matrix(), re(1.0));
                }
                out.view_mut((i * d, j * d), (d, d)).copy_from(&(acc * w));
            }
        }
        MatricialElement::from_parts(m, d, out)
    }

    pub fn apply_base(&self, b: &BElement) -> Result<BElement> {
        self.apply(&b.to_matricial())?.as_base()
    }
}
