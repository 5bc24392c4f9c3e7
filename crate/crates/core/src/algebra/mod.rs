//! Dense arithmetic over `B = M_d(C)` and its matrix levels.

mod cp_map;
mod element;
mod growth;
mod nilpotent;
mod sqrt;

use nalgebra::SymmetricEigen;

pub use cp_map::{CPMap, KRAUS_SA_TOL};
pub use element::{max_abs, op_norm, BElement, CMat, MatricialElement};
pub use growth::{moment_growth_bound, GrowthEstimate};
pub use nilpotent::{corner_extract, shift_embed, superdiag_embed, NilpotentPoint};
pub use sqrt::{principal_sqrt, BRANCH_TOL};

pub(crate) use element::{invert, re};

use crate::error::{dim_err, Error, Result};

/// Strict positivity margin for half-plane membership.
pub const EPS_PSD: f64 = 1e-10;

/// Smallest eigenvalue of the hermitian part `(b - b*) / 2i`.
pub fn min_imaginary_eigenvalue(b: &MatricialElement) -> f64 {
    let h = b.im_part();
    // symmetrise away rounding before the hermitian solver
    let h = (&h + h.adjoint()) * re(0.5);
    SymmetricEigen::new(h).eigenvalues.min()
}

/// `Im b > 0` with margin [`EPS_PSD`].
pub fn herm_positive(b: &MatricialElement) -> Result<bool> {
    herm_positive_with_margin(b, EPS_PSD)
}

pub fn herm_positive_with_margin(b: &MatricialElement, margin: f64) -> Result<bool> {
    if b.matrix().nrows() != b.matrix().ncols() {
        return Err(dim_err("half-plane test needs a square matrix"));
    }
    Ok(min_imaginary_eigenvalue(b) > margin)
}

/// A point of the matricial upper half-plane.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfPlanePoint {
    value: MatricialElement,
}

impl HalfPlanePoint {
    pub fn new(value: MatricialElement) -> Result<Self> {
        if !herm_positive(&value)? {
            return Err(Error::Domain(format!(
                "imaginary part has eigenvalue {:.3e} <= {EPS_PSD:e}",
                min_imaginary_eigenvalue(&value)
            )));
        }
        Ok(Self { value })
    }

    /// `z · 1` at level 1 over `M_d(C)`.
    pub fn scalar(d: usize, z: num_complex::Complex64) -> Result<Self> {
        Self::new(MatricialElement::identity(1, d).scale(z))
    }

    pub fn value(&self) -> &MatricialElement {
        &self.value
    }

    pub fn into_value(self) -> MatricialElement {
        self.value
    }
}

impl AsRef<MatricialElement> for HalfPlanePoint {
    fn as_ref(&self) -> &MatricialElement {
        &self.value
    }
}
