//! Principal matrix square root through the complex Schur form.

use num_complex::Complex64;

use super::element::{max_abs, CMat, MatricialElement};
use crate::error::{Error, Result};

/// Relative distance from the closed negative real axis below which an
/// eigenvalue is treated as sitting on the branch cut.
pub const BRANCH_TOL: f64 = 1e-12;

/// `S` with `S² = M` and spectrum in the open right half-plane.
///
/// `M = Q T Q*` is triangularised, the upper-triangular root `U` of `T` is
/// built column by column from `U_ii = sqrt(T_ii)` and
/// `U_ij = (T_ij - Σ_{i<k<j} U_ik U_kj) / (U_ii + U_jj)`, and `S = Q U Q*`.
pub fn principal_sqrt(m: &MatricialElement) -> Result<MatricialElement> {
    let root = sqrtm(m.matrix())?;
    Ok(MatricialElement::from_parts(m.level(), m.base_dim(), root))
}

pub(crate) fn sqrtm(m: &CMat) -> Result<CMat> {
    let n = m.nrows();
    let scale = max_abs(m).max(f64::MIN_POSITIVE);
    let (q, t) = m.clone().schur().unpack();
    for k in 0..n {
        let z = t[(k, k)];
        if z.re <= 0.0 && z.im.abs() <= BRANCH_TOL * scale {
            return Err(Error::Branch { re: z.re, im: z.im });
        }
    }
    let mut u = CMat::zeros(n, n);
    for j in 0..n {
        u[(j, j)] = t[(j, j)].sqrt();
        for i in (0..j).rev() {
            let mut s = t[(i, j)];
            for k in (i + 1)..j {
                s -= u[(i, k)] * u[(k, j)];
            }
            let den: Complex64 = u[(i, i)] + u[(j, j)];
            u[(i, j)] = s / den;
        }
    }
    Ok(&q * u * q.adjoint())
}
