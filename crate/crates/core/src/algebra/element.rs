//! Dense carriers for elements of `B = M_d(C)` and of the matrix levels
//! `M_m(B)`.
//!
//! A level-`m` element is stored as one `(m*d) x (m*d)` complex matrix whose
//! `(i, j)` block of size `d x d` is the `(i, j)` entry over `B`. Block
//! bookkeeping is metadata only; all arithmetic happens on the flat matrix.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{dim_err, Error, Result};

pub type CMat = DMatrix<Complex64>;

pub(crate) fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn all_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// An element of the base algebra `B = M_d(C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BElement {
    mat: CMat,
}

impl BElement {
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(dim_err(format!(
                "{}x{} is not square",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.nrows() == 0 {
            return Err(dim_err("base dimension must be at least 1"));
        }
        if !all_finite(&mat) {
            return Err(Error::Argument("non-finite matrix entry".into()));
        }
        Ok(Self { mat })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            mat: CMat::identity(d, d),
        }
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            mat: CMat::zeros(d, d),
        }
    }

    pub fn scalar(d: usize, c: Complex64) -> Self {
        Self {
            mat: CMat::identity(d, d) * c,
        }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d = diag.len();
        Self {
            mat: CMat::from_fn(d, d, |i, j| {
                if i == j {
                    re(diag[i])
                } else {
                    Complex64::default()
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        max_abs(&(&self.mat - self.mat.adjoint())) <= tol
    }

    pub fn inverse(&self) -> Result<Self> {
        invert(&self.mat).map(|mat| Self { mat })
    }

    pub fn norm(&self) -> f64 {
        op_norm(&self.mat)
    }

    /// `b ⊗ 1_m`: the block-diagonal copy of `b` at level `m`.
    pub fn lift(&self, level: usize) -> MatricialElement {
        let d = self.dim();
        let mut mat = CMat::zeros(level * d, level * d);
        for i in 0..level {
            mat.view_mut((i * d, i * d), (d, d)).copy_from(&self.mat);
        }
        MatricialElement {
            level,
            base_dim: d,
            mat,
        }
    }

    pub fn to_matricial(&self) -> MatricialElement {
        MatricialElement {
            level: 1,
            base_dim: self.dim(),
            mat: self.mat.clone(),
        }
    }
}

pub(crate) fn invert(m: &CMat) -> Result<CMat> {
    let n = m.nrows();
    let lu = m.clone().lu();
    let inv = lu
        .try_inverse()
        .ok_or_else(|| Error::Singular(format!("{n}x{n} inverse")))?;
    if !all_finite(&inv) {
        return Err(Error::Singular(format!("{n}x{n} inverse is not finite")));
    }
    Ok(inv)
}

/// An element of `M_m(B)`, the level-`m` amplification of the base algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct MatricialElement {
    level: usize,
    base_dim: usize,
    mat: CMat,
}

impl MatricialElement {
    pub fn new(level: usize, base_dim: usize, mat: CMat) -> Result<Self> {
        if level == 0 || base_dim == 0 {
            return Err(dim_err("level and base dimension must be positive"));
        }
        let n = level * base_dim;
        if mat.nrows() != n || mat.ncols() != n {
            return Err(dim_err(format!(
                "expected {n}x{n} for level {level} over M_{base_dim}, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if !all_finite(&mat) {
            return Err(Error::Argument("non-finite matrix entry".into()));
        }
        Ok(Self {
            level,
            base_dim,
            mat,
        })
    }

    pub(crate) fn from_parts(level: usize, base_dim: usize, mat: CMat) -> Self {
        debug_assert_eq!(mat.nrows(), level * base_dim);
        Self {
            level,
            base_dim,
            mat,
        }
    }

    pub fn identity(level: usize, base_dim: usize) -> Self {
        let n = level * base_dim;
        Self {
            level,
            base_dim,
            mat: CMat::identity(n, n),
        }
    }

    pub fn zeros(level: usize, base_dim: usize) -> Self {
        let n = level * base_dim;
        Self {
            level,
            base_dim,
            mat: CMat::zeros(n, n),
        }
    }

    pub fn from_blocks(
        level: usize,
        base_dim: usize,
        mut block: impl FnMut(usize, usize) -> CMat,
    ) -> Self {
        let d = base_dim;
        let mut mat = CMat::zeros(level * d, level * d);
        for i in 0..level {
            for j in 0..level {
                let b = block(i, j);
                assert_eq!(b.shape(), (d, d), "block shape");
                mat.view_mut((i * d, j * d), (d, d)).copy_from(&b);
            }
        }
        Self {
            level,
            base_dim,
            mat,
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    /// Side length of the flattened matrix.
    pub fn size(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn block(&self, i: usize, j: usize) -> BElement {
        let d = self.base_dim;
        BElement {
            mat: self.mat.view((i * d, j * d), (d, d)).into_owned(),
        }
    }

    pub(crate) fn block_is_zero(&self, i: usize, j: usize) -> bool {
        let d = self.base_dim;
        self.mat
            .view((i * d, j * d), (d, d))
            .iter()
            .all(|z| *z == Complex64::default())
    }

    /// View the element as a level-`outer` element whose entries are
    /// `inner x inner` blocks over `B` and return the `(r, s)` entry.
    pub fn coarse_block(&self, inner: usize, r: usize, s: usize) -> MatricialElement {
        let w = inner * self.base_dim;
        Self {
            level: inner,
            base_dim: self.base_dim,
            mat: self.mat.view((r * w, s * w), (w, w)).into_owned(),
        }
    }

    /// Reinterpret as a level-1 element over `M_{level*d}(C)`.
    pub fn flatten(&self) -> MatricialElement {
        Self {
            level: 1,
            base_dim: self.size(),
            mat: self.mat.clone(),
        }
    }

    pub fn as_base(&self) -> Result<BElement> {
        if self.level != 1 {
            return Err(dim_err(format!(
                "expected a level-1 element, got level {}",
                self.level
            )));
        }
        Ok(BElement {
            mat: self.mat.clone(),
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            level: self.level,
            base_dim: self.base_dim,
            mat: self.mat.adjoint(),
        }
    }

    /// Hermitian imaginary part `(b - b*) / 2i`.
    pub fn im_part(&self) -> CMat {
        (&self.mat - self.mat.adjoint()) * Complex64::new(0.0, -0.5)
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        max_abs(&(&self.mat - self.mat.adjoint())) <= tol
    }

    pub fn inverse(&self) -> Result<Self> {
        invert(&self.mat).map(|mat| Self {
            level: self.level,
            base_dim: self.base_dim,
            mat,
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            level: self.level,
            base_dim: self.base_dim,
            mat: &self.mat * c,
        }
    }

    pub fn scale_re(&self, x: f64) -> Self {
        self.scale(re(x))
    }

    /// `self + c * 1`.
    pub fn shift(&self, c: Complex64) -> Self {
        let mut mat = self.mat.clone();
        for k in 0..mat.nrows() {
            mat[(k, k)] += c;
        }
        Self {
            level: self.level,
            base_dim: self.base_dim,
            mat,
        }
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::identity(self.level, self.base_dim);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        op_norm(&self.mat)
    }

    pub fn is_zero(&self) -> bool {
        self.mat.iter().all(|z| *z == Complex64::default())
    }

    /// `id_B ⊗ tr_m`: average of the diagonal blocks.
    pub fn partial_trace(&self) -> BElement {
        let d = self.base_dim;
        let mut acc = CMat::zeros(d, d);
        for i in 0..self.level {
            acc += self.mat.view((i * d, i * d), (d, d));
        }
        BElement {
            mat: acc / re(self.level as f64),
        }
    }

    /// Exact-bit key for memo tables.
    pub(crate) fn bit_key(&self) -> Vec<u64> {
        let mut key = Vec::with_capacity(2 * self.mat.len() + 2);
        key.push(self.level as u64);
        key.push(self.base_dim as u64);
        for z in self.mat.iter() {
            key.push(z.re.to_bits());
            key.push(z.im.to_bits());
        }
        key
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr<&MatricialElement> for &MatricialElement {
            type Output = MatricialElement;
            fn $f(self, rhs: &MatricialElement) -> MatricialElement {
                assert!(
                    self.level == rhs.level && self.base_dim == rhs.base_dim,
                    "shape mismatch: level {} / M_{} vs level {} / M_{}",
                    self.level, self.base_dim, rhs.level, rhs.base_dim
                );
                MatricialElement { level: self.level, base_dim: self.base_dim, mat: &self.mat $op &rhs.mat }
            }
        }
        impl $tr<MatricialElement> for MatricialElement {
            type Output = MatricialElement;
            fn $f(self, rhs: MatricialElement) -> MatricialElement {
                &self $op &rhs
            }
        }
        impl $tr<&MatricialElement> for MatricialElement {
            type Output = MatricialElement;
            fn $f(self, rhs: &MatricialElement) -> MatricialElement {
                &self $op rhs
            }
        }
        impl $tr<MatricialElement> for &MatricialElement {
            type Output = MatricialElement;
            fn $f(self, rhs: MatricialElement) -> MatricialElement {
                self $op &rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &MatricialElement {
    type Output = MatricialElement;
    fn neg(self) -> MatricialElement {
        MatricialElement {
            level: self.level,
            base_dim: self.base_dim,
            mat: -&self.mat,
        }
    }
}

impl Neg for MatricialElement {
    type Output = MatricialElement;
    fn neg(self) -> MatricialElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(level: usize, d: usize) -> MatricialElement {
        MatricialElement::from_blocks(level, d, |i, j| {
            CMat::from_fn(d, d, |p, q| {
                Complex64::new((i + 2 * p) as f64 - q as f64, (j * q) as f64 * 0.5)
            })
        })
    }

    #[test]
    fn blocks_roundtrip() {
        let x = sample(3, 2);
        assert_eq!(x.size(), 6);
        let b = x.block(1, 2);
        assert_eq!(b.matrix(), &x.matrix().view((2, 4), (2, 2)).into_owned());
    }

    #[test]
    fn lift_is_block_diagonal() {
        let b = BElement::from_real_diag(&[1.0, 2.0]);
        let l = b.lift(3);
        assert_eq!(l.block(2, 2), b);
        assert!(l.block_is_zero(0, 1));
        assert_eq!(l.partial_trace(), b);
    }

    #[test]
    fn shape_checks() {
        assert!(MatricialElement::new(2, 2, CMat::zeros(3, 3)).is_err());
        assert!(BElement::new(CMat::zeros(2, 3)).is_err());
        let mut m = CMat::identity(2, 2);
        m[(0, 1)] = Complex64::new(f64::NAN, 0.0);
        assert!(BElement::new(m).is_err());
    }

    #[test]
    fn coarse_block_extracts_sub_levels() {
        let x = sample(4, 1);
        let c = x.coarse_block(2, 1, 0);
        assert_eq!(c.level(), 2);
        assert_eq!(c.block(0, 1), x.block(2, 1));
    }

    #[test]
    fn singular_inverse_is_an_error() {
        assert!(MatricialElement::zeros(1, 2).inverse().is_err());
    }
}
