//! Moment engines for operator-valued distributions.
//!
//! A distribution is anything that can produce the fully matricial moments
//! `(μ ⊗ 1_m)((X·b)^n)` for `b ∈ M_m(B)`. Multilinear moments
//! `μ(X b_1 X b_2 ... X b_n)` are read off the corner of a superdiagonal
//! nilpotent point, so every engine serves both.

mod central;
mod matrix_model;
mod simple;

use std::fmt;

use crate::algebra::{
    corner_extract, re, superdiag_embed, BElement, CMat, CPMap, MatricialElement, NilpotentPoint,
};
use crate::error::{dim_err, Error, Result};

pub use central::{
    arcsine_moment_enum, arcsine_moment_fast, arcsine_moments_fast, bernoulli_moment,
    semicircle_moment, ArcsineEngine, CentralLaw, LawKind, DEFAULT_ENUM_CAP,
};
pub use matrix_model::MatrixModel;
pub use simple::{dilate, Dilated, ZeroLaw};

pub trait Distribution: Send + Sync + fmt::Debug {
    fn base_dim(&self) -> usize;

    /// Largest supported moment order, `None` when unbounded.
    fn order_cap(&self) -> Option<usize>;

    /// `(μ ⊗ 1_m)((X·b)^n)`.
    fn matricial_moment(&self, b: &MatricialElement, n: usize) -> Result<MatricialElement>;

    /// Orders `0..=n` at the same `b`.
    fn matricial_moments(&self, b: &MatricialElement, n: usize) -> Result<Vec<MatricialElement>> {
        (0..=n).map(|k| self.matricial_moment(b, k)).collect()
    }

    /// `M_μ(p) = Σ_{k < index} μ̃((X·p)^k)`, an exact finite sum.
    fn moment_series(&self, p: &NilpotentPoint) -> Result<MatricialElement> {
        check_dim(self.base_dim(), p.value())?;
        let top = p.index() - 1;
        check_order(self.order_cap(), top)?;
        let moments = self.matricial_moments(p.value(), top)?;
        Ok(moments
            .iter()
            .skip(1)
            .fold(moments[0].clone(), |acc, m| &acc + m))
    }

    /// `μ(X b_1 X b_2 ... X b_n)`; the empty word gives the identity.
    fn multilinear_moment(&self, bs: &[BElement]) -> Result<BElement> {
        if bs.is_empty() {
            return Ok(BElement::identity(self.base_dim()));
        }
        check_order(self.order_cap(), bs.len())?;
        let p = superdiag_embed(bs)?;
        check_dim(self.base_dim(), p.value())?;
        Ok(corner_extract(&self.moment_series(&p)?))
    }
}

pub fn check_order(cap: Option<usize>, n: usize) -> Result<()> {
    match cap {
        Some(cap) if n > cap => Err(Error::Capacity { requested: n, cap }),
        _ => Ok(()),
    }
}

pub fn check_dim(d: usize, b: &MatricialElement) -> Result<()> {
    if b.base_dim() != d {
        return Err(dim_err(format!(
            "distribution is over M_{d}, argument over M_{}",
            b.base_dim()
        )));
    }
    Ok(())
}

/// The variance `η(b) = μ(X b X)` in Kraus form, read off the Choi matrix
/// `Σ_{ij} E_ij ⊗ η(E_ij)`.
pub fn variance_of(dist: &dyn Distribution) -> Result<CPMap> {
    let d = dist.base_dim();
    let one = BElement::identity(d);
    let mut choi = CMat::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let mut e = CMat::zeros(d, d);
            e[(i, j)] = re(1.0);
            let v = dist.multilinear_moment(&[BElement::new(e)?, one.clone()])?;
            choi.view_mut((i * d, j * d), (d, d)).copy_from(v.matrix());
        }
    }
    let choi = (&choi + choi.adjoint()) * re(0.5);
    let eig = choi.symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let mut kraus = Vec::new();
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam <= 1e-13 * top.max(1.0) {
            continue;
        }
        // column k reshaped: K[p, i] = √λ v[i·d + p]
        let v = eig.eigenvectors.column(k);
        let s = lam.sqrt();
        kraus.push(BElement::new(CMat::from_fn(d, d, |p, i| {
            v[i * d + p] * re(s)
        }))?);
    }
    if kraus.is_empty() {
        kraus.push(BElement::zeros(d));
    }
    CPMap::from_general_kraus(kraus, num_rational::Ratio::from_integer(1))
}
