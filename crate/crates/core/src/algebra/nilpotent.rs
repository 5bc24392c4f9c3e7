//! Nilpotent matricial points and the superdiagonal moment-extraction device.

use super::element::{BElement, CMat, MatricialElement};
use crate::error::{dim_err, Error, Result};

/// A strictly block-upper-triangular element of `M_m(B)`.
///
/// `index` is the nilpotency index in the tensor-algebra sense: the smallest
/// `r` such that every product of `r` elements with the same block support
/// vanishes, i.e. one more than the longest chain of non-zero blocks
/// `(i0,i1), (i1,i2), ...`. Any word `X p X p ... X p` of length `index`
/// is therefore zero for every operator-valued `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct NilpotentPoint {
    value: MatricialElement,
    index: usize,
}

impl NilpotentPoint {
    pub fn new(value: MatricialElement) -> Result<Self> {
        let l = value.level();
        for i in 0..l {
            for j in 0..=i {
                if !value.block_is_zero(i, j) {
                    return Err(Error::Argument(format!(
                        "block ({i}, {j}) is non-zero; nilpotent points must be strictly block-upper-triangular"
                    )));
                }
            }
        }
        let index = chain_index(&value);
        Ok(Self { value, index })
    }

    /// The zero point at the given level.
    pub fn zero(level: usize, base_dim: usize) -> Self {
        Self {
            value: MatricialElement::zeros(level, base_dim),
            index: 1,
        }
    }

    pub fn value(&self) -> &MatricialElement {
        &self.value
    }

    pub fn into_value(self) -> MatricialElement {
        self.value
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn level(&self) -> usize {
        self.value.level()
    }

    pub fn base_dim(&self) -> usize {
        self.value.base_dim()
    }

    /// `λ · p`, same support.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            value: self.value.scale_re(lambda),
            index: self.index,
        }
    }

    /// Products of a nilpotent point with upper-unipotent factors keep the
    /// block support inside the transitive closure of the original one, so
    /// the index can only drop. Used for `p · M(p)` and `c · M(b)^{-1}`.
    pub(crate) fn derived(&self, value: MatricialElement) -> Self {
        debug_assert_eq!(value.level(), self.level());
        let index = chain_index(&value).min(self.index);
        Self { value, index }
    }
}

fn chain_index(value: &MatricialElement) -> usize {
    let l = value.level();
    // longest[i]: longest chain of non-zero blocks starting at block row i
    let mut longest = vec![0usize; l];
    for i in (0..l).rev() {
        for j in (i + 1)..l {
            if !value.block_is_zero(i, j) {
                longest[i] = longest[i].max(1 + longest[j]);
            }
        }
    }
    longest.into_iter().max().unwrap_or(0) + 1
}

/// Place `b_1, ..., b_n` on the block superdiagonal of an `(n+1) x (n+1)`
/// block matrix. The `(1, n+1)` corner of `μ̃((X·p)^n)` is then
/// `μ(X b_1 X b_2 ... X b_n)`.
pub fn superdiag_embed(bs: &[BElement]) -> Result<NilpotentPoint> {
    let first = bs
        .first()
        .ok_or_else(|| Error::Precondition("superdiagonal embedding needs n >= 1".into()))?;
    let d = first.dim();
    if bs.iter().any(|b| b.dim() != d) {
        return Err(dim_err("superdiagonal entries of different sizes"));
    }
    let n = bs.len();
    let mut mat = CMat::zeros((n + 1) * d, (n + 1) * d);
    for (k, b) in bs.iter().enumerate() {
        mat.view_mut((k * d, (k + 1) * d), (d, d))
            .copy_from(b.matrix());
    }
    NilpotentPoint::new(MatricialElement::from_parts(n + 1, d, mat))
}

/// The top-right `(1, level)` block.
pub fn corner_extract(m: &MatricialElement) -> BElement {
    m.block(0, m.level() - 1)
}

/// `S_{n+1} ⊗ b`: copies of the level-`m` element `b` on the coarse
/// superdiagonal of an `(n+1) x (n+1)` array of level-`m` blocks. The coarse
/// `(0, k)` block of `M(S ⊗ b)` is `μ̃((X·b)^k)`.
pub fn shift_embed(b: &MatricialElement, n: usize) -> NilpotentPoint {
    let m = b.level();
    let d = b.base_dim();
    let w = m * d;
    let mut mat = CMat::zeros((n + 1) * w, (n + 1) * w);
    for k in 0..n {
        mat.view_mut((k * w, (k + 1) * w), (w, w))
            .copy_from(b.matrix());
    }
    let value = MatricialElement::from_parts((n + 1) * m, d, mat);
    let index = chain_index(&value);
    NilpotentPoint { value, index }
}
