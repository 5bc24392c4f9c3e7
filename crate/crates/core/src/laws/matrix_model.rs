use super::{check_dim, Distribution};
use crate::algebra::{BElement, CMat, MatricialElement, NilpotentPoint};
use crate::error::{Error, Result};

/// The law of a self-adjoint `X ∈ M_k(B)` under `id_B ⊗ tr_k`.
#[derive(Clone, Debug)]
pub struct MatrixModel {
    x: MatricialElement,
}

impl MatrixModel {
    /// `x` is read as a level-`k` element over `M_d(C)`.
    pub fn new(x: MatricialElement) -> Result<Self> {
        if !x.is_self_adjoint(1e-12) {
            return Err(Error::Argument(
                "matrix model X must be self-adjoint".into(),
            ));
        }
        Ok(Self { x })
    }

    /// Two-point law at `±a`: `X = diag(a, -a)` in `M_2(B)`.
    pub fn two_point(a: &BElement) -> Result<Self> {
        let d = a.dim();
        let x = MatricialElement::from_blocks(2, d, |i, j| match (i, j) {
            (0, 0) => a.matrix().clone(),
            (1, 1) => -a.matrix(),
            _ => CMat::zeros(d, d),
        });
        Self::new(x)
    }

    pub fn x(&self) -> &MatricialElement {
        &self.x
    }

    pub fn k(&self) -> usize {
        self.x.level()
    }

    /// `E(X b X) = (1/k) Σ_{l,j} X_{lj} b X_{lj}*` as general Kraus data.
    pub fn variance(&self) -> Result<crate::algebra::CPMap> {
        let k = self.k() as u64;
        let mut ops = Vec::new();
        for l in 0..self.k() {
            for j in 0..self.k() {
                if !self.x.block_is_zero(l, j) {
                    ops.push(self.x.block(l, j));
                }
            }
        }
        if ops.is_empty() {
            ops.push(BElement::zeros(self.x.base_dim()));
        }
        crate::algebra::CPMap::from_general_kraus(ops, num_rational::Ratio::new(1, k))
    }

    /// `1_m ⊗ X` and the lift of `b ∈ M_m(B)` into `M_m(M_k(B))`.
    fn lift(&self, b: &MatricialElement) -> (CMat, CMat) {
        let (m, k, d) = (b.level(), self.k(), b.base_dim());
        let w = k * d;
        let mut xm = CMat::zeros(m * w, m * w);
        let mut bl = CMat::zeros(m * w, m * w);
        for i in 0..m {
            xm.view_mut((i * w, i * w), (w, w))
                .copy_from(self.x.matrix());
            for j in 0..m {
                let blk = b.matrix().view((i * d, j * d), (d, d));
                for l in 0..k {
                    bl.view_mut((i * w + l * d, j * w + l * d), (d, d))
                        .copy_from(&blk);
                }
            }
        }
        (xm, bl)
    }

    /// Apply `id ⊗ tr_k` blockwise to an element of `M_m(M_k(B))`.
    fn expect(&self, big: &CMat, m: usize, d: usize) -> MatricialElement {
        let k = self.k();
        let w = k * d;
        let scale = crate::algebra::re(1.0 / k as f64);
        MatricialElement::from_blocks(m, d, |i, j| {
            let mut acc = CMat::zeros(d, d);
            for l in 0..k {
                acc += big.view((i * w + l * d, j * w + l * d), (d, d));
            }
            acc * scale
        })
    }
}

impl Distribution for MatrixModel {
    fn base_dim(&self) -> usize {
        self.x.base_dim()
    }

    fn order_cap(&self) -> Option<usize> {
        None
    }

    fn matricial_moment(&self, b: &MatricialElement, n: usize) -> Result<MatricialElement> {
        Ok(self.matricial_moments(b, n)?.pop().expect("n + 1 moments"))
    }

    fn matricial_moments(&self, b: &MatricialElement, n: usize) -> Result<Vec<MatricialElement>> {
        check_dim(self.base_dim(), b)?;
        let (m, d) = (b.level(), b.base_dim());
        let (xm, bl) = self.lift(b);
        let step = xm * bl;
        let mut power = CMat::identity(step.nrows(), step.ncols());
        let mut out = vec![MatricialElement::identity(m, d)];
        for _ in 1..=n {
            power = &power * &step;
            out.push(self.expect(&power, m, d));
        }
        Ok(out)
    }

    fn moment_series(&self, p: &NilpotentPoint) -> Result<MatricialElement> {
        check_dim(self.base_dim(), p.value())?;
        let (m, d) = (p.level(), p.base_dim());
        let (xm, bl) = self.lift(p.value());
        let step = xm * bl;
        let mut power = CMat::identity(step.nrows(), step.ncols());
        let mut sum = power.clone();
        for _ in 1..p.index() {
            power = &power * &step;
            sum += &power;
        }
        Ok(self.expect(&sum, m, d))
    }
}

impl MatrixModel {
    /// Exact Cauchy transform `(id ⊗ tr_k)((b ⊗ 1_k - X)^{-1})` at level `m`.
    pub fn cauchy(&self, b: &MatricialElement) -> Result<MatricialElement> {
        check_dim(self.base_dim(), b)?;
        let (m, d) = (b.level(), b.base_dim());
        let (xm, bl) = self.lift(b);
        let resolvent = crate::algebra::invert(&(bl - xm))?;
        Ok(self.expect(&resolvent, m, d))
    }
}
