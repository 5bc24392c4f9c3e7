//! Seeded random matrices for checks and diagnostics.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{op_norm, BElement, CMat, HalfPlanePoint, MatricialElement};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in the unit square `[-1, 1] + i[-1, 1]`.
pub fn random_matrix(rng: &mut impl Rng, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_real_matrix(rng: &mut impl Rng, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), 0.0)
    })
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMat {
    let a = random_matrix(rng, n);
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Random element of `M_d(C)` scaled to operator norm 1.
pub fn random_unit(rng: &mut impl Rng, d: usize) -> BElement {
    let a = random_matrix(rng, d);
    let n = op_norm(&a).max(f64::MIN_POSITIVE);
    BElement::new(a / Complex64::new(n, 0.0)).expect("finite")
}

pub fn random_element(rng: &mut impl Rng, d: usize) -> BElement {
    BElement::new(random_matrix(rng, d)).expect("finite")
}

/// Self-adjoint and invertible: eigenvalues pushed to `|λ| ≥ gap`.
pub fn random_invertible_sa(rng: &mut impl Rng, d: usize, gap: f64) -> BElement {
    let h = random_hermitian(rng, d);
    let eig = h.clone().symmetric_eigen();
    let vals: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l >= 0.0 { l + gap } else { l - gap })
        .collect();
    let v = &eig.eigenvectors;
    let diag = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        vals.iter().map(|&l| Complex64::new(l, 0.0)),
    ));
    let m = v * diag * v.adjoint();
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    BElement::new(m).expect("finite")
}

pub fn random_matricial(rng: &mut impl Rng, level: usize, d: usize) -> MatricialElement {
    MatricialElement::new(level, d, random_matrix(rng, level * d)).expect("finite")
}

/// `H + i(spread·1 + P P*)` with `H` hermitian and `P` random.
pub fn sample_halfplane_points(
    seed: u64,
    count: usize,
    d: usize,
    m: usize,
    spread: f64,
) -> Vec<HalfPlanePoint> {
    let mut r = rng(seed);
    let n = m * d;
    (0..count)
        .map(|_| {
            let h = random_hermitian(&mut r, n);
            let p = random_matrix(&mut r, n) * Complex64::new(0.5, 0.0);
            let pos = &p * p.adjoint() + CMat::identity(n, n) * Complex64::new(spread, 0.0);
            let v = h + pos * Complex64::new(0.0, 1.0);
            HalfPlanePoint::new(MatricialElement::new(m, d, v).expect("finite"))
                .expect("positive imaginary part")
        })
        .collect()
}
