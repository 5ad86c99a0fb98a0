use nalgebra::{DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{CMatrix, C64};

pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Ascending eigenvalues of the Hermitian part.
pub fn eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(hermitize(m)).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn is_psd(m: &CMatrix, tol: f64) -> bool {
    eigenvalues(m).first().is_none_or(|&l| l >= -tol)
}

/// `f` applied to the spectrum of the Hermitian part.
pub(crate) fn spectral_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let e = SymmetricEigen::new(hermitize(m));
    let d = DVector::from_iterator(e.eigenvalues.len(), e.eigenvalues.iter().map(|&l| C64::new(f(l), 0.0)));
    let u = &e.eigenvectors;
    hermitize(&(u * CMatrix::from_diagonal(&d) * u.adjoint()))
}

pub(crate) fn psd_part(m: &CMatrix) -> CMatrix {
    spectral_map(m, |l| l.max(0.0))
}

pub fn ket(entries: &[f64]) -> Vec<C64> {
    entries.iter().map(|&v| C64::new(v, 0.0)).collect()
}

/// `|k><k| / <k|k>`.
pub fn projector(k: &[C64]) -> CMatrix {
    let v = DVector::from_column_slice(k);
    let n = v.norm_squared();
    hermitize(&(&v * v.adjoint() / C64::new(n, 0.0)))
}

fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-random pure state.
pub fn random_state(rng: &mut impl Rng, dim: usize) -> CMatrix {
    let g = gaussian(rng, dim, 1);
    projector(g.as_slice())
}

/// Random full-rank POVM: Wishart elements `A_b` rescaled by `S^{-1/2}`
/// with `S = sum_b A_b`.
pub fn random_povm(rng: &mut impl Rng, dim: usize, n_b: usize) -> Vec<CMatrix> {
    let a: Vec<CMatrix> = (0..n_b)
        .map(|_| {
            let g = gaussian(rng, dim, dim);
            &g * g.adjoint()
        })
        .collect();
    normalize_povm(&a)
}

/// `S^{-1/2} A_b S^{-1/2}`, which sums to the identity when `S` is invertible.
pub(crate) fn normalize_povm(a: &[CMatrix]) -> Vec<CMatrix> {
    let s: CMatrix = a.iter().sum();
    let r = spectral_map(&s, |l| if l > 1e-14 { 1.0 / l.sqrt() } else { 0.0 });
    a.iter().map(|m| hermitize(&(&r * m * &r))).collect()
}
