//! Complex Hermitian matrices inside real conic programs. A Hermitian
//! `H = A + iB` is PSD iff the real block `[[A, -B], [B, A]]` is.

use nalgebra::DMatrix;

use super::{CMatrix, C64};
use crate::solver::{ConicProblem, LinearForm, PsdBlock};

/// Complex-valued affine form over the real program variables.
#[derive(Clone, Debug, Default)]
pub struct CForm {
    pub re: LinearForm,
    pub im: LinearForm,
}

impl CForm {
    pub fn constant(z: C64) -> Self {
        Self { re: LinearForm::constant(z.re), im: LinearForm::constant(z.im) }
    }

    pub fn plus(&self, o: &Self) -> Self {
        Self { re: self.re.plus(&o.re), im: self.im.plus(&o.im) }
    }

    pub fn minus(&self, o: &Self) -> Self {
        Self { re: self.re.minus(&o.re), im: self.im.minus(&o.im) }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { re: self.re.scaled(s), im: self.im.scaled(s) }
    }

    /// `z * self` for a complex constant `z`.
    pub fn times(&self, z: C64) -> Self {
        Self {
            re: self.re.scaled(z.re).minus(&self.im.scaled(z.im)),
            im: self.re.scaled(z.im).plus(&self.im.scaled(z.re)),
        }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: self.im.scaled(-1.0) }
    }
}

/// A `d x d` Hermitian matrix of fresh variables: `d` diagonal reals, then
/// real and imaginary parts of the strict upper triangle.
#[derive(Clone, Debug)]
pub struct HermVar {
    pub dim: usize,
    pub first: usize,
}

impl HermVar {
    pub fn new(p: &mut ConicProblem, name: &str, dim: usize) -> Self {
        let first = p.num_variables();
        for i in 0..dim {
            p.add_variable(format!("{name}[{i},{i}]"));
        }
        for part in ["re", "im"] {
            for i in 0..dim {
                for j in i + 1..dim {
                    p.add_variable(format!("{name}.{part}[{i},{j}]"));
                }
            }
        }
        Self { dim, first }
    }

    fn pair(&self, i: usize, j: usize) -> usize {
        // position of (i, j), i < j, in the strict upper triangle
        i * (2 * self.dim - i - 1) / 2 + (j - i - 1)
    }

    pub fn entry(&self, i: usize, j: usize) -> CForm {
        let d = self.dim;
        let np = d * (d - 1) / 2;
        if i == j {
            return CForm { re: LinearForm::var(self.first + i), im: LinearForm::default() };
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let k = self.pair(a, b);
        let f = CForm { re: LinearForm::var(self.first + d + k), im: LinearForm::var(self.first + d + np + k) };
        if i < j {
            f
        } else {
            f.conj()
        }
    }

    pub fn trace(&self) -> LinearForm {
        LinearForm::from_terms(0.0, (0..self.dim).map(|i| (self.first + i, 1.0)))
    }

    /// `Re Tr[self * k]` for a constant Hermitian `k`.
    pub fn inner(&self, k: &CMatrix) -> LinearForm {
        let mut terms = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let e = self.entry(i, j);
                let kz = k[(j, i)];
                for &(v, c) in &e.re.terms {
                    terms.push((v, c * kz.re));
                }
                for &(v, c) in &e.im.terms {
                    terms.push((v, -c * kz.im));
                }
            }
        }
        LinearForm::from_terms(0.0, terms)
    }

    /// Reads the matrix back from a solution vector.
    pub fn value(&self, x: &[f64]) -> CMatrix {
        DMatrix::from_fn(self.dim, self.dim, |i, j| {
            let e = self.entry(i, j);
            C64::new(e.re.eval(x), e.im.eval(x))
        })
    }
}

/// PSD constraint on the Hermitian matrix with entries `f(i, j)`.
pub fn hermitian_psd(name: &str, dim: usize, f: impl Fn(usize, usize) -> CForm) -> PsdBlock {
    PsdBlock::new(name, 2 * dim, |i, j| {
        let (bi, ri) = (i / dim, i % dim);
        let (bj, rj) = (j / dim, j % dim);
        let e = f(ri, rj);
        match (bi, bj) {
            (0, 0) | (1, 1) => e.re,
            (0, 1) => e.im.scaled(-1.0),
            _ => e.im,
        }
    })
}

/// The Hermitian `E` with `<Z, embed(H)> = Re Tr[E H]` for every Hermitian
/// `H`. `E` is a compression of `Z`, so it is PSD whenever `Z` is.
pub fn embedded_dual(z: &[Vec<f64>], dim: usize) -> CMatrix {
    DMatrix::from_fn(dim, dim, |i, j| {
        C64::new(z[i][j] + z[dim + i][dim + j], z[dim + i][j] - z[i][dim + j])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve_sdp, Sense, SolverOptions};

    #[test]
    fn largest_eigenvalue_of_complex_matrix() {
        // max Tr[rho K] over states is the top eigenvalue of K
        let k = DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(1.0, 0.0)]);
        let mut p = ConicProblem::new(Sense::Maximize);
        let rho = HermVar::new(&mut p, "rho", 2);
        p.add_equality(rho.trace().minus(&LinearForm::constant(1.0)));
        p.add_block(hermitian_psd("rho", 2, |i, j| rho.entry(i, j)));
        p.objective = rho.inner(&k);
        let r = solve_sdp(&p, &SolverOptions::default()).unwrap();
        assert!((r.primal - 2.0).abs() < 1e-7);
        let v = rho.value(&r.x);
        assert!((v[(0, 1)] - C64::new(0.0, -0.5)).norm() < 1e-6, "{v}");
    }
}
