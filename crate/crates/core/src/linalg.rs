//! Complex containers and the dense linear-algebra helpers used throughout.
//!
//! Vectors and matrices are plain `nalgebra` types over [`C64`]. Matrices are
//! column-major and, wherever a matrix holds several signals, each column is
//! one sample.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::rng::SeededRng;

pub type C64 = Complex<f64>;
pub type ComplexVector = DVector<C64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type RealVector = DVector<f64>;
pub type RealMatrix = DMatrix<f64>;

/// Largest singular value of a dense complex matrix.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Largest entry modulus of a real matrix (the entrywise sup-norm).
pub fn max_abs(m: &RealMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Frobenius norm of `a - b`.
pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Embeds a real vector into the complex numbers.
pub fn complexify(v: &RealVector) -> ComplexVector {
    v.map(|x| C64::new(x, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIterationOptions {
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for PowerIterationOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            tol: 1e-10,
            seed: 0,
        }
    }
}

/// Result of a power iteration on a Hermitian positive semidefinite operator.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: ComplexVector,
    pub iterations: usize,
}

/// Power method for the leading eigenpair of a Hermitian PSD operator given
/// only through its action. Stops once the eigen-residual `‖Av − μv‖` drops
/// below `tol · μ` or after `max_iters` products.
pub fn power_iteration(
    dim: usize,
    opts: PowerIterationOptions,
    apply: impl Fn(&ComplexVector) -> ComplexVector,
) -> Eigenpair {
    let mut rng = SeededRng::new(opts.seed);
    let mut v = rng.complex_gaussian_vector(dim);
    let n = v.norm();
    if n > 0.0 {
        v /= C64::new(n, 0.0);
    }
    let mut w = apply(&v);
    let mut value = v.dotc(&w).re;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        let residual = (&w - &v * C64::new(value, 0.0)).norm();
        if residual <= opts.tol * value.abs() {
            break;
        }
        let wn = w.norm();
        if wn == 0.0 {
            break;
        }
        v = &w / C64::new(wn, 0.0);
        w = apply(&v);
        value = v.dotc(&w).re;
        iterations += 1;
    }
    Eigenpair {
        value,
        vector: v,
        iterations,
    }
}

/// Operator 2-norm of a map given by `apply` and its adjoint, estimated with
/// the power method on `adjoint ∘ apply`.
pub fn power_norm(
    dim: usize,
    opts: PowerIterationOptions,
    apply: impl Fn(&ComplexVector) -> ComplexVector,
    adjoint: impl Fn(&ComplexVector) -> ComplexVector,
) -> f64 {
    power_iteration(dim, opts, |v| adjoint(&apply(v)))
        .value
        .max(0.0)
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![
            C64::new(2.0, 0.0),
            C64::new(0.0, -3.0),
        ]));
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn power_norm_matches_svd() {
        let mut rng = SeededRng::new(3);
        let m = rng.complex_gaussian_matrix(6, 4);
        let svd = spectral_norm(&m);
        let opts = PowerIterationOptions {
            max_iters: 5000,
            tol: 1e-15,
            seed: 1,
        };
        let est = power_norm(4, opts, |v| &m * v, |y| m.adjoint() * y);
        assert!((est - svd).abs() <= 1e-8 * svd, "{est} vs {svd}");
    }

    #[test]
    fn frobenius_is_root_sum_of_column_norms() {
        let mut rng = SeededRng::new(9);
        let m = rng.complex_gaussian_matrix(5, 3);
        let cols: f64 = m.column_iter().map(|c| c.norm_squared()).sum();
        assert!((m.norm() - cols.sqrt()).abs() < 1e-12);
        assert!((frobenius_distance(&m, &ComplexMatrix::zeros(5, 3)) - m.norm()).abs() < 1e-12);
    }
}
