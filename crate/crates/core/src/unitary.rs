//! Elements of the unitary group U(N): dictionaries Φ and output maps Ψ.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::rng::SeededRng;

/// A square complex matrix with `U* U = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    /// Wraps `m` after checking `‖U*U − I‖_F ≤ 1e-10 · N`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "unitary matrix must be square and nonempty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let u = Self(m);
        let n = u.size() as f64;
        let defect = u.unitarity_defect();
        if defect > 1e-10 * n {
            return Err(Error::InvalidParameter(format!(
                "matrix is not unitary: ‖U*U − I‖_F = {defect:e}"
            )));
        }
        Ok(u)
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n, n))
    }

    /// The real 2×2 rotation by `theta` radians, seen as an element of U(2).
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self(ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(c, 0.0),
                C64::new(-s, 0.0),
                C64::new(s, 0.0),
                C64::new(c, 0.0),
            ],
        ))
    }

    /// General element of U(2): `e^{iα} [[a, −b̄], [b, ā]]` with
    /// `a = cos χ · e^{iβ}`, `b = sin χ · e^{iη}`.
    pub fn u2(alpha: f64, chi: f64, beta: f64, eta: f64) -> Self {
        let g = C64::from_polar(1.0, alpha);
        let a = C64::from_polar(chi.cos(), beta);
        let b = C64::from_polar(chi.sin(), eta);
        Self(ComplexMatrix::from_row_slice(
            2,
            2,
            &[g * a, -g * b.conj(), g * b, g * a.conj()],
        ))
    }

    /// Haar-distributed unitary matrix: QR factorisation of a complex
    /// Gaussian matrix (entries drawn column-major), with the columns of Q
    /// rephased so that the diagonal of R is positive real.
    pub fn random(rng: &mut SeededRng, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("random_unitary requires N ≥ 1".into()));
        }
        let g = rng.complex_gaussian_matrix(n, n);
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for k in 0..n {
            let d = r[(k, k)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
            let mut col = q.column_mut(k);
            col *= phase;
        }
        Ok(Self(q))
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    /// `‖U*U − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.size();
        (self.0.adjoint() * &self.0 - ComplexMatrix::identity(n, n)).norm()
    }
}

impl Deref for UnitaryMatrix {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexVector;

    #[test]
    fn rotation_special_angles() {
        let r0 = UnitaryMatrix::rotation(0.0);
        assert!((r0.matrix() - ComplexMatrix::identity(2, 2)).norm() == 0.0);
        let r = UnitaryMatrix::rotation(std::f64::consts::FRAC_PI_2);
        let expect = ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(-1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        assert!((r.matrix() - expect).norm() < 1e-15);
    }

    #[test]
    fn random_unitary_seed_7() {
        let mut rng = SeededRng::new(7);
        let u = UnitaryMatrix::random(&mut rng, 4).unwrap();
        assert!(u.unitarity_defect() <= 1e-12);
    }

    #[test]
    fn random_unitary_preserves_norms() {
        let mut rng = SeededRng::new(11);
        for n in 1..9 {
            let u = UnitaryMatrix::random(&mut rng, n).unwrap();
            let x: ComplexVector = rng.complex_gaussian_vector(n);
            let rel = ((u.matrix() * &x).norm() - x.norm()).abs() / x.norm();
            assert!(rel < 1e-10);
        }
    }

    #[test]
    fn u2_is_unitary() {
        let u = UnitaryMatrix::u2(0.3, 1.1, -0.7, 2.5);
        assert!(u.unitarity_defect() < 1e-14);
    }

    #[test]
    fn rejects_non_unitary() {
        let m = ComplexMatrix::identity(3, 3) * C64::new(2.0, 0.0);
        assert!(UnitaryMatrix::new(m).is_err());
        assert!(UnitaryMatrix::new(ComplexMatrix::zeros(2, 3)).is_err());
    }
}
