//! The stacked focal-series measurement operator.
//!
//! Block `j` of `A ∈ C^{KN×N}` is `A_j z = F⁻¹(z ⊙ w_j)` where `F⁻¹` is the
//! *unitary* inverse DFT, `(F⁻¹x)_n = N^{-1/2} Σ_k x_k e^{+2πi kn/N}`. With this
//! normalisation `A_j* A_j = diag(|w_j|²)`, so `A*A = diag(s)` with
//! `s_n = Σ_j |w_j(n)|²` and `‖A‖_{2→2} = max_n √s_n`.

use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{dim_check, Error, Result};
use crate::linalg::{spectral_norm, ComplexMatrix, ComplexVector, C64};
use crate::rng::SeededRng;
use crate::unitary::UnitaryMatrix;

/// Name of the DFT normalisation, written into every file artifact.
pub const DFT_CONVENTION: &str = "unitary";

#[derive(Clone)]
pub struct MeasurementEnsemble {
    n: usize,
    weights: Vec<ComplexVector>,
    energy: Vec<f64>,
    norm: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for MeasurementEnsemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasurementEnsemble")
            .field("n", &self.n)
            .field("k", &self.weights.len())
            .field("norm", &self.norm)
            .field("dft", &DFT_CONVENTION)
            .finish()
    }
}

impl MeasurementEnsemble {
    pub fn new(weights: Vec<ComplexVector>) -> Result<Self> {
        let first = weights
            .first()
            .ok_or_else(|| Error::InvalidParameter("ensemble needs at least one weight vector".into()))?;
        let n = first.len();
        if n == 0 {
            return Err(Error::InvalidParameter("signal length N must be at least 1".into()));
        }
        for (j, w) in weights.iter().enumerate() {
            dim_check(w.len() == n, || {
                format!("weight {j} has length {}, expected {n}", w.len())
            })?;
            if w.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::InvalidParameter(format!("weight {j} has non-finite entries")));
            }
        }
        let energy: Vec<f64> = (0..n)
            .map(|i| weights.iter().map(|w| w[i].norm_sqr()).sum())
            .collect();
        let norm = energy.iter().fold(0.0_f64, |a, &b| a.max(b)).sqrt();
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            weights,
            energy,
            norm,
        })
    }

    /// All weights equal to one: each block is the unitary inverse DFT.
    pub fn unit(n: usize, k: usize) -> Result<Self> {
        Self::new(vec![ComplexVector::from_element(n, C64::new(1.0, 0.0)); k])
    }

    /// Phase-only defocus weights `w_j(n) = exp(−iπ · j · step · κ_n² / N)`,
    /// with `κ_n` the signed frequency index of bin `n`. Block 0 is in focus.
    pub fn defocus(n: usize, k: usize, step: f64) -> Result<Self> {
        let weights = (0..k)
            .map(|j| {
                ComplexVector::from_fn(n, |i, _| {
                    let kappa = signed_frequency(i, n) as f64;
                    let phase = -std::f64::consts::PI * j as f64 * step * kappa * kappa / n as f64;
                    C64::from_polar(1.0, phase)
                })
            })
            .collect();
        Self::new(weights)
    }

    /// Standard complex Gaussian weights.
    pub fn random(rng: &mut SeededRng, n: usize, k: usize) -> Result<Self> {
        Self::new((0..k).map(|_| rng.complex_gaussian_vector(n)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    /// Number of measurement rows, `K·N`.
    pub fn rows(&self) -> usize {
        self.n * self.weights.len()
    }

    pub fn weights(&self) -> &[ComplexVector] {
        &self.weights
    }

    /// Diagonal of `A*A`.
    pub fn energy(&self) -> &[f64] {
        &self.energy
    }

    /// `‖A‖_{2→2}` from the closed form.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Largest step admissible for every unrolled stage, `KN / ‖A‖²`.
    pub fn max_step(&self) -> f64 {
        self.rows() as f64 / (self.norm * self.norm)
    }

    pub fn apply(&self, psi: &ComplexVector) -> Result<ComplexVector> {
        dim_check(psi.len() == self.n, || {
            format!("apply: signal has length {}, expected {}", psi.len(), self.n)
        })?;
        let scale = 1.0 / (self.n as f64).sqrt();
        let mut out = ComplexVector::zeros(self.rows());
        let mut buf = vec![C64::new(0.0, 0.0); self.n];
        for (j, w) in self.weights.iter().enumerate() {
            for i in 0..self.n {
                buf[i] = psi[i] * w[i];
            }
            self.inverse.process(&mut buf);
            for i in 0..self.n {
                out[j * self.n + i] = buf[i] * scale;
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self, y: &ComplexVector) -> Result<ComplexVector> {
        dim_check(y.len() == self.rows(), || {
            format!("adjoint: measurement has length {}, expected {}", y.len(), self.rows())
        })?;
        let scale = 1.0 / (self.n as f64).sqrt();
        let mut out = ComplexVector::zeros(self.n);
        let mut buf = vec![C64::new(0.0, 0.0); self.n];
        for (j, w) in self.weights.iter().enumerate() {
            buf.copy_from_slice(&y.as_slice()[j * self.n..(j + 1) * self.n]);
            self.forward.process(&mut buf);
            for i in 0..self.n {
                out[i] += w[i].conj() * buf[i] * scale;
            }
        }
        Ok(out)
    }

    /// Materialises `A` as a dense `KN × N` matrix. Intended for tests and
    /// small instances only.
    pub fn to_dense(&self) -> ComplexMatrix {
        let mut a = ComplexMatrix::zeros(self.rows(), self.n);
        for c in 0..self.n {
            let mut e = ComplexVector::zeros(self.n);
            e[c] = C64::new(1.0, 0.0);
            let col = self.apply(&e).expect("unit vector has the right length");
            a.set_column(c, &col);
        }
        a
    }

    /// `‖AΦ₁ − AΦ₂‖_{2→2}`, computed as `‖diag(√s)(Φ₁ − Φ₂)‖_{2→2}`.
    pub fn dictionary_distance(&self, phi1: &UnitaryMatrix, phi2: &UnitaryMatrix) -> Result<f64> {
        dim_check(phi1.size() == self.n && phi2.size() == self.n, || {
            format!(
                "dictionary sizes {} and {} do not match N = {}",
                phi1.size(),
                phi2.size(),
                self.n
            )
        })?;
        let mut d = phi1.matrix() - phi2.matrix();
        for (i, s) in self.energy.iter().enumerate() {
            let mut row = d.row_mut(i);
            row *= C64::new(s.sqrt(), 0.0);
        }
        Ok(spectral_norm(&d))
    }

    /// The composed operator `AΦ`.
    pub fn with_dictionary<'a>(&'a self, phi: &'a UnitaryMatrix) -> Result<DictionaryOperator<'a>> {
        dim_check(phi.size() == self.n, || {
            format!("dictionary is {}x{}, expected N = {}", phi.size(), phi.size(), self.n)
        })?;
        Ok(DictionaryOperator { ensemble: self, phi })
    }
}

/// `AΦ` and its adjoint `Φ*A*`.
#[derive(Debug, Clone, Copy)]
pub struct DictionaryOperator<'a> {
    ensemble: &'a MeasurementEnsemble,
    phi: &'a UnitaryMatrix,
}

impl<'a> DictionaryOperator<'a> {
    pub fn ensemble(&self) -> &'a MeasurementEnsemble {
        self.ensemble
    }

    pub fn dictionary(&self) -> &'a UnitaryMatrix {
        self.phi
    }

    pub fn apply(&self, z: &ComplexVector) -> Result<ComplexVector> {
        dim_check(z.len() == self.ensemble.n, || {
            format!("code has length {}, expected {}", z.len(), self.ensemble.n)
        })?;
        self.ensemble.apply(&(self.phi.matrix() * z))
    }

    pub fn adjoint(&self, y: &ComplexVector) -> Result<ComplexVector> {
        Ok(self.phi.matrix().adjoint() * self.ensemble.adjoint(y)?)
    }
}

fn signed_frequency(i: usize, n: usize) -> i64 {
    let i = i as i64;
    let n = n as i64;
    if 2 * i < n {
        i
    } else {
        i - n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn unit_weights_give_norm_one() {
        let e = MeasurementEnsemble::unit(2, 1).unwrap();
        assert!((e.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weights_two_one_give_norm_two() {
        // SVD oracle on the explicit 2x2 matrix F⁻¹ diag(2, 1)
        let e = MeasurementEnsemble::new(vec![ComplexVector::from_vec(vec![c(2.0, 0.0), c(1.0, 0.0)])]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let finv = ComplexMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]);
        let dense = finv * ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![c(2.0, 0.0), c(1.0, 0.0)]));
        assert!((spectral_norm(&dense) - 2.0).abs() < 1e-12);
        assert!((e.norm() - 2.0).abs() < 1e-15);
        assert!((e.to_dense() - dense).norm() < 1e-14);
    }

    #[test]
    fn empty_or_ragged_weights_rejected() {
        assert!(MeasurementEnsemble::new(vec![]).is_err());
        let r = MeasurementEnsemble::new(vec![
            ComplexVector::from_element(3, c(1.0, 0.0)),
            ComplexVector::from_element(2, c(1.0, 0.0)),
        ]);
        assert!(matches!(r, Err(Error::Dimension(_))));
        assert!(MeasurementEnsemble::new(vec![ComplexVector::zeros(0)]).is_err());
    }

    #[test]
    fn constant_weights_norm() {
        let w = c(0.6, -0.8) * 1.5;
        let e = MeasurementEnsemble::new(vec![ComplexVector::from_element(5, w); 3]).unwrap();
        assert!((e.norm() - 3.0_f64.sqrt() * 1.5).abs() < 1e-14);
    }

    #[test]
    fn zero_maps_to_zero_and_unit_weights_are_unitary() {
        let e = MeasurementEnsemble::unit(7, 1).unwrap();
        assert_eq!(e.apply(&ComplexVector::zeros(7)).unwrap().norm(), 0.0);
        let mut rng = SeededRng::new(2);
        let psi = rng.complex_gaussian_vector(7);
        let back = e.adjoint(&e.apply(&psi).unwrap()).unwrap();
        assert!((back - &psi).norm() < 1e-13 * psi.norm());
    }

    #[test]
    fn adjoint_pairing() {
        let mut rng = SeededRng::new(8);
        for n in 1..9 {
            for k in 1..4 {
                let e = MeasurementEnsemble::random(&mut rng, n, k).unwrap();
                let psi = rng.complex_gaussian_vector(n);
                let y = rng.complex_gaussian_vector(k * n);
                let lhs = e.apply(&psi).unwrap().dotc(&y);
                let rhs = psi.dotc(&e.adjoint(&y).unwrap());
                assert!((lhs - rhs).norm() <= 1e-10 * psi.norm() * y.norm());
            }
        }
    }

    #[test]
    fn dimension_errors() {
        let e = MeasurementEnsemble::unit(4, 2).unwrap();
        assert!(e.apply(&ComplexVector::zeros(3)).is_err());
        assert!(e.adjoint(&ComplexVector::zeros(4)).is_err());
        assert!(e.with_dictionary(&UnitaryMatrix::identity(3)).is_err());
    }

    #[test]
    fn dictionary_distance_matches_dense() {
        let mut rng = SeededRng::new(4);
        let e = MeasurementEnsemble::random(&mut rng, 5, 2).unwrap();
        let p1 = UnitaryMatrix::random(&mut rng, 5).unwrap();
        let p2 = UnitaryMatrix::random(&mut rng, 5).unwrap();
        let a = e.to_dense();
        let dense = spectral_norm(&(&a * p1.matrix() - &a * p2.matrix()));
        let fast = e.dictionary_distance(&p1, &p2).unwrap();
        assert!((dense - fast).abs() <= 1e-10 * dense);
    }

    #[test]
    fn defocus_weights_are_phase_only() {
        let e = MeasurementEnsemble::defocus(16, 3, 1.0).unwrap();
        assert!((e.norm() - 3.0_f64.sqrt()).abs() < 1e-12);
        assert!((e.max_step() - 16.0).abs() < 1e-10);
    }
}
