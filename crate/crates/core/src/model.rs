//! Forward model, measurement transform, data term and its gradient.

use crate::ensemble::{DictionaryOperator, MeasurementEnsemble};
use crate::error::{dim_check, Error, Result};
use crate::linalg::{ComplexVector, RealVector};
use crate::nonlin::{Nonlinearity, PseudoHuber};
use crate::rng::SeededRng;

/// Raw intensities together with their transformed counterpart.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub g_tilde: RealVector,
    pub g: RealVector,
    pub delta: f64,
}

impl Observation {
    pub fn from_intensities(g_tilde: RealVector, delta: f64) -> Result<Self> {
        let g = transform_gamma(&g_tilde, delta)?;
        Ok(Self { g_tilde, g, delta })
    }

    /// Noiseless observation of `psi`.
    pub fn of_signal(e: &MeasurementEnsemble, psi: &ComplexVector, delta: f64) -> Result<Self> {
        Self::from_intensities(synthesize(e, psi)?, delta)
    }
}

/// `g̃ = |Aψ|²` entrywise.
pub fn synthesize(e: &MeasurementEnsemble, psi: &ComplexVector) -> Result<RealVector> {
    Ok(e.apply(psi)?.map(|v| v.norm_sqr()))
}

/// `γ(x) = √(x + δ²) − δ` entrywise.
pub fn transform_gamma(g_tilde: &RealVector, delta: f64) -> Result<RealVector> {
    let h = PseudoHuber::new(delta)?;
    if let Some(x) = g_tilde.iter().find(|x| !(**x >= 0.0)) {
        return Err(Error::InvalidParameter(format!("intensities must be nonnegative, found {x}")));
    }
    Ok(g_tilde.map(|x| h.transform(x)))
}

/// Adds i.i.d. Gaussian noise of standard deviation `sigma` to raw
/// intensities and clips the result at zero.
pub fn add_intensity_noise(rng: &mut SeededRng, g_tilde: &RealVector, sigma: f64) -> RealVector {
    g_tilde.map(|x| (x + sigma * rng.normal()).max(0.0))
}

/// `D(ψ) = ‖φ(Aψ) − g‖² / (2KN)`.
pub fn data_term(
    e: &MeasurementEnsemble,
    psi: &ComplexVector,
    g: &RealVector,
    nonlin: &Nonlinearity,
) -> Result<f64> {
    dim_check(g.len() == e.rows(), || {
        format!("measurement has length {}, expected {}", g.len(), e.rows())
    })?;
    let u = e.apply(psi)?;
    let sum: f64 = u
        .iter()
        .zip(g.iter())
        .map(|(ui, gi)| (nonlin.value(*ui) - *gi).norm_sqr())
        .sum();
    Ok(sum / (2.0 * e.rows() as f64))
}

/// Data term in code space, `D(Φz)`.
pub fn data_term_code(
    op: &DictionaryOperator<'_>,
    z: &ComplexVector,
    g: &RealVector,
    nonlin: &Nonlinearity,
) -> Result<f64> {
    data_term(op.ensemble(), &(op.dictionary().matrix() * z), g, nonlin)
}

/// Factor relating [`data_gradient`] to the real gradient of `D` on
/// `R^{2N}`, confirmed by central differences.
pub const GRADIENT_CONSTANT: f64 = 1.0;

/// `∇D(z) = (AΦ)*[(φ(AΦz) − g) ⊙ φ'(AΦz)] / KN`.
///
/// With respect to `(Re z, Im z)` this is exactly the real gradient of
/// `z ↦ D(Φz)`, packed as a complex vector.
pub fn data_gradient(
    op: &DictionaryOperator<'_>,
    z: &ComplexVector,
    g: &RealVector,
    nonlin: &Nonlinearity,
) -> Result<ComplexVector> {
    let e = op.ensemble();
    dim_check(g.len() == e.rows(), || {
        format!("measurement has length {}, expected {}", g.len(), e.rows())
    })?;
    let u = op.apply(z)?;
    let r = ComplexVector::from_fn(u.len(), |i, _| nonlin.weighted_residual(u[i], g[i]));
    let grad = op.adjoint(&r)?;
    Ok(grad.unscale(e.rows() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::unitary::UnitaryMatrix;

    #[test]
    fn synthesize_zero_and_parseval() {
        let e = MeasurementEnsemble::unit(5, 1).unwrap();
        let z = synthesize(&e, &ComplexVector::zeros(5)).unwrap();
        assert!(z.iter().all(|v| *v == 0.0));
        let mut rng = SeededRng::new(3);
        let psi = rng.complex_gaussian_vector(5);
        let g = synthesize(&e, &psi).unwrap();
        assert!((g.sum() - psi.norm_squared()).abs() < 1e-13);
    }

    #[test]
    fn synthesize_two_point() {
        let e = MeasurementEnsemble::unit(2, 1).unwrap();
        let psi = ComplexVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let g = synthesize(&e, &psi).unwrap();
        assert!((g[0] - 0.5).abs() < 1e-15 && (g[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gamma_values() {
        let d = 0.7;
        let g = transform_gamma(&RealVector::from_vec(vec![0.0, 3.0 * d * d]), d).unwrap();
        assert_eq!(g[0], 0.0);
        assert!((g[1] - d).abs() < 1e-15);
        assert!(transform_gamma(&RealVector::from_vec(vec![-1.0]), d).is_err());
        let mut rng = SeededRng::new(1);
        let mut xs: Vec<f64> = (0..200).map(|_| rng.uniform(0.0, 10.0)).collect();
        xs.sort_by(f64::total_cmp);
        let g = transform_gamma(&RealVector::from_vec(xs), 0.1).unwrap();
        assert!(g.as_slice().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn data_term_consistent_and_oracle() {
        let mut rng = SeededRng::new(21);
        let e = MeasurementEnsemble::random(&mut rng, 6, 2).unwrap();
        let nl = Nonlinearity::pseudo_huber(0.5).unwrap();
        let psi = rng.complex_gaussian_vector(6);
        let obs = Observation::of_signal(&e, &psi, 0.5).unwrap();
        assert!(data_term(&e, &psi, &obs.g, &nl).unwrap() <= 1e-24);
        assert_eq!(
            data_term(&e, &ComplexVector::zeros(6), &RealVector::zeros(12), &nl).unwrap(),
            0.0
        );

        // naive scalar loop over an explicit matrix
        let other = rng.complex_gaussian_vector(6);
        let a = e.to_dense();
        let mut acc = 0.0;
        for r in 0..12 {
            let mut u = C64::new(0.0, 0.0);
            for c in 0..6 {
                u += a[(r, c)] * other[c];
            }
            let phi = (u.norm_sqr() + 0.25).sqrt() - 0.5;
            acc += (phi - obs.g[r]).powi(2);
        }
        let oracle = acc / 24.0;
        let got = data_term(&e, &other, &obs.g, &nl).unwrap();
        assert!((got - oracle).abs() <= 1e-12 * oracle);
    }

    #[test]
    fn gradient_zero_at_consistent_solution() {
        let mut rng = SeededRng::new(5);
        let e = MeasurementEnsemble::random(&mut rng, 4, 3).unwrap();
        let phi = UnitaryMatrix::random(&mut rng, 4).unwrap();
        let op = e.with_dictionary(&phi).unwrap();
        let z = rng.complex_gaussian_vector(4);
        let obs = Observation::of_signal(&e, &(phi.matrix() * &z), 0.1).unwrap();
        let nl = Nonlinearity::pseudo_huber(0.1).unwrap();
        let grad = data_gradient(&op, &z, &obs.g, &nl).unwrap();
        assert!(grad.norm() < 1e-13);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = SeededRng::new(8);
        let e = MeasurementEnsemble::random(&mut rng, 5, 2).unwrap();
        let phi = UnitaryMatrix::random(&mut rng, 5).unwrap();
        let op = e.with_dictionary(&phi).unwrap();
        let g = RealVector::from_fn(10, |_, _| rng.uniform(0.0, 1.0));
        for nl in [Nonlinearity::pseudo_huber(0.3).unwrap(), Nonlinearity::Linear] {
            let z = rng.complex_gaussian_vector(5);
            let grad = data_gradient(&op, &z, &g, &nl).unwrap();
            let h = 1e-6;
            for i in 0..5 {
                for dir in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                    let mut zp = z.clone();
                    let mut zm = z.clone();
                    zp[i] += dir * h;
                    zm[i] -= dir * h;
                    let fd = (data_term_code(&op, &zp, &g, &nl).unwrap()
                        - data_term_code(&op, &zm, &g, &nl).unwrap())
                        / (2.0 * h);
                    let analytic = (grad[i].conj() * dir).re;
                    assert!((fd - analytic).abs() < 1e-7, "{fd} vs {analytic}");
                }
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        let e = MeasurementEnsemble::unit(3, 2).unwrap();
        let nl = Nonlinearity::Linear;
        assert!(data_term(&e, &ComplexVector::zeros(3), &RealVector::zeros(3), &nl).is_err());
    }

    #[test]
    fn noise_is_clipped() {
        let mut rng = SeededRng::new(0);
        let noisy = add_intensity_noise(&mut rng, &RealVector::zeros(100), 1.0);
        assert!(noisy.iter().all(|v| *v >= 0.0));
    }
}
