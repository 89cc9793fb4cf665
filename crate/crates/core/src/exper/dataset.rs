//! Synthetic data under the sparse generative model `ψ_j = Φ₀ z_j`,
//! `g_j = γ(|Aψ_j|²)`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ensemble::{MeasurementEnsemble, DFT_CONVENTION};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, RealMatrix, C64};
use crate::matio;
use crate::model::{synthesize, transform_gamma};
use crate::rng::SeededRng;
use crate::unitary::UnitaryMatrix;

/// Which weighting functions define the measurement ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightsKind {
    /// Phase-only quadratic defocus, see [`MeasurementEnsemble::defocus`].
    Defocus { step: f64 },
    Unit,
    /// Complex Gaussian weights drawn from the dataset generator.
    Random,
}

impl Default for WeightsKind {
    fn default() -> Self {
        Self::Defocus { step: 0.75 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetParams {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub s: usize,
    pub delta: f64,
    pub c_in: f64,
    pub weights: WeightsKind,
}

impl Default for DatasetParams {
    fn default() -> Self {
        Self {
            n: 16,
            k: 3,
            m: 8,
            s: 2,
            delta: 0.1,
            c_in: 1.0,
            weights: WeightsKind::default(),
        }
    }
}

impl DatasetParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k == 0 || self.m == 0 {
            return Err(Error::InvalidParameter("N, K and m must be at least 1".into()));
        }
        if self.s == 0 || self.s > self.n {
            return Err(Error::InvalidParameter(format!(
                "sparsity must lie in 1..={}, got {}",
                self.n, self.s
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.c_in > 0.0 && self.c_in.is_finite()) {
            return Err(Error::InvalidParameter(format!("C_in must be positive, got {}", self.c_in)));
        }
        Ok(())
    }
}

/// Contents of the `meta` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetMeta {
    pub seed: u64,
    pub dft: String,
    pub params: DatasetParams,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub params: DatasetParams,
    pub seed: u64,
    pub ensemble: MeasurementEnsemble,
    pub phi0: UnitaryMatrix,
    /// Sparse codes, one column per sample.
    pub z: ComplexMatrix,
    /// `Φ₀ Z`.
    pub psi: ComplexMatrix,
    /// Transformed measurements, `KN × m`.
    pub g: RealMatrix,
}

/// Draws a dataset. Each code has exactly `s` nonzero complex Gaussian
/// entries on a uniformly chosen support and is scaled so `‖Φ₀ z_j‖ = C_in`.
pub fn generate_dataset(rng: &mut SeededRng, params: &DatasetParams) -> Result<Dataset> {
    params.validate()?;
    let DatasetParams { n, k, m, s, delta, c_in, .. } = *params;
    let seed = rng.seed();
    let ensemble = match params.weights {
        WeightsKind::Defocus { step } => MeasurementEnsemble::defocus(n, k, step)?,
        WeightsKind::Unit => MeasurementEnsemble::unit(n, k)?,
        WeightsKind::Random => MeasurementEnsemble::random(rng, n, k)?,
    };
    let phi0 = UnitaryMatrix::random(rng, n)?;
    let mut z = ComplexMatrix::zeros(n, m);
    for j in 0..m {
        let support = rng.subset(n, s);
        let mut col = ComplexVector::zeros(n);
        for i in support {
            // a zero draw would shrink the support
            let mut v = rng.complex_gaussian();
            while v.norm() == 0.0 {
                v = rng.complex_gaussian();
            }
            col[i] = v;
        }
        // Φ₀ is unitary, so ‖Φ₀ z‖ = ‖z‖
        let scale = c_in / col.norm();
        z.set_column(j, &(col * C64::new(scale, 0.0)));
    }
    let psi = phi0.matrix() * &z;
    let mut g = RealMatrix::zeros(ensemble.rows(), m);
    for j in 0..m {
        let intens = synthesize(&ensemble, &psi.column(j).into_owned())?;
        g.set_column(j, &transform_gamma(&intens, delta)?);
    }
    Ok(Dataset {
        params: params.clone(),
        seed,
        ensemble,
        phi0,
        z,
        psi,
        g,
    })
}

pub const META_FILE: &str = "meta";
pub const PHI0_FILE: &str = "phi0";
pub const CODES_FILE: &str = "Z";
pub const PSI_FILE: &str = "psi";
pub const MEASUREMENTS_FILE: &str = "G";
pub const WEIGHTS_FILE: &str = "weights";

impl Dataset {
    pub fn meta(&self) -> DatasetMeta {
        DatasetMeta {
            seed: self.seed,
            dft: DFT_CONVENTION.to_string(),
            params: self.params.clone(),
        }
    }

    /// `N × K` matrix whose column `j` holds the weights of block `j`.
    pub fn weights_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(self.ensemble.weights())
    }

    /// Writes the dataset directory, creating it if needed.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let meta = toml::to_string(&self.meta()).map_err(|e| Error::Format(e.to_string()))?;
        fs::write(dir.join(META_FILE), meta)?;
        matio::write_complex_matrix(dir.join(PHI0_FILE), self.phi0.matrix())?;
        matio::write_complex_matrix(dir.join(CODES_FILE), &self.z)?;
        matio::write_complex_matrix(dir.join(PSI_FILE), &self.psi)?;
        matio::write_real_matrix(dir.join(MEASUREMENTS_FILE), &self.g)?;
        matio::write_complex_matrix(dir.join(WEIGHTS_FILE), &self.weights_matrix())?;
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let text = fs::read_to_string(dir.join(META_FILE))?;
        let meta: DatasetMeta =
            toml::from_str(&text).map_err(|e| Error::Format(format!("dataset meta: {e}")))?;
        meta.params.validate()?;
        if meta.dft != DFT_CONVENTION {
            return Err(Error::Format(format!("unsupported DFT convention {:?}", meta.dft)));
        }
        let p = &meta.params;
        let weights = matio::read_complex_matrix(dir.join(WEIGHTS_FILE))?;
        let phi0 = UnitaryMatrix::new(matio::read_complex_matrix(dir.join(PHI0_FILE))?)?;
        let z = matio::read_complex_matrix(dir.join(CODES_FILE))?;
        let psi = matio::read_complex_matrix(dir.join(PSI_FILE))?;
        let g = matio::read_real_matrix(dir.join(MEASUREMENTS_FILE))?;
        let expect = |what: &str, got: (usize, usize), want: (usize, usize)| {
            if got == want {
                Ok(())
            } else {
                Err(Error::Format(format!("{what} is {got:?}, meta implies {want:?}")))
            }
        };
        expect("weights", weights.shape(), (p.n, p.k))?;
        expect("phi0", phi0.matrix().shape(), (p.n, p.n))?;
        expect("Z", z.shape(), (p.n, p.m))?;
        expect("psi", psi.shape(), (p.n, p.m))?;
        expect("G", g.shape(), (p.k * p.n, p.m))?;
        let ensemble = MeasurementEnsemble::new(weights.column_iter().map(|c| c.into_owned()).collect())?;
        Ok(Self {
            params: meta.params,
            seed: meta.seed,
            ensemble,
            phi0,
            z,
            psi,
            g,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::data_term;
    use crate::nonlin::Nonlinearity;

    fn params() -> DatasetParams {
        DatasetParams {
            n: 8,
            k: 2,
            m: 6,
            s: 3,
            delta: 0.1,
            c_in: 2.0,
            weights: WeightsKind::default(),
        }
    }

    #[test]
    fn construction_invariants() {
        let ds = generate_dataset(&mut SeededRng::new(4), &params()).unwrap();
        let nl = Nonlinearity::pseudo_huber(0.1).unwrap();
        for j in 0..6 {
            let nnz = ds.z.column(j).iter().filter(|v| v.norm() > 0.0).count();
            assert_eq!(nnz, 3);
            assert!(ds.psi.column(j).norm() <= 2.0 + 1e-12);
            let d = data_term(
                &ds.ensemble,
                &ds.psi.column(j).into_owned(),
                &ds.g.column(j).into_owned(),
                &nl,
            )
            .unwrap();
            assert!(d <= 1e-20, "{d}");
        }
    }

    #[test]
    fn rejects_bad_sparsity() {
        let mut p = params();
        p.s = 9;
        assert!(generate_dataset(&mut SeededRng::new(0), &p).is_err());
        p.s = 0;
        assert!(generate_dataset(&mut SeededRng::new(0), &p).is_err());
    }

    #[test]
    fn save_load_round_trip_and_determinism() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let mut p = params();
        p.weights = WeightsKind::Random;
        generate_dataset(&mut SeededRng::new(9), &p).unwrap().save(a.path()).unwrap();
        generate_dataset(&mut SeededRng::new(9), &p).unwrap().save(b.path()).unwrap();
        for f in [META_FILE, PHI0_FILE, CODES_FILE, PSI_FILE, MEASUREMENTS_FILE, WEIGHTS_FILE] {
            assert_eq!(
                fs::read(a.path().join(f)).unwrap(),
                fs::read(b.path().join(f)).unwrap(),
                "{f}"
            );
        }
        let back = Dataset::load(a.path()).unwrap();
        let orig = generate_dataset(&mut SeededRng::new(9), &p).unwrap();
        assert_eq!(back.g, orig.g);
        assert_eq!(back.z, orig.z);
        assert_eq!(back.ensemble.weights(), orig.ensemble.weights());
        assert_eq!(back.params, p);
    }
}
