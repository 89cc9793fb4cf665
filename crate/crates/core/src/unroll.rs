//! The unrolled proximal-gradient network.
//!
//! Stage `ℓ` maps a code `z` to
//!
//! ```text
//! prox_{τ_ℓ R}( z − τ_ℓ/KN · (AΦ)* [(φ(AΦz) − g) ⊙ φ'(AΦz)] )
//! ```
//!
//! which equals `prox_{τ_ℓ R}(z − τ_ℓ (T_Φ(z) − S^g_Φ(z)))` with
//! `T_Φ(z) = (AΦ)* prox_{f_δ*}(AΦz) / KN` and
//! `S^g_Φ(z) = (AΦ)* [(g/δ) ⊙ prox_{f_δ}(AΦz)] / KN`. Both forms are
//! implemented independently; [`stage`] uses the first, [`stage_prox_form`]
//! the second.
//!
//! Matrices of measurements are processed column by column with no
//! cross-column coupling, so a matrix run equals the per-column runs exactly.

use crate::ensemble::{DictionaryOperator, MeasurementEnsemble};
use crate::error::{dim_check, Error, Result};
use crate::linalg::{
    complexify, power_iteration, ComplexMatrix, ComplexVector, PowerIterationOptions, RealMatrix,
    RealVector, C64,
};
use crate::model::{data_gradient, data_term_code};
use crate::nonlin::Nonlinearity;
use crate::prox::{ClipRadius, Regularizer};
use crate::unitary::UnitaryMatrix;

/// How the first code `f⁰` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    /// `ψ⁰ = e₁`, shared by every column and every dictionary.
    #[default]
    FixedUnitVector,
    /// Leading eigenvector of the intensity-weighted covariance of the rows
    /// of `A`, as in Wirtinger flow.
    Spectral,
}

impl InitMode {
    pub fn label(&self) -> &'static str {
        match self {
            Self::FixedUnitVector => "fixed",
            Self::Spectral => "spectral",
        }
    }
}

/// What to do when a step size violates `τ‖A‖²/KN ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssumptionPolicy {
    /// Refuse to run.
    #[default]
    Strict,
    /// Run anyway and report the violation.
    Warn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnrollConfig {
    /// One step size per stage; the depth is `taus.len()`.
    pub taus: Vec<f64>,
    pub reg: Regularizer,
    pub nonlin: Nonlinearity,
    pub init: InitMode,
    pub clip: ClipRadius,
    pub policy: AssumptionPolicy,
    pub power: PowerIterationOptions,
}

/// Default fraction of the admissible step used by every stage.
pub const DEFAULT_STEP_SCALE: f64 = 0.9;

impl UnrollConfig {
    /// Constant schedule `τ_ℓ = step_scale · KN/‖A‖²` for `depth` stages,
    /// no regularizer, fixed initialization, unit clipping radii.
    pub fn constant(e: &MeasurementEnsemble, depth: usize, step_scale: f64, nonlin: Nonlinearity) -> Self {
        Self {
            taus: vec![step_scale * e.max_step(); depth],
            reg: Regularizer::None,
            nonlin,
            init: InitMode::FixedUnitVector,
            clip: ClipRadius::uniform(1.0).expect("unit radius is valid"),
            policy: AssumptionPolicy::Strict,
            power: PowerIterationOptions::default(),
        }
    }

    pub fn depth(&self) -> usize {
        self.taus.len()
    }

    /// Stages whose step exceeds `KN/‖A‖²`.
    pub fn violations(&self, e: &MeasurementEnsemble) -> Vec<usize> {
        let max_step = e.max_step();
        self.taus
            .iter()
            .enumerate()
            .filter(|(_, t)| !(**t <= max_step))
            .map(|(i, _)| i)
            .collect()
    }

    /// Validates the step sizes. Returns whether every stage satisfies the
    /// step condition; under [`AssumptionPolicy::Strict`] a violation is an
    /// error instead.
    pub fn validate(&self, e: &MeasurementEnsemble) -> Result<bool> {
        if let Some(t) = self.taus.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidParameter(format!("step sizes must be positive, got {t}")));
        }
        let bad = self.violations(e);
        match (bad.first(), self.policy) {
            (None, _) => Ok(true),
            (Some(&stage), AssumptionPolicy::Strict) => Err(Error::StepTooLarge {
                stage,
                tau: self.taus[stage],
                max_step: e.max_step(),
            }),
            (Some(_), AssumptionPolicy::Warn) => Ok(false),
        }
    }
}

fn check_measurement(op: &DictionaryOperator<'_>, g: &RealVector) -> Result<()> {
    dim_check(g.len() == op.ensemble().rows(), || {
        format!("measurement has length {}, expected {}", g.len(), op.ensemble().rows())
    })
}

/// `T_Φ(z) = (AΦ)* T(AΦz) / KN`.
pub fn t_phi(op: &DictionaryOperator<'_>, z: &ComplexVector, nonlin: &Nonlinearity) -> Result<ComplexVector> {
    let u = op.apply(z)?;
    let t = u.map(|v| nonlin.t_map(v));
    Ok(op.adjoint(&t)?.unscale(op.ensemble().rows() as f64))
}

/// `S^g_Φ(z) = (AΦ)* S^g(AΦz) / KN`.
pub fn s_g_phi(
    op: &DictionaryOperator<'_>,
    g: &RealVector,
    z: &ComplexVector,
    nonlin: &Nonlinearity,
) -> Result<ComplexVector> {
    check_measurement(op, g)?;
    let u = op.apply(z)?;
    let s = ComplexVector::from_fn(u.len(), |i, _| nonlin.s_map(u[i], g[i]));
    Ok(op.adjoint(&s)?.unscale(op.ensemble().rows() as f64))
}

/// One stage in gradient form.
pub fn stage(
    op: &DictionaryOperator<'_>,
    z: &ComplexVector,
    g: &RealVector,
    tau: f64,
    reg: &Regularizer,
    nonlin: &Nonlinearity,
) -> Result<ComplexVector> {
    let grad = data_gradient(op, z, g, nonlin)?;
    reg.prox(tau, &(z - grad * C64::new(tau, 0.0)))
}

/// One stage in operator form, `prox_{τR}(z − τ(T_Φ(z) − S^g_Φ(z)))`.
pub fn stage_prox_form(
    op: &DictionaryOperator<'_>,
    z: &ComplexVector,
    g: &RealVector,
    tau: f64,
    reg: &Regularizer,
    nonlin: &Nonlinearity,
) -> Result<ComplexVector> {
    let t = t_phi(op, z, nonlin)?;
    let s = s_g_phi(op, g, z, nonlin)?;
    reg.prox(tau, &(z - (t - s) * C64::new(tau, 0.0)))
}

/// Initial signal estimate and whether the spectral mode fell back to `e₁`.
#[derive(Debug, Clone)]
pub struct SpectralInit {
    pub vector: ComplexVector,
    pub eigenvalue: f64,
    pub fell_back: bool,
}

fn unit_vector(n: usize) -> ComplexVector {
    let mut e = ComplexVector::zeros(n);
    e[0] = C64::new(1.0, 0.0);
    e
}

/// Initial signal `ψ⁰` from raw intensities `g̃`.
///
/// In spectral mode this is the leading eigenvector of
/// `Y = Σ_r g̃_r a_r a_r* / KN` (rows `a_r*` of `A`), found by the power
/// method and scaled to norm `√(N Σ g̃ / Σ‖a_r‖²)`. All-zero intensities fall
/// back to `e₁`.
pub fn spectral_init(
    e: &MeasurementEnsemble,
    g_tilde: &RealVector,
    mode: InitMode,
    opts: PowerIterationOptions,
) -> Result<SpectralInit> {
    dim_check(g_tilde.len() == e.rows(), || {
        format!("intensity has length {}, expected {}", g_tilde.len(), e.rows())
    })?;
    let n = e.n();
    let fixed = |fell_back| SpectralInit {
        vector: unit_vector(n),
        eigenvalue: 0.0,
        fell_back,
    };
    if mode == InitMode::FixedUnitVector {
        return Ok(fixed(false));
    }
    if let Some(x) = g_tilde.iter().find(|x| !(**x >= 0.0)) {
        return Err(Error::InvalidParameter(format!("intensities must be nonnegative, found {x}")));
    }
    let total: f64 = g_tilde.sum();
    if total == 0.0 {
        return Ok(fixed(true));
    }
    let weights = complexify(g_tilde);
    let rows = e.rows() as f64;
    let apply_y = |v: &ComplexVector| {
        let av = e.apply(v).expect("length checked");
        e.adjoint(&av.component_mul(&weights))
            .expect("length checked")
            .unscale(rows)
    };
    let pair = power_iteration(n, opts, apply_y);
    let row_energy: f64 = e.energy().iter().sum();
    let lambda = (n as f64 * total / row_energy).sqrt();
    Ok(SpectralInit {
        vector: pair.vector * C64::new(lambda, 0.0),
        eigenvalue: pair.value,
        fell_back: false,
    })
}

/// Output of an unrolled run.
#[derive(Debug, Clone)]
pub struct UnrollOutput {
    /// `f^L_Φ(G)`, one column per measurement column.
    pub codes: ComplexMatrix,
    pub assumption_ok: bool,
    /// Columns whose spectral initialization fell back to `e₁`.
    pub init_fallbacks: Vec<usize>,
}

fn initial_code(
    e: &MeasurementEnsemble,
    phi: &UnitaryMatrix,
    g: &RealVector,
    cfg: &UnrollConfig,
) -> Result<(ComplexVector, bool)> {
    match cfg.init {
        InitMode::FixedUnitVector => Ok((unit_vector(e.n()), false)),
        InitMode::Spectral => {
            let g_tilde = g.map(|v| cfg.nonlin.intensity(v));
            let init = spectral_init(e, &g_tilde, InitMode::Spectral, cfg.power)?;
            Ok((phi.matrix().adjoint() * init.vector, init.fell_back))
        }
    }
}

/// Runs every stage on one measurement vector and returns `f^0, …, f^L`.
pub fn unroll_column_trace(
    e: &MeasurementEnsemble,
    phi: &UnitaryMatrix,
    g: &RealVector,
    cfg: &UnrollConfig,
) -> Result<(Vec<ComplexVector>, bool)> {
    let op = e.with_dictionary(phi)?;
    check_measurement(&op, g)?;
    let (mut z, fell_back) = initial_code(e, phi, g, cfg)?;
    let mut trace = Vec::with_capacity(cfg.depth() + 1);
    trace.push(z.clone());
    for &tau in &cfg.taus {
        z = stage(&op, &z, g, tau, &cfg.reg, &cfg.nonlin)?;
        trace.push(z.clone());
    }
    Ok((trace, fell_back))
}

/// `f^L_Φ(g)` for a single measurement vector.
pub fn unroll_column(
    e: &MeasurementEnsemble,
    phi: &UnitaryMatrix,
    g: &RealVector,
    cfg: &UnrollConfig,
) -> Result<ComplexVector> {
    cfg.validate(e)?;
    let (mut trace, _) = unroll_column_trace(e, phi, g, cfg)?;
    Ok(trace.pop().expect("trace holds at least f⁰"))
}

fn check_matrix(e: &MeasurementEnsemble, g: &RealMatrix) -> Result<()> {
    dim_check(g.nrows() == e.rows() && g.ncols() >= 1, || {
        format!(
            "measurement matrix is {}x{}, expected {}xm with m ≥ 1",
            g.nrows(),
            g.ncols(),
            e.rows()
        )
    })
}

/// `f^L_Φ(G)` applied column-wise.
pub fn unroll(
    e: &MeasurementEnsemble,
    phi: &UnitaryMatrix,
    g: &RealMatrix,
    cfg: &UnrollConfig,
) -> Result<UnrollOutput> {
    let assumption_ok = cfg.validate(e)?;
    check_matrix(e, g)?;
    let mut codes = ComplexMatrix::zeros(e.n(), g.ncols());
    let mut init_fallbacks = Vec::new();
    for (j, col) in g.column_iter().enumerate() {
        let (trace, fell_back) = unroll_column_trace(e, phi, &col.into_owned(), cfg)?;
        codes.set_column(j, trace.last().expect("nonempty"));
        if fell_back {
            init_fallbacks.push(j);
        }
    }
    Ok(UnrollOutput {
        codes,
        assumption_ok,
        init_fallbacks,
    })
}

/// Every iterate `f^ℓ_Φ(G)`, `ℓ = 0..=L`, as matrices.
pub fn unroll_trace(
    e: &MeasurementEnsemble,
    phi: &UnitaryMatrix,
    g: &RealMatrix,
    cfg: &UnrollConfig,
) -> Result<Vec<ComplexMatrix>> {
    cfg.validate(e)?;
    check_matrix(e, g)?;
    let mut out = vec![ComplexMatrix::zeros(e.n(), g.ncols()); cfg.depth() + 1];
    for (j, col) in g.column_iter().enumerate() {
        let (trace, _) = unroll_column_trace(e, phi, &col.into_owned(), cfg)?;
        for (l, z) in trace.iter().enumerate() {
            out[l].set_column(j, z);
        }
    }
    Ok(out)
}

/// Network output `σ(Ψ f^L_Φ(G))` with σ applied per column.
pub fn network_output(
    e: &MeasurementEnsemble,
    psi: &UnitaryMatrix,
    phi: &UnitaryMatrix,
    g: &RealMatrix,
    cfg: &UnrollConfig,
) -> Result<ComplexMatrix> {
    dim_check(psi.size() == e.n(), || {
        format!("output map is {}x{}, expected N = {}", psi.size(), psi.size(), e.n())
    })?;
    let codes = unroll(e, phi, g, cfg)?.codes;
    let mapped = psi.matrix() * codes;
    let mut out = mapped.clone();
    for (j, col) in mapped.column_iter().enumerate() {
        out.set_column(j, &cfg.clip.clip(&col.into_owned()));
    }
    Ok(out)
}

/// Settings for classical proximal-gradient reconstruction with a fixed
/// dictionary.
#[derive(Debug, Clone, PartialEq)]
pub struct PgaConfig {
    pub step: f64,
    pub max_iters: usize,
    pub reg: Regularizer,
    pub nonlin: Nonlinearity,
    pub init: InitMode,
    pub power: PowerIterationOptions,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// `ψ̂ = Φ z`.
    pub psi: ComplexVector,
    pub code: ComplexVector,
    /// `D + R` before the first iteration and after every iteration.
    pub objective: Vec<f64>,
    /// `D` alone, same indexing as `objective`.
    pub data_term: Vec<f64>,
    pub init_fell_back: bool,
    /// Whether the step satisfied `τ‖A‖²/KN ≤ 1`.
    pub assumption_ok: bool,
}

/// Proximal gradient descent on `D(Φz) + R(z)` with constant step.
pub fn pga_reconstruct(
    e: &MeasurementEnsemble,
    g: &RealVector,
    phi: &UnitaryMatrix,
    cfg: &PgaConfig,
) -> Result<Reconstruction> {
    if !(cfg.step > 0.0 && cfg.step.is_finite()) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {}", cfg.step)));
    }
    let op = e.with_dictionary(phi)?;
    check_measurement(&op, g)?;
    let g_tilde = g.map(|v| cfg.nonlin.intensity(v));
    let init = spectral_init(e, &g_tilde, cfg.init, cfg.power)?;
    let mut z = phi.matrix().adjoint() * init.vector;
    let energy = |z: &ComplexVector| -> Result<(f64, f64)> {
        let d = data_term_code(&op, z, g, &cfg.nonlin)?;
        Ok((d, d + cfg.reg.value(z)))
    };
    let (d0, o0) = energy(&z)?;
    let mut data_term = vec![d0];
    let mut objective = vec![o0];
    for _ in 0..cfg.max_iters {
        z = stage(&op, &z, g, cfg.step, &cfg.reg, &cfg.nonlin)?;
        let (d, o) = energy(&z)?;
        data_term.push(d);
        objective.push(o);
    }
    Ok(Reconstruction {
        psi: phi.matrix() * &z,
        code: z,
        objective,
        data_term,
        init_fell_back: init.fell_back,
        assumption_ok: cfg.step <= e.max_step(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Observation;
    use crate::rng::SeededRng;

    fn setup(seed: u64, n: usize, k: usize) -> (MeasurementEnsemble, UnitaryMatrix, SeededRng) {
        let mut rng = SeededRng::new(seed);
        let e = MeasurementEnsemble::random(&mut rng, n, k).unwrap();
        let phi = UnitaryMatrix::random(&mut rng, n).unwrap();
        (e, phi, rng)
    }

    #[test]
    fn consistent_data_is_a_fixed_point() {
        let (e, phi, mut rng) = setup(1, 5, 2);
        let op = e.with_dictionary(&phi).unwrap();
        let z = rng.complex_gaussian_vector(5);
        let g = Observation::of_signal(&e, &(phi.matrix() * &z), 0.1).unwrap().g;
        let nl = Nonlinearity::pseudo_huber(0.1).unwrap();
        let out = stage(&op, &z, &g, 0.9 * e.max_step(), &Regularizer::None, &nl).unwrap();
        assert!((out - &z).norm() < 1e-12);
    }

    #[test]
    fn heavy_shrinkage_gives_zero() {
        let (e, phi, mut rng) = setup(2, 4, 1);
        let op = e.with_dictionary(&phi).unwrap();
        let z = rng.complex_gaussian_vector(4);
        let g = RealVector::from_fn(4, |_, _| rng.uniform(0.0, 1.0));
        let nl = Nonlinearity::pseudo_huber(1.0).unwrap();
        let tau = 0.5 * e.max_step();
        let pre = &z - data_gradient(&op, &z, &g, &nl).unwrap() * C64::new(tau, 0.0);
        let thr = pre.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let reg = Regularizer::l1(thr / tau).unwrap();
        let out = stage(&op, &z, &g, tau, &reg, &nl).unwrap();
        assert_eq!(out.norm(), 0.0);
    }

    #[test]
    fn t_and_s_vanish_at_zero() {
        let (e, phi, mut rng) = setup(3, 6, 3);
        let op = e.with_dictionary(&phi).unwrap();
        let g = RealVector::from_fn(18, |_, _| rng.uniform(0.0, 2.0));
        let nl = Nonlinearity::pseudo_huber(0.3).unwrap();
        let zero = ComplexVector::zeros(6);
        assert_eq!(t_phi(&op, &zero, &nl).unwrap().norm(), 0.0);
        assert_eq!(s_g_phi(&op, &g, &zero, &nl).unwrap().norm(), 0.0);
    }

    #[test]
    fn depth_zero_returns_initialization() {
        let (e, phi, mut rng) = setup(4, 3, 2);
        let g = RealMatrix::from_fn(6, 4, |_, _| rng.uniform(0.0, 1.0));
        let cfg = UnrollConfig::constant(&e, 0, 0.9, Nonlinearity::pseudo_huber(0.1).unwrap());
        let out = unroll(&e, &phi, &g, &cfg).unwrap();
        assert!((out.codes.norm() - 2.0).abs() < 1e-15);
        for c in out.codes.column_iter() {
            assert_eq!(c[0], C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn matrix_run_equals_column_runs() {
        let (e, phi, mut rng) = setup(5, 4, 2);
        let g = RealMatrix::from_fn(8, 3, |_, _| rng.uniform(0.0, 1.0));
        let cfg = UnrollConfig::constant(&e, 4, 0.9, Nonlinearity::pseudo_huber(0.2).unwrap());
        let out = unroll(&e, &phi, &g, &cfg).unwrap();
        for j in 0..3 {
            let col = unroll_column(&e, &phi, &g.column(j).into_owned(), &cfg).unwrap();
            assert_eq!(out.codes.column(j), col.column(0));
        }
    }

    #[test]
    fn strict_policy_rejects_large_steps() {
        let (e, phi, _) = setup(6, 3, 1);
        let mut cfg = UnrollConfig::constant(&e, 2, 1.01, Nonlinearity::pseudo_huber(0.1).unwrap());
        let g = RealMatrix::zeros(3, 1);
        assert!(matches!(
            unroll(&e, &phi, &g, &cfg),
            Err(Error::StepTooLarge { stage: 0, .. })
        ));
        cfg.policy = AssumptionPolicy::Warn;
        assert!(!unroll(&e, &phi, &g, &cfg).unwrap().assumption_ok);
    }

    #[test]
    fn fixed_and_fallback_init() {
        let e = MeasurementEnsemble::unit(4, 2).unwrap();
        let opts = PowerIterationOptions::default();
        let fixed = spectral_init(&e, &RealVector::from_element(8, 1.0), InitMode::FixedUnitVector, opts).unwrap();
        assert_eq!(fixed.vector.norm(), 1.0);
        assert!(!fixed.fell_back);
        let zero = spectral_init(&e, &RealVector::zeros(8), InitMode::Spectral, opts).unwrap();
        assert!(zero.fell_back);
        assert_eq!(zero.vector[0], C64::new(1.0, 0.0));
    }

    #[test]
    fn spectral_init_is_an_eigenvector() {
        use crate::exper::dataset::{generate_dataset, DatasetParams, WeightsKind};
        for seed in 0..10 {
            let p = DatasetParams {
                n: 16,
                k: 3,
                m: 1,
                s: 2,
                delta: 0.1,
                c_in: 1.0,
                weights: if seed % 2 == 0 { WeightsKind::Random } else { WeightsKind::default() },
            };
            let ds = generate_dataset(&mut SeededRng::new(seed), &p).unwrap();
            let g_tilde = ds.g.column(0).map(|v| v * (v + 0.2));
            let init = spectral_init(&ds.ensemble, &g_tilde, InitMode::Spectral, PowerIterationOptions::default()).unwrap();
            // dense Y = Σ_r g̃_r a_r a_r* / KN
            let a = ds.ensemble.to_dense();
            let w = ComplexMatrix::from_diagonal(&complexify(&g_tilde));
            let y = a.adjoint() * w * &a / C64::new(48.0, 0.0);
            let v = &init.vector;
            let mu = v.dotc(&(&y * v)).re / v.norm_squared();
            let resid = (&y * v - v * C64::new(mu, 0.0)).norm();
            assert!(resid <= 1e-8 * v.norm(), "seed {seed}: residual {resid}");
            let row_energy: f64 = (0..48).map(|r| a.row(r).norm_squared()).sum();
            let lambda = (16.0 * g_tilde.sum() / row_energy).sqrt();
            assert!((v.norm() - lambda).abs() < 1e-12 * lambda);
        }
    }

    #[test]
    fn pga_zero_iterations_returns_init() {
        let (e, phi, mut rng) = setup(7, 4, 2);
        let g = RealVector::from_fn(8, |_, _| rng.uniform(0.0, 1.0));
        let cfg = PgaConfig {
            step: 0.5 * e.max_step(),
            max_iters: 0,
            reg: Regularizer::None,
            nonlin: Nonlinearity::pseudo_huber(0.1).unwrap(),
            init: InitMode::FixedUnitVector,
            power: PowerIterationOptions::default(),
        };
        let rec = pga_reconstruct(&e, &g, &phi, &cfg).unwrap();
        assert_eq!(rec.objective.len(), 1);
        assert!((rec.psi[0] - C64::new(1.0, 0.0)).norm() < 1e-14, "{}", rec.psi[0]);
    }

    #[test]
    fn network_output_is_clipped() {
        let (e, phi, mut rng) = setup(8, 4, 2);
        let psi = UnitaryMatrix::random(&mut rng, 4).unwrap();
        let g = RealMatrix::from_fn(8, 5, |_, _| rng.uniform(0.0, 3.0));
        let mut cfg = UnrollConfig::constant(&e, 3, 0.9, Nonlinearity::pseudo_huber(0.1).unwrap());
        cfg.clip = ClipRadius::uniform(0.5).unwrap();
        let out = network_output(&e, &psi, &phi, &g, &cfg).unwrap();
        for c in out.column_iter() {
            assert!(c.norm() <= 0.5 + 1e-12);
        }
    }
}
