//! Every invariant of the library, checked on random instances and collected
//! into one report.
//!
//! Each entry records the worst slack seen over its trials. Slack is
//! `allowed − observed` for the inequality being checked, so an entry passes
//! when its worst slack is nonnegative.

use serde::Serialize;

use crate::bounds::{bound_constants, covering_log, rademacher_bound, BoundInputs, ParameterMetric};
use crate::ensemble::MeasurementEnsemble;
use crate::error::Result;
use crate::exper::dataset::{generate_dataset, DatasetParams, WeightsKind};
use crate::exper::figure1::{figure1, Figure1Config};
use crate::linalg::{max_abs, spectral_norm, ComplexVector, RealMatrix, RealVector, C64};
use crate::matio;
use crate::model::{data_gradient, data_term_code, GRADIENT_CONSTANT};
use crate::nonlin::{Nonlinearity, PseudoHuber};
use crate::prox::{ClipRadius, Regularizer};
use crate::rng::SeededRng;
use crate::unitary::UnitaryMatrix;
use crate::unroll::{
    network_output, s_g_phi, t_phi, unroll, unroll_trace, AssumptionPolicy, UnrollConfig,
    DEFAULT_STEP_SCALE,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    /// Fraction of `KN/‖A‖²` used as the step wherever a step enters. Values
    /// above one deliberately break the step condition.
    pub step_scale: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 1000,
            step_scale: DEFAULT_STEP_SCALE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyEntry {
    pub name: String,
    pub module: String,
    pub trials: usize,
    pub worst_slack: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub seed: u64,
    pub trials: usize,
    pub step_scale: f64,
    pub all_passed: bool,
    pub entries: Vec<PropertyEntry>,
}

impl PropertyReport {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report fields are TOML-representable")
    }

    pub fn entry(&self, name: &str) -> Option<&PropertyEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }
}

/// Running minimum of slacks.
struct Worst(f64);

impl Worst {
    fn new() -> Self {
        Self(f64::INFINITY)
    }

    fn push(&mut self, slack: f64) {
        // NaN counts as a violation
        self.0 = if slack.is_nan() { f64::NEG_INFINITY } else { self.0.min(slack) };
    }
}

type Check = fn(&mut SeededRng, &SuiteConfig) -> Result<(usize, f64)>;

/// `(name, module, check)` for every invariant, in report order.
pub const PROPERTIES: &[(&str, &str, Check)] = &[
    ("ensemble_norm_matches_svd", "core", ensemble_norm_matches_svd),
    ("dictionary_preserves_norm", "core", dictionary_preserves_norm),
    ("elementary_inequalities", "core", elementary_inequalities),
    ("huber_prox_firmly_nonexpansive", "nonlin", huber_prox_firmly_nonexpansive),
    ("huber_prox_scaling_identity", "nonlin", huber_prox_scaling_identity),
    ("huber_prox_below_delta", "nonlin", huber_prox_below_delta),
    ("reg_prox_firmly_nonexpansive", "prox", reg_prox_firmly_nonexpansive),
    ("reg_prox_zero_at_zero", "prox", reg_prox_zero_at_zero),
    ("gradient_constant", "model", gradient_constant),
    ("data_term_descent", "model", data_term_descent),
    ("weighted_residual_identity", "model", weighted_residual_identity),
    ("t_firmly_nonexpansive", "unroll", t_firmly_nonexpansive),
    ("s_lipschitz", "unroll", s_lipschitz),
    ("combined_step_bound", "unroll", combined_step_bound),
    ("output_norm_bound", "unroll", output_norm_bound),
    ("output_norm_bound_frobenius", "unroll", output_norm_bound_frobenius),
    ("perturbation_bound", "unroll", perturbation_bound),
    ("output_map_perturbation", "unroll", output_map_perturbation),
    ("k_recursion_exact", "bounds", k_recursion_exact),
    ("perturbation_ratio_below_k", "bounds", perturbation_ratio_below_k),
    ("bounds_monotone", "bounds", bounds_monotone),
    ("metric_properties", "bounds", metric_properties),
    ("figure1_deterministic", "exper", figure1_deterministic),
    ("refinement_never_decreases", "exper", refinement_never_decreases),
    ("a_ratio_below_k", "exper", a_ratio_below_k),
    ("dataset_reproducible", "exper", dataset_reproducible),
];

/// Runs every property. Errors inside a check become failing entries.
pub fn property_suite(cfg: &SuiteConfig) -> PropertyReport {
    let root = SeededRng::new(cfg.seed);
    let entries: Vec<PropertyEntry> = PROPERTIES
        .iter()
        .enumerate()
        .map(|(i, (name, module, check))| {
            let mut rng = root.split(i as u64);
            let (trials, worst_slack, detail) = match check(&mut rng, cfg) {
                Ok((t, w)) => (t, w, None),
                Err(e) => (0, f64::NEG_INFINITY, Some(e.to_string())),
            };
            PropertyEntry {
                name: name.to_string(),
                module: module.to_string(),
                trials,
                worst_slack,
                passed: worst_slack >= 0.0,
                detail,
            }
        })
        .collect();
    PropertyReport {
        seed: cfg.seed,
        trials: cfg.trials,
        step_scale: cfg.step_scale,
        all_passed: entries.iter().all(|e| e.passed),
        entries,
    }
}

fn trials(cfg: &SuiteConfig) -> usize {
    cfg.trials.max(1)
}

fn pick<T: Copy>(rng: &mut SeededRng, xs: &[T]) -> T {
    xs[rng.index(xs.len())]
}

/// Random ensemble with `N ≤ n_max`, `K ≤ k_max` and a Haar dictionary.
fn instance(rng: &mut SeededRng, n_max: usize, k_max: usize) -> Result<(MeasurementEnsemble, UnitaryMatrix)> {
    let n = 1 + rng.index(n_max);
    let k = 1 + rng.index(k_max);
    let e = MeasurementEnsemble::random(rng, n, k)?;
    let phi = UnitaryMatrix::random(rng, n)?;
    Ok((e, phi))
}

fn scaled_gaussian(rng: &mut SeededRng, n: usize) -> ComplexVector {
    let s = 10f64.powf(rng.uniform(-2.0, 1.0));
    rng.complex_gaussian_vector(n) * C64::new(s, 0.0)
}

fn uniform_measurements(rng: &mut SeededRng, rows: usize, cols: usize) -> RealMatrix {
    RealMatrix::from_fn(rows, cols, |_, _| rng.uniform(0.0, 1.0))
}

fn unroll_config(e: &MeasurementEnsemble, depth: usize, cfg: &SuiteConfig, delta: f64) -> Result<UnrollConfig> {
    Ok(UnrollConfig {
        policy: AssumptionPolicy::Warn,
        ..UnrollConfig::constant(e, depth, cfg.step_scale, Nonlinearity::pseudo_huber(delta)?)
    })
}

fn ensemble_norm_matches_svd(rng: &mut SeededRng, _: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let mut count = 0;
    for n in 1..=8 {
        for k in 1..=3 {
            let e = MeasurementEnsemble::random(rng, n, k)?;
            let svd = spectral_norm(&e.to_dense());
            w.push(1e-8 * svd - (e.norm() - svd).abs());
            count += 1;
        }
    }
    Ok((count, w.0))
}

fn dictionary_preserves_norm(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg).min(100);
    for _ in 0..t {
        let (e, phi) = instance(rng, 8, 3)?;
        let composed = spectral_norm(&(e.to_dense() * phi.matrix()));
        w.push(1e-8 * e.norm() - (composed - e.norm()).abs());
    }
    Ok((t, w.0))
}

fn elementary_inequalities(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg);
    for _ in 0..t {
        let (e, _) = instance(rng, 8, 3)?;
        let z = scaled_gaussian(rng, e.n());
        let rhs = e.norm() * z.norm();
        w.push(rhs * (1.0 + 1e-12) - e.apply(&z)?.norm());
        let x = scaled_gaussian(rng, e.n());
        let y = scaled_gaussian(rng, e.n());
        let x_inf = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let rhs = x_inf * y.norm();
        w.push(rhs * (1.0 + 1e-12) - x.component_mul(&y).norm());
    }
    Ok((t, w.0))
}

fn huber_prox_firmly_nonexpansive(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg);
    for _ in 0..t {
        let h = PseudoHuber::new(pick(rng, &[0.1, 1.0, 10.0]))?;
        let x = scaled_gaussian(rng, 4);
        let y = scaled_gaussian(rng, 4);
        let px = x.map(|v| h.prox(v));
        let py = y.map(|v| h.prox(v));
        let lhs = (&px - &py).norm_squared() + ((&x - &px) - (&y - &py)).norm_squared();
        w.push((&x - &y).norm_squared() + 1e-9 - lhs);
    }
    Ok((t, w.0))
}

fn huber_prox_scaling_identity(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg);
    let unit = PseudoHuber::new(1.0)?;
    for _ in 0..t {
        let delta = pick(rng, &[0.1, 1.0, 10.0]);
        let h = PseudoHuber::new(delta)?;
        let z = rng.complex_gaussian() * rng.uniform(0.0, 3.0 * delta);
        w.push(1e-12 - (unit.prox(z / delta) * delta - h.prox(z)).norm());
    }
    Ok((t, w.0))
}

fn huber_prox_below_delta(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg);
    for _ in 0..t {
        let delta = pick(rng, &[0.1, 1.0, 10.0]);
        let h = PseudoHuber::new(delta)?;
        let z = rng.complex_gaussian() * 10f64.powf(rng.uniform(-3.0, 3.0));
        w.push(delta - h.prox(z).norm());
    }
    Ok((t, w.0))
}

fn reg_prox_firmly_nonexpansive(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg);
    for i in 0..t {
        let reg = if i % 2 == 0 {
            Regularizer::None
        } else {
            Regularizer::l1(rng.uniform(0.0, 2.0))?
        };
        let s = rng.uniform(0.0, 2.0);
        let x = scaled_gaussian(rng, 5);
        let y = scaled_gaussian(rng, 5);
        let px = reg.prox(s, &x)?;
        let py = reg.prox(s, &y)?;
        let lhs = (&px - &py).norm_squared() + ((&x - &px) - (&y - &py)).norm_squared();
        w.push((&x - &y).norm_squared() + 1e-9 - lhs);
    }
    Ok((t, w.0))
}

fn reg_prox_zero_at_zero(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg);
    for _ in 0..t {
        let n = 1 + rng.index(8);
        let s = rng.uniform(0.0, 5.0);
        for reg in [Regularizer::None, Regularizer::l1(rng.uniform(0.0, 5.0))?] {
            w.push(-reg.prox(s, &ComplexVector::zeros(n))?.norm());
        }
    }
    Ok((t, w.0))
}

fn gradient_constant(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg).min(100);
    let h = 1e-6;
    for _ in 0..t {
        let (e, phi) = instance(rng, 8, 3)?;
        let nl = Nonlinearity::pseudo_huber(pick(rng, &[0.1, 1.0]))?;
        let op = e.with_dictionary(&phi)?;
        let z = rng.complex_gaussian_vector(e.n());
        let g = RealVector::from_fn(e.rows(), |_, _| rng.uniform(0.0, 1.0));
        let grad = data_gradient(&op, &z, &g, &nl)? * C64::new(GRADIENT_CONSTANT, 0.0);
        let mut fd = ComplexVector::zeros(e.n());
        for i in 0..e.n() {
            let mut part = [0.0; 2];
            for (slot, dir) in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)].into_iter().enumerate() {
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[i] += dir * h;
                zm[i] -= dir * h;
                part[slot] = (data_term_code(&op, &zp, &g, &nl)? - data_term_code(&op, &zm, &g, &nl)?) / (2.0 * h);
            }
            fd[i] = C64::new(part[0], part[1]);
        }
        w.push(1e-5 - (&fd - &grad).norm() / grad.norm());
    }
    Ok((t, w.0))
}

fn data_term_descent(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg).min(100);
    for _ in 0..t {
        let (e, phi) = instance(rng, 8, 3)?;
        let nl = Nonlinearity::pseudo_huber(pick(rng, &[0.1, 1.0]))?;
        let op = e.with_dictionary(&phi)?;
        let z = rng.complex_gaussian_vector(e.n());
        let g = RealVector::from_fn(e.rows(), |_, _| rng.uniform(0.0, 1.0));
        let d0 = data_term_code(&op, &z, &g, &nl)?;
        let step = 0.01 * e.max_step();
        let z1 = &z - data_gradient(&op, &z, &g, &nl)? * C64::new(step, 0.0);
        let d1 = data_term_code(&op, &z1, &g, &nl)?;
        w.push(d0);
        w.push(d0 + 1e-10 - d1);
    }
    Ok((t, w.0))
}

fn weighted_residual_identity(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg);
    for _ in 0..t {
        let delta = pick(rng, &[0.1, 1.0, 10.0]);
        let nl = Nonlinearity::pseudo_huber(delta)?;
        let u = rng.complex_gaussian() * rng.uniform(0.0, 3.0);
        let g = rng.uniform(0.0, 1.0);
        let direct = nl.weighted_residual(u, g);
        let split = nl.t_map(u) - nl.s_map(u, g);
        w.push(1e-12 - (direct - split).norm());
    }
    Ok((t, w.0))
}

/// Shared sampler for the three stage-operator properties.
struct StageSample {
    e: MeasurementEnsemble,
    phi: UnitaryMatrix,
    g: RealVector,
    nl: Nonlinearity,
    delta: f64,
    tau: f64,
    z1: ComplexVector,
    z2: ComplexVector,
}

fn stage_sample(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<StageSample> {
    let (e, phi) = instance(rng, 8, 3)?;
    let delta = pick(rng, &[0.1, 1.0]);
    let g = RealVector::from_fn(e.rows(), |_, _| rng.uniform(0.0, 1.0));
    let z1 = scaled_gaussian(rng, e.n());
    let z2 = if rng.index(2) == 0 {
        scaled_gaussian(rng, e.n())
    } else {
        &z1 + scaled_gaussian(rng, e.n()) * C64::new(1e-2, 0.0)
    };
    Ok(StageSample {
        tau: cfg.step_scale * e.max_step(),
        nl: Nonlinearity::pseudo_huber(delta)?,
        e,
        phi,
        g,
        delta,
        z1,
        z2,
    })
}

fn t_firmly_nonexpansive(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg);
    for _ in 0..t {
        let s = stage_sample(rng, cfg)?;
        let op = s.e.with_dictionary(&s.phi)?;
        let tau = C64::new(s.tau, 0.0);
        let t1 = t_phi(&op, &s.z1, &s.nl)? * tau;
        let t2 = t_phi(&op, &s.z2, &s.nl)? * tau;
        let lhs = (&t1 - &t2).norm_squared() + ((&s.z1 - &t1) - (&s.z2 - &t2)).norm_squared();
        w.push((&s.z1 - &s.z2).norm_squared() + 1e-9 - lhs);
    }
    Ok((t, w.0))
}

fn s_lipschitz(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg);
    for _ in 0..t {
        let s = stage_sample(rng, cfg)?;
        let op = s.e.with_dictionary(&s.phi)?;
        let diff = (s_g_phi(&op, &s.g, &s.z1, &s.nl)? - s_g_phi(&op, &s.g, &s.z2, &s.nl)?) * C64::new(s.tau, 0.0);
        let g_inf = s.g.amax();
        w.push(g_inf / s.delta * (&s.z1 - &s.z2).norm() * (1.0 + 1e-9) - diff.norm());
    }
    Ok((t, w.0))
}

fn combined_step_bound(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg);
    for _ in 0..t {
        let s = stage_sample(rng, cfg)?;
        let op = s.e.with_dictionary(&s.phi)?;
        let map = |z: &ComplexVector| -> Result<ComplexVector> {
            Ok(z - (t_phi(&op, z, &s.nl)? - s_g_phi(&op, &s.g, z, &s.nl)?) * C64::new(s.tau, 0.0))
        };
        let lhs = (map(&s.z1)? - map(&s.z2)?).norm();
        let rhs = (1.0 + s.g.amax() / s.delta) * (&s.z1 - &s.z2).norm();
        w.push(rhs + 1e-9 - lhs);
    }
    Ok((t, w.0))
}

fn output_norm_bound(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    output_norm_check(rng, cfg, max_abs)
}

/// The same growth estimate with `‖G‖_F` in place of `‖G‖_∞`.
fn output_norm_bound_frobenius(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    output_norm_check(rng, cfg, |g| g.norm())
}

/// `‖f^ℓ‖_F ≤ √m + (T_ℓ/KN)‖A‖·size(G)` at every stage.
fn output_norm_check(rng: &mut SeededRng, cfg: &SuiteConfig, size: fn(&RealMatrix) -> f64) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg);
    for _ in 0..t {
        let (e, phi) = instance(rng, 8, 3)?;
        let m = 1 + rng.index(4);
        let depth = 1 + rng.index(10);
        let g = uniform_measurements(rng, e.rows(), m);
        let ucfg = unroll_config(&e, depth, cfg, pick(rng, &[0.1, 1.0]))?;
        let trace = unroll_trace(&e, &phi, &g, &ucfg)?;
        let scale = e.norm() * size(&g) / e.rows() as f64;
        let mut elapsed = 0.0;
        for (l, f) in trace.iter().enumerate() {
            let bound = (m as f64).sqrt() + elapsed * scale;
            w.push(bound + 1e-9 - f.norm());
            if l < depth {
                elapsed += ucfg.taus[l];
            }
        }
    }
    Ok((t, w.0))
}

/// A random perturbation instance: `(e, Φ₁, Φ₂, G, config)`.
fn perturbation_sample(
    rng: &mut SeededRng,
    cfg: &SuiteConfig,
) -> Result<(MeasurementEnsemble, UnitaryMatrix, UnitaryMatrix, RealMatrix, UnrollConfig)> {
    let (e, phi1) = instance(rng, 6, 3)?;
    let phi2 = if rng.index(2) == 0 {
        UnitaryMatrix::random(rng, e.n())?
    } else {
        // nearby dictionary: Φ₁ times a small random unitary
        let h = rng.complex_gaussian_matrix(e.n(), e.n());
        let skew = (&h - h.adjoint()) * C64::new(0.5 * 10f64.powf(rng.uniform(-4.0, -1.0)), 0.0);
        UnitaryMatrix::new(phi1.matrix() * skew.exp())?
    };
    let m = 1 + rng.index(3);
    let depth = 1 + rng.index(8);
    let g = uniform_measurements(rng, e.rows(), m);
    let ucfg = unroll_config(&e, depth, cfg, pick(rng, &[0.1, 1.0]))?;
    Ok((e, phi1, phi2, g, ucfg))
}

fn perturbation_bound(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg);
    for _ in 0..t {
        let (e, phi1, phi2, g, ucfg) = perturbation_sample(rng, cfg)?;
        let consts = bound_constants(&BoundInputs::from_run(&e, &g, &ucfg, 0.05))?;
        let lhs = (unroll(&e, &phi1, &g, &ucfg)?.codes - unroll(&e, &phi2, &g, &ucfg)?.codes).norm();
        let rhs = consts.k_l() * e.dictionary_distance(&phi1, &phi2)?;
        w.push((rhs * (1.0 + 1e-9) - lhs) / rhs.max(f64::MIN_POSITIVE));
    }
    Ok((t, w.0))
}

fn output_map_perturbation(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg);
    for _ in 0..t {
        let (e, phi1, phi2, g, mut ucfg) = perturbation_sample(rng, cfg)?;
        let psi1 = UnitaryMatrix::random(rng, e.n())?;
        let psi2 = if rng.index(2) == 0 { psi1.clone() } else { UnitaryMatrix::random(rng, e.n())? };
        ucfg.clip = ClipRadius::uniform(rng.uniform(0.5, 2.0))?;
        let consts = bound_constants(&BoundInputs::from_run(&e, &g, &ucfg, 0.05))?;
        let o1 = network_output(&e, &psi1, &phi1, &g, &ucfg)?;
        let o2 = network_output(&e, &psi2, &phi2, &g, &ucfg)?;
        let d_psi = spectral_norm(&(psi1.matrix() - psi2.matrix()));
        let rhs = consts.m_l * d_psi + consts.m_l_prime() * e.dictionary_distance(&phi1, &phi2)? * (1.0 + 1e-9);
        w.push((rhs - (&o1 - &o2).norm()) / rhs.max(f64::MIN_POSITIVE));
    }
    Ok((t, w.0))
}

fn k_recursion_exact(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg).min(100);
    for _ in 0..t {
        let n = 1 + rng.index(8);
        let k = 1 + rng.index(3);
        let norm_a = rng.uniform(0.5, 3.0);
        let max_step = (k * n) as f64 / (norm_a * norm_a);
        let depth = 1 + rng.index(50);
        let inputs = BoundInputs {
            n,
            k,
            m: 1 + rng.index(100),
            norm_a,
            g_inf: rng.uniform(0.0, 2.0),
            taus: (0..depth).map(|_| rng.uniform(0.1, 1.0) * max_step).collect(),
            nonlin: Nonlinearity::pseudo_huber(pick(rng, &[0.1, 1.0, 10.0]))?,
            c_in: 1.0,
            c_out: 1.0,
            alpha: 0.05,
        };
        let c = bound_constants(&inputs)?;
        // recursion holds bitwise
        let mut exact = c.k_seq[0] == 0.0;
        for l in 0..depth {
            exact &= c.k_seq[l + 1] == c.gamma * (c.k_seq[l] + c.b[l]);
        }
        w.push(if exact { 0.0 } else { -1.0 });
        let closed: f64 = (0..depth).map(|l| c.gamma.powi((depth - l) as i32) * c.b[l]).sum();
        w.push(1e-12 - (c.k_l() - closed).abs() / closed);
        w.push(1e-12 - (c.log_k_l - closed.ln()).abs() / closed.ln().abs().max(1.0));
    }
    Ok((t, w.0))
}

fn perturbation_ratio_below_k(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg);
    let e = MeasurementEnsemble::unit(2, 1)?;
    for _ in 0..t {
        let depth = 1 + rng.index(8);
        let ucfg = unroll_config(&e, depth, cfg, 0.1)?;
        let g = uniform_measurements(rng, 2, 1);
        let a = rng.uniform(0.0, std::f64::consts::TAU);
        let b = a + 10f64.powf(rng.uniform(-6.0, 0.0));
        let (phi1, phi2) = (UnitaryMatrix::rotation(a), UnitaryMatrix::rotation(b));
        let consts = bound_constants(&BoundInputs::from_run(&e, &g, &ucfg, 0.05))?;
        let num = (unroll(&e, &phi1, &g, &ucfg)?.codes - unroll(&e, &phi2, &g, &ucfg)?.codes).norm();
        let ratio = num / e.dictionary_distance(&phi1, &phi2)?;
        w.push(1.0 + 1e-9 - ratio / consts.k_l());
    }
    Ok((t, w.0))
}

fn bounds_monotone(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg).min(100);
    let grid: Vec<f64> = (0..20).map(|i| 10f64.powf(-2.0 + 0.3 * i as f64)).collect();
    for _ in 0..t {
        let n = 1 + rng.index(8);
        let k = 1 + rng.index(3);
        let m = 1 + rng.index(100);
        let eps = rng.uniform(0.01, 10.0);
        let norm_a = rng.uniform(0.5, 3.0);
        let c_out = rng.uniform(0.5, 2.0);
        let fixed = rng.uniform(0.1, 10.0);
        for pair in grid.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            w.push(covering_log(eps, n, k, hi, fixed, norm_a)? - covering_log(eps, n, k, lo, fixed, norm_a)?);
            w.push(covering_log(eps, n, k, fixed, hi, norm_a)? - covering_log(eps, n, k, fixed, lo, norm_a)?);
            w.push(
                rademacher_bound(n, k, m, c_out, hi, fixed, norm_a) - rademacher_bound(n, k, m, c_out, lo, fixed, norm_a),
            );
            w.push(
                rademacher_bound(n, k, m, c_out, fixed, hi, norm_a) - rademacher_bound(n, k, m, c_out, fixed, lo, norm_a),
            );
        }
        w.push(
            rademacher_bound(n, k + 1, m, c_out, fixed, fixed, norm_a)
                - rademacher_bound(n, k, m, c_out, fixed, fixed, norm_a),
        );
    }
    Ok((t, w.0))
}

fn metric_properties(rng: &mut SeededRng, cfg: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let t = trials(cfg);
    for _ in 0..t {
        let (e, _) = instance(rng, 6, 3)?;
        let metric = ParameterMetric {
            m_l: rng.uniform(0.1, 10.0),
            m_l_prime: rng.uniform(0.1, 10.0),
        };
        let pts: Vec<(UnitaryMatrix, UnitaryMatrix)> = (0..3)
            .map(|_| Ok((UnitaryMatrix::random(rng, e.n())?, UnitaryMatrix::random(rng, e.n())?)))
            .collect::<Result<_>>()?;
        let d = |i: usize, j: usize| metric.distance(&e, (&pts[i].0, &pts[i].1), (&pts[j].0, &pts[j].1));
        let (d01, d10, d12, d02) = (d(0, 1)?, d(1, 0)?, d(1, 2)?, d(0, 2)?);
        let scale = d01 + d12 + d02;
        w.push(1e-12 * scale - (d01 - d10).abs());
        w.push(d01 + d12 + 1e-12 * scale - d02);
        w.push(-d(0, 0)?.abs());
        // distinct parameters are at positive distance
        w.push(if d01 > 0.0 { 0.0 } else { -1.0 });
    }
    Ok((t, w.0))
}

fn figure1_small() -> Figure1Config {
    Figure1Config {
        l_max: 4,
        grid_size: 16,
        refine_iters: 3,
        ..Figure1Config::default()
    }
}

fn figure1_deterministic(_: &mut SeededRng, _: &SuiteConfig) -> Result<(usize, f64)> {
    let a = figure1(&figure1_small())?.to_csv();
    let b = figure1(&figure1_small())?.to_csv();
    Ok((2, if a == b { 0.0 } else { -1.0 }))
}

fn refinement_never_decreases(_: &mut SeededRng, _: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let r = figure1(&figure1_small())?;
    for row in &r.rows {
        w.push(row.lower_bound - row.grid_max);
    }
    Ok((r.rows.len(), w.0))
}

fn a_ratio_below_k(_: &mut SeededRng, _: &SuiteConfig) -> Result<(usize, f64)> {
    let mut w = Worst::new();
    let r = figure1(&figure1_small())?;
    for row in &r.rows {
        w.push(1.0 + 1e-9 - row.a_ratio / row.k_l);
        w.push(1.0 + 1e-9 - row.lower_bound / row.k_l);
    }
    Ok((r.rows.len(), w.0))
}

fn dataset_reproducible(rng: &mut SeededRng, _: &SuiteConfig) -> Result<(usize, f64)> {
    let seed = rng.index(1 << 30) as u64;
    let params = DatasetParams {
        n: 8,
        k: 2,
        m: 4,
        s: 2,
        delta: 0.1,
        c_in: 1.0,
        weights: WeightsKind::Random,
    };
    let render = |seed| -> Result<String> {
        let ds = generate_dataset(&mut SeededRng::new(seed), &params)?;
        Ok(format!(
            "{}{}{}{}{}",
            toml::to_string(&ds.meta()).map_err(|e| crate::error::Error::Format(e.to_string()))?,
            matio::format_complex_matrix(ds.phi0.matrix()),
            matio::format_complex_matrix(&ds.z),
            matio::format_complex_matrix(&ds.psi),
            matio::format_real_matrix(&ds.g)
        ))
    };
    Ok((2, if render(seed)? == render(seed)? { 0.0 } else { -1.0 }))
}
