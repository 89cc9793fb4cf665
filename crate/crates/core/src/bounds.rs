//! Closed-form perturbation constants and generalization bounds.
//!
//! For step sizes `τ_ℓ` with `τ_ℓ‖A‖²/KN ≤ 1`:
//!
//! ```text
//! γ   = 1 + ‖G‖_∞ · Lip(φ')                 (= 1 + ‖G‖_∞/δ for pseudo-Huber)
//! T_ℓ = Σ_{k<ℓ} τ_k
//! B_ℓ = (2τ_ℓ/KN) ‖A‖ (√m + (T_ℓ/KN) ‖A‖ ‖G‖_∞)
//! K_L = Σ_{ℓ<L} γ^{L−ℓ} B_ℓ,    K_{L+1} = γ (K_L + B_L)
//! M_L = √m + (T_L/KN) ‖A‖ ‖G‖_∞,   M'_L = K_L
//! ```
//!
//! `K_L` grows like `γ^L`, so it is carried both linearly (may overflow to
//! infinity) and as a natural logarithm. Every bound downstream of `K_L` is
//! evaluated from the logarithm.

use serde::Serialize;

use crate::ensemble::MeasurementEnsemble;
use crate::error::{dim_check, Error, Result};
use crate::linalg::{max_abs, ComplexMatrix, RealMatrix};
use crate::nonlin::Nonlinearity;
use crate::unitary::UnitaryMatrix;
use crate::unroll::UnrollConfig;

/// `KN / ‖A‖²`.
pub fn max_step(e: &MeasurementEnsemble) -> f64 {
    e.max_step()
}

/// True iff every step satisfies `τ ≤ KN/‖A‖²`.
pub fn check_assumption1(taus: &[f64], e: &MeasurementEnsemble) -> bool {
    let m = max_step(e);
    taus.iter().all(|t| *t <= m)
}

/// `γ = 1 + ‖G‖_∞ · Lip(φ')`.
pub fn gamma(nonlin: &Nonlinearity, g_inf: f64) -> f64 {
    1.0 + g_inf * nonlin.derivative_lipschitz()
}

/// Everything the closed-form constants depend on.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub norm_a: f64,
    pub g_inf: f64,
    pub taus: Vec<f64>,
    pub nonlin: Nonlinearity,
    pub c_in: f64,
    pub c_out: f64,
    pub alpha: f64,
}

impl BoundInputs {
    pub fn from_run(e: &MeasurementEnsemble, g: &RealMatrix, cfg: &UnrollConfig, alpha: f64) -> Self {
        Self {
            n: e.n(),
            k: e.k(),
            m: g.ncols(),
            norm_a: e.norm(),
            g_inf: max_abs(g),
            taus: cfg.taus.clone(),
            nonlin: cfg.nonlin,
            c_in: cfg.clip.c_in(),
            c_out: cfg.clip.c_out(),
            alpha,
        }
    }

    fn rows(&self) -> f64 {
        (self.k * self.n) as f64
    }

    pub fn max_step(&self) -> f64 {
        self.rows() / (self.norm_a * self.norm_a)
    }

    pub fn assumption1_ok(&self) -> bool {
        let m = self.max_step();
        self.taus.iter().all(|t| *t <= m)
    }
}

/// The perturbation constants of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Constants {
    pub gamma: f64,
    /// `T_0, …, T_L`.
    pub t_cumsum: Vec<f64>,
    /// `B_0, …, B_{L−1}`.
    pub b: Vec<f64>,
    /// `K_0 = 0, K_1, …, K_L` from the recursion.
    pub k_seq: Vec<f64>,
    /// `ln K_L` (−∞ when `L = 0`).
    pub log_k_l: f64,
    pub m_l: f64,
}

impl Constants {
    pub fn depth(&self) -> usize {
        self.b.len()
    }

    pub fn k_l(&self) -> f64 {
        *self.k_seq.last().expect("K_0 always present")
    }

    pub fn m_l_prime(&self) -> f64 {
        self.k_l()
    }

    pub fn k_l_overflow(&self) -> bool {
        !self.k_l().is_finite()
    }
}

/// `ln Σ exp(x_i)`.
fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 35.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub fn bound_constants(inputs: &BoundInputs) -> Result<Constants> {
    if inputs.m == 0 || inputs.n == 0 || inputs.k == 0 {
        return Err(Error::InvalidParameter("N, K and m must be at least 1".into()));
    }
    if let Some(t) = inputs.taus.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter(format!("step sizes must be positive, got {t}")));
    }
    let max_step = inputs.max_step();
    if let Some((stage, &tau)) = inputs.taus.iter().enumerate().find(|(_, t)| !(**t <= max_step)) {
        return Err(Error::StepTooLarge { stage, tau, max_step });
    }
    let rows = inputs.rows();
    let sqrt_m = (inputs.m as f64).sqrt();
    let gamma = gamma(&inputs.nonlin, inputs.g_inf);

    let mut t_cumsum = Vec::with_capacity(inputs.taus.len() + 1);
    let mut t = 0.0;
    t_cumsum.push(t);
    for tau in &inputs.taus {
        t += tau;
        t_cumsum.push(t);
    }
    let b: Vec<f64> = inputs
        .taus
        .iter()
        .zip(&t_cumsum)
        .map(|(tau, t_l)| {
            2.0 * tau / rows * inputs.norm_a * (sqrt_m + t_l / rows * inputs.norm_a * inputs.g_inf)
        })
        .collect();

    let mut k_seq = Vec::with_capacity(b.len() + 1);
    let mut k = 0.0;
    k_seq.push(k);
    for b_l in &b {
        k = gamma * (k + b_l);
        k_seq.push(k);
    }

    let depth = b.len();
    let ln_gamma = gamma.ln();
    let terms: Vec<f64> = b
        .iter()
        .enumerate()
        .map(|(l, b_l)| (depth - l) as f64 * ln_gamma + b_l.ln())
        .collect();
    let log_k_l = log_sum_exp(&terms);
    let t_l = *t_cumsum.last().expect("T_0 present");
    let m_l = sqrt_m + t_l / rows * inputs.norm_a * inputs.g_inf;

    Ok(Constants {
        gamma,
        t_cumsum,
        b,
        k_seq,
        log_k_l,
        m_l,
    })
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("covering radius must be positive, got {eps}")))
    }
}

/// Upper bound on `ln N(M₂, ‖·‖_F, ε)`:
/// `2N² ln(1 + 4M_L/ε) + 2KN² ln(1 + 4M'_L‖A‖/ε)`.
pub fn covering_log(eps: f64, n: usize, k: usize, m_l: f64, m_l_prime: f64, norm_a: f64) -> Result<f64> {
    covering_log_ln(eps, n, k, m_l, m_l_prime.ln(), norm_a)
}

/// [`covering_log`] with `M'_L` passed as its logarithm.
pub fn covering_log_ln(eps: f64, n: usize, k: usize, m_l: f64, ln_m_l_prime: f64, norm_a: f64) -> Result<f64> {
    check_eps(eps)?;
    let n2 = (n * n) as f64;
    let first = 2.0 * n2 * (4.0 * m_l / eps).ln_1p();
    let second = 2.0 * k as f64 * n2 * softplus((4.0 * norm_a / eps).ln() + ln_m_l_prime);
    Ok(first + second)
}

/// Bound on the Rademacher complexity of the loss class:
/// `4C_out N/√m [√ln(e(1 + 8M_L/(√m C_out))) + √K √ln(e(1 + 8‖A‖M'_L/(√m C_out)))]`.
pub fn rademacher_bound(n: usize, k: usize, m: usize, c_out: f64, m_l: f64, m_l_prime: f64, norm_a: f64) -> f64 {
    rademacher_bound_ln(n, k, m, c_out, m_l, m_l_prime.ln(), norm_a)
}

/// [`rademacher_bound`] with `M'_L` passed as its logarithm.
pub fn rademacher_bound_ln(
    n: usize,
    k: usize,
    m: usize,
    c_out: f64,
    m_l: f64,
    ln_m_l_prime: f64,
    norm_a: f64,
) -> f64 {
    let sqrt_m = (m as f64).sqrt();
    let scale = sqrt_m * c_out;
    let first = (1.0 + (8.0 * m_l / scale).ln_1p()).sqrt();
    let second = (1.0 + softplus((8.0 * norm_a / scale).ln() + ln_m_l_prime)).sqrt();
    4.0 * c_out * n as f64 / sqrt_m * (first + (k as f64).sqrt() * second)
}

/// `2R + 4(C_in + C_out) √(2 ln(4/α) / m)`.
pub fn generalization_bound(rademacher: f64, m: usize, c_in: f64, c_out: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("confidence level α must lie in (0, 1), got {alpha}")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    Ok(2.0 * rademacher + 4.0 * (c_in + c_out) * (2.0 * (4.0 / alpha).ln() / m as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub n: usize,
    pub k: usize,
    pub depth: usize,
    pub m: usize,
    pub nonlinearity: String,
    pub delta: Option<f64>,
    pub norm_a: f64,
    pub g_inf: f64,
    pub c_in: f64,
    pub c_out: f64,
    pub alpha: f64,
    pub taus: Vec<f64>,
    pub dft: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringPoint {
    pub eps: f64,
    pub log_n: f64,
}

/// All constants and bounds for one configuration, serialisable as TOML.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub assumption1_ok: bool,
    pub max_step: f64,
    pub gamma: f64,
    pub t_cumsum: Vec<f64>,
    pub b: Vec<f64>,
    pub k_l: f64,
    pub log_k_l: f64,
    pub k_l_overflow: bool,
    pub m_l: f64,
    pub m_l_prime: f64,
    pub rademacher: f64,
    pub gen_bound: f64,
    pub covering: Vec<CoveringPoint>,
    pub provenance: Provenance,
}

impl BoundReport {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report fields are TOML-representable")
    }
}

/// Radii at which the covering bound is tabulated, as fractions of the
/// Dudley integration limit `√m C_out / 2`.
pub const COVERING_FRACTIONS: [f64; 6] = [1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0];

pub fn bound_report(inputs: &BoundInputs) -> Result<BoundReport> {
    let c = bound_constants(inputs)?;
    let rademacher = rademacher_bound_ln(
        inputs.n,
        inputs.k,
        inputs.m,
        inputs.c_out,
        c.m_l,
        c.log_k_l,
        inputs.norm_a,
    );
    let gen_bound = generalization_bound(rademacher, inputs.m, inputs.c_in, inputs.c_out, inputs.alpha)?;
    let limit = (inputs.m as f64).sqrt() * inputs.c_out / 2.0;
    let covering = COVERING_FRACTIONS
        .iter()
        .map(|f| {
            let eps = f * limit;
            covering_log_ln(eps, inputs.n, inputs.k, c.m_l, c.log_k_l, inputs.norm_a)
                .map(|log_n| CoveringPoint { eps, log_n })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport {
        assumption1_ok: inputs.assumption1_ok(),
        max_step: inputs.max_step(),
        gamma: c.gamma,
        t_cumsum: c.t_cumsum.clone(),
        b: c.b.clone(),
        k_l: c.k_l(),
        log_k_l: c.log_k_l,
        k_l_overflow: c.k_l_overflow(),
        m_l: c.m_l,
        m_l_prime: c.m_l_prime(),
        rademacher,
        gen_bound,
        covering,
        provenance: Provenance {
            n: inputs.n,
            k: inputs.k,
            depth: inputs.taus.len(),
            m: inputs.m,
            nonlinearity: inputs.nonlin.label(),
            delta: inputs.nonlin.delta(),
            norm_a: inputs.norm_a,
            g_inf: inputs.g_inf,
            c_in: inputs.c_in,
            c_out: inputs.c_out,
            alpha: inputs.alpha,
            taus: inputs.taus.clone(),
            dft: crate::ensemble::DFT_CONVENTION.to_string(),
        },
    })
}

/// One row of a depth sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub depth: usize,
    pub m_l: f64,
    pub k_l: f64,
    pub log_k_l: f64,
    pub gen_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingSummary {
    pub rows: Vec<ScalingRow>,
    pub gamma: f64,
    /// Least-squares slope of `ln K_L` against `L`.
    pub log_k_slope: f64,
    /// `|slope − ln γ| / ln γ` (infinite when `γ = 1`).
    pub log_k_slope_rel_error: f64,
    /// Largest absolute residual of an affine fit of `M_L` against `L`.
    pub m_l_affine_residual: f64,
}

/// Least-squares line through `(x_i, y_i)`; returns `(slope, intercept, r²)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, intercept, r2)
}

/// Sweeps the depth over `depths` with the constant step `tau`, holding
/// everything else in `base` fixed (its `taus` are ignored).
pub fn scaling_summary(depths: &[usize], tau: f64, base: &BoundInputs) -> Result<ScalingSummary> {
    if depths.is_empty() {
        return Err(Error::InvalidParameter("depth range must be nonempty".into()));
    }
    let mut rows = Vec::with_capacity(depths.len());
    let mut gamma_v = gamma(&base.nonlin, base.g_inf);
    for &depth in depths {
        let inputs = BoundInputs {
            taus: vec![tau; depth],
            ..base.clone()
        };
        let report = bound_report(&inputs)?;
        gamma_v = report.gamma;
        rows.push(ScalingRow {
            depth,
            m_l: report.m_l,
            k_l: report.k_l,
            log_k_l: report.log_k_l,
            gen_bound: report.gen_bound,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.depth as f64).collect();
    let logs: Vec<f64> = rows.iter().map(|r| r.log_k_l).collect();
    let (log_k_slope, _, _) = if rows.len() >= 2 && logs.iter().all(|v| v.is_finite()) {
        linear_fit(&xs, &logs)
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    let ln_gamma = gamma_v.ln();
    let log_k_slope_rel_error = if ln_gamma > 0.0 {
        (log_k_slope - ln_gamma).abs() / ln_gamma
    } else {
        f64::INFINITY
    };
    let ms: Vec<f64> = rows.iter().map(|r| r.m_l).collect();
    let (s, c, _) = linear_fit(&xs, &ms);
    let m_l_affine_residual = xs
        .iter()
        .zip(&ms)
        .map(|(x, m)| (m - (s * x + c)).abs())
        .fold(0.0, f64::max);
    Ok(ScalingSummary {
        rows,
        gamma: gamma_v,
        log_k_slope,
        log_k_slope_rel_error,
        m_l_affine_residual,
    })
}

/// Per-sample losses `‖ψ̂_j − ψ_j‖₂`.
pub fn sample_losses(outputs: &ComplexMatrix, truths: &ComplexMatrix) -> Result<Vec<f64>> {
    dim_check(outputs.shape() == truths.shape(), || {
        format!("outputs are {:?} but truths are {:?}", outputs.shape(), truths.shape())
    })?;
    Ok(outputs
        .column_iter()
        .zip(truths.column_iter())
        .map(|(a, b)| (a - b).norm())
        .collect())
}

/// `(1/m) Σ_j ‖ψ̂_j − ψ_j‖₂`.
pub fn empirical_risk(outputs: &ComplexMatrix, truths: &ComplexMatrix) -> Result<f64> {
    let losses = sample_losses(outputs, truths)?;
    if losses.is_empty() {
        return Err(Error::Dimension("empirical risk needs at least one sample".into()));
    }
    Ok(losses.iter().sum::<f64>() / losses.len() as f64)
}

/// The parameter-space metric
/// `d((Φ₁,Ψ₁),(Φ₂,Ψ₂)) = M_L‖Ψ₁ − Ψ₂‖ + M'_L‖AΦ₁ − AΦ₂‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterMetric {
    pub m_l: f64,
    pub m_l_prime: f64,
}

impl ParameterMetric {
    pub fn distance(
        &self,
        e: &MeasurementEnsemble,
        (phi1, psi1): (&UnitaryMatrix, &UnitaryMatrix),
        (phi2, psi2): (&UnitaryMatrix, &UnitaryMatrix),
    ) -> Result<f64> {
        let d_psi = crate::linalg::spectral_norm(&(psi1.matrix() - psi2.matrix()));
        let d_phi = e.dictionary_distance(phi1, phi2)?;
        Ok(self.m_l * d_psi + self.m_l_prime * d_phi)
    }
}
