//! Numerical lower bound on the dictionary-Lipschitz constant of the
//! unrolled network for `N = 2`, `K = 1`.
//!
//! For every depth `L` the ratio
//!
//! ```text
//! r(Φ₁, Φ₂) = ‖f^L_{Φ₁}(g) − f^L_{Φ₂}(g)‖ / ‖Φ₁ − Φ₂‖
//! ```
//!
//! is maximised over pairs of rotations `Φ(θ)`: first on a uniform grid over
//! `[0, 2π)²`, then by rounds of coordinate-wise golden-section search around
//! the grid argmax. The maximum is a lower bound on the best constant in the
//! perturbation estimate and must stay below `K_L`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::bounds::{bound_constants, BoundInputs};
use crate::ensemble::MeasurementEnsemble;
use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, ComplexVector, RealMatrix, RealVector};
use crate::matio::fmt_f64;
use crate::nonlin::Nonlinearity;
use crate::prox::Regularizer;
use crate::rng::SeededRng;
use crate::unitary::UnitaryMatrix;
use crate::unroll::{unroll_column_trace, UnrollConfig, DEFAULT_STEP_SCALE};

/// Pairs closer than this are excluded from the grid.
pub const MIN_SEPARATION: f64 = 1e-8;
/// Golden-section iterations per coordinate line search.
const LINE_SEARCH_ITERS: usize = 40;

/// Which dictionaries are searched over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchSpace {
    /// Real rotations, two parameters `(θ₁, θ₂)`.
    #[default]
    Rotations,
    /// All of U(2), eight parameters, refined from the rotation optimum.
    Unitary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure1Config {
    pub l_max: usize,
    /// Measurement vector of length 2.
    pub g: RealVector,
    pub delta: f64,
    pub reg: Regularizer,
    pub grid_size: usize,
    pub refine_iters: usize,
    pub step_scale: f64,
    pub space: SearchSpace,
}

/// `g` with i.i.d. uniform `[0, 1]` entries from `seed`, rescaled so its
/// largest entry is one.
pub fn default_measurement(seed: u64) -> RealVector {
    let mut rng = SeededRng::new(seed);
    let g = RealVector::from_fn(2, |_, _| rng.uniform(0.0, 1.0));
    let max = g.amax();
    g / max
}

impl Default for Figure1Config {
    fn default() -> Self {
        Self {
            l_max: 8,
            g: default_measurement(42),
            delta: 0.1,
            reg: Regularizer::None,
            grid_size: 64,
            refine_iters: 20,
            step_scale: DEFAULT_STEP_SCALE,
            space: SearchSpace::Rotations,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure1Row {
    pub depth: usize,
    /// Largest ratio found, denominator `‖Φ₁ − Φ₂‖`.
    pub lower_bound: f64,
    /// Largest ratio on the grid alone.
    pub grid_max: f64,
    pub theta1: f64,
    pub theta2: f64,
    /// Full parameter vector of the maximiser (equal to `[θ₁, θ₂]` for
    /// rotations).
    pub params: Vec<f64>,
    /// The ratio at the maximiser with denominator `‖AΦ₁ − AΦ₂‖`.
    pub a_ratio: f64,
    pub k_l: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure1Result {
    pub rows: Vec<Figure1Row>,
    pub config: Figure1Config,
    pub tau: f64,
    pub gamma: f64,
}

impl Figure1Result {
    pub fn lower_bounds(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.lower_bound).collect()
    }

    /// Least-squares fit of `ln(lower_bound)` against `L`: `(slope, r²)`.
    pub fn log_linear_fit(&self) -> (f64, f64) {
        let xs: Vec<f64> = self.rows.iter().map(|r| r.depth as f64).collect();
        let ys: Vec<f64> = self.rows.iter().map(|r| r.lower_bound.ln()).collect();
        let (slope, _, r2) = crate::bounds::linear_fit(&xs, &ys);
        (slope, r2)
    }

    pub fn provenance(&self) -> Vec<(String, String)> {
        let c = &self.config;
        vec![
            ("command".into(), "figure1".into()),
            ("N".into(), "2".into()),
            ("K".into(), "1".into()),
            ("l_max".into(), c.l_max.to_string()),
            ("g".into(), c.g.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(";")),
            ("delta".into(), fmt_f64(c.delta)),
            ("regularizer".into(), c.reg.label()),
            ("grid_size".into(), c.grid_size.to_string()),
            ("refine_iters".into(), c.refine_iters.to_string()),
            ("tau".into(), fmt_f64(self.tau)),
            ("gamma".into(), fmt_f64(self.gamma)),
            ("space".into(), format!("{:?}", c.space).to_lowercase()),
            ("init".into(), "fixed_unit_vector".into()),
            ("dft".into(), crate::ensemble::DFT_CONVENTION.into()),
        ]
    }

    /// CSV with header `L,lower_bound,theta1,theta2,K_L`, preceded by
    /// `# key=value` provenance lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.provenance() {
            writeln!(out, "# {k}={v}").unwrap();
        }
        out.push_str("L,lower_bound,theta1,theta2,K_L\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.depth,
                fmt_f64(r.lower_bound),
                fmt_f64(r.theta1),
                fmt_f64(r.theta2),
                fmt_f64(r.k_l)
            )
            .unwrap();
        }
        out
    }
}

struct Problem<'a> {
    e: MeasurementEnsemble,
    g: &'a RealVector,
    cfg: UnrollConfig,
    space: SearchSpace,
}

impl Problem<'_> {
    fn dictionaries(&self, p: &[f64]) -> (UnitaryMatrix, UnitaryMatrix) {
        match self.space {
            SearchSpace::Rotations => (UnitaryMatrix::rotation(p[0]), UnitaryMatrix::rotation(p[1])),
            SearchSpace::Unitary => (
                UnitaryMatrix::u2(p[0], p[1], p[2], p[3]),
                UnitaryMatrix::u2(p[4], p[5], p[6], p[7]),
            ),
        }
    }

    fn code(&self, phi: &UnitaryMatrix) -> Result<ComplexVector> {
        let (mut trace, _) = unroll_column_trace(&self.e, phi, self.g, &self.cfg)?;
        Ok(trace.pop().expect("nonempty trace"))
    }

    /// `(ratio, a_ratio)`; `None` for pairs closer than [`MIN_SEPARATION`].
    fn ratio(&self, p: &[f64]) -> Result<Option<(f64, f64)>> {
        let (phi1, phi2) = self.dictionaries(p);
        let denom = spectral_norm(&(phi1.matrix() - phi2.matrix()));
        if denom < MIN_SEPARATION {
            return Ok(None);
        }
        let num = (self.code(&phi1)? - self.code(&phi2)?).norm();
        let a_denom = self.e.dictionary_distance(&phi1, &phi2)?;
        Ok(Some((num / denom, num / a_denom)))
    }

    fn value(&self, p: &[f64]) -> Result<f64> {
        Ok(self.ratio(p)?.map_or(f64::NEG_INFINITY, |r| r.0))
    }
}

/// Golden-section maximisation of `f` on `[a, b]`; returns the best point
/// seen and its value.
fn golden_max(mut a: f64, mut b: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for _ in 0..LINE_SEARCH_ITERS {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
            if f1 > best.1 {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
    }
    Ok(best)
}

/// Coordinate-wise golden-section rounds in windows of half-width `h`.
/// Moves only on strict improvement, so the value never decreases.
fn refine(problem: &Problem<'_>, start: Vec<f64>, value: f64, h: f64, rounds: usize) -> Result<(Vec<f64>, f64)> {
    let mut p = start;
    let mut best = value;
    for _ in 0..rounds {
        for c in 0..p.len() {
            let centre = p[c];
            let mut q = p.clone();
            let (x, v) = golden_max(centre - h, centre + h, |x| {
                q[c] = x;
                problem.value(&q)
            })?;
            if v > best {
                p[c] = x;
                best = v;
            }
        }
    }
    Ok((p, best))
}

fn wrap_angle(x: f64) -> f64 {
    x.rem_euclid(TAU)
}

/// Runs the depth sweep `L = 1..=l_max`.
pub fn figure1(config: &Figure1Config) -> Result<Figure1Result> {
    if config.g.len() != 2 {
        return Err(Error::Dimension(format!(
            "rotation mode needs N = 2, K = 1 (measurement length 2), got length {}",
            config.g.len()
        )));
    }
    if config.grid_size < 2 {
        return Err(Error::InvalidParameter("grid size must be at least 2".into()));
    }
    if let Some(v) = config.g.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(Error::InvalidParameter(format!("measurements must be nonnegative, got {v}")));
    }
    let e = MeasurementEnsemble::unit(2, 1)?;
    let nonlin = Nonlinearity::pseudo_huber(config.delta)?;
    let base = UnrollConfig {
        reg: config.reg,
        ..UnrollConfig::constant(&e, config.l_max, config.step_scale, nonlin)
    };
    base.validate(&e)?;
    let tau = base.taus.first().copied().unwrap_or(config.step_scale * e.max_step());
    let g_mat = RealMatrix::from_column_slice(2, 1, config.g.as_slice());
    let consts = bound_constants(&BoundInputs::from_run(&e, &g_mat, &base, 0.05))?;

    // f^0..f^{l_max} for every grid angle
    let n = config.grid_size;
    let angles: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
    let traces = angles
        .iter()
        .map(|&t| unroll_column_trace(&e, &UnitaryMatrix::rotation(t), &config.g, &base).map(|r| r.0))
        .collect::<Result<Vec<_>>>()?;
    let dists: Vec<Vec<f64>> = angles
        .iter()
        .map(|&a| {
            angles
                .iter()
                .map(|&b| spectral_norm(&(UnitaryMatrix::rotation(a).into_inner() - UnitaryMatrix::rotation(b).into_inner())))
                .collect()
        })
        .collect();

    let mut rows = Vec::with_capacity(config.l_max);
    for depth in 1..=config.l_max {
        let mut grid_best = (f64::NEG_INFINITY, 0, 0);
        for i in 0..n {
            for j in 0..n {
                let d = dists[i][j];
                if d < MIN_SEPARATION {
                    continue;
                }
                let r = (&traces[i][depth] - &traces[j][depth]).norm() / d;
                // strict comparison keeps the lexicographically smallest pair
                if r > grid_best.0 {
                    grid_best = (r, i, j);
                }
            }
        }
        let (grid_max, i, j) = grid_best;
        let problem = Problem {
            e: e.clone(),
            g: &config.g,
            cfg: UnrollConfig {
                taus: vec![tau; depth],
                ..base.clone()
            },
            space: SearchSpace::Rotations,
        };
        let h = TAU / n as f64;
        let start = vec![angles[i], angles[j]];
        let start_value = problem.value(&start)?;
        let (mut params, mut best) = refine(&problem, start, start_value, h, config.refine_iters)?;
        if config.space == SearchSpace::Unitary {
            let problem = Problem {
                space: SearchSpace::Unitary,
                ..problem
            };
            let lifted = vec![0.0, params[0], 0.0, 0.0, 0.0, params[1], 0.0, 0.0];
            let v = problem.value(&lifted)?;
            let (p, b) = refine(&problem, lifted, v, h, config.refine_iters)?;
            params = p;
            best = b;
            let (_, a_ratio) = problem.ratio(&params)?.expect("maximiser is separated");
            rows.push(Figure1Row {
                depth,
                lower_bound: best.max(grid_max),
                grid_max,
                theta1: wrap_angle(params[1]),
                theta2: wrap_angle(params[5]),
                params,
                a_ratio,
                k_l: consts.k_seq[depth],
            });
            continue;
        }
        // the grid point itself is the fallback if refinement found nothing better
        if best < grid_max {
            params = vec![angles[i], angles[j]];
            best = grid_max;
        }
        let (_, a_ratio) = problem.ratio(&params)?.expect("maximiser is separated");
        params.iter_mut().for_each(|p| *p = wrap_angle(*p));
        rows.push(Figure1Row {
            depth,
            lower_bound: best,
            grid_max,
            theta1: params[0],
            theta2: params[1],
            params,
            a_ratio,
            k_l: consts.k_seq[depth],
        });
    }
    Ok(Figure1Result {
        rows,
        config: config.clone(),
        tau,
        gamma: consts.gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Figure1Config {
        Figure1Config {
            l_max: 3,
            grid_size: 12,
            refine_iters: 2,
            ..Figure1Config::default()
        }
    }

    #[test]
    fn default_measurement_is_normalised() {
        let g = default_measurement(42);
        assert_eq!(g.amax(), 1.0);
        assert!(g.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn bounded_by_k_l_and_refinement_monotone() {
        let r = figure1(&small()).unwrap();
        assert_eq!(r.rows.len(), 3);
        for row in &r.rows {
            assert!(row.lower_bound >= row.grid_max);
            assert!(row.lower_bound >= 0.0);
            assert!(row.lower_bound <= row.k_l * (1.0 + 1e-9));
            assert!(row.a_ratio <= row.k_l * (1.0 + 1e-9));
        }
    }

    #[test]
    fn deterministic_csv() {
        let a = figure1(&small()).unwrap().to_csv();
        let b = figure1(&small()).unwrap().to_csv();
        assert_eq!(a, b);
        let header = a.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(header, "L,lower_bound,theta1,theta2,K_L");
        assert_eq!(a.lines().filter(|l| !l.starts_with('#')).count(), 4);
    }

    #[test]
    fn rejects_wrong_size() {
        let cfg = Figure1Config {
            g: RealVector::from_element(3, 0.5),
            ..small()
        };
        assert!(figure1(&cfg).is_err());
    }

    #[test]
    fn depth_zero_ratio_vanishes() {
        let e = MeasurementEnsemble::unit(2, 1).unwrap();
        let cfg = UnrollConfig::constant(&e, 0, 0.9, Nonlinearity::pseudo_huber(0.1).unwrap());
        let g = default_measurement(42);
        let problem = Problem {
            e,
            g: &g,
            cfg,
            space: SearchSpace::Rotations,
        };
        for (a, b) in [(0.0, 1.0), (0.3, 2.9), (4.0, 0.1)] {
            assert_eq!(problem.value(&[a, b]).unwrap(), 0.0);
        }
    }
}
