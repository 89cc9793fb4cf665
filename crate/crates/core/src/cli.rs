//! Command-line front end: `gen`, `reconstruct`, `bounds`, `figure1`, `check`.
//!
//! Every flag may also be given in a flat TOML file passed with `--config`;
//! flags win over file values and unknown file keys are rejected.
//!
//! Exit codes: 0 success, 1 usage, 2 invalid value, 3 step condition violated
//! in `bounds`, 4 property failure in `check`, 5 missing or unreadable path.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::bounds::{bound_report, BoundInputs};
use crate::error::Error;
use crate::exper::dataset::{generate_dataset, Dataset, DatasetParams, WeightsKind};
use crate::exper::figure1::{default_measurement, figure1, Figure1Config, SearchSpace};
use crate::exper::suite::{property_suite, SuiteConfig};
use crate::linalg::{ComplexMatrix, PowerIterationOptions};
use crate::matio::{self, fmt_f64};
use crate::nonlin::Nonlinearity;
use crate::prox::{ClipRadius, Regularizer};
use crate::rng::SeededRng;
use crate::unroll::{pga_reconstruct, AssumptionPolicy, InitMode, PgaConfig, UnrollConfig, DEFAULT_STEP_SCALE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ASSUMPTION: i32 = 3;
pub const EXIT_PROPERTY: i32 = 4;
pub const EXIT_PATH: i32 = 5;

/// Step scale used by `check --inject-fault`.
pub const FAULT_STEP_SCALE: f64 = 2.0;

#[derive(Debug, Parser)]
#[command(name = "ewunfold", about = "Unrolled phase-retrieval networks and their bounds")]
struct Cli {
    /// Flat TOML file with default values for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Generate a synthetic dataset directory.
    Gen(Flags),
    /// Reconstruct every sample of a dataset with proximal gradient descent.
    Reconstruct(Flags),
    /// Evaluate perturbation constants and generalization bounds.
    Bounds(Flags),
    /// Depth sweep of the dictionary-perturbation lower bound.
    Figure1(Flags),
    /// Run the invariant suite.
    Check(Flags),
}

/// All settings, shared by the flag parser and the config file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[command(allow_negative_numbers = true)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// Output path (directory for `gen` and `reconstruct`, file otherwise).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Dataset directory (`reconstruct`, `bounds`).
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Signal size N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of measurement blocks K.
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of samples m.
    #[arg(long)]
    pub m: Option<usize>,
    /// Nonzeros per code.
    #[arg(long)]
    pub s: Option<usize>,
    /// Pseudo-Huber scale.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub c_in: Option<f64>,
    #[arg(long)]
    pub c_out: Option<f64>,
    /// `defocus`, `unit` or `random`.
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long)]
    pub defocus_step: Option<f64>,
    /// Network depth L.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Step size as a fraction of KN/‖A‖².
    #[arg(long)]
    pub step_scale: Option<f64>,
    /// l1 weight; 0 disables the regularizer.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// `pseudo_huber` or `linear`.
    #[arg(long)]
    pub nonlinearity: Option<String>,
    /// `spectral` or `fixed`.
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Confidence level of the generalization bound.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub l_max: Option<usize>,
    #[arg(long)]
    pub grid_size: Option<usize>,
    #[arg(long)]
    pub refine_iters: Option<usize>,
    /// Search over all of U(2) instead of rotations.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub unitary: Option<bool>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Run the suite with steps twice the admissible maximum.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub inject_fault: Option<bool>,
}

macro_rules! overlay {
    ($flags:expr, $file:expr, $($field:ident),*) => {
        Flags { $($field: $flags.$field.or($file.$field)),* }
    };
}

impl Flags {
    /// `self` with gaps filled from `file`.
    fn over(self, file: Flags) -> Flags {
        overlay!(
            self, file, out, data, seed, n, k, m, s, delta, c_in, c_out, weights, defocus_step, depth,
            step_scale, lambda, nonlinearity, init, max_iters, alpha, l_max, grid_size, refine_iters,
            unitary, trials, inject_fault
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub out: PathBuf,
    pub seed: u64,
    pub params: DatasetParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructConfig {
    pub data: PathBuf,
    pub out: PathBuf,
    pub step_scale: f64,
    pub max_iters: usize,
    pub reg: Regularizer,
    pub init: InitMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsConfig {
    pub data: PathBuf,
    pub out: PathBuf,
    pub depth: usize,
    pub step_scale: f64,
    pub linear: bool,
    pub c_out: Option<f64>,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure1Command {
    pub out: PathBuf,
    pub seed: u64,
    pub config: Figure1Config,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub out: Option<PathBuf>,
    pub suite: SuiteConfig,
}

/// A fully validated command.
#[derive(Debug, Clone, PartialEq)]
pub enum RunConfig {
    Gen(GenConfig),
    Reconstruct(ReconstructConfig),
    Bounds(BoundsConfig),
    Figure1(Figure1Command),
    Check(CheckConfig),
}

/// A failure with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Self::new(EXIT_INVALID, message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::StepTooLarge { .. } => EXIT_ASSUMPTION,
            Error::Io(_) => EXIT_PATH,
            _ => EXIT_INVALID,
        };
        Self::new(code, e.to_string())
    }
}

fn require_path(p: Option<PathBuf>, flag: &str) -> Result<PathBuf, Failure> {
    p.ok_or_else(|| Failure::new(EXIT_USAGE, format!("missing required path --{flag}")))
}

fn positive(name: &str, v: f64) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::invalid(format!("{name} must be positive, got {v}")))
    }
}

fn at_least_one(name: &str, v: usize) -> Result<usize, Failure> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(Failure::invalid(format!("{name} must be at least 1")))
    }
}

fn regularizer(lambda: Option<f64>) -> Result<Regularizer, Failure> {
    Ok(Regularizer::from_lambda(lambda.unwrap_or(0.0))?)
}

fn init_mode(s: Option<&str>, default: InitMode) -> Result<InitMode, Failure> {
    match s {
        None => Ok(default),
        Some("spectral") => Ok(InitMode::Spectral),
        Some("fixed") => Ok(InitMode::FixedUnitVector),
        Some(other) => Err(Failure::invalid(format!("init must be spectral or fixed, got {other:?}"))),
    }
}

fn weights_kind(name: Option<&str>, step: Option<f64>) -> Result<WeightsKind, Failure> {
    match name.unwrap_or("defocus") {
        "defocus" => Ok(match step {
            Some(step) => WeightsKind::Defocus { step },
            None => WeightsKind::default(),
        }),
        "unit" => Ok(WeightsKind::Unit),
        "random" => Ok(WeightsKind::Random),
        other => Err(Failure::invalid(format!("weights must be defocus, unit or random, got {other:?}"))),
    }
}

fn resolve(cmd: &str, f: Flags) -> Result<RunConfig, Failure> {
    if let Some(s) = f.step_scale {
        positive("step_scale", s)?;
    }
    Ok(match cmd {
        "gen" => {
            let d = DatasetParams::default();
            let params = DatasetParams {
                n: f.n.unwrap_or(d.n),
                k: f.k.unwrap_or(d.k),
                m: f.m.unwrap_or(d.m),
                s: f.s.unwrap_or(d.s),
                delta: f.delta.unwrap_or(d.delta),
                c_in: f.c_in.unwrap_or(d.c_in),
                weights: weights_kind(f.weights.as_deref(), f.defocus_step)?,
            };
            params.validate()?;
            RunConfig::Gen(GenConfig {
                out: require_path(f.out, "out")?,
                seed: f.seed.unwrap_or(42),
                params,
            })
        }
        "reconstruct" => RunConfig::Reconstruct(ReconstructConfig {
            data: require_path(f.data, "data")?,
            out: require_path(f.out, "out")?,
            step_scale: f.step_scale.unwrap_or(DEFAULT_STEP_SCALE),
            max_iters: f.max_iters.unwrap_or(500),
            reg: regularizer(f.lambda)?,
            init: init_mode(f.init.as_deref(), InitMode::Spectral)?,
        }),
        "bounds" => {
            let linear = match f.nonlinearity.as_deref() {
                None | Some("pseudo_huber") => false,
                Some("linear") => true,
                Some(other) => {
                    return Err(Failure::invalid(format!(
                        "nonlinearity must be pseudo_huber or linear, got {other:?}"
                    )))
                }
            };
            let alpha = f.alpha.unwrap_or(0.05);
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Failure::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
            }
            RunConfig::Bounds(BoundsConfig {
                data: require_path(f.data, "data")?,
                out: require_path(f.out, "out")?,
                depth: f.depth.unwrap_or(10),
                step_scale: f.step_scale.unwrap_or(DEFAULT_STEP_SCALE),
                linear,
                c_out: f.c_out.map(|c| positive("c_out", c)).transpose()?,
                alpha,
            })
        }
        "figure1" => {
            let seed = f.seed.unwrap_or(42);
            let config = Figure1Config {
                l_max: at_least_one("l_max", f.l_max.unwrap_or(8))?,
                g: default_measurement(seed),
                delta: positive("delta", f.delta.unwrap_or(0.1))?,
                reg: regularizer(f.lambda)?,
                grid_size: f.grid_size.unwrap_or(64),
                refine_iters: f.refine_iters.unwrap_or(20),
                step_scale: f.step_scale.unwrap_or(DEFAULT_STEP_SCALE),
                space: if f.unitary.unwrap_or(false) {
                    SearchSpace::Unitary
                } else {
                    SearchSpace::Rotations
                },
            };
            if config.grid_size < 2 {
                return Err(Failure::invalid("grid_size must be at least 2"));
            }
            if config.step_scale > 1.0 {
                return Err(Failure::invalid("figure1 needs step_scale ≤ 1"));
            }
            RunConfig::Figure1(Figure1Command {
                out: require_path(f.out, "out")?,
                seed,
                config,
            })
        }
        "check" => RunConfig::Check(CheckConfig {
            out: f.out,
            suite: SuiteConfig {
                seed: f.seed.unwrap_or(0),
                trials: at_least_one("trials", f.trials.unwrap_or(1000))?,
                step_scale: if f.inject_fault.unwrap_or(false) {
                    FAULT_STEP_SCALE
                } else {
                    f.step_scale.unwrap_or(DEFAULT_STEP_SCALE)
                },
            },
        }),
        other => return Err(Failure::new(EXIT_USAGE, format!("unknown command {other:?}"))),
    })
}

fn read_config_file(path: &Path) -> Result<Flags, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_PATH, format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::new(EXIT_USAGE, format!("config {}: {e}", path.display())))
}

/// Parses `argv` (including the program name) and the optional config file.
/// `Ok(None)` means help or version text was requested and printed.
pub fn parse_config<I, T>(argv: I) -> Result<Option<RunConfig>, Failure>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    Ok(None)
                }
                ErrorKind::ValueValidation | ErrorKind::InvalidValue => Err(Failure::invalid(e.to_string())),
                _ => Err(Failure::new(EXIT_USAGE, e.to_string())),
            };
        }
    };
    let file = match &cli.config {
        Some(p) => read_config_file(p)?,
        None => Flags::default(),
    };
    let (name, flags) = match cli.command {
        Cmd::Gen(f) => ("gen", f),
        Cmd::Reconstruct(f) => ("reconstruct", f),
        Cmd::Bounds(f) => ("bounds", f),
        Cmd::Figure1(f) => ("figure1", f),
        Cmd::Check(f) => ("check", f),
    };
    resolve(name, flags.over(file)).map(Some)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Failure::new(EXIT_PATH, format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, text).map_err(|e| Failure::new(EXIT_PATH, format!("{}: {e}", path.display())))
}

fn load_dataset(dir: &Path) -> Result<Dataset, Failure> {
    if !dir.is_dir() {
        return Err(Failure::new(EXIT_PATH, format!("dataset directory {} not found", dir.display())));
    }
    Ok(Dataset::load(dir)?)
}

fn provenance_lines(pairs: &[(String, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
}

/// `min_θ ‖x − e^{iθ} y‖`.
fn distance_up_to_phase(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    let inner = y.dotc(x).norm();
    (x.norm_squared() + y.norm_squared() - 2.0 * inner).max(0.0).sqrt()
}

fn run_gen(c: &GenConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let ds = generate_dataset(&mut SeededRng::new(c.seed), &c.params)?;
    ds.save(&c.out)?;
    writeln!(out, "wrote dataset to {}", c.out.display()).ok();
    Ok(())
}

fn run_reconstruct(c: &ReconstructConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let ds = load_dataset(&c.data)?;
    let e = &ds.ensemble;
    let cfg = PgaConfig {
        step: c.step_scale * e.max_step(),
        max_iters: c.max_iters,
        reg: c.reg,
        nonlin: Nonlinearity::pseudo_huber(ds.params.delta)?,
        init: c.init,
        power: PowerIterationOptions::default(),
    };
    let provenance = vec![
        ("command".to_string(), "reconstruct".to_string()),
        ("data".into(), c.data.display().to_string()),
        ("dataset_seed".into(), ds.seed.to_string()),
        ("delta".into(), fmt_f64(ds.params.delta)),
        ("step".into(), fmt_f64(cfg.step)),
        ("step_scale".into(), fmt_f64(c.step_scale)),
        ("max_iters".into(), c.max_iters.to_string()),
        ("regularizer".into(), c.reg.label()),
        ("init".into(), c.init.label().into()),
        ("dictionary".into(), "phi0".into()),
    ];
    let mut psi_hat = ComplexMatrix::zeros(e.n(), ds.params.m);
    let mut trace = provenance_lines(&provenance);
    trace.push_str("sample,iteration,objective,data_term\n");
    let mut summary = provenance_lines(&provenance);
    summary.push_str("sample,final_data_term,error_up_to_phase,init_fell_back\n");
    for j in 0..ds.params.m {
        let rec = pga_reconstruct(e, &ds.g.column(j).into_owned(), &ds.phi0, &cfg)?;
        for (i, (o, d)) in rec.objective.iter().zip(&rec.data_term).enumerate() {
            writeln!(trace, "{j},{i},{},{}", fmt_f64(*o), fmt_f64(*d)).unwrap();
        }
        let truth = ds.psi.column(j).into_owned();
        let err = distance_up_to_phase(&ComplexMatrix::from_column_slice(e.n(), 1, rec.psi.as_slice()), &ComplexMatrix::from_column_slice(e.n(), 1, truth.as_slice()));
        let last = *rec.data_term.last().expect("trace holds the initial value");
        writeln!(summary, "{j},{},{},{}", fmt_f64(last), fmt_f64(err), rec.init_fell_back).unwrap();
        psi_hat.set_column(j, &rec.psi);
        writeln!(out, "sample {j}: data term {last:.3e}, error up to phase {err:.3e}").ok();
    }
    fs::create_dir_all(&c.out).map_err(|e| Failure::new(EXIT_PATH, format!("{}: {e}", c.out.display())))?;
    write_file(&c.out.join("psi_hat"), &matio::format_complex_matrix_annotated(&psi_hat, &provenance))?;
    write_file(&c.out.join("objective.csv"), &trace)?;
    write_file(&c.out.join("summary.csv"), &summary)?;
    Ok(())
}

fn run_bounds(c: &BoundsConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let ds = load_dataset(&c.data)?;
    let e = &ds.ensemble;
    let nonlin = if c.linear {
        Nonlinearity::Linear
    } else {
        Nonlinearity::pseudo_huber(ds.params.delta)?
    };
    let clip = ClipRadius::new(ds.params.c_in, c.c_out.unwrap_or(ds.params.c_in))?;
    let cfg = UnrollConfig {
        clip,
        policy: AssumptionPolicy::Strict,
        ..UnrollConfig::constant(e, c.depth, c.step_scale, nonlin)
    };
    cfg.validate(e)?;
    let report = bound_report(&BoundInputs::from_run(e, &ds.g, &cfg, c.alpha))?;
    let mut text = provenance_lines(&[
        ("command".into(), "bounds".into()),
        ("data".into(), c.data.display().to_string()),
        ("dataset_seed".into(), ds.seed.to_string()),
        ("step_scale".into(), fmt_f64(c.step_scale)),
    ]);
    text.push_str(&report.to_toml());
    write_file(&c.out, &text)?;
    writeln!(
        out,
        "gamma {:.6}, log K_L {:.6}, M_L {:.6}, generalization bound {:.6}",
        report.gamma, report.log_k_l, report.m_l, report.gen_bound
    )
    .ok();
    Ok(())
}

fn run_figure1(c: &Figure1Command, out: &mut dyn Write) -> Result<(), Failure> {
    let result = figure1(&c.config)?;
    let mut text = provenance_lines(&[("seed".into(), c.seed.to_string())]);
    text.push_str(&result.to_csv());
    write_file(&c.out, &text)?;
    for r in &result.rows {
        writeln!(out, "L={} lower bound {:.6e} (K_L {:.6e})", r.depth, r.lower_bound, r.k_l).ok();
    }
    Ok(())
}

fn run_check(c: &CheckConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let report = property_suite(&c.suite);
    for e in &report.entries {
        let mark = if e.passed { "pass" } else { "FAIL" };
        writeln!(out, "{mark} {:<32} worst slack {:.3e}", e.name, e.worst_slack).ok();
    }
    if let Some(path) = &c.out {
        write_file(path, &report.to_toml())?;
    }
    if report.all_passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.failures().map(|e| e.name.as_str()).collect();
        Err(Failure::new(EXIT_PROPERTY, format!("failed properties: {}", failed.join(", "))))
    }
}

/// Executes a validated command, writing progress to `out`.
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), Failure> {
    match cfg {
        RunConfig::Gen(c) => run_gen(c, out),
        RunConfig::Reconstruct(c) => run_reconstruct(c, out),
        RunConfig::Bounds(c) => run_bounds(c, out),
        RunConfig::Figure1(c) => run_figure1(c, out),
        RunConfig::Check(c) => run_check(c, out),
    }
}

/// Parses and runs; returns the process exit code.
pub fn main_with_args<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let result = parse_config(argv).and_then(|cfg| match cfg {
        Some(cfg) => run(&cfg, out),
        None => Ok(()),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let msg = f.message.trim_end();
            let msg = msg.strip_prefix("error: ").unwrap_or(msg);
            writeln!(err, "error: {msg}").ok();
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Option<RunConfig>, Failure> {
        parse_config(std::iter::once("ewunfold").chain(args.iter().copied()))
    }

    #[test]
    fn check_flags() {
        let cfg = parse(&["check", "--seed", "1", "--trials", "1000"]).unwrap().unwrap();
        assert_eq!(
            cfg,
            RunConfig::Check(CheckConfig {
                out: None,
                suite: SuiteConfig {
                    seed: 1,
                    trials: 1000,
                    step_scale: DEFAULT_STEP_SCALE
                }
            })
        );
    }

    #[test]
    fn unknown_command_is_usage_error() {
        assert_eq!(parse(&["trane"]).unwrap_err().code, EXIT_USAGE);
    }

    #[test]
    fn distinct_codes() {
        assert_eq!(parse(&["figure1", "--delta", "abc"]).unwrap_err().code, EXIT_INVALID);
        assert_eq!(parse(&["figure1", "--out", "x", "--delta", "-1"]).unwrap_err().code, EXIT_INVALID);
        assert_eq!(parse(&["figure1"]).unwrap_err().code, EXIT_USAGE);
        assert_eq!(parse(&["bounds", "--out", "r"]).unwrap_err().code, EXIT_USAGE);
        assert_eq!(parse(&["figure1", "--config", "/nonexistent/cfg.toml"]).unwrap_err().code, EXIT_PATH);
    }

    #[test]
    fn flag_overrides_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        fs::write(&path, "delta = 1.0\nout = \"a.csv\"\nl_max = 3\n").unwrap();
        let p = path.to_str().unwrap();
        let cfg = parse(&["figure1", "--config", p, "--delta", "0.1"]).unwrap().unwrap();
        let RunConfig::Figure1(f) = cfg else { panic!() };
        assert_eq!(f.config.delta, 0.1);
        assert_eq!(f.config.l_max, 3);
        assert_eq!(f.out, PathBuf::from("a.csv"));
    }

    #[test]
    fn unknown_file_key_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        fs::write(&path, "deltaa = 1.0\n").unwrap();
        let err = parse(&["check", "--config", path.to_str().unwrap()]).unwrap_err();
        assert_eq!(err.code, EXIT_USAGE);
    }

    #[test]
    fn inject_fault_sets_large_step() {
        let cfg = parse(&["check", "--inject-fault"]).unwrap().unwrap();
        let RunConfig::Check(c) = cfg else { panic!() };
        assert_eq!(c.suite.step_scale, FAULT_STEP_SCALE);
    }
}
