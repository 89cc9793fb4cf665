//! Perturbation and generalization constants for a generated dataset,
//! for the pseudo-Huber stage and the linear stage.

use ewunfold::bounds::{bound_report, BoundInputs};
use ewunfold::exper::dataset::{generate_dataset, DatasetParams};
use ewunfold::{Nonlinearity, SeededRng, UnrollConfig};

fn main() -> ewunfold::Result<()> {
    let params = DatasetParams {
        m: 200,
        ..DatasetParams::default()
    };
    let ds = generate_dataset(&mut SeededRng::new(42), &params)?;
    for nonlin in [Nonlinearity::pseudo_huber(params.delta)?, Nonlinearity::Linear] {
        println!("# {}", nonlin.label());
        for depth in [2, 5, 10, 20] {
            let cfg = UnrollConfig::constant(&ds.ensemble, depth, 0.9, nonlin);
            let r = bound_report(&BoundInputs::from_run(&ds.ensemble, &ds.g, &cfg, 0.05))?;
            println!(
                "L={depth:2}  gamma={:.3}  log K_L={:8.3}  M_L={:.3}  gen={:.3e}",
                r.gamma, r.log_k_l, r.m_l, r.gen_bound
            );
        }
    }
    Ok(())
}
