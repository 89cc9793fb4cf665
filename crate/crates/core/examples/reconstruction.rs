use ewunfold::exper::dataset::{generate_dataset, DatasetParams};
use ewunfold::unroll::{pga_reconstruct, InitMode, PgaConfig};
use ewunfold::{Nonlinearity, Regularizer, SeededRng};

fn main() -> ewunfold::Result<()> {
    let params = DatasetParams {
        m: 4,
        ..DatasetParams::default()
    };
    let ds = generate_dataset(&mut SeededRng::new(42), &params)?;
    for init in [InitMode::Spectral, InitMode::FixedUnitVector] {
        let cfg = PgaConfig {
            step: 0.9 * ds.ensemble.max_step(),
            max_iters: 500,
            reg: Regularizer::None,
            nonlin: Nonlinearity::pseudo_huber(params.delta)?,
            init,
            power: Default::default(),
        };
        for j in 0..params.m {
            let g = ds.g.column(j).into_owned();
            let rec = pga_reconstruct(&ds.ensemble, &g, &ds.phi0, &cfg)?;
            println!(
                "{:>8} sample {j}: data term {:.2e} -> {:.2e}",
                init.label(),
                rec.data_term[0],
                rec.data_term.last().unwrap()
            );
        }
    }
    Ok(())
}
