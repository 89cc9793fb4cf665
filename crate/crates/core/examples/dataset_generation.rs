use ewunfold::exper::dataset::{generate_dataset, Dataset, DatasetParams, WeightsKind};
use ewunfold::SeededRng;

fn main() -> ewunfold::Result<()> {
    let params = DatasetParams {
        weights: WeightsKind::Random,
        ..DatasetParams::default()
    };
    let ds = generate_dataset(&mut SeededRng::new(9), &params)?;
    let dir = std::env::temp_dir().join("ewunfold-dataset-example");
    ds.save(&dir)?;
    let back = Dataset::load(&dir)?;
    println!("saved to {}", dir.display());
    println!("N={} K={} m={} s={}", back.params.n, back.params.k, back.params.m, back.params.s);
    println!("unitarity defect of Φ0: {:.2e}", back.phi0.unitarity_defect());
    println!("max |G| difference after reload: {:.2e}", (&back.g - &ds.g).amax());
    Ok(())
}
