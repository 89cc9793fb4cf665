//! Runs the unrolled network on a generated dataset and compares two
//! nearby dictionaries against the perturbation constant.

use ewunfold::bounds::{bound_constants, BoundInputs};
use ewunfold::exper::dataset::{generate_dataset, DatasetParams};
use ewunfold::linalg::{ComplexMatrix, C64};
use ewunfold::unroll::unroll;
use ewunfold::{Nonlinearity, SeededRng, UnitaryMatrix, UnrollConfig};

fn main() -> ewunfold::Result<()> {
    let mut rng = SeededRng::new(5);
    let ds = generate_dataset(&mut rng, &DatasetParams::default())?;
    let e = &ds.ensemble;
    let n = e.n();

    let h = rng.complex_gaussian_matrix(n, n);
    let skew: ComplexMatrix = (&h - h.adjoint()) * C64::new(1e-3, 0.0);
    let phi2 = UnitaryMatrix::new(ds.phi0.matrix() * skew.exp())?;
    let dist = e.dictionary_distance(&ds.phi0, &phi2)?;

    for depth in [1, 2, 4, 8] {
        let cfg = UnrollConfig::constant(e, depth, 0.9, Nonlinearity::pseudo_huber(ds.params.delta)?);
        let a = unroll(e, &ds.phi0, &ds.g, &cfg)?;
        let b = unroll(e, &phi2, &ds.g, &cfg)?;
        let k = bound_constants(&BoundInputs::from_run(e, &ds.g, &cfg, 0.05))?;
        println!(
            "L={depth}  ‖Δcodes‖={:.3e}  K_L·d={:.3e}",
            (a.codes - b.codes).norm(),
            k.k_l() * dist
        );
    }
    Ok(())
}
