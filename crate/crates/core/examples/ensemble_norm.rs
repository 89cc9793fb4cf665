//! Operator norm of a measurement ensemble: closed form vs dense SVD.

use ewunfold::linalg::spectral_norm;
use ewunfold::{MeasurementEnsemble, SeededRng};

fn main() -> ewunfold::Result<()> {
    let mut rng = SeededRng::new(3);
    for (n, k) in [(4, 1), (8, 2), (16, 3)] {
        let e = MeasurementEnsemble::random(&mut rng, n, k)?;
        let dense = spectral_norm(&e.to_dense());
        println!(
            "N={n:2} K={k}  ‖A‖={:.12}  svd={dense:.12}  max step={:.6}",
            e.norm(),
            e.max_step()
        );
    }
    let d = MeasurementEnsemble::defocus(16, 3, 0.75)?;
    println!("defocus series: ‖A‖={:.6}", d.norm());
    Ok(())
}
