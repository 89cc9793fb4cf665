//! Worst-case perturbation ratio over pairs of 2x2 rotations, by depth.

use ewunfold::exper::figure1::{figure1, Figure1Config};

fn main() -> ewunfold::Result<()> {
    let r = figure1(&Figure1Config::default())?;
    for row in &r.rows {
        println!(
            "L={}  lower={:.4e}  K_L={:.4e}  θ=({:.4}, {:.4})",
            row.depth, row.lower_bound, row.k_l, row.theta1, row.theta2
        );
    }
    let (slope, r2) = r.log_linear_fit();
    println!("slope of ln(lower bound) per layer {slope:.3}, R² {r2:.5}");
    Ok(())
}
