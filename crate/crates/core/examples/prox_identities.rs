use ewunfold::linalg::C64;
use ewunfold::PseudoHuber;

fn main() -> ewunfold::Result<()> {
    let h = PseudoHuber::new(0.5)?;
    println!("{:>18} {:>18} {:>18} {:>10}", "z", "prox", "prox*", "|moreau|");
    for z in [C64::new(0.1, 0.0), C64::new(1.0, -1.0), C64::new(-3.0, 4.0), C64::new(0.0, 20.0)] {
        let (p, q) = (h.prox(z), h.prox_conjugate(z));
        println!(
            "{:>18} {:>18} {:>18} {:>10.2e}",
            format!("{:.3}", z),
            format!("{:.4}", p),
            format!("{:.4}", q),
            (p + q - z).norm()
        );
    }
    Ok(())
}
