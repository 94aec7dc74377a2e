// Hessians of the iterated phase: inverse, determinant, finite differences, signature.
//
// cargo run --release --example hessian_identities

use well_invariants::hessian::HessianData;
use well_invariants::verify::{hessian_rows, trig_identity_error};

pub fn run_example() -> well_invariants::Result<()> {
    let omega = [1.0, 2f64.sqrt()];
    let h = HessianData::compute(2, &omega, 0.6)?;
    println!("l=2, n=2, t=0.6: size {}, det {:.6e}, signature {}", h.matrix.nrows(), h.det, h.signature);

    println!("{:>2} {:>2} {:>9} {:>10} {:>10} {:>10} {:>4}", "l", "n", "t", "|HH⁻¹−I|", "det", "FD", "sgn");
    let rows = hessian_rows(&[1, 2, 3, 4], &[1, 2, 3], 3, 7)?;
    for r in &rows {
        println!(
            "{:>2} {:>2} {:>9.5} {:>10.1e} {:>10.1e} {:>10.1e} {:>4}",
            r.l, r.n, r.t, r.identity_error, r.det_error, r.fd_error, r.signature
        );
    }
    let worst = rows.iter().map(|r| r.identity_error).fold(0.0, f64::max);
    assert!(worst < 1e-10, "identity error {worst}");

    // diagonal of H₁⁻¹ restricted to the x-block against −cot(ωt)/(2ω)
    let e = trig_identity_error(100, 7)?;
    println!("cot identity over 100 random (ω, t): {e:.2e}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
