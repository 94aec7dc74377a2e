// Stationary-phase engine against Rayleigh–Schrödinger perturbation theory,
// and the l = 1 closed form for even potentials.
//
// cargo run --release --example oracle_check

use well_invariants::verify::{closed_form_error, oracle_rows};
use well_invariants::TaylorPotential;

pub fn run_example() -> well_invariants::Result<()> {
    // V = x²/2 + a x³ + b x⁴
    for (a, b) in [(0.0, 0.05), (0.1, 0.05)] {
        let pot = TaylorPotential::one_dim_monomial(1.0, &[(3, a), (4, b)])?.with_truncation_order(6)?;
        println!("a = {a}, b = {b}");
        for r in oracle_rows(&pot, &[1, 2], &[0.25, 0.5, 0.75, 1.0, 1.25])? {
            println!("  j={} t={:.2}  engine {:.12e}  oracle {:.12e}  rel {:.1e}", r.j, r.t, r.engine, r.oracle, r.rel);
            assert!(r.rel < 1e-6);
        }
    }
    println!("l = 1 closed form (even W), j ≤ 3, n ≤ 2: {:.1e}", closed_form_error(3, 3, &[1, 2], 3)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
