// Fit the constants of the displayed linear and cubic-square families to the
// engine, then check them on a fresh potential.
//
// cargo run --release --example calibration

use well_invariants::invariants::{calibrate_constants, displayed_linear_term, wave_invariant_linear_term, EngineOptions};
use well_invariants::{TaylorPotential, C64};

pub fn run_example() -> well_invariants::Result<()> {
    let opts = EngineOptions::default();
    let ts: Vec<f64> = (1..=8).map(|k| 0.12 * k as f64).collect();
    for omega in [vec![1.0], vec![1.0, 2f64.sqrt()]] {
        for j in 1..=2 {
            let r = calibrate_constants(&omega, j, &ts, 1e-8, &opts)?;
            println!(
                "n={} j={}: c1 = {:.10} (res {:.1e}), c2 = {:.10} (res {:.1e})",
                r.n, j, r.c1, r.c1_residual, r.c2, r.c2_residual
            );
        }
    }
    // displayed family vs engine linear term
    let pot = TaylorPotential::one_dim_monomial(1.0, &[(4, 0.05)])?;
    for t in [0.4, 0.8] {
        let tau = C64::new(t, 0.0);
        println!(
            "t={t}: displayed {:.10}, engine {:.10}",
            displayed_linear_term(&pot, 1, tau)?,
            wave_invariant_linear_term(&pot, 1, tau)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
