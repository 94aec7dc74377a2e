// Recover frequencies and Taylor coefficients from exact invariants:
// a sextic well in 1D, and an even-plus-cubic well in 2D.
//
// cargo run --release --example inversion

use well_invariants::invariants::EngineOptions;
use well_invariants::inverse::{fitting_t_grid, recover_from_samples, InvariantSamples, RecoveryTolerances};
use well_invariants::TaylorPotential;

fn recover(path: &str, target: u32) -> well_invariants::Result<()> {
    let v = TaylorPotential::load(path)?.with_truncation_order(target)?;
    let max_j = (target as usize - 2) / 2;
    let samples = InvariantSamples::from_formula(&v, &fitting_t_grid(v.max_frequency()), max_j, &EngineOptions::default())?;
    let (rec, sign, stages) =
        recover_from_samples(&samples, v.dimension(), target, v.symmetry(), RecoveryTolerances::formula(), 0)?;
    println!("{path}: n = {}, target order {target}, odd-order sign ambiguity {sign}", v.dimension());
    println!("  ω recovered {:?}", rec.frequencies());
    // odd derivatives are only determined up to x_n → −x_n; align with the truth for display
    let flip = sign
        && v.derivatives()
            .find(|(b, &d)| b.norm() % 2 == 1 && d != 0.0)
            .is_some_and(|(b, &d)| rec.derivative(b) * d < 0.0);
    for (beta, &want) in v.derivatives() {
        if beta.norm() < 3 {
            continue;
        }
        let got = rec.derivative(beta);
        let got = if flip && beta.norm() % 2 == 1 { -got } else { got };
        println!("  D{:?}: {:+.12e}  (true {:+.12e})", beta.entries(), got, want);
    }
    for s in &stages {
        println!("  {}: residual {:.1e}", s.stage, s.residual);
    }
    Ok(())
}

pub fn run_example() -> well_invariants::Result<()> {
    recover(concat!(env!("CARGO_MANIFEST_DIR"), "/data/sextic.json"), 6)?;
    recover(concat!(env!("CARGO_MANIFEST_DIR"), "/data/two_dim.json"), 4)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
