// Low eigenvalues of a quartic well by Hermite basis and finite differences,
// with Weyl and min-max checks.
//
// cargo run --release --example spectrum

use well_invariants::oscillator::osc_spectrum;
use well_invariants::spectral::{minmax_bound_check, solve, weyl_count_check, SolverSettings};
use well_invariants::TaylorPotential;

pub fn run_example() -> well_invariants::Result<()> {
    let pot = TaylorPotential::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/quartic.json"))?;
    let hbar = 0.05;
    let herm = solve(&pot, hbar, 0.5, &SolverSettings::default())?;
    let fd = solve(&pot, hbar, 0.5, &SolverSettings::FiniteDifference { half_width: None, points: None })?;
    let osc = osc_spectrum(pot.frequencies(), hbar, 0.5)?;
    println!("ħ = {hbar}: {} levels below 0.5 ({:?} vs {:?})", herm.eigenvalues.len(), herm.grid, fd.grid);
    println!("{:>3} {:>20} {:>20} {:>12}", "k", "Hermite", "FD", "harmonic");
    for (k, (h, f)) in herm.eigenvalues.iter().zip(&fd.eigenvalues).enumerate() {
        println!("{k:>3} {h:>20.14} {f:>20.14} {:>12.6}", osc[k].energy);
    }
    println!("estimated accuracy: Hermite {:.1e}, FD {:.1e}", herm.estimated_accuracy, fd.estimated_accuracy);

    let w = weyl_count_check(&pot, 0.005, 0.5, &SolverSettings::default(), 1)?;
    println!("Weyl at ħ = 0.005: N = {}, phase space {:.3}, ratio {:.4}", w.count, w.phase_space_estimate, w.ratio);

    let m = minmax_bound_check(&pot, &herm, 3.0)?;
    println!("min-max with C = sup|W| on [−3, 3] = {:.3}: holds = {}", m.c, m.holds);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
