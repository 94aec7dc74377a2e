// Spectra → regularized trace at t − iε → fit in ħ → compare with the formula.
//
// cargo run --release --example trace_extraction

use well_invariants::invariants::{wave_invariant_at, EngineOptions};
use well_invariants::spectral::SolverSettings;
use well_invariants::trace::{default_hbar_grid, extract_invariants, hbar_sweep, TraceMode};
use well_invariants::TaylorPotential;

pub fn run_example() -> well_invariants::Result<()> {
    let pot = TaylorPotential::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/quartic.json"))?
        .with_truncation_order(10)?;
    let eps = 0.2;
    let ts = [0.3, 0.6, 0.9, 1.2, 1.5];
    let hb = default_hbar_grid();
    let table = hbar_sweep(&pot, TraceMode::Regularized { eps }, &ts, &hb, &SolverSettings::default())?;
    for s in &table.provenance.spectra {
        println!("ħ={:.4}: {} levels, accuracy {:.1e}", s.hbar, s.levels, s.estimated_accuracy);
    }
    let ex = extract_invariants(&table, 4, 1e-4)?;
    for w in &ex.warnings {
        println!("warning: {w}");
    }
    let opts = EngineOptions::default();
    println!("{:>5} {:>32} {:>32} {:>9} {:>9}", "t", "â_1", "a_1 formula", "rel", "cond");
    for r in &ex.rows {
        let f = wave_invariant_at(&pot, 1, r.tau, &opts)?.value;
        let rel = (r.coeffs[1] - f).norm() / f.norm();
        println!("{:>5.2} {:>32.10} {:>32.10} {:>9.1e} {:>9.1e}", r.t, r.coeffs[1], f, rel, r.condition);
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
