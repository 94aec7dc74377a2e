// a_1(t), a_2(t) for a cubic+quartic well, block by block.
//
// cargo run --release --example forward_invariants

use well_invariants::invariants::{wave_invariant_at, EngineOptions};
use well_invariants::{TaylorPotential, C64};

pub fn run_example() -> well_invariants::Result<()> {
    let pot = TaylorPotential::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/cubic_quartic.json"))?
        .with_truncation_order(6)?;
    let opts = EngineOptions::default();
    for j in 1..=2 {
        println!("j = {j}");
        for t in [0.3, 0.6, 0.9, 1.2] {
            let v = wave_invariant_at(&pot, j, C64::new(t, 0.0), &opts)?;
            let blocks: Vec<String> = v.breakdown.iter().map(|b| format!("l={}:{:+.3e}{:+.3e}i", b.l, b.contribution.re, b.contribution.im)).collect();
            println!("  t={t:.2}  a_j = {:+.10e}{:+.3e}i  [{}]", v.value.re, v.value.im, blocks.join(" "));
        }
    }
    // complex time, as used by the regularized trace
    let v = wave_invariant_at(&pot, 1, C64::new(0.8, -0.2), &opts)?;
    println!("a_1(0.8 − 0.2i) = {:.10}", v.value);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
