// Hidden 1D potential → spectra → traces → invariants → Taylor coefficients,
// next to the same recovery from exact invariants.
//
// cargo run --release --example end_to_end

use well_invariants::inverse::{end_to_end_1d, Route};
use well_invariants::TaylorPotential;

pub fn run_example() -> well_invariants::Result<()> {
    let hidden = TaylorPotential::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/cubic_quartic.json"))?;

    let formula = end_to_end_1d(&hidden, 4, Route::Formula)?;
    println!("formula route");
    print!("{}", formula.table(Some(&hidden)));

    let empirical = end_to_end_1d(&hidden, 4, Route::empirical_default())?;
    println!("empirical route");
    print!("{}", empirical.table(Some(&hidden)));
    println!("cubic sign ambiguity: {}", empirical.sign_ambiguity);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
