// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
//
//   cargo test --release --test acceptance

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use well_invariants::invariants::{calibrate_constants, wave_invariant_at, EngineOptions};
use well_invariants::inverse::{end_to_end_1d, fitting_t_grid, rel_err, Route};
use well_invariants::oscillator::a0;
use well_invariants::perturbation::rs_wave_invariant;
use well_invariants::spectral::{
    minmax_bound_check, minmax_with_constant, solve, wall_for_cutoff, weyl_count_check, EigenvalueSet, SolverSettings,
};
use well_invariants::trace::{compute_spectra, extract_invariants, table_from_spectra, truncated_trace, CutoffFunction, TraceMode};
use well_invariants::verify::{closed_form_error, hessian_rows, trig_identity_error};
use well_invariants::{MultiIndex, Result, TaylorPotential, C64};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn data(name: &str) -> TaylorPotential {
    TaylorPotential::load(format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn quartic() -> TaylorPotential {
    TaylorPotential::one_dim_monomial(1.0, &[(4, 0.05)]).unwrap()
}

fn cubic_quartic() -> TaylorPotential {
    TaylorPotential::one_dim_monomial(1.0, &[(3, 0.1), (4, 0.05)]).unwrap()
}

fn c1_hessian() -> Result<Outcome> {
    let rows = hessian_rows(&[1, 2, 3, 4], &[1, 2, 3], 20, 11)?;
    let id = rows.iter().map(|r| r.identity_error).fold(0.0, f64::max);
    let det = rows.iter().map(|r| r.det_error).fold(0.0, f64::max);
    let fd = rows.iter().map(|r| r.fd_error).fold(0.0, f64::max);
    outcome(
        id < 1e-10 && det < 1e-10 && fd < 1e-5,
        format!("{} cases: |HH⁻¹−I| {id:.1e}, det {det:.1e}, FD {fd:.1e}", rows.len()),
    )
}

fn c2_trig() -> Result<Outcome> {
    let e = trig_identity_error(100, 12)?;
    outcome(e < 1e-12, format!("100 samples, max error {e:.1e}"))
}

fn c3_closed_form() -> Result<Outcome> {
    let e = closed_form_error(10, 3, &[1, 2], 13)?;
    outcome(e < 1e-10, format!("j ≤ 3, n ≤ 2, 20 random even potentials: rel {e:.1e}"))
}

fn c4_a0(spectra: &mut Vec<(TaylorPotential, EigenvalueSet)>) -> Result<Outcome> {
    let theta = CutoffFunction::new(6.0, 0.1)?;
    let mut parts = Vec::new();
    let mut pass = true;
    for omega in [vec![1.0], vec![1.0, 2f64.sqrt()]] {
        let pot = TaylorPotential::harmonic(omega.clone())?;
        // a_0 is singular at the edge of (0, π/ω_max); stay clear of it
        let top = if omega.len() == 1 { 1.5 } else { 1.05 };
        let ts: Vec<f64> = (0..10).map(|k| 0.5 + (top - 0.5) * k as f64 / 9.0).collect();
        let mut errs = Vec::new();
        for hbar in [0.01, 0.005] {
            let set = solve(&pot, hbar, theta.delta, &SolverSettings::default())?;
            let mut worst = 0.0f64;
            for &t in &ts {
                let tr = truncated_trace(&set, &theta, t)?;
                let want = a0(&omega, t)?;
                worst = worst.max((tr - want).norm() / want.norm());
            }
            errs.push(worst);
            spectra.push((pot.clone(), set));
        }
        pass &= errs[0] < 1e-5 && errs[1] < errs[0];
        parts.push(format!("n={}: ħ=0.01 {:.1e}, ħ=0.005 {:.1e}", omega.len(), errs[0], errs[1]));
    }
    outcome(pass, parts.join("; "))
}

fn c5_oracle() -> Result<Outcome> {
    let opts = EngineOptions::default();
    let ts: Vec<f64> = (1..=10).map(|k| 0.15 * k as f64).collect();
    let mut worst = 0.0f64;
    for (a, b) in [(0.0, 0.05), (0.1, 0.05)] {
        let pot = TaylorPotential::one_dim_monomial(1.0, &[(3, a), (4, b)])?;
        for &t in &ts {
            let tau = C64::new(t, 0.0);
            let e = wave_invariant_at(&pot, 1, tau, &opts)?.value;
            let o = rs_wave_invariant(&pot, 1, tau)?;
            worst = worst.max((e - o).norm() / o.norm());
        }
    }
    // a = 0 against −(3/4) b t cot²(t/2) a_0(t): the engine carries an extra
    // constant −i relative to the displayed formula (see README)
    let b = 0.05;
    let pot = quartic();
    let mut closed = 0.0f64;
    for &t in &ts {
        let literal = -0.75 * b * t / (t / 2.0).tan().powi(2) * a0(&[1.0], t)?;
        let e = wave_invariant_at(&pot, 1, C64::new(t, 0.0), &opts)?.value;
        closed = closed.max((e - literal * C64::new(0.0, -1.0)).norm() / literal.norm());
    }
    let at1 = wave_invariant_at(&pot, 1, C64::new(1.0, 0.0), &opts)?.value;
    outcome(
        worst < 1e-6 && closed < 1e-10,
        format!("RS oracle rel {worst:.1e}; closed form (× −i) rel {closed:.1e}; a_1(1) = {at1:.6}"),
    )
}

fn c6_extraction(spectra: &mut Vec<(TaylorPotential, EigenvalueSet)>) -> Result<Outcome> {
    let pot = quartic().with_truncation_order(10)?;
    let eps = 0.2;
    let mode = TraceMode::Regularized { eps };
    let hb = well_invariants::trace::default_hbar_grid();
    let settings = SolverSettings::default();
    let sets = compute_spectra(&pot, &hb, &mode, &settings)?;
    let ts = [0.3, 0.6, 0.9, 1.2, 1.5];
    let table = table_from_spectra(&sets, mode, &ts, settings)?;
    let ex = extract_invariants(&table, 4, 1e-4)?;
    let opts = EngineOptions::default();
    let mut worst = 0.0f64;
    for r in &ex.rows {
        let f = wave_invariant_at(&pot, 1, r.tau, &opts)?.value;
        worst = worst.max((r.coeffs[1] - f).norm() / f.norm());
    }
    spectra.extend(sets.into_iter().map(|s| (pot.clone(), s)));
    outcome(worst < 0.02, format!("8 ħ in [0.02, 0.1], ε = {eps}, J = 4, 5 t: max rel {worst:.1e}"))
}

fn c7_calibration() -> Result<Outcome> {
    let opts = EngineOptions::default();
    let mut parts = Vec::new();
    let mut worst = 0.0f64;
    for omega in [vec![1.0], vec![1.0, 2f64.sqrt()]] {
        let ts: Vec<f64> = (1..=8).map(|k| FRAC_PI_2 / omega[omega.len() - 1] * 0.1 * k as f64).collect();
        for j in 1..=2 {
            // tolerance is checked here, not inside, so the residual is always reported
            let r = calibrate_constants(&omega, j, &ts, f64::INFINITY, &opts)?;
            worst = worst.max(r.c1_residual).max(r.c2_residual);
            parts.push(format!("n={} j={j} c₂={:.3}", omega.len(), r.c2.re));
        }
    }
    outcome(worst < 1e-8, format!("max residual {worst:.1e} ({})", parts.join(", ")))
}

fn c8_inversion(spectra: &mut Vec<(TaylorPotential, EigenvalueSet)>) -> Result<Outcome> {
    let sextic = data("sextic.json");
    let f = end_to_end_1d(&sextic, 6, Route::Formula)?;
    let fr = f.potential()?;
    let d = |p: &TaylorPotential, k: u32| p.derivative(&MultiIndex::new(vec![k]).unwrap());
    let w_err = rel_err(fr.frequencies()[0], 1.0);
    let e34 = rel_err(d(&fr, 3).abs(), d(&sextic, 3).abs()).max(rel_err(d(&fr, 4), d(&sextic, 4)));
    let e56 = rel_err(d(&fr, 5).abs(), d(&sextic, 5).abs()).max(rel_err(d(&fr, 6), d(&sextic, 6)));
    let formula_ok = w_err < 1e-8 && e34 < 1e-6 && e56 < 1e-4;

    let v = cubic_quartic();
    let route = Route::empirical_default();
    let e = end_to_end_1d(&v, 4, route.clone())?;
    let er = e.potential()?;
    let ew = rel_err(er.frequencies()[0], 1.0);
    let e3 = rel_err(d(&er, 3).abs(), d(&v, 3).abs());
    let e4 = rel_err(d(&er, 4), d(&v, 4));
    let empirical_ok = ew < 1e-6 && e3 <= 0.02 && e4 <= 0.02;
    if let Route::Empirical { hbar_grid, eps, solver, .. } = &route {
        let sets = compute_spectra(&v, hbar_grid, &TraceMode::Regularized { eps: *eps }, solver)?;
        spectra.extend(sets.into_iter().map(|s| (v.clone(), s)));
    }

    // a_1 depends on V''' only through its square: bitwise identical samples
    let flipped = TaylorPotential::one_dim_monomial(1.0, &[(3, -0.1), (4, 0.05)])?;
    let opts = EngineOptions::default();
    let mut identical = true;
    for t in fitting_t_grid(1.0) {
        let tau = C64::new(t, 0.0);
        let (x, y) = (wave_invariant_at(&v, 1, tau, &opts)?.value, wave_invariant_at(&flipped, 1, tau, &opts)?.value);
        identical &= x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits();
    }
    outcome(
        formula_ok && empirical_ok && identical && e.sign_ambiguity,
        format!(
            "formula ω {w_err:.1e}, orders 3–4 {e34:.1e}, 5–6 {e56:.1e}; empirical ω {ew:.1e}, |V'''| {e3:.1e}, V⁗ {e4:.1e}; \
             −V''' gives identical a_1: {identical}"
        ),
    )
}

fn c9_weyl(spectra: &mut Vec<(TaylorPotential, EigenvalueSet)>) -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, pot) in [("harmonic", TaylorPotential::harmonic(vec![1.0])?), ("quartic", quartic())] {
        let w = weyl_count_check(&pot, 0.005, 0.5, &SolverSettings::default(), 0)?;
        pass &= (0.9..=1.1).contains(&w.ratio);
        parts.push(format!("{name} {} / {:.2} = {:.4}", w.count, w.phase_space_estimate, w.ratio));
        spectra.push((pot.clone(), solve(&pot, 0.005, 0.5, &SolverSettings::default())?));
    }
    outcome(pass, parts.join(", "))
}

fn c10_minmax(spectra: &[(TaylorPotential, EigenvalueSet)]) -> Result<Outcome> {
    // sup |W| on a box past the turning points of the solve cutoff
    let box_for = |pot: &TaylorPotential, set: &EigenvalueSet| -> Result<f64> {
        if pot.dimension() == 1 {
            wall_for_cutoff(pot, set.cutoff, 2.0)
        } else {
            Ok((4.0 * set.cutoff).sqrt() / pot.min_frequency())
        }
    };
    let mut levels = 0;
    let mut all_hold = true;
    for (pot, set) in spectra {
        let r = minmax_bound_check(pot, set, box_for(pot, set)?)?;
        levels += r.checked;
        all_hold &= r.holds;
    }
    // negative control: push one level outside its window
    let (pot, set) = spectra.iter().find(|(p, _)| !p.is_harmonic()).expect("an anharmonic run");
    let c = minmax_bound_check(pot, set, box_for(pot, set)?)?.c;
    let mut bad = set.clone();
    bad.eigenvalues[3] += 2.0 * c + 0.1;
    let caught = !minmax_with_constant(pot, &bad, c)?.holds;
    outcome(
        all_hold && caught,
        format!("{} runs, {levels} levels inside the sandwich; corrupted level detected: {caught}", spectra.len()),
    )
}

fn main() {
    let _ = env_logger::builder().is_test(true).try_init();
    let mut spectra = Vec::new();
    let mut failed = 0;
    let mut report = |name: &str, r: Result<Outcome>, t: Instant| {
        let (tag, detail) = match r {
            Ok(o) if o.pass => ("PASS", o.detail),
            Ok(o) => ("FAIL", o.detail),
            Err(e) => ("FAIL", format!("error: {e}")),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} {name} [{:.1}s] {detail}", t.elapsed().as_secs_f64());
    };
    let t = Instant::now();
    report("1 hessian identities", c1_hessian(), t);
    let t = Instant::now();
    report("2 cot identity", c2_trig(), t);
    let t = Instant::now();
    report("3 l=1 closed form", c3_closed_form(), t);
    let t = Instant::now();
    report("4 a_0 from truncated traces", c4_a0(&mut spectra), t);
    let t = Instant::now();
    report("5 perturbation oracle", c5_oracle(), t);
    let t = Instant::now();
    report("6 empirical extraction", c6_extraction(&mut spectra), t);
    let t = Instant::now();
    report("7 cubic-product family", c7_calibration(), t);
    let t = Instant::now();
    report("8 inversion round trip", c8_inversion(&mut spectra), t);
    let t = Instant::now();
    report("9 Weyl count", c9_weyl(&mut spectra), t);
    let t = Instant::now();
    report("10 min-max sandwich", c10_minmax(&spectra), t);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
