// Inversion under noise and at commensurate frequencies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use well_invariants::invariants::EngineOptions;
use well_invariants::inverse::{
    fitting_t_grid, recover_frequencies, recover_from_samples, recover_order34, rel_err, FrequencyOptions,
    InvariantSamples, RecoveryTolerances,
};
use well_invariants::oscillator::a0;
use well_invariants::{Error, MultiIndex, SymmetryClass, TaylorPotential, C64};

fn noisy(samples: &InvariantSamples, sigma: f64, seed: u64) -> InvariantSamples {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    InvariantSamples {
        per_order: samples
            .per_order
            .iter()
            .map(|s| {
                s.iter()
                    .map(|&(tau, y)| (tau, y * (1.0 + sigma * rng.random_range(-1.0..1.0))))
                    .collect()
            })
            .collect(),
    }
}

#[test]
fn noise_ladder_is_monotone() {
    let v = TaylorPotential::one_dim_monomial(1.0, &[(3, 0.1), (4, 0.05)]).unwrap();
    let clean = InvariantSamples::from_formula(&v, &fitting_t_grid(1.0), 1, &EngineOptions::default()).unwrap();
    let d = |p: &TaylorPotential, k| p.derivative(&MultiIndex::new(vec![k]).unwrap());
    let tol = RecoveryTolerances { frequencies: 1.0, fit: 1.0 };
    let mut last = 0.0;
    for sigma in [0.0, 1e-6, 1e-4, 1e-3, 1e-2] {
        let (rec, _, _) = recover_from_samples(&noisy(&clean, sigma, 5), 1, 4, SymmetryClass::General, tol, 0).unwrap();
        let err = rel_err(rec.frequencies()[0], 1.0)
            .max(rel_err(d(&rec, 3).abs(), d(&v, 3)))
            .max(rel_err(d(&rec, 4), d(&v, 4)));
        println!("σ = {sigma:e}: worst relative error {err:.2e}");
        assert!(err >= last * 0.999, "σ = {sigma}: {err} < {last}");
        last = err;
    }
}

#[test]
fn one_percent_noise_frequencies() {
    for omega in [vec![1.0], vec![1.0, 2f64.sqrt()]] {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let samples: Vec<(C64, C64)> = fitting_t_grid(omega[omega.len() - 1])
            .into_iter()
            .map(|t| (C64::new(t, 0.0), a0(&omega, t).unwrap() * (1.0 + 0.01 * rng.random_range(-1.0..1.0))))
            .collect();
        let fit = recover_frequencies(&samples, omega.len(), &FrequencyOptions { tol: 0.05, ..Default::default() }).unwrap();
        println!("{omega:?}: {:?}, residual {:.1e}", fit.omega, fit.residual);
        if omega.len() == 1 {
            assert!(rel_err(fit.omega[0], 1.0) < 0.01, "{:?}", fit.omega);
        } else {
            // the product sits in the leading small-t power; the split only in the
            // t² correction, which 1% noise blurs by several percent
            assert!(rel_err(fit.omega[0] * fit.omega[1], omega[0] * omega[1]) < 0.01, "{:?}", fit.omega);
            for (got, want) in fit.omega.iter().zip(&omega) {
                assert!(rel_err(*got, *want) < 0.1, "{:?} vs {omega:?}", fit.omega);
            }
        }
        assert!(fit.residual > 1e-4, "noise should show in the residual");
    }
}

fn even_plus_cubic(omega: Vec<f64>) -> TaylorPotential {
    let mi = |v: Vec<u32>| MultiIndex::new(v).unwrap();
    TaylorPotential::new(
        omega,
        [(mi(vec![0, 3]), 0.5), (mi(vec![4, 0]), 0.6), (mi(vec![2, 2]), 0.3), (mi(vec![0, 4]), 0.9)],
        SymmetryClass::EvenPlusCubic,
    )
    .unwrap()
}

#[test]
fn commensurate_frequencies_are_refused() {
    let opts = EngineOptions::default();
    let good = even_plus_cubic(vec![1.0, 2f64.sqrt()]);
    let bad = even_plus_cubic(vec![1.0, 2.0]);
    let a1 = |v: &TaylorPotential| {
        InvariantSamples::from_formula(v, &fitting_t_grid(v.max_frequency()), 1, &opts).unwrap().per_order[1].clone()
    };
    let ok = recover_order34(&a1(&good), good.frequencies(), SymmetryClass::EvenPlusCubic, &opts).unwrap();
    println!("ω = (1, √2): Gram condition {:.2e}", ok.gram_condition);
    match recover_order34(&a1(&bad), bad.frequencies(), SymmetryClass::EvenPlusCubic, &opts) {
        Err(Error::Hypothesis(msg)) => assert!(msg.contains("commensurate"), "{msg}"),
        other => panic!("expected a refusal, got {other:?}"),
    }
}
