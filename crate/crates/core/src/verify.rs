//! Small self-checks shared by `wellinv verify` and the examples.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::hessian::{finite_difference_hessian, HessianData};
use crate::invariants::{wave_invariant_at, EngineOptions};
use crate::perturbation::rs_wave_invariant;
use crate::potential::TaylorPotential;
use crate::symcalc::{single_block_closed_form, stationary_phase_coefficient, LinearFormSet};

#[derive(Clone, Debug, Serialize)]
pub struct HessianRow {
    pub l: usize,
    pub n: usize,
    pub t: f64,
    pub identity_error: f64,
    pub det_error: f64,
    pub fd_error: f64,
    pub signature: i32,
}

/// Random frequencies in `[0.5, 2]` and a random valid `t` per row.
pub fn random_frequencies(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.5..2.0)).collect()
}

pub fn hessian_rows(ls: &[usize], ns: &[usize], per_case: usize, seed: u64) -> Result<Vec<HessianRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &l in ls {
        for &n in ns {
            for _ in 0..per_case {
                let omega = random_frequencies(&mut rng, n);
                let limit = std::f64::consts::FRAC_PI_2 / omega.iter().cloned().fold(0.0, f64::max);
                let t = limit * rng.random_range(0.05..0.95);
                let h = HessianData::compute(l, &omega, t)?;
                let fd = finite_difference_hessian(l, &omega, t, 1e-3);
                let fd_error = (&h.matrix - fd).abs().max();
                out.push(HessianRow {
                    l,
                    n,
                    t,
                    identity_error: h.identity_error(),
                    det_error: h.det_error(),
                    fd_error,
                    signature: h.signature,
                });
            }
        }
    }
    Ok(out)
}

/// `L_xᵀ H_1⁻¹ L_x` through a dense LU inverse, against `−cot(ωt/2)/(2ω)`.
/// Returns the largest absolute difference over `samples` random `(ω, t, s)`.
pub fn trig_identity_error(samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let w = rng.random_range(0.3..3.0);
        let t = rng.random_range(0.05..0.95) * std::f64::consts::FRAC_PI_2 / w;
        let s = rng.random_range(0.0..t);
        let forms = LinearFormSet::new(1, &[w], t, &[s])?;
        let h = crate::hessian::build_hessian(1, &[w], t)?;
        let hinv = h.lu().try_inverse().expect("nonsingular");
        let v = DMatrix::from_column_slice(forms.layout.size(), 1, &forms.coeffs[0][0]);
        let sigma2 = (v.transpose() * hinv * &v)[(0, 0)];
        let closed = -1.0 / (2.0 * w * (w * t / 2.0).tan());
        worst = worst.max((sigma2 - closed).abs() / closed.abs().max(1.0));
    }
    Ok(worst)
}

/// Random even potential up to order `2j_max + 2` in `n` dimensions.
pub fn random_even_potential(rng: &mut ChaCha8Rng, n: usize, j_max: usize) -> Result<TaylorPotential> {
    let omega = random_frequencies(rng, n);
    let mut derivs = Vec::new();
    for half in 2..=(j_max as u32 + 1) {
        for alpha in crate::MultiIndex::all_with_norm(n, half) {
            derivs.push((alpha.doubled(), rng.random_range(-2.0..2.0)));
        }
    }
    TaylorPotential::new(omega, derivs, crate::SymmetryClass::Even)
}

/// Largest relative gap between the polynomial route of the `l = 1`
/// coefficient and its closed form.
pub fn closed_form_error(pots: usize, j_max: usize, ns: &[usize], seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for &n in ns {
        for _ in 0..pots {
            let pot = random_even_potential(&mut rng, n, j_max)?;
            let limit = std::f64::consts::FRAC_PI_2 / pot.max_frequency();
            let t = limit * rng.random_range(0.1..0.9);
            let s = rng.random_range(0.0..t);
            for j in 1..=j_max {
                let engine = stationary_phase_coefficient(&pot, 1, j, t, &[s])?;
                let closed = single_block_closed_form(&pot, j, t);
                worst = worst.max((engine - closed).norm() / closed.norm().max(1e-300));
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleRow {
    pub j: usize,
    pub t: f64,
    pub engine: C64,
    pub oracle: C64,
    pub rel: f64,
}

/// Engine `a_j` against the Rayleigh–Schrödinger lattice sum.
pub fn oracle_rows(pot: &TaylorPotential, js: &[usize], ts: &[f64]) -> Result<Vec<OracleRow>> {
    let opts = EngineOptions::default();
    let mut out = Vec::new();
    for &j in js {
        for &t in ts {
            let tau = C64::new(t, 0.0);
            let engine = wave_invariant_at(pot, j, tau, &opts)?.value;
            let oracle = rs_wave_invariant(pot, j, tau)?;
            out.push(OracleRow {
                j,
                t,
                engine,
                oracle,
                rel: (engine - oracle).norm() / oracle.norm(),
            });
        }
    }
    Ok(out)
}
