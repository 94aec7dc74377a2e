//! Weyl-count and min-max sandwich checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use super::{solve, EigenvalueSet, SolverSettings};
use crate::error::{Error, Result};
use crate::oscillator::osc_spectrum;
use crate::potential::TaylorPotential;
use crate::quadrature::gauss_legendre;

#[derive(Clone, Debug, Serialize)]
pub struct WeylReport {
    pub count: usize,
    pub phase_space_estimate: f64,
    pub ratio: f64,
    /// Few levels: the ratio is not meaningful.
    pub noisy: bool,
    /// Monte Carlo standard error of the estimate; zero for quadrature.
    pub std_error: f64,
}

/// Outward root of `V(r·dir) = level` along a ray, if `V` crosses it before `r_max`.
fn turning_radius(pot: &TaylorPotential, dir: &[f64], level: f64, r_max: f64) -> Option<f64> {
    let v = |r: f64| {
        let x: Vec<f64> = dir.iter().map(|d| d * r).collect();
        pot.evaluate(&x).expect("dimension matches")
    };
    let steps = 4000;
    let mut prev = 0.0;
    for s in 1..=steps {
        let r = r_max * s as f64 / steps as f64;
        if v(r) > level {
            let (mut lo, mut hi) = (prev, r);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if v(mid) > level {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        prev = r;
    }
    None
}

fn classical_radius(pot: &TaylorPotential, level: f64) -> Result<f64> {
    let n = pot.dimension();
    let r0 = (2.0 * level).sqrt() / pot.min_frequency();
    let mut r = 0.0f64;
    for k in 0..n {
        for sign in [1.0, -1.0] {
            let mut dir = vec![0.0; n];
            dir[k] = sign;
            let t = turning_radius(pot, &dir, level, 20.0 * r0).ok_or_else(|| {
                Error::InvalidPotential(format!("well is not closed at energy {level} along axis {k}"))
            })?;
            r = r.max(t);
        }
    }
    Ok(r)
}

fn unit_ball_volume(n: usize) -> f64 {
    // V_n = π^{n/2} / Γ(n/2 + 1)
    let mut v = [1.0, 2.0];
    let mut out = if n == 0 { 1.0 } else { 2.0 };
    for k in 2..=n {
        out = 2.0 * PI / k as f64 * v[k % 2];
        v[k % 2] = out;
    }
    out
}

/// `(2πħ)^{−n} vol{½ξ² + V ≤ δ}` against the computed count.
pub fn weyl_count_check(
    pot: &TaylorPotential,
    hbar: f64,
    delta: f64,
    settings: &SolverSettings,
    seed: u64,
) -> Result<WeylReport> {
    let n = pot.dimension();
    let set = solve(pot, hbar, delta, settings)?;
    let count = set.eigenvalues.len();
    let (volume, std_error) = if n == 1 {
        let xr = turning_radius(pot, &[1.0], delta, 40.0 * (2.0 * delta).sqrt() / pot.min_frequency());
        let xl = turning_radius(pot, &[-1.0], delta, 40.0 * (2.0 * delta).sqrt() / pot.min_frequency());
        let (Some(xr), Some(xl)) = (xr, xl) else {
            return Err(Error::InvalidPotential(format!("well is not closed at energy {delta}")));
        };
        // x = c + r sin θ removes the square-root endpoint behaviour
        let (c, r) = (0.5 * (xr - xl), 0.5 * (xr + xl));
        let (nodes, weights) = gauss_legendre(400);
        let half = PI / 2.0;
        let mut acc = 0.0;
        for (u, w) in nodes.iter().zip(&weights) {
            let th = half * u;
            let x = c + r * th.sin();
            let gap = delta - pot.evaluate(&[x])?;
            if gap > 0.0 {
                acc += w * 2.0 * (2.0 * gap).sqrt() * r * th.cos() * half;
            }
        }
        (acc, 0.0)
    } else {
        let r = 1.05 * classical_radius(pot, delta)?;
        let samples = 400_000;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let box_vol = (2.0 * r).powi(n as i32);
        let ball = unit_ball_volume(n);
        let (mut s1, mut s2) = (0.0, 0.0);
        let mut x = vec![0.0; n];
        for _ in 0..samples {
            for xi in x.iter_mut() {
                *xi = rng.random_range(-r..r);
            }
            let gap = delta - pot.evaluate(&x)?;
            let f = if gap > 0.0 {
                ball * (2.0 * gap).powf(n as f64 / 2.0)
            } else {
                0.0
            };
            s1 += f;
            s2 += f * f;
        }
        let m = samples as f64;
        let mean = s1 / m;
        let var = (s2 / m - mean * mean).max(0.0);
        (box_vol * mean, box_vol * (var / m).sqrt())
    };
    let norm = (2.0 * PI * hbar).powi(n as i32);
    let estimate = volume / norm;
    let std_error = std_error / norm;
    if std_error > 0.02 * estimate {
        return Err(Error::Residual {
            residual: std_error / estimate,
            tol: 0.02,
        });
    }
    let noisy = count < 10;
    if noisy {
        log::warn!("only {count} levels below δ = {delta}; Weyl ratio is not meaningful");
    }
    Ok(WeylReport {
        count,
        phase_space_estimate: estimate,
        ratio: count as f64 / estimate,
        noisy,
        std_error,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MinMaxReport {
    /// `sup |W|` over the domain box.
    pub c: f64,
    pub checked: usize,
    pub max_violation: f64,
    pub violating_indices: Vec<usize>,
    pub holds: bool,
}

/// `sup |W|` over `[−L, L]^n` on a uniform grid.
pub fn sup_anharmonic(pot: &TaylorPotential, half_width: f64) -> Result<f64> {
    let n = pot.dimension();
    let per_axis: usize = match n {
        1 => 20001,
        2 => 401,
        _ => 61,
    };
    let total = per_axis.pow(n as u32);
    let mut x = vec![0.0; n];
    let mut sup = 0.0f64;
    for flat in 0..total {
        let mut r = flat;
        for xi in x.iter_mut() {
            let g = r % per_axis;
            r /= per_axis;
            *xi = -half_width + 2.0 * half_width * g as f64 / (per_axis - 1) as f64;
        }
        sup = sup.max(pot.anharmonic(&x)?.abs());
    }
    Ok(sup)
}

/// `E⁰_j − C ≤ E_j ≤ E⁰_j + C` index by index, with `C = sup |W|` on the box.
/// Indices whose oscillator partner lies above the solve cutoff are skipped.
pub fn minmax_bound_check(
    pot: &TaylorPotential,
    set: &EigenvalueSet,
    half_width: f64,
) -> Result<MinMaxReport> {
    let c = sup_anharmonic(pot, half_width)?;
    minmax_with_constant(pot, set, c)
}

pub fn minmax_with_constant(
    pot: &TaylorPotential,
    set: &EigenvalueSet,
    c: f64,
) -> Result<MinMaxReport> {
    let lattice = osc_spectrum(pot.frequencies(), set.hbar, set.cutoff + c)?;
    let mut max_violation = 0.0f64;
    let mut violating = Vec::new();
    let mut checked = 0;
    for (j, &e) in set.eigenvalues.iter().enumerate() {
        let Some(e0) = lattice.get(j).map(|l| l.energy) else {
            break;
        };
        checked += 1;
        let v = (e - (e0 + c)).max((e0 - c) - e);
        // rounding slack relative to the energies involved
        let slack = 1e-12 * (e.abs() + e0.abs() + c);
        if v > slack {
            violating.push(j);
        }
        max_violation = max_violation.max(v);
    }
    Ok(MinMaxReport {
        c,
        checked,
        max_violation,
        holds: violating.is_empty(),
        violating_indices: violating,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SolverSettings;

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn harmonic_weyl() {
        let pot = TaylorPotential::harmonic(vec![1.0]).unwrap();
        let r = weyl_count_check(&pot, 0.01, 0.5, &SolverSettings::default(), 1).unwrap();
        assert!((r.phase_space_estimate - 50.0).abs() < 1e-8, "{}", r.phase_space_estimate);
        assert!((r.count as f64 - r.phase_space_estimate).abs() <= 1.0);
    }

    #[test]
    fn harmonic_weyl_2d_monte_carlo() {
        let pot = TaylorPotential::harmonic(vec![1.0, 1.5]).unwrap();
        let r = weyl_count_check(&pot, 0.02, 0.5, &SolverSettings::default(), 7).unwrap();
        // δ²/(2ħ²ω₁ω₂)
        let exact = 0.25 / (2.0 * 0.0004 * 1.5);
        assert!((r.phase_space_estimate - exact).abs() < 4.0 * r.std_error + 1e-9);
    }

    #[test]
    fn minmax_trivial_and_negative_control() {
        let pot = TaylorPotential::harmonic(vec![1.0]).unwrap();
        let set = solve(&pot, 0.05, 0.5, &SolverSettings::default()).unwrap();
        let r = minmax_bound_check(&pot, &set, 3.0).unwrap();
        assert_eq!(r.c, 0.0);
        assert!(r.holds && r.max_violation.abs() < 1e-12);

        let mut bad = set.clone();
        bad.eigenvalues[3] += 0.01;
        assert!(!minmax_bound_check(&pot, &bad, 3.0).unwrap().holds);
    }
}
