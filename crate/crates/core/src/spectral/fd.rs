//! Fourth-order finite differences on `[−L, L]` with Dirichlet walls.

use super::banded::BandedSymmetric;
use crate::error::{Error, Result};
use crate::potential::TaylorPotential;

/// Interior node `i` of an `m`-point grid; walls sit at `±L`.
pub fn fd_node(half_width: f64, points: usize, i: usize) -> f64 {
    let h = 2.0 * half_width / (points as f64 + 1.0);
    -half_width + (i as f64 + 1.0) * h
}

fn check_grid(hbar: f64, half_width: f64, points: usize) -> Result<()> {
    if !(hbar > 0.0) || !(half_width > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "ħ = {hbar} and L = {half_width} must be positive"
        )));
    }
    let need = 8.0 * half_width / hbar.sqrt();
    if (points as f64) <= need {
        return Err(Error::GridTooCoarse(format!(
            "{points} points on [−{half_width}, {half_width}] at ħ = {hbar}; need more than {need:.0}"
        )));
    }
    Ok(())
}

/// `−ħ²/2 ∂² + v(x)` on `m` interior points. The wall ghost uses odd
/// reflection, which puts −29 instead of −30 on the first and last rows.
pub fn build_fd_hamiltonian_with(
    v: impl Fn(f64) -> f64,
    hbar: f64,
    half_width: f64,
    points: usize,
) -> Result<BandedSymmetric> {
    check_grid(hbar, half_width, points)?;
    let h = 2.0 * half_width / (points as f64 + 1.0);
    let k = hbar * hbar / 2.0 / (12.0 * h * h);
    let mut a = BandedSymmetric::zeros(points, 2);
    for i in 0..points {
        let centre = if i == 0 || i + 1 == points { 29.0 } else { 30.0 };
        a.add(i, i, k * centre + v(fd_node(half_width, points, i)));
        if i >= 1 {
            a.add(i, i - 1, -16.0 * k);
        }
        if i >= 2 {
            a.add(i, i - 2, k);
        }
    }
    Ok(a)
}

/// Finite-difference Hamiltonian of a one-dimensional Taylor potential.
pub fn build_fd_hamiltonian(
    pot: &TaylorPotential,
    hbar: f64,
    half_width: f64,
    points: usize,
) -> Result<BandedSymmetric> {
    if pot.dimension() != 1 {
        return Err(Error::Unsupported(
            "the finite-difference solver is one-dimensional".into(),
        ));
    }
    let v = |x: f64| pot.evaluate(&[x]).expect("dimension checked");
    build_fd_hamiltonian_with(v, hbar, half_width, points)
}

/// A power-of-two `L` with `V(±L) > factor · cutoff`.
pub fn wall_for_cutoff(pot: &TaylorPotential, cutoff: f64, factor: f64) -> Result<f64> {
    let target = factor * cutoff;
    let ok = |l: f64| {
        pot.evaluate(&[l]).map(|v| v > target).unwrap_or(false)
            && pot.evaluate(&[-l]).map(|v| v > target).unwrap_or(false)
    };
    let mut hi = 1.0;
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::InvalidPotential(
                "potential does not confine; no wall position found".into(),
            ));
        }
    }
    Ok(hi)
}
