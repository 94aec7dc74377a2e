//! Hamiltonian in the scaled oscillator eigenbasis.
//!
//! Matrix elements of `x^p` are produced by applying the ladder matrix `p`
//! times in a basis enlarged by `p` states, then truncating, so every entry is
//! exact up to rounding.

use nalgebra::DMatrix;

use super::banded::BandedSymmetric;
use super::SymMatrix;
use crate::error::{Error, Result};
use crate::potential::TaylorPotential;

/// `⟨m| x^p |c⟩` for `m, c < size`, `p ≤ max_power`, with `x = s(a + a†)`.
/// Returns `powers[p]` as dense `size × size` matrices.
pub fn position_powers(size: usize, scale: f64, max_power: usize) -> Vec<DMatrix<f64>> {
    let big = size + max_power + 1;
    let mut out = vec![DMatrix::<f64>::zeros(size, size); max_power + 1];
    for c in 0..size {
        let mut v = vec![0.0; big];
        v[c] = 1.0;
        out[0][(c, c)] = 1.0;
        for p in 1..=max_power {
            v = apply_position(&v, scale);
            for m in 0..size {
                out[p][(m, c)] = v[m];
            }
        }
    }
    out
}

fn apply_position(v: &[f64], s: f64) -> Vec<f64> {
    let n = v.len();
    let mut w = vec![0.0; n];
    for m in 0..n {
        // (a + a†)|m⟩ = √m |m−1⟩ + √(m+1) |m+1⟩
        if m > 0 {
            w[m - 1] += s * (m as f64).sqrt() * v[m];
        }
        if m + 1 < n {
            w[m + 1] += s * ((m + 1) as f64).sqrt() * v[m];
        }
    }
    w
}

/// Minimum basis size per axis for eigenvalues up to `cutoff`.
pub fn required_basis(pot: &TaylorPotential, hbar: f64, cutoff: f64) -> usize {
    (4.0 * cutoff / (hbar * pot.min_frequency())).ceil() as usize
}

fn check_confining(pot: &TaylorPotential) {
    if pot.is_harmonic() {
        return;
    }
    let top_deg = pot.derivatives().map(|(b, _)| b.norm()).max().unwrap_or(2);
    if top_deg % 2 == 1 {
        log::warn!("top-degree anharmonic term is odd (degree {top_deg}); truncated-basis spectrum may include spurious states");
    }
    let n = pot.dimension();
    for k in 0..n {
        let mut e = vec![0u32; n];
        e[k] = top_deg;
        let idx = crate::MultiIndex::new(e).expect("nonempty");
        if top_deg % 2 == 0 && pot.derivative(&idx) < 0.0 {
            log::warn!("degree-{top_deg} coefficient along axis {k} is negative; potential is unbounded below");
        }
    }
}

/// `Ĥ₀ + W` in the product basis `|γ_1 … γ_n⟩`, `γ_k < basis`, last axis fastest.
///
/// One dimension gives a band matrix, two a dense one, and a harmonic potential
/// a diagonal.
pub fn build_hermite_hamiltonian(pot: &TaylorPotential, hbar: f64, basis: usize) -> Result<SymMatrix> {
    if !(hbar > 0.0) {
        return Err(Error::InvalidArgument(format!("ħ = {hbar} must be positive")));
    }
    if basis == 0 {
        return Err(Error::BasisTooSmall("empty basis".into()));
    }
    let n = pot.dimension();
    let omega = pot.frequencies();
    let total = basis
        .checked_pow(n as u32)
        .ok_or_else(|| Error::BasisTooSmall(format!("{basis}^{n} overflows")))?;

    let diag = |flat: usize| -> f64 {
        let mut r = flat;
        let mut e = 0.0;
        for k in (0..n).rev() {
            let g = r % basis;
            r /= basis;
            e += hbar * omega[k] * (g as f64 + 0.5);
        }
        e
    };

    if pot.is_harmonic() {
        return Ok(SymMatrix::Diagonal((0..total).map(diag).collect()));
    }
    check_confining(pot);

    let max_deg = pot.derivatives().map(|(b, _)| b.norm()).max().unwrap_or(0) as usize;
    let powers: Vec<Vec<DMatrix<f64>>> = omega
        .iter()
        .map(|w| position_powers(basis, (hbar / (2.0 * w)).sqrt(), max_deg))
        .collect();

    match n {
        1 => {
            let mut m = BandedSymmetric::zeros(basis, max_deg);
            for i in 0..basis {
                m.add(i, i, diag(i));
            }
            for (beta, d) in pot.derivatives() {
                let p = beta.get(0) as usize;
                let c = d / beta.factorial_f64();
                for col in 0..basis {
                    for row in col..(col + p + 1).min(basis) {
                        let v = powers[0][p][(row, col)];
                        if v != 0.0 {
                            m.add(row, col, c * v);
                        }
                    }
                }
            }
            Ok(SymMatrix::Banded(m))
        }
        2 => {
            if total > 4096 {
                return Err(Error::Unsupported(format!(
                    "dense two-dimensional basis of {total} states is beyond desk scale"
                )));
            }
            let mut h = DMatrix::<f64>::zeros(total, total);
            for i in 0..total {
                h[(i, i)] = diag(i);
            }
            for (beta, d) in pot.derivatives() {
                let c = d / beta.factorial_f64();
                let a = &powers[0][beta.get(0) as usize];
                let b = &powers[1][beta.get(1) as usize];
                h += a.kronecker(b) * c;
            }
            // symmetrize against rounding
            let ht = h.transpose();
            h = (h + ht) * 0.5;
            Ok(SymMatrix::Dense(h))
        }
        _ => Err(Error::Unsupported(format!(
            "eigensolves are limited to n ≤ 2 (got n = {n})"
        ))),
    }
}
