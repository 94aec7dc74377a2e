//! Closed-form facts about the anisotropic oscillator `Ĥ₀ = −½ħ²Δ + ½Σω_k²x_k²`.

use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;

#[derive(Clone, Debug, PartialEq)]
pub struct OscillatorLevel {
    pub gamma: MultiIndex,
    pub energy: f64,
}

/// Every lattice level `ħ Σ ω_k(γ_k + ½) ≤ cutoff`, sorted by energy.
pub fn osc_spectrum(omega: &[f64], hbar: f64, cutoff: f64) -> Result<Vec<OscillatorLevel>> {
    if omega.is_empty() || omega.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::InvalidArgument("frequencies must be positive".into()));
    }
    if !(hbar > 0.0) {
        return Err(Error::InvalidArgument(format!("ħ = {hbar} must be positive")));
    }
    let ground: f64 = 0.5 * hbar * omega.iter().sum::<f64>();
    if cutoff < ground {
        log::warn!("cutoff {cutoff} lies below the ground level {ground}");
        return Ok(Vec::new());
    }
    let n = omega.len();
    let bounds: Vec<u32> = omega
        .iter()
        .map(|w| (cutoff / (hbar * w)).ceil() as u32)
        .collect();
    let mut out = Vec::new();
    let mut gamma = vec![0u32; n];
    // odometer over the box Π [0, bound_k]
    loop {
        let e: f64 = hbar
            * omega
                .iter()
                .zip(&gamma)
                .map(|(w, &g)| w * (g as f64 + 0.5))
                .sum::<f64>();
        if e <= cutoff {
            out.push(OscillatorLevel {
                gamma: MultiIndex::new(gamma.clone()).expect("nonempty"),
                energy: e,
            });
        }
        let mut k = 0;
        loop {
            if k == n {
                out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
                return Ok(out);
            }
            if gamma[k] < bounds[k] {
                gamma[k] += 1;
                break;
            }
            gamma[k] = 0;
            k += 1;
        }
    }
}

/// Check `0 < t < π/(2ω_k)` for every axis.
pub fn check_time_domain(omega: &[f64], t: f64) -> Result<()> {
    for (k, &w) in omega.iter().enumerate() {
        let limit = FRAC_PI_2 / w;
        if !(t > 0.0 && t < limit) {
            return Err(Error::TimeDomain { t, axis: k, limit });
        }
    }
    Ok(())
}

/// Complex times `τ = t − iε` are accepted when `t` is in the real domain and `ε ≥ 0`.
pub fn check_complex_time(omega: &[f64], tau: C64) -> Result<()> {
    check_time_domain(omega, tau.re)?;
    if tau.im > 0.0 {
        return Err(Error::InvalidArgument(format!(
            "complex time {tau} must have non-positive imaginary part"
        )));
    }
    Ok(())
}

/// `a_0(t) = Π 1/(2i sin(ω_k t/2))`.
pub fn a0(omega: &[f64], t: f64) -> Result<C64> {
    check_time_domain(omega, t)?;
    Ok(a0_unchecked(omega, C64::new(t, 0.0)))
}

/// `a_0` continued to complex time.
pub fn a0_complex(omega: &[f64], tau: C64) -> Result<C64> {
    check_complex_time(omega, tau)?;
    Ok(a0_unchecked(omega, tau))
}

pub(crate) fn a0_unchecked(omega: &[f64], tau: C64) -> C64 {
    omega
        .iter()
        .map(|&w| (C64::new(0.0, 2.0) * (tau * w * 0.5).sin()).inv())
        .product()
}

/// Mehler kernel `Π (ω_k/(2πiħ sin ω_k τ))^{1/2} e^{iS/ħ}`, principal branch per axis.
///
/// For real `0 < ω_k t < π` the principal branch agrees with continuation from
/// `t → 0⁺`.
pub fn mehler_kernel(omega: &[f64], hbar: f64, tau: C64, x: &[f64], y: &[f64]) -> Result<C64> {
    let n = omega.len();
    if x.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len().min(y.len()),
        });
    }
    let i = C64::i();
    let mut pref = C64::new(1.0, 0.0);
    let mut s = C64::new(0.0, 0.0);
    for k in 0..n {
        let w = omega[k];
        let sn = (tau * w).sin();
        if sn.norm() < 1e-14 {
            return Err(Error::SingularTime { t: tau.re, axis: k });
        }
        pref *= (w / (2.0 * PI * hbar * i * sn)).sqrt();
        let cs = (tau * w).cos();
        s += w / sn * (0.5 * cs * (x[k] * x[k] + y[k] * y[k]) - x[k] * y[k]);
    }
    Ok(pref * (i * s / hbar).exp())
}
