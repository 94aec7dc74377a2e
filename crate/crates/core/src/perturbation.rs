//! Rayleigh–Schrödinger oracle for the wave invariants.
//!
//! With `g = √ħ` and dimensionless `X_k = (a_k + a_k†)/√(2ω_k)`,
//! `Ĥ/ħ = Σ ω_k(N_k + ½) + Σ_β g^{|β|−2} (D_βV(0)/β!) X^β`. Perturbation theory in
//! `g` gives `E_γ/ħ = E⁰_γ + Σ_r ħ^r ε_{2r}(γ)`, and the coefficient `c_j(γ)` of
//! `ħ^j` in `exp(−iτ Σ_r ħ^r ε_{2r}(γ))` is a polynomial in `γ`. The lattice sum
//! `Σ_γ c_j(γ) Π q_k^{γ_k+½}`, `q_k = e^{−iω_kτ}`, is then closed by Newton
//! forward differences: `Σ_γ C(γ, m) q^γ = q^m/(1−q)^{m+1}`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use crate::oscillator::check_complex_time;
use crate::potential::TaylorPotential;

/// Dense state vector over a box of occupation numbers.
struct Space {
    dims: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl Space {
    fn new(dims: Vec<usize>) -> Self {
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let size = dims.iter().product();
        Space {
            dims,
            strides,
            size,
        }
    }

    fn occupation(&self, mut flat: usize) -> Vec<usize> {
        let mut occ = vec![0; self.dims.len()];
        for k in 0..self.dims.len() {
            occ[k] = flat / self.strides[k];
            flat %= self.strides[k];
        }
        occ
    }

    /// `X_k ψ` with `X_k = (a_k + a_k†)/√(2ω_k)`.
    fn apply_x(&self, k: usize, w: f64, psi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        let st = self.strides[k];
        let scale = 1.0 / (2.0 * w).sqrt();
        for (flat, &v) in psi.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let nk = (flat / st) % self.dims[k];
            // a† raises, a lowers
            if nk + 1 < self.dims[k] {
                out[flat + st] += v * ((nk + 1) as f64).sqrt() * scale;
            }
            if nk > 0 {
                out[flat - st] += v * (nk as f64).sqrt() * scale;
            }
        }
        out
    }
}

/// Energy corrections `E_k`, coefficient of `g^k` in `E_γ/ħ`, for `k = 0..=order`.
pub fn rs_energy_series(pot: &TaylorPotential, gamma: &[usize], order: usize) -> Result<Vec<f64>> {
    let omega = pot.frequencies();
    let n = omega.len();
    if gamma.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: gamma.len(),
        });
    }
    // a degree-(m+2) term enters at order g^m, so ψ_k spreads at most 3k quanta
    // from γ and the box below loses nothing
    let reach = 3 * order + 2;
    let space = Space::new(gamma.iter().map(|&g| g + reach + 1).collect());
    let home: usize = gamma.iter().zip(&space.strides).map(|(g, s)| g * s).sum();

    // V_m = Σ_{|β|=m+2} D_β/β! X^β
    let mut v_terms: Vec<Vec<(MultiIndex, f64)>> = vec![Vec::new(); order + 1];
    for (b, &d) in pot.derivatives() {
        let m = b.norm() as usize - 2;
        if m <= order {
            v_terms[m].push((b.clone(), d / b.factorial_f64()));
        }
    }
    let apply_v = |m: usize, psi: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; space.size];
        for (b, c) in &v_terms[m] {
            let mut phi = psi.to_vec();
            for k in 0..n {
                for _ in 0..b.get(k) {
                    phi = space.apply_x(k, omega[k], &phi);
                }
            }
            for (o, p) in out.iter_mut().zip(&phi) {
                *o += c * p;
            }
        }
        out
    };

    let e0 = |flat: usize| -> f64 {
        space
            .occupation(flat)
            .iter()
            .zip(omega)
            .map(|(&g, w)| w * (g as f64 + 0.5))
            .sum()
    };
    let e_home = e0(home);
    let denom: Vec<f64> = (0..space.size).map(|f| e0(f) - e_home).collect();
    for (f, d) in denom.iter().enumerate() {
        if f != home && d.abs() < 1e-9 {
            return Err(Error::Unsupported(
                "degenerate oscillator level; frequencies are commensurate".into(),
            ));
        }
    }

    let mut psi: Vec<Vec<f64>> = vec![vec![0.0; space.size]];
    psi[0][home] = 1.0;
    let mut energies = vec![e_home];
    for k in 1..=order {
        let mut vpsi = vec![0.0; space.size];
        for m in 1..=k {
            if v_terms[m].is_empty() {
                continue;
            }
            let t = apply_v(m, &psi[k - m]);
            for (a, b) in vpsi.iter_mut().zip(&t) {
                *a += b;
            }
        }
        let ek = vpsi[home];
        energies.push(ek);
        // (H₀ − E⁰)ψ_k = −Σ V_m ψ_{k−m} + Σ E_m ψ_{k−m}
        let mut rhs: Vec<f64> = vpsi.iter().map(|v| -v).collect();
        for m in 1..=k {
            for (r, p) in rhs.iter_mut().zip(&psi[k - m]) {
                *r += energies[m] * p;
            }
        }
        let mut next = vec![0.0; space.size];
        for f in 0..space.size {
            if f != home {
                next[f] = rhs[f] / denom[f];
            }
        }
        psi.push(next);
    }
    Ok(energies)
}

/// Coefficient of `ħ^j` in `exp(−iτ Σ_{r≥1} ε_r ħ^r)`; `eps[r]` holds `ε_r`.
pub fn exp_series_coefficient(eps: &[f64], j: usize, tau: C64) -> C64 {
    let mut s = vec![C64::new(0.0, 0.0); j + 1];
    for r in 1..=j.min(eps.len().saturating_sub(1)) {
        s[r] = C64::new(0.0, -1.0) * tau * eps[r];
    }
    // exp of a series with zero constant term
    let mut out = vec![C64::new(0.0, 0.0); j + 1];
    out[0] = C64::new(1.0, 0.0);
    let mut term = out.clone();
    for p in 1..=j {
        let mut next = vec![C64::new(0.0, 0.0); j + 1];
        for a in 0..=j {
            for b in 1..=j - a {
                next[a + b] += term[a] * s[b];
            }
        }
        term = next.into_iter().map(|v| v / p as f64).collect();
        for (o, t) in out.iter_mut().zip(&term) {
            *o += t;
        }
    }
    out[j]
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Σ_{γ ∈ ℕⁿ} c(γ) Π q_k^{γ_k}` for a polynomial `c` of total degree `< d`,
/// given its values on the box `[0, d]ⁿ` (row-major, last axis fastest).
pub fn lattice_sum(values: &[C64], d: usize, q: &[C64]) -> C64 {
    let n = q.len();
    let side = d + 1;
    let mut total = C64::new(0.0, 0.0);
    let idx = |g: &[usize]| g.iter().fold(0usize, |acc, &x| acc * side + x);
    for flat in 0..side.pow(n as u32) {
        let mut m = vec![0usize; n];
        let mut f = flat;
        for k in (0..n).rev() {
            m[k] = f % side;
            f /= side;
        }
        // Δ^m c(0)
        let mut diff = C64::new(0.0, 0.0);
        let mut g = vec![0usize; n];
        let inner: usize = m.iter().map(|x| x + 1).product();
        for sub in 0..inner {
            let mut s = sub;
            let mut sign = 1.0;
            let mut coef = 1.0;
            for k in (0..n).rev() {
                g[k] = s % (m[k] + 1);
                s /= m[k] + 1;
                coef *= binomial(m[k], g[k]);
                if (m[k] - g[k]) % 2 == 1 {
                    sign = -sign;
                }
            }
            diff += values[idx(&g)] * (sign * coef);
        }
        let mut w = C64::new(1.0, 0.0);
        for k in 0..n {
            w *= q[k].powi(m[k] as i32) / (1.0 - q[k]).powi(m[k] as i32 + 1);
        }
        total += diff * w;
    }
    total
}

/// `a_j(τ)` from Rayleigh–Schrödinger energies, for any dimension and order.
pub fn rs_wave_invariant(pot: &TaylorPotential, j: usize, tau: C64) -> Result<C64> {
    let omega = pot.frequencies();
    check_complex_time(omega, tau)?;
    let n = omega.len();
    // c_j is a polynomial of total degree ≤ 2j in γ
    let d = 2 * j + 2;
    let side = d + 1;
    let mut values = Vec::with_capacity(side.pow(n as u32));
    for flat in 0..side.pow(n as u32) {
        let mut gamma = vec![0usize; n];
        let mut f = flat;
        for k in (0..n).rev() {
            gamma[k] = f % side;
            f /= side;
        }
        let e = rs_energy_series(pot, &gamma, 2 * j)?;
        let eps: Vec<f64> = (0..=j).map(|r| if r == 0 { 0.0 } else { e[2 * r] }).collect();
        values.push(exp_series_coefficient(&eps, j, tau));
    }
    let q: Vec<C64> = omega.iter().map(|&w| (C64::new(0.0, -w) * tau).exp()).collect();
    let half: C64 = q.iter().map(|qk| qk.sqrt()).product();
    Ok(half * lattice_sum(&values, d, &q))
}

/// `a_1(τ) = −iτ Σ_n e₂(n) q^{n+½}` for `V = ω²x²/2 + a x³ + b x⁴` in one dimension,
/// with `e₂` from first-order quartic and second-order cubic ladder matrix elements.
pub fn perturbation_oracle_a1(pot: &TaylorPotential, tau: C64) -> Result<C64> {
    if pot.dimension() != 1 {
        return Err(Error::Unsupported("the a₁ oracle is one-dimensional".into()));
    }
    for (b, _) in pot.derivatives() {
        if !(3..=4).contains(&b.norm()) {
            return Err(Error::Unsupported(format!(
                "the a₁ oracle needs W = a x³ + b x⁴; found order {}",
                b.norm()
            )));
        }
    }
    let w = pot.frequencies()[0];
    check_complex_time(&[w], tau)?;
    let a = pot.derivative(&MultiIndex::new(vec![3])?) / 6.0;
    let b = pot.derivative(&MultiIndex::new(vec![4])?) / 24.0;
    // ⟨m|(a+a†)^p|n⟩ by explicit ladder products on a small band
    let ladder_power = |p: usize, n: usize| -> Vec<f64> {
        let size = n + p + 1;
        let mut v = vec![0.0; size];
        v[n] = 1.0;
        for _ in 0..p {
            let mut o = vec![0.0; size];
            for (m, &c) in v.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                if m + 1 < size {
                    o[m + 1] += c * ((m + 1) as f64).sqrt();
                }
                if m > 0 {
                    o[m - 1] += c * (m as f64).sqrt();
                }
            }
            v = o;
        }
        v
    };
    let e2 = |n: usize| -> f64 {
        let s = 1.0 / (2.0 * w);
        let x4 = ladder_power(4, n);
        let mut e = b * s * s * x4[n];
        let x3 = ladder_power(3, n);
        for (m, &c) in x3.iter().enumerate() {
            if m != n && c != 0.0 {
                e += a * a * s.powi(3) * c * c / (w * (n as f64 - m as f64));
            }
        }
        e
    };
    let d = 3;
    let values: Vec<C64> = (0..=d).map(|n| C64::new(e2(n), 0.0)).collect();
    let q = (C64::new(0.0, -w) * tau).exp();
    let sum = q.sqrt() * lattice_sum(&values, d, &[q]);
    Ok(C64::new(0.0, -1.0) * tau * sum)
}
