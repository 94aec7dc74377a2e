//! Wave invariants `a_j(t)` assembled from stationary-phase coefficients
//! integrated over the time simplex.
//!
//! `a_j(τ) = a_0(τ) Σ_{l=1}^{2j} φ_{j,l} ∫_{τ ≥ s_1 ≥ … ≥ s_l ≥ 0} P_{l+j} b_l(0) ds`
//!
//! The phase `φ_{j,l}` is the printed prefactor `i^{l(n−1)+n/2} e^{iπ sgn H_l/4}`
//! times a fixed unimodular calibration `(−1)^{j+l} i^{−ln}` found against the
//! Rayleigh–Schrödinger oracle in [`crate::perturbation`]. With `sgn H_l = −n`
//! the product is `(−1)^j i^l`, independent of `n`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hessian::hessian_signature;
use crate::multi_index::MultiIndex;
use crate::oscillator::{a0_unchecked, check_complex_time};
use crate::potential::TaylorPotential;
use crate::quadrature::{simplex_integrate, QuadratureOptions};
use crate::symcalc::wick::{bl_expectation, ComboSet};

/// Highest supported order: 3 in one dimension, 2 otherwise.
pub fn max_order(n: usize) -> usize {
    if n == 1 {
        3
    } else {
        2
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EngineOptions {
    pub quadrature: QuadratureOptions,
}

/// Contribution of one block `l` to `a_j`.
#[derive(Clone, Debug, Serialize)]
pub struct BlockTerm {
    pub l: usize,
    pub signature: i32,
    /// `∫ P_{l+j} b_l(0) ds` over the simplex.
    pub integral: C64,
    /// Calibrated phase `φ_{j,l}`.
    pub prefactor: C64,
    /// `a_0 φ_{j,l} ∫ P_{l+j} b_l(0)`.
    pub contribution: C64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WaveInvariantValue {
    pub j: usize,
    pub tau: C64,
    pub a0: C64,
    pub value: C64,
    pub breakdown: Vec<BlockTerm>,
}

impl WaveInvariantValue {
    pub fn block(&self, l: usize) -> C64 {
        self.breakdown
            .iter()
            .find(|b| b.l == l)
            .map(|b| b.contribution)
            .unwrap_or_default()
    }
}

/// `i^{l(n−1)+n/2} e^{iπ sgn/4}` with the principal branch for `i^{n/2}`.
pub fn printed_phase(l: usize, n: usize, signature: i32) -> C64 {
    let quarter_turns = (l * (n - 1)) as f64 + n as f64 / 2.0 + signature as f64 / 2.0;
    C64::from_polar(1.0, quarter_turns * PI / 2.0)
}

/// Unimodular correction applied on top of [`printed_phase`].
pub fn calibration_phase(j: usize, l: usize, n: usize) -> C64 {
    let sign = if (j + l) % 2 == 0 { 1.0 } else { -1.0 };
    sign * C64::i().powi(-((l * n) as i32))
}

fn check_order(pot: &TaylorPotential, j: usize) -> Result<()> {
    let n = pot.dimension();
    if j > max_order(n) {
        return Err(Error::OrderTooHigh {
            j,
            max: max_order(n),
            n,
        });
    }
    pot.require_order_for(j)
}

/// `∫ E_{H_l⁻¹}[b_l] ds` over the simplex for an explicit set of monomial combos.
pub fn combo_integral(
    combos: &ComboSet,
    omega: &[f64],
    tau: C64,
    opts: &EngineOptions,
) -> Result<C64> {
    if combos.is_empty() {
        return Ok(C64::new(0.0, 0.0));
    }
    let f = |s: &[C64]| bl_expectation(combos, omega, tau, s);
    simplex_integrate(&f, combos.l, tau, &opts.quadrature)
}

/// `a_j(τ)` at complex time `τ = t − iε` (`ε ≥ 0`).
pub fn wave_invariant_at(
    pot: &TaylorPotential,
    j: usize,
    tau: C64,
    opts: &EngineOptions,
) -> Result<WaveInvariantValue> {
    let omega = pot.frequencies();
    let n = omega.len();
    check_complex_time(omega, tau)?;
    let a0 = a0_unchecked(omega, tau);
    if j == 0 {
        return Ok(WaveInvariantValue {
            j,
            tau,
            a0,
            value: a0,
            breakdown: Vec::new(),
        });
    }
    check_order(pot, j)?;
    let mut breakdown = Vec::with_capacity(2 * j);
    for l in 1..=2 * j {
        let m = l + j;
        let signature = hessian_signature(l, omega, tau.re)?;
        let integral = if 2 * m < 3 * l {
            C64::new(0.0, 0.0)
        } else {
            let combos = ComboSet::new(pot, l, 2 * m as u32);
            C64::i().powi(-(m as i32)) * combo_integral(&combos, omega, tau, opts)?
        };
        let prefactor = printed_phase(l, n, signature) * calibration_phase(j, l, n);
        breakdown.push(BlockTerm {
            l,
            signature,
            integral,
            prefactor,
            contribution: a0 * prefactor * integral,
        });
    }
    let value = breakdown.iter().map(|b| b.contribution).sum();
    Ok(WaveInvariantValue {
        j,
        tau,
        a0,
        value,
        breakdown,
    })
}

/// `a_j(t)` at real `t`.
pub fn wave_invariant(
    pot: &TaylorPotential,
    j: usize,
    t: f64,
    opts: &EngineOptions,
) -> Result<WaveInvariantValue> {
    wave_invariant_at(pot, j, C64::new(t, 0.0), opts)
}

/// `a_j` over a grid of complex times, in parallel.
pub fn wave_invariant_grid(
    pot: &TaylorPotential,
    j: usize,
    taus: &[C64],
    opts: &EngineOptions,
) -> Result<Vec<WaveInvariantValue>> {
    taus.par_iter()
        .map(|&tau| wave_invariant_at(pot, j, tau, opts))
        .collect()
}

/// The leading linear term exactly as displayed:
/// `a_0/(2i)^{j+1} Σ_{|α|=j+1} (t/α!)(−cot(ωt/2)/(2ω))^α D_{2α}V(0)`.
pub fn displayed_linear_term(pot: &TaylorPotential, j: usize, tau: C64) -> Result<C64> {
    let omega = pot.frequencies();
    check_complex_time(omega, tau)?;
    let n = omega.len();
    let mut sum = C64::new(0.0, 0.0);
    for alpha in MultiIndex::all_with_norm(n, j as u32 + 1) {
        let d = pot.derivative(&alpha.doubled());
        if d == 0.0 {
            continue;
        }
        let mut term = C64::new(d / alpha.factorial_f64(), 0.0);
        for (k, &w) in omega.iter().enumerate() {
            let c = -(tau * w * 0.5).tan().inv() / (2.0 * w);
            term *= c.powi(alpha.get(k) as i32);
        }
        sum += term;
    }
    Ok(a0_unchecked(omega, tau) * tau * sum / C64::new(0.0, 2.0).powi(j as i32 + 1))
}

/// The linear term of `a_j` in the engine's (oracle-checked) convention:
/// the displayed term times `(−1)^j i`.
pub fn wave_invariant_linear_term(pot: &TaylorPotential, j: usize, tau: C64) -> Result<C64> {
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    Ok(displayed_linear_term(pot, j, tau)? * C64::new(0.0, sign))
}

/// Coefficient of `D^{2j+1}_{2α+3e_n}V · D³_{3e_n}V`, without
/// the `a_0` factor: `(c₂/(2i)^{j+2}) (t/α!) (−cot(ωt/2)/(2ω))^α ×
/// ((2α_n+5)/(3ω_n²(α_n+1)) (−cot(ω_n t/2)/(2ω_n))² + 1/(9ω_n⁴))`.
pub fn cubic_block_coefficient(
    j: usize,
    alpha: &MultiIndex,
    omega: &[f64],
    tau: C64,
    c2: C64,
) -> Result<C64> {
    let n = omega.len();
    if alpha.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: alpha.dim(),
        });
    }
    if j == 0 || alpha.norm() as usize != j - 1 {
        return Err(Error::InvalidArgument(format!(
            "|α| = {} must equal j − 1 = {}",
            alpha.norm(),
            j as i64 - 1
        )));
    }
    let cot_term = |w: f64| -(tau * w * 0.5).tan().inv() / (2.0 * w);
    let mut pow = C64::new(1.0 / alpha.factorial_f64(), 0.0);
    for (k, &w) in omega.iter().enumerate() {
        pow *= cot_term(w).powi(alpha.get(k) as i32);
    }
    let wn = omega[n - 1];
    let an = alpha.get(n - 1) as f64;
    let bracket = (2.0 * an + 5.0) / (an + 1.0) / (3.0 * wn * wn) * cot_term(wn).powi(2)
        + 1.0 / (9.0 * wn.powi(4));
    Ok(c2 / C64::new(0.0, 2.0).powi(j as i32 + 2) * tau * pow * bracket)
}

/// Coefficient of the single derivative `D_β V(0)` in `a_j(τ)` (block `l = 1`).
pub fn linear_sensitivity(
    omega: &[f64],
    j: usize,
    beta: &MultiIndex,
    tau: C64,
    opts: &EngineOptions,
) -> Result<C64> {
    let combos = ComboSet::from_factor_lists(
        omega.len(),
        &[vec![(beta.clone(), 1.0 / beta.factorial_f64())]],
        2 * (j as u32 + 1),
    );
    block_value(omega, j, 1, &combos, tau, opts)
}

/// Coefficient of the product `D_a V(0) · D_b V(0)` in `a_j(τ)` (block `l = 2`).
/// For `a = b` this is the coefficient of `(D_a V(0))²`.
pub fn product_sensitivity(
    omega: &[f64],
    j: usize,
    a: &MultiIndex,
    b: &MultiIndex,
    tau: C64,
    opts: &EngineOptions,
) -> Result<C64> {
    let total = 2 * (j as u32 + 2);
    let fa = (a.clone(), 1.0 / a.factorial_f64());
    let fb = (b.clone(), 1.0 / b.factorial_f64());
    let n = omega.len();
    let mut acc = C64::new(0.0, 0.0);
    let pairs: Vec<(_, _)> = if a == b {
        vec![(fa.clone(), fa)]
    } else {
        vec![(fa.clone(), fb.clone()), (fb, fa)]
    };
    for (f1, f2) in pairs {
        let combos = ComboSet::from_factor_lists(n, &[vec![f1], vec![f2]], total);
        acc += block_value(omega, j, 2, &combos, tau, opts)?;
    }
    Ok(acc)
}

fn block_value(
    omega: &[f64],
    j: usize,
    l: usize,
    combos: &ComboSet,
    tau: C64,
    opts: &EngineOptions,
) -> Result<C64> {
    check_complex_time(omega, tau)?;
    let n = omega.len();
    let m = (l + j) as i32;
    let sig = hessian_signature(l, omega, tau.re)?;
    let integral = C64::i().powi(-m) * combo_integral(combos, omega, tau, opts)?;
    Ok(a0_unchecked(omega, tau) * printed_phase(l, n, sig) * calibration_phase(j, l, n) * integral)
}

/// One complex constant `c` minimizing `Σ|y − c f|²`, with relative residual.
pub fn fit_constant(y: &[C64], f: &[C64]) -> (C64, f64) {
    let num: C64 = f.iter().zip(y).map(|(fi, yi)| fi.conj() * yi).sum();
    let den: f64 = f.iter().map(|fi| fi.norm_sqr()).sum();
    let c = num / den;
    let res: f64 = f.iter().zip(y).map(|(fi, yi)| (yi - c * fi).norm_sqr()).sum();
    let scale: f64 = y.iter().map(|v| v.norm_sqr()).sum();
    (c, (res / scale).sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct CalibrationReport {
    pub n: usize,
    pub j: usize,
    pub c1: C64,
    pub c1_residual: f64,
    pub c2: C64,
    pub c2_residual: f64,
    pub times: Vec<f64>,
}

/// Fit `c₁(n)` and `c₂(n)` of the two displayed families for order `j` from
/// engine sensitivities on a t-grid. The sensitivities are divided by `a_0(t)`,
/// which the two families do not carry. Fails when either residual exceeds `tol`.
pub fn calibrate_constants(
    omega: &[f64],
    j: usize,
    times: &[f64],
    tol: f64,
    opts: &EngineOptions,
) -> Result<CalibrationReport> {
    let n = omega.len();
    let e_n = MultiIndex::unit(n, n - 1);
    let cubic = MultiIndex::new(e_n.entries().iter().map(|a| 3 * a).collect())?;
    let (mut y1, mut f1, mut y2, mut f2) = (vec![], vec![], vec![], vec![]);
    for &t in times {
        let tau = C64::new(t, 0.0);
        let a0 = a0_unchecked(omega, tau);
        for alpha in MultiIndex::all_with_norm(n, j as u32 + 1) {
            let beta = alpha.doubled();
            y1.push(linear_sensitivity(omega, j, &beta, tau, opts)? / a0);
            // unit derivative reproduces the displayed basis function
            let unit = TaylorPotential::new(omega.to_vec(), [(beta, 1.0)], Default::default())?;
            f1.push(displayed_linear_term(&unit, j, tau)? / a0);
        }
        if j >= 1 {
            for alpha in MultiIndex::all_with_norm(n, j as u32 - 1) {
                let high = alpha.doubled().add(&cubic)?;
                y2.push(product_sensitivity(omega, j, &high, &cubic, tau, opts)? / a0);
                f2.push(cubic_block_coefficient(j, &alpha, omega, tau, C64::new(1.0, 0.0))?);
            }
        }
    }
    let (c1, r1) = fit_constant(&y1, &f1);
    let (c2, r2) = fit_constant(&y2, &f2);
    let report = CalibrationReport {
        n,
        j,
        c1,
        c1_residual: r1,
        c2,
        c2_residual: r2,
        times: times.to_vec(),
    };
    let worst = r1.max(r2);
    if worst > tol {
        log::warn!("calibration residuals {r1:e}, {r2:e} exceed {tol:e}");
        return Err(Error::Residual {
            residual: worst,
            tol,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> EngineOptions {
        EngineOptions::default()
    }

    #[test]
    fn prefactor_is_dimension_free() {
        for n in 1..=3 {
            for j in 1..=3 {
                for l in 1..=2 * j {
                    let p = printed_phase(l, n, -(n as i32)) * calibration_phase(j, l, n);
                    let expect = C64::new(if j % 2 == 0 { 1.0 } else { -1.0 }, 0.0) * C64::i().powi(l as i32);
                    assert!((p - expect).norm() < 1e-14, "n={n} j={j} l={l}");
                }
            }
        }
    }

    #[test]
    fn zero_anharmonicity_gives_zero() {
        let pot = TaylorPotential::harmonic(vec![1.0, 2f64.sqrt()])
            .unwrap()
            .with_truncation_order(6)
            .unwrap();
        for j in 1..=2 {
            let v = wave_invariant(&pot, j, 0.7, &opts()).unwrap();
            assert_eq!(v.value, C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn quartic_a1_value() {
        let pot = TaylorPotential::one_dim_monomial(1.0, &[(4, 0.05)]).unwrap();
        let v = wave_invariant(&pot, 1, 1.0, &opts()).unwrap();
        assert!((v.value - C64::new(0.131042976, 0.0)).norm() < 1e-8, "{}", v.value);
        let lin = wave_invariant_linear_term(&pot, 1, C64::new(1.0, 0.0)).unwrap();
        assert!((v.value - lin).norm() < 1e-12);
        let disp = displayed_linear_term(&pot, 1, C64::new(1.0, 0.0)).unwrap();
        assert!((disp - C64::new(0.0, 0.131042976)).norm() < 1e-8);
    }

    #[test]
    fn l_support_and_polynomiality() {
        let pot = TaylorPotential::one_dim(1.0, &[(3, 0.6), (4, 1.2)]).unwrap();
        let v1 = wave_invariant(&pot, 1, 0.8, &opts()).unwrap();
        let v2 = wave_invariant(&pot.scaled(2.0), 1, 0.8, &opts()).unwrap();
        for (a, b) in v1.breakdown.iter().zip(&v2.breakdown) {
            let f = 2f64.powi(a.l as i32);
            assert!((b.contribution - a.contribution * f).norm() < 1e-12 * (1.0 + b.contribution.norm()));
        }
        assert_eq!(v1.breakdown.len(), 2);
    }

    #[test]
    fn order_guards() {
        let pot = TaylorPotential::one_dim(1.0, &[(3, 0.6), (4, 1.2)]).unwrap();
        assert!(matches!(
            wave_invariant(&pot, 2, 0.8, &opts()),
            Err(Error::TruncationOrder { .. })
        ));
        let pot2 = TaylorPotential::harmonic(vec![1.0, 1.3]).unwrap().with_truncation_order(10).unwrap();
        assert!(matches!(
            wave_invariant(&pot2, 3, 0.5, &opts()),
            Err(Error::OrderTooHigh { .. })
        ));
    }

    #[test]
    fn cubic_block_reduces_at_first_order() {
        let (w, t) = (1.3f64, 0.7f64);
        let v = cubic_block_coefficient(1, &MultiIndex::zeros(1), &[w], C64::new(t, 0.0), C64::new(1.0, 0.0)).unwrap();
        let c = -1.0 / (2.0 * w * (w * t / 2.0).tan());
        let expect = t * (5.0 / (3.0 * w * w) * c * c + 1.0 / (9.0 * w.powi(4))) / C64::new(0.0, 2.0).powi(3);
        assert!((v - expect).norm() < 1e-14);
        assert!(cubic_block_coefficient(2, &MultiIndex::zeros(1), &[w], C64::new(t, 0.0), C64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn fit_constant_exact() {
        let f = vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.1), C64::new(0.3, -0.7)];
        let c = C64::new(0.2, -1.5);
        let y: Vec<C64> = f.iter().map(|v| c * v).collect();
        let (got, res) = fit_constant(&y, &f);
        assert!((got - c).norm() < 1e-14);
        assert!(res < 1e-14);
    }
}
