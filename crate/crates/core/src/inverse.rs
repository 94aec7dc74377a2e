//! Recovery of the frequencies and Taylor coefficients from wave invariants.
//!
//! Fitting bases come from the forward engine (sensitivities of `a_j` in each
//! unknown), so generator and fitter share every convention.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result, Stage, StageExt};
use crate::invariants::{linear_sensitivity, product_sensitivity, wave_invariant_at, EngineOptions};
use crate::linalg::lstsq_real_unknowns;
use crate::multi_index::MultiIndex;
use crate::oscillator::a0_unchecked;
use crate::potential::{PotentialFile, SymmetryClass, TaylorPotential};
use crate::spectral::SolverSettings;
use crate::trace::{compute_spectra, extract_invariants, table_from_spectra, Extraction, TraceMode, TraceTable};

/// Samples `(τ, a_j(τ))`.
pub type Samples = Vec<(C64, C64)>;

/// Condition of the column-scaled design above which a fitting basis is
/// rejected. For n = 2 with a cubic column the design sits near 1e7 at
/// ω = (1, √2) and above 1e13 for ω₂/ω₁ = 2 or ≈ 1.
pub const DESIGN_CONDITION_LIMIT: f64 = 1e8;

/// 40 points on `[0.15, 0.9] · π/(2 ω_max)`.
pub fn fitting_t_grid(omega_max: f64) -> Vec<f64> {
    let top = FRAC_PI_2 / omega_max;
    (0..40)
        .map(|i| top * (0.15 + 0.75 * i as f64 / 39.0))
        .collect()
}

#[derive(Clone, Debug)]
pub struct FrequencyOptions {
    pub starts: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for FrequencyOptions {
    fn default() -> Self {
        FrequencyOptions {
            starts: 8,
            tol: 1e-8,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FrequencyFit {
    pub omega: Vec<f64>,
    /// Relative RMS residual.
    pub residual: f64,
}

fn freq_residuals(w: &[f64], samples: &[(C64, C64)]) -> (DVector<f64>, DMatrix<f64>) {
    let m = samples.len();
    let mut r = DVector::zeros(2 * m);
    let mut jac = DMatrix::zeros(2 * m, w.len());
    for (i, &(tau, y)) in samples.iter().enumerate() {
        let f = a0_unchecked(w, tau);
        let s = 1.0 / y.norm();
        let d = (f - y) * s;
        r[2 * i] = d.re;
        r[2 * i + 1] = d.im;
        for (k, &wk) in w.iter().enumerate() {
            // ∂f/∂ω_k = −f (τ/2) cot(ω_k τ/2)
            let g = -f * tau * 0.5 / (tau * wk * 0.5).tan() * s;
            jac[(2 * i, k)] = g.re;
            jac[(2 * i + 1, k)] = g.im;
        }
    }
    (r, jac)
}

fn levenberg_marquardt(start: Vec<f64>, samples: &[(C64, C64)]) -> (Vec<f64>, f64) {
    let mut w = start;
    let (mut r, mut jac) = freq_residuals(&w, samples);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    for _ in 0..300 {
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        let mut a = jtj.clone();
        for k in 0..w.len() {
            a[(k, k)] += lambda * jtj[(k, k)].max(1e-30);
        }
        let Some(step) = a.lu().solve(&(-g)) else {
            lambda *= 10.0;
            continue;
        };
        let trial: Vec<f64> = w.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
        if trial.iter().any(|&x| !(x > 0.0)) {
            lambda *= 4.0;
            continue;
        }
        let (r2, j2) = freq_residuals(&trial, samples);
        let c2 = r2.norm_squared();
        if c2.is_finite() && c2 < cost {
            let rel_step = step.norm() / w.iter().map(|x| x * x).sum::<f64>().sqrt();
            w = trial;
            r = r2;
            jac = j2;
            let improved = cost - c2;
            cost = c2;
            lambda = (lambda / 3.0).max(1e-15);
            if rel_step < 1e-15 || improved < 1e-30 {
                break;
            }
        } else {
            lambda *= 4.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    (w, cost)
}

/// Seed from the small-`τ` behaviour `1/a_0 ≈ (iτ)^n Πω (1 − Σω²τ²/24)`.
fn frequency_seed(samples: &[(C64, C64)], n: usize) -> Vec<f64> {
    let mut by_t: Vec<&(C64, C64)> = samples.iter().collect();
    by_t.sort_by(|a, b| a.0.norm().total_cmp(&b.0.norm()));
    if n == 1 {
        // 1/(2i a_0) = sin(ωτ/2)
        let (tau, y) = *by_t[0];
        let z = (C64::new(0.0, 2.0) * y).inv();
        let w = (z.asin() * 2.0 / tau).re;
        return vec![w.abs().max(1e-6)];
    }
    let g = |&(tau, y): &(C64, C64)| (y.inv() / (C64::i() * tau).powi(n as i32), tau * tau);
    let (g1, s1) = g(by_t[0]);
    let (g2, s2) = g(by_t[1.min(by_t.len() - 1)]);
    // g = P − P S τ²/24
    let slope = if (s2 - s1).norm() > 0.0 { (g2 - g1) / (s2 - s1) } else { C64::new(0.0, 0.0) };
    let p = (g1 - slope * s1).re.abs().max(1e-12);
    let s = (-24.0 * slope / p).re;
    if n == 2 {
        let disc = s * s - 4.0 * p * p;
        if s > 0.0 && disc >= 0.0 {
            let a = 0.5 * (s + disc.sqrt());
            let b = 0.5 * (s - disc.sqrt());
            if b > 0.0 {
                return vec![b.sqrt(), a.sqrt()];
            }
        }
    }
    vec![p.powf(1.0 / n as f64); n]
}

/// Slope of `log |a_0|` against `log |τ|` on the smallest quarter of the samples.
fn small_time_power(samples: &[(C64, C64)]) -> f64 {
    let mut pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|(tau, y)| (tau.norm().ln(), y.norm().ln()))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let k = (pts.len() / 4).max(3).min(pts.len());
    let pts = &pts[..k];
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Fit `Π 1/(2i sin(ω_k τ/2))` to `a_0` samples. Result sorted ascending.
pub fn recover_frequencies(samples: &[(C64, C64)], n: usize, opts: &FrequencyOptions) -> Result<FrequencyFit> {
    if n == 0 || samples.len() < n + 2 {
        return Err(Error::InvalidArgument(format!(
            "{} samples cannot determine {n} frequencies",
            samples.len()
        )));
    }
    let spread = samples.iter().map(|s| s.0.norm()).fold(0.0, f64::max)
        / samples.iter().map(|s| s.0.norm()).fold(f64::INFINITY, f64::min);
    if spread > 1.5 {
        let p = small_time_power(samples);
        if (p + n as f64).abs() > 0.5 {
            return Err(Error::Inconsistent(format!(
                "a_0 decays like τ^{p:.2} at small τ, expected τ^-{n}"
            )));
        }
    }
    let seed = frequency_seed(samples, n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = vec![seed.clone()];
    while starts.len() < opts.starts.max(1) {
        starts.push(seed.iter().map(|w| w * rng.random_range(0.7..1.3)).collect());
    }
    let best = starts
        .into_par_iter()
        .map(|s| levenberg_marquardt(s, samples))
        .collect::<Vec<_>>()
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one start");
    let (mut omega, cost) = best;
    omega.sort_by(f64::total_cmp);
    let residual = (cost / samples.len() as f64).sqrt();
    if !(residual <= opts.tol) {
        return Err(Error::Residual {
            residual,
            tol: opts.tol,
        });
    }
    let limit = FRAC_PI_2 / omega[n - 1];
    if samples.iter().any(|s| s.0.re >= limit) {
        log::warn!("samples extend past π/(2ω_max) = {limit} of the recovered frequencies");
    }
    Ok(FrequencyFit { omega, residual })
}

fn cubic_index(n: usize) -> MultiIndex {
    let mut e = vec![0u32; n];
    e[n - 1] = 3;
    MultiIndex::new(e).expect("nonempty")
}

/// Scale each row by `1/|y_i|` so every time carries relative weight; large
/// small-`t` samples would otherwise dominate.
fn relative_rows(a: &mut DMatrix<C64>, b: &mut DVector<C64>, y: &[(C64, C64)]) {
    for (i, (_, yi)) in y.iter().enumerate() {
        let n = yi.norm();
        if n > 0.0 {
            a.row_mut(i).unscale_mut(n);
            b[i] /= n;
        }
    }
}

fn gram_condition(cond: f64) -> f64 {
    cond * cond
}

fn check_design(cond: f64, omega: &[f64]) -> Result<()> {
    if cond > DESIGN_CONDITION_LIMIT {
        if omega.len() > 1 {
            return Err(Error::Hypothesis(format!(
                "fitting basis is ill-conditioned (design condition {cond:.2e} > {DESIGN_CONDITION_LIMIT:e}); \
                 the frequencies {omega:?} are commensurate or nearly so, and the basis is only independent \
                 for rationally independent ω"
            )));
        }
        return Err(Error::IllConditioned {
            cond,
            threshold: DESIGN_CONDITION_LIMIT,
        });
    }
    Ok(())
}

fn check_symmetry(n: usize, symmetry: SymmetryClass) -> Result<()> {
    if n >= 2 && symmetry == SymmetryClass::General {
        return Err(Error::Unsupported(
            "recovery in n ≥ 2 needs the even or even-plus-cubic symmetry".into(),
        ));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct Order34 {
    pub fourth_order: BTreeMap<MultiIndex, f64>,
    /// Fitted `(D³_{3e_n} V(0))²`.
    pub third_order_square: f64,
    pub third_order_abs: f64,
    pub residual: f64,
    pub gram_condition: f64,
}

/// Fit `a_1` samples for `{D⁴_{2α}V(0)}_{|α|=2}` and `(D³_{3e_n}V(0))²`.
pub fn recover_order34(
    samples: &[(C64, C64)],
    omega: &[f64],
    symmetry: SymmetryClass,
    opts: &EngineOptions,
) -> Result<Order34> {
    let n = omega.len();
    check_symmetry(n, symmetry)?;
    let fourth: Vec<MultiIndex> = MultiIndex::all_with_norm(n, 2).iter().map(|a| a.doubled()).collect();
    let with_cubic = symmetry != SymmetryClass::Even;
    let cubic = cubic_index(n);
    let cols = fourth.len() + with_cubic as usize;
    let rows: Vec<Vec<C64>> = samples
        .par_iter()
        .map(|&(tau, _)| {
            let mut row = Vec::with_capacity(cols);
            for b in &fourth {
                row.push(linear_sensitivity(omega, 1, b, tau, opts)?);
            }
            if with_cubic {
                row.push(product_sensitivity(omega, 1, &cubic, &cubic, tau, opts)?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut a = DMatrix::from_fn(samples.len(), cols, |i, j| rows[i][j]);
    let mut b = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    relative_rows(&mut a, &mut b, samples);
    let (x, residual, cond) = lstsq_real_unknowns(&a, &b)?;
    check_design(cond, omega)?;
    let gram = gram_condition(cond);
    let fourth_order = fourth.iter().cloned().zip(x.iter().copied()).collect();
    let sq = if with_cubic { x[cols - 1] } else { 0.0 };
    // tolerance scaled by the quartic data the fit sees
    let scale = x.iter().take(fourth.len()).map(|v| v * v).fold(1.0, f64::max);
    if sq < -1e-6 * scale {
        return Err(Error::Inconsistent(format!("fitted (D³V)² = {sq:e} is negative")));
    }
    Ok(Order34 {
        fourth_order,
        third_order_square: sq,
        third_order_abs: sq.max(0.0).sqrt(),
        residual,
        gram_condition: gram,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InductiveStep {
    pub j: usize,
    /// Recovered `D^{2j+1}_{2α+3e_n}` and `D^{2j+2}_{2α}` values.
    pub recovered: BTreeMap<MultiIndex, f64>,
    pub residual: f64,
    pub gram_condition: f64,
}

/// Step `j ≥ 2`: subtract the engine's `a_j` of the known orders `≤ 2j`, then
/// fit the remainder linearly in the order-`2j+1` and `2j+2` unknowns.
pub fn recover_inductive(
    samples: &[(C64, C64)],
    known: &TaylorPotential,
    j: usize,
    tol: f64,
    opts: &EngineOptions,
) -> Result<InductiveStep> {
    let omega = known.frequencies();
    let n = omega.len();
    if j < 2 {
        return Err(Error::InvalidArgument("induction starts at j = 2".into()));
    }
    check_symmetry(n, known.symmetry())?;
    let cubic = cubic_index(n);
    let d3 = known.derivative(&cubic);
    if d3 == 0.0 {
        return Err(Error::Hypothesis(format!(
            "D³_{cubic}V(0) = 0; the induction needs a nonzero cubic coefficient"
        )));
    }
    if let Some((b, _)) = known.derivatives().find(|(b, _)| b.norm() as usize > 2 * j) {
        return Err(Error::InvalidArgument(format!(
            "known data includes {b} above order {}",
            2 * j
        )));
    }
    let base = known.clone().with_truncation_order(2 * j as u32 + 2)?;
    let even: Vec<MultiIndex> = MultiIndex::all_with_norm(n, j as u32 + 1)
        .iter()
        .map(|a| a.doubled())
        .collect();
    let odd: Vec<MultiIndex> = if known.symmetry() == SymmetryClass::Even {
        Vec::new()
    } else {
        MultiIndex::all_with_norm(n, j as u32 - 1)
            .iter()
            .map(|a| a.doubled().add(&cubic))
            .collect::<Result<_>>()?
    };
    let unknowns: Vec<MultiIndex> = odd.iter().chain(&even).cloned().collect();
    let rows: Vec<(Vec<C64>, C64)> = samples
        .par_iter()
        .map(|&(tau, y)| {
            let mut row = Vec::with_capacity(unknowns.len());
            for b in &odd {
                row.push(d3 * product_sensitivity(omega, j, b, &cubic, tau, opts)?);
            }
            for b in &even {
                row.push(linear_sensitivity(omega, j, b, tau, opts)?);
            }
            let known_part = wave_invariant_at(&base, j, tau, opts)?.value;
            Ok((row, y - known_part))
        })
        .collect::<Result<_>>()?;
    let mut a = DMatrix::from_fn(samples.len(), unknowns.len(), |i, k| rows[i].0[k]);
    let mut b = DVector::from_iterator(samples.len(), rows.iter().map(|r| r.1));
    relative_rows(&mut a, &mut b, samples);
    let (x, _, cond) = lstsq_real_unknowns(&a, &b)?;
    check_design(cond, omega)?;
    let gram = gram_condition(cond);
    // weighted rows: the full samples have unit norm each
    let fitted = &a * x.map(|v| C64::new(v, 0.0));
    let residual = (fitted - &b).norm() / (samples.len() as f64).sqrt();
    if residual > tol {
        return Err(Error::Residual { residual, tol });
    }
    Ok(InductiveStep {
        j,
        recovered: unknowns.into_iter().zip(x.iter().copied()).collect(),
        residual,
        gram_condition: gram,
    })
}

/// Where the invariants fed to the pipeline come from.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "route")]
pub enum Route {
    /// Exact engine values at real times.
    Formula,
    /// Spectra, regularized traces at `t − iε`, and `ħ` extraction.
    Empirical {
        hbar_grid: Vec<f64>,
        eps: f64,
        max_j: usize,
        solver: SolverSettings,
    },
}

impl Route {
    /// `ε = 0.7` keeps `|τ|` away from the small-time growth of the `a_j`,
    /// which is what limits the `ħ` fit on `[0.02, 0.1]`.
    pub fn empirical_default() -> Self {
        Route::Empirical {
            hbar_grid: crate::trace::default_hbar_grid(),
            eps: 0.7,
            max_j: 4,
            solver: SolverSettings::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub stage: String,
    pub residual: f64,
    pub gram_condition: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecoveryReport {
    pub route: Route,
    pub target_order: u32,
    pub recovered: PotentialFile,
    pub frequencies: Vec<f64>,
    /// `|D³_{3e_n}V(0)|` only; the positive representative is stored.
    pub sign_ambiguity: bool,
    pub stages: Vec<StageReport>,
}

impl RecoveryReport {
    pub fn potential(&self) -> Result<TaylorPotential> {
        self.recovered.clone().into_potential()
    }

    /// Human-readable table of recovered coefficients, with truth when given.
    pub fn table(&self, truth: Option<&TaylorPotential>) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "{:<12} {:>22} {:>22} {:>12}", "coefficient", "recovered", "true", "rel.err");
        let mut row = |name: String, got: f64, want: Option<f64>| {
            let (w, e) = match want {
                Some(w) => (format!("{w:.12e}"), format!("{:.2e}", rel_err(got, w))),
                None => (String::from("-"), String::from("-")),
            };
            let _ = writeln!(s, "{name:<12} {got:>22.12e} {w:>22} {e:>12}");
        };
        for (k, w) in self.frequencies.iter().enumerate() {
            row(format!("omega_{k}"), *w, truth.map(|p| p.frequencies()[k]));
        }
        for d in &self.recovered.derivatives {
            let want = truth.map(|p| {
                let v = p.derivative(&d.index);
                if self.sign_ambiguity && d.index.norm() % 2 == 1 {
                    v.abs() * d.value.signum()
                } else {
                    v
                }
            });
            row(format!("D{}", d.index), d.value, want);
        }
        for st in &self.stages {
            let _ = writeln!(s, "stage {:<20} residual {:.2e}", st.stage, st.residual);
        }
        s
    }
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        (got - want).abs() / want.abs()
    }
}

/// Sampled `a_0 … a_J` on one time grid.
#[derive(Clone, Debug)]
pub struct InvariantSamples {
    pub per_order: Vec<Samples>,
}

impl InvariantSamples {
    pub fn max_j(&self) -> usize {
        self.per_order.len().saturating_sub(1)
    }

    /// Engine values at real times.
    pub fn from_formula(v: &TaylorPotential, t_grid: &[f64], max_j: usize, opts: &EngineOptions) -> Result<Self> {
        let per_order = (0..=max_j)
            .map(|j| {
                t_grid
                    .par_iter()
                    .map(|&t| {
                        let tau = C64::new(t, 0.0);
                        Ok((tau, wave_invariant_at(v, j, tau, opts)?.value))
                    })
                    .collect::<Result<Samples>>()
            })
            .collect::<Result<_>>()?;
        Ok(InvariantSamples { per_order })
    }

    pub fn from_extraction(ex: &Extraction) -> Self {
        let jmax = ex.rows.first().map(|r| r.coeffs.len()).unwrap_or(0);
        InvariantSamples {
            per_order: (0..jmax)
                .map(|j| ex.rows.iter().map(|r| (r.tau, r.coeffs[j])).collect())
                .collect(),
        }
    }
}

/// Residual tolerances of a recovery run.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RecoveryTolerances {
    pub frequencies: f64,
    pub fit: f64,
}

impl RecoveryTolerances {
    /// Exact engine data.
    pub fn formula() -> Self {
        RecoveryTolerances {
            frequencies: 1e-8,
            fit: 1e-6,
        }
    }

    /// Extracted data carries truncation error of the `ħ` fit.
    pub fn empirical() -> Self {
        RecoveryTolerances {
            frequencies: 1e-3,
            fit: 1e-1,
        }
    }
}

/// Frequencies, then orders 3–4, then the induction up to `target_order`.
pub fn recover_from_samples(
    samples: &InvariantSamples,
    n: usize,
    target_order: u32,
    symmetry: SymmetryClass,
    tol: RecoveryTolerances,
    seed: u64,
) -> Result<(TaylorPotential, bool, Vec<StageReport>)> {
    if !(4..=8).contains(&target_order) || target_order % 2 == 1 {
        return Err(Error::InvalidArgument(format!("target order {target_order} must be 4, 6 or 8")).at(Stage::Config));
    }
    let max_j = (target_order as usize - 2) / 2;
    if samples.max_j() < max_j {
        return Err(Error::InvalidArgument(format!(
            "samples reach a_{} but order {target_order} needs a_{max_j}",
            samples.max_j()
        ))
        .at(Stage::Config));
    }
    let opts = EngineOptions::default();
    let mut stages = Vec::new();
    let freq = recover_frequencies(
        &samples.per_order[0],
        n,
        &FrequencyOptions {
            tol: tol.frequencies,
            seed,
            ..Default::default()
        },
    )
    .stage(Stage::Frequencies)?;
    stages.push(StageReport {
        stage: Stage::Frequencies.to_string(),
        residual: freq.residual,
        gram_condition: None,
    });
    let omega = freq.omega.clone();
    let o34 = recover_order34(&samples.per_order[1], &omega, symmetry, &opts).stage(Stage::Order34)?;
    if o34.residual > tol.fit {
        return Err(Error::Residual {
            residual: o34.residual,
            tol: tol.fit,
        }
        .at(Stage::Order34));
    }
    stages.push(StageReport {
        stage: Stage::Order34.to_string(),
        residual: o34.residual,
        gram_condition: Some(o34.gram_condition),
    });
    let mut derivs: Vec<(MultiIndex, f64)> = o34.fourth_order.into_iter().collect();
    if symmetry != SymmetryClass::Even {
        derivs.push((cubic_index(n), o34.third_order_abs));
    }
    let mut known = TaylorPotential::new(omega.clone(), derivs, symmetry).stage(Stage::Order34)?;
    for j in 2..=max_j {
        let step = recover_inductive(&samples.per_order[j], &known, j, tol.fit, &opts).stage(Stage::Inductive)?;
        stages.push(StageReport {
            stage: format!("{} j={j}", Stage::Inductive),
            residual: step.residual,
            gram_condition: Some(step.gram_condition),
        });
        let mut all: Vec<(MultiIndex, f64)> = known.derivatives().map(|(b, v)| (b.clone(), *v)).collect();
        all.extend(step.recovered);
        known = TaylorPotential::new(omega.clone(), all, symmetry).stage(Stage::Inductive)?;
    }
    Ok((known, o34.third_order_abs > 0.0, stages))
}

/// Spectra, regularized traces at `t − iε`, and the `ħ` fit.
pub fn empirical_samples(
    v: &TaylorPotential,
    hbar_grid: &[f64],
    eps: f64,
    max_j: usize,
    solver: &SolverSettings,
) -> Result<(InvariantSamples, TraceTable)> {
    let mode = TraceMode::Regularized { eps };
    let spectra = compute_spectra(v, hbar_grid, &mode, solver).stage(Stage::Spectrum)?;
    // the observer only sees spectra: size the time grid from the lowest gap
    let s = &spectra[0];
    let gap = s
        .eigenvalues
        .windows(2)
        .map(|w| (w[1] - w[0]) / s.hbar)
        .fold(f64::INFINITY, f64::min);
    if !gap.is_finite() {
        return Err(Error::InvalidArgument("fewer than two levels below the cutoff".into()).at(Stage::Spectrum));
    }
    let t_grid = fitting_t_grid(1.1 * gap);
    let table = table_from_spectra(&spectra, mode, &t_grid, *solver).stage(Stage::Sweep)?;
    let ex = extract_invariants(&table, max_j, 1e-4).stage(Stage::Extract)?;
    Ok((InvariantSamples::from_extraction(&ex), table))
}

/// One-dimensional pipeline from a hidden potential to its recovered Taylor data.
pub fn end_to_end_1d(v_true: &TaylorPotential, target_order: u32, route: Route) -> Result<RecoveryReport> {
    if v_true.dimension() != 1 {
        return Err(Error::Unsupported("end-to-end recovery is one-dimensional".into()).at(Stage::Config));
    }
    if !(4..=8).contains(&target_order) || target_order % 2 == 1 {
        return Err(Error::InvalidArgument(format!("target order {target_order} must be 4, 6 or 8")).at(Stage::Config));
    }
    let max_j = (target_order as usize - 2) / 2;
    let (samples, tol) = match &route {
        Route::Formula => {
            let v = v_true
                .clone()
                .with_truncation_order(target_order.max(v_true.truncation_order()))
                .stage(Stage::Config)?;
            let s = InvariantSamples::from_formula(&v, &fitting_t_grid(v.max_frequency()), max_j, &EngineOptions::default())
                .stage(Stage::Sweep)?;
            (s, RecoveryTolerances::formula())
        }
        Route::Empirical {
            hbar_grid,
            eps,
            max_j: fit_j,
            solver,
        } => {
            if *fit_j < max_j {
                return Err(Error::InvalidArgument(format!(
                    "extraction order {fit_j} is below the {max_j} needed for order {target_order}"
                ))
                .at(Stage::Config));
            }
            (empirical_samples(v_true, hbar_grid, *eps, *fit_j, solver)?.0, RecoveryTolerances::empirical())
        }
    };
    let (known, sign_ambiguity, stages) =
        recover_from_samples(&samples, 1, target_order, SymmetryClass::General, tol, 0)?;
    Ok(RecoveryReport {
        route,
        target_order,
        recovered: PotentialFile::from(&known),
        frequencies: known.frequencies().to_vec(),
        sign_ambiguity,
        stages,
    })
}
