//! Truncated and regularized traces, `ħ` sweeps, and extraction of the
//! `ħ`-expansion coefficients.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::lstsq;
use crate::potential::TaylorPotential;
use crate::spectral::{solve, EigenvalueSet, SolverSettings};

pub use crate::perturbation::perturbation_oracle_a1;

/// Condition number above which extraction refuses to fit.
pub const CONDITION_LIMIT: f64 = 1e10;
/// Condition number above which extraction warns.
pub const CONDITION_WARN: f64 = 1e8;
/// `e^{−TAIL}` is the weight below which regularized levels are dropped.
pub const REGULARIZED_TAIL: f64 = 36.0;

/// Smooth cutoff: `Θ = 1` on `[0, pδ]`, `0` on `[δ, ∞)`, built from `e^{−1/x}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffFunction {
    pub delta: f64,
    pub plateau: f64,
    /// Indicator of `[0, δ]` instead of the smooth profile.
    #[serde(default)]
    pub sharp: bool,
}

fn bump(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

impl CutoffFunction {
    pub fn new(delta: f64, plateau: f64) -> Result<Self> {
        if !(delta > 0.0) || !(plateau > 0.0 && plateau < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "cutoff needs δ > 0 and plateau in (0, 1), got δ = {delta}, p = {plateau}"
            )));
        }
        Ok(CutoffFunction {
            delta,
            plateau,
            sharp: false,
        })
    }

    pub fn sharp(delta: f64) -> Result<Self> {
        let mut c = Self::new(delta, 0.5)?;
        c.sharp = true;
        Ok(c)
    }

    /// `δ = ½ min ω`, `p = ½`.
    pub fn default_for(pot: &TaylorPotential) -> Self {
        Self::new(0.5 * pot.min_frequency(), 0.5).expect("valid defaults")
    }

    pub fn eval(&self, e: f64) -> f64 {
        if self.sharp {
            return if e <= self.delta { 1.0 } else { 0.0 };
        }
        let start = self.plateau * self.delta;
        if e <= start {
            return 1.0;
        }
        if e >= self.delta {
            return 0.0;
        }
        let u = (self.delta - e) / (self.delta - start);
        let a = bump(u);
        a / (a + bump(1.0 - u))
    }
}

/// `Σ Θ(E_j) e^{−itE_j/ħ}`.
pub fn truncated_trace(eigs: &EigenvalueSet, theta: &CutoffFunction, t: f64) -> Result<C64> {
    if eigs.cutoff < theta.delta {
        return Err(Error::CutoffTooLow {
            have: eigs.cutoff,
            need: theta.delta,
        });
    }
    Ok(eigs
        .eigenvalues
        .iter()
        .map(|&e| theta.eval(e) * C64::new(0.0, -t * e / eigs.hbar).exp())
        .sum())
}

/// `Σ e^{−(it+ε)E_j/ħ}` over every computed level.
pub fn regularized_trace(eigs: &EigenvalueSet, t: f64, eps: f64) -> Result<C64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("ε = {eps} must be positive")));
    }
    let tail = (-eps * eigs.cutoff / eigs.hbar).exp();
    if tail > 1e-12 {
        log::warn!("regularized trace at ħ = {}: dropped levels weigh up to {tail:e}", eigs.hbar);
    }
    Ok(eigs
        .eigenvalues
        .iter()
        .map(|&e| C64::new(-eps * e / eigs.hbar, -t * e / eigs.hbar).exp())
        .sum())
}

/// How table entries are formed from a spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum TraceMode {
    Truncated { cutoff: CutoffFunction },
    /// Trace at complex time `t − iε`.
    Regularized { eps: f64 },
}

impl TraceMode {
    /// Eigenvalue cutoff the solve needs at this `ħ`.
    pub fn required_cutoff(&self, hbar: f64) -> f64 {
        match self {
            TraceMode::Truncated { cutoff } => cutoff.delta,
            TraceMode::Regularized { eps } => hbar * REGULARIZED_TAIL / eps,
        }
    }

    /// Time at which the table column is evaluated.
    pub fn tau(&self, t: f64) -> C64 {
        match self {
            TraceMode::Truncated { .. } => C64::new(t, 0.0),
            TraceMode::Regularized { eps } => C64::new(t, -eps),
        }
    }

    pub fn evaluate(&self, eigs: &EigenvalueSet, t: f64) -> Result<C64> {
        match self {
            TraceMode::Truncated { cutoff } => truncated_trace(eigs, cutoff, t),
            TraceMode::Regularized { eps } => regularized_trace(eigs, t, *eps),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub hbar: f64,
    pub levels: usize,
    pub cutoff: f64,
    pub estimated_accuracy: f64,
    pub grid: crate::spectral::GridSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub solver: SolverSettings,
    pub mode: TraceMode,
    pub spectra: Vec<SpectrumSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceTable {
    pub t_grid: Vec<f64>,
    pub hbar_grid: Vec<f64>,
    /// `values[i][k]` at `hbar_grid[i]`, `t_grid[k]`.
    pub values: Vec<Vec<C64>>,
    pub provenance: Provenance,
}

impl TraceTable {
    pub fn shape(&self) -> (usize, usize) {
        (self.hbar_grid.len(), self.t_grid.len())
    }

    pub fn tau(&self, k: usize) -> C64 {
        self.provenance.mode.tau(self.t_grid[k])
    }
}

fn check_increasing(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() || v.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument(format!(
            "{name} must be nonempty and strictly increasing"
        )));
    }
    Ok(())
}

/// `n` geometric points on `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (r * i as f64).exp()).collect()
}

/// `ħ` grid used when none is given: 8 geometric points on `[0.02, 0.1]`.
pub fn default_hbar_grid() -> Vec<f64> {
    geometric_grid(0.02, 0.1, 8)
}

/// Eigenvalue target `1e−3 ħ²`.
pub fn accuracy_target(hbar: f64) -> f64 {
    1e-3 * hbar * hbar
}

/// One solve per `ħ`, in parallel. Any failure names its `ħ`.
pub fn compute_spectra(
    pot: &TaylorPotential,
    hbar_grid: &[f64],
    mode: &TraceMode,
    settings: &SolverSettings,
) -> Result<Vec<EigenvalueSet>> {
    check_increasing("ħ grid", hbar_grid)?;
    hbar_grid
        .par_iter()
        .map(|&h| {
            let wrap = |e: Error| Error::AtHbar {
                hbar: h,
                source: Box::new(e),
            };
            let set = solve(pot, h, mode.required_cutoff(h), settings).map_err(wrap)?;
            let target = accuracy_target(h);
            if !(set.estimated_accuracy <= target) {
                return Err(wrap(Error::Accuracy {
                    hbar: h,
                    estimate: set.estimated_accuracy,
                    target,
                }));
            }
            Ok(set)
        })
        .collect()
}

/// Table from precomputed spectra, so one sweep can serve several modes.
pub fn table_from_spectra(
    spectra: &[EigenvalueSet],
    mode: TraceMode,
    t_grid: &[f64],
    solver: SolverSettings,
) -> Result<TraceTable> {
    check_increasing("t grid", t_grid)?;
    let hbar_grid: Vec<f64> = spectra.iter().map(|s| s.hbar).collect();
    check_increasing("ħ grid", &hbar_grid)?;
    let values = spectra
        .par_iter()
        .map(|s| t_grid.iter().map(|&t| mode.evaluate(s, t)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(TraceTable {
        t_grid: t_grid.to_vec(),
        hbar_grid,
        values,
        provenance: Provenance {
            solver,
            mode,
            spectra: spectra
                .iter()
                .map(|s| SpectrumSummary {
                    hbar: s.hbar,
                    levels: s.eigenvalues.len(),
                    cutoff: s.cutoff,
                    estimated_accuracy: s.estimated_accuracy,
                    grid: s.grid,
                })
                .collect(),
        },
    })
}

pub fn hbar_sweep(
    pot: &TaylorPotential,
    mode: TraceMode,
    t_grid: &[f64],
    hbar_grid: &[f64],
    settings: &SolverSettings,
) -> Result<TraceTable> {
    let spectra = compute_spectra(pot, hbar_grid, &mode, settings)?;
    table_from_spectra(&spectra, mode, t_grid, *settings)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractedRow {
    pub t: f64,
    pub tau: C64,
    /// `â_0, …, â_J`.
    pub coeffs: Vec<C64>,
    pub residual: f64,
    pub condition: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub rows: Vec<ExtractedRow>,
    pub warnings: Vec<String>,
}

/// Per-`t` least squares of the table against `1, ħ, …, ħ^J`.
///
/// `residual_warn` is the relative residual above which a warning is recorded.
pub fn extract_invariants(table: &TraceTable, max_j: usize, residual_warn: f64) -> Result<Extraction> {
    let m = table.hbar_grid.len();
    if m < max_j + 3 {
        return Err(Error::InvalidArgument(format!(
            "{m} ħ values cannot support order {max_j}; need at least {}",
            max_j + 3
        )));
    }
    let design = DMatrix::from_fn(m, max_j + 1, |i, j| C64::new(table.hbar_grid[i].powi(j as i32), 0.0));
    let rows = (0..table.t_grid.len())
        .into_par_iter()
        .map(|k| {
            let b = DVector::from_iterator(m, table.values.iter().map(|row| row[k]));
            let ls = lstsq(&design, &b)?;
            Ok(ExtractedRow {
                t: table.t_grid[k],
                tau: table.tau(k),
                coeffs: ls.x.iter().copied().collect(),
                residual: ls.rel_residual,
                condition: ls.condition,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let cond = rows.first().map(|r| r.condition).unwrap_or(1.0);
    if cond > CONDITION_LIMIT {
        return Err(Error::IllConditioned {
            cond,
            threshold: CONDITION_LIMIT,
        });
    }
    let mut warnings = Vec::new();
    if cond > CONDITION_WARN {
        warnings.push(format!(
            "design condition {cond:.2e} exceeds {CONDITION_WARN:.0e}; order {max_j} is beyond what this ħ grid resolves"
        ));
    }
    for r in &rows {
        if r.residual > residual_warn {
            warnings.push(format!(
                "t = {}: relative residual {:.2e} above {residual_warn:.0e}",
                r.t, r.residual
            ));
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(Extraction { rows, warnings })
}

/// Value at `ε = 0` of the degree-`deg` polynomial fit through `(ε_i, v_i)`.
pub fn extrapolate_to_real_time(eps: &[f64], values: &[C64], deg: usize) -> Result<C64> {
    if eps.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: eps.len(),
            got: values.len(),
        });
    }
    let a = DMatrix::from_fn(eps.len(), deg + 1, |i, j| C64::new(eps[i].powi(j as i32), 0.0));
    let ls = lstsq(&a, &DVector::from_column_slice(values))?;
    Ok(ls.x[0])
}

/// Largest change in `â_j` when the plateau of a truncated cutoff changes.
pub fn theta_sensitivity(
    spectra: &[EigenvalueSet],
    t_grid: &[f64],
    delta: f64,
    plateaus: (f64, f64),
    max_j: usize,
) -> Result<Vec<f64>> {
    let solver = SolverSettings::default();
    let fit = |p: f64| -> Result<Extraction> {
        let mode = TraceMode::Truncated {
            cutoff: CutoffFunction::new(delta, p)?,
        };
        extract_invariants(&table_from_spectra(spectra, mode, t_grid, solver)?, max_j, f64::INFINITY)
    };
    let (a, b) = (fit(plateaus.0)?, fit(plateaus.1)?);
    Ok((0..=max_j)
        .map(|j| {
            a.rows
                .iter()
                .zip(&b.rows)
                .map(|(x, y)| (x.coeffs[j] - y.coeffs[j]).norm())
                .fold(0.0, f64::max)
        })
        .collect())
}
