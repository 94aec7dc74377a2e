//! Low-lying eigenvalues of `−ħ²/2 Δ + V` by two unrelated solvers, plus
//! Weyl-count and min-max sanity checks.

mod banded;
mod checks;
mod fd;
mod hermite;

pub use banded::BandedSymmetric;
pub use checks::{minmax_bound_check, minmax_with_constant, sup_anharmonic, weyl_count_check, MinMaxReport, WeylReport};
pub use fd::{build_fd_hamiltonian, build_fd_hamiltonian_with, fd_node, wall_for_cutoff};
pub use hermite::{build_hermite_hamiltonian, position_powers, required_basis};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::TaylorPotential;

#[derive(Clone, Debug)]
pub enum SymMatrix {
    Diagonal(Vec<f64>),
    Banded(BandedSymmetric),
    Dense(DMatrix<f64>),
}

impl SymMatrix {
    pub fn size(&self) -> usize {
        match self {
            SymMatrix::Diagonal(d) => d.len(),
            SymMatrix::Banded(b) => b.size(),
            SymMatrix::Dense(m) => m.nrows(),
        }
    }
}

/// Every eigenvalue `≤ cutoff`, ascending.
pub fn low_eigenvalues(matrix: &SymMatrix, cutoff: f64) -> Result<Vec<f64>> {
    let mut out = match matrix {
        SymMatrix::Diagonal(d) => d.iter().copied().filter(|&e| e <= cutoff).collect(),
        SymMatrix::Banded(b) => b.eigenvalues_below(cutoff),
        SymMatrix::Dense(m) => {
            if m.nrows() != m.ncols() {
                return Err(Error::DimensionMismatch {
                    expected: m.nrows(),
                    got: m.ncols(),
                });
            }
            let ev = m.clone().try_symmetric_eigen(f64::EPSILON, 10_000).ok_or_else(|| {
                Error::NoConvergence {
                    order: m.nrows(),
                    change: f64::NAN,
                }
            })?;
            ev.eigenvalues.iter().copied().filter(|&e| e <= cutoff).collect::<Vec<f64>>()
        }
    };
    out.sort_by(f64::total_cmp);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Hermite,
    FiniteDifference,
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverKind::Hermite => "hermite",
            SolverKind::FiniteDifference => "finite-difference",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridSpec {
    Basis { per_axis: usize },
    Box { half_width: f64, points: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueSet {
    pub hbar: f64,
    pub cutoff: f64,
    pub eigenvalues: Vec<f64>,
    pub solver: SolverKind,
    pub grid: GridSpec,
    /// `max |E_j(N) − E_j(N/2)|` over shared indices.
    pub estimated_accuracy: f64,
}

/// Solver choice; `None` fields are sized from `ħ` and the cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SolverSettings {
    Hermite {
        basis: Option<usize>,
    },
    FiniteDifference {
        half_width: Option<f64>,
        points: Option<usize>,
    },
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings::Hermite { basis: None }
    }
}

fn halving_error(fine: &[f64], coarse: &[f64]) -> f64 {
    fine.iter()
        .zip(coarse)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Eigenvalues `≤ cutoff` with the accuracy estimate from a half-size rerun.
pub fn solve(
    pot: &TaylorPotential,
    hbar: f64,
    cutoff: f64,
    settings: &SolverSettings,
) -> Result<EigenvalueSet> {
    match *settings {
        SolverSettings::Hermite { basis } => {
            let need = required_basis(pot, hbar, cutoff);
            let n = match basis {
                Some(n) if n < need => {
                    return Err(Error::BasisTooSmall(format!(
                        "basis {n} per axis at ħ = {hbar} cannot resolve cutoff {cutoff}; need {need}"
                    )))
                }
                Some(n) => n,
                None => (2 * need).max(16),
            };
            let fine = low_eigenvalues(&build_hermite_hamiltonian(pot, hbar, n)?, cutoff)?;
            let coarse = low_eigenvalues(&build_hermite_hamiltonian(pot, hbar, n / 2)?, cutoff)?;
            Ok(EigenvalueSet {
                hbar,
                cutoff,
                estimated_accuracy: halving_error(&fine, &coarse),
                eigenvalues: fine,
                solver: SolverKind::Hermite,
                grid: GridSpec::Basis { per_axis: n },
            })
        }
        SolverSettings::FiniteDifference { half_width, points } => {
            let l = match half_width {
                Some(l) => {
                    let edge = pot.evaluate(&[l])?.min(pot.evaluate(&[-l])?);
                    if edge <= 3.0 * cutoff {
                        log::warn!("V(±{l}) = {edge} is not above 3× the cutoff {cutoff}; walls may bias the spectrum");
                    }
                    l
                }
                None => wall_for_cutoff(pot, cutoff, 3.0)?,
            };
            let m = points.unwrap_or_else(|| (32.0 * l / hbar.sqrt()).ceil() as usize);
            let fine = build_fd_hamiltonian(pot, hbar, l, m)?.eigenvalues_below(cutoff);
            let coarse = build_fd_hamiltonian(pot, hbar, l, m / 2)
                .map(|a| a.eigenvalues_below(cutoff))
                .unwrap_or_else(|e| {
                    log::warn!("half grid unusable for the accuracy estimate: {e}");
                    Vec::new()
                });
            let est = if coarse.is_empty() {
                f64::NAN
            } else {
                halving_error(&fine, &coarse)
            };
            Ok(EigenvalueSet {
                hbar,
                cutoff,
                estimated_accuracy: est,
                eigenvalues: fine,
                solver: SolverKind::FiniteDifference,
                grid: GridSpec::Box {
                    half_width: l,
                    points: m,
                },
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::osc_spectrum;

    #[test]
    fn diagonal_input() {
        let m = SymMatrix::Diagonal(vec![3.0, 1.0, 2.0]);
        assert_eq!(low_eigenvalues(&m, 2.5).unwrap(), vec![1.0, 2.0]);
        assert!(low_eigenvalues(&m, 0.5).unwrap().is_empty());
    }

    #[test]
    fn hermite_oscillator_lattice() {
        for omega in [vec![1.3], vec![1.0, 2f64.sqrt()]] {
            let pot = TaylorPotential::harmonic(omega.clone()).unwrap();
            let set = solve(&pot, 0.05, 1.0, &SolverSettings::default()).unwrap();
            let lattice = osc_spectrum(&omega, 0.05, 1.0).unwrap();
            assert_eq!(set.eigenvalues.len(), lattice.len());
            for (e, l) in set.eigenvalues.iter().zip(&lattice) {
                assert!((e - l.energy).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quartic_basis_convergence() {
        let pot = TaylorPotential::one_dim_monomial(1.0, &[(4, 0.05)]).unwrap();
        let a = low_eigenvalues(&build_hermite_hamiltonian(&pot, 0.1, 200).unwrap(), 1.0).unwrap();
        let b = low_eigenvalues(&build_hermite_hamiltonian(&pot, 0.1, 400).unwrap(), 1.0).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-12);
    }

    #[test]
    fn two_dim_quartic_against_dense_reference() {
        let pot = TaylorPotential::new(
            vec![1.0, 1.5],
            [
                (crate::MultiIndex::new(vec![4, 0]).unwrap(), 0.6),
                (crate::MultiIndex::new(vec![2, 2]).unwrap(), 0.2),
                (crate::MultiIndex::new(vec![0, 4]).unwrap(), 0.6),
            ],
            crate::SymmetryClass::Even,
        )
        .unwrap();
        let set = solve(&pot, 0.1, 0.6, &SolverSettings::default()).unwrap();
        assert!(set.eigenvalues.len() >= 5);
        assert!(set.estimated_accuracy < 1e-8, "{}", set.estimated_accuracy);
    }

    #[test]
    fn hermite_basis_guard() {
        let pot = TaylorPotential::one_dim_monomial(1.0, &[(4, 0.05)]).unwrap();
        let r = solve(&pot, 0.1, 1.0, &SolverSettings::Hermite { basis: Some(10) });
        assert!(matches!(r, Err(Error::BasisTooSmall(_))));
    }

    #[test]
    fn fd_harmonic_ground_state() {
        let pot = TaylorPotential::harmonic(vec![1.0]).unwrap();
        let a = build_fd_hamiltonian(&pot, 0.05, 4.0, 2000).unwrap();
        let e = a.eigenvalues_below(0.2);
        assert!((e[0] - 0.025).abs() < 1e-9, "{}", e[0]);
    }

    #[test]
    fn fd_particle_in_a_box() {
        let (hbar, l) = (0.1, 1.0);
        let a = build_fd_hamiltonian_with(|_| 0.0, hbar, l, 1500).unwrap();
        let e = a.eigenvalues_below(0.2);
        for (m, v) in e.iter().take(5).enumerate() {
            let m = (m + 1) as f64;
            let exact = hbar * hbar * std::f64::consts::PI.powi(2) * m * m / (8.0 * l * l);
            assert!((v - exact).abs() < 1e-9 * exact.max(1.0), "{v} vs {exact}");
        }
    }

    #[test]
    fn cross_solver_quartic() {
        let pot = TaylorPotential::one_dim_monomial(1.0, &[(4, 0.05)]).unwrap();
        let h = solve(&pot, 0.05, 0.6, &SolverSettings::default()).unwrap();
        let f = solve(
            &pot,
            0.05,
            0.6,
            &SolverSettings::FiniteDifference {
                half_width: None,
                points: None,
            },
        )
        .unwrap();
        let tol = h.estimated_accuracy + f.estimated_accuracy + 1e-12;
        assert_eq!(h.eigenvalues.len(), f.eigenvalues.len());
        for (a, b) in h.eigenvalues.iter().zip(&f.eigenvalues) {
            assert!((a - b).abs() <= tol, "{a} vs {b}, tol {tol}");
        }
    }
}
