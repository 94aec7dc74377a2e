//! Bottom-of-the-well wave invariants of `P̂ = −½ħ²Δ + V(x)`.
//!
//! For `V = ½Σω_k²x_k² + W` the truncated trace `Tr Θ(P̂) e^{−itP̂/ħ}` has an
//! expansion `Σ_j a_j(t) ħ^j` for small `t`. This crate
//!
//! - evaluates `a_j(t)` from the Taylor coefficients of `V` by stationary phase
//!   ([`invariants`], built on [`hessian`] and [`symcalc`]),
//! - checks them against independent oracles: Rayleigh–Schrödinger theory
//!   ([`perturbation`]) and traces of numerically computed spectra
//!   ([`spectral`], [`trace`]),
//! - recovers frequencies and Taylor coefficients from the invariants
//!   ([`inverse`]).
//!
//! Each capability has a runnable example:
//!
//! ```bash
//! cargo run --release --example hessian_identities
//! cargo run --release --example forward_invariants
//! cargo run --release --example oracle_check
//! cargo run --release --example spectrum
//! cargo run --release --example trace_extraction
//! cargo run --release --example calibration
//! cargo run --release --example inversion
//! cargo run --release --example end_to_end
//! ```

pub mod cli;
pub mod error;
pub mod hessian;
pub mod inverse;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod multi_index;
pub mod oscillator;
pub mod perturbation;
pub mod potential;
pub mod quadrature;
pub mod spectral;
pub mod symcalc;
pub mod trace;
pub mod verify;

pub use error::{Error, Result, Stage};
pub use multi_index::MultiIndex;
pub use num_complex::Complex64 as C64;
pub use potential::{SymmetryClass, TaylorPotential};
