//! Taylor model of the potential `V(x) = ½ Σ ω_k² x_k² + W(x)` with `W = O(|x|³)`.
//!
//! Derivative values `D_β V(0)` are stored rather than monomial coefficients;
//! the `1/β!` factor is applied only at evaluation.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryClass {
    #[default]
    General,
    /// `V = f(x_1², …, x_n²)`: every stored index is even.
    Even,
    /// `V = f(x²) + x_n³ g(x²)`: indices of the form `2α` or `2α + 3e_n`.
    EvenPlusCubic,
}

impl SymmetryClass {
    pub fn admits(self, beta: &MultiIndex) -> bool {
        match self {
            SymmetryClass::General => true,
            SymmetryClass::Even => beta.is_even(),
            SymmetryClass::EvenPlusCubic => {
                if beta.is_even() {
                    return true;
                }
                let n = beta.dim();
                let last = beta.get(n - 1);
                last >= 3
                    && (last - 3) % 2 == 0
                    && beta.entries()[..n - 1].iter().all(|a| a % 2 == 0)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorPotential {
    frequencies: Vec<f64>,
    derivs: BTreeMap<MultiIndex, f64>,
    truncation_order: u32,
    symmetry: SymmetryClass,
}

impl TaylorPotential {
    pub fn new(
        frequencies: Vec<f64>,
        derivs: impl IntoIterator<Item = (MultiIndex, f64)>,
        symmetry: SymmetryClass,
    ) -> Result<Self> {
        let n = frequencies.len();
        if n == 0 {
            return Err(Error::InvalidPotential("no frequencies".into()));
        }
        for (k, &w) in frequencies.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidPotential(format!(
                    "frequency ω_{k} = {w} must be positive"
                )));
            }
        }
        let mut map = BTreeMap::new();
        for (beta, v) in derivs {
            if beta.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: beta.dim(),
                });
            }
            if beta.norm() < 3 {
                return Err(Error::InvalidPotential(format!(
                    "derivative {beta} has order < 3; the quadratic part is fixed by the frequencies"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidPotential(format!("derivative {beta} is not finite")));
            }
            if !symmetry.admits(&beta) {
                return Err(Error::InvalidPotential(format!(
                    "derivative {beta} violates symmetry {symmetry:?}"
                )));
            }
            if v != 0.0 {
                map.insert(beta, v);
            }
        }
        let truncation_order = map.keys().map(MultiIndex::norm).max().unwrap_or(2);
        let pot = TaylorPotential {
            frequencies,
            derivs: map,
            truncation_order,
            symmetry,
        };
        for (i, k, p, q) in pot.commensurability_hints() {
            log::warn!("ω_{i}/ω_{k} is close to {p}/{q}; frequencies may be commensurate");
        }
        Ok(pot)
    }

    pub fn harmonic(frequencies: Vec<f64>) -> Result<Self> {
        Self::new(frequencies, [], SymmetryClass::General)
    }

    /// One-dimensional potential from derivative values `(order, V^{(order)}(0))`.
    pub fn one_dim(omega: f64, derivs: &[(u32, f64)]) -> Result<Self> {
        Self::new(
            vec![omega],
            derivs
                .iter()
                .map(|&(d, v)| (MultiIndex::new(vec![d]).expect("nonempty"), v)),
            SymmetryClass::General,
        )
    }

    /// One-dimensional potential `ω²x²/2 + Σ c_d x^d` from monomial coefficients.
    pub fn one_dim_monomial(omega: f64, coeffs: &[(u32, f64)]) -> Result<Self> {
        let derivs: Vec<(u32, f64)> = coeffs
            .iter()
            .map(|&(d, c)| (d, c * crate::multi_index::factorial_f64(d)))
            .collect();
        Self::one_dim(omega, &derivs)
    }

    /// Raise the declared truncation order above the highest stored derivative.
    pub fn with_truncation_order(mut self, order: u32) -> Result<Self> {
        let max = self.derivs.keys().map(MultiIndex::norm).max().unwrap_or(2);
        if order < max {
            return Err(Error::InvalidPotential(format!(
                "truncation order {order} below stored derivative order {max}"
            )));
        }
        self.truncation_order = order;
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        self.frequencies.len()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn min_frequency(&self) -> f64 {
        self.frequencies.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_frequency(&self) -> f64 {
        self.frequencies.iter().cloned().fold(0.0, f64::max)
    }

    pub fn truncation_order(&self) -> u32 {
        self.truncation_order
    }

    pub fn symmetry(&self) -> SymmetryClass {
        self.symmetry
    }

    pub fn derivative(&self, beta: &MultiIndex) -> f64 {
        self.derivs.get(beta).copied().unwrap_or(0.0)
    }

    pub fn derivatives(&self) -> impl Iterator<Item = (&MultiIndex, &f64)> {
        self.derivs.iter()
    }

    pub fn is_harmonic(&self) -> bool {
        self.derivs.is_empty()
    }

    /// Largest time of the forward-formula domain, `min_k π/(2ω_k)`.
    pub fn time_limit(&self) -> f64 {
        std::f64::consts::FRAC_PI_2 / self.max_frequency()
    }

    /// Computing `a_j` needs derivatives up to order `2j + 2`.
    pub fn require_order_for(&self, j: usize) -> Result<()> {
        let need = 2 * j as u32 + 2;
        if self.truncation_order < need {
            return Err(Error::TruncationOrder {
                have: self.truncation_order,
                need,
            });
        }
        Ok(())
    }

    /// Copy with one derivative replaced; the symmetry tag drops to `General`
    /// when the new key is not admitted.
    pub fn with_derivative(&self, beta: MultiIndex, value: f64) -> Result<Self> {
        let mut derivs = self.derivs.clone();
        if value == 0.0 {
            derivs.remove(&beta);
        } else {
            derivs.insert(beta.clone(), value);
        }
        let symmetry = if self.symmetry.admits(&beta) {
            self.symmetry
        } else {
            SymmetryClass::General
        };
        let order = self.truncation_order.max(beta.norm());
        Self::new(self.frequencies.clone(), derivs, symmetry)?.with_truncation_order(order)
    }

    /// Same frequencies with every anharmonic derivative multiplied by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        out.derivs = self
            .derivs
            .iter()
            .filter(|_| lambda != 0.0)
            .map(|(b, v)| (b.clone(), v * lambda))
            .collect();
        out
    }

    /// Keep only the derivatives selected by `keep`.
    pub fn filtered(&self, keep: impl Fn(&MultiIndex) -> bool) -> Self {
        let mut out = self.clone();
        out.derivs.retain(|b, _| keep(b));
        out
    }

    /// The anharmonic part `W(x) = Σ D_βV(0)/β! x^β`.
    pub fn anharmonic(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self
            .derivs
            .iter()
            .map(|(b, v)| v / b.factorial_f64() * b.monomial(x))
            .sum())
    }

    /// `V(x)`, evaluated exactly as a polynomial.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let w = self.anharmonic(x)?;
        let h: f64 = self
            .frequencies
            .iter()
            .zip(x)
            .map(|(w, xi)| 0.5 * w * w * xi * xi)
            .sum();
        Ok(h + w)
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got,
            });
        }
        Ok(())
    }

    /// Pairs `(i, k, p, q)` with `ω_i/ω_k` within `1e-9` of `p/q`, `q ≤ 64`,
    /// found from continued-fraction convergents. Floats cannot decide exact
    /// rational dependence, so this is advisory only.
    pub fn commensurability_hints(&self) -> Vec<(usize, usize, u64, u64)> {
        let mut out = Vec::new();
        let w = &self.frequencies;
        for i in 0..w.len() {
            for k in i + 1..w.len() {
                if let Some((p, q)) = close_rational(w[i] / w[k], 64, 1e-9) {
                    out.push((i, k, p, q));
                }
            }
        }
        out
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: PotentialFile = serde_json::from_str(s)?;
        file.into_potential()
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&PotentialFile::from(self))?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }
}

fn close_rational(r: f64, max_den: u64, tol: f64) -> Option<(u64, u64)> {
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut x = r;
    for _ in 0..40 {
        let a = x.floor();
        if a > 1e12 {
            break;
        }
        let a = a as u64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            return None;
        }
        if ((h2 as f64) / (k2 as f64) - r).abs() <= tol * r.abs().max(1.0) {
            return Some((h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = x - x.floor();
        if frac == 0.0 {
            break;
        }
        x = 1.0 / frac;
    }
    None
}

/// On-disk JSON schema of a potential description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialFile {
    pub dimension: usize,
    pub frequencies: Vec<f64>,
    #[serde(default)]
    pub derivatives: Vec<DerivativeEntry>,
    #[serde(default)]
    pub symmetry: SymmetryClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_order: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DerivativeEntry {
    pub index: MultiIndex,
    pub value: f64,
}

impl PotentialFile {
    pub fn into_potential(self) -> Result<TaylorPotential> {
        if self.dimension != self.frequencies.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: self.frequencies.len(),
            });
        }
        let pot = TaylorPotential::new(
            self.frequencies,
            self.derivatives.into_iter().map(|d| (d.index, d.value)),
            self.symmetry,
        )?;
        match self.truncation_order {
            Some(order) => pot.with_truncation_order(order),
            None => Ok(pot),
        }
    }
}

impl From<&TaylorPotential> for PotentialFile {
    fn from(p: &TaylorPotential) -> Self {
        PotentialFile {
            dimension: p.dimension(),
            frequencies: p.frequencies.clone(),
            derivatives: p
                .derivs
                .iter()
                .map(|(b, v)| DerivativeEntry {
                    index: b.clone(),
                    value: *v,
                })
                .collect(),
            symmetry: p.symmetry,
            truncation_order: Some(p.truncation_order),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let v = TaylorPotential::harmonic(vec![1.0]).unwrap();
        assert!((v.evaluate(&[0.2]).unwrap() - 0.02).abs() < 1e-15);

        let v = TaylorPotential::one_dim(1.0, &[(3, 0.6)]).unwrap();
        assert!((v.evaluate(&[1.0]).unwrap() - 0.6).abs() < 1e-15);

        let b = 0.05;
        let v = TaylorPotential::new(
            vec![1.0, 2f64.sqrt()],
            [(mi(&[4, 0]), 24.0 * b)],
            SymmetryClass::Even,
        )
        .unwrap();
        assert!((v.evaluate(&[1.0, 0.0]).unwrap() - 0.55).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let v = TaylorPotential::harmonic(vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            v.evaluate(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn low_order_and_bad_frequency_rejected() {
        assert!(TaylorPotential::one_dim(1.0, &[(2, 1.0)]).is_err());
        assert!(TaylorPotential::one_dim(-1.0, &[]).is_err());
    }

    #[test]
    fn symmetry_validation() {
        let ok = TaylorPotential::new(
            vec![1.0, 2f64.sqrt()],
            [(mi(&[0, 3]), 1.0), (mi(&[2, 3]), 1.0), (mi(&[2, 2]), 1.0)],
            SymmetryClass::EvenPlusCubic,
        );
        assert!(ok.is_ok());
        for bad in [[3u32, 0], [1, 2], [0, 5], [1, 3]] {
            let r = TaylorPotential::new(
                vec![1.0, 2f64.sqrt()],
                [(mi(&bad), 1.0)],
                SymmetryClass::EvenPlusCubic,
            );
            let admitted = SymmetryClass::EvenPlusCubic.admits(&mi(&bad));
            assert_eq!(r.is_ok(), admitted, "{bad:?}");
        }
        assert!(!SymmetryClass::EvenPlusCubic.admits(&mi(&[3, 0])));
        assert!(!SymmetryClass::Even.admits(&mi(&[0, 3])));
    }

    #[test]
    fn json_round_trip() {
        let v = TaylorPotential::new(
            vec![1.0, 2f64.sqrt()],
            [(mi(&[0, 3]), 0.6), (mi(&[2, 2]), 0.3)],
            SymmetryClass::EvenPlusCubic,
        )
        .unwrap()
        .with_truncation_order(6)
        .unwrap();
        let s = v.to_json_string().unwrap();
        assert_eq!(TaylorPotential::from_json_str(&s).unwrap(), v);
    }

    #[test]
    fn commensurate_detected() {
        let v = TaylorPotential::harmonic(vec![1.0, 1.5]).unwrap();
        assert_eq!(v.commensurability_hints(), vec![(0, 1, 2, 3)]);
        let v = TaylorPotential::harmonic(vec![1.0, 2f64.sqrt()]).unwrap();
        assert!(v.commensurability_hints().is_empty());
    }

    #[test]
    fn order_requirement() {
        let v = TaylorPotential::one_dim(1.0, &[(3, 0.6), (4, 1.2)]).unwrap();
        assert!(v.require_order_for(1).is_ok());
        assert!(matches!(
            v.require_order_for(2),
            Err(Error::TruncationOrder { have: 4, need: 6 })
        ));
    }
}
