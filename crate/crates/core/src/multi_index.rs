use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Exponent vector indexing Taylor derivatives and monomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidIndex("empty multi-index".into()));
        }
        Ok(MultiIndex(entries))
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n.max(1)])
    }

    pub fn unit(n: usize, k: usize) -> Self {
        let mut v = vec![0; n];
        v[k] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, k: usize) -> u32 {
        self.0[k]
    }

    pub fn norm(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Product of entry factorials, failing loudly on u128 overflow.
    pub fn factorial(&self) -> Result<u128> {
        let mut acc: u128 = 1;
        for &a in &self.0 {
            for m in 2..=a as u128 {
                acc = acc
                    .checked_mul(m)
                    .ok_or_else(|| Error::Overflow(self.to_string()))?;
            }
        }
        Ok(acc)
    }

    pub fn factorial_f64(&self) -> f64 {
        self.0.iter().map(|&a| factorial_f64(a)).product()
    }

    pub fn add(&self, other: &MultiIndex) -> Result<MultiIndex> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn doubled(&self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|a| 2 * a).collect())
    }

    pub fn is_even(&self) -> bool {
        self.0.iter().all(|a| a % 2 == 0)
    }

    /// Halve an even index.
    pub fn half(&self) -> Option<MultiIndex> {
        self.is_even()
            .then(|| MultiIndex(self.0.iter().map(|a| a / 2).collect()))
    }

    /// `x^α` for a point `x`.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&a, &xi)| xi.powi(a as i32))
            .product()
    }

    /// All indices of dimension `n` with `|α| = m`, in lexicographic order.
    pub fn all_with_norm(n: usize, m: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            let n = cur.len();
            if k == n - 1 {
                cur[k] = left;
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for a in (0..=left).rev() {
                cur[k] = a;
                rec(k + 1, left - a, cur, out);
            }
        }
        if n > 0 {
            rec(0, m, &mut cur, &mut out);
        }
        out.sort();
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

pub fn factorial_f64(a: u32) -> f64 {
    (2..=a).map(f64::from).product()
}
