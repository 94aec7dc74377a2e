//! Sparse truncated multivariate polynomials with real coefficients.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Exponent vector over the polynomial's variables.
pub type Exponents = Vec<u16>;

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedPolynomial {
    num_vars: usize,
    max_degree: u32,
    terms: BTreeMap<Exponents, f64>,
}

impl TruncatedPolynomial {
    pub fn zero(num_vars: usize, max_degree: u32) -> Self {
        TruncatedPolynomial {
            num_vars,
            max_degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, max_degree: u32, c: f64) -> Self {
        let mut p = Self::zero(num_vars, max_degree);
        p.add_term(vec![0; num_vars], c);
        p
    }

    /// `Σ_r c_r u_r`.
    pub fn linear(coeffs: &[f64], max_degree: u32) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n, max_degree);
        if max_degree >= 1 {
            for (r, &c) in coeffs.iter().enumerate() {
                let mut e = vec![0; n];
                e[r] = 1;
                p.add_term(e, c);
            }
        }
        p
    }

    pub fn monomial(num_vars: usize, max_degree: u32, exps: Exponents, c: f64) -> Result<Self> {
        if exps.len() != num_vars {
            return Err(Error::DimensionMismatch {
                expected: num_vars,
                got: exps.len(),
            });
        }
        let mut p = Self::zero(num_vars, max_degree);
        p.add_term(exps, c);
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &f64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u16]) -> f64 {
        self.terms.get(exps).copied().unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.coeff(&vec![0; self.num_vars])
    }

    fn add_term(&mut self, exps: Exponents, c: f64) {
        if c == 0.0 || degree(&exps) > self.max_degree {
            return;
        }
        let v = self.terms.get(&exps).copied().unwrap_or(0.0) + c;
        if v == 0.0 {
            self.terms.remove(&exps);
        } else {
            self.terms.insert(exps, v);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.clone();
        out.max_degree = self.max_degree.max(other.max_degree);
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = Self::zero(self.num_vars, self.max_degree);
        for (e, &v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    /// Homogeneous part of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let mut out = Self::zero(self.num_vars, self.max_degree);
        for (e, &v) in &self.terms {
            if degree(e) == d {
                out.add_term(e.clone(), v);
            }
        }
        out
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, &c)| {
                c * e
                    .iter()
                    .zip(u)
                    .map(|(&a, &x)| x.powi(a as i32))
                    .product::<f64>()
            })
            .sum()
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: other.num_vars,
            });
        }
        Ok(())
    }
}

pub fn degree(e: &[u16]) -> u32 {
    e.iter().map(|&a| a as u32).sum()
}

/// Product truncated at `bound` total degree.
pub fn poly_mul(
    p: &TruncatedPolynomial,
    q: &TruncatedPolynomial,
    bound: u32,
) -> Result<TruncatedPolynomial> {
    p.check_vars(q)?;
    let mut acc: BTreeMap<Exponents, f64> = BTreeMap::new();
    for (ea, &ca) in &p.terms {
        let da = degree(ea);
        if da > bound {
            continue;
        }
        for (eb, &cb) in &q.terms {
            if da + degree(eb) > bound {
                continue;
            }
            let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
            *acc.entry(e).or_insert(0.0) += ca * cb;
        }
    }
    acc.retain(|_, v| *v != 0.0);
    Ok(TruncatedPolynomial {
        num_vars: p.num_vars,
        max_degree: bound,
        terms: acc,
    })
}

/// `p^k` truncated at `bound`.
pub fn poly_pow(p: &TruncatedPolynomial, k: u32, bound: u32) -> Result<TruncatedPolynomial> {
    let mut out = TruncatedPolynomial::constant(p.num_vars, bound, 1.0);
    for _ in 0..k {
        out = poly_mul(&out, p, bound)?;
    }
    Ok(out)
}

/// `⟨A∇,∇⟩ p = Σ_{r,r'} A_{rr'} ∂_r ∂_{r'} p`.
pub fn apply_laplacian_form<A: Fn(usize, usize) -> f64>(
    p: &TruncatedPolynomial,
    a: A,
) -> TruncatedPolynomial {
    let n = p.num_vars;
    let mut acc: BTreeMap<Exponents, f64> = BTreeMap::new();
    for (e, &c) in &p.terms {
        for r in 0..n {
            if e[r] == 0 {
                continue;
            }
            let mut e1 = e.clone();
            let f1 = e1[r] as f64;
            e1[r] -= 1;
            for rp in 0..n {
                if e1[rp] == 0 {
                    continue;
                }
                let arr = a(r, rp);
                if arr == 0.0 {
                    continue;
                }
                let mut e2 = e1.clone();
                let f2 = e2[rp] as f64;
                e2[rp] -= 1;
                *acc.entry(e2).or_insert(0.0) += c * f1 * f2 * arr;
            }
        }
    }
    acc.retain(|_, v| *v != 0.0);
    TruncatedPolynomial {
        num_vars: n,
        max_degree: p.max_degree,
        terms: acc,
    }
}
