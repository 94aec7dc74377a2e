//! Contraction route for `P_m b_l(0)`.
//!
//! For a homogeneous polynomial `p` of degree `2m`,
//! `(2^{−m}/m!)⟨A∇,∇⟩^m p` is the Gaussian moment of `p` with covariance `A`.
//! `b_l` is a product of powers of linear forms `L_i^k`, so the moment only
//! needs the Gram matrices `G^k_{ii'} = (L_i^k)ᵀ H_l⁻¹ L_{i'}^k`, one per axis
//! because `H_l⁻¹` does not couple axes. Moments of products of powers are
//! sums over perfect matchings, computed by a memoized pairing recursion.
//! Everything is complex so the same code runs at complex time.

use num_complex::Complex64 as C64;

use super::axis_form;
use crate::multi_index::MultiIndex;
use crate::potential::TaylorPotential;

/// `G_{ii'} = L_iᵀ H⁻¹ L_{i'}` for one axis, row-major `l × l`, from the
/// closed-form inverse blocks.
pub fn axis_gram(l: usize, w: f64, tau: C64, s: &[C64]) -> Vec<C64> {
    let half = tau * w * 0.5;
    let a_xx = -(half.tan().inv()) / (2.0 * w);
    let big_omega = w / (tau * w).tan();
    let mut c = Vec::with_capacity(l);
    let mut p = Vec::with_capacity(l);
    let mut q = Vec::with_capacity(l);
    for &si in s {
        let f = axis_form(l, 0, w, tau, si);
        c.push(f[0]);
        p.push((si * w).cos() * 0.5);
        q.push(-(si * w).sin() / w);
    }
    let mut g = vec![C64::new(0.0, 0.0); l * l];
    for i in 0..l {
        for ip in i..l {
            // z-block of form i sits at i and i+1 (when i+1 < l); H⁻¹(z_a, ξ_b) = −1 for a ≤ b
            let zc = |a: usize, b: usize| -> f64 {
                let mut cnt = 0.0;
                if a <= b {
                    cnt -= 1.0;
                }
                if a + 1 < l && a + 1 <= b {
                    cnt -= 1.0;
                }
                cnt
            };
            let v = a_xx * c[i] * c[ip] - big_omega * q[i] * q[ip]
                + p[i] * q[ip] * zc(i, ip)
                + q[i] * p[ip] * zc(ip, i);
            g[i * l + ip] = v;
            g[ip * l + i] = v;
        }
    }
    g
}

/// Memoized Gaussian moments `E[Π_i L_i^{d_i}]` for a fixed covariance.
pub struct MomentTable {
    l: usize,
    g: Vec<C64>,
    strides: Vec<usize>,
    radix: Vec<usize>,
    memo: Vec<C64>,
    known: Vec<bool>,
}

impl MomentTable {
    /// `max_deg[i]` bounds the power of form `i` that will be requested.
    pub fn new(g: Vec<C64>, max_deg: &[u32]) -> Self {
        let l = max_deg.len();
        let radix: Vec<usize> = max_deg.iter().map(|&d| d as usize + 1).collect();
        let mut strides = vec![1usize; l];
        for i in 1..l {
            strides[i] = strides[i - 1] * radix[i - 1];
        }
        let total: usize = radix.iter().product();
        MomentTable {
            l,
            g,
            strides,
            radix,
            memo: vec![C64::new(0.0, 0.0); total],
            known: vec![false; total],
        }
    }

    pub fn moment(&mut self, degs: &[u32]) -> C64 {
        debug_assert_eq!(degs.len(), self.l);
        if degs.iter().sum::<u32>() % 2 == 1 {
            return C64::new(0.0, 0.0);
        }
        let mut d: Vec<usize> = degs.iter().map(|&x| x as usize).collect();
        debug_assert!(d.iter().zip(&self.radix).all(|(a, r)| a < r));
        self.rec(&mut d)
    }

    fn rec(&mut self, d: &mut [usize]) -> C64 {
        let key: usize = d.iter().zip(&self.strides).map(|(a, s)| a * s).sum();
        if self.known[key] {
            return self.memo[key];
        }
        let r = match d.iter().position(|&x| x > 0) {
            None => return C64::new(1.0, 0.0),
            Some(r) => r,
        };
        d[r] -= 1;
        let mut acc = C64::new(0.0, 0.0);
        for s in r..self.l {
            if d[s] == 0 {
                continue;
            }
            let mult = d[s] as f64;
            let gv = self.g[r * self.l + s];
            d[s] -= 1;
            acc += gv * mult * self.rec(d);
            d[s] += 1;
        }
        d[r] += 1;
        self.known[key] = true;
        self.memo[key] = acc;
        acc
    }
}

/// One term of `b_l`: a choice of monomial per factor.
#[derive(Clone, Debug)]
pub struct Combo {
    pub coeff: f64,
    /// `degs[k][i]`: power of `L_i^k`.
    pub degs: Vec<Vec<u32>>,
}

/// All ordered monomial choices `(β_1, …, β_l)` with `Σ|β_i| = total`.
#[derive(Clone, Debug)]
pub struct ComboSet {
    pub l: usize,
    pub n: usize,
    pub combos: Vec<Combo>,
    pub max_deg: Vec<u32>,
}

impl ComboSet {
    pub fn new(pot: &TaylorPotential, l: usize, total: u32) -> Self {
        Self::from_monomials(
            pot.dimension(),
            pot.derivatives()
                .map(|(b, &v)| (b.clone(), v / b.factorial_f64()))
                .collect(),
            l,
            total,
        )
    }

    /// Combos where factor `i` ranges over `per_factor[i]` only.
    pub fn from_factor_lists(n: usize, per_factor: &[Vec<(MultiIndex, f64)>], total: u32) -> Self {
        let l = per_factor.len();
        let mut combos = Vec::new();
        let mut chosen: Vec<usize> = Vec::with_capacity(l);
        fn rec(
            i: usize,
            left: u32,
            per_factor: &[Vec<(MultiIndex, f64)>],
            chosen: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            let l = per_factor.len();
            if i == l {
                if left == 0 {
                    out.push(chosen.clone());
                }
                return;
            }
            let rest_min = 3 * (l - i - 1) as u32;
            for (idx, (b, _)) in per_factor[i].iter().enumerate() {
                let d = b.norm();
                if d + rest_min > left {
                    continue;
                }
                chosen.push(idx);
                rec(i + 1, left - d, per_factor, chosen, out);
                chosen.pop();
            }
        }
        let mut picks = Vec::new();
        rec(0, total, per_factor, &mut chosen, &mut picks);
        let mut max_deg = vec![0u32; l];
        for pick in picks {
            let mut coeff = 1.0;
            let mut degs = vec![vec![0u32; l]; n];
            for (i, &idx) in pick.iter().enumerate() {
                let (b, c) = &per_factor[i][idx];
                coeff *= c;
                for k in 0..n {
                    degs[k][i] = b.get(k);
                }
                max_deg[i] = max_deg[i].max(b.entries().iter().copied().max().unwrap_or(0));
            }
            if coeff != 0.0 {
                combos.push(Combo { coeff, degs });
            }
        }
        ComboSet {
            l,
            n,
            combos,
            max_deg,
        }
    }

    fn from_monomials(n: usize, monos: Vec<(MultiIndex, f64)>, l: usize, total: u32) -> Self {
        let monos: Vec<(MultiIndex, f64)> = monos.into_iter().filter(|(b, _)| b.norm() >= 3).collect();
        Self::from_factor_lists(n, &vec![monos; l], total)
    }

    pub fn is_empty(&self) -> bool {
        self.combos.is_empty()
    }
}

/// `E_{H_l⁻¹}[b_l]` restricted to degree `2(l+j)`, at simplex point `s`
/// (complex times allowed).
pub fn bl_expectation(combos: &ComboSet, omega: &[f64], tau: C64, s: &[C64]) -> C64 {
    if combos.is_empty() {
        return C64::new(0.0, 0.0);
    }
    let l = combos.l;
    let mut tables: Vec<MomentTable> = omega
        .iter()
        .map(|&w| MomentTable::new(axis_gram(l, w, tau, s), &combos.max_deg))
        .collect();
    let mut acc = C64::new(0.0, 0.0);
    for c in &combos.combos {
        let mut term = C64::new(c.coeff, 0.0);
        for (k, table) in tables.iter_mut().enumerate() {
            term *= table.moment(&c.degs[k]);
            if term == C64::new(0.0, 0.0) {
                break;
            }
        }
        acc += term;
    }
    acc
}

/// `P_{l+j} b_l(0) = i^{−(l+j)} E[b_l]` by contraction, at real or complex time.
pub fn stationary_phase_coefficient_wick(
    pot: &TaylorPotential,
    l: usize,
    j: usize,
    tau: C64,
    s: &[C64],
) -> C64 {
    let m = (l + j) as i32;
    let combos = ComboSet::new(pot, l, 2 * m as u32);
    C64::i().powi(-m) * bl_expectation(&combos, pot.frequencies(), tau, s)
}
