//! Gauss–Legendre rules and nested quadrature over the time simplex
//! `τ ≥ s_1 ≥ s_2 ≥ … ≥ s_l ≥ 0`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_q`.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; q];
    let mut w = vec![0.0; q];
    for i in 0..(q + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=q {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if q == 0 { 1.0 } else if q == 1 { z } else { p1 };
            let pm1 = if q == 1 { 1.0 } else { p0 };
            dp = q as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[q - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[q - 1 - i] = wi;
    }
    (x, w)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    /// Gauss points per simplex axis for the first pass.
    pub start_order: usize,
    /// Refinement stops here with a non-convergence error.
    pub max_order: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl QuadratureOptions {
    /// First-pass order for an `l`-fold simplex. The integrands are entire in
    /// `s` with frequencies `≤ 2ω_max`, so deep simplices start coarser.
    pub fn start_order_for(&self, l: usize) -> usize {
        let base = self.start_order.max(1);
        base.saturating_sub(2 * l.saturating_sub(2)).max(4).min(base)
    }
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            start_order: 12,
            max_order: 96,
            rel_tol: 1e-10,
            abs_tol: 1e-15,
        }
    }
}

/// One nested Gauss–Legendre pass of `∫_{τ ≥ s_1 ≥ … ≥ s_l ≥ 0} f(s) ds`
/// using `s = τ u` over the unit simplex.
pub fn simplex_rule<F>(f: &F, l: usize, tau: C64, order: usize) -> C64
where
    F: Fn(&[C64]) -> C64 + Sync,
{
    if l == 0 {
        return f(&[]);
    }
    let (x, w) = gauss_legendre(order);
    let jac = tau.powi(l as i32);
    let outer: C64 = (0..order)
        .into_par_iter()
        .map(|a| {
            let u1 = 0.5 * (x[a] + 1.0);
            let mut s = vec![C64::new(0.0, 0.0); l];
            s[0] = tau * u1;
            let mut u = vec![0.0; l];
            u[0] = u1;
            0.5 * w[a] * nested(f, 1, l, tau, &x, &w, &mut u, &mut s)
        })
        // sequential sum keeps results independent of the thread count
        .collect::<Vec<C64>>()
        .iter()
        .sum();
    outer * jac
}

#[allow(clippy::too_many_arguments)]
fn nested<F>(
    f: &F,
    level: usize,
    l: usize,
    tau: C64,
    x: &[f64],
    w: &[f64],
    u: &mut [f64],
    s: &mut [C64],
) -> C64
where
    F: Fn(&[C64]) -> C64 + Sync,
{
    if level == l {
        return f(s);
    }
    let upper = u[level - 1];
    let mut acc = C64::new(0.0, 0.0);
    for (xi, wi) in x.iter().zip(w) {
        let v = 0.5 * upper * (xi + 1.0);
        u[level] = v;
        s[level] = tau * v;
        acc += 0.5 * upper * wi * nested(f, level + 1, l, tau, x, w, u, s);
    }
    acc
}

/// Simplex integral, raising the order by a quarter (at least 2) until two
/// passes agree. Doubling is far too costly once `order^l` gets large.
pub fn simplex_integrate<F>(f: &F, l: usize, tau: C64, opts: &QuadratureOptions) -> Result<C64>
where
    F: Fn(&[C64]) -> C64 + Sync,
{
    if l == 0 {
        return Ok(f(&[]));
    }
    let mut order = opts.start_order_for(l);
    let mut prev = simplex_rule(f, l, tau, order);
    let mut change = f64::NAN;
    loop {
        let next_order = order + (order / 4).max(2);
        if next_order > opts.max_order {
            return Err(Error::NoConvergence { order, change });
        }
        let next = simplex_rule(f, l, tau, next_order);
        change = (next - prev).norm();
        if change <= opts.rel_tol * next.norm() + opts.abs_tol {
            return Ok(next);
        }
        order = next_order;
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(t: f64) -> C64 {
        C64::new(t, 0.0)
    }

    #[test]
    fn rule_integrates_polynomials() {
        for q in 1..12 {
            let (x, w) = gauss_legendre(q);
            let sum: f64 = w.iter().sum();
            assert!((sum - 2.0).abs() < 1e-13, "q={q}");
            // exact through degree 2q−1
            let deg = 2 * q - 1;
            let v: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(deg as i32 - 1)).sum();
            let expect = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((v - expect).abs() < 1e-13, "q={q}");
        }
    }

    #[test]
    fn simplex_examples() {
        let o = QuadratureOptions::default();
        let one = |_: &[C64]| C64::new(1.0, 0.0);
        let v = simplex_integrate(&one, 1, real(1.3), &o).unwrap();
        assert!((v.re - 1.3).abs() < 1e-14);
        let v = simplex_integrate(&one, 2, real(1.3), &o).unwrap();
        assert!((v.re - 1.3 * 1.3 / 2.0).abs() < 1e-14);
        let v = simplex_integrate(&one, 4, real(1.3), &o).unwrap();
        assert!((v.re - 1.3f64.powi(4) / 24.0).abs() < 1e-14);
        let v = simplex_integrate(&|s: &[C64]| s[0], 1, real(1.0), &o).unwrap();
        assert!((v.re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ordering_is_descending() {
        // ∫_{1≥s1≥s2≥0} s2 = 1/6, ∫ s1 = 1/3
        let o = QuadratureOptions::default();
        let v = simplex_integrate(&|s: &[C64]| s[1], 2, real(1.0), &o).unwrap();
        assert!((v.re - 1.0 / 6.0).abs() < 1e-14);
        let v = simplex_integrate(&|s: &[C64]| s[0], 2, real(1.0), &o).unwrap();
        assert!((v.re - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn complex_time_scales_analytically() {
        let o = QuadratureOptions::default();
        let tau = C64::new(0.9, -0.2);
        let v = simplex_integrate(&|s: &[C64]| (s[0] * 2.0).cos() * s[1], 2, tau, &o).unwrap();
        // ∫_0^τ cos(2s1) s1²/2 ds1
        let ant = |s: C64| {
            let c = (2.0 * s).cos();
            let sn = (2.0 * s).sin();
            (s * s * sn / 2.0 + s * c / 2.0 - sn / 4.0) / 2.0
        };
        let exact = ant(tau) - ant(C64::new(0.0, 0.0));
        assert!((v - exact).norm() < 1e-13, "{v} vs {exact}");
    }

    #[test]
    fn non_convergence_reported() {
        let o = QuadratureOptions {
            start_order: 2,
            max_order: 8,
            rel_tol: 1e-15,
            abs_tol: 0.0,
        };
        let f = |s: &[C64]| (s[0] * 40.0).sin();
        assert!(matches!(
            simplex_integrate(&f, 1, real(1.0), &o),
            Err(Error::NoConvergence { .. })
        ));
    }
}
