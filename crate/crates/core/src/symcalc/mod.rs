//! Stationary-phase coefficients `P_m b_l(0)`.
//!
//! Two routes compute the same number. The polynomial route expands `b_l` as a
//! truncated polynomial in the `(2l+1)n` variables and applies `⟨H_l⁻¹∇,∇⟩`
//! repeatedly. The contraction route in [`wick`] evaluates the same quantity as
//! a Gaussian moment of the linear forms, which is what the invariant engine
//! uses. Tests keep the two in agreement.

pub mod poly;
pub mod wick;

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hessian::{invert_hessian, VariableLayout};
use crate::oscillator::check_time_domain;
use crate::potential::TaylorPotential;
pub use poly::{poly_mul, poly_pow, TruncatedPolynomial};

/// Coefficients of the linear form fed to factor `i` on axis `k`, in the
/// per-axis local ordering `(x, z_1..z_l, ξ_1..ξ_l)`.
pub(crate) fn axis_form<T: ComplexField<RealField = f64> + Copy>(
    l: usize,
    i: usize,
    w: f64,
    t: T,
    s: T,
) -> Vec<T> {
    let mut f = vec![T::zero(); 2 * l + 1];
    let wt = T::from_real(w);
    let half = T::from_real(0.5);
    let (ws, wtt) = (wt * s, wt * t);
    f[0] = ((wtt - ws).sin() + ws.sin()) / wtt.sin();
    f[1 + i] = ws.cos() * half;
    if i + 1 < l {
        f[2 + i] = ws.cos() * half;
    }
    f[1 + l + i] = -(ws.sin() / wt);
    f
}

/// The linear forms `L_i^k` substituted into `W` for each factor of `b_l`.
#[derive(Clone, Debug)]
pub struct LinearFormSet {
    pub layout: VariableLayout,
    /// `coeffs[i][k]` is a coefficient vector over all `(2l+1)n` variables.
    pub coeffs: Vec<Vec<Vec<f64>>>,
}

impl LinearFormSet {
    pub fn new(l: usize, omega: &[f64], t: f64, s: &[f64]) -> Result<Self> {
        let n = omega.len();
        if s.len() != l {
            return Err(Error::DimensionMismatch {
                expected: l,
                got: s.len(),
            });
        }
        let layout = VariableLayout::new(l, n);
        let mut coeffs = vec![vec![vec![0.0; layout.size()]; n]; l];
        for i in 0..l {
            for (k, &w) in omega.iter().enumerate() {
                let f = axis_form(l, i, w, t, s[i]);
                let g = &mut coeffs[i][k];
                g[layout.x(k)] = f[0];
                for a in 0..l {
                    g[layout.z(a, k)] = f[1 + a];
                    g[layout.xi(a, k)] = f[1 + l + a];
                }
            }
        }
        Ok(LinearFormSet { layout, coeffs })
    }
}

/// `Σ_β D_βW(0)/β! Π_k (L^k)^{β_k}` truncated at `bound`.
pub fn compose_taylor_with_linear(
    pot: &TaylorPotential,
    forms: &[Vec<f64>],
    num_vars: usize,
    bound: u32,
) -> Result<TruncatedPolynomial> {
    let n = pot.dimension();
    if forms.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: forms.len(),
        });
    }
    if let Some(f) = forms.iter().find(|f| f.len() != num_vars) {
        return Err(Error::DimensionMismatch {
            expected: num_vars,
            got: f.len(),
        });
    }
    if pot.truncation_order() < bound {
        return Err(Error::TruncationOrder {
            have: pot.truncation_order(),
            need: bound,
        });
    }
    let lin: Vec<TruncatedPolynomial> = forms
        .iter()
        .map(|f| TruncatedPolynomial::linear(f, bound))
        .collect();
    // powers[k][p] = (L^k)^p
    let mut powers: Vec<Vec<TruncatedPolynomial>> = Vec::with_capacity(n);
    for l in &lin {
        let mut v = vec![TruncatedPolynomial::constant(num_vars, bound, 1.0)];
        for p in 1..=bound {
            let next = poly_mul(&v[p as usize - 1], l, bound)?;
            v.push(next);
        }
        powers.push(v);
    }
    let mut out = TruncatedPolynomial::zero(num_vars, bound);
    for (beta, &d) in pot.derivatives() {
        if beta.norm() > bound {
            continue;
        }
        let mut term = TruncatedPolynomial::constant(num_vars, bound, d / beta.factorial_f64());
        for k in 0..n {
            term = poly_mul(&term, &powers[k][beta.get(k) as usize], bound)?;
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// `b_l` on the diagonal `x = y` as a polynomial in the stationary-phase
/// variables, truncated at `bound`. Requires `t ≥ s_1 ≥ … ≥ s_l ≥ 0`.
pub fn expand_bl(
    pot: &TaylorPotential,
    l: usize,
    t: f64,
    s: &[f64],
    bound: u32,
) -> Result<TruncatedPolynomial> {
    check_time_domain(pot.frequencies(), t)?;
    check_simplex_point(t, s)?;
    let forms = LinearFormSet::new(l, pot.frequencies(), t, s)?;
    let nv = forms.layout.size();
    // every other factor contributes degree ≥ 3
    let factor_bound = bound.saturating_sub(3 * (l as u32 - 1));
    let mut out = TruncatedPolynomial::constant(nv, bound, 1.0);
    for i in 0..l {
        let f = compose_taylor_with_linear(pot, &forms.coeffs[i], nv, factor_bound.min(pot.truncation_order()))?;
        out = poly_mul(&out, &f, bound)?;
    }
    Ok(out)
}

pub(crate) fn check_simplex_point(t: f64, s: &[f64]) -> Result<()> {
    let ordered = s.windows(2).all(|w| w[0] >= w[1]);
    let inside = s.iter().all(|&x| (0.0..=t).contains(&x));
    if !(ordered && inside) {
        return Err(Error::InvalidArgument(format!(
            "times {s:?} are not ordered t ≥ s_1 ≥ … ≥ s_l ≥ 0 with t = {t}"
        )));
    }
    Ok(())
}

/// `(i^{−m}/(2^m m!)) ⟨A∇,∇⟩^m p` evaluated at the origin.
pub fn apply_quadratic_operator(p: &TruncatedPolynomial, a: &DMatrix<f64>, m: u32) -> Result<C64> {
    let nv = p.num_vars();
    if a.nrows() != nv || a.ncols() != nv {
        return Err(Error::DimensionMismatch {
            expected: nv,
            got: a.nrows(),
        });
    }
    let mut q = p.homogeneous_part(2 * m);
    for _ in 0..m {
        q = poly::apply_laplacian_form(&q, |r, c| a[(r, c)]);
    }
    let scale = 1.0 / (2f64.powi(m as i32) * crate::multi_index::factorial_f64(m));
    Ok(C64::i().powi(-(m as i32)) * (q.constant_term() * scale))
}

/// `P_{l+j} b_l(0)` by polynomial expansion and repeated operator application.
pub fn stationary_phase_coefficient(
    pot: &TaylorPotential,
    l: usize,
    j: usize,
    t: f64,
    s: &[f64],
) -> Result<C64> {
    pot.require_order_for(j)?;
    let m = (l + j) as u32;
    if 2 * m < 3 * l as u32 {
        return Ok(C64::new(0.0, 0.0));
    }
    let p = expand_bl(pot, l, t, s, 2 * m)?;
    let a = invert_hessian(l, pot.frequencies(), t)?;
    apply_quadratic_operator(&p, &a, m)
}

/// Closed form of `P_{j+1} b_1`: `(2i)^{−(j+1)} Σ_{|α|=j+1} (1/α!)(−cot(ωt/2)/(2ω))^α D_{2α}W`.
pub fn single_block_closed_form(pot: &TaylorPotential, j: usize, t: f64) -> C64 {
    let n = pot.dimension();
    let w = pot.frequencies();
    let mut sum = 0.0;
    for alpha in crate::multi_index::MultiIndex::all_with_norm(n, j as u32 + 1) {
        let d = pot.derivative(&alpha.doubled());
        if d == 0.0 {
            continue;
        }
        let mut term = d / alpha.factorial_f64();
        for k in 0..n {
            let c = -1.0 / (2.0 * w[k] * (w[k] * t / 2.0).tan());
            term *= c.powi(alpha.get(k) as i32);
        }
        sum += term;
    }
    C64::new(0.0, 2.0).powi(-(j as i32 + 1)) * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multi_index::MultiIndex;
    use crate::potential::SymmetryClass;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn compose_examples() {
        let cubic = TaylorPotential::one_dim(1.0, &[(3, 6.0)]).unwrap();
        let p = compose_taylor_with_linear(&cubic, &[vec![0.5]], 1, 3).unwrap();
        assert!((p.coeff(&[3]) - 0.125).abs() < 1e-15);
        let p = compose_taylor_with_linear(&cubic, &[vec![1.0, 1.0]], 2, 3).unwrap();
        for (e, c) in [([3, 0], 1.0), ([2, 1], 3.0), ([1, 2], 3.0), ([0, 3], 1.0)] {
            assert!((p.coeff(&e) - c).abs() < 1e-15);
        }
    }

    #[test]
    fn compose_squared_forms_matches_multinomial() {
        // W = x²y² with L¹ = a·u + b·v, L² = c·u + d·v
        let pot = TaylorPotential::new(vec![1.0, 1.3], [(mi(&[2, 2]), 4.0)], SymmetryClass::Even).unwrap();
        let (a, b, c, d) = (0.3, -1.1, 0.7, 0.4);
        let p = compose_taylor_with_linear(&pot, &[vec![a, b], vec![c, d]], 2, 4).unwrap();
        // (a u + b v)²(c u + d v)² expanded by hand
        let expect = [
            ([4u16, 0u16], a * a * c * c),
            ([3, 1], 2.0 * a * a * c * d + 2.0 * a * b * c * c),
            ([2, 2], a * a * d * d + 4.0 * a * b * c * d + b * b * c * c),
            ([1, 3], 2.0 * a * b * d * d + 2.0 * b * b * c * d),
            ([0, 4], b * b * d * d),
        ];
        for (e, v) in expect {
            assert!((p.coeff(&e) - v).abs() < 1e-14, "{e:?}");
        }
    }

    #[test]
    fn expand_bl_single_factor_at_zero_time() {
        let pot = TaylorPotential::one_dim(1.0, &[(3, 6.0)]).unwrap();
        let p = expand_bl(&pot, 1, 1.0, &[0.0], 3).unwrap();
        // L = x + z/2 with no ξ component at s = 0
        assert!((p.coeff(&[3, 0, 0]) - 1.0).abs() < 1e-14);
        assert!((p.coeff(&[0, 3, 0]) - 0.125).abs() < 1e-14);
        assert_eq!(p.coeff(&[0, 0, 3]), 0.0);
    }

    #[test]
    fn expand_bl_quartic_display() {
        let b = 0.05;
        let pot = TaylorPotential::one_dim(1.0, &[(4, 24.0 * b)]).unwrap();
        let (t, s) = (1.0f64, 0.4f64);
        let p = expand_bl(&pot, 1, t, &[s], 4).unwrap();
        let cx = ((t - s).sin() + s.sin()) / t.sin();
        let form = [cx, s.cos() / 2.0, -s.sin()];
        let u = [0.3, -0.2, 0.9];
        let lin: f64 = form.iter().zip(&u).map(|(a, b)| a * b).sum();
        assert!((p.eval(&u) - b * lin.powi(4)).abs() < 1e-14);
    }

    #[test]
    fn last_factor_has_no_next_z() {
        let f = LinearFormSet::new(2, &[1.0], 1.0, &[0.6, 0.2]).unwrap();
        let lay = f.layout;
        assert_ne!(f.coeffs[0][0][lay.z(1, 0)], 0.0);
        assert_eq!(f.coeffs[1][0][lay.z(0, 0)], 0.0);
        assert_ne!(f.coeffs[1][0][lay.z(1, 0)], 0.0);
    }

    #[test]
    fn quadratic_operator_examples() {
        let u2 = TruncatedPolynomial::monomial(1, 2, vec![2], 1.0).unwrap();
        let a = DMatrix::from_element(1, 1, 0.7);
        let v = apply_quadratic_operator(&u2, &a, 1).unwrap();
        assert!((v - C64::new(0.0, -0.7)).norm() < 1e-15);

        let uv = TruncatedPolynomial::monomial(2, 2, vec![1, 1], 1.0).unwrap();
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 0.4, 0.4, 0.0]);
        let v = apply_quadratic_operator(&uv, &a, 1).unwrap();
        assert!((v - C64::new(0.0, -0.4)).norm() < 1e-15);

        let u3 = TruncatedPolynomial::monomial(1, 3, vec![3], 1.0).unwrap();
        let a = DMatrix::from_element(1, 1, 1.0);
        assert_eq!(apply_quadratic_operator(&u3, &a, 1).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn zero_potential_and_degree_gap() {
        let pot = TaylorPotential::harmonic(vec![1.0]).unwrap().with_truncation_order(8).unwrap();
        assert_eq!(stationary_phase_coefficient(&pot, 1, 1, 1.0, &[0.3]).unwrap(), C64::new(0.0, 0.0));
        let pot = TaylorPotential::one_dim(1.0, &[(3, 0.6), (4, 1.2)]).unwrap();
        // 2(l+j) < 3l for l = 3, j = 1
        assert_eq!(
            stationary_phase_coefficient(&pot, 3, 1, 1.0, &[0.6, 0.4, 0.1]).unwrap(),
            C64::new(0.0, 0.0)
        );
    }

    #[test]
    fn quartic_single_block() {
        let b = 0.05;
        let pot = TaylorPotential::one_dim(1.0, &[(4, 24.0 * b)]).unwrap();
        let t = 1.0f64;
        let v = stationary_phase_coefficient(&pot, 1, 1, t, &[0.37]).unwrap();
        let c = -1.0 / (2.0 * (t / 2.0).tan());
        let expect = C64::new(0.0, 2.0).powi(-2) * 0.5 * c * c * 24.0 * b;
        assert!((v - expect).norm() < 1e-13 * expect.norm());
        assert!((single_block_closed_form(&pot, 1, t) - expect).norm() < 1e-15);
    }

    #[test]
    fn unordered_times_rejected() {
        let pot = TaylorPotential::one_dim(1.0, &[(3, 0.6), (4, 1.2)]).unwrap();
        assert!(expand_bl(&pot, 2, 1.0, &[0.2, 0.5], 4).is_err());
    }
}
