//! Hessian `H_l` of the phase `Ψ_l` at its critical point, with closed-form
//! inverse, determinant and signature.
//!
//! Variables are ordered `(x | z_1..z_l | ξ_1..ξ_l)`, each block ordered by axis
//! `k = 1..n`. [`VariableLayout`] is the single source of that ordering.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::oscillator::{check_complex_time, check_time_domain};

/// Index map for the `(2l+1)n` stationary-phase variables. Factor indices `i`
/// are zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VariableLayout {
    pub l: usize,
    pub n: usize,
}

impl VariableLayout {
    pub fn new(l: usize, n: usize) -> Self {
        VariableLayout { l, n }
    }

    pub fn size(&self) -> usize {
        (2 * self.l + 1) * self.n
    }

    pub fn x(&self, k: usize) -> usize {
        k
    }

    pub fn z(&self, i: usize, k: usize) -> usize {
        self.n + i * self.n + k
    }

    pub fn xi(&self, i: usize, k: usize) -> usize {
        self.n + self.l * self.n + i * self.n + k
    }

    /// Human-readable name of a variable index.
    pub fn name(&self, r: usize) -> String {
        let n = self.n;
        if r < n {
            format!("x{}", r + 1)
        } else if r < n + self.l * n {
            let q = r - n;
            format!("z{}^{}", q / n + 1, q % n + 1)
        } else {
            let q = r - n - self.l * n;
            format!("xi{}^{}", q / n + 1, q % n + 1)
        }
    }
}

fn hessian_generic<T: ComplexField<RealField = f64> + Copy>(
    l: usize,
    omega: &[f64],
    t: T,
) -> DMatrix<T> {
    let n = omega.len();
    let lay = VariableLayout::new(l, n);
    let mut h = DMatrix::<T>::zeros(lay.size(), lay.size());
    let one = T::one();
    let two = T::from_real(2.0);
    for (k, &w) in omega.iter().enumerate() {
        let wt = T::from_real(w);
        let half = (wt * t) / two;
        h[(lay.x(k), lay.x(k))] = -(two * wt) * half.tan();
        h[(lay.z(0, k), lay.z(0, k))] = wt / (wt * t).tan();
        for i in 0..l {
            h[(lay.z(i, k), lay.xi(i, k))] = -one;
            h[(lay.xi(i, k), lay.z(i, k))] = -one;
            if i + 1 < l {
                h[(lay.z(i + 1, k), lay.xi(i, k))] = one;
                h[(lay.xi(i, k), lay.z(i + 1, k))] = one;
            }
        }
    }
    h
}

pub(crate) fn inverse_generic<T: ComplexField<RealField = f64> + Copy>(
    l: usize,
    omega: &[f64],
    t: T,
) -> DMatrix<T> {
    let n = omega.len();
    let lay = VariableLayout::new(l, n);
    let mut m = DMatrix::<T>::zeros(lay.size(), lay.size());
    let one = T::one();
    let two = T::from_real(2.0);
    for (k, &w) in omega.iter().enumerate() {
        let wt = T::from_real(w);
        let half = (wt * t) / two;
        m[(lay.x(k), lay.x(k))] = -(one / half.tan()) / (two * wt);
        let big_omega = wt / (wt * t).tan();
        for i in 0..l {
            for ip in 0..l {
                if i <= ip {
                    m[(lay.z(i, k), lay.xi(ip, k))] = -one;
                    m[(lay.xi(ip, k), lay.z(i, k))] = -one;
                }
                m[(lay.xi(i, k), lay.xi(ip, k))] = -big_omega;
            }
        }
    }
    m
}

/// `H_l = Hess Ψ_l(0)` at real `t` in the forward domain.
pub fn build_hessian(l: usize, omega: &[f64], t: f64) -> Result<DMatrix<f64>> {
    check_args(l, omega)?;
    check_time_domain(omega, t)?;
    Ok(hessian_generic(l, omega, t))
}

/// `H_l` continued to complex time.
pub fn build_hessian_complex(l: usize, omega: &[f64], tau: C64) -> Result<DMatrix<C64>> {
    check_args(l, omega)?;
    check_complex_time(omega, tau)?;
    Ok(hessian_generic(l, omega, tau))
}

/// Closed-form `H_l⁻¹`.
pub fn invert_hessian(l: usize, omega: &[f64], t: f64) -> Result<DMatrix<f64>> {
    check_args(l, omega)?;
    check_time_domain(omega, t)?;
    Ok(inverse_generic(l, omega, t))
}

/// Closed-form `H_l⁻¹` at complex time.
pub fn invert_hessian_complex(l: usize, omega: &[f64], tau: C64) -> Result<DMatrix<C64>> {
    check_args(l, omega)?;
    check_complex_time(omega, tau)?;
    Ok(inverse_generic(l, omega, tau))
}

/// `det H_l = (−1)^{(l+1)n} Π 2ω_k tan(ω_k t/2)`.
pub fn hessian_det(l: usize, omega: &[f64], t: f64) -> Result<f64> {
    check_args(l, omega)?;
    check_time_domain(omega, t)?;
    let n = omega.len();
    let sign = if ((l + 1) * n) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * omega.iter().map(|w| 2.0 * w * (w * t / 2.0).tan()).product::<f64>())
}

/// Number of positive minus negative eigenvalues of `H_l`.
pub fn hessian_signature(l: usize, omega: &[f64], t: f64) -> Result<i32> {
    let h = build_hessian(l, omega, t)?;
    signature_of(&h)
}

pub fn signature_of(h: &DMatrix<f64>) -> Result<i32> {
    let eig = h.clone().symmetric_eigen();
    let mut sig = 0;
    for &lam in eig.eigenvalues.iter() {
        if lam.abs() < 1e-10 {
            return Err(Error::DegenerateHessian(lam));
        }
        sig += if lam > 0.0 { 1 } else { -1 };
    }
    Ok(sig)
}

fn check_args(l: usize, omega: &[f64]) -> Result<()> {
    if l == 0 {
        return Err(Error::InvalidArgument("block count l must be ≥ 1".into()));
    }
    if omega.is_empty() || omega.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::InvalidArgument("frequencies must be positive".into()));
    }
    Ok(())
}

/// Direct evaluation of the phase `Ψ_l(x, z, ξ)` on the diagonal `x = y`.
pub fn phase_function(l: usize, omega: &[f64], t: f64, vars: &[f64]) -> f64 {
    let n = omega.len();
    let lay = VariableLayout::new(l, n);
    let mut acc = 0.0;
    for (k, &w) in omega.iter().enumerate() {
        let x = vars[lay.x(k)];
        let z1 = vars[lay.z(0, k)];
        acc += -w * (w * t / 2.0).tan() * x * x + 0.5 * w / (w * t).tan() * z1 * z1;
        for i in 0..l {
            let zi = vars[lay.z(i, k)];
            let znext = if i + 1 < l { vars[lay.z(i + 1, k)] } else { 0.0 };
            acc += (znext - zi) * vars[lay.xi(i, k)];
        }
    }
    acc
}

/// Second-difference Hessian of [`phase_function`] at the origin.
pub fn finite_difference_hessian(l: usize, omega: &[f64], t: f64, step: f64) -> DMatrix<f64> {
    let size = VariableLayout::new(l, omega.len()).size();
    let mut out = DMatrix::zeros(size, size);
    let mut v = vec![0.0; size];
    let f = |v: &[f64]| phase_function(l, omega, t, v);
    for r in 0..size {
        for c in 0..size {
            let mut acc = 0.0;
            for (sr, sc, sgn) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                v.iter_mut().for_each(|e| *e = 0.0);
                v[r] += sr * step;
                v[c] += sc * step;
                acc += sgn * f(&v);
            }
            out[(r, c)] = acc / (4.0 * step * step);
        }
    }
    out
}

/// Everything about `H_l` at one `(l, ω, t)`.
#[derive(Clone, Debug)]
pub struct HessianData {
    pub l: usize,
    pub n: usize,
    pub t: f64,
    pub matrix: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    pub det: f64,
    pub signature: i32,
}

impl HessianData {
    pub fn compute(l: usize, omega: &[f64], t: f64) -> Result<Self> {
        let matrix = build_hessian(l, omega, t)?;
        let signature = signature_of(&matrix)?;
        Ok(HessianData {
            l,
            n: omega.len(),
            t,
            inverse: invert_hessian(l, omega, t)?,
            det: hessian_det(l, omega, t)?,
            matrix,
            signature,
        })
    }

    /// `max |H H⁻¹ − I|`.
    pub fn identity_error(&self) -> f64 {
        let p = &self.matrix * &self.inverse;
        let id = DMatrix::<f64>::identity(p.nrows(), p.ncols());
        (p - id).amax()
    }

    /// Relative gap between the closed-form and LU determinants.
    pub fn det_error(&self) -> f64 {
        let lu = self.matrix.clone().lu().determinant();
        (lu - self.det).abs() / self.det.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_matrix_and_inverse() {
        let h = build_hessian(1, &[1.0], 1.0).unwrap();
        let tan = 0.5f64.tan();
        let cot1 = 1.0 / 1f64.tan();
        let expect = DMatrix::from_row_slice(3, 3, &[-2.0 * tan, 0.0, 0.0, 0.0, cot1, -1.0, 0.0, -1.0, 0.0]);
        assert!((h - expect).amax() < 1e-15);
        let inv = invert_hessian(1, &[1.0], 1.0).unwrap();
        let expect = DMatrix::from_row_slice(
            3,
            3,
            &[-0.5 / tan, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, -1.0, -cot1],
        );
        assert!((inv - expect).amax() < 1e-15);
    }

    #[test]
    fn l2_inverse_pattern() {
        // order (x, z1, z2, ξ1, ξ2)
        let inv = invert_hessian(2, &[1.0], 1.0).unwrap();
        let c = 1.0 / 1f64.tan();
        let d = -0.5 / 0.5f64.tan();
        let expect = DMatrix::from_row_slice(
            5,
            5,
            &[
                d, 0., 0., 0., 0., //
                0., 0., 0., -1., -1., //
                0., 0., 0., 0., -1., //
                0., -1., 0., -c, -c, //
                0., -1., -1., -c, -c,
            ],
        );
        assert!((inv - expect).amax() < 1e-15);
        let h = build_hessian(2, &[1.0], 1.0).unwrap();
        // ξ1 couples −z1 + z2, ξ2 couples −z2
        assert_eq!(h[(3, 1)], -1.0);
        assert_eq!(h[(3, 2)], 1.0);
        assert_eq!(h[(4, 2)], -1.0);
        assert_eq!(h[(4, 1)], 0.0);
    }

    #[test]
    fn det_examples() {
        let d1 = hessian_det(1, &[1.0], 1.0).unwrap();
        let d2 = hessian_det(2, &[1.0], 1.0).unwrap();
        assert!((d1 - 1.092605).abs() < 1e-6);
        assert!((d2 + 1.092605).abs() < 1e-6);
    }

    #[test]
    fn signature_examples() {
        assert_eq!(hessian_signature(1, &[1.0], 0.5).unwrap(), -1);
        assert_eq!(
            hessian_signature(1, &[1.0], 0.3).unwrap(),
            hessian_signature(1, &[1.0], 1.2).unwrap()
        );
        let w = [1.0, 2f64.sqrt(), 0.7];
        for l in 1..=3 {
            assert_eq!(
                hessian_signature(l, &w, 0.6).unwrap(),
                3 * hessian_signature(l, &[1.3], 0.6).unwrap()
            );
        }
    }

    #[test]
    fn complex_inverse_is_inverse() {
        let w = [1.0, 1.7];
        let tau = C64::new(0.6, -0.1);
        for l in 1..=3 {
            let h = build_hessian_complex(l, &w, tau).unwrap();
            let inv = invert_hessian_complex(l, &w, tau).unwrap();
            let p = h * inv;
            let id = DMatrix::<C64>::identity(p.nrows(), p.ncols());
            assert!((p - id).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(build_hessian(1, &[1.0], 1.6).is_err());
        assert!(build_hessian(0, &[1.0], 1.0).is_err());
    }

    #[test]
    fn layout_names() {
        let lay = VariableLayout::new(2, 2);
        assert_eq!(lay.size(), 10);
        assert_eq!(lay.name(lay.z(1, 0)), "z2^1");
        assert_eq!(lay.name(lay.xi(0, 1)), "xi1^2");
    }
}
