//! Column-scaled least squares through the SVD.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub x: DVector<C64>,
    /// `‖Ax − b‖ / ‖b‖`.
    pub rel_residual: f64,
    /// Singular-value ratio of the column-scaled design.
    pub condition: f64,
}

/// Solve `min ‖Ax − b‖` after scaling every column to unit norm.
pub fn lstsq(a: &DMatrix<C64>, b: &DVector<C64>) -> Result<LeastSquares> {
    if a.nrows() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: b.len(),
        });
    }
    if a.nrows() < a.ncols() {
        return Err(Error::InvalidArgument(format!(
            "{} equations for {} unknowns",
            a.nrows(),
            a.ncols()
        )));
    }
    let scales: Vec<f64> = (0..a.ncols())
        .map(|c| {
            let n = a.column(c).norm();
            if n > 0.0 {
                n
            } else {
                1.0
            }
        })
        .collect();
    let mut scaled = a.clone();
    for (c, s) in scales.iter().enumerate() {
        scaled.column_mut(c).unscale_mut(*s);
    }
    let svd = scaled.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let y = svd
        .solve(b, smax * 1e-15)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let x = DVector::from_iterator(y.len(), y.iter().zip(&scales).map(|(v, s)| v / *s));
    let r = a * &x - b;
    let bn = b.norm();
    let rel_residual = if bn > 0.0 { r.norm() / bn } else { r.norm() };
    Ok(LeastSquares {
        x,
        rel_residual,
        condition,
    })
}

/// Real-valued wrapper that stacks real and imaginary parts of complex rows
/// so the unknowns stay real.
pub fn lstsq_real_unknowns(a: &DMatrix<C64>, b: &DVector<C64>) -> Result<(DVector<f64>, f64, f64)> {
    let (m, n) = a.shape();
    let mut ar = DMatrix::<C64>::zeros(2 * m, n);
    let mut br = DVector::<C64>::zeros(2 * m);
    for r in 0..m {
        for c in 0..n {
            ar[(2 * r, c)] = C64::new(a[(r, c)].re, 0.0);
            ar[(2 * r + 1, c)] = C64::new(a[(r, c)].im, 0.0);
        }
        br[2 * r] = C64::new(b[r].re, 0.0);
        br[2 * r + 1] = C64::new(b[r].im, 0.0);
    }
    let ls = lstsq(&ar, &br)?;
    Ok((ls.x.map(|v| v.re), ls.rel_residual, ls.condition))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_solution() {
        let a = DMatrix::from_fn(6, 3, |r, c| C64::new((r as f64 + 1.0).powi(c as i32), 0.1 * c as f64));
        let x = DVector::from_vec(vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.0), C64::new(0.25, -1.0)]);
        let b = &a * &x;
        let ls = lstsq(&a, &b).unwrap();
        assert!((ls.x - x).norm() < 1e-12);
        assert!(ls.rel_residual < 1e-13);
        assert!(ls.condition.is_finite());
    }

    #[test]
    fn real_unknowns() {
        let a = DMatrix::from_fn(5, 2, |r, c| C64::new(r as f64 + c as f64, 1.0 - r as f64 * c as f64));
        let x = DVector::from_vec(vec![C64::new(0.7, 0.0), C64::new(-1.3, 0.0)]);
        let b = &a * &x;
        let (xr, res, _) = lstsq_real_unknowns(&a, &b).unwrap();
        assert!((xr[0] - 0.7).abs() < 1e-12 && (xr[1] + 1.3).abs() < 1e-12);
        assert!(res < 1e-13);
    }

    #[test]
    fn underdetermined_rejected() {
        let a = DMatrix::<C64>::zeros(1, 2);
        let b = DVector::<C64>::zeros(1);
        assert!(lstsq(&a, &b).is_err());
    }
}
