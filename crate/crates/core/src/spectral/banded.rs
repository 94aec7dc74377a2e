//! Symmetric band matrices and eigenvalue slicing by Sylvester inertia.

use crate::error::{Error, Result};

/// Lower band of a symmetric matrix: `data[i * (bw + 1) + d] = A[i, i − d]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedSymmetric {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedSymmetric {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandedSymmetric {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let d = i - j;
        if d > self.bw {
            0.0
        } else {
            self.data[i * (self.bw + 1) + d]
        }
    }

    /// Add to `(i, j)` and its mirror.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let d = i - j;
        assert!(d <= self.bw, "entry ({i}, {j}) outside bandwidth {}", self.bw);
        self.data[i * (self.bw + 1) + d] += v;
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let a = self.get(i, i);
            let r: f64 = (i.saturating_sub(self.bw)..(i + self.bw + 1).min(self.n))
                .filter(|&j| j != i)
                .map(|j| self.get(i, j).abs())
                .sum();
            lo = lo.min(a - r);
            hi = hi.max(a + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `sigma`, from the negative pivots
    /// of an unpivoted band `LDLᵀ` of `A − σI`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let bw = self.bw;
        let w = bw + 1;
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(sigma.abs()).max(1e-300);
        let tiny = scale * f64::EPSILON * f64::EPSILON;
        // l[i*w + d] = L[i, i-d] for d ≥ 1
        let mut l = vec![0.0; self.n * w];
        let mut dpiv = vec![0.0; self.n];
        let mut neg = 0;
        for i in 0..self.n {
            let j0 = i.saturating_sub(bw);
            // off-diagonal entries of row i
            for j in j0..i {
                let mut v = self.data[i * w + (i - j)];
                let k0 = i.saturating_sub(bw).max(j.saturating_sub(bw));
                for k in k0..j {
                    v -= l[i * w + (i - k)] * l[j * w + (j - k)] * dpiv[k];
                }
                l[i * w + (i - j)] = v / dpiv[j];
            }
            let mut d = self.data[i * w] - sigma;
            for k in j0..i {
                let lik = l[i * w + (i - k)];
                d -= lik * lik * dpiv[k];
            }
            if d.abs() < tiny {
                d = -tiny;
            }
            if d < 0.0 {
                neg += 1;
            }
            dpiv[i] = d;
        }
        neg
    }

    /// All eigenvalues `≤ cutoff`, ascending, by recursive bisection.
    pub fn eigenvalues_below(&self, cutoff: f64) -> Vec<f64> {
        if self.n == 0 {
            return Vec::new();
        }
        let (g_lo, g_hi) = self.gershgorin();
        let lo = g_lo - 1e-12 * g_lo.abs().max(1.0);
        let hi = cutoff.min(g_hi) + 1e-12 * cutoff.abs().max(1.0);
        if hi <= lo {
            return Vec::new();
        }
        let c_lo = self.count_below(lo);
        let c_hi = self.count_below(hi);
        let mut out = Vec::with_capacity(c_hi - c_lo);
        self.slice(lo, hi, c_lo, c_hi, &mut out);
        out.retain(|&e| e <= cutoff);
        out
    }

    fn slice(&self, lo: f64, hi: f64, c_lo: usize, c_hi: usize, out: &mut Vec<f64>) {
        if c_hi == c_lo {
            return;
        }
        let mid = 0.5 * (lo + hi);
        let tol = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + f64::MIN_POSITIVE;
        if hi - lo <= tol || mid <= lo || mid >= hi {
            out.extend(std::iter::repeat_n(mid, c_hi - c_lo));
            return;
        }
        let c_mid = self.count_below(mid);
        self.slice(lo, mid, c_lo, c_mid, out);
        self.slice(mid, hi, c_mid, c_hi, out);
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn from_dense(a: &nalgebra::DMatrix<f64>, bw: usize) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.ncols(),
            });
        }
        let mut b = BandedSymmetric::zeros(n, bw);
        for i in 0..n {
            for j in 0..n {
                let v = a[(i, j)];
                if i.abs_diff(j) > bw {
                    if v != 0.0 {
                        return Err(Error::InvalidArgument(format!(
                            "entry ({i}, {j}) outside bandwidth {bw}"
                        )));
                    }
                } else if i >= j {
                    b.data[i * (bw + 1) + (i - j)] = v;
                }
            }
        }
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn sample(n: usize, bw: usize) -> BandedSymmetric {
        let mut b = BandedSymmetric::zeros(n, bw);
        for i in 0..n {
            b.add(i, i, (i as f64 * 0.37).sin() * 3.0 + i as f64 * 0.1);
            for d in 1..=bw.min(i) {
                b.add(i, i - d, ((i * 7 + d * 3) as f64).cos() / (d as f64));
            }
        }
        b
    }

    #[test]
    fn bisection_matches_dense() {
        for bw in [1, 2, 4] {
            let b = sample(60, bw);
            let mut dense: Vec<f64> = b.to_dense().symmetric_eigenvalues().iter().copied().collect();
            dense.sort_by(f64::total_cmp);
            let cut = dense[40];
            let got = b.eigenvalues_below(cut);
            assert_eq!(got.len(), 41);
            for (g, d) in got.iter().zip(&dense) {
                assert!((g - d).abs() < 1e-11, "bw {bw}: {g} vs {d}");
            }
        }
    }

    #[test]
    fn diagonal_counts() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -1.0, 2.0, 0.5]));
        let b = BandedSymmetric::from_dense(&d, 0).unwrap();
        assert_eq!(b.count_below(1.0), 2);
        let e = b.eigenvalues_below(2.5);
        assert_eq!(e.len(), 3);
        for (g, w) in e.iter().zip([-1.0, 0.5, 2.0]) {
            assert!((g - w).abs() < 1e-14);
        }
        assert!(b.eigenvalues_below(-2.0).is_empty());
    }

    #[test]
    fn repeated_eigenvalues() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 1.0, 2.0]));
        let b = BandedSymmetric::from_dense(&d, 1).unwrap();
        let e = b.eigenvalues_below(1.5);
        assert_eq!(e.len(), 3);
        assert!(e.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }
}
