// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

//! Symmetric tridiagonal eigensolver: Sturm-sequence bisection for the
//! eigenvalues, shifted inverse iteration for the eigenvectors.
//!
//! Only the lowest few eigenpairs of a large matrix are ever needed here, so
//! this is O(n) per eigenpair instead of the O(n²)/O(n³) of a full QL sweep.

/// Symmetric tridiagonal matrix given by its diagonal and off-diagonal.
#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty());
        assert_eq!(off.len() + 1, diag.len());
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    fn scale(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
    }

    /// Number of eigenvalues strictly below `x` (Sturm count).
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE.sqrt() * self.scale();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.len() {
            let e = self.off[i - 1];
            q = self.diag[i] - x - e * e / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based), bisected to full precision.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len());
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * self.scale();
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Lowest `k` eigenpairs, ascending. Eigenvectors have unit Euclidean norm.
    pub fn lowest_eigenpairs(&self, k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let k = k.min(self.len());
        let values: Vec<f64> = (0..k).map(|i| self.eigenvalue(i)).collect();
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
        for &lambda in &values {
            let v = self.inverse_iteration(lambda, &vectors);
            vectors.push(v);
        }
        (values, vectors)
    }

    fn inverse_iteration(&self, lambda: f64, previous: &[Vec<f64>]) -> Vec<f64> {
        let n = self.len();
        let lu = TridiagLu::factor(self, lambda);
        // deterministic, non-degenerate start vector
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 * 0.618_033_988_75).fract() - 0.5))
            .collect();
        for _ in 0..4 {
            lu.solve(&mut x);
            for p in previous {
                let dot: f64 = p.iter().zip(&x).map(|(a, b)| a * b).sum();
                for (xi, pi) in x.iter_mut().zip(p) {
                    *xi -= dot * pi;
                }
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            for xi in x.iter_mut() {
                *xi /= norm;
            }
        }
        x
    }
}

/// LU factorisation with partial pivoting of (T − σI), LAPACK `gttrf` layout.
struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(t: &SymTridiagonal, shift: f64) -> Self {
        let n = t.len();
        let mut dl = t.off.clone();
        let mut du = t.off.clone();
        let mut d: Vec<f64> = t.diag.iter().map(|v| v - shift).collect();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let tiny = f64::EPSILON * t.scale();
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use std::f64::consts::PI;

    fn dense(t: &SymTridiagonal) -> DMatrix<f64> {
        let n = t.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                t.diag[i]
            } else if i + 1 == j {
                t.off[i]
            } else if j + 1 == i {
                t.off[j]
            } else {
                0.0
            }
        })
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        // eigenvalues of tridiag(-1, 2, -1) are 2 - 2cos(kπ/(n+1))
        let n = 500;
        let t = SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]);
        let (vals, vecs) = t.lowest_eigenpairs(5);
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13, "{k}: {v} vs {exact}");
        }
        for (k, vec) in vecs.iter().enumerate() {
            // sin((k+1)(j+1)π/(n+1)) up to sign and normalisation
            let norm = (2.0 / (n + 1) as f64).sqrt();
            let sign = vec[0].signum();
            for (j, x) in vec.iter().enumerate() {
                let exact = norm * ((k + 1) as f64 * (j + 1) as f64 * PI / (n + 1) as f64).sin();
                assert!((sign * x - exact).abs() < 1e-9);
            }
        }
        assert_eq!(t.count_below(0.0), 0);
        assert_eq!(t.count_below(4.0), n);
    }

    #[test]
    fn matches_dense_solver_on_irregular_matrix() {
        let n = 40;
        let diag: Vec<f64> = (0..n).map(|i| ((i * 7) % 11) as f64 - 3.0 + 0.1 * i as f64).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| 0.3 + ((i * 5) % 3) as f64 * 0.7).collect();
        let t = SymTridiagonal::new(diag, off);
        let m = dense(&t);
        let eig = m.clone().symmetric_eigen();
        let mut reference: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        reference.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (vals, vecs) = t.lowest_eigenpairs(n);
        for (a, b) in vals.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-11, "{a} vs {b}");
        }
        for (lambda, v) in vals.iter().zip(&vecs) {
            let x = nalgebra::DVector::from_column_slice(v);
            let r = &m * &x - x.clone() * *lambda;
            assert!(r.norm() < 1e-9, "residual {}", r.norm());
        }
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn single_element() {
        let t = SymTridiagonal::new(vec![3.5], vec![]);
        let (v, x) = t.lowest_eigenpairs(1);
        assert!((v[0] - 3.5).abs() < 1e-14);
        assert!((x[0][0].abs() - 1.0).abs() < 1e-14);
    }
}
