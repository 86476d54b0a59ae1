// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

//! Numerical building blocks shared by the physics modules.

pub mod ode;
pub mod quad;
pub mod tridiag;

use crate::error::{Error, Result};

/// Ordinary least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub residual_rms: f64,
    pub n: usize,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return Err(Error::analysis("fit", format!("need ≥ 2 paired points, got {n}")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::analysis("fit", "abscissae are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let slope_stderr = if n > 2 { (ss / (nf - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(LineFit {
        slope,
        intercept,
        slope_stderr,
        residual_rms: (ss / nf).sqrt(),
        n,
    })
}

/// `n` points log-spaced from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > 0.0);
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-14);
        assert!((fit.intercept - 3.0).abs() < 1e-14);
        assert!(fit.slope_stderr < 1e-14);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
        assert!(linear_fit(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn grids() {
        let g = logspace(1e-3, 1e4, 8);
        assert!((g[0] - 1e-3).abs() < 1e-18 && (g[7] / 1e4 - 1.0).abs() < 1e-12);
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }
}
