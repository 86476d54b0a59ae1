// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    if !value.is_finite() {
        return Err(Error::numerical("quadrature", format!("non-finite integrand on [{a}, {b}]")));
    }
    Ok(Segment { a, b, value, error })
}

/// ∫_a^b f, refined until the error estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<QuadResult> {
    const MAX_SEGMENTS: usize = 5000;
    let mut segments = vec![gk15(&f, a, b)?];
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadResult {
                value,
                error,
                intervals: segments.len(),
            });
        }
        if segments.len() >= MAX_SEGMENTS {
            return Err(Error::numerical(
                "quadrature",
                format!("no convergence after {MAX_SEGMENTS} subdivisions (error estimate {error:e})"),
            ));
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        segments.push(gk15(&f, seg.a, mid)?);
        segments.push(gk15(&f, mid, seg.b)?);
    }
}

/// ∫_a^∞ f with x = a + scale·t/(1−t).
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult> {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let u = 1.0 - t;
        let x = a + scale * t / u;
        let v = f(x) * scale / (u * u);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, rel_tol, abs_tol)
}

/// Trapezoid rule on a uniform grid.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_and_oscillatory() {
        let r = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12, 0.0).unwrap();
        assert!((r.value - 0.0).abs() < 1e-12);
        let r = integrate(|x| (50.0 * x).sin().powi(2), 0.0, PI, 1e-10, 0.0).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-9);
    }

    #[test]
    fn semi_infinite_lorentzian() {
        let lam = 3.0;
        let r = integrate_to_infinity(|w| 2.0 * lam / (w * w + lam * lam), 0.0, lam, 1e-10, 0.0).unwrap();
        assert!((r.value - PI).abs() < 1e-8);
    }

    #[test]
    fn trapezoid_linear_exact() {
        let v: Vec<f64> = (0..11).map(|i| 2.0 * i as f64 * 0.1 + 1.0).collect();
        assert!((trapezoid(&v, 0.1) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn non_finite_is_an_error() {
        assert!(integrate(|x| 1.0 / (x - 0.5), 0.0, 1.0, 1e-8, 0.0).is_err());
    }
}
