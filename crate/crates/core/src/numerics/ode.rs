// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

//! Dormand–Prince 5(4) with embedded error control.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th-order weights minus 4th-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Adaptive integrator state. Reuse across consecutive `advance` calls so the
/// step size carries over.
#[derive(Debug, Clone)]
pub struct DormandPrince {
    pub rtol: f64,
    pub atol: f64,
    pub min_step: f64,
    pub max_steps: usize,
    h: Option<f64>,
    pub accepted: usize,
    pub rejected: usize,
}

impl DormandPrince {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            min_step: 0.0,
            max_steps: 10_000_000,
            h: None,
            accepted: 0,
            rejected: 0,
        }
    }

    /// Integrate `y' = f(t, y)` from `t` to `t_end` in place.
    pub fn advance<F>(&mut self, f: &F, t: &mut f64, y: &mut [f64], t_end: f64) -> Result<()>
    where
        F: Fn(f64, &[f64], &mut [f64]),
    {
        let n = y.len();
        let mut k = vec![vec![0.0; n]; 7];
        let mut tmp = vec![0.0; n];
        let mut y_new = vec![0.0; n];
        let span = t_end - *t;
        if span <= 0.0 {
            return Ok(());
        }
        let mut h = self.h.unwrap_or(span * 1e-3).min(span);
        f(*t, y, &mut k[0]);
        while *t < t_end {
            if self.accepted + self.rejected > self.max_steps {
                return Err(Error::numerical("ode", "step budget exhausted (problem too stiff)"));
            }
            let natural = h;
            let last = *t + h >= t_end;
            if last {
                h = t_end - *t;
            }
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += h * A[s][j] * kj[i];
                    }
                    tmp[i] = acc;
                }
                f(*t + C[s] * h, &tmp, &mut k[s]);
            }
            // 7th stage evaluated at y_new (FSAL)
            y_new.copy_from_slice(&tmp);
            let mut err = 0.0;
            for i in 0..n {
                let mut e = 0.0;
                for (s, ks) in k.iter().enumerate() {
                    e += E[s] * ks[i];
                }
                let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err += (h * e / scale).powi(2);
            }
            let err = (err / n as f64).sqrt();
            if err <= 1.0 {
                *t = if last { t_end } else { *t + h };
                y.copy_from_slice(&y_new);
                let k6 = k[6].clone();
                k[0].copy_from_slice(&k6);
                self.accepted += 1;
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if last {
                    self.h = Some(natural.max(h * factor));
                } else {
                    h *= factor;
                }
            } else {
                self.rejected += 1;
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                if h < self.min_step || h <= f64::EPSILON * t.abs().max(span) {
                    return Err(Error::numerical(
                        "ode",
                        format!("step size underflow at t = {:e} (stiffness)", *t),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = -2.0 * y[0];
        let mut dp = DormandPrince::new(1e-10, 1e-14);
        let mut t = 0.0;
        let mut y = vec![1.0];
        for j in 1..=10 {
            dp.advance(&f, &mut t, &mut y, j as f64 * 0.3).unwrap();
            assert!((y[0] - (-2.0 * t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn harmonic_oscillator() {
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let mut dp = DormandPrince::new(1e-11, 1e-13);
        let mut t = 0.0;
        let mut y = vec![1.0, 0.0];
        dp.advance(&f, &mut t, &mut y, 10.0).unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-8);
        assert!((y[1] + 10f64.sin()).abs() < 1e-8);
    }
}
