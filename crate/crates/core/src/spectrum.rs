// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

//! Dipole fluctuation spectrum of a single adatom.
//!
//! With detailed balance the generator is similar to a symmetric matrix,
//! `A = D^{-1/2} M D^{1/2}`, `D = diag(p⁰)`. Its eigenvectors split the
//! dipole autocorrelation into decaying exponentials, so S_μ is an exact sum
//! of Lorentzians centred at ω = 0 (two-sided convention).
//!
//! [`spectrum_via_ode`] rebuilds the same spectrum the slow way: it integrates
//! the regression equations for ⟨ρ_i(τ)ρ_k(0)⟩ in their reduced (N−1)+1 form
//! and cosine-transforms the result.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::dipoles::DipoleLadder;
use crate::error::{Error, Result};
use crate::numerics::ode::DormandPrince;
use crate::numerics::quad::integrate_to_infinity;
use crate::numerics::{linear_fit, LineFit};
use crate::phonons::{bose_occupation, RateMatrix};
use crate::units::{HBAR, KB};

const MODULE: &str = "spectrum";

/// Asymmetry of the symmetrised generator tolerated before detailed balance
/// is declared broken, relative to max|A|.
pub const SYMMETRY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// Decay rate λ_k > 0 (1/s).
    pub rate: f64,
    /// Weight a_k ≥ 0 ((C·m)²).
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DipoleSpectrum {
    /// Sorted by ascending rate.
    pub modes: Vec<Mode>,
    pub mean_dipole: f64,
    pub variance: f64,
    pub temperature: f64,
    /// Largest |A_ij − A_ji| / max|A| seen before symmetrising.
    pub asymmetry: f64,
}

fn check_inputs(r: &RateMatrix, p0: &[f64], ladder: &DipoleLadder) -> Result<()> {
    let n = r.len();
    if p0.len() != n || ladder.len() != n {
        return Err(Error::domain(
            MODULE,
            format!("size mismatch: {n} levels, {} populations, {} dipoles", p0.len(), ladder.len()),
        ));
    }
    if let Some(k) = p0.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::domain(
            MODULE,
            format!("level {k} has zero stationary population; the spectrum needs T > 0"),
        ));
    }
    Ok(())
}

fn mean_and_variance(p0: &[f64], mu: &[f64]) -> (f64, f64) {
    let mean: f64 = p0.iter().zip(mu).map(|(p, m)| p * m).sum();
    let var: f64 = p0.iter().zip(mu).map(|(p, m)| p * (m - mean).powi(2)).sum();
    (mean, var)
}

pub fn correlation_modes(r: &RateMatrix, p0: &[f64], ladder: &DipoleLadder) -> Result<DipoleSpectrum> {
    check_inputs(r, p0, ladder)?;
    let n = r.len();
    let s: Vec<f64> = p0.iter().map(|x| x.sqrt()).collect();
    let a = DMatrix::from_fn(n, n, |i, j| r.generator[(i, j)] * s[j] / s[i]);
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    let asymmetry = asym / scale;
    if asymmetry > SYMMETRY_TOL {
        return Err(Error::model(
            MODULE,
            format!("detailed balance violated: symmetrised generator asymmetry {asymmetry:.2e}"),
        ));
    }
    let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let eig = sym.symmetric_eigen();

    let (mean, variance) = mean_and_variance(p0, &ladder.mu);
    // √p·(μ − ⟨μ⟩) is orthogonal to the stationary mode √p
    let x = DVector::from_iterator(n, s.iter().zip(&ladder.mu).map(|(si, m)| si * (m - mean)));
    let zero = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|u, v| u.1.total_cmp(v.1))
        .map(|(k, _)| k)
        .expect("non-empty");
    let mut modes = Vec::with_capacity(n - 1);
    for k in 0..n {
        if k == zero {
            continue;
        }
        let lambda = -eig.eigenvalues[k];
        if !(lambda > 0.0) {
            return Err(Error::numerical(
                MODULE,
                format!("relaxation mode {k} has non-negative eigenvalue {:.3e}", -lambda),
            ));
        }
        let proj = eig.eigenvectors.column(k).dot(&x);
        modes.push(Mode {
            rate: lambda,
            weight: proj * proj,
        });
    }
    modes.sort_by(|u, v| u.rate.total_cmp(&v.rate));
    Ok(DipoleSpectrum {
        modes,
        mean_dipole: mean,
        variance,
        temperature: r.temperature,
        asymmetry,
    })
}

impl DipoleSpectrum {
    /// S_μ(ω) = Σ a_k·2λ_k/(ω² + λ_k²), even in ω.
    pub fn evaluate(&self, omega: f64) -> f64 {
        let w2 = omega * omega;
        self.modes
            .iter()
            .map(|m| m.weight * 2.0 * m.rate / (w2 + m.rate * m.rate))
            .sum()
    }

    /// C(τ) = Σ a_k e^{−λ_k|τ|}.
    pub fn correlation(&self, tau: f64) -> f64 {
        self.modes.iter().map(|m| m.weight * (-m.rate * tau.abs()).exp()).sum()
    }

    pub fn weight_sum(&self) -> f64 {
        self.modes.iter().map(|m| m.weight).sum()
    }

    pub fn slowest_rate(&self) -> f64 {
        self.modes.first().map_or(0.0, |m| m.rate)
    }

    pub fn fastest_rate(&self) -> f64 {
        self.modes.last().map_or(0.0, |m| m.rate)
    }

    /// ∫S_μ dω/2π over the whole line by adaptive quadrature.
    pub fn integrated_power(&self) -> Result<f64> {
        let scale = self.slowest_rate().max(f64::MIN_POSITIVE);
        let r = integrate_to_infinity(|w| self.evaluate(w), 0.0, scale, 1e-10, 0.0)?;
        Ok(r.value / PI)
    }
}

pub fn evaluate_spectrum(spec: &DipoleSpectrum, omega: f64) -> f64 {
    spec.evaluate(omega)
}

/// Dipole autocorrelation sampled on a uniform τ grid, with its derivative.
#[derive(Debug, Clone)]
pub struct SampledCorrelation {
    pub step: f64,
    pub c: Vec<f64>,
    pub dc: Vec<f64>,
}

/// Integrate the regression equations for the population correlations and
/// assemble C(τ) = Σ_ik μ_i μ_k ⟨ρ_i(τ)ρ_k(0)⟩ − ⟨μ⟩².
///
/// With the last level eliminated through Σρ = 1,
///
/// ```text
/// d/dτ ⟨ρ_i(τ)ρ_k⟩ = Σ_{j<N} (M_ij − M_iN) ⟨ρ_j(τ)ρ_k⟩ + M_iN ρ_k⁰        (i < N)
/// d/dτ ⟨ρ_N(τ)ρ_k⟩ = Σ_{i<N} (M_Ni − M_NN) ⟨ρ_i(τ)ρ_k⟩ + M_NN ρ_k⁰
/// ```
///
/// The equations are linear in ρ_k(0), so the dipole-weighted sum over k is
/// propagated as one system. Dipoles are measured from ⟨μ⟩ (which leaves C
/// unchanged) so C is not a small difference of large numbers.
pub fn correlation_via_ode(
    r: &RateMatrix,
    p0: &[f64],
    ladder: &DipoleLadder,
    tau_max: f64,
    n_steps: usize,
) -> Result<SampledCorrelation> {
    check_inputs(r, p0, ladder)?;
    if !(tau_max > 0.0) || n_steps < 2 {
        return Err(Error::domain(MODULE, "need tau_max > 0 and at least two steps"));
    }
    let n = r.len();
    let last = n - 1;
    let m = &r.generator;
    let (mean, _) = mean_and_variance(p0, &ladder.mu);
    let mu: Vec<f64> = ladder.mu.iter().map(|x| x - mean).collect();
    // Σ_k μ̃_k ρ_k⁰, zero up to round-off
    let forcing: f64 = mu.iter().zip(p0).map(|(a, b)| a * b).sum();
    let reduced = DMatrix::from_fn(last, last, |i, j| m[(i, j)] - m[(i, last)]);
    let top_row: Vec<f64> = (0..last).map(|i| m[(last, i)] - m[(last, last)]).collect();

    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        for i in 0..last {
            let mut acc = m[(i, last)] * forcing;
            for j in 0..last {
                acc += reduced[(i, j)] * y[j];
            }
            dy[i] = acc;
        }
        let mut acc = m[(last, last)] * forcing;
        for i in 0..last {
            acc += top_row[i] * y[i];
        }
        dy[last] = acc;
    };
    let assemble = |y: &[f64]| mu.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();

    let mut y: Vec<f64> = mu.iter().zip(p0).map(|(a, b)| a * b).collect();
    let y_scale = y.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut dp = DormandPrince::new(1e-10, 1e-13 * y_scale);
    let step = tau_max / n_steps as f64;
    let mut dy = vec![0.0; n];
    let mut c = Vec::with_capacity(n_steps + 1);
    let mut dc = Vec::with_capacity(n_steps + 1);
    let mut t = 0.0;
    for j in 0..=n_steps {
        if j > 0 {
            dp.advance(&rhs, &mut t, &mut y, step * j as f64)?;
        }
        rhs(t, &y, &mut dy);
        c.push(assemble(&y));
        dc.push(assemble(&dy));
    }
    let c0 = c[0].abs();
    if c[n_steps].abs() > 1e-4 * c0 {
        return Err(Error::domain(
            MODULE,
            format!(
                "correlation has not decayed by τ_max (C(τ_max)/C(0) = {:.2e}); increase tau_max",
                c[n_steps] / c0
            ),
        ));
    }
    Ok(SampledCorrelation { step, c, dc })
}

// 6-point Gauss–Legendre on [-1, 1]
const GL_X: [f64; 6] = [
    -0.932_469_514_203_152,
    -0.661_209_386_466_264_5,
    -0.238_619_186_083_196_9,
    0.238_619_186_083_196_9,
    0.661_209_386_466_264_5,
    0.932_469_514_203_152,
];
const GL_W: [f64; 6] = [
    0.171_324_492_379_170_3,
    0.360_761_573_048_138_6,
    0.467_913_934_572_691,
    0.467_913_934_572_691,
    0.360_761_573_048_138_6,
    0.171_324_492_379_170_3,
];

impl SampledCorrelation {
    pub fn tau_max(&self) -> f64 {
        self.step * (self.c.len() - 1) as f64
    }

    /// 2∫₀^τmax C(τ) cos ωτ dτ with C replaced by its cubic Hermite
    /// interpolant. Short segments (ωh < 0.5) use Gauss–Legendre; long ones
    /// integrate by parts exactly, which keeps the −2C'(0)/ω² tail exact.
    pub fn cosine_transform(&self, omega: f64) -> f64 {
        let h = self.step;
        let mut total = 0.0;
        for s in 0..self.c.len() - 1 {
            let a = s as f64 * h;
            let (c0, c1, d0, d1) = (self.c[s], self.c[s + 1], self.dc[s], self.dc[s + 1]);
            let slope = (c1 - c0) / h;
            let alpha = (3.0 * slope - 2.0 * d0 - d1) / h;
            let beta = (d0 + d1 - 2.0 * slope) / (h * h);
            if omega * h < 0.5 {
                let mut acc = 0.0;
                for (x, w) in GL_X.iter().zip(&GL_W) {
                    let t = 0.5 * h * (x + 1.0);
                    let p = c0 + t * (d0 + t * (alpha + t * beta));
                    acc += w * p * (omega * (a + t)).cos();
                }
                total += 0.5 * h * acc;
            } else {
                // antiderivative of p·cos: p sin/ω + p' cos/ω² − p'' sin/ω³ − p''' cos/ω⁴
                let f = |t: f64| {
                    let p = c0 + t * (d0 + t * (alpha + t * beta));
                    let dp = d0 + t * (2.0 * alpha + 3.0 * beta * t);
                    let ddp = 2.0 * alpha + 6.0 * beta * t;
                    let (sn, cs) = (omega * (a + t)).sin_cos();
                    let w2 = omega * omega;
                    p * sn / omega + dp * cs / w2 - ddp * sn / (w2 * omega) - 6.0 * beta * cs / (w2 * w2)
                };
                total += f(h) - f(0.0);
            }
        }
        2.0 * total
    }
}

/// S_μ at each ω from the regression equations.
pub fn spectrum_via_ode(
    r: &RateMatrix,
    p0: &[f64],
    ladder: &DipoleLadder,
    tau_max: f64,
    n_steps: usize,
    omegas: &[f64],
) -> Result<Vec<f64>> {
    let corr = correlation_via_ode(r, p0, ladder, tau_max, n_steps)?;
    Ok(omegas.iter().map(|&w| corr.cosine_transform(w)).collect())
}

/// Thermally activated two-level fluctuator:
/// (μ₀−μ₁)²·2Γ₀/(ω²+Γ₀²)·e^{−ħν₁₀/k_BT}.
pub fn two_level_limit(mu0: f64, mu1: f64, gamma0: f64, nu10: f64, temperature: f64, omega: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::domain(MODULE, format!("temperature must be positive, got {temperature}")));
    }
    let boltz = (-HBAR * nu10 / (KB * temperature)).exp();
    Ok((mu0 - mu1).powi(2) * 2.0 * gamma0 / (omega * omega + gamma0 * gamma0) * boltz)
}

/// ω_c = Γ₀(n(ν₁₀) + 1).
pub fn crossover_frequency(gamma0: f64, nu10: f64, temperature: f64) -> Result<f64> {
    Ok(gamma0 * (bose_occupation(nu10, temperature)? + 1.0))
}

/// Least-squares slope of log S against log ω over the points inside `window`.
pub fn fit_loglog_slope(omegas: &[f64], values: &[f64], window: (f64, f64)) -> Result<LineFit> {
    if omegas.len() != values.len() {
        return Err(Error::analysis(MODULE, "frequency and value lists differ in length"));
    }
    let (lo, hi) = window;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&w, &v) in omegas.iter().zip(values) {
        if w >= lo * (1.0 - 1e-12) && w <= hi * (1.0 + 1e-12) {
            if !(v > 0.0 && w > 0.0) {
                return Err(Error::analysis(MODULE, format!("non-positive sample {v:e} at ω = {w:e}")));
            }
            xs.push(w.ln());
            ys.push(v.ln());
        }
    }
    if xs.len() < 8 {
        return Err(Error::analysis(
            MODULE,
            format!("only {} points in window [{lo:e}, {hi:e}]; need 8", xs.len()),
        ));
    }
    linear_fit(&xs, &ys)
}

/// Intersection of the low-frequency plateau with the line fitted over
/// `slope_window` in log-log coordinates.
pub fn knee_frequency(omegas: &[f64], values: &[f64], plateau: f64, slope_window: (f64, f64)) -> Result<f64> {
    if !(plateau > 0.0) {
        return Err(Error::analysis(MODULE, "plateau level must be positive"));
    }
    let fit = fit_loglog_slope(omegas, values, slope_window)?;
    if !(fit.slope < 0.0) {
        return Err(Error::analysis(MODULE, format!("fitted slope {:.3} does not fall off", fit.slope)));
    }
    Ok(((plateau.ln() - fit.intercept) / fit.slope).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrheniusFit {
    /// S_T in the units of the input values.
    pub prefactor: f64,
    /// Activation temperature T₀ (K).
    pub activation: f64,
    pub residual_rms: f64,
    /// Points used (those up to the maximum).
    pub n: usize,
}

/// Fit F(T) = S_T·e^{−T₀/T} to the rising flank: the samples up to the
/// largest value, in order of temperature.
pub fn arrhenius_fit(temps: &[f64], values: &[f64]) -> Result<ArrheniusFit> {
    if temps.len() != values.len() {
        return Err(Error::analysis(MODULE, "temperature and value lists differ in length"));
    }
    let mut pts: Vec<(f64, f64)> = temps.iter().copied().zip(values.iter().copied()).collect();
    if pts.iter().any(|&(t, v)| !(t > 0.0 && v > 0.0)) {
        return Err(Error::analysis(MODULE, "temperatures and values must be positive"));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let peak = pts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(k, _)| k)
        .expect("non-empty");
    let flank = &pts[..=peak];
    if flank.len() < 4 {
        return Err(Error::analysis(
            MODULE,
            format!("rising flank has {} points; need 4", flank.len()),
        ));
    }
    if flank.windows(2).any(|w| w[1].1 <= w[0].1) {
        return Err(Error::analysis(MODULE, "rising flank is not monotonic"));
    }
    let xs: Vec<f64> = flank.iter().map(|p| 1.0 / p.0).collect();
    let ys: Vec<f64> = flank.iter().map(|p| p.1.ln()).collect();
    let fit = linear_fit(&xs, &ys)?;
    Ok(ArrheniusFit {
        prefactor: fit.intercept.exp(),
        activation: -fit.slope,
        residual_rms: fit.residual_rms,
        n: flank.len(),
    })
}
