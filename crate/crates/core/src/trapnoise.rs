// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

//! Electric-field noise at the ion from uncorrelated fluctuating surface
//! dipoles, and the heating rate it drives.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, ErrorKind, Result};
use crate::numerics::linear_fit;
use crate::numerics::quad::integrate_to_infinity;
use crate::units::{four_pi_eps0, HBAR};

const MODULE: &str = "trapnoise";

/// Prefactor of the surface-averaged field noise formula.
pub const PREFACTOR: f64 = 3.0 / 8.0;
/// Closed form of d⁴(4πε₀)²∫d²s E_z² for a vertical unit dipole.
pub const PLANE_CONSTANT: f64 = 3.0 * PI / 4.0;
pub const MAX_CONSECUTIVE_REJECTIONS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig {
    /// Ion height above the electrode d (m).
    pub distance: f64,
    /// ω_t (rad/s).
    pub trap_frequency: f64,
    /// m_I (kg).
    pub ion_mass: f64,
    /// q (C).
    pub charge: f64,
    /// Unit vector the field noise is projected on.
    pub axis: [f64; 3],
}

impl TrapConfig {
    pub fn validate(&self) -> Result<()> {
        for (label, v) in [
            ("distance", self.distance),
            ("trap_frequency", self.trap_frequency),
            ("ion_mass", self.ion_mass),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(MODULE, format!("{label} must be positive, got {v}")));
            }
        }
        if !self.charge.is_finite() || self.charge == 0.0 {
            return Err(Error::domain(MODULE, "charge must be nonzero"));
        }
        let norm = self.axis.iter().map(|a| a * a).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::domain(MODULE, format!("axis must be a unit vector, |axis| = {norm}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSample {
    pub positions: Vec<[f64; 2]>,
    pub min_spacing: f64,
    /// Side of the square patch [0, L]².
    pub extent: f64,
    pub seed: u64,
}

impl SurfaceSample {
    /// Areal density n/L² (1/m²).
    pub fn density(&self) -> f64 {
        self.positions.len() as f64 / (self.extent * self.extent)
    }

    /// Ion position above the patch centre.
    pub fn ion_above_centre(&self, distance: f64) -> [f64; 3] {
        [0.5 * self.extent, 0.5 * self.extent, distance]
    }
}

/// Field at `ion` of a unit dipole pointing along +z at `source` in the
/// z = 0 plane, in V/m per C·m.
pub fn dipole_field_kernel(source: [f64; 2], ion: [f64; 3]) -> Result<[f64; 3]> {
    if !(ion[2] > 0.0) {
        return Err(Error::domain(MODULE, "ion must sit strictly above the surface"));
    }
    Ok(kernel_unchecked(source, ion))
}

fn kernel_unchecked(source: [f64; 2], ion: [f64; 3]) -> [f64; 3] {
    let r = [ion[0] - source[0], ion[1] - source[1], ion[2]];
    let r2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    let rn = r2.sqrt();
    let pref = 1.0 / (four_pi_eps0() * r2 * rn);
    // 3(ẑ·r̂)r̂ − ẑ
    let c = 3.0 * r[2] / r2;
    [pref * c * r[0], pref * c * r[1], pref * (c * r[2] - 1.0)]
}

/// S_E = (3/8)·σ/(4πε₀)²·S_μ/d⁴ in (V/m)²/Hz.
pub fn analytic_field_noise(sigma: f64, s_mu: f64, d: f64) -> Result<f64> {
    field_noise_with_constant(PREFACTOR, sigma, s_mu, d)
}

/// Same law with an arbitrary geometric constant K.
pub fn field_noise_with_constant(k: f64, sigma: f64, s_mu: f64, d: f64) -> Result<f64> {
    if !(sigma > 0.0 && d > 0.0 && s_mu >= 0.0) {
        return Err(Error::domain(
            MODULE,
            format!("need σ > 0, d > 0, S_μ ≥ 0 (got {sigma:e}, {d:e}, {s_mu:e})"),
        ));
    }
    let e = four_pi_eps0();
    Ok(k * sigma * s_mu / (e * e) / d.powi(4))
}

/// d⁴(4πε₀)²∫d²s E_z(s; d)² over the infinite plane, by quadrature at height d.
pub fn kernel_integral_constant_at(d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::domain(MODULE, format!("height must be positive, got {d}")));
    }
    let e = four_pi_eps0();
    let integrand = |s: f64| {
        let ez = kernel_unchecked([s, 0.0], [0.0, 0.0, d])[2] * e;
        2.0 * PI * s * ez * ez
    };
    let r = integrate_to_infinity(integrand, 0.0, d, 1e-12, 0.0)?;
    Ok(r.value * d.powi(4))
}

/// The plane-integral constant, evaluated numerically at d = 1 μm.
pub fn kernel_integral_constant() -> Result<f64> {
    kernel_integral_constant_at(1e-6)
}

/// Uniform random positions on [0, L]² with pairwise spacing ≥ `min_spacing`.
pub fn sample_surface(n: usize, extent: f64, min_spacing: f64, seed: u64) -> Result<SurfaceSample> {
    if !(extent > 0.0 && min_spacing >= 0.0) {
        return Err(Error::domain(MODULE, "need extent > 0 and min_spacing ≥ 0"));
    }
    let covered = n as f64 * PI * min_spacing * min_spacing / 4.0;
    if covered >= 0.5 * extent * extent {
        return Err(Error::new(
            ErrorKind::Packing,
            MODULE,
            format!(
                "{n} exclusion discs of diameter {min_spacing:e} cover {:.0}% of the patch (limit 50%)",
                100.0 * covered / (extent * extent)
            ),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions: Vec<[f64; 2]> = Vec::with_capacity(n);
    let d2 = min_spacing * min_spacing;
    let mut rejections = 0;
    while positions.len() < n {
        let p = [rng.gen::<f64>() * extent, rng.gen::<f64>() * extent];
        let clash = positions
            .iter()
            .any(|q| (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) < d2);
        if clash {
            rejections += 1;
            if rejections > MAX_CONSECUTIVE_REJECTIONS {
                return Err(Error::new(
                    ErrorKind::Packing,
                    MODULE,
                    format!("gave up after {} points: too many consecutive rejections", positions.len()),
                ));
            }
        } else {
            rejections = 0;
            positions.push(p);
        }
    }
    Ok(SurfaceSample {
        positions,
        min_spacing,
        extent,
        seed,
    })
}

/// Σ_i |axis·E(r_i)|²·S_μ with the ion above the patch centre.
pub fn mc_field_noise(sample: &SurfaceSample, s_mu: f64, trap: &TrapConfig) -> Result<f64> {
    trap.validate()?;
    Ok(projected_kernel_power(sample, trap.distance, trap.axis) * s_mu)
}

fn projected_kernel_power(sample: &SurfaceSample, distance: f64, axis: [f64; 3]) -> f64 {
    let ion = sample.ion_above_centre(distance);
    sample
        .positions
        .iter()
        .map(|&p| {
            let e = kernel_unchecked(p, ion);
            let proj = axis[0] * e[0] + axis[1] * e[1] + axis[2] * e[2];
            proj * proj
        })
        .sum()
}

/// Patch geometry for the seed-averaged distance scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McGeometry {
    pub n_dipoles: usize,
    /// Patch side (m).
    pub extent: f64,
    /// d₀ (m).
    pub min_spacing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceRow {
    pub distance: f64,
    pub mean: f64,
    pub stderr: f64,
    pub n_seeds: usize,
    /// σ·K·S_μ/((4πε₀)²d⁴) with K = 3π/4 and σ = N/L².
    pub plane_prediction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub exponent: f64,
    pub stderr: f64,
    pub rows: Vec<DistanceRow>,
}

impl ScalingFit {
    /// Largest relative spread of mean/plane_prediction across the rows.
    pub fn ratio_spread(&self) -> f64 {
        let ratios: Vec<f64> = self.rows.iter().map(|r| r.mean / r.plane_prediction).collect();
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        ratios.iter().fold(0.0f64, |m, r| m.max((r / mean - 1.0).abs()))
    }
}

/// Valid distances: granularity of the sample below 3d₀, finite-patch edge
/// effects above L/10.
pub fn check_window(geom: &McGeometry, d_list: &[f64]) -> Result<()> {
    let lo = 3.0 * geom.min_spacing;
    let hi = geom.extent / 10.0;
    for &d in d_list {
        if d < lo * (1.0 - 1e-12) {
            return Err(Error::analysis(
                MODULE,
                format!("d = {d:e} is below 3·d0 = {lo:e}; individual dipoles are resolved there"),
            ));
        }
        if d > hi * (1.0 + 1e-12) {
            return Err(Error::analysis(
                MODULE,
                format!("d = {d:e} exceeds extent/10 = {hi:e}; the finite patch edge distorts the d⁻⁴ law"),
            ));
        }
    }
    Ok(())
}

/// Seed-averaged S_E(d) over independent samples (seeds `seed + k`) and the
/// log-log exponent of its distance dependence.
pub fn distance_scaling_fit(
    geom: &McGeometry,
    n_seeds: usize,
    seed: u64,
    s_mu: f64,
    trap: &TrapConfig,
    d_list: &[f64],
) -> Result<ScalingFit> {
    check_window(geom, d_list)?;
    if n_seeds == 0 {
        return Err(Error::analysis(MODULE, "need at least one seed"));
    }
    let samples: Vec<SurfaceSample> = (0..n_seeds as u64)
        .into_par_iter()
        .map(|k| sample_surface(geom.n_dipoles, geom.extent, geom.min_spacing, seed.wrapping_add(k)))
        .collect::<Result<_>>()?;
    fit_samples(&samples, s_mu, trap, d_list)
}

/// Distance scan over explicit samples; no window check.
pub fn fit_samples(samples: &[SurfaceSample], s_mu: f64, trap: &TrapConfig, d_list: &[f64]) -> Result<ScalingFit> {
    trap.validate()?;
    if d_list.len() < 2 {
        return Err(Error::analysis(MODULE, "need at least two distances"));
    }
    // per-sample values in sample order, then summed serially
    let values: Vec<Vec<f64>> = samples
        .par_iter()
        .map(|s| {
            d_list
                .iter()
                .map(|&d| projected_kernel_power(s, d, trap.axis) * s_mu)
                .collect()
        })
        .collect();
    let n = samples.len() as f64;
    let density = samples.iter().map(|s| s.density()).sum::<f64>() / n;
    let mut rows = Vec::with_capacity(d_list.len());
    for (j, &d) in d_list.iter().enumerate() {
        let mean = values.iter().map(|v| v[j]).sum::<f64>() / n;
        let var = if samples.len() > 1 {
            values.iter().map(|v| (v[j] - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        rows.push(DistanceRow {
            distance: d,
            mean,
            stderr: (var / n).sqrt(),
            n_seeds: samples.len(),
            plane_prediction: field_noise_with_constant(PLANE_CONSTANT, density, s_mu, d)?,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.distance.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean.ln()).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::analysis(MODULE, "field noise vanished at some distance"));
    }
    let fit = linear_fit(&xs, &ys)?;
    Ok(ScalingFit {
        exponent: fit.slope,
        stderr: fit.slope_stderr,
        rows,
    })
}

/// ṅ = q²/(2 m_I ħ ω_t)·S_E(ω_t) in quanta/s.
pub fn heating_rate(trap: &TrapConfig, s_e: f64) -> Result<f64> {
    trap.validate()?;
    if !(s_e >= 0.0) {
        return Err(Error::domain(MODULE, format!("S_E must be ≥ 0, got {s_e}")));
    }
    let q = trap.charge;
    Ok(q * q / (2.0 * trap.ion_mass * HBAR * trap.trap_frequency) * s_e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{AMU, DEBYE, E_CHARGE};
    use proptest::prelude::*;

    fn trap(d: f64) -> TrapConfig {
        TrapConfig {
            distance: d,
            trap_frequency: 2.0 * PI * 1e6,
            ion_mass: 40.0 * AMU,
            charge: E_CHARGE,
            axis: [0.0, 0.0, 1.0],
        }
    }

    #[test]
    fn kernel_examples() {
        let d = 2e-6;
        let e0 = four_pi_eps0();
        let k = dipole_field_kernel([0.0, 0.0], [0.0, 0.0, d]).unwrap();
        assert!((k[2] * e0 * d.powi(3) - 2.0).abs() < 1e-14);
        assert!(k[0] == 0.0 && k[1] == 0.0);
        let k = dipole_field_kernel([0.0, 0.0], [d, 0.0, d]).unwrap();
        let expect = 0.5 / (e0 * 2.0 * 2f64.sqrt() * d.powi(3));
        assert!((k[2] / expect - 1.0).abs() < 1e-13);
        let far = dipole_field_kernel([0.0, 0.0], [2.0 * d, 0.0, 2.0 * d]).unwrap();
        assert!((k[2] / far[2] - 8.0).abs() < 1e-12);
        assert!(dipole_field_kernel([0.0, 0.0], [0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn plane_integral_matches_closed_form() {
        // π∫₁^∞ (9/x⁵ − 6/x⁴ + 1/x³) dx = π(9/4 − 2 + 1/2)
        assert!((PLANE_CONSTANT - PI * (9.0 / 4.0 - 2.0 + 0.5)).abs() < 1e-15);
        let k = kernel_integral_constant().unwrap();
        assert!((k / PLANE_CONSTANT - 1.0).abs() < 1e-8, "{k}");
        let a = kernel_integral_constant_at(1e-6).unwrap();
        let b = kernel_integral_constant_at(2e-6).unwrap();
        assert!((a / b - 1.0).abs() < 1e-6);
    }

    #[test]
    fn analytic_noise_examples() {
        let s_mu = 1e-11 * DEBYE * DEBYE;
        let s = analytic_field_noise(1e18, s_mu, 10e-6).unwrap();
        // 3/8·1e18·1e-11·(3.33564e-30)²/(1.11265e-10)²/1e-20
        assert!((s / 3.37e-13 - 1.0).abs() < 0.01, "{s}");
        let s2 = analytic_field_noise(1e18, s_mu, 20e-6).unwrap();
        assert!((s / s2 - 16.0).abs() < 1e-12);
        assert_eq!(analytic_field_noise(1e18, 0.0, 10e-6).unwrap(), 0.0);
        assert!(analytic_field_noise(0.0, s_mu, 1e-5).is_err());
    }

    #[test]
    fn sampling_contract() {
        let d0 = 1e-6;
        let s = sample_surface(100, 100.0 * d0, d0, 7).unwrap();
        assert_eq!(s.positions.len(), 100);
        for (i, p) in s.positions.iter().enumerate() {
            assert!(p[0] >= 0.0 && p[0] <= s.extent && p[1] >= 0.0 && p[1] <= s.extent);
            for q in &s.positions[..i] {
                assert!(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt() >= d0);
            }
        }
        assert_eq!(sample_surface(1, 1.0, 0.1, 3).unwrap().positions.len(), 1);
        assert_eq!(s, sample_surface(100, 100.0 * d0, d0, 7).unwrap());
        assert_ne!(s.positions, sample_surface(100, 100.0 * d0, d0, 8).unwrap().positions);
        let err = sample_surface(10_000, 10.0 * d0, d0, 1).unwrap_err();
        assert_eq!(err.kind, ErrorKind::Packing);
    }

    #[test]
    fn single_dipole_under_ion() {
        let d = 5e-6;
        let s = SurfaceSample {
            positions: vec![[50e-6, 50e-6]],
            min_spacing: 1e-6,
            extent: 100e-6,
            seed: 0,
        };
        let s_mu = 2.0e-70;
        let e0 = four_pi_eps0();
        let v = mc_field_noise(&s, s_mu, &trap(d)).unwrap();
        assert!((v / (4.0 * s_mu / (e0 * e0) / d.powi(6)) - 1.0).abs() < 1e-12);
        let fit = fit_samples(&[s], s_mu, &trap(d), &[3e-6, 5e-6, 7e-6, 10e-6]).unwrap();
        assert!((fit.exponent + 6.0).abs() < 1e-10);
    }

    #[test]
    fn window_is_enforced() {
        let g = McGeometry {
            n_dipoles: 100,
            extent: 100e-6,
            min_spacing: 1e-6,
        };
        let t = trap(5e-6);
        let e = distance_scaling_fit(&g, 4, 1, 1.0, &t, &[1e-6, 5e-6]).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Analysis);
        assert!(distance_scaling_fit(&g, 4, 1, 1.0, &t, &[5e-6, 20e-6]).is_err());
    }

    #[test]
    fn heating_rate_examples() {
        let t = trap(1e-5);
        let n = heating_rate(&t, 1e-12).unwrap();
        // e²/(2·40 u·ħ·2π·1 MHz)·1e-12 worked out by hand: 291.7 /s
        assert!((n / 291.7 - 1.0).abs() < 1e-3, "{n}");
        assert_eq!(heating_rate(&t, 0.0).unwrap(), 0.0);
        let half = TrapConfig { trap_frequency: 0.5 * t.trap_frequency, ..t };
        assert!((heating_rate(&half, 1e-12).unwrap() / n - 2.0).abs() < 1e-14);
        let bad = TrapConfig { axis: [1.0, 1.0, 0.0], ..t };
        assert!(heating_rate(&bad, 1e-12).is_err());
    }

    #[test]
    fn parallel_and_serial_agree() {
        let g = McGeometry {
            n_dipoles: 50,
            extent: 100e-6,
            min_spacing: 1e-6,
        };
        let d = [3e-6, 5e-6, 10e-6];
        let a = distance_scaling_fit(&g, 16, 99, 1e-70, &trap(5e-6), &d).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| distance_scaling_fit(&g, 16, 99, 1e-70, &trap(5e-6), &d).unwrap());
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn linear_additive_isotropic(seed in 0u64..1000, angle in 0.0f64..(2.0 * PI), c in 0.1f64..10.0) {
            let d0 = 1e-6;
            let s = sample_surface(40, 100.0 * d0, d0, seed).unwrap();
            let t = trap(5.0 * d0);
            let base = mc_field_noise(&s, 1e-70, &t).unwrap();
            let scaled = mc_field_noise(&s, c * 1e-70, &t).unwrap();
            prop_assert!((scaled / base / c - 1.0).abs() < 1e-12);
            let (left, right) = s.positions.split_at(17);
            let part = |pts: &[[f64; 2]]| {
                let sub = SurfaceSample { positions: pts.to_vec(), ..s.clone() };
                mc_field_noise(&sub, 1e-70, &t).unwrap()
            };
            prop_assert!(((part(left) + part(right)) / base - 1.0).abs() < 1e-12);
            let cx = 0.5 * s.extent;
            let (sn, cs) = angle.sin_cos();
            let rotated: Vec<[f64; 2]> = s
                .positions
                .iter()
                .map(|p| {
                    let (x, y) = (p[0] - cx, p[1] - cx);
                    [cx + cs * x - sn * y, cx + sn * x + cs * y]
                })
                .collect();
            let r = SurfaceSample { positions: rotated, ..s.clone() };
            prop_assert!((mc_field_noise(&r, 1e-70, &t).unwrap() / base - 1.0).abs() < 1e-12);
        }
    }
}
