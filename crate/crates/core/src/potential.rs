// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

//! The exp-3 adatom–surface potential
//!
//! ```text
//! U(z) = β̃/(β̃−3) · U₀ · [ (3/β̃)·exp(β̃(1 − z/z₀)) − (z₀/z)³ ],   β̃ = β·z₀
//! ```
//!
//! with its analytic derivative, the C₃ tail coefficient, the harmonic
//! vibrational frequency at the minimum and named parameter presets.
//!
//! Note that the repulsive term is bounded by `3/β̃·e^β̃`, so close enough to
//! the surface the −z⁻³ term wins again: the wall is a finite barrier, and
//! U → −∞ as z → 0⁺. [`wall_barrier`] locates it.

use crate::error::{Error, Result};
use crate::units::{AMU, ANGSTROM, BOHR, E_CHARGE, HBAR};

const MODULE: &str = "potential";

/// Parameters of one adsorption system, SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePotentialParams {
    pub name: String,
    /// Well depth U₀ (J).
    pub u0: f64,
    /// Equilibrium distance z₀ (m).
    pub z0: f64,
    /// Reciprocal repulsion range β (1/m).
    pub beta: f64,
    /// Vibrating mass (kg).
    pub adatom_mass: f64,
    /// Static polarizability volume α (m³).
    pub polarizability: f64,
}

/// Bulk electrode material seen by the phonon bath.
#[derive(Debug, Clone, PartialEq)]
pub struct BulkMaterial {
    pub name: String,
    /// Averaged speed of sound v (m/s).
    pub speed_of_sound: f64,
    /// Mass density ρ (kg/m³).
    pub density: f64,
    /// Debye frequency ν_D as an ordinary frequency (Hz).
    pub debye_frequency: f64,
    /// Mass of one substrate atom (kg), used for the reduced-mass option.
    pub atomic_mass: f64,
}

impl SurfacePotentialParams {
    pub fn new(
        name: impl Into<String>,
        u0: f64,
        z0: f64,
        beta: f64,
        adatom_mass: f64,
        polarizability: f64,
    ) -> Result<Self> {
        let p = Self {
            name: name.into(),
            u0,
            z0,
            beta,
            adatom_mass,
            polarizability,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (label, v) in [
            ("U0", self.u0),
            ("z0", self.z0),
            ("beta", self.beta),
            ("adatom_mass", self.adatom_mass),
            ("polarizability", self.polarizability),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(MODULE, format!("{label} must be positive and finite, got {v}")));
            }
        }
        if self.beta_tilde() <= 4.0 {
            return Err(Error::domain(
                MODULE,
                format!("β·z0 = {} must exceed 4 for a physical well", self.beta_tilde()),
            ));
        }
        Ok(())
    }

    /// Dimensionless β̃ = β·z₀.
    pub fn beta_tilde(&self) -> f64 {
        self.beta * self.z0
    }

    /// Same parameters with the adatom mass replaced by the adatom–substrate
    /// reduced mass.
    pub fn with_reduced_mass(&self, substrate_atom_mass: f64) -> Self {
        let m = self.adatom_mass;
        Self {
            adatom_mass: m * substrate_atom_mass / (m + substrate_atom_mass),
            ..self.clone()
        }
    }

    fn prefactor(&self) -> f64 {
        let bt = self.beta_tilde();
        bt / (bt - 3.0) * self.u0
    }
}

fn check_z(z: f64) -> Result<()> {
    if z > 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(MODULE, format!("z must be positive, got {z}")))
    }
}

/// U(z) in J, without the domain check. Used on solver grids.
pub(crate) fn eval_unchecked(p: &SurfacePotentialParams, z: f64) -> f64 {
    let bt = p.beta_tilde();
    let s = p.z0 / z;
    p.prefactor() * (3.0 / bt * (bt * (1.0 - z / p.z0)).exp() - s * s * s)
}

pub(crate) fn derivative_unchecked(p: &SurfacePotentialParams, z: f64) -> f64 {
    let bt = p.beta_tilde();
    let s = p.z0 / z;
    p.prefactor() * (-3.0 / p.z0 * (bt * (1.0 - z / p.z0)).exp() + 3.0 * s * s * s / z)
}

pub fn evaluate(p: &SurfacePotentialParams, z: f64) -> Result<f64> {
    check_z(z)?;
    Ok(eval_unchecked(p, z))
}

/// dU/dz in J/m.
pub fn derivative(p: &SurfacePotentialParams, z: f64) -> Result<f64> {
    check_z(z)?;
    Ok(derivative_unchecked(p, z))
}

/// Long-range coefficient in U ≈ −C₃/z³ (J·m³).
pub fn c3(p: &SurfacePotentialParams) -> Result<f64> {
    let bt = p.beta_tilde();
    if bt <= 3.0 {
        return Err(Error::domain(MODULE, format!("β·z0 = {bt} ≤ 3 has no C3 tail")));
    }
    Ok(bt * p.z0.powi(3) * p.u0 / (bt - 3.0))
}

/// Harmonic estimate of ν₁₀ = ν₁ − ν₀ in rad/s.
pub fn harmonic_frequency(p: &SurfacePotentialParams) -> Result<f64> {
    let bt = p.beta_tilde();
    if bt <= 4.0 {
        return Err(Error::domain(MODULE, format!("β·z0 = {bt} ≤ 4 gives no real frequency")));
    }
    let curvature = 3.0 * (bt * bt - 4.0 * bt) / (bt - 3.0);
    Ok((p.u0 / (p.adatom_mass * p.z0 * p.z0) * curvature).sqrt())
}

/// Rough number of strongly bound states, round(U₀/ħν₁₀), at least 1.
pub fn bound_state_count_estimate(p: &SurfacePotentialParams) -> Result<usize> {
    let nu = harmonic_frequency(p)?;
    Ok(((p.u0 / (HBAR * nu)).round() as usize).max(1))
}

/// Location and height of the finite barrier on the repulsive side
/// (the maximum of U on (0, z₀)).
pub fn wall_barrier(p: &SurfacePotentialParams) -> (f64, f64) {
    // U' > 0 just left of the barrier top, U' < 0 between top and z0
    let mut lo = 1e-6 * p.z0;
    let mut hi = p.z0 * (1.0 - 1e-9);
    // U' changes sign exactly once on (0, z0) for β̃ > 3
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if derivative_unchecked(p, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let z = 0.5 * (lo + hi);
    (z, eval_unchecked(p, z))
}

/// Named parameter set. `beta` or `polarizability` may be left for the user.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialPreset {
    pub name: &'static str,
    pub u0: f64,
    pub z0: f64,
    pub beta: Option<f64>,
    pub adatom_mass: f64,
    pub polarizability: Option<f64>,
    pub note: &'static str,
}

impl PotentialPreset {
    /// Complete the preset; any `Some` override wins over the stored value.
    pub fn resolve(&self, beta: Option<f64>, polarizability: Option<f64>) -> Result<SurfacePotentialParams> {
        let beta = beta.or(self.beta).ok_or_else(|| {
            Error::config(
                MODULE,
                format!("preset '{}' has no β; supply potential.beta", self.name),
            )
        })?;
        let alpha = polarizability.or(self.polarizability).ok_or_else(|| {
            Error::config(
                MODULE,
                format!("preset '{}' has no polarizability; supply potential.polarizability", self.name),
            )
        })?;
        SurfacePotentialParams::new(self.name, self.u0, self.z0, beta, self.adatom_mass, alpha)
    }
}

pub const PRESET_NAMES: [&str; 3] = ["H-Au", "Ne-Au", "K-surface"];
pub const MATERIAL_NAMES: [&str; 1] = ["Au"];

/// Adatom presets.
///
/// Ne–Au uses z₀ = 6.05 a₀ and β = 0.95 a₀⁻¹. An alternative
/// parameterisation of the same system has z₀ ≈ 3.1 Å and β ≈ 1.86 Å⁻¹.
/// K-surface (from K–Ag) ships without β or polarizability.
pub fn potential_preset(name: &str) -> Result<PotentialPreset> {
    let mev = 1e-3 * E_CHARGE;
    match name {
        "H-Au" => Ok(PotentialPreset {
            name: "H-Au",
            u0: 2.0 * E_CHARGE,
            z0: 1.6 * ANGSTROM,
            beta: Some(3.91 / ANGSTROM),
            adatom_mass: AMU,
            polarizability: Some(4.5 * BOHR.powi(3)),
            note: "DFT-derived H on Au(111)",
        }),
        "Ne-Au" => Ok(PotentialPreset {
            name: "Ne-Au",
            u0: 12.0 * mev,
            z0: 6.05 * BOHR,
            beta: Some(0.95 / BOHR),
            adatom_mass: 20.0 * AMU,
            polarizability: Some(0.36 * ANGSTROM.powi(3)),
            note: "weakly bound noble gas; alternative fit z0≈3.1 Å, β≈1.86 Å⁻¹",
        }),
        "K-surface" => Ok(PotentialPreset {
            name: "K-surface",
            u0: 1.79 * E_CHARGE,
            z0: 2.0 * ANGSTROM,
            beta: None,
            adatom_mass: 39.0 * AMU,
            polarizability: None,
            note: "β and α must be user-supplied",
        }),
        other => Err(Error::config(
            MODULE,
            format!("unknown preset '{other}' (known: {})", PRESET_NAMES.join(", ")),
        )),
    }
}

pub fn material_preset(name: &str) -> Result<BulkMaterial> {
    match name {
        "Au" => Ok(BulkMaterial {
            name: "Au".into(),
            speed_of_sound: 3962.0,
            density: 19.3e3,
            debye_frequency: 3.6e12,
            atomic_mass: 196.966_57 * AMU,
        }),
        other => Err(Error::config(MODULE, format!("unknown material '{other}' (known: Au)"))),
    }
}

/// Preset lookup returning the adatom preset together with the Au substrate.
pub fn preset(name: &str) -> Result<(PotentialPreset, BulkMaterial)> {
    Ok((potential_preset(name)?, material_preset("Au")?))
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn minimum_is_minus_u0() {
        for p in [ne(), h_au(), deep_harmonic()] {
            let u = evaluate(&p, p.z0).unwrap();
            assert!((u + p.u0).abs() < 1e-12 * p.u0);
            assert!(derivative(&p, p.z0).unwrap().abs() < 1e-9 * p.u0 / p.z0);
        }
    }

    #[test]
    fn domain_errors() {
        let p = ne();
        assert!(evaluate(&p, 0.0).is_err());
        assert!(evaluate(&p, -1.0).is_err());
        assert!(derivative(&p, 0.0).is_err());
        let bad = SurfacePotentialParams { beta: 3.5 / p.z0, ..p.clone() };
        assert!(bad.validate().is_err());
        assert!(harmonic_frequency(&bad).is_err());
        let worse = SurfacePotentialParams { beta: 2.5 / p.z0, ..p };
        assert!(c3(&worse).is_err());
    }

    #[test]
    fn c3_tail() {
        let p = ne();
        let c = c3(&p).unwrap();
        let bt = p.beta_tilde();
        assert!((c / (p.beta * p.z0.powi(4) * p.u0 / (bt - 3.0)) - 1.0).abs() < 1e-14);
        for k in [50.0, 200.0, 1000.0] {
            let z = k * p.z0;
            let ratio = -evaluate(&p, z).unwrap() * z.powi(3) / c;
            assert!((ratio - 1.0).abs() < 1e-9, "{k}: {ratio}");
        }
        // at 2 z0 the repulsive term is already small
        let z = 2.0 * p.z0;
        let u = evaluate(&p, z).unwrap();
        assert!((u / (-c / z.powi(3)) - 1.0).abs() < 0.03);
        // doubling U0 doubles C3; β̃ → ∞ gives z0³U0
        let double = SurfacePotentialParams { u0: 2.0 * p.u0, ..p.clone() };
        assert!((c3(&double).unwrap() / c - 2.0).abs() < 1e-14);
        let stiff = SurfacePotentialParams { beta: 1e9 / p.z0, ..p.clone() };
        assert!((c3(&stiff).unwrap() / (p.z0.powi(3) * p.u0) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for p in [ne(), h_au()] {
            let n = 400;
            for i in 0..=n {
                let z = p.z0 * (0.5 + 4.5 * i as f64 / n as f64);
                let h = 1e-5 * z;
                let fd = (eval_unchecked(&p, z + h) - eval_unchecked(&p, z - h)) / (2.0 * h);
                let an = derivative(&p, z).unwrap();
                let scale = an.abs().max(p.u0 / p.z0);
                assert!((fd - an).abs() < 1e-8 * scale, "z/z0={}: {fd} vs {an}", z / p.z0);
            }
            // tail: dU/dz → 3C₃/z⁴
            let z = 300.0 * p.z0;
            let tail = 3.0 * c3(&p).unwrap() / z.powi(4);
            assert!((derivative(&p, z).unwrap() / tail - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn harmonic_frequency_examples() {
        let p = ne();
        let nu = harmonic_frequency(&p).unwrap();
        let thz = nu / (2.0 * PI) / 1e12;
        assert!((thz - 0.396).abs() < 0.005, "{thz}");
        // second difference at z0 equals m ν²
        let h = 1e-4 * p.z0;
        let k = (eval_unchecked(&p, p.z0 + h) - 2.0 * eval_unchecked(&p, p.z0) + eval_unchecked(&p, p.z0 - h)) / (h * h);
        assert!((k / (p.adatom_mass * nu * nu) - 1.0).abs() < 1e-6);
        // four times the mass halves the frequency
        let heavy = SurfacePotentialParams { adatom_mass: 4.0 * p.adatom_mass, ..p.clone() };
        assert!((harmonic_frequency(&heavy).unwrap() / nu - 0.5).abs() < 1e-14);
        // H–Au sits in the tens of THz
        let h_thz = harmonic_frequency(&h_au()).unwrap() / (2.0 * PI) / 1e12;
        assert!(h_thz > 20.0 && h_thz < 80.0, "{h_thz}");
    }

    #[test]
    fn bound_state_estimate() {
        let p = ne();
        let nb = bound_state_count_estimate(&p).unwrap();
        assert!((7..=10).contains(&nb), "{nb}");
        // U0 = ħν gives one state; doubling U0 at fixed ν doubles the count
        let nu = harmonic_frequency(&p).unwrap();
        let single = SurfacePotentialParams { u0: HBAR * nu, adatom_mass: p.adatom_mass * HBAR * nu / p.u0, ..p.clone() };
        assert!((harmonic_frequency(&single).unwrap() / nu - 1.0).abs() < 1e-12);
        assert_eq!(bound_state_count_estimate(&single).unwrap(), 1);
        let d = deep_harmonic();
        let nd = bound_state_count_estimate(&d).unwrap();
        let d2 = SurfacePotentialParams { u0: 2.0 * d.u0, adatom_mass: 2.0 * d.adatom_mass, ..d.clone() };
        let nd2 = bound_state_count_estimate(&d2).unwrap();
        assert!((nd2 as f64 / nd as f64 - 2.0).abs() < 0.01);
    }

    #[test]
    fn presets() {
        let (ne_p, au) = preset("Ne-Au").unwrap();
        assert!((ne_p.u0 / (1e-3 * E_CHARGE) - 12.0).abs() < 1e-12);
        let (h, _) = preset("H-Au").unwrap();
        assert!((h.u0 / E_CHARGE - 2.0).abs() < 1e-14);
        assert_eq!(au.density, 19300.0);
        assert_eq!(au.speed_of_sound, 3962.0);
        assert_eq!(au.debye_frequency, 3.6e12);
        assert!(preset("Xe-Pt").is_err());
        let (k, _) = preset("K-surface").unwrap();
        assert!(k.resolve(None, None).is_err());
        let kp = k.resolve(Some(3.0 / ANGSTROM), Some(40.0 * ANGSTROM.powi(3))).unwrap();
        assert!((kp.u0 / E_CHARGE - 1.79).abs() < 1e-14);
    }

    #[test]
    fn single_interior_minimum_and_barrier() {
        let p = ne();
        let (zb, ub) = wall_barrier(&p);
        assert!(zb < p.z0 && ub > 0.0);
        // dense scan between the barrier and far out: one local minimum at z0
        let n = 200_000;
        let zs: Vec<f64> = (0..n).map(|i| zb + (50.0 * p.z0 - zb) * i as f64 / (n - 1) as f64).collect();
        let us: Vec<f64> = zs.iter().map(|&z| eval_unchecked(&p, z)).collect();
        let minima: Vec<usize> = (1..n - 1).filter(|&i| us[i] < us[i - 1] && us[i] < us[i + 1]).collect();
        assert_eq!(minima.len(), 1);
        assert!((zs[minima[0]] / p.z0 - 1.0).abs() < 1e-3);
        assert!(us.iter().all(|&u| u >= -p.u0 * (1.0 + 1e-12)));
        // U → 0⁻ far away
        assert!(eval_unchecked(&p, 1e4 * p.z0) < 0.0);
        assert!(eval_unchecked(&p, 1e4 * p.z0).abs() < 1e-10 * p.u0);
        // and the wall is finite: U → −∞ as z → 0⁺
        assert!(eval_unchecked(&p, 0.05 * p.z0) < -p.u0);
    }

    #[test]
    fn reduced_mass_option() {
        let p = ne();
        let au = material_preset("Au").unwrap();
        let r = p.with_reduced_mass(au.atomic_mass);
        assert!(r.adatom_mass < p.adatom_mass);
        assert!((r.adatom_mass / AMU - 20.0 * 196.96657 / 216.96657).abs() < 1e-9);
    }
}
