// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: a TOML document in which every physical quantity is a
//! string carrying its unit, e.g. `U0 = "12 meV"`.
//!
//! Parsing resolves the document into SI values. Serialising writes SI values
//! back with SI unit tags, so a parse → serialise → parse cycle is exact.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{self, BulkMaterial, SurfacePotentialParams};
use crate::units::{EnergyUnit, LengthUnit, AMU, DEBYE, E_CHARGE};

const MODULE: &str = "config";

// --- quantity strings -------------------------------------------------------

fn split_quantity<'a>(key: &str, text: &'a str) -> Result<(f64, &'a str)> {
    let text = text.trim();
    let (num, unit) = match text.find(char::is_whitespace) {
        Some(k) => (&text[..k], text[k..].trim()),
        None => (text, ""),
    };
    let value: f64 = num
        .parse()
        .map_err(|_| Error::config(MODULE, format!("{key}: cannot read a number from '{text}'")))?;
    if unit.is_empty() {
        return Err(Error::config(MODULE, format!("{key}: missing unit in '{text}'")));
    }
    Ok((value, unit))
}

fn unit_error(key: &str, unit: &str, known: &str) -> Error {
    Error::config(MODULE, format!("{key}: unknown unit '{unit}' (expected one of {known})"))
}

fn energy(key: &str, text: &str) -> Result<f64> {
    let (v, u) = split_quantity(key, text)?;
    let unit: EnergyUnit = u.parse().map_err(|_| unit_error(key, u, "J, eV, meV, K, Hz"))?;
    Ok(v * unit.si_factor())
}

fn length(key: &str, text: &str) -> Result<f64> {
    let (v, u) = split_quantity(key, text)?;
    let unit: LengthUnit = u.parse().map_err(|_| unit_error(key, u, "m, A, a0, um"))?;
    Ok(v * unit.si_factor())
}

fn inverse_length(key: &str, text: &str) -> Result<f64> {
    let (v, u) = split_quantity(key, text)?;
    let inner = u
        .strip_prefix("1/")
        .or_else(|| u.strip_suffix("^-1"))
        .ok_or_else(|| unit_error(key, u, "1/m, 1/A, 1/a0"))?;
    let unit: LengthUnit = inner.parse().map_err(|_| unit_error(key, u, "1/m, 1/A, 1/a0"))?;
    Ok(v / unit.si_factor())
}

fn mass(key: &str, text: &str) -> Result<f64> {
    let (v, u) = split_quantity(key, text)?;
    match u {
        "kg" => Ok(v),
        "amu" | "u" | "Da" => Ok(v * AMU),
        _ => Err(unit_error(key, u, "kg, amu")),
    }
}

fn volume(key: &str, text: &str) -> Result<f64> {
    let (v, u) = split_quantity(key, text)?;
    let inner = u.strip_suffix("^3").ok_or_else(|| unit_error(key, u, "m^3, A^3, a0^3"))?;
    let unit: LengthUnit = inner.parse().map_err(|_| unit_error(key, u, "m^3, A^3, a0^3"))?;
    Ok(v * unit.si_factor().powi(3))
}

fn speed(key: &str, text: &str) -> Result<f64> {
    let (v, u) = split_quantity(key, text)?;
    match u {
        "m/s" => Ok(v),
        "km/s" => Ok(v * 1e3),
        _ => Err(unit_error(key, u, "m/s, km/s")),
    }
}

fn mass_density(key: &str, text: &str) -> Result<f64> {
    let (v, u) = split_quantity(key, text)?;
    match u {
        "kg/m^3" => Ok(v),
        "g/cm^3" => Ok(v * 1e3),
        _ => Err(unit_error(key, u, "kg/m^3, g/cm^3")),
    }
}

/// Ordinary frequency in Hz.
fn frequency(key: &str, text: &str) -> Result<f64> {
    let (v, u) = split_quantity(key, text)?;
    let f = match u {
        "Hz" => 1.0,
        "kHz" => 1e3,
        "MHz" => 1e6,
        "GHz" => 1e9,
        "THz" => 1e12,
        "rad/s" => 1.0 / (2.0 * PI),
        _ => return Err(unit_error(key, u, "Hz, kHz, MHz, GHz, THz, rad/s")),
    };
    Ok(v * f)
}

fn charge(key: &str, text: &str) -> Result<f64> {
    let (v, u) = split_quantity(key, text)?;
    match u {
        "C" => Ok(v),
        "e" => Ok(v * E_CHARGE),
        _ => Err(unit_error(key, u, "C, e")),
    }
}

fn areal_density(key: &str, text: &str) -> Result<f64> {
    let (v, u) = split_quantity(key, text)?;
    match u {
        "1/m^2" | "m^-2" => Ok(v),
        "1/cm^2" | "cm^-2" => Ok(v * 1e4),
        _ => Err(unit_error(key, u, "1/m^2, 1/cm^2")),
    }
}

/// S_μ in (C·m)²/Hz.
fn dipole_psd(key: &str, text: &str) -> Result<f64> {
    let (v, u) = split_quantity(key, text)?;
    match u {
        "D^2/Hz" => Ok(v * DEBYE * DEBYE),
        "C^2m^2/Hz" | "(C*m)^2/Hz" => Ok(v),
        _ => Err(unit_error(key, u, "D^2/Hz, (C*m)^2/Hz")),
    }
}

/// A temperature, absolute or in units of ħν₁₀/k_B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    Kelvin(f64),
    /// k_BT/ħν₁₀.
    Hnu(f64),
}

impl Temperature {
    pub fn parse(key: &str, text: &str) -> Result<Self> {
        let (v, u) = split_quantity(key, text)?;
        let t = match u {
            "K" => Temperature::Kelvin(v),
            "hnu" => Temperature::Hnu(v),
            _ => return Err(unit_error(key, u, "K, hnu")),
        };
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::config(MODULE, format!("{key}: temperature must be positive, got '{text}'")));
        }
        Ok(t)
    }

    /// Kelvin, given ħν₁₀/k_B in kelvin.
    pub fn kelvin(self, hnu_kelvin: f64) -> f64 {
        match self {
            Temperature::Kelvin(t) => t,
            Temperature::Hnu(r) => r * hnu_kelvin,
        }
    }

    pub fn to_text(self) -> String {
        match self {
            Temperature::Kelvin(t) => format!("{t} K"),
            Temperature::Hnu(r) => format!("{r} hnu"),
        }
    }
}

/// Comma-separated temperature list as given on the command line.
pub fn parse_temperature_list(text: &str) -> Result<Vec<Temperature>> {
    let list: Vec<Temperature> = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            // accept "50K" and "0.2hnu" without the space
            let split = s.find(|c: char| c.is_ascii_alphabetic()).unwrap_or(s.len());
            Temperature::parse("--temperature", &format!("{} {}", &s[..split], &s[split..]))
        })
        .collect::<Result<_>>()?;
    if list.is_empty() {
        return Err(Error::config(MODULE, "--temperature: empty list"));
    }
    Ok(list)
}

// --- raw document -----------------------------------------------------------

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    material: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
    #[serde(default)]
    potential: RawPotential,
    #[serde(default)]
    bulk: RawBulk,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    spectrum: RawSpectrum,
    #[serde(default)]
    tempsweep: RawTempsweep,
    #[serde(default)]
    trap: RawTrap,
    #[serde(default)]
    montecarlo: RawMonteCarlo,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(rename = "U0", skip_serializing_if = "Option::is_none")]
    u0: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z0: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    adatom_mass: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polarizability: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reduced_mass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    image_factor: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawBulk {
    #[serde(skip_serializing_if = "Option::is_none")]
    speed_of_sound: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    density: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    debye_frequency: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    atomic_mass: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    #[serde(skip_serializing_if = "Option::is_none")]
    n_points: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_states: Option<i64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawSpectrum {
    #[serde(skip_serializing_if = "Option::is_none")]
    temperatures: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points_per_decade: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    slope_window: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawTempsweep {
    #[serde(skip_serializing_if = "Option::is_none")]
    temperatures: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omegas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    arrhenius_omega: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawTrap {
    #[serde(skip_serializing_if = "Option::is_none")]
    distance: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trap_frequency: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ion_mass: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    charge: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    axis: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coverage: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawMonteCarlo {
    #[serde(skip_serializing_if = "Option::is_none")]
    n_dipoles: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    extent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_spacing: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_seeds: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distances: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s_mu: Option<String>,
}

// --- resolved configuration -------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub n_points: usize,
    /// `None` keeps round(U₀/ħν₁₀) states.
    pub max_states: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumConfig {
    pub temperatures: Vec<Temperature>,
    /// Grid bounds in units of Γ₀.
    pub omega_min: f64,
    pub omega_max: f64,
    pub points_per_decade: usize,
    /// 1/f fit window in units of ω_c.
    pub slope_window: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TempsweepConfig {
    pub temperatures: Vec<Temperature>,
    /// Frequencies in units of Γ₀.
    pub omegas: Vec<f64>,
    /// Frequency (units of Γ₀) used for the Arrhenius fit.
    pub arrhenius_omega: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrapSection {
    pub distance: f64,
    /// Ordinary frequency (Hz).
    pub trap_frequency_hz: f64,
    pub ion_mass: f64,
    pub charge: f64,
    pub axis: [f64; 3],
    /// σ (1/m²).
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloConfig {
    pub n_dipoles: usize,
    /// Patch side in units of d₀.
    pub extent: f64,
    /// d₀ (m).
    pub min_spacing: f64,
    pub n_seeds: usize,
    pub seed: u64,
    /// Ion heights in units of d₀.
    pub distances: Vec<f64>,
    /// Reference S_μ per dipole ((C·m)²/Hz).
    pub s_mu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub material_name: String,
    pub potential: SurfacePotentialParams,
    pub reduced_mass: bool,
    pub image_factor: f64,
    pub material: BulkMaterial,
    pub solver: SolverConfig,
    pub spectrum: SpectrumConfig,
    pub tempsweep: TempsweepConfig,
    pub trap: TrapSection,
    pub montecarlo: MonteCarloConfig,
    pub output: PathBuf,
}

pub const DEFAULT_PRESET: &str = "Ne-Au";
pub const DEFAULT_SPECTRUM_TEMPERATURES: [f64; 6] = [0.2, 0.3, 0.4, 1.0, 2.0, 3.0];

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(MODULE, format!("{key} must be positive, got {v}")))
    }
}

fn positive_int(key: &str, v: i64) -> Result<usize> {
    if v > 0 {
        Ok(v as usize)
    } else {
        Err(Error::config(MODULE, format!("{key} must be a positive integer, got {v}")))
    }
}

fn temperature_list(key: &str, list: &[String]) -> Result<Vec<Temperature>> {
    if list.is_empty() {
        return Err(Error::config(MODULE, format!("{key}: temperature list is empty")));
    }
    list.iter().map(|t| Temperature::parse(key, t)).collect()
}

fn default_sweep() -> Vec<Temperature> {
    crate::numerics::linspace(0.2, 6.0, 59)
        .into_iter()
        .map(|r| Temperature::Hnu((r * 1e6).round() / 1e6))
        .collect()
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, &Overrides::default())
}

/// Command-line values that take precedence over the document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub preset: Option<String>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub temperatures: Option<Vec<Temperature>>,
}

/// Parse a document, apply `over`, then validate. An empty document with no
/// preset override selects the default preset.
pub fn parse_config_with(text: &str, over: &Overrides) -> Result<RunConfig> {
    let mut raw: RawConfig = toml::from_str(text).map_err(|e| Error::config(MODULE, e.to_string()))?;
    if let Some(p) = &over.preset {
        raw.preset = Some(p.clone());
    }
    if raw.preset.is_none() && raw.potential == RawPotential::default() {
        raw.preset = Some(DEFAULT_PRESET.into());
    }
    if let Some(o) = &over.output {
        raw.output = Some(o.display().to_string());
    }
    if let Some(s) = over.seed {
        raw.montecarlo.seed = Some(s);
    }
    if let Some(t) = &over.temperatures {
        if t.is_empty() {
            return Err(Error::config(MODULE, "--temperature: empty list"));
        }
        raw.spectrum.temperatures = Some(t.iter().map(|x| x.to_text()).collect());
    }
    resolve(raw)
}

fn resolve(raw: RawConfig) -> Result<RunConfig> {
    let preset_name = raw.preset.clone();
    let base = match &preset_name {
        Some(name) => Some(potential::potential_preset(name)?),
        None => None,
    };
    let rp = &raw.potential;
    let pick = |key: &str, text: &Option<String>, parse: fn(&str, &str) -> Result<f64>, fallback: Option<f64>| -> Result<f64> {
        match text {
            Some(t) => parse(key, t),
            None => fallback.ok_or_else(|| {
                Error::config(MODULE, format!("{key} is required when no preset supplies it"))
            }),
        }
    };
    let u0 = positive("potential.U0", pick("potential.U0", &rp.u0, energy, base.as_ref().map(|b| b.u0))?)?;
    let z0 = positive("potential.z0", pick("potential.z0", &rp.z0, length, base.as_ref().map(|b| b.z0))?)?;
    let beta = positive(
        "potential.beta",
        pick("potential.beta", &rp.beta, inverse_length, base.as_ref().and_then(|b| b.beta))?,
    )?;
    let adatom_mass = positive(
        "potential.adatom_mass",
        pick("potential.adatom_mass", &rp.adatom_mass, mass, base.as_ref().map(|b| b.adatom_mass))?,
    )?;
    let alpha = positive(
        "potential.polarizability",
        pick(
            "potential.polarizability",
            &rp.polarizability,
            volume,
            base.as_ref().and_then(|b| b.polarizability),
        )?,
    )?;
    let name = rp
        .name
        .clone()
        .or_else(|| preset_name.clone())
        .unwrap_or_else(|| "custom".into());
    let params = SurfacePotentialParams::new(name, u0, z0, beta, adatom_mass, alpha)
        .map_err(|e| Error::config(MODULE, e.message))?;
    let image_factor = positive("potential.image_factor", rp.image_factor.unwrap_or(1.0))?;

    let material_name = raw.material.clone().unwrap_or_else(|| "Au".into());
    let mut material = potential::material_preset(&material_name)?;
    let rb = &raw.bulk;
    if let Some(t) = &rb.speed_of_sound {
        material.speed_of_sound = positive("bulk.speed_of_sound", speed("bulk.speed_of_sound", t)?)?;
    }
    if let Some(t) = &rb.density {
        material.density = positive("bulk.density", mass_density("bulk.density", t)?)?;
    }
    if let Some(t) = &rb.debye_frequency {
        material.debye_frequency = positive("bulk.debye_frequency", frequency("bulk.debye_frequency", t)?)?;
    }
    if let Some(t) = &rb.atomic_mass {
        material.atomic_mass = positive("bulk.atomic_mass", mass("bulk.atomic_mass", t)?)?;
    }

    let n_points = positive_int("solver.n_points", raw.solver.n_points.unwrap_or(4000))?;
    if n_points < crate::boundstates::MIN_POINTS {
        return Err(Error::config(
            MODULE,
            format!("solver.n_points must be ≥ {}", crate::boundstates::MIN_POINTS),
        ));
    }
    let max_states = match raw.solver.max_states {
        Some(v) => {
            let k = positive_int("solver.max_states", v)?;
            if k < 2 {
                return Err(Error::config(MODULE, "solver.max_states must be ≥ 2"));
            }
            Some(k)
        }
        None => None,
    };

    let rs = &raw.spectrum;
    let temperatures = match &rs.temperatures {
        Some(list) => temperature_list("spectrum.temperatures", list)?,
        None => DEFAULT_SPECTRUM_TEMPERATURES.iter().map(|&r| Temperature::Hnu(r)).collect(),
    };
    let omega_min = positive("spectrum.omega_min", rs.omega_min.unwrap_or(1e-3))?;
    let omega_max = positive("spectrum.omega_max", rs.omega_max.unwrap_or(1e4))?;
    if omega_max <= omega_min {
        return Err(Error::config(MODULE, "spectrum.omega_max must exceed spectrum.omega_min"));
    }
    let points_per_decade = positive_int("spectrum.points_per_decade", rs.points_per_decade.unwrap_or(60))?;
    let slope_window = match &rs.slope_window {
        Some(w) if w.len() == 2 && w[0] > 0.0 && w[1] > w[0] => (w[0], w[1]),
        Some(_) => {
            return Err(Error::config(MODULE, "spectrum.slope_window must be [lo, hi] with 0 < lo < hi"));
        }
        None => (1.0, 10.0),
    };

    let rt = &raw.tempsweep;
    let sweep = match &rt.temperatures {
        Some(list) => temperature_list("tempsweep.temperatures", list)?,
        None => default_sweep(),
    };
    let sweep_omegas = match &rt.omegas {
        Some(list) if !list.is_empty() => list
            .iter()
            .map(|&w| positive("tempsweep.omegas", w))
            .collect::<Result<Vec<_>>>()?,
        Some(_) => return Err(Error::config(MODULE, "tempsweep.omegas is empty")),
        None => vec![1e-3, 20.0, 100.0],
    };
    let arrhenius_omega = positive("tempsweep.arrhenius_omega", rt.arrhenius_omega.unwrap_or(20.0))?;

    let tr = &raw.trap;
    let axis = match &tr.axis {
        Some(a) if a.len() == 3 => {
            let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::config(MODULE, format!("trap.axis must have unit length, |axis| = {norm}")));
            }
            [a[0], a[1], a[2]]
        }
        Some(_) => return Err(Error::config(MODULE, "trap.axis must have three components")),
        None => [0.0, 0.0, 1.0],
    };
    let trap = TrapSection {
        distance: positive("trap.distance", opt(&tr.distance, "trap.distance", length, 10e-6)?)?,
        trap_frequency_hz: positive(
            "trap.trap_frequency",
            opt(&tr.trap_frequency, "trap.trap_frequency", frequency, 1e6)?,
        )?,
        ion_mass: positive("trap.ion_mass", opt(&tr.ion_mass, "trap.ion_mass", mass, 40.0 * AMU)?)?,
        charge: positive("trap.charge", opt(&tr.charge, "trap.charge", charge, E_CHARGE)?)?,
        axis,
        coverage: positive("trap.coverage", opt(&tr.coverage, "trap.coverage", areal_density, 1e18)?)?,
    };

    let rm = &raw.montecarlo;
    let distances = match &rm.distances {
        Some(list) if list.len() >= 2 => list
            .iter()
            .map(|&d| positive("montecarlo.distances", d))
            .collect::<Result<Vec<_>>>()?,
        Some(_) => return Err(Error::config(MODULE, "montecarlo.distances needs at least two entries")),
        None => (3..=10).map(f64::from).collect(),
    };
    let montecarlo = MonteCarloConfig {
        n_dipoles: positive_int("montecarlo.n_dipoles", rm.n_dipoles.unwrap_or(100))?,
        extent: positive("montecarlo.extent", rm.extent.unwrap_or(100.0))?,
        min_spacing: positive(
            "montecarlo.min_spacing",
            opt(&rm.min_spacing, "montecarlo.min_spacing", length, 1e-6)?,
        )?,
        n_seeds: positive_int("montecarlo.n_seeds", rm.n_seeds.unwrap_or(10_000))?,
        seed: rm.seed.unwrap_or(42),
        distances,
        s_mu: positive("montecarlo.s_mu", opt(&rm.s_mu, "montecarlo.s_mu", dipole_psd, 1e-9 * DEBYE * DEBYE)?)?,
    };

    Ok(RunConfig {
        preset: preset_name,
        material_name,
        potential: params,
        reduced_mass: rp.reduced_mass.unwrap_or(false),
        image_factor,
        material,
        solver: SolverConfig { n_points, max_states },
        spectrum: SpectrumConfig {
            temperatures,
            omega_min,
            omega_max,
            points_per_decade,
            slope_window,
        },
        tempsweep: TempsweepConfig {
            temperatures: sweep,
            omegas: sweep_omegas,
            arrhenius_omega,
        },
        trap,
        montecarlo,
        output: PathBuf::from(raw.output.unwrap_or_else(|| "out".into())),
    })
}

fn opt(text: &Option<String>, key: &str, parse: fn(&str, &str) -> Result<f64>, default: f64) -> Result<f64> {
    match text {
        Some(t) => parse(key, t),
        None => Ok(default),
    }
}

impl RunConfig {
    /// Defaults for a named preset.
    pub fn for_preset(name: &str) -> Result<Self> {
        parse_config(&format!("preset = \"{name}\"\n"))
    }

    /// Potential with the reduced-mass option applied.
    pub fn effective_potential(&self) -> SurfacePotentialParams {
        if self.reduced_mass {
            self.potential.with_reduced_mass(self.material.atomic_mass)
        } else {
            self.potential.clone()
        }
    }

    pub fn trap_frequency(&self) -> f64 {
        2.0 * PI * self.trap.trap_frequency_hz
    }

    /// Fully explicit TOML with SI values.
    pub fn to_toml(&self) -> String {
        let p = &self.potential;
        let m = &self.material;
        let temps = |list: &[Temperature]| list.iter().map(|t| t.to_text()).collect::<Vec<_>>();
        let raw = RawConfig {
            preset: self.preset.clone(),
            material: Some(self.material_name.clone()),
            output: Some(self.output.display().to_string()),
            potential: RawPotential {
                name: Some(p.name.clone()),
                u0: Some(format!("{} J", p.u0)),
                z0: Some(format!("{} m", p.z0)),
                beta: Some(format!("{} 1/m", p.beta)),
                adatom_mass: Some(format!("{} kg", p.adatom_mass)),
                polarizability: Some(format!("{} m^3", p.polarizability)),
                reduced_mass: Some(self.reduced_mass),
                image_factor: Some(self.image_factor),
            },
            bulk: RawBulk {
                speed_of_sound: Some(format!("{} m/s", m.speed_of_sound)),
                density: Some(format!("{} kg/m^3", m.density)),
                debye_frequency: Some(format!("{} Hz", m.debye_frequency)),
                atomic_mass: Some(format!("{} kg", m.atomic_mass)),
            },
            solver: RawSolver {
                n_points: Some(self.solver.n_points as i64),
                max_states: self.solver.max_states.map(|k| k as i64),
            },
            spectrum: RawSpectrum {
                temperatures: Some(temps(&self.spectrum.temperatures)),
                omega_min: Some(self.spectrum.omega_min),
                omega_max: Some(self.spectrum.omega_max),
                points_per_decade: Some(self.spectrum.points_per_decade as i64),
                slope_window: Some(vec![self.spectrum.slope_window.0, self.spectrum.slope_window.1]),
            },
            tempsweep: RawTempsweep {
                temperatures: Some(temps(&self.tempsweep.temperatures)),
                omegas: Some(self.tempsweep.omegas.clone()),
                arrhenius_omega: Some(self.tempsweep.arrhenius_omega),
            },
            trap: RawTrap {
                distance: Some(format!("{} m", self.trap.distance)),
                trap_frequency: Some(format!("{} Hz", self.trap.trap_frequency_hz)),
                ion_mass: Some(format!("{} kg", self.trap.ion_mass)),
                charge: Some(format!("{} C", self.trap.charge)),
                axis: Some(self.trap.axis.to_vec()),
                coverage: Some(format!("{} 1/m^2", self.trap.coverage)),
            },
            montecarlo: RawMonteCarlo {
                n_dipoles: Some(self.montecarlo.n_dipoles as i64),
                extent: Some(self.montecarlo.extent),
                min_spacing: Some(format!("{} m", self.montecarlo.min_spacing)),
                n_seeds: Some(self.montecarlo.n_seeds as i64),
                seed: Some(self.montecarlo.seed),
                distances: Some(self.montecarlo.distances.clone()),
                s_mu: Some(format!("{} (C*m)^2/Hz", self.montecarlo.s_mu)),
            },
        };
        toml::to_string(&raw).expect("config serialises")
    }
}

/// Accepted unit tags per quantity, for documentation and error messages.
pub const UNIT_TABLE: &[(&str, &str)] = &[
    ("energy", "J, eV, meV, K, Hz"),
    ("length", "m, A, a0, um"),
    ("inverse length", "1/m, 1/A, 1/a0"),
    ("mass", "kg, amu"),
    ("volume", "m^3, A^3, a0^3"),
    ("speed", "m/s, km/s"),
    ("mass density", "kg/m^3, g/cm^3"),
    ("frequency", "Hz, kHz, MHz, GHz, THz, rad/s"),
    ("charge", "C, e"),
    ("areal density", "1/m^2, 1/cm^2"),
    ("dipole PSD", "D^2/Hz, (C*m)^2/Hz"),
    ("temperature", "K, hnu"),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{ANGSTROM, BOHR};
    use crate::ErrorKind;

    #[test]
    fn minimal_document_gets_defaults() {
        let c = parse_config("preset = \"Ne-Au\"\n").unwrap();
        assert_eq!(c.potential.name, "Ne-Au");
        assert!((c.potential.u0 / (1e-3 * E_CHARGE) - 12.0).abs() < 1e-12);
        assert_eq!(c.solver.n_points, 4000);
        assert_eq!(c.solver.max_states, None);
        assert_eq!(c.spectrum.temperatures.len(), 6);
        assert_eq!(c.spectrum.points_per_decade, 60);
        assert_eq!(c.tempsweep.temperatures.len(), 59);
        assert_eq!(c.montecarlo.n_dipoles, 100);
        assert_eq!(c.montecarlo.seed, 42);
        assert_eq!(c.trap.axis, [0.0, 0.0, 1.0]);
        assert!(!c.reduced_mass);
        assert_eq!(c.image_factor, 1.0);
    }

    #[test]
    fn explicit_units() {
        let c = parse_config(
            r#"
            preset = "Ne-Au"
            [potential]
            U0 = "0.012 eV"
            z0 = "3.2 A"
            beta = "1.8 1/A"
            adatom_mass = "20 amu"
            [trap]
            distance = "50 um"
            trap_frequency = "2 MHz"
            [spectrum]
            temperatures = ["10 K", "0.5 hnu"]
            "#,
        )
        .unwrap();
        assert!((c.potential.z0 - 3.2 * ANGSTROM).abs() < 1e-22);
        assert!((c.potential.beta - 1.8 / ANGSTROM).abs() < 1e-3);
        assert_eq!(c.trap.trap_frequency_hz, 2e6);
        assert_eq!(c.spectrum.temperatures, vec![Temperature::Kelvin(10.0), Temperature::Hnu(0.5)]);
        assert_eq!(Temperature::Hnu(0.5).kelvin(40.0), 20.0);
    }

    #[test]
    fn errors_name_the_key() {
        let cases = [
            ("preset = \"Ne-Au\"\n[potential]\nU0 = \"12\"\n", "potential.U0"),
            ("preset = \"Ne-Au\"\n[potential]\nU0 = \"12 furlongs\"\n", "potential.U0"),
            ("preset = \"Ne-Au\"\n[trap]\ndistance = \"-1 um\"\n", "trap.distance"),
            ("preset = \"Ne-Au\"\nbogus = 1\n", "bogus"),
            ("preset = \"Ne-Au\"\n[solver]\nn_points = 10\n", "solver.n_points"),
            ("preset = \"Xe-Pt\"\n", "Xe-Pt"),
            ("preset = \"K-surface\"\n", "beta"),
        ];
        for (doc, key) in cases {
            let e = parse_config(doc).unwrap_err();
            assert_eq!(e.kind, ErrorKind::Config, "{doc}");
            assert!(e.message.contains(key), "{doc}: {}", e.message);
        }
    }

    #[test]
    fn k_surface_with_user_beta() {
        let c = parse_config(
            "preset = \"K-surface\"\n[potential]\nbeta = \"2.5 1/A\"\npolarizability = \"43 A^3\"\n",
        )
        .unwrap();
        assert!((c.potential.beta * ANGSTROM - 2.5).abs() < 1e-12);
    }

    #[test]
    fn round_trip_is_exact() {
        for doc in [
            "preset = \"Ne-Au\"\n",
            "preset = \"H-Au\"\nmaterial = \"Au\"\n[solver]\nmax_states = 5\n[potential]\nreduced_mass = true\n",
            "preset = \"Ne-Au\"\n[spectrum]\ntemperatures = [\"12.5 K\", \"2 hnu\"]\n[montecarlo]\nseed = 7\n",
        ] {
            let a = parse_config(doc).unwrap();
            let text = a.to_toml();
            let b = parse_config(&text).unwrap();
            assert_eq!(a, b, "{text}");
            assert_eq!(text, b.to_toml());
        }
    }

    #[test]
    fn reduced_mass_applies_on_demand() {
        let c = parse_config("preset = \"Ne-Au\"\n[potential]\nreduced_mass = true\n").unwrap();
        assert!((c.potential.adatom_mass / AMU - 20.0).abs() < 1e-12);
        assert!(c.effective_potential().adatom_mass < c.potential.adatom_mass);
    }

    #[test]
    fn overrides_take_precedence() {
        let over = Overrides {
            preset: Some("H-Au".into()),
            output: Some("elsewhere".into()),
            seed: Some(9),
            temperatures: Some(vec![Temperature::Kelvin(30.0)]),
        };
        let c = parse_config_with("preset = \"Ne-Au\"\n[montecarlo]\nseed = 1\n", &over).unwrap();
        assert_eq!(c.potential.name, "H-Au");
        assert_eq!(c.output, PathBuf::from("elsewhere"));
        assert_eq!(c.montecarlo.seed, 9);
        assert_eq!(c.spectrum.temperatures, vec![Temperature::Kelvin(30.0)]);
        let d = parse_config_with("", &Overrides::default()).unwrap();
        assert_eq!(d.preset.as_deref(), Some(DEFAULT_PRESET));
    }

    #[test]
    fn temperature_flag() {
        let t = parse_temperature_list("0.2hnu, 50K,1 hnu").unwrap();
        assert_eq!(t, vec![Temperature::Hnu(0.2), Temperature::Kelvin(50.0), Temperature::Hnu(1.0)]);
        assert!(parse_temperature_list("0.2").is_err());
        assert!(parse_temperature_list("-1K").is_err());
    }

    #[test]
    fn other_units() {
        assert!((volume("k", "4.5 a0^3").unwrap() / BOHR.powi(3) - 4.5).abs() < 1e-12);
        assert_eq!(mass_density("k", "19.3 g/cm^3").unwrap(), 19300.0);
        assert!((frequency("k", "6.283185307179586 rad/s").unwrap() - 1.0).abs() < 1e-15);
        assert!((inverse_length("k", "0.95 a0^-1").unwrap() * BOHR - 0.95).abs() < 1e-12);
        assert!((dipole_psd("k", "1 D^2/Hz").unwrap() / (DEBYE * DEBYE) - 1.0).abs() < 1e-15);
        assert!((areal_density("k", "1e14 1/cm^2").unwrap() - 1e18).abs() < 1e3);
        assert!(charge("k", "2 e").unwrap() == 2.0 * E_CHARGE);
        assert!(speed("k", "3.962 km/s").unwrap() == 3962.0);
    }
}
