// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

//! Python bindings: `import pyadnoise`.

use std::path::PathBuf;

use adnoise::config::{parse_config_with, parse_temperature_list, Overrides, RunConfig};
use adnoise::phonons::stationary_distribution;
use adnoise::pipeline::{self, Command};
use adnoise::trapnoise::{self, McGeometry, TrapConfig};
use adnoise::{potential, units, ErrorKind};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(pyadnoise, AdnoiseError, PyException);

fn to_py(e: adnoise::Error) -> PyErr {
    match e.kind {
        ErrorKind::Config | ErrorKind::Domain => PyValueError::new_err(e.to_string()),
        _ => AdnoiseError::new_err(e.to_string()),
    }
}

fn resolve(config: Option<&str>, preset: Option<&str>, seed: Option<u64>, temperature: Option<&str>) -> PyResult<RunConfig> {
    let over = Overrides {
        preset: preset.map(String::from),
        output: None,
        seed,
        temperatures: temperature.map(parse_temperature_list).transpose().map_err(to_py)?,
    };
    parse_config_with(config.unwrap_or(""), &over).map_err(to_py)
}

/// Resolved configuration as TOML with SI values.
#[pyfunction]
#[pyo3(signature = (config=None, preset=None))]
fn resolved_config(config: Option<&str>, preset: Option<&str>) -> PyResult<String> {
    Ok(resolve(config, preset, None, None)?.to_toml())
}

/// Run a CLI subcommand and return the written file paths.
#[pyfunction]
#[pyo3(signature = (command, output, config=None, preset=None, seed=None, temperature=None))]
fn run(
    command: &str,
    output: PathBuf,
    config: Option<&str>,
    preset: Option<&str>,
    seed: Option<u64>,
    temperature: Option<&str>,
) -> PyResult<Vec<String>> {
    let cmd: Command = command.parse().map_err(to_py)?;
    let mut cfg = resolve(config, preset, seed, temperature)?;
    cfg.output = output;
    let paths = pipeline::execute(&cfg, cmd).map_err(to_py)?;
    Ok(paths.iter().map(|p| p.display().to_string()).collect())
}

/// Solved adatom model: bound states, dipoles and phonon couplings. SI units.
#[pyclass(name = "Model", frozen)]
struct PyModel {
    inner: pipeline::Model,
}

#[pymethods]
impl PyModel {
    #[new]
    #[pyo3(signature = (preset="Ne-Au", config=None))]
    fn new(preset: &str, config: Option<&str>) -> PyResult<Self> {
        let cfg = resolve(config, Some(preset), None, None)?;
        let inner = pipeline::Model::build(&cfg).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.params.name.clone()
    }

    /// ν₁₀ in rad/s.
    #[getter]
    fn nu10(&self) -> f64 {
        self.inner.nu10
    }

    /// Γ₁→₀ at T = 0 in 1/s.
    #[getter]
    fn gamma0(&self) -> f64 {
        self.inner.gamma0
    }

    /// ħν₁₀/k_B in K.
    #[getter]
    fn hnu_kelvin(&self) -> f64 {
        self.inner.hnu_kelvin()
    }

    #[getter]
    fn n_states(&self) -> usize {
        self.inner.states.len()
    }

    /// Level energies in J.
    #[getter]
    fn energies(&self) -> Vec<f64> {
        self.inner.states.energies.clone()
    }

    /// μ_i in C·m.
    #[getter]
    fn dipoles(&self) -> Vec<f64> {
        self.inner.ladder.mu.clone()
    }

    /// Solver grid in m.
    #[getter]
    fn z(&self) -> Vec<f64> {
        self.inner.states.z.clone()
    }

    fn wavefunction(&self, i: usize) -> PyResult<Vec<f64>> {
        self.inner
            .states
            .wavefunctions
            .get(i)
            .cloned()
            .ok_or_else(|| PyValueError::new_err(format!("state {i} out of range")))
    }

    /// Transition rates Γ[i][f] in 1/s.
    fn rates(&self, temperature: f64) -> PyResult<Vec<Vec<f64>>> {
        let r = self.inner.coupling.rate_matrix(temperature).map_err(to_py)?;
        Ok((0..r.len()).map(|i| (0..r.len()).map(|f| r.gamma[(i, f)]).collect()).collect())
    }

    fn stationary(&self, temperature: f64) -> PyResult<Vec<f64>> {
        let r = self.inner.coupling.rate_matrix(temperature).map_err(to_py)?;
        stationary_distribution(&r).map_err(to_py)
    }

    /// S_μ(ω) in (C·m)²/Hz at angular frequencies `omegas`.
    fn spectrum(&self, temperature: f64, omegas: Vec<f64>) -> PyResult<Vec<f64>> {
        let spec = self.inner.spectrum_at(temperature).map_err(to_py)?;
        Ok(omegas.iter().map(|&w| spec.evaluate(w)).collect())
    }

    /// Relaxation modes as (rate, weight) pairs.
    fn modes(&self, temperature: f64) -> PyResult<Vec<(f64, f64)>> {
        let spec = self.inner.spectrum_at(temperature).map_err(to_py)?;
        Ok(spec.modes.iter().map(|m| (m.rate, m.weight)).collect())
    }

    fn dipole_variance(&self, temperature: f64) -> PyResult<f64> {
        Ok(self.inner.spectrum_at(temperature).map_err(to_py)?.variance)
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(name={:?}, n_states={}, nu10={:.4e}, gamma0={:.4e})",
            self.inner.params.name,
            self.inner.states.len(),
            self.inner.nu10,
            self.inner.gamma0
        )
    }
}

/// U(z) in J for a preset.
#[pyfunction]
fn potential_energy(preset: &str, z: f64) -> PyResult<f64> {
    let p = resolve(None, Some(preset), None, None)?.potential;
    potential::evaluate(&p, z).map_err(to_py)
}

/// Harmonic estimate of ν₁₀ in rad/s for a preset.
#[pyfunction]
fn harmonic_frequency(preset: &str) -> PyResult<f64> {
    let p = resolve(None, Some(preset), None, None)?.potential;
    potential::harmonic_frequency(&p).map_err(to_py)
}

#[pyfunction]
fn induced_dipole(alpha: f64, z: f64) -> PyResult<f64> {
    adnoise::dipoles::induced_dipole(alpha, z).map_err(to_py)
}

#[pyfunction]
fn convert_energy(value: f64, from: &str, to: &str) -> PyResult<f64> {
    units::convert_energy_str(value, from, to).map_err(to_py)
}

/// S_E in (V/m)²/Hz from the surface-averaged formula.
#[pyfunction]
fn field_noise(sigma: f64, s_mu: f64, distance: f64) -> PyResult<f64> {
    trapnoise::analytic_field_noise(sigma, s_mu, distance).map_err(to_py)
}

/// ṅ in quanta/s.
#[pyfunction]
#[pyo3(signature = (s_e, trap_frequency, ion_mass, charge=units::E_CHARGE))]
fn heating_rate(s_e: f64, trap_frequency: f64, ion_mass: f64, charge: f64) -> PyResult<f64> {
    let trap = TrapConfig {
        distance: 1.0,
        trap_frequency,
        ion_mass,
        charge,
        axis: [0.0, 0.0, 1.0],
    };
    trapnoise::heating_rate(&trap, s_e).map_err(to_py)
}

/// (d, mean S_E, stderr, plane prediction).
type ScanRow = (f64, f64, f64, f64);

/// Seed-averaged distance scan; returns (exponent, stderr, rows).
#[pyfunction]
#[pyo3(signature = (n_dipoles, extent, min_spacing, distances, n_seeds, seed=42, s_mu=1.0))]
fn mc_distance_scaling(
    n_dipoles: usize,
    extent: f64,
    min_spacing: f64,
    distances: Vec<f64>,
    n_seeds: usize,
    seed: u64,
    s_mu: f64,
) -> PyResult<(f64, f64, Vec<ScanRow>)> {
    let geom = McGeometry {
        n_dipoles,
        extent,
        min_spacing,
    };
    let trap = TrapConfig {
        distance: distances.first().copied().unwrap_or(1.0),
        trap_frequency: 1.0,
        ion_mass: 1.0,
        charge: 1.0,
        axis: [0.0, 0.0, 1.0],
    };
    let fit = trapnoise::distance_scaling_fit(&geom, n_seeds, seed, s_mu, &trap, &distances).map_err(to_py)?;
    let rows = fit
        .rows
        .iter()
        .map(|r| (r.distance, r.mean, r.stderr, r.plane_prediction))
        .collect();
    Ok((fit.exponent, fit.stderr, rows))
}

#[pymodule]
fn pyadnoise(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", pipeline::VERSION)?;
    m.add("AdnoiseError", m.py().get_type::<AdnoiseError>())?;
    m.add("HBAR", units::HBAR)?;
    m.add("KB", units::KB)?;
    m.add("DEBYE", units::DEBYE)?;
    m.add("AMU", units::AMU)?;
    m.add("PRESETS", potential::PRESET_NAMES.to_vec())?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(resolved_config, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(potential_energy, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic_frequency, m)?)?;
    m.add_function(wrap_pyfunction!(induced_dipole, m)?)?;
    m.add_function(wrap_pyfunction!(convert_energy, m)?)?;
    m.add_function(wrap_pyfunction!(field_noise, m)?)?;
    m.add_function(wrap_pyfunction!(heating_rate, m)?)?;
    m.add_function(wrap_pyfunction!(mc_distance_scaling, m)?)?;
    Ok(())
}
