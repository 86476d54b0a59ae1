// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

//! Orchestration of the full calculation, one subcommand per output set.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::boundstates::{auto_grid, solve, BoundStateSet};
use crate::config::{RunConfig, Temperature};
use crate::dipoles::{dipole_ladder, DipoleLadder};
use crate::error::{Error, Result};
use crate::numerics::logspace;
use crate::phonons::{stationary_distribution, PhononCoupling};
use crate::potential::{self, SurfacePotentialParams};
use crate::spectrum::{self, DipoleSpectrum};
use crate::table::{emit_table, Cell, Column, Header, Table};
use crate::trapnoise::{self, McGeometry, TrapConfig, PLANE_CONSTANT};
use crate::units::{ANGSTROM, DEBYE, E_CHARGE, HBAR, KB};

const MODULE: &str = "pipeline";

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    States,
    Dipoles,
    Rates,
    Spectrum,
    Tempsweep,
    McScaling,
    Heat,
    Validate,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::States,
        Command::Dipoles,
        Command::Rates,
        Command::Spectrum,
        Command::Tempsweep,
        Command::McScaling,
        Command::Heat,
        Command::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::States => "states",
            Command::Dipoles => "dipoles",
            Command::Rates => "rates",
            Command::Spectrum => "spectrum",
            Command::Tempsweep => "tempsweep",
            Command::McScaling => "mc-scaling",
            Command::Heat => "heat",
            Command::Validate => "validate",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::config(MODULE, format!("unknown subcommand '{s}'")))
    }
}

/// Bound states, dipoles and phonon couplings shared by the subcommands.
#[derive(Debug, Clone)]
pub struct Model {
    pub params: SurfacePotentialParams,
    pub states: BoundStateSet,
    pub ladder: DipoleLadder,
    pub coupling: PhononCoupling,
    /// ν₁₀ from the solved levels (rad/s).
    pub nu10: f64,
    /// Γ₁→₀ at T = 0 from the exact matrix element (1/s).
    pub gamma0: f64,
}

impl Model {
    pub fn build(cfg: &RunConfig) -> Result<Self> {
        let params = cfg.effective_potential();
        let max_states = match cfg.solver.max_states {
            Some(k) => k,
            None => potential::bound_state_count_estimate(&params)?.max(2),
        };
        let grid = auto_grid(&params, cfg.solver.n_points)?;
        let states = solve(&params, &grid, max_states)?;
        let ladder = dipole_ladder(&states, params.polarizability, cfg.image_factor)?;
        let coupling = PhononCoupling::new(&states, &cfg.material)?;
        let gamma0 = coupling.rate(1, 0, 0.0)?.rate;
        if !(gamma0 > 0.0) {
            return Err(Error::model(
                MODULE,
                "the 1→0 transition is above the Debye cutoff; Γ0 is undefined",
            ));
        }
        let nu10 = states.nu10();
        Ok(Self {
            params,
            states,
            ladder,
            coupling,
            nu10,
            gamma0,
        })
    }

    /// ħν₁₀/k_B in kelvin.
    pub fn hnu_kelvin(&self) -> f64 {
        HBAR * self.nu10 / KB
    }

    pub fn kelvin(&self, t: Temperature) -> f64 {
        t.kelvin(self.hnu_kelvin())
    }

    pub fn spectrum_at(&self, temperature: f64) -> Result<DipoleSpectrum> {
        let r = self.coupling.rate_matrix(temperature)?;
        let p0 = stationary_distribution(&r)?;
        spectrum::correlation_modes(&r, &p0, &self.ladder)
    }
}

/// Log grid of ω/Γ₀ with `ppd` points per decade, endpoints included.
pub fn omega_grid(lo: f64, hi: f64, ppd: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = ((decades * ppd as f64).round() as usize).max(1) + 1;
    logspace(lo, hi, n)
}

pub fn trap_config(cfg: &RunConfig) -> TrapConfig {
    TrapConfig {
        distance: cfg.trap.distance,
        trap_frequency: cfg.trap_frequency(),
        ion_mass: cfg.trap.ion_mass,
        charge: cfg.trap.charge,
        axis: cfg.trap.axis,
    }
}

/// Run one subcommand and return its tables without touching the disk.
pub fn run_pipeline(cfg: &RunConfig, command: Command) -> Result<Vec<Table>> {
    match command {
        Command::States => states_tables(&Model::build(cfg)?),
        Command::Dipoles => Ok(vec![dipoles_table(&Model::build(cfg)?)]),
        Command::Rates => rates_tables(cfg, &Model::build(cfg)?),
        Command::Spectrum => spectrum_tables(cfg, &Model::build(cfg)?),
        Command::Tempsweep => tempsweep_tables(cfg, &Model::build(cfg)?),
        Command::McScaling => mc_tables(cfg),
        Command::Heat => heat_tables(cfg, &Model::build(cfg)?),
        Command::Validate => Ok(vec![crate::validate::report_table(&crate::validate::run_checks(cfg)?)]),
    }
}

/// Run a subcommand, write its tables under `cfg.output`, and return the
/// paths. `validate` writes its report and then fails if any check failed.
pub fn execute(cfg: &RunConfig, command: Command) -> Result<Vec<PathBuf>> {
    let tables = run_pipeline(cfg, command)?;
    let header = Header {
        version: VERSION.into(),
        command: command.name().into(),
        seed: cfg.montecarlo.seed,
        config: cfg.to_toml(),
    };
    let paths = tables
        .iter()
        .map(|t| emit_table(t, &header, &cfg.output))
        .collect::<Result<Vec<_>>>()?;
    if command == Command::Validate {
        let failed = crate::validate::failures(&tables[0]);
        if failed > 0 {
            return Err(Error::analysis(MODULE, format!("{failed} invariant checks failed")));
        }
    }
    Ok(paths)
}

fn model_notes(t: &mut Table, m: &Model) {
    t.note(format!("potential: {}", m.params.name));
    t.note(format!("nu10/2pi: {:.8e} Hz", m.nu10 / (2.0 * PI)));
    t.note(format!("Gamma0: {:.8e} 1/s", m.gamma0));
    t.note(format!("hbar*nu10/kB: {:.8e} K", m.hnu_kelvin()));
}

fn states_tables(m: &Model) -> Result<Vec<Table>> {
    let s = &m.states;
    let u0 = m.params.u0;
    let mev = 1e-3 * E_CHARGE;
    let mut levels = Table::new(
        "states",
        vec![
            Column::new("i", ""),
            Column::new("E", "meV"),
            Column::new("E/U0", ""),
            Column::new("<z>", "A"),
        ],
    );
    model_notes(&mut levels, m);
    let d = &s.diagnostics;
    levels.note(format!(
        "grid: {} points on [{:.8e}, {:.8e}] A",
        d.n_points,
        s.grid.z_min / ANGSTROM,
        s.grid.z_max / ANGSTROM
    ));
    levels.note(format!(
        "negative eigenvalues: {}, near-threshold discarded: {}, tail discarded: {}, truncated: {}",
        d.negative_eigenvalues, d.near_threshold_discarded, d.tail_discarded, d.truncated
    ));
    for (i, &e) in s.energies.iter().enumerate() {
        let zbar = s.expectation(i, i, |z| z)?;
        levels.push(vec![i.into(), (e / mev).into(), (e / u0).into(), (zbar / ANGSTROM).into()]);
    }

    let mut columns = vec![Column::new("z", "A"), Column::new("U", "meV")];
    for i in 0..s.len() {
        columns.push(Column::new(&format!("psi_{i}"), "A^-1/2"));
    }
    let mut waves = Table::new("wavefunctions", columns);
    waves.note("level energies are listed in states.csv");
    let root_a = ANGSTROM.sqrt();
    for (k, &z) in s.z.iter().enumerate() {
        let mut row: Vec<Cell> = vec![
            (z / ANGSTROM).into(),
            (potential::evaluate(&m.params, z)? / mev).into(),
        ];
        row.extend(s.wavefunctions.iter().map(|psi| Cell::Real(psi[k] * root_a)));
        waves.push(row);
    }
    Ok(vec![levels, waves])
}

fn dipoles_table(m: &Model) -> Table {
    let mut t = Table::new(
        "dipoles",
        vec![Column::new("i", ""), Column::new("E", "meV"), Column::new("mu_z", "D")],
    );
    model_notes(&mut t, m);
    t.note(format!("image factor: {}", m.ladder.image_factor));
    for (i, (&e, &mu)) in m.states.energies.iter().zip(&m.ladder.mu).enumerate() {
        t.push(vec![i.into(), (e / (1e-3 * E_CHARGE)).into(), (mu / DEBYE).into()]);
    }
    t
}

fn rates_tables(cfg: &RunConfig, m: &Model) -> Result<Vec<Table>> {
    let mut t = Table::new(
        "rates",
        vec![
            Column::new("T", "K"),
            Column::new("kT/hnu", ""),
            Column::new("i", ""),
            Column::new("f", ""),
            Column::new("dnu", "Hz"),
            Column::new("Gamma", "1/s"),
            Column::new("masked", ""),
        ],
    );
    model_notes(&mut t, m);
    for &temp in &cfg.spectrum.temperatures {
        let tk = m.kelvin(temp);
        let r = m.coupling.rate_matrix(tk)?;
        for (i, f, dnu, rate, masked) in r.transitions() {
            t.push(vec![
                tk.into(),
                (tk / m.hnu_kelvin()).into(),
                i.into(),
                f.into(),
                dnu.into(),
                rate.into(),
                masked.into(),
            ]);
        }
    }
    Ok(vec![t])
}

/// Slope fit that reports NaN instead of failing when the window is empty
/// or too short.
fn slope_or_nan(omegas: &[f64], values: &[f64], window: (f64, f64)) -> f64 {
    spectrum::fit_loglog_slope(omegas, values, window).map_or(f64::NAN, |f| f.slope)
}

/// Regime analysis of one spectrum on an ω/Γ₀ grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeSummary {
    /// ω_c/Γ₀.
    pub crossover: f64,
    /// Knee/Γ₀; NaN when no falling line could be fitted.
    pub knee: f64,
    pub low_slope: f64,
    pub mid_slope: f64,
    pub high_slope: f64,
}

pub fn regime_summary(
    omegas: &[f64],
    values: &[f64],
    crossover: f64,
    slope_window: (f64, f64),
) -> RegimeSummary {
    let first = omegas[0];
    let last = *omegas.last().expect("non-empty grid");
    let mid = (crossover * slope_window.0, crossover * slope_window.1);
    let knee = spectrum::knee_frequency(omegas, values, values[0], mid).unwrap_or(f64::NAN);
    RegimeSummary {
        crossover,
        knee,
        low_slope: slope_or_nan(omegas, values, (first, crossover / 3.0)),
        mid_slope: slope_or_nan(omegas, values, mid),
        high_slope: slope_or_nan(omegas, values, (300.0, last)),
    }
}

fn spectrum_tables(cfg: &RunConfig, m: &Model) -> Result<Vec<Table>> {
    let sc = &cfg.spectrum;
    let grid = omega_grid(sc.omega_min, sc.omega_max, sc.points_per_decade);
    let mut summary = Table::new(
        "spectrum_summary",
        vec![
            Column::new("T", "K"),
            Column::new("kT/hnu", ""),
            Column::new("var_mu", "D^2"),
            Column::new("sum_rule", ""),
            Column::new("omega_c", "Gamma0"),
            Column::new("knee", "Gamma0"),
            Column::new("slope_low", ""),
            Column::new("slope_1f", ""),
            Column::new("slope_high", ""),
        ],
    );
    model_notes(&mut summary, m);
    summary.note(format!(
        "slope windows in Gamma0: low [{}, omega_c/3], 1/f [{}, {}]*omega_c, high [300, {}]",
        sc.omega_min, sc.slope_window.0, sc.slope_window.1, sc.omega_max
    ));
    let mut tables = Vec::new();
    for (k, &temp) in sc.temperatures.iter().enumerate() {
        let tk = m.kelvin(temp);
        let spec = m.spectrum_at(tk)?;
        let values: Vec<f64> = grid.iter().map(|&w| spec.evaluate(w * m.gamma0)).collect();
        let mut t = Table::new(
            &format!("spectrum_{k:02}"),
            vec![
                Column::new("omega", "Gamma0"),
                Column::new("omega", "rad/s"),
                Column::new("S_mu", "D^2/Hz"),
            ],
        );
        model_notes(&mut t, m);
        t.note(format!("T: {tk:.8e} K (kT/hnu = {:.8e})", tk / m.hnu_kelvin()));
        for (&w, &v) in grid.iter().zip(&values) {
            t.push(vec![w.into(), (w * m.gamma0).into(), (v / (DEBYE * DEBYE)).into()]);
        }
        tables.push(t);

        let wc = spectrum::crossover_frequency(m.gamma0, m.nu10, tk)? / m.gamma0;
        let r = regime_summary(&grid, &values, wc, sc.slope_window);
        let sum_rule = spec.integrated_power()? / spec.variance;
        summary.push(vec![
            tk.into(),
            (tk / m.hnu_kelvin()).into(),
            (spec.variance / (DEBYE * DEBYE)).into(),
            sum_rule.into(),
            r.crossover.into(),
            r.knee.into(),
            r.low_slope.into(),
            r.mid_slope.into(),
            r.high_slope.into(),
        ]);
    }
    tables.push(summary);
    Ok(tables)
}

fn tempsweep_tables(cfg: &RunConfig, m: &Model) -> Result<Vec<Table>> {
    let ts = &cfg.tempsweep;
    let mut columns = vec![Column::new("T", "K"), Column::new("kT/hnu", "")];
    for w in &ts.omegas {
        columns.push(Column::new(&format!("S_mu(omega={w}*Gamma0)"), "D^2/Hz"));
    }
    let mut sweep = Table::new("tempsweep", columns);
    model_notes(&mut sweep, m);
    let mut temps = Vec::with_capacity(ts.temperatures.len());
    let mut arrhenius_values = Vec::with_capacity(ts.temperatures.len());
    for &temp in &ts.temperatures {
        let tk = m.kelvin(temp);
        let spec = m.spectrum_at(tk)?;
        let mut row: Vec<Cell> = vec![tk.into(), (tk / m.hnu_kelvin()).into()];
        for &w in &ts.omegas {
            row.push((spec.evaluate(w * m.gamma0) / (DEBYE * DEBYE)).into());
        }
        sweep.push(row);
        temps.push(tk);
        arrhenius_values.push(spec.evaluate(ts.arrhenius_omega * m.gamma0));
    }
    let fit = spectrum::arrhenius_fit(&temps, &arrhenius_values)?;
    let mut arr = Table::new(
        "arrhenius",
        vec![
            Column::new("omega", "Gamma0"),
            Column::new("T0", "K"),
            Column::new("T0", "U0/kB"),
            Column::new("S_T", "D^2/Hz"),
            Column::new("residual_rms", ""),
            Column::new("n_points", ""),
        ],
    );
    model_notes(&mut arr, m);
    arr.push(vec![
        ts.arrhenius_omega.into(),
        fit.activation.into(),
        (fit.activation * KB / m.params.u0).into(),
        (fit.prefactor / (DEBYE * DEBYE)).into(),
        fit.residual_rms.into(),
        fit.n.into(),
    ]);
    Ok(vec![sweep, arr])
}

pub fn mc_geometry(cfg: &RunConfig) -> McGeometry {
    let mc = &cfg.montecarlo;
    McGeometry {
        n_dipoles: mc.n_dipoles,
        extent: mc.extent * mc.min_spacing,
        min_spacing: mc.min_spacing,
    }
}

fn mc_tables(cfg: &RunConfig) -> Result<Vec<Table>> {
    let mc = &cfg.montecarlo;
    let geom = mc_geometry(cfg);
    let d_list: Vec<f64> = mc.distances.iter().map(|r| r * mc.min_spacing).collect();
    let fit = trapnoise::distance_scaling_fit(&geom, mc.n_seeds, mc.seed, mc.s_mu, &trap_config(cfg), &d_list)?;
    let mut rows = Table::new(
        "mc_scaling",
        vec![
            Column::new("d/d0", ""),
            Column::new("d", "m"),
            Column::new("S_E_mean", "V^2/m^2/Hz"),
            Column::new("S_E_stderr", "V^2/m^2/Hz"),
            Column::new("n_seeds", ""),
            Column::new("S_E_plane", "V^2/m^2/Hz"),
            Column::new("mc/plane", ""),
        ],
    );
    rows.note(format!(
        "{} dipoles on a {} x {} d0 patch, d0 = {:.8e} m, seeds {}..{}",
        mc.n_dipoles,
        mc.extent,
        mc.extent,
        mc.min_spacing,
        mc.seed,
        mc.seed.wrapping_add(mc.n_seeds as u64 - 1)
    ));
    rows.note(format!("S_mu per dipole: {:.8e} D^2/Hz", mc.s_mu / (DEBYE * DEBYE)));
    for r in &fit.rows {
        rows.push(vec![
            (r.distance / mc.min_spacing).into(),
            r.distance.into(),
            r.mean.into(),
            r.stderr.into(),
            r.n_seeds.into(),
            r.plane_prediction.into(),
            (r.mean / r.plane_prediction).into(),
        ]);
    }
    let mut summary = Table::new(
        "mc_fit",
        vec![
            Column::new("exponent", ""),
            Column::new("exponent_stderr", ""),
            Column::new("ratio_spread", ""),
        ],
    );
    summary.push(vec![fit.exponent.into(), fit.stderr.into(), fit.ratio_spread().into()]);
    Ok(vec![rows, summary])
}

fn heat_tables(cfg: &RunConfig, m: &Model) -> Result<Vec<Table>> {
    let trap = trap_config(cfg);
    let sigma = cfg.trap.coverage;
    let d = trap.distance;
    let wt = trap.trap_frequency;
    let header_notes = |t: &mut Table| {
        model_notes(t, m);
        t.note(format!(
            "d = {d:.8e} m, omega_t = {wt:.8e} rad/s, sigma = {sigma:.8e} 1/m^2, prefactor 3/8, plane constant {PLANE_CONSTANT:.8e}",
        ));
    };
    let columns = |first: Vec<Column>| {
        let mut c = first;
        c.extend([
            Column::new("S_mu", "D^2/Hz"),
            Column::new("S_E", "V^2/m^2/Hz"),
            Column::new("omega*S_E", "V^2/m^2"),
            Column::new("ndot", "1/s"),
            Column::new("S_E_plane", "V^2/m^2/Hz"),
            Column::new("ndot_plane", "1/s"),
        ]);
        c
    };
    let row = |s_mu: f64| -> Result<Vec<Cell>> {
        let se = trapnoise::analytic_field_noise(sigma, s_mu, d)?;
        let se_plane = trapnoise::field_noise_with_constant(PLANE_CONSTANT, sigma, s_mu, d)?;
        Ok(vec![
            (s_mu / (DEBYE * DEBYE)).into(),
            se.into(),
            (wt * se).into(),
            trapnoise::heating_rate(&trap, se)?.into(),
            se_plane.into(),
            trapnoise::heating_rate(&trap, se_plane)?.into(),
        ])
    };

    let mut thermal = Table::new("heat", columns(vec![Column::new("T", "K"), Column::new("kT/hnu", "")]));
    header_notes(&mut thermal);
    thermal.note("S_mu evaluated at the trap frequency");
    for &temp in &cfg.spectrum.temperatures {
        let tk = m.kelvin(temp);
        let spec = m.spectrum_at(tk)?;
        let mut cells: Vec<Cell> = vec![tk.into(), (tk / m.hnu_kelvin()).into()];
        cells.extend(row(spec.evaluate(wt))?);
        thermal.push(cells);
    }

    let mut band = Table::new("heat_band", columns(vec![]));
    header_notes(&mut band);
    band.note("S_mu swept over 1e-11..1e-7 D^2/Hz");
    for s in logspace(1e-11, 1e-7, 5) {
        band.push(row(s * DEBYE * DEBYE)?);
    }
    Ok(vec![thermal, band])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn quick() -> RunConfig {
        parse_config(
            "preset = \"Ne-Au\"\n[spectrum]\ntemperatures = [\"0.5 hnu\", \"2 hnu\"]\npoints_per_decade = 10\n\
             [tempsweep]\ntemperatures = [\"0.2 hnu\", \"0.3 hnu\", \"0.4 hnu\", \"0.6 hnu\", \"0.8 hnu\", \"1 hnu\", \"2 hnu\", \"4 hnu\"]\n\
             [montecarlo]\nn_seeds = 20\n",
        )
        .unwrap()
    }

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("plot".parse::<Command>().is_err());
    }

    #[test]
    fn omega_grid_endpoints() {
        let g = omega_grid(1e-3, 1e4, 60);
        assert_eq!(g.len(), 421);
        assert!((g[0] - 1e-3).abs() < 1e-18);
        assert!((g[420] / 1e4 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn every_command_produces_rectangular_tables() {
        let cfg = quick();
        for c in Command::ALL {
            if c == Command::Validate {
                continue;
            }
            let tables = run_pipeline(&cfg, c).unwrap();
            assert!(!tables.is_empty(), "{c}");
            for t in &tables {
                assert!(t.rows.iter().all(|r| r.len() == t.columns.len()), "{c}/{}", t.name);
            }
        }
    }

    #[test]
    fn spectrum_has_one_table_per_temperature() {
        let cfg = quick();
        let tables = run_pipeline(&cfg, Command::Spectrum).unwrap();
        let per_t = tables.iter().filter(|t| t.name.starts_with("spectrum_0")).count();
        assert_eq!(per_t, 2);
        let summary = tables.iter().find(|t| t.name == "spectrum_summary").unwrap();
        for s in summary.real_column("sum_rule").unwrap() {
            assert!((s - 1.0).abs() < 1e-6);
        }
    }
}
