// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

//! Invariant suite behind `adnoise validate`, run on the configured model.

use crate::config::RunConfig;
use crate::error::Result;
use crate::numerics::logspace;
use crate::phonons::stationary_distribution;
use crate::pipeline::{mc_geometry, trap_config, Model};
use crate::potential;
use crate::spectrum;
use crate::table::{Cell, Column, Table};
use crate::trapnoise::{self, SurfaceSample, PLANE_CONSTANT};
use crate::units::{self, EnergyUnit, LengthUnit, KB};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Observed deviation or quantity.
    pub value: f64,
    /// Pass when `value <= limit` (or `value >= limit` for lower bounds).
    pub limit: f64,
    pub lower_bound: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            lower_bound: false,
        }
    }

    fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            lower_bound: true,
        }
    }

    pub fn passed(&self) -> bool {
        if self.lower_bound {
            self.value >= self.limit
        } else {
            self.value <= self.limit
        }
    }
}

fn max_rel(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    pairs.fold(0.0f64, |m, (a, b)| m.max((a / b - 1.0).abs()))
}

pub fn run_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let energy_rt = EnergyUnit::ALL
        .iter()
        .flat_map(|&a| EnergyUnit::ALL.iter().map(move |&b| (a, b)))
        .map(|(a, b)| units::convert_energy(units::convert_energy(1.7, a, b), b, a) / 1.7 - 1.0)
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let length_rt = LengthUnit::ALL
        .iter()
        .flat_map(|&a| LengthUnit::ALL.iter().map(move |&b| (a, b)))
        .map(|(a, b)| units::convert_length(units::convert_length(1.7, a, b), b, a) / 1.7 - 1.0)
        .fold(0.0f64, |m, x| m.max(x.abs()));
    out.push(Check::at_most("units.round_trip", energy_rt.max(length_rt), 1e-14));

    let m = Model::build(cfg)?;
    let p = &m.params;
    out.push(Check::at_most(
        "potential.minimum_depth",
        (potential::evaluate(p, p.z0)? / -p.u0 - 1.0).abs(),
        1e-12,
    ));
    out.push(Check::at_most(
        "potential.minimum_slope",
        (potential::derivative(p, p.z0)? * p.z0 / p.u0).abs(),
        1e-10,
    ));
    let far = 60.0 * p.z0;
    out.push(Check::at_most(
        "potential.c3_tail",
        (potential::evaluate(p, far)? * far.powi(3) / -potential::c3(p)? - 1.0).abs(),
        1e-9,
    ));

    let s = &m.states;
    out.push(Check::at_least("states.count", s.len() as f64, 2.0));
    let ordered = s.energies.windows(2).all(|w| w[0] < w[1])
        && s.energies.first().is_some_and(|&e| e > -p.u0)
        && s.energies.last().is_some_and(|&e| e < 0.0);
    out.push(Check::at_least("states.ordered_in_well", f64::from(u8::from(ordered)), 1.0));
    let mut ortho: f64 = 0.0;
    for i in 0..s.len() {
        for j in 0..=i {
            let v = s.expectation(i, j, |_| 1.0)?;
            ortho = ortho.max((v - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    out.push(Check::at_most("states.orthonormality", ortho, 1e-8));
    out.push(Check::at_least(
        "dipoles.monotone_decreasing",
        f64::from(u8::from(m.ladder.is_monotone_decreasing())),
        1.0,
    ));

    let zero = m.coupling.rate_matrix(0.0)?;
    let uphill = zero
        .transitions()
        .into_iter()
        .filter(|&(i, f, ..)| f > i)
        .fold(0.0f64, |acc, (.., rate, _)| acc.max(rate));
    out.push(Check::at_most("rates.no_absorption_at_zero_temperature", uphill, 0.0));

    let mut col_sums: f64 = 0.0;
    let mut balance: f64 = 0.0;
    let mut boltzmann: f64 = 0.0;
    let mut sum_rule: f64 = 0.0;
    let mut asymmetry: f64 = 0.0;
    let hnu = m.hnu_kelvin();
    for ratio in [0.2, 0.5, 1.0, 3.0, 6.0] {
        let t = ratio * hnu;
        let r = m.coupling.rate_matrix(t)?;
        let scale = r.max_abs();
        for j in 0..r.len() {
            let sum: f64 = r.generator.column(j).iter().sum();
            col_sums = col_sums.max(sum.abs() / scale);
        }
        for i in 0..r.len() {
            for f in 0..i {
                if r.gamma[(i, f)] > 0.0 {
                    let expected = ((r.energies[i] - r.energies[f]) / (KB * t)).exp();
                    balance = balance.max((r.gamma[(i, f)] / r.gamma[(f, i)] / expected - 1.0).abs());
                }
            }
        }
        let p0 = stationary_distribution(&r)?;
        let w: Vec<f64> = r.energies.iter().map(|e| (-(e - r.energies[0]) / (KB * t)).exp()).collect();
        let z: f64 = w.iter().sum();
        boltzmann = boltzmann.max(max_rel(p0.iter().copied().zip(w.iter().map(|x| x / z))));
        let spec = spectrum::correlation_modes(&r, &p0, &m.ladder)?;
        sum_rule = sum_rule.max((spec.integrated_power()? / spec.variance - 1.0).abs());
        asymmetry = asymmetry.max(spec.asymmetry);
    }
    out.push(Check::at_most("rates.column_sums", col_sums, 1e-12));
    out.push(Check::at_most("rates.detailed_balance", balance, 1e-10));
    out.push(Check::at_most("rates.stationary_is_boltzmann", boltzmann, 1e-10));
    out.push(Check::at_most("spectrum.sum_rule", sum_rule, 1e-6));
    out.push(Check::at_most("spectrum.symmetrised_generator", asymmetry, spectrum::SYMMETRY_TOL));

    let t = 2.0 * hnu;
    let r = m.coupling.rate_matrix(t)?;
    let p0 = stationary_distribution(&r)?;
    let spec = spectrum::correlation_modes(&r, &p0, &m.ladder)?;
    let omegas: Vec<f64> = logspace(1e-2, 1e3, 11).iter().map(|w| w * m.gamma0).collect();
    let ode = spectrum::spectrum_via_ode(&r, &p0, &m.ladder, 20.0 / spec.slowest_rate(), 20_000, &omegas)?;
    out.push(Check::at_most(
        "spectrum.ode_agreement",
        max_rel(ode.iter().copied().zip(omegas.iter().map(|&w| spec.evaluate(w)))),
        0.02,
    ));

    out.push(Check::at_most(
        "trapnoise.plane_constant",
        (trapnoise::kernel_integral_constant()? / PLANE_CONSTANT - 1.0).abs(),
        1e-6,
    ));
    let trap = trap_config(cfg);
    let geom = mc_geometry(cfg);
    let single = SurfaceSample {
        positions: vec![[0.5 * geom.extent, 0.5 * geom.extent]],
        min_spacing: geom.min_spacing,
        extent: geom.extent,
        seed: 0,
    };
    let d_list: Vec<f64> = cfg.montecarlo.distances.iter().map(|r| r * geom.min_spacing).collect();
    let fit = trapnoise::fit_samples(&[single], cfg.montecarlo.s_mu, &trap, &d_list)?;
    out.push(Check::at_most("trapnoise.single_dipole_exponent", (fit.exponent + 6.0).abs(), 1e-9));
    let sample = trapnoise::sample_surface(geom.n_dipoles, geom.extent, geom.min_spacing, cfg.montecarlo.seed)?;
    let s1 = trapnoise::mc_field_noise(&sample, cfg.montecarlo.s_mu, &trap)?;
    let s2 = trapnoise::mc_field_noise(&sample, 2.0 * cfg.montecarlo.s_mu, &trap)?;
    out.push(Check::at_most("trapnoise.linear_in_s_mu", (s2 / (2.0 * s1) - 1.0).abs(), 1e-14));
    let n1 = trapnoise::heating_rate(&trap, s1)?;
    let n2 = trapnoise::heating_rate(&trap, s2)?;
    out.push(Check::at_most("heat.linear_in_s_e", (n2 / (2.0 * n1) - 1.0).abs(), 1e-14));
    Ok(out)
}

pub fn report_table(checks: &[Check]) -> Table {
    let mut t = Table::new(
        "validate",
        vec![
            Column::new("check", ""),
            Column::new("value", ""),
            Column::new("bound", ""),
            Column::new("limit", ""),
            Column::new("status", ""),
        ],
    );
    for c in checks {
        t.push(vec![
            c.name.as_str().into(),
            c.value.into(),
            if c.lower_bound { ">=" } else { "<=" }.into(),
            c.limit.into(),
            if c.passed() { "PASS" } else { "FAIL" }.into(),
        ]);
    }
    t
}

/// Number of FAIL rows in a report produced by [`report_table`].
pub fn failures(report: &Table) -> usize {
    let k = report.column("status").expect("status column");
    report
        .rows
        .iter()
        .filter(|r| !matches!(&r[k], Cell::Text(s) if s == "PASS"))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn default_model_passes_everything() {
        let cfg = parse_config("preset = \"Ne-Au\"\n").unwrap();
        let checks = run_checks(&cfg).unwrap();
        for c in &checks {
            assert!(c.passed(), "{c:?}");
        }
        assert_eq!(failures(&report_table(&checks)), 0);
    }

    #[test]
    fn failure_counting() {
        let checks = vec![Check::at_most("a", 2.0, 1.0), Check::at_least("b", 2.0, 1.0)];
        assert_eq!(failures(&report_table(&checks)), 1);
    }
}
