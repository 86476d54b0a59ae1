// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

//! Vibrational bound states of the adatom in the surface potential.
//!
//! The Hamiltonian −ħ²/2m ∂² + U(z) is discretised with the three-point
//! stencil on a uniform grid with ψ = 0 at both ends, scaled by U₀ so the
//! tridiagonal entries are O(1), and diagonalised for its lowest states.

use crate::error::{Error, ErrorKind, Result};
use crate::numerics::quad::trapezoid;
use crate::numerics::tridiag::SymTridiagonal;
use crate::potential::{self, SurfacePotentialParams};
use crate::units::HBAR;

const MODULE: &str = "boundstates";

/// States with E above this (in units of −U₀) are treated as continuum.
pub const CONTINUUM_GUARD: f64 = 1e-3;
/// Kept states must satisfy |ψ(z_max)|²·h below this.
pub const TAIL_LIMIT: f64 = 1e-10;
pub const DEFAULT_POINTS: usize = 4000;
pub const MIN_POINTS: usize = 200;

/// Uniform grid including both Dirichlet end points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub z_min: f64,
    pub z_max: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn new(z_min: f64, z_max: f64, n_points: usize) -> Result<Self> {
        let g = Self { z_min, z_max, n_points };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z_min > 0.0 && self.z_max > self.z_min && self.z_max.is_finite()) {
            return Err(Error::new(
                ErrorKind::Grid,
                MODULE,
                format!("need 0 < z_min < z_max, got [{:e}, {:e}]", self.z_min, self.z_max),
            ));
        }
        if self.n_points < MIN_POINTS {
            return Err(Error::new(
                ErrorKind::Grid,
                MODULE,
                format!("n_points = {} is below the minimum of {MIN_POINTS}", self.n_points),
            ));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.z_max - self.z_min) / (self.n_points - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n_points).map(|i| self.z_min + h * i as f64).collect()
    }
}

/// Grid bounds from the potential alone.
///
/// The inner edge is where U first reaches 10 U₀ on the repulsive side. When
/// the finite wall barrier is lower than that, the inner edge sits on the
/// barrier top instead; beyond it U turns over towards −∞ and no bound state
/// reaches it. The outer edge is where |U| has decayed to 1e-4 U₀, and at
/// least 6 z₀.
pub fn auto_grid(p: &SurfacePotentialParams, n_points: usize) -> Result<Grid> {
    let (z_top, u_top) = potential::wall_barrier(p);
    let target = 10.0 * p.u0;
    let z_min = if u_top > target {
        bisect(|z| potential::eval_unchecked(p, z) - target, z_top, p.z0)
    } else {
        z_top
    };
    // U rises monotonically from −U₀ towards 0 beyond z₀
    let level = -1e-4 * p.u0;
    let mut hi = 2.0 * p.z0;
    while potential::eval_unchecked(p, hi) < level {
        hi *= 2.0;
    }
    let z_tail = bisect(|z| potential::eval_unchecked(p, z) - level, p.z0, hi);
    Grid::new(z_min, z_tail.max(6.0 * p.z0), n_points)
}

/// Root of f on [a, b] given a sign change.
fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// What the solver saw and what it dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveDiagnostics {
    pub n_points: usize,
    pub spacing: f64,
    /// Eigenvalues below 0 on this grid.
    pub negative_eigenvalues: usize,
    /// Eigenvalues in [−1e-3 U₀, 0).
    pub near_threshold_discarded: usize,
    /// Weakly bound states dropped for failing the tail test.
    pub tail_discarded: usize,
    /// Bound states not returned because of `max_states`.
    pub truncated: usize,
    /// Largest |ψ(z_max)|²·h among kept states.
    pub max_tail: f64,
}

#[derive(Debug, Clone)]
pub struct BoundStateSet {
    pub params: SurfacePotentialParams,
    pub grid: Grid,
    pub z: Vec<f64>,
    /// Energies in J, ascending, below the dissociation limit.
    pub energies: Vec<f64>,
    /// ψ_i on the grid nodes, ∫ψ² dz = 1 (m^-1/2).
    pub wavefunctions: Vec<Vec<f64>>,
    pub diagnostics: SolveDiagnostics,
}

pub fn solve(p: &SurfacePotentialParams, grid: &Grid, max_states: usize) -> Result<BoundStateSet> {
    p.validate()?;
    grid.validate()?;
    if max_states < 2 {
        return Err(Error::config(MODULE, format!("max_states must be ≥ 2, got {max_states}")));
    }
    let z = grid.nodes();
    let h = grid.spacing();
    let n = grid.n_points;
    // interior nodes only; ψ vanishes at both ends
    let t = HBAR * HBAR / (2.0 * p.adatom_mass * h * h) / p.u0;
    let diag: Vec<f64> = z[1..n - 1]
        .iter()
        .map(|&zi| 2.0 * t + potential::eval_unchecked(p, zi) / p.u0)
        .collect();
    if diag.iter().any(|d| !d.is_finite()) {
        return Err(Error::numerical(MODULE, "potential not finite on the grid"));
    }
    let ham = SymTridiagonal::new(diag, vec![-t; n - 3]);
    let negative = ham.count_below(0.0);
    let bound = ham.count_below(-CONTINUUM_GUARD);
    let wanted = bound.min(max_states);
    let (values, vectors) = ham.lowest_eigenpairs(wanted);

    let mut energies = Vec::with_capacity(wanted);
    let mut wavefunctions = Vec::with_capacity(wanted);
    let mut tail_discarded = 0;
    let mut max_tail: f64 = 0.0;
    let norm = h.sqrt();
    for (e, v) in values.iter().zip(vectors) {
        let mut psi = Vec::with_capacity(n);
        psi.push(0.0);
        psi.extend(v.iter().map(|x| x / norm));
        psi.push(0.0);
        let tail = psi[n - 2].powi(2) * h;
        if tail >= TAIL_LIMIT {
            if *e < -0.01 {
                return Err(Error::new(
                    ErrorKind::Grid,
                    MODULE,
                    format!(
                        "state at E = {e:.4} U0 does not decay before z_max ({tail:.2e}); enlarge the grid"
                    ),
                ));
            }
            tail_discarded += 1;
            continue;
        }
        fix_sign(&mut psi);
        max_tail = max_tail.max(tail);
        energies.push(e * p.u0);
        wavefunctions.push(psi);
    }
    if energies.len() < 2 {
        return Err(Error::model(MODULE, "potential too shallow for spectrum analysis"));
    }
    Ok(BoundStateSet {
        params: p.clone(),
        grid: *grid,
        z,
        energies,
        wavefunctions,
        diagnostics: SolveDiagnostics {
            n_points: n,
            spacing: h,
            negative_eigenvalues: negative,
            near_threshold_discarded: negative - bound,
            tail_discarded,
            truncated: bound - wanted,
            max_tail,
        },
    })
}

/// Positive at the first point, counted from the wall, above 1% of the peak.
fn fix_sign(psi: &mut [f64]) {
    let peak = psi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = psi.iter().find(|x| x.abs() > 0.01 * peak) {
        if *first < 0.0 {
            psi.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

impl BoundStateSet {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// (E₁ − E₀)/ħ in rad/s.
    pub fn nu10(&self) -> f64 {
        (self.energies[1] - self.energies[0]) / HBAR
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::domain(MODULE, format!("state index {i} out of range (have {})", self.len())))
        }
    }

    /// ⟨i|g(z)|f⟩ by trapezoid quadrature on the solver grid.
    pub fn expectation<G: Fn(f64) -> f64>(&self, i: usize, f: usize, g: G) -> Result<f64> {
        self.check_index(i)?;
        self.check_index(f)?;
        let (a, b) = (&self.wavefunctions[i], &self.wavefunctions[f]);
        let mut integrand = Vec::with_capacity(self.z.len());
        for (k, &z) in self.z.iter().enumerate() {
            let gz = g(z);
            if !gz.is_finite() {
                return Err(Error::numerical(MODULE, format!("g(z) not finite at z = {z:e}")));
            }
            integrand.push(a[k] * gz * b[k]);
        }
        Ok(trapezoid(&integrand, self.grid.spacing()))
    }

    /// ⟨f|dU/dz|i⟩ in J/m.
    pub fn matrix_element_dudz(&self, i: usize, f: usize) -> Result<f64> {
        // order the pair so (i, f) and (f, i) run the identical float sum
        let (lo, hi) = if i <= f { (i, f) } else { (f, i) };
        self.expectation(lo, hi, |z| potential::derivative_unchecked(&self.params, z))
    }
}
