// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

//! One-phonon transition rates between vibrational levels and the resulting
//! master-equation generator.
//!
//! Rates follow the golden rule with a single surface atom coupled to a Debye
//! bulk:
//!
//! ```text
//! Γ_{i→f} = Δω/(2πħv³ρ) · |⟨f|U'|i⟩|² · (n(Δω) + 1)   (emission, E_i > E_f)
//! Γ_{i→f} = Δω/(2πħv³ρ) · |⟨f|U'|i⟩|² · n(Δω)         (absorption)
//! ```
//!
//! Transitions above the Debye frequency are removed in both directions.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::boundstates::BoundStateSet;
use crate::error::{Error, Result};
use crate::potential::{BulkMaterial, SurfacePotentialParams};
use crate::units::{HBAR, KB};

const MODULE: &str = "phonons";

/// Relative level separation below which two levels count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Zero-eigenvalue threshold relative to max|M|.
pub const NULL_TOL: f64 = 1e-10;

/// Bose–Einstein occupation of a phonon mode at angular frequency `delta_omega`.
pub fn bose_occupation(delta_omega: f64, temperature: f64) -> Result<f64> {
    if !(delta_omega > 0.0) {
        return Err(Error::domain(MODULE, format!("Δω must be positive, got {delta_omega}")));
    }
    if !(temperature >= 0.0) {
        return Err(Error::domain(MODULE, format!("temperature must be ≥ 0, got {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (HBAR * delta_omega / (KB * temperature)).exp_m1())
}

/// Zero-temperature 1→0 rate of a harmonic well, ν⁴m/(4πv³ρ).
pub fn gamma0_harmonic(p: &SurfacePotentialParams, material: &BulkMaterial, nu10: f64) -> Result<f64> {
    if !(nu10 > 0.0) {
        return Err(Error::domain(MODULE, format!("ν10 must be positive, got {nu10}")));
    }
    let v3 = material.speed_of_sound.powi(3);
    Ok(nu10.powi(4) * p.adatom_mass / (4.0 * PI * v3 * material.density))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionRate {
    /// Γ_{i→f} in 1/s; 0 when masked.
    pub rate: f64,
    /// Δω_if in rad/s.
    pub delta_omega: f64,
    /// Removed by the Debye cutoff.
    pub masked: bool,
}

/// Level spacings and squared coupling matrix elements of one bound-state
/// set; temperature-independent, so reused across a temperature sweep.
#[derive(Debug, Clone)]
pub struct PhononCoupling {
    pub energies: Vec<f64>,
    /// |⟨f|U'|i⟩|² (J²/m²), symmetric.
    pub coupling_sq: DMatrix<f64>,
    pub material: BulkMaterial,
}

impl PhononCoupling {
    pub fn new(states: &BoundStateSet, material: &BulkMaterial) -> Result<Self> {
        validate_material(material)?;
        let n = states.len();
        let e = &states.energies;
        for i in 0..n {
            for f in 0..i {
                if (e[i] - e[f]).abs() <= DEGENERACY_TOL * e[i].abs().max(e[f].abs()) {
                    return Err(Error::model(MODULE, format!("levels {f} and {i} are degenerate")));
                }
            }
        }
        let mut coupling_sq = DMatrix::zeros(n, n);
        for i in 0..n {
            for f in 0..i {
                let m = states.matrix_element_dudz(i, f)?;
                coupling_sq[(i, f)] = m * m;
                coupling_sq[(f, i)] = m * m;
            }
        }
        Ok(Self {
            energies: e.clone(),
            coupling_sq,
            material: material.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn rate(&self, i: usize, f: usize, temperature: f64) -> Result<TransitionRate> {
        let n = self.len();
        if i >= n || f >= n {
            return Err(Error::domain(MODULE, format!("state index ({i}, {f}) out of range (have {n})")));
        }
        if i == f {
            return Err(Error::domain(MODULE, "transition needs i ≠ f"));
        }
        let delta_omega = (self.energies[i] - self.energies[f]).abs() / HBAR;
        let masked = delta_omega / (2.0 * PI) > self.material.debye_frequency;
        if masked {
            return Ok(TransitionRate {
                rate: 0.0,
                delta_omega,
                masked,
            });
        }
        let occ = bose_occupation(delta_omega, temperature)?;
        let factor = if self.energies[i] > self.energies[f] { occ + 1.0 } else { occ };
        let m = &self.material;
        // ħv³ρ ≈ 1e-19 for Au; grouped so nothing leaves double range
        let prefactor = delta_omega / (2.0 * PI * HBAR * m.speed_of_sound.powi(3) * m.density);
        Ok(TransitionRate {
            rate: prefactor * self.coupling_sq[(i, f)] * factor,
            delta_omega,
            masked,
        })
    }

    pub fn rate_matrix(&self, temperature: f64) -> Result<RateMatrix> {
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(Error::domain(MODULE, format!("temperature must be ≥ 0, got {temperature}")));
        }
        let n = self.len();
        if n < 2 {
            return Err(Error::model(MODULE, "need at least two bound states"));
        }
        let mut gamma = DMatrix::zeros(n, n);
        let mut cutoff_mask = DMatrix::from_element(n, n, false);
        let mut masked = Vec::new();
        for i in 0..n {
            for f in 0..n {
                if i == f {
                    continue;
                }
                let r = self.rate(i, f, temperature)?;
                gamma[(i, f)] = r.rate;
                cutoff_mask[(i, f)] = r.masked;
                if r.masked && i > f {
                    masked.push((f, i, r.delta_omega / (2.0 * PI)));
                }
            }
        }
        let mut generator = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut out = 0.0;
            for i in 0..n {
                if i != j {
                    generator[(i, j)] = gamma[(j, i)];
                    out += gamma[(j, i)];
                }
            }
            generator[(j, j)] = -out;
        }
        let connected = is_connected(&gamma);
        let report = CutoffReport { masked, connected };
        if !connected {
            return Err(Error::model(
                MODULE,
                format!(
                    "ergodicity broken by Debye cutoff ({} transitions masked)",
                    report.masked.len()
                ),
            ));
        }
        Ok(RateMatrix {
            gamma,
            generator,
            temperature,
            cutoff_mask,
            energies: self.energies.clone(),
            report,
        })
    }
}

fn validate_material(m: &BulkMaterial) -> Result<()> {
    for (label, v) in [
        ("speed_of_sound", m.speed_of_sound),
        ("density", m.density),
        ("debye_frequency", m.debye_frequency),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::domain(MODULE, format!("material {label} must be positive, got {v}")));
        }
    }
    Ok(())
}

/// Undirected reachability over transitions with a nonzero rate either way.
fn is_connected(gamma: &DMatrix<f64>) -> bool {
    let n = gamma.nrows();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if !seen[j] && (gamma[(i, j)] > 0.0 || gamma[(j, i)] > 0.0) {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

pub fn transition_rate(
    states: &BoundStateSet,
    material: &BulkMaterial,
    i: usize,
    f: usize,
    temperature: f64,
) -> Result<TransitionRate> {
    validate_material(material)?;
    let n = states.len();
    if i >= n || f >= n || i == f {
        return Err(Error::domain(MODULE, format!("invalid transition ({i} → {f}) among {n} states")));
    }
    let (ei, ef) = (states.energies[i], states.energies[f]);
    if (ei - ef).abs() <= DEGENERACY_TOL * ei.abs().max(ef.abs()) {
        return Err(Error::model(MODULE, format!("levels {i} and {f} are degenerate")));
    }
    let delta_omega = (ei - ef).abs() / HBAR;
    if delta_omega / (2.0 * PI) > material.debye_frequency {
        return Ok(TransitionRate {
            rate: 0.0,
            delta_omega,
            masked: true,
        });
    }
    let m = states.matrix_element_dudz(i, f)?;
    let occ = bose_occupation(delta_omega, temperature)?;
    let factor = if ei > ef { occ + 1.0 } else { occ };
    let prefactor = delta_omega / (2.0 * PI * HBAR * material.speed_of_sound.powi(3) * material.density);
    Ok(TransitionRate {
        rate: prefactor * m * m * factor,
        delta_omega,
        masked: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutoffReport {
    /// (lower, upper, Δω/2π in Hz) for every masked pair.
    pub masked: Vec<(usize, usize, f64)>,
    pub connected: bool,
}

#[derive(Debug, Clone)]
pub struct RateMatrix {
    /// Γ_{i→f} at (i, f).
    pub gamma: DMatrix<f64>,
    /// M_ij = Γ_{j→i}, M_ii = −Σ_j Γ_{i→j}.
    pub generator: DMatrix<f64>,
    pub temperature: f64,
    pub cutoff_mask: DMatrix<bool>,
    pub energies: Vec<f64>,
    pub report: CutoffReport,
}

pub fn build_rate_matrix(states: &BoundStateSet, material: &BulkMaterial, temperature: f64) -> Result<RateMatrix> {
    PhononCoupling::new(states, material)?.rate_matrix(temperature)
}

impl RateMatrix {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.generator.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// One row per ordered pair: (i, f, Δω/2π, Γ_{i→f}, masked).
    pub fn transitions(&self) -> Vec<(usize, usize, f64, f64, bool)> {
        let n = self.len();
        let mut rows = Vec::with_capacity(n * (n - 1));
        for i in 0..n {
            for f in 0..n {
                if i != f {
                    let dnu = (self.energies[i] - self.energies[f]).abs() / HBAR / (2.0 * PI);
                    rows.push((i, f, dnu, self.gamma[(i, f)], self.cutoff_mask[(i, f)]));
                }
            }
        }
        rows
    }
}

/// Null vector of M, normalised to a probability vector.
///
/// Grassmann–Taksar–Heyman state reduction: subtraction-free, so every entry
/// keeps full relative accuracy even when it is exponentially small.
pub fn stationary_distribution(r: &RateMatrix) -> Result<Vec<f64>> {
    let n = r.len();
    let mut a = r.gamma.clone();
    for k in (1..n).rev() {
        let s: f64 = (0..k).map(|j| a[(k, j)]).sum();
        if !(s > 0.0) {
            return Err(Error::model(
                MODULE,
                format!("state {k} cannot reach lower states; the chain is reducible"),
            ));
        }
        for i in 0..k {
            a[(i, k)] /= s;
        }
        for i in 0..k {
            let aik = a[(i, k)];
            if aik == 0.0 {
                continue;
            }
            for j in 0..k {
                if j != i {
                    a[(i, j)] += aik * a[(k, j)];
                }
            }
        }
    }
    let mut p = vec![0.0; n];
    p[0] = 1.0;
    for k in 1..n {
        p[k] = (0..k).map(|i| p[i] * a[(i, k)]).sum();
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);

    let zeros = null_multiplicity(r, &p);
    if zeros != 1 {
        return Err(Error::model(
            MODULE,
            format!("generator has {zeros} zero eigenvalues; stationary state is not unique"),
        ));
    }
    Ok(p)
}

/// Eigenvalues of M within `NULL_TOL·max|M|` of zero.
///
/// With every level populated the spectrum is read off the symmetrised
/// generator; at T = 0 M is upper triangular in the energy ordering.
fn null_multiplicity(r: &RateMatrix, p: &[f64]) -> usize {
    let tol = NULL_TOL * r.max_abs();
    let n = r.len();
    if p.iter().all(|&x| x > 0.0) {
        let s: Vec<f64> = p.iter().map(|x| x.sqrt()).collect();
        let a = DMatrix::from_fn(n, n, |i, j| {
            let v = r.generator[(i, j)] * s[j] / s[i];
            let w = r.generator[(j, i)] * s[i] / s[j];
            0.5 * (v + w)
        });
        a.symmetric_eigenvalues().iter().filter(|l| l.abs() <= tol).count()
    } else {
        let lower_triangle_empty = (0..n).all(|i| (0..i).all(|j| r.generator[(i, j)] == 0.0));
        if lower_triangle_empty {
            (0..n).filter(|&i| r.generator[(i, i)].abs() <= tol).count()
        } else {
            r.generator.complex_eigenvalues().iter().filter(|l| l.norm() <= tol).count()
        }
    }
}
