// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

//! Induced dipole of a polarizable atom above a conductor and its averages
//! over the vibrational states.

use crate::boundstates::BoundStateSet;
use crate::error::{Error, Result};
use crate::units::{BOHR, E_CHARGE};

const MODULE: &str = "dipoles";

/// Dimensionless coefficient of the image-induced dipole law.
pub const INDUCED_COEFF: f64 = 0.47;

/// P(z) = 0.47·e·a₀^½·α^{3/2}/z⁴ in C·m, with α in m³ and z in m.
pub fn induced_dipole(alpha: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::domain(MODULE, format!("z must be positive, got {z}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::domain(MODULE, format!("polarizability must be positive, got {alpha}")));
    }
    Ok(induced_unchecked(alpha, z))
}

fn induced_unchecked(alpha: f64, z: f64) -> f64 {
    // (a₀α³)^½ keeps the intermediate near 1e-50 instead of a₀^½ ≈ 7e-6 times 1e-45
    let z2 = z * z;
    INDUCED_COEFF * E_CHARGE * (BOHR * alpha * alpha * alpha).sqrt() / (z2 * z2)
}

/// Vibrationally averaged dipoles μ_i = image_factor·⟨i|P|i⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleLadder {
    /// One value per bound state (C·m).
    pub mu: Vec<f64>,
    pub image_factor: f64,
    pub polarizability: f64,
}

impl DipoleLadder {
    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// True when μ_i strictly decreases with i.
    pub fn is_monotone_decreasing(&self) -> bool {
        self.mu.windows(2).all(|w| w[1] < w[0])
    }
}

pub fn dipole_ladder(states: &BoundStateSet, alpha: f64, image_factor: f64) -> Result<DipoleLadder> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(MODULE, format!("polarizability must be positive, got {alpha}")));
    }
    if !(image_factor > 0.0 && image_factor.is_finite()) {
        return Err(Error::domain(MODULE, format!("image_factor must be positive, got {image_factor}")));
    }
    let mut mu = Vec::with_capacity(states.len());
    for i in 0..states.len() {
        let m = states.expectation(i, i, |z| induced_unchecked(alpha, z))?;
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::numerical(MODULE, format!("⟨{i}|P|{i}⟩ = {m:e} is not a positive number")));
        }
        mu.push(image_factor * m);
    }
    Ok(DipoleLadder {
        mu,
        image_factor,
        polarizability: alpha,
    })
}
