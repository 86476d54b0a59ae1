// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

//! Physical constants and unit conversions.
//!
//! Everything inside the crate is SI. Conversions happen only where values
//! enter (configuration) or leave (tables, Python) the library.

use std::f64::consts::PI;
use std::str::FromStr;

use crate::error::{Error, Result};

/// CODATA 2018 values, SI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// J·s
    pub hbar: f64,
    /// J/K
    pub boltzmann: f64,
    /// C
    pub elementary_charge: f64,
    /// F/m
    pub vacuum_permittivity: f64,
    /// m
    pub bohr_radius: f64,
    /// kg
    pub atomic_mass_unit: f64,
    /// C·m
    pub debye: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    boltzmann: 1.380_649e-23,
    elementary_charge: 1.602_176_634e-19,
    vacuum_permittivity: 8.854_187_812_8e-12,
    bohr_radius: 5.291_772_109_03e-11,
    atomic_mass_unit: 1.660_539_066_60e-27,
    debye: 3.335_64e-30,
};

pub const HBAR: f64 = CONSTANTS.hbar;
pub const KB: f64 = CONSTANTS.boltzmann;
pub const E_CHARGE: f64 = CONSTANTS.elementary_charge;
pub const EPS0: f64 = CONSTANTS.vacuum_permittivity;
pub const BOHR: f64 = CONSTANTS.bohr_radius;
pub const AMU: f64 = CONSTANTS.atomic_mass_unit;
pub const DEBYE: f64 = CONSTANTS.debye;
pub const ANGSTROM: f64 = 1e-10;

/// 4πε₀, the Coulomb-law denominator.
pub fn four_pi_eps0() -> f64 {
    4.0 * PI * EPS0
}

impl PhysicalConstants {
    /// Startup sanity check: all positive and e·a₀ ≈ 2.5417 D.
    pub fn check(&self) -> Result<()> {
        let all = [
            self.hbar,
            self.boltzmann,
            self.elementary_charge,
            self.vacuum_permittivity,
            self.bohr_radius,
            self.atomic_mass_unit,
            self.debye,
        ];
        if all.iter().any(|&c| !(c > 0.0)) {
            return Err(Error::numerical("units", "non-positive physical constant"));
        }
        let ea0_in_debye = self.elementary_charge * self.bohr_radius / self.debye;
        if (ea0_in_debye - 2.5417).abs() > 1e-4 {
            return Err(Error::numerical(
                "units",
                format!("e·a0 = {ea0_in_debye} D, expected 2.5417 D"),
            ));
        }
        Ok(())
    }
}

macro_rules! unit_enum {
    ($(#[$meta:meta])* $name:ident, $what:literal { $($variant:ident => [$($tag:literal),+]),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            /// Canonical tag used when writing values back out.
            pub fn tag(self) -> &'static str {
                match self { $($name::$variant => [$($tag),+][0]),+ }
            }
        }

        impl FromStr for $name {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim() {
                    $($($tag)|+ => Ok($name::$variant),)+
                    other => Err(Error::config("units", format!(concat!("unknown ", $what, " unit '{}'"), other))),
                }
            }
        }
    };
}

unit_enum!(
    /// Energy, including the kelvin (E = k_B·T) and hertz (E = ħ·2πν) equivalents.
    EnergyUnit, "energy" {
        Joule => ["J"],
        ElectronVolt => ["eV"],
        MilliElectronVolt => ["meV"],
        Kelvin => ["K"],
        Hertz => ["Hz"],
    }
);

unit_enum!(LengthUnit, "length" {
    Meter => ["m"],
    Angstrom => ["A", "Å", "Angstrom"],
    Bohr => ["a0", "bohr"],
    Micrometer => ["um", "μm", "µm"],
});

unit_enum!(DipoleUnit, "dipole" {
    CoulombMeter => ["C*m", "C·m", "Cm", "C m"],
    Debye => ["D"],
    AtomicUnit => ["e*a0", "e·a0", "ea0"],
});

impl EnergyUnit {
    /// Joules per unit.
    pub fn si_factor(self) -> f64 {
        match self {
            EnergyUnit::Joule => 1.0,
            EnergyUnit::ElectronVolt => E_CHARGE,
            EnergyUnit::MilliElectronVolt => 1e-3 * E_CHARGE,
            EnergyUnit::Kelvin => KB,
            EnergyUnit::Hertz => 2.0 * PI * HBAR,
        }
    }
}

impl LengthUnit {
    pub fn si_factor(self) -> f64 {
        match self {
            LengthUnit::Meter => 1.0,
            LengthUnit::Angstrom => ANGSTROM,
            LengthUnit::Bohr => BOHR,
            LengthUnit::Micrometer => 1e-6,
        }
    }
}

impl DipoleUnit {
    pub fn si_factor(self) -> f64 {
        match self {
            DipoleUnit::CoulombMeter => 1.0,
            DipoleUnit::Debye => DEBYE,
            DipoleUnit::AtomicUnit => E_CHARGE * BOHR,
        }
    }
}

pub fn convert_energy(value: f64, from: EnergyUnit, to: EnergyUnit) -> f64 {
    if from == to {
        return value;
    }
    value * from.si_factor() / to.si_factor()
}

pub fn convert_length(value: f64, from: LengthUnit, to: LengthUnit) -> f64 {
    if from == to {
        return value;
    }
    value * from.si_factor() / to.si_factor()
}

pub fn convert_dipole(value: f64, from: DipoleUnit, to: DipoleUnit) -> f64 {
    if from == to {
        return value;
    }
    value * from.si_factor() / to.si_factor()
}

/// String-tagged convenience wrapper; unknown tags are configuration errors.
pub fn convert_energy_str(value: f64, from: &str, to: &str) -> Result<f64> {
    Ok(convert_energy(value, from.parse()?, to.parse()?))
}

pub fn convert_length_str(value: f64, from: &str, to: &str) -> Result<f64> {
    Ok(convert_length(value, from.parse()?, to.parse()?))
}

pub fn convert_dipole_str(value: f64, from: &str, to: &str) -> Result<f64> {
    Ok(convert_dipole(value, from.parse()?, to.parse()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn constants_are_consistent() {
        CONSTANTS.check().unwrap();
        assert_relative_eq!(E_CHARGE * BOHR / DEBYE, 2.5417, max_relative = 2e-5);
    }

    #[test]
    fn energy_examples() {
        assert_relative_eq!(
            convert_energy(1.0, EnergyUnit::ElectronVolt, EnergyUnit::Joule),
            1.602176634e-19,
            max_relative = 1e-15
        );
        // E/k_B; 2 eV quoted as 1.6e4 K corresponds to E = (3/2) k_B T
        let t = convert_energy(2.0, EnergyUnit::ElectronVolt, EnergyUnit::Kelvin);
        assert!((t - 23_209.0).abs() < 1.0, "{t}");
        assert!((t / 1.5 / 1.6e4 - 1.0).abs() < 0.05, "{t}");
        assert_eq!(convert_energy(3.7, EnergyUnit::Joule, EnergyUnit::Joule), 3.7);
    }

    #[test]
    fn length_examples() {
        let a = convert_length(6.05, LengthUnit::Bohr, LengthUnit::Angstrom);
        assert_relative_eq!(a, 6.05 * 0.529177210903, max_relative = 1e-12);
        assert!((a - 3.20).abs() < 0.005);
        assert_relative_eq!(convert_length(1.0, LengthUnit::Angstrom, LengthUnit::Meter), 1e-10);
        assert_relative_eq!(convert_length(10.0, LengthUnit::Micrometer, LengthUnit::Meter), 1e-5);
    }

    #[test]
    fn dipole_examples() {
        let d = convert_dipole(1.0, DipoleUnit::AtomicUnit, DipoleUnit::Debye);
        assert_relative_eq!(d, E_CHARGE * BOHR / 3.33564e-30, max_relative = 1e-14);
        assert!((d - 2.5417).abs() < 1e-4);
        assert_relative_eq!(convert_dipole(1.0, DipoleUnit::Debye, DipoleUnit::CoulombMeter), 3.33564e-30);
        for &u in DipoleUnit::ALL {
            assert_eq!(convert_dipole(0.0, u, DipoleUnit::Debye), 0.0);
        }
    }

    #[test]
    fn unknown_tags_are_config_errors() {
        let e = convert_energy_str(1.0, "furlong", "J").unwrap_err();
        assert_eq!(e.kind, crate::ErrorKind::Config);
        assert!(convert_length_str(1.0, "m", "parsec").is_err());
        assert!(convert_dipole_str(1.0, "D", "Db").is_err());
        assert_relative_eq!(convert_length_str(1.0, "Å", "m").unwrap(), 1e-10);
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    proptest! {
        #[test]
        fn energy_composition(x in -1e3f64..1e3, a in 0usize..5, b in 0usize..5, c in 0usize..5) {
            let u = EnergyUnit::ALL;
            let via = convert_energy(convert_energy(x, u[a], u[b]), u[b], u[c]);
            let direct = convert_energy(x, u[a], u[c]);
            prop_assert!(rel_close(via, direct, 1e-12));
            prop_assert!(rel_close(convert_energy(convert_energy(x, u[a], u[b]), u[b], u[a]), x, 1e-12));
        }

        #[test]
        fn length_and_dipole_composition(x in -1e3f64..1e3, a in 0usize..4, b in 0usize..4, c in 0usize..3) {
            let l = LengthUnit::ALL;
            let via = convert_length(convert_length(x, l[a], l[b]), l[b], l[(a + b) % 4]);
            prop_assert!(rel_close(via, convert_length(x, l[a], l[(a + b) % 4]), 1e-12));
            let d = DipoleUnit::ALL;
            let back = convert_dipole(convert_dipole(x, d[c], d[(c + 1) % 3]), d[(c + 1) % 3], d[c]);
            prop_assert!(rel_close(back, x, 1e-12));
        }
    }
}
