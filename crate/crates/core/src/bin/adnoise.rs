// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use adnoise::config::{parse_config_with, parse_temperature_list, Overrides};
use adnoise::pipeline::{execute, Command};
use adnoise::{Error, ErrorKind};
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sub {
    /// Bound-state energies and wavefunctions
    States,
    /// Vibrationally averaged dipole per level
    Dipoles,
    /// Phonon transition rates at the spectrum temperatures
    Rates,
    /// Dipole noise spectrum, one table per temperature
    Spectrum,
    /// Noise versus temperature and the Arrhenius fit
    Tempsweep,
    /// Monte Carlo distance scaling of the field noise
    McScaling,
    /// Field noise and ion heating rate
    Heat,
    /// Run the invariant suite
    Validate,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::States => Command::States,
            Sub::Dipoles => Command::Dipoles,
            Sub::Rates => Command::Rates,
            Sub::Spectrum => Command::Spectrum,
            Sub::Tempsweep => Command::Tempsweep,
            Sub::McScaling => Command::McScaling,
            Sub::Heat => Command::Heat,
            Sub::Validate => Command::Validate,
        }
    }
}

/// Adatom dipole noise and ion-trap heating.
#[derive(Debug, Parser)]
#[command(name = "adnoise", version)]
struct Cli {
    #[arg(value_enum)]
    command: Sub,
    /// TOML configuration; without it the preset defaults are used
    #[arg(long)]
    config: Option<PathBuf>,
    /// Adatom preset (H-Au, Ne-Au, K-surface)
    #[arg(long)]
    preset: Option<String>,
    /// Output directory
    #[arg(long)]
    output: Option<PathBuf>,
    /// Base seed for the Monte Carlo samples
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated temperatures, e.g. "0.2hnu,1hnu,50K"
    #[arg(long)]
    temperature: Option<String>,
}

fn run(cli: &Cli) -> adnoise::Result<()> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::new(ErrorKind::Config, "cli", format!("{}: {e}", path.display())))?,
        None => String::new(),
    };
    let over = Overrides {
        preset: cli.preset.clone(),
        output: cli.output.clone(),
        seed: cli.seed,
        temperatures: cli.temperature.as_deref().map(parse_temperature_list).transpose()?,
    };
    let cfg = parse_config_with(&text, &over)?;
    let paths = execute(&cfg, cli.command.into())?;
    for p in paths {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("adnoise: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
