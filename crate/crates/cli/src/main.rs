//! Command-line front end for the `geneo` library.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on input errors.

mod commands;
mod setting;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use geneo::action::DEFAULT_DOMAIN_GUARD;
use geneo::stochastic::DEFAULT_TOL;

use commands::{Common, FeatureJob, Status, Translate};
use setting::{read_matrix, SettingArgs};

#[derive(Parser, Debug)]
#[command(name = "geneo", version, about = "Linear group-equivariant non-expansive operators on finite sets")]
struct Cli {
    /// Numerical tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Largest function space |X|^|Y| that may be enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_DOMAIN_GUARD as u64)]
    guard: u64,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write data here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split a row-stochastic CSV matrix into weighted rectangular permutation matrices (JSON lines).
    Decompose {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Find a twisted-permutant measure for an equivariant matrix.
    Represent {
        #[command(flatten)]
        setting: SettingArgs,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// List the orbits of the twisted action on all functions Y -> X.
    Orbits {
        #[command(flatten)]
        setting: SettingArgs,
        /// Include every orbit member.
        #[arg(long)]
        members: bool,
    },
    /// Orbit sizes, representatives and basis operator matrices.
    Basis {
        #[command(flatten)]
        setting: SettingArgs,
        /// Emit CSV instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Apply every unit-vector line-average operator to images from an IDX file (CSV rows).
    TorusFeatures {
        /// Prime torus side; 28x28 images are zero-padded when it is 29.
        #[arg(long, default_value_t = 29)]
        p: u32,
        /// IDX image file (magic 0x803).
        #[arg(long)]
        images: PathBuf,
        /// Salt-and-pepper level in [0, 1].
        #[arg(long)]
        noise: Option<f64>,
        /// `random` or `v1,v2`.
        #[arg(long)]
        translate: Option<Translate>,
        /// Only the first N images.
        #[arg(long)]
        limit: Option<usize>,
        /// JSON sidecar with p, unit vectors, noise level and seed.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Check equivariance and non-expansivity of a matrix; exits 1 if it is not a GENEO.
    Verify {
        #[command(flatten)]
        setting: SettingArgs,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Run the worked examples and report PASS/FAIL.
    Demo,
}

fn run(cli: Cli) -> Result<Status> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        bail!("--tol must be positive");
    }
    if cli.guard == 0 {
        bail!("--guard must be at least 1");
    }
    let common = Common {
        tol: cli.tol,
        guard: cli.guard as u128,
        seed: cli.seed,
        out: cli.out,
    };
    match cli.command {
        Command::Decompose { matrix } => commands::decompose(&common, &read_matrix(&matrix)?),
        Command::Represent { setting, matrix } => {
            commands::represent_cmd(&common, setting.load()?, read_matrix(&matrix)?)
        }
        Command::Orbits { setting, members } => commands::orbits(&common, setting.load()?, members),
        Command::Basis { setting, csv } => commands::basis(&common, setting.load()?, csv),
        Command::TorusFeatures {
            p,
            images,
            noise,
            translate,
            limit,
            meta,
        } => commands::torus_features(
            &common,
            &FeatureJob {
                p,
                images: &images,
                noise,
                translate,
                limit,
                meta: meta.as_deref(),
            },
        ),
        Command::Verify { setting, matrix } => {
            commands::verify(&common, setting.load()?, read_matrix(&matrix)?)
        }
        Command::Demo => commands::demo(&common),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
