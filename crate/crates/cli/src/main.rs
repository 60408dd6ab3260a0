//! `ivpp`: command-line front end for the singularity-confinement and
//! periodic-variety pipeline.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{DeriveArgs, MapArgs, NumericArgs, OutputArgs, ParamArgs, ProbeArgs, SolveArgs, TraceArgs};

#[derive(Parser, Debug)]
#[command(name = "ivpp", version, about = "Singularity confinement and invariant varieties of periodic points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Built-in maps.
    Maps {
        #[command(subcommand)]
        action: MapsAction,
    },
    /// Invariant checks.
    Invariants {
        #[command(subcommand)]
        action: InvariantsAction,
    },
    /// The condition system of a singular variety and its parameterization.
    Sigma {
        #[command(subcommand)]
        action: SigmaAction,
    },
    /// Restriction of the iterates to the singular variety.
    Sc {
        #[command(subcommand)]
        action: ScAction,
    },
    /// Derive IVPP candidates from vanishing denominators.
    Derive(DeriveArgs),
    /// Check candidates numerically for periodic points.
    Verify {
        #[command(flatten)]
        map: MapArgs,
        /// Period to check (2 runs the period-2 surface check).
        #[arg(long)]
        period: usize,
        /// Candidate polynomial in the invariant names; give it twice.
        /// Defaults to the shipped table for the built-in Toda map.
        #[arg(long = "gamma")]
        gammas: Vec<String>,
        #[command(flatten)]
        numeric: NumericArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Subcommand, Debug)]
enum MapsAction {
    List {
        #[command(flatten)]
        out: OutputArgs,
    },
    Show {
        #[command(flatten)]
        map: MapArgs,
    },
}

#[derive(Subcommand, Debug)]
enum InvariantsAction {
    Verify {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Subcommand, Debug)]
enum SigmaAction {
    /// Print the condition system.
    Build {
        #[command(flatten)]
        param: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check a parameterization against the condition system.
    Verify {
        #[command(flatten)]
        param: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Solve the condition system by triangular elimination.
    Solve(SolveArgs),
}

#[derive(Subcommand, Debug)]
enum ScAction {
    Trace(TraceArgs),
    Probe(ProbeArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Maps { action } => match action {
            MapsAction::List { out } => commands::maps_list(&out),
            MapsAction::Show { map } => commands::maps_show(&map),
        },
        Command::Invariants {
            action: InvariantsAction::Verify { map, out },
        } => commands::invariants_verify(&map, &out),
        Command::Sigma { action } => match action {
            SigmaAction::Build { param, out } => commands::sigma_build(&param, &out),
            SigmaAction::Verify { param, out } => commands::sigma_verify(&param, &out),
            SigmaAction::Solve(args) => commands::sigma_solve(&args),
        },
        Command::Sc { action } => match action {
            ScAction::Trace(args) => commands::sc_trace(&args),
            ScAction::Probe(args) => commands::sc_probe(&args),
        },
        Command::Derive(args) => commands::derive(&args),
        Command::Verify {
            map,
            period,
            gammas,
            numeric,
            out,
        } => commands::verify(&map, period, &gammas, &numeric, &out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(config::exit_code(&e))
        }
    }
}
