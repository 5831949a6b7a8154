use std::path::PathBuf;
use std::process::ExitCode;

use capwave::Command;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "capwave", version, about = "Solitary waves and evolution of Benjamin-type interfacial models")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Compute traveling-wave profiles
    Solve(RunArgs),
    /// Evolve a Benjamin solitary wave under another model
    Evolve(RunArgs),
    /// Speed-amplitude tables
    Sweep(RunArgs),
    /// Tabulate dispersion relations
    Dispersion(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON configuration, applied on top of the preset
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in configuration (fig1 … fig10)
    #[arg(long)]
    preset: Option<String>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, args) = match cli.command {
        Sub::Solve(a) => (Command::Solve, a),
        Sub::Evolve(a) => (Command::Evolve, a),
        Sub::Sweep(a) => (Command::Sweep, a),
        Sub::Dispersion(a) => (Command::Dispersion, a),
    };
    let code = capwave::run(cmd, args.preset.as_deref(), args.config.as_deref(), &args.out);
    ExitCode::from(code as u8)
}
