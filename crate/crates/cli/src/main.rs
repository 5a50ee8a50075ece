use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polref_cli::{emit_plot_script, run_config, CliError, Layout, Overrides};

#[derive(Parser)]
#[command(name = "polref", version, about = "Polarised neutron reflection and transmission scans")]
struct Cli {
    /// Override the seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides the config's `output`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scan described by a JSON config.
    Run { config: PathBuf },
    /// Write a gnuplot script for a scattering CSV.
    Plot {
        csv: PathBuf,
        #[arg(long, value_enum)]
        layout: Layout,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<Vec<PathBuf>, CliError> = match &cli.command {
        Command::Run { config } => run_config(config, &Overrides { seed: cli.seed, out: cli.out.clone() }),
        Command::Plot { csv, layout } => emit_plot_script(csv, *layout, cli.out.as_deref()).map(|p| vec![p]),
    };
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("polref: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
