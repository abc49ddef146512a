//! Command-line front end: graphs in, matchings, simulations, designs, and
//! verification reports out.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pairsynth_cli::commands;

#[derive(Parser)]
#[command(
    name = "pairsynth",
    version,
    about = "Design and verify photon-pair-source circuits for postselected multipartite states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List perfect matchings and the induced postselected state
    Matchings {
        /// Graph file (JSON)
        graph: PathBuf,
    },
    /// Expand the squeezed state, postselect on coincidences, and report
    Simulate {
        /// Graph file (JSON)
        graph: PathBuf,
        /// Expansion order in photon pairs (default: lowest contributing)
        #[arg(long)]
        order: Option<usize>,
        /// Also report the next-order contamination ratio
        #[arg(long)]
        contamination: bool,
    },
    /// Solve for pair sources and a block circuit realizing the graph state
    Synth {
        /// Graph file (JSON)
        graph: PathBuf,
        /// Partition file (JSON) constraining the circuit to block-diagonal
        #[arg(long, conflicts_with = "unconstrained")]
        partition: Option<PathBuf>,
        /// Solve without block constraints (global factorization)
        #[arg(long)]
        unconstrained: bool,
        /// Rescale sources so |beta|^2 equals this value
        #[arg(long, default_value_t = 0.01)]
        gain: f64,
        /// Require diagonal source blocks (one waveguide pair per source)
        #[arg(long)]
        diag_sources: bool,
        /// Include the contamination diagnostic (slower)
        #[arg(long)]
        contamination: bool,
        /// Output design file (JSON)
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Recompute a design file's diagnostics against its graph
    Verify {
        /// Design file (JSON)
        design: PathBuf,
        /// Graph file (JSON)
        graph: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Matchings { graph } => commands::cmd_matchings(graph),
        Command::Simulate { graph, order, contamination } => {
            commands::cmd_simulate(graph, *order, *contamination)
        }
        Command::Synth {
            graph,
            partition,
            unconstrained,
            gain,
            diag_sources,
            contamination,
            output,
        } => commands::cmd_synth(
            graph,
            partition.as_deref(),
            *unconstrained,
            *gain,
            *diag_sources,
            *contamination,
            output,
        ),
        Command::Verify { design, graph } => commands::cmd_verify(design, graph),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
