use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use linv_cli::config::RunConfig;
use linv_cli::pipeline;
use linv_cli::report::to_json;

#[derive(Parser)]
#[command(name = "linv", version, about = "L-invariants of p-adically uniformized forms")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExploreWhat {
    Tree,
    Graph,
    Cocycles,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full pipeline and emit an L-invariant report.
    Compute {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the verification suite and emit pass/fail per invariant group.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Dump covering edges, the quotient graph, or the harmonic basis.
    Explore {
        what: ExploreWhat,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        depth: Option<u32>,
    },
}

fn emit(cfg: &RunConfig, text: &str) -> anyhow::Result<()> {
    print!("{text}");
    if let Some(path) = &cfg.output {
        std::fs::write(path, text)?;
    }
    Ok(())
}

fn run() -> anyhow::Result<bool> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Compute { config } => {
            let cfg = RunConfig::load(&config)?;
            let dir = config.parent().unwrap_or(std::path::Path::new(".")).to_path_buf();
            let report = pipeline::cmd_compute(&cfg, &dir)?;
            emit(&cfg, &to_json(&report))?;
            Ok(report.all_passed)
        }
        Cmd::Verify { config } => {
            let cfg = RunConfig::load(&config)?;
            let dir = config.parent().unwrap_or(std::path::Path::new(".")).to_path_buf();
            let report = pipeline::cmd_verify(&cfg, &dir);
            emit(&cfg, &to_json(&report))?;
            Ok(report.all_passed)
        }
        Cmd::Explore {
            what,
            config,
            depth,
        } => {
            let cfg = RunConfig::load(&config)?;
            let dir = config.parent().unwrap_or(std::path::Path::new(".")).to_path_buf();
            let depth = depth.unwrap_or(cfg.depth);
            let text = match what {
                ExploreWhat::Tree => to_json(&pipeline::explore_tree(&cfg, depth)?),
                ExploreWhat::Graph => to_json(&pipeline::explore_graph(&cfg, &dir)?),
                ExploreWhat::Cocycles => to_json(&pipeline::explore_cocycles(&cfg, &dir)?),
            };
            emit(&cfg, &text)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
