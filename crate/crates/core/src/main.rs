use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nullforge::pipeline::{export_artifacts, run_experiment, summary_text, verify_report, PipelineConfig, Report};

#[derive(Parser)]
#[command(name = "nullforge", version, about = "Riemann–Hilbert deformations of conformal minimal discs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment described by a JSON config
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// overrides the seed in the config
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        verbose: bool,
    },
    /// Re-check the inequalities stored in a report
    Verify { report: PathBuf },
}

fn run(config: PathBuf, out: PathBuf, seed: Option<u64>, verbose: bool) -> Result<bool, String> {
    let text = std::fs::read_to_string(&config).map_err(|e| format!("{}: {e}", config.display()))?;
    let mut cfg = PipelineConfig::from_json(&text).map_err(|e| e.to_string())?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let outcome = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let files = export_artifacts(&outcome, &cfg.mesh, &out).map_err(|e| e.to_string())?;
    if verbose {
        print!("{}", summary_text(&outcome.report));
        for f in &files {
            println!("wrote {}", f.display());
        }
    }
    match outcome.report.first_failure() {
        Some(c) => {
            eprintln!("failed: {} ({:e} {} {:e})", c.name, c.value, c.relation, c.bound);
            Ok(false)
        }
        None => Ok(true),
    }
}

fn verify(path: PathBuf) -> Result<bool, String> {
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let report: Report = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let bad = verify_report(&report);
    if bad.is_empty() {
        println!("{} checks hold", report.checks.len());
        Ok(true)
    } else {
        eprintln!("failed: {}", bad.join(", "));
        Ok(false)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Run { config, out, seed, verbose } => run(config, out, seed, verbose),
        Cmd::Verify { report } => verify(report),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
