//! `enslab`: configuration-driven runner for the enstrophy-defect
//! laboratory. `run` executes one experiment from a flat `key = value`
//! config, writing one CSV per table plus a summary that ends in PASS or
//! FAIL; `list` prints the experiment registry.
//!
//! Exit codes: 0 success, 1 in-config assertion failed, 2 configuration
//! error, 3 numerical non-convergence.

mod config;
mod experiments;

use clap::{Parser, Subcommand};
use config::Config;
use experiments::{dispatch, RunError, EXPERIMENTS};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "enslab", version, about = "Enstrophy-defect laboratory runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a key = value config file.
    Run { config: PathBuf },
    /// List every available experiment id.
    List,
    /// Print the version string.
    Version,
}

/// Honor ENSLAB_THREADS as a cap on the rayon worker count.
fn configure_threads() {
    if let Ok(raw) = std::env::var("ENSLAB_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring ENSLAB_THREADS={raw} (want a positive integer)"),
        }
    }
}

fn run(path: &PathBuf) -> ExitCode {
    let cfg = match Config::load(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let id = match cfg.str_value("experiment") {
        Ok(id) => id.to_string(),
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let out_dir = PathBuf::from(cfg.str_opt("output_dir", "."));

    let report = match dispatch(&cfg, &id) {
        Ok(r) => r,
        Err(RunError::Config(e)) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
        Err(RunError::NonConvergence(msg)) => {
            eprintln!("non-convergence: {msg}");
            return ExitCode::from(3);
        }
    };

    if let Err(e) = std::fs::create_dir_all(&out_dir) {
        eprintln!("cannot create output directory {}: {e}", out_dir.display());
        return ExitCode::from(2);
    }
    for (name, body) in &report.tables {
        let path = out_dir.join(name);
        if let Err(e) = std::fs::write(&path, body) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
        log::info!("wrote {}", path.display());
    }

    let all_pass = report.assertions.iter().all(|(_, ok)| *ok);
    let mut summary = format!("experiment: {id}\n");
    for note in &report.notes {
        summary.push_str(note);
        summary.push('\n');
    }
    for (desc, ok) in &report.assertions {
        summary.push_str(&format!(
            "assert {desc}: {}\n",
            if *ok { "pass" } else { "fail" }
        ));
    }
    summary.push_str(if all_pass { "PASS\n" } else { "FAIL\n" });
    let summary_path = out_dir.join("summary.txt");
    if let Err(e) = std::fs::write(&summary_path, &summary) {
        eprintln!("cannot write {}: {e}", summary_path.display());
        return ExitCode::from(2);
    }
    print!("{summary}");
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    env_logger::init();
    configure_threads();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => run(&config),
        Command::List => {
            for (id, desc) in EXPERIMENTS {
                println!("{id:<18} {desc}");
            }
            ExitCode::SUCCESS
        }
        Command::Version => {
            println!("enslab {}", env!("CARGO_PKG_VERSION"));
            ExitCode::SUCCESS
        }
    }
}
