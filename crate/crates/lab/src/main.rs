use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use loopspace_lab::{emit_plot_data, init_threads, preset, run_experiment, write_outputs, Experiment, ExperimentConfig, LabError, ResultTable};

#[derive(Parser)]
#[command(name = "loopspace-lab", version, about = "Experiments on Sobolev loop spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a JSON config.
    Run { config: PathBuf },
    /// Run every experiment from its built-in config.
    CheckAll {
        /// Smaller resolutions and grids.
        #[arg(long)]
        quick: bool,
        /// Each experiment writes into a subdirectory of this.
        #[arg(long, default_value = "lab-output")]
        output: PathBuf,
    },
    /// Write a gnuplot script next to an existing results CSV.
    EmitPlots {
        csv: PathBuf,
        #[arg(long)]
        x: String,
        /// Comma-separated or repeated.
        #[arg(long, value_delimiter = ',')]
        y: Vec<String>,
    },
}

fn summarize(name: &str, table: &ResultTable) {
    let wall = table.metadata.as_ref().map_or(0.0, |m| m.wall_time_seconds);
    println!(
        "{} {name} [{:.2}s]",
        if table.all_pass() { "PASS" } else { "FAIL" },
        wall
    );
    for a in &table.assertions {
        let rows = if a.failing_rows.is_empty() {
            String::new()
        } else {
            format!(" rows {:?}", a.failing_rows)
        };
        println!(
            "  {} {}: {:e} {} {:e}{rows}",
            if a.pass { "ok  " } else { "FAIL" },
            a.name,
            a.measured,
            serde_json::to_value(a.relation).unwrap().as_str().unwrap(),
            a.bound
        );
    }
}

fn run_one(cfg: &ExperimentConfig) -> Result<bool, LabError> {
    let table = run_experiment(cfg)?;
    let files = write_outputs(&table, &cfg.output_dir)?;
    summarize(cfg.experiment.name(), &table);
    println!("  wrote {}", files.csv.parent().unwrap_or(&cfg.output_dir).display());
    Ok(table.all_pass())
}

fn exit_code(outcome: &Result<bool, LabError>) -> u8 {
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => e.exit_code(),
    }
}

fn dispatch(cli: Cli) -> Result<bool, LabError> {
    init_threads()?;
    match cli.command {
        Command::Run { config } => run_one(&ExperimentConfig::from_file(&config)?),
        Command::CheckAll { quick, output } => {
            // keep going so one broken experiment does not hide the rest
            let mut worst = 0;
            for exp in Experiment::ALL {
                let mut cfg = preset(exp, quick);
                cfg.output_dir = output.join(exp.name());
                let outcome = run_one(&cfg);
                if let Err(e) = &outcome {
                    println!("FAIL {exp}: {e}");
                }
                worst = worst.max(exit_code(&outcome));
            }
            match worst {
                0 => Ok(true),
                1 => Ok(false),
                _ => Err(LabError::Usage("check-all could not run every experiment".into())),
            }
        }
        Command::EmitPlots { csv, x, y } => {
            let path = emit_plot_data(&csv, &x, &y)?;
            println!("wrote {}", path.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = dispatch(cli);
    if let Err(e) = &outcome {
        eprintln!("error: {e}");
    }
    ExitCode::from(exit_code(&outcome))
}
