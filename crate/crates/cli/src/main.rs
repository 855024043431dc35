use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use subsynth_cli::commands::{self, Axis};
use subsynth_cli::config::{build_config, PatternArgs, SolverArgs};
use subsynth_cli::error::{exit, CliError};

#[derive(Parser)]
#[command(
    name = "subsynth",
    version,
    about = "Subarrayed linear array synthesis by sparse recovery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a desired pattern as `theta_deg,re,im` CSV on the metric grid.
    Pattern {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long, default_value_t = subsynth::metrics::DEFAULT_METRIC_STEP_DEG)]
        metric_step_deg: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run one synthesis and write result.json, achieved_pattern.csv and metadata.json.
    Synth {
        #[command(flatten)]
        pattern: PatternArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run one synthesis per value of a swept field.
    Sweep {
        #[command(flatten)]
        pattern: PatternArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated values.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        values: String,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Recompute the metrics of a result file and check them against the stored values.
    Eval { result: PathBuf },
}

const DESIRED_FILE: &str = "desired_pattern.csv";
const SWEEP_FILE: &str = "sweep.csv";

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Pattern {
            pattern,
            metric_step_deg,
            out,
        } => {
            let (spec, _) = pattern.spec()?;
            let path = out.join(DESIRED_FILE);
            let o = commands::cmd_pattern(&spec, metric_step_deg, &path)?;
            println!(
                "wrote {} ({} rows) sll_db={}",
                path.display(),
                o.rows,
                commands::format_db(o.sll_db)
            );
            Ok(exit::SUCCESS)
        }
        Command::Synth {
            pattern,
            solver,
            out,
        } => {
            let config = build_config(&pattern, &solver)?;
            config.validate()?;
            let o = commands::cmd_synth(&config, &out)?;
            println!("{}", o.summary);
            if let Some(w) = &o.synthesis.result.warning {
                eprintln!("warning: {w}");
            }
            if o.synthesis.infeasible {
                eprintln!(
                    "infeasible: target not met with K = N; best effort written to {}",
                    out.display()
                );
                return Ok(exit::INFEASIBLE);
            }
            Ok(exit::SUCCESS)
        }
        Command::Sweep {
            pattern,
            solver,
            axis,
            values,
            threads,
            out,
        } => {
            let config = build_config(&pattern, &solver)?;
            let table =
                commands::cmd_sweep(&config, axis, &commands::parse_values(&values), threads)?;
            std::fs::create_dir_all(&out).map_err(|e| CliError::io(out.display(), e))?;
            let path = out.join(SWEEP_FILE);
            std::fs::write(&path, &table).map_err(|e| CliError::io(path.display(), e))?;
            print!("{table}");
            Ok(exit::SUCCESS)
        }
        Command::Eval { result } => {
            let report = commands::cmd_eval(&result)?;
            print!("{}", commands::render_eval(&report));
            Ok(commands::eval_exit_code(&report))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
