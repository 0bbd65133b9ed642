use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use super::config::{parse_config, parse_list, ExperimentConfig};
use super::scenario::{run_scenario, ExitStatus};
use super::sweep::{run_sweep, SweepSpec};
use crate::diagnostics::{fit_decay, fit_decay_in, read_csv_column};
use crate::thresholds::report;

#[derive(Debug, Parser)]
#[command(
    name = "kslab",
    version,
    about = "Damping thresholds and simulations for chemotaxis with logistic growth"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the threshold report for the parameters of a config.
    Thresholds {
        #[arg(long)]
        config: PathBuf,
        /// Use the convex-domain threshold where it applies.
        #[arg(long)]
        convex: bool,
    },
    /// Run the scenario of a config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a config at several values of one parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
    },
    /// Fit exponential and algebraic decay to a diagnostics column.
    Fit {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        column: String,
        /// `A,B`; defaults to the second half of the series.
        #[arg(long)]
        window: Option<String>,
    },
}

fn load(path: &PathBuf, err: &mut dyn Write) -> Result<ExperimentConfig, i32> {
    let text = fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
        ExitStatus::ConfigError.code()
    })?;
    parse_config(&text).map_err(|e| {
        let _ = writeln!(err, "error: {}: {e}", path.display());
        ExitStatus::ConfigError.code()
    })
}

/// Runs the command line and returns the process exit code.
pub fn cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                ExitStatus::ConfigError.code()
            } else {
                0
            };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match run(parsed.command, out, err) {
        Ok(code) | Err(code) => code,
    }
}

fn run(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, i32> {
    let config_error = ExitStatus::ConfigError.code();
    match command {
        Command::Thresholds { config, convex } => {
            let cfg = load(&config, err)?;
            let r = report(&cfg.params, convex || cfg.convex).map_err(|e| {
                let _ = writeln!(err, "error: {e}");
                config_error
            })?;
            for (k, v) in r.lines() {
                let _ = writeln!(out, "{k}: {v}");
            }
            Ok(0)
        }
        Command::Simulate { config } => {
            let cfg = load(&config, err)?;
            match run_scenario(&cfg) {
                Ok(result) => {
                    for (k, v) in &result.report {
                        let _ = writeln!(out, "{k}: {v}");
                    }
                    Ok(result.status.code())
                }
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    Err(config_error)
                }
            }
        }
        Command::Sweep {
            config,
            axis,
            values,
        } => {
            let cfg = load(&config, err)?;
            let values: Vec<f64> = parse_list(&values).map_err(|e| {
                let _ = writeln!(err, "error: --values: {e}");
                config_error
            })?;
            let spec = SweepSpec {
                axis,
                values,
                base: cfg,
            };
            let summary = run_sweep(&spec).map_err(|e| {
                let _ = writeln!(err, "error: {e}");
                config_error
            })?;
            let _ = writeln!(
                out,
                "summary: {}",
                spec.base.output.join("summary.csv").display()
            );
            for r in &summary.rows {
                let _ = writeln!(
                    out,
                    "{} = {}: {} sup_linf_u {}",
                    summary.axis,
                    r.value,
                    r.outcome.map_or("error", |o| o.as_str()),
                    r.sup_linf_u
                        .map_or("absent".to_string(), |s| format!("{s:.17e}"))
                );
            }
            Ok(0)
        }
        Command::Fit {
            csv,
            column,
            window,
        } => {
            let file = fs::File::open(&csv).map_err(|e| {
                let _ = writeln!(err, "error: cannot read {}: {e}", csv.display());
                config_error
            })?;
            let (t, v) = read_csv_column(file, &column).map_err(|e| {
                let _ = writeln!(err, "error: {e}");
                config_error
            })?;
            let fit = match window {
                None => fit_decay(&t, &v),
                Some(w) => {
                    let w: Vec<f64> = parse_list(&w).map_err(|e| {
                        let _ = writeln!(err, "error: --window: {e}");
                        config_error
                    })?;
                    if w.len() != 2 || !(w[0] < w[1]) {
                        let _ = writeln!(err, "error: --window expects A,B with A < B");
                        return Err(config_error);
                    }
                    fit_decay_in(&t, &v, (w[0], w[1]))
                }
            }
            .map_err(|e| {
                let _ = writeln!(err, "error: {e}");
                config_error
            })?;
            let _ = writeln!(out, "model: {}", fit.model.as_str());
            let _ = writeln!(out, "rate: {:.17e}", fit.rate);
            let _ = writeln!(out, "goodness: {:.17e}", fit.goodness);
            let _ = writeln!(out, "window: {},{}", fit.window.0, fit.window.1);
            let _ = writeln!(out, "exponential_rate: {:.17e}", fit.exponential_rate());
            let _ = writeln!(
                out,
                "exponential_goodness: {:.17e}",
                fit.exponential.r_squared
            );
            let _ = writeln!(out, "algebraic_rate: {:.17e}", fit.algebraic_rate());
            let _ = writeln!(out, "algebraic_goodness: {:.17e}", fit.algebraic.r_squared);
            Ok(0)
        }
    }
}
