use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ftfreq_cli::{repro, run_file, sweep_file, write_presets, write_sweep_table, CliError, Figure};

/// Fixed-time frequency estimation: scenario runner and figure reproduction.
#[derive(Parser)]
#[command(name = "ftfreq", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario file; writes trace.csv and summary.json.
    Run {
        file: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write a gnuplot script next to the CSV.
        #[arg(long)]
        gnuplot: bool,
    },
    /// Rerun a scenario over several values of one parameter.
    Sweep {
        file: PathBuf,
        /// zeta0, h0, eta, dt or r.
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_negative_numbers = true
        )]
        values: Vec<f64>,
    },
    /// List built-in presets.
    Presets,
    /// Reproduce a figure: fig1, fig2 or figA1.
    Repro {
        figure: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        gnuplot: bool,
    },
}

fn execute(cmd: Cmd) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let io = |e| CliError::io("<stdout>", e);
    match cmd {
        Cmd::Run { file, out, gnuplot } => {
            let s = run_file(&file, &out, gnuplot)?;
            println!(
                "settling (tol {}): proposed {:?}, baseline {:?}; wrote {}",
                s.settle_tol,
                s.settling_time.proposed,
                s.settling_time.baseline,
                out.display()
            );
        }
        Cmd::Sweep { file, axis, values } => {
            let (axis, rows) = sweep_file(&file, &axis, &values)?;
            write_sweep_table(stdout.lock(), axis, &rows).map_err(io)?;
        }
        Cmd::Presets => write_presets(stdout.lock()).map_err(io)?,
        Cmd::Repro {
            figure,
            out,
            gnuplot,
        } => {
            let fig: Figure = figure.parse()?;
            for s in repro::reproduce(fig, &out, gnuplot)? {
                println!(
                    "{:<12} proposed {:>12} baseline {:>12}",
                    s.name,
                    fmt_settle(
                        s.settling_time.proposed,
                        s.scenario.sim.has(ftfreq_core::EstimatorKind::Proposed)
                    ),
                    fmt_settle(
                        s.settling_time.baseline,
                        s.scenario.sim.has(ftfreq_core::EstimatorKind::Baseline)
                    ),
                );
            }
        }
    }
    Ok(())
}

fn fmt_settle(v: Option<f64>, ran: bool) -> String {
    match (ran, v) {
        (false, _) => "-".into(),
        (true, Some(t)) => format!("{t:.4} s"),
        (true, None) => "never".into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap uses 2 for usage errors; 2 is reserved for numerical aborts
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
