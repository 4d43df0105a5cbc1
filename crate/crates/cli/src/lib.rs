//! Command-line harness for `ftfreq-core`: scenario files in, CSV traces and
//! JSON summaries out.

pub mod config;
pub mod error;
pub mod output;
pub mod repro;

use std::io::Write;
use std::path::Path;

use ftfreq_core::{presets, run, sweep, SweepAxis, SweepRow};

pub use error::{CliError, Result};
pub use repro::Figure;

/// `run`: one scenario, `trace.csv` and `summary.json` in `out`.
pub fn run_file(file: &Path, out: &Path, gnuplot: bool) -> Result<output::Summary> {
    let sc = config::load(file)?;
    let result = run(&sc)?;
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    output::write_trace_file(&out.join("trace.csv"), &result)?;
    let name = file
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("scenario");
    let summary = output::Summary::new(name, "trace.csv", &sc, &result);
    output::write_summary(&out.join("summary.json"), std::slice::from_ref(&summary))?;
    if gnuplot {
        let path = out.join("trace.gp");
        let script =
            output::gnuplot_script(&[(summary.clone(), sc.sim.estimators.clone())], "trace.png");
        std::fs::write(&path, script).map_err(|e| CliError::io(&path, e))?;
    }
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    Ok(summary)
}

/// `sweep`: one run per value, rows in input order.
pub fn sweep_file(file: &Path, axis: &str, values: &[f64]) -> Result<(SweepAxis, Vec<SweepRow>)> {
    let sc = config::load(file)?;
    let axis: SweepAxis = axis.parse()?;
    if values.is_empty() {
        return Err(CliError::Usage("--values needs at least one number".into()));
    }
    Ok((axis, sweep(&sc, axis, values)?))
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "null".to_string(), |v| format!("{v:.6e}"))
}

/// Sweep rows as CSV: value, settling times, final errors, branch switches.
pub fn write_sweep_table<W: Write>(
    mut out: W,
    axis: SweepAxis,
    rows: &[SweepRow],
) -> std::io::Result<()> {
    writeln!(
        out,
        "{},settling_proposed,settling_baseline,final_error_proposed,final_error_baseline,branch_switches",
        axis.name()
    )?;
    for r in rows {
        let s = &r.summary;
        writeln!(
            out,
            "{:e},{},{},{},{},{}",
            r.value,
            cell(s.settling_proposed),
            cell(s.settling_baseline),
            cell(s.final_error_proposed),
            cell(s.final_error_baseline),
            s.branch_switches
        )?;
    }
    Ok(())
}

/// `presets`: name and description of every built-in scenario.
pub fn write_presets<W: Write>(mut out: W) -> std::io::Result<()> {
    let width = presets::NAMES
        .iter()
        .map(|(n, _)| n.len())
        .max()
        .unwrap_or(0);
    for (name, about) in presets::NAMES {
        writeln!(out, "{name:width$}  {about}")?;
    }
    Ok(())
}
