//! Scenario bundles behind each reproduced figure.

use std::path::Path;
use std::str::FromStr;

use ftfreq_core::{presets, run, Scenario};

use crate::error::{CliError, Result};
use crate::output::{self, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Both estimators, noise-free, small and large initial error.
    Fig1,
    /// As `Fig1` with bounded uniform measurement noise.
    Fig2,
    /// Baseline on the example-3 signal from five initial errors.
    FigA1,
}

impl FromStr for Figure {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "figa1" => Ok(Figure::FigA1),
            _ => Err(CliError::Usage(format!(
                "unknown figure `{s}` (expected fig1, fig2 or figA1)"
            ))),
        }
    }
}

impl Figure {
    pub fn stem(&self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::FigA1 => "figA1",
        }
    }

    /// Preset names making up the figure, in plotting order.
    pub fn presets(&self) -> &'static [&'static str] {
        match self {
            Figure::Fig1 => &["fig1-small", "fig1-large"],
            Figure::Fig2 => &["fig2-small", "fig2-large"],
            Figure::FigA1 => &["ex3-a", "ex3-b", "ex3-c", "ex3-d", "ex3-e"],
        }
    }

    pub fn scenarios(&self) -> Vec<(&'static str, Scenario)> {
        self.presets()
            .iter()
            .map(|&name| {
                (
                    name,
                    presets::named(name).expect("bundle names are registered"),
                )
            })
            .collect()
    }
}

/// Trace file name for a preset, e.g. `fig1-small` -> `fig1-small.csv`.
pub fn trace_name(preset: &str) -> String {
    format!("{preset}.csv")
}

/// Runs every scenario of `fig` (one thread each) and writes one CSV per
/// scenario plus `summary.json` into `out`. Returns the summaries.
pub fn reproduce(fig: Figure, out: &Path, gnuplot: bool) -> Result<Vec<Summary>> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let bundle = fig.scenarios();
    let results = std::thread::scope(|scope| {
        let handles: Vec<_> = bundle
            .iter()
            .map(|(_, sc)| scope.spawn(move || run(sc)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect::<Vec<_>>()
    });

    let mut summaries = Vec::with_capacity(bundle.len());
    let mut plotted = Vec::with_capacity(bundle.len());
    for ((name, sc), result) in bundle.iter().zip(results) {
        let result = result?;
        let trace = trace_name(name);
        output::write_trace_file(&out.join(&trace), &result)?;
        let summary = Summary::new(name, &trace, sc, &result);
        plotted.push((summary.clone(), sc.sim.estimators.clone()));
        summaries.push(summary);
    }
    output::write_summary(&out.join("summary.json"), &summaries)?;
    if gnuplot {
        let png = format!("{}.png", fig.stem());
        let path = out.join(format!("{}.gp", fig.stem()));
        std::fs::write(&path, output::gnuplot_script(&plotted, &png))
            .map_err(|e| CliError::io(&path, e))?;
    }
    Ok(summaries)
}
