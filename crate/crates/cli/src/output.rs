//! Trace CSVs, run summaries and gnuplot scripts.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use ftfreq_core::{Branch, EstimatorKind, RunSummary, Scenario, ScenarioResult};
use serde::Serialize;

use crate::error::{CliError, Result};

/// Bumped whenever the column set or order changes.
pub const CSV_FORMAT_VERSION: u32 = 1;

/// Column names, in order. Proposed-estimator columns appear only when that
/// estimator ran, likewise the baseline pair.
pub fn columns(result: &ScenarioResult) -> Vec<String> {
    let mut cols: Vec<String> = ["t", "y", "y_meas"].map(String::from).to_vec();
    if let Some(p) = &result.proposed {
        let m = p.z.len();
        cols.extend((1..=m).map(|i| format!("z{i}")));
        cols.extend((1..m).map(|i| format!("y_d{i}")));
        cols.extend(
            [
                "gamma1_hat",
                "gamma2_hat",
                "e_gamma",
                "zeta_hat",
                "w_hat",
                "branch",
            ]
            .map(String::from),
        );
    }
    if result.baseline.is_some() {
        cols.extend(["baseline_h", "baseline_w_hat"].map(String::from));
    }
    cols
}

/// Writes the trace as CSV with nine significant digits per value. `branch`
/// is 1 on the excited branch and 0 otherwise.
pub fn write_trace<W: Write>(out: W, result: &ScenarioResult) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "{}", columns(result).join(","))?;
    let mut row: Vec<f64> = Vec::new();
    for k in 0..result.len() {
        row.clear();
        row.extend([result.t[k], result.y[k], result.y_meas[k]]);
        if let Some(p) = &result.proposed {
            row.extend(p.z.iter().map(|z| z[k]));
            row.extend(p.truth[1..].iter().map(|d| d[k]));
            row.extend([
                p.gamma1_hat[k],
                p.gamma2_hat[k],
                p.e_gamma[k],
                p.zeta_hat[k],
                p.w_hat[k],
            ]);
            row.push(if p.branch[k] == Branch::Excited {
                1.0
            } else {
                0.0
            });
        }
        if let Some(b) = &result.baseline {
            row.extend([b.h[k], b.w_hat[k]]);
        }
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.write_all(b",")?;
            }
            write!(out, "{v:.8e}")?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_trace_file(path: &Path, result: &ScenarioResult) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_trace(file, result).map_err(|e| CliError::io(path, e))
}

/// Per-run record in `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub name: String,
    pub trace: String,
    /// Absolute tolerance on `|w_hat - w|` behind the settling times.
    pub settle_tol: f64,
    /// Seconds; `null` if the estimator did not run or never settled.
    pub settling_time: ByEstimator,
    pub final_error: ByEstimator,
    /// Mean `|w_hat - w|` over the final two seconds.
    pub tail_error: ByEstimator,
    pub branch_switches: u64,
    pub samples: usize,
    pub warnings: Vec<String>,
    pub scenario: Scenario,
}

#[derive(Debug, Clone, Serialize)]
pub struct ByEstimator {
    pub proposed: Option<f64>,
    pub baseline: Option<f64>,
}

impl Summary {
    pub fn new(name: &str, trace: &str, scenario: &Scenario, result: &ScenarioResult) -> Self {
        let s = RunSummary::of(result);
        Self {
            name: name.into(),
            trace: trace.into(),
            settle_tol: result.settle_tol,
            settling_time: ByEstimator {
                proposed: s.settling_proposed,
                baseline: s.settling_baseline,
            },
            final_error: ByEstimator {
                proposed: s.final_error_proposed,
                baseline: s.final_error_baseline,
            },
            tail_error: ByEstimator {
                proposed: s.tail_error_proposed,
                baseline: s.tail_error_baseline,
            },
            branch_switches: s.branch_switches,
            samples: s.samples,
            warnings: result.warnings.clone(),
            scenario: scenario.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
struct SummaryFile<'a> {
    code_version: &'static str,
    csv_format_version: u32,
    runs: &'a [Summary],
}

pub fn write_summary(path: &Path, runs: &[Summary]) -> Result<()> {
    let doc = SummaryFile {
        code_version: env!("CARGO_PKG_VERSION"),
        csv_format_version: CSV_FORMAT_VERSION,
        runs,
    };
    let text = serde_json::to_string_pretty(&doc).expect("summary serializes");
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// gnuplot script plotting every frequency estimate of `runs` against `t`.
pub fn gnuplot_script(runs: &[(Summary, Vec<EstimatorKind>)], png: &str) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str("set xlabel 't [s]'\nset ylabel 'frequency estimate'\n");
    s.push_str("set terminal pngcairo size 1000,600\n");
    s.push_str(&format!("set output '{png}'\n"));
    let mut curves = Vec::new();
    for (summary, kinds) in runs {
        for kind in kinds {
            let col = match kind {
                EstimatorKind::Proposed => "w_hat",
                EstimatorKind::Baseline => "baseline_w_hat",
            };
            curves.push(format!(
                "'{}' using 't':'{col}' with lines title '{} {col}'",
                summary.trace, summary.name
            ));
        }
    }
    if let Some((first, _)) = runs.first() {
        curves.push(format!(
            "{} with lines dashtype 2 title 'w'",
            first.scenario.signal.omega
        ));
    }
    s.push_str("plot ");
    s.push_str(&curves.join(", \\\n     "));
    s.push('\n');
    s
}
