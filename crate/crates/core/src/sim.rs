//! Scenario orchestration: fixed-step integration of the composed system
//! (signal, noise, differentiator, window integrals, adaptive law, baseline),
//! trace recording, settling-time metrics and parameter sweeps.
//!
//! Within one step the order is fixed: read the measurement, advance the
//! differentiator, push the post-step `|z2|`, `|z4|` into the windows, then
//! advance the adaptive law and the baseline, then record.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{self, BaselineConfig, BaselineState};
use crate::differentiator::{self, DifferentiatorConfig};
use crate::error::{Error, Result};
use crate::estimator::{self, AdaptInputs, Branch, EstimatorConfig, ZETA_LIMIT};
use crate::integrate::{step_scalar, Scheme, Stepper};
use crate::signal::{DerivativeBound, NoiseKind, NoiseSource, NoiseSpec, SignalSpec};
use crate::window::{pe_lower_bound, steps_in, Quadrature, WindowIntegral};

/// Largest number of integration steps a single run may take.
pub const MAX_STEPS: f64 = 1e9;

/// Length of the trailing interval used for time-averaged errors, seconds.
pub const TAIL_SPAN: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Proposed,
    Baseline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub dt: f64,
    pub horizon: f64,
    #[serde(default)]
    pub scheme: Scheme,
    pub estimators: Vec<EstimatorKind>,
    /// Keep every `record_stride`-th step in the trace.
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    /// Absolute tolerance on `|w_hat - w|` that defines settling.
    #[serde(default = "default_settle_tol")]
    pub settle_tol: f64,
    #[serde(default)]
    pub quadrature: Quadrature,
    /// Time attached to the initial state; the horizon is counted from here.
    #[serde(default)]
    pub start_time: f64,
}

fn default_stride() -> usize {
    100
}

fn default_settle_tol() -> f64 {
    0.02
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-6,
            horizon: 10.0,
            scheme: Scheme::Euler,
            estimators: vec![EstimatorKind::Proposed],
            record_stride: default_stride(),
            settle_tol: default_settle_tol(),
            quadrature: Quadrature::LeftRectangle,
            start_time: 0.0,
        }
    }
}

impl SimConfig {
    pub fn has(&self, kind: EstimatorKind) -> bool {
        self.estimators.contains(&kind)
    }

    /// Number of integration steps covering the horizon.
    pub fn steps(&self) -> Result<u64> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(Error::config(format!(
                "horizon = {} must be >= 0",
                self.horizon
            )));
        }
        if !(self.start_time >= 0.0 && self.start_time.is_finite()) {
            return Err(Error::config(format!(
                "start_time = {} must be >= 0",
                self.start_time
            )));
        }
        if self.horizon / self.dt > MAX_STEPS {
            return Err(Error::config(format!(
                "horizon / dt = {:.3e} exceeds the {MAX_STEPS:.0e}-step limit",
                self.horizon / self.dt
            )));
        }
        Ok(steps_in(self.horizon, self.dt, "horizon")? as u64)
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub signal: SignalSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    pub differentiator: DifferentiatorConfig,
    pub estimator: EstimatorConfig,
    pub baseline: BaselineConfig,
    pub sim: SimConfig,
}

impl Scenario {
    /// Checks every module invariant. Returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        self.signal.validate()?;
        self.noise.validate()?;
        self.sim.steps()?;
        if self.sim.record_stride == 0 {
            return Err(Error::config("record_stride must be >= 1"));
        }
        if !(self.sim.settle_tol > 0.0) {
            return Err(Error::config("settle_tol must be positive"));
        }
        if self.sim.estimators.is_empty() {
            return Err(Error::config("at least one estimator must be enabled"));
        }
        if self.sim.has(EstimatorKind::Proposed) {
            let d = &self.differentiator;
            d.validate()?;
            DerivativeBound {
                order: d.order as u32,
                bound: d.derivative_bound,
            }
            .validate(&self.signal)?;
            self.estimator.validate()?;
            steps_in(d.switch_time, self.sim.dt, "switch time T_u")?;
            WindowIntegral::new(self.estimator.window, self.sim.dt, self.sim.quadrature)?;
            if self.signal.omega != 0.0 {
                let floor = pe_lower_bound(&self.signal, self.estimator.window)?;
                if self.estimator.epsilon > floor {
                    warnings.push(format!(
                        "epsilon = {} exceeds the excitation floor {floor:.4} for this signal; \
                         the adaptive law may stay in the unexcited branch",
                        self.estimator.epsilon
                    ));
                }
            }
        }
        if self.sim.has(EstimatorKind::Baseline) {
            self.baseline.validate()?;
        }
        Ok(warnings)
    }
}

/// Recorded columns of the proposed estimator.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProposedTrace {
    /// `z[i]` is the column of state `z_{i+1}`.
    pub z: Vec<Vec<f64>>,
    /// `truth[i]` is the exact `i`-th derivative of the clean signal.
    pub truth: Vec<Vec<f64>>,
    pub gamma1_hat: Vec<f64>,
    pub gamma2_hat: Vec<f64>,
    pub e_gamma: Vec<f64>,
    pub zeta_hat: Vec<f64>,
    pub w_hat: Vec<f64>,
    pub branch: Vec<Branch>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BaselineTrace {
    pub h: Vec<f64>,
    pub w_hat: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    /// True frequency of the simulated signal.
    pub omega: f64,
    pub settle_tol: f64,
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub y_meas: Vec<f64>,
    pub proposed: Option<ProposedTrace>,
    pub baseline: Option<BaselineTrace>,
    /// `f64::INFINITY` when the estimator never settles or is disabled.
    pub settling_proposed: f64,
    pub settling_baseline: f64,
    pub branch_switches: u64,
    pub warnings: Vec<String>,
}

impl ScenarioResult {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Differentiator exactness time of the recorded trace.
    pub fn exactness_time(&self, tol: f64) -> Result<f64> {
        let p = self.proposed.as_ref().ok_or(Error::EmptyTrace)?;
        differentiator::exactness_time(&self.t, &p.z, &p.truth, tol)
    }

    pub fn w_hat(&self, kind: EstimatorKind) -> Option<&[f64]> {
        match kind {
            EstimatorKind::Proposed => self.proposed.as_ref().map(|p| p.w_hat.as_slice()),
            EstimatorKind::Baseline => self.baseline.as_ref().map(|b| b.w_hat.as_slice()),
        }
    }

    pub fn settling(&self, kind: EstimatorKind) -> f64 {
        match kind {
            EstimatorKind::Proposed => self.settling_proposed,
            EstimatorKind::Baseline => self.settling_baseline,
        }
    }

    /// `|w_hat - w|` at the last recorded sample.
    pub fn final_error(&self, kind: EstimatorKind) -> Option<f64> {
        self.w_hat(kind)?.last().map(|w| (w - self.omega).abs())
    }

    /// Mean `|w_hat - w|` over the last [`TAIL_SPAN`] seconds of the trace.
    pub fn tail_error(&self, kind: EstimatorKind) -> Option<f64> {
        let w = self.w_hat(kind)?;
        let end = *self.t.last()?;
        let start = self.t.partition_point(|&t| t < end - TAIL_SPAN);
        let tail = &w[start..];
        Some(tail.iter().map(|v| (v - self.omega).abs()).sum::<f64>() / tail.len() as f64)
    }
}

/// Smallest recorded `t*` with `|w_hat(t) - w| <= tol` for every recorded
/// `t >= t*`; `0` when the whole trace complies, `f64::INFINITY` when the
/// last sample does not.
pub fn settling_time(times: &[f64], w_hat: &[f64], omega: f64, tol: f64) -> Result<f64> {
    if times.is_empty() {
        return Err(Error::EmptyTrace);
    }
    match w_hat.iter().rposition(|w| !((w - omega).abs() <= tol)) {
        None => Ok(0.0),
        Some(k) if k + 1 == times.len() => Ok(f64::INFINITY),
        Some(k) => Ok(times[k + 1]),
    }
}

struct ProposedRun<'a> {
    cfg_d: &'a DifferentiatorConfig,
    cfg_e: &'a EstimatorConfig,
    z: Vec<f64>,
    inject: Vec<f64>,
    stepper: Stepper,
    w2: WindowIntegral,
    w4: WindowIntegral,
    zeta: f64,
    e_gamma: f64,
    branch: Option<Branch>,
    switches: u64,
    trace: ProposedTrace,
}

impl<'a> ProposedRun<'a> {
    fn new(sc: &'a Scenario, capacity: usize) -> Result<Self> {
        let cfg_d = &sc.differentiator;
        let m = cfg_d.order;
        let col = || Vec::with_capacity(capacity);
        Ok(Self {
            cfg_d,
            cfg_e: &sc.estimator,
            z: cfg_d.initial_state(),
            inject: vec![0.0; m],
            stepper: Stepper::new(m),
            w2: WindowIntegral::new(sc.estimator.window, sc.sim.dt, sc.sim.quadrature)?,
            w4: WindowIntegral::new(sc.estimator.window, sc.sim.dt, sc.sim.quadrature)?,
            zeta: sc.estimator.zeta0,
            e_gamma: 0.0,
            branch: None,
            switches: 0,
            trace: ProposedTrace {
                z: (0..m).map(|_| col()).collect(),
                truth: (0..m).map(|_| col()).collect(),
                gamma1_hat: col(),
                gamma2_hat: col(),
                e_gamma: col(),
                zeta_hat: col(),
                w_hat: col(),
                branch: Vec::with_capacity(capacity),
            },
        })
    }

    fn step(
        &mut self,
        signal: &SignalSpec,
        noise: f64,
        scheme: Scheme,
        t: f64,
        dt: f64,
    ) -> Result<()> {
        // the measurement is sampled once per step; the output injection is
        // held over the step and the scheme integrates the integrator chain
        differentiator::injection(
            &self.z,
            t,
            signal.eval(t) + noise,
            self.cfg_d,
            &mut self.inject,
        )?;
        let inject = &self.inject;
        self.stepper.step(scheme, t, dt, &mut self.z, |_, z, dz| {
            differentiator::chain_field(z, inject, dz);
            Ok(())
        })?;
        let t1 = t + dt;
        differentiator::check_state(&self.z, t1)?;

        let z2_delayed = self.w2.delayed();
        let z4_delayed = self.w4.delayed();
        let z2_now = self.z[1].abs();
        let z4_now = self.z[3].abs();
        self.w2.push(z2_now)?;
        self.w4.push(z4_now)?;
        let inputs = AdaptInputs {
            gamma1_hat: self.w2.value(),
            gamma2_hat: self.w4.value(),
            z2_now,
            z2_delayed,
            z4_now,
            z4_delayed,
        };

        if !(self.cfg_e.hold_until_full && !self.w2.is_full()) {
            let cfg_e = self.cfg_e;
            let branch = estimator::adapt_field(self.zeta, &inputs, cfg_e)?.branch;
            self.zeta = step_scalar(scheme, t, dt, self.zeta, |_, zeta| {
                estimator::adapt_field(zeta, &inputs, cfg_e).map(|a| a.rate)
            })?;
            if !(self.zeta.abs() <= ZETA_LIMIT) {
                return Err(Error::ZetaOutOfRange {
                    time: t1,
                    value: self.zeta,
                });
            }
            if self.branch.is_some_and(|b| b != branch) {
                self.switches += 1;
            }
            self.branch = Some(branch);
        }
        self.e_gamma = estimator::residual(self.zeta, inputs.gamma1_hat, inputs.gamma2_hat);
        Ok(())
    }

    fn record(&mut self, signal: &SignalSpec, t: f64) {
        let tr = &mut self.trace;
        for (i, (zc, yc)) in tr.z.iter_mut().zip(tr.truth.iter_mut()).enumerate() {
            zc.push(self.z[i]);
            yc.push(signal.eval_derivative(t, i as u32));
        }
        tr.gamma1_hat.push(self.w2.value());
        tr.gamma2_hat.push(self.w4.value());
        tr.e_gamma.push(self.e_gamma);
        tr.zeta_hat.push(self.zeta);
        tr.w_hat.push(estimator::step_output(self.zeta));
        tr.branch.push(self.branch.unwrap_or(Branch::Excited));
    }
}

struct BaselineRun<'a> {
    cfg: &'a BaselineConfig,
    x: [f64; baseline::STATE_LEN],
    stepper: Stepper,
    min_r: f64,
    trace: BaselineTrace,
}

impl<'a> BaselineRun<'a> {
    fn new(cfg: &'a BaselineConfig, capacity: usize) -> Self {
        Self {
            cfg,
            x: BaselineState::new(cfg).to_array(),
            stepper: Stepper::new(baseline::STATE_LEN),
            min_r: 0.0,
            trace: BaselineTrace {
                h: Vec::with_capacity(capacity),
                w_hat: Vec::with_capacity(capacity),
            },
        }
    }

    fn step(
        &mut self,
        signal: &SignalSpec,
        noise: f64,
        scheme: Scheme,
        t: f64,
        dt: f64,
    ) -> Result<()> {
        let cfg = self.cfg;
        self.stepper.step(scheme, t, dt, &mut self.x, |ts, x, dx| {
            baseline::baseline_field(x, signal.eval(ts) + noise, ts, cfg, dx)
        })?;
        baseline::check_state(&self.x, t + dt)?;
        self.min_r = self.min_r.min(self.x[6]).min(self.x[7]);
        Ok(())
    }

    fn record(&mut self) {
        let h = self.x[8];
        self.trace.h.push(h);
        self.trace.w_hat.push(baseline::baseline_output(h));
    }
}

/// Runs one scenario over `[0, horizon]`.
///
/// Samples are recorded at `t = start_time + k * stride * dt` for `k >= 1`;
/// the initial state is not part of the trace, so a zero horizon yields an empty result.
pub fn run(sc: &Scenario) -> Result<ScenarioResult> {
    let mut warnings = sc.validate()?;
    let sim = &sc.sim;
    let steps = sim.steps()?;
    let dt = sim.dt;
    let stride = sim.record_stride as u64;
    let capacity = (steps / stride) as usize;
    let signal = &sc.signal;

    let mut proposed = if sim.has(EstimatorKind::Proposed) {
        Some(ProposedRun::new(sc, capacity)?)
    } else {
        None
    };
    let mut base = sim
        .has(EstimatorKind::Baseline)
        .then(|| BaselineRun::new(&sc.baseline, capacity));

    let mut t_col = Vec::with_capacity(capacity);
    let mut y_col = Vec::with_capacity(capacity);
    let mut meas_col = Vec::with_capacity(capacity);

    let mut noise_src = NoiseSource::new(&sc.noise);
    let t0 = sim.start_time;
    let mut noise = noise_src.sample(t0);
    for k in 0..steps {
        let t = t0 + k as f64 * dt;
        if let Some(p) = proposed.as_mut() {
            p.step(signal, noise, sim.scheme, t, dt)?;
        }
        if let Some(b) = base.as_mut() {
            b.step(signal, noise, sim.scheme, t, dt)?;
        }
        let t1 = t0 + (k + 1) as f64 * dt;
        noise = noise_src.sample(t1);
        if (k + 1) % stride == 0 {
            let y = signal.eval(t1);
            t_col.push(t1);
            y_col.push(y);
            meas_col.push(y + noise);
            if let Some(p) = proposed.as_mut() {
                p.record(signal, t1);
            }
            if let Some(b) = base.as_mut() {
                b.record();
            }
        }
    }

    let omega = signal.omega;
    let tol = sim.settle_tol;
    let settle = |w: Option<&[f64]>| match w {
        Some(w) if !t_col.is_empty() => settling_time(&t_col, w, omega, tol),
        _ => Ok(f64::INFINITY),
    };
    let settling_proposed = settle(proposed.as_ref().map(|p| p.trace.w_hat.as_slice()))?;
    let settling_baseline = settle(base.as_ref().map(|b| b.trace.w_hat.as_slice()))?;
    if let Some(b) = &base {
        if b.min_r < 0.0 {
            warnings.push(format!(
                "baseline regressor integrator went negative (min r = {:.3e})",
                b.min_r
            ));
        }
    }
    let branch_switches = proposed.as_ref().map_or(0, |p| p.switches);

    Ok(ScenarioResult {
        omega,
        settle_tol: tol,
        t: t_col,
        y: y_col,
        y_meas: meas_col,
        proposed: proposed.map(|p| p.trace),
        baseline: base.map(|b| b.trace),
        settling_proposed,
        settling_baseline,
        branch_switches,
        warnings,
    })
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// Initial `zeta_hat` of the proposed estimator.
    Zeta0,
    /// Initial `h` of the baseline.
    H0,
    /// Noise bound; a noise-free scenario switches to uniform noise.
    Eta,
    Dt,
    /// Regressor window length `r`.
    #[serde(rename = "r")]
    Window,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Zeta0 => "zeta0",
            SweepAxis::H0 => "h0",
            SweepAxis::Eta => "eta",
            SweepAxis::Dt => "dt",
            SweepAxis::Window => "r",
        }
    }

    pub fn apply(&self, sc: &mut Scenario, value: f64) {
        match self {
            SweepAxis::Zeta0 => sc.estimator.zeta0 = value,
            SweepAxis::H0 => sc.baseline.h0 = value,
            SweepAxis::Eta => {
                sc.noise.eta = value;
                if sc.noise.kind == NoiseKind::None && value > 0.0 {
                    sc.noise.kind = NoiseKind::Uniform;
                }
            }
            SweepAxis::Dt => sc.sim.dt = value,
            SweepAxis::Window => sc.estimator.window = value,
        }
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zeta0" | "zeta_hat0" => Ok(SweepAxis::Zeta0),
            "h0" => Ok(SweepAxis::H0),
            "eta" => Ok(SweepAxis::Eta),
            "dt" => Ok(SweepAxis::Dt),
            "r" | "window" => Ok(SweepAxis::Window),
            other => Err(Error::UnknownAxis(other.to_string())),
        }
    }
}

/// Scalar metrics of one run. Missing estimators and never-settled runs
/// serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub settling_proposed: Option<f64>,
    pub settling_baseline: Option<f64>,
    pub final_error_proposed: Option<f64>,
    pub final_error_baseline: Option<f64>,
    pub tail_error_proposed: Option<f64>,
    pub tail_error_baseline: Option<f64>,
    pub branch_switches: u64,
    pub samples: usize,
}

impl RunSummary {
    pub fn of(result: &ScenarioResult) -> Self {
        let finite = |v: f64| v.is_finite().then_some(v);
        let has = |k| result.w_hat(k).is_some();
        Self {
            settling_proposed: has(EstimatorKind::Proposed)
                .then_some(result.settling_proposed)
                .and_then(finite),
            settling_baseline: has(EstimatorKind::Baseline)
                .then_some(result.settling_baseline)
                .and_then(finite),
            final_error_proposed: result.final_error(EstimatorKind::Proposed),
            final_error_baseline: result.final_error(EstimatorKind::Baseline),
            tail_error_proposed: result.tail_error(EstimatorKind::Proposed),
            tail_error_baseline: result.tail_error(EstimatorKind::Baseline),
            branch_switches: result.branch_switches,
            samples: result.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    #[serde(flatten)]
    pub summary: RunSummary,
}

/// Runs `base` once per value of `axis`, in parallel; rows keep input order.
pub fn sweep(base: &Scenario, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepRow>> {
    values
        .par_iter()
        .map(|&value| {
            let mut sc = base.clone();
            axis.apply(&mut sc, value);
            let result = run(&sc)?;
            Ok(SweepRow {
                value,
                summary: RunSummary::of(&result),
            })
        })
        .collect()
}
