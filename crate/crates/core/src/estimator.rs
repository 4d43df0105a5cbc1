//! Two-branch fixed-time adaptive law for the squared frequency `zeta = w^2`.
//!
//! While the first regressor is excited (`gamma1_hat > epsilon`) the law
//! forces the residual `e = zeta_hat * gamma1_hat - gamma2_hat` to obey
//! `de/dt = -alpha1 [e]^(1+q/p) - beta1 [e]^(1-q/p)`, which reaches zero in a
//! time bounded independently of `e(0)`. Otherwise `zeta_hat` itself is driven
//! to zero by the same fixed-time field, which is the right answer for `w = 0`.

use serde::{Deserialize, Serialize};

use crate::differentiator::spow;
use crate::error::{Error, Result};

/// `|zeta_hat|` beyond this aborts the run.
pub const ZETA_LIMIT: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    pub alpha1: f64,
    pub beta1: f64,
    /// Odd positive integer.
    pub p: u32,
    /// Odd positive integer with `q < 2p`.
    pub q: u32,
    /// Excitation threshold on `gamma1_hat`.
    pub epsilon: f64,
    /// Regressor window length `r` in seconds.
    pub window: f64,
    /// Initial estimate `zeta_hat(0)`.
    pub zeta0: f64,
    /// Keep `zeta_hat` frozen until the window has been filled once.
    #[serde(default = "default_true")]
    pub hold_until_full: bool,
}

fn default_true() -> bool {
    true
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            alpha1: 1.0,
            beta1: 1.0,
            p: 3,
            q: 1,
            epsilon: 0.01,
            window: 1.0,
            zeta0: 1.0,
            hold_until_full: true,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha1 > 0.0
            && self.beta1 > 0.0
            && self.alpha1.is_finite()
            && self.beta1.is_finite())
        {
            return Err(Error::config(
                "adaptation gains alpha1, beta1 must be positive",
            ));
        }
        if self.p.is_multiple_of(2) || self.q.is_multiple_of(2) {
            return Err(Error::config(format!(
                "p = {} and q = {} must both be odd",
                self.p, self.q
            )));
        }
        if !(self.q > 0 && self.q < 2 * self.p) {
            return Err(Error::config(format!(
                "exponents need 0 < q < 2p (p = {}, q = {})",
                self.p, self.q
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::config(
                "excitation threshold epsilon must be positive",
            ));
        }
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(Error::NonPositiveWindow(self.window));
        }
        if !(self.zeta0.is_finite() && self.zeta0.abs() <= ZETA_LIMIT) {
            return Err(Error::config(format!(
                "zeta0 = {} is out of range",
                self.zeta0
            )));
        }
        Ok(())
    }

    fn ratio(&self) -> f64 {
        self.q as f64 / self.p as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Excited,
    Unexcited,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorState {
    pub zeta_hat: f64,
    pub w_hat: f64,
    pub branch: Branch,
    pub e_gamma: f64,
}

impl EstimatorState {
    pub fn new(cfg: &EstimatorConfig) -> Self {
        Self {
            zeta_hat: cfg.zeta0,
            w_hat: step_output(cfg.zeta0),
            branch: Branch::Excited,
            e_gamma: 0.0,
        }
    }

    pub fn set_zeta(&mut self, zeta_hat: f64) {
        self.zeta_hat = zeta_hat;
        self.w_hat = step_output(zeta_hat);
    }
}

/// Regressor residual `zeta_hat * gamma1_hat - gamma2_hat`.
#[inline]
pub fn residual(zeta_hat: f64, gamma1_hat: f64, gamma2_hat: f64) -> f64 {
    zeta_hat * gamma1_hat - gamma2_hat
}

/// Window integrals and the samples entering/leaving them at time `t`.
/// Derivative samples may be signed; the law uses their magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AdaptInputs {
    pub gamma1_hat: f64,
    pub gamma2_hat: f64,
    pub z2_now: f64,
    pub z2_delayed: f64,
    pub z4_now: f64,
    pub z4_delayed: f64,
}

impl AdaptInputs {
    fn check(&self) -> Result<()> {
        let named = [
            ("gamma1_hat", self.gamma1_hat),
            ("gamma2_hat", self.gamma2_hat),
            ("z2_now", self.z2_now),
            ("z2_delayed", self.z2_delayed),
            ("z4_now", self.z4_now),
            ("z4_delayed", self.z4_delayed),
        ];
        match named.iter().find(|(_, v)| !v.is_finite()) {
            Some((name, _)) => Err(Error::NonFiniteInput(name)),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adaptation {
    /// `d zeta_hat / dt`.
    pub rate: f64,
    pub branch: Branch,
    pub e_gamma: f64,
}

/// Right-hand side of the adaptive law at `zeta_hat`.
pub fn adapt_field(
    zeta_hat: f64,
    inputs: &AdaptInputs,
    cfg: &EstimatorConfig,
) -> Result<Adaptation> {
    if !zeta_hat.is_finite() {
        return Err(Error::NonFiniteInput("zeta_hat"));
    }
    inputs.check()?;
    let ratio = cfg.ratio();
    let e_gamma = residual(zeta_hat, inputs.gamma1_hat, inputs.gamma2_hat);
    if inputs.gamma1_hat > cfg.epsilon {
        let d2 = inputs.z2_now.abs() - inputs.z2_delayed.abs();
        let d4 = inputs.z4_now.abs() - inputs.z4_delayed.abs();
        let drive =
            cfg.alpha1 * spow(e_gamma, 1.0 + ratio) + cfg.beta1 * spow(e_gamma, 1.0 - ratio);
        Ok(Adaptation {
            rate: -(drive + zeta_hat * d2 - d4) / inputs.gamma1_hat,
            branch: Branch::Excited,
            e_gamma,
        })
    } else {
        Ok(Adaptation {
            rate: -cfg.alpha1 * spow(zeta_hat, 1.0 + ratio)
                - cfg.beta1 * spow(zeta_hat, 1.0 - ratio),
            branch: Branch::Unexcited,
            e_gamma,
        })
    }
}

/// Upper bound on the time the residual field needs to reach zero from any
/// initial value: `pi mu / (2 sqrt(a b))` with `mu = 2p/q`,
/// `a = 2^(1+q/2p) alpha1`, `b = 2^(1-q/2p) beta1`.
pub fn settling_bound(cfg: &EstimatorConfig) -> f64 {
    let mu = 2.0 * cfg.p as f64 / cfg.q as f64;
    let half = cfg.q as f64 / (2.0 * cfg.p as f64);
    let a = 2f64.powf(1.0 + half) * cfg.alpha1;
    let b = 2f64.powf(1.0 - half) * cfg.beta1;
    std::f64::consts::PI * mu / (2.0 * (a * b).sqrt())
}

/// Frequency estimate `|zeta_hat|^(1/2)`.
#[inline]
pub fn step_output(zeta_hat: f64) -> f64 {
    zeta_hat.abs().sqrt()
}

/// The isolated residual field `-alpha1 [e]^(1+q/p) - beta1 [e]^(1-q/p)`.
pub fn residual_field(e: f64, cfg: &EstimatorConfig) -> f64 {
    let ratio = cfg.ratio();
    -cfg.alpha1 * spow(e, 1.0 + ratio) - cfg.beta1 * spow(e, 1.0 - ratio)
}
