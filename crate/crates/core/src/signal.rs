//! Ground-truth biased sinusoid `y(t) = A + B sin(w t + phi0)`, its exact
//! derivatives, and bounded measurement noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the biased sinusoid together with the admissible-set bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    /// Offset `A`.
    pub offset: f64,
    /// Amplitude `B > 0`.
    pub amplitude: f64,
    /// Angular frequency `w` in rad/s.
    pub omega: f64,
    /// Initial phase `phi0` in rad.
    pub phase: f64,
    /// Lower amplitude bound `B_min`.
    #[serde(default = "default_lower_bound")]
    pub amplitude_min: f64,
    /// Lower frequency bound `w_min`; `omega` must be 0 or at least this.
    #[serde(default = "default_lower_bound")]
    pub omega_min: f64,
}

fn default_lower_bound() -> f64 {
    0.01
}

impl SignalSpec {
    pub fn new(offset: f64, amplitude: f64, omega: f64, phase: f64) -> Self {
        Self {
            offset,
            amplitude,
            omega,
            phase,
            amplitude_min: default_lower_bound(),
            omega_min: default_lower_bound(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.offset,
            self.amplitude,
            self.omega,
            self.phase,
            self.amplitude_min,
            self.omega_min,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("signal parameters must be finite"));
        }
        if !(self.amplitude_min > 0.0 && self.amplitude >= self.amplitude_min) {
            return Err(Error::config(format!(
                "amplitude {} must satisfy amplitude >= amplitude_min > 0 (amplitude_min = {})",
                self.amplitude, self.amplitude_min
            )));
        }
        if !(self.omega_min > 0.0) {
            return Err(Error::config("omega_min must be positive"));
        }
        if self.omega != 0.0 && self.omega < self.omega_min {
            return Err(Error::config(format!(
                "omega {} must be 0 or at least omega_min = {}",
                self.omega, self.omega_min
            )));
        }
        Ok(())
    }

    /// Noise-free signal value.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.offset + self.amplitude * (self.omega * t + self.phase).sin()
    }

    /// Exact `order`-th time derivative; order 0 is the signal itself.
    pub fn eval_derivative(&self, t: f64, order: u32) -> f64 {
        if order == 0 {
            return self.eval(t);
        }
        let arg = self.omega * t + self.phase;
        let scale = self.amplitude * self.omega.powi(order as i32);
        let wave = match order % 4 {
            1 => arg.cos(),
            2 => -arg.sin(),
            3 => -arg.cos(),
            _ => arg.sin(),
        };
        scale * wave
    }
}

/// Waveform of the additive measurement noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    #[default]
    None,
    /// Independent uniform samples on `[-eta, eta]`, one per integration step.
    Uniform,
    /// `eta * sin(frequency * t + phase)`.
    Sinusoidal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSpec {
    pub eta: f64,
    pub kind: NoiseKind,
    pub seed: u64,
    pub frequency: f64,
    pub phase: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            eta: 0.0,
            kind: NoiseKind::None,
            seed: 0,
            frequency: 50.0,
            phase: 0.0,
        }
    }
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn uniform(eta: f64, seed: u64) -> Self {
        Self {
            eta,
            kind: NoiseKind::Uniform,
            seed,
            ..Self::default()
        }
    }

    pub fn sinusoidal(eta: f64, frequency: f64, phase: f64) -> Self {
        Self {
            eta,
            kind: NoiseKind::Sinusoidal,
            frequency,
            phase,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::config(format!(
                "noise bound eta = {} must be >= 0",
                self.eta
            )));
        }
        if !(self.frequency.is_finite() && self.phase.is_finite()) {
            return Err(Error::config("noise frequency and phase must be finite"));
        }
        Ok(())
    }
}

/// Stateful noise generator for one measurement stream.
#[derive(Debug, Clone)]
pub struct NoiseSource {
    spec: NoiseSpec,
    rng: ChaCha8Rng,
}

impl NoiseSource {
    pub fn new(spec: &NoiseSpec) -> Self {
        Self {
            spec: *spec,
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
        }
    }

    /// Next noise sample, guaranteed to lie in `[-eta, eta]`.
    pub fn sample(&mut self, t: f64) -> f64 {
        let eta = self.spec.eta;
        if eta == 0.0 {
            return 0.0;
        }
        match self.spec.kind {
            NoiseKind::None => 0.0,
            NoiseKind::Uniform => self.rng.gen_range(-eta..=eta),
            NoiseKind::Sinusoidal => {
                (eta * (self.spec.frequency * t + self.spec.phase).sin()).clamp(-eta, eta)
            }
        }
    }
}

/// Noisy measurement `y(t) + n(t)`.
pub fn measure(signal: &SignalSpec, noise: &mut NoiseSource, t: f64) -> f64 {
    signal.eval(t) + noise.sample(t)
}

/// Known bound `L` on `|y^(m)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeBound {
    pub order: u32,
    pub bound: f64,
}

impl DerivativeBound {
    /// Checks that the bound really holds for `signal`, i.e. `L >= B w^m`.
    pub fn validate(&self, signal: &SignalSpec) -> Result<()> {
        if self.order < 4 {
            return Err(Error::config(format!(
                "derivative order must be >= 4, got {}",
                self.order
            )));
        }
        if !(self.bound > 0.0 && self.bound.is_finite()) {
            return Err(Error::config("derivative bound L must be positive"));
        }
        let peak = signal.amplitude * signal.omega.abs().powi(self.order as i32);
        if peak > self.bound {
            return Err(Error::config(format!(
                "derivative bound L = {} is below B*w^m = {peak} for m = {}",
                self.bound, self.order
            )));
        }
        Ok(())
    }
}
