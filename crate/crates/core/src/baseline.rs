//! Finite-time Volterra-kernel frequency estimator with a second-order
//! sliding-mode adaptation, used as the comparison method.
//!
//! The measurement is filtered through kernels `F_j`, `F_jk` that vanish at
//! `t = 0`; three first-order filters per pole `b_j` produce regressors whose
//! combination exposes `h = w^2`. A super-twisting loop on `R = r1 - r2 h`
//! drives the estimate.

use serde::{Deserialize, Serialize};

use crate::differentiator::{sign, spow};
use crate::error::{Error, Result};

/// Number of scalar states: six filters, two leaky integrators, `h`, `y_sm`.
pub const STATE_LEN: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineConfig {
    /// Kernel poles `b_1, b_2, b_3`, positive and distinct.
    pub poles: [f64; 3],
    /// Kernel rate `b_bar`.
    pub rate: f64,
    /// Leakage gain `g` of the regressor integrators.
    pub leakage: f64,
    /// Auxiliary gain `g_a`. Stored for completeness; it does not enter the field.
    #[serde(default)]
    pub aux_gain: f64,
    /// Excitation threshold `delta_eps` on `r2`.
    pub pe_threshold: f64,
    /// Super-twisting proportional gain `L1`.
    pub l1: f64,
    /// Super-twisting integral gain `L2`.
    pub l2: f64,
    /// Initial estimate `h(0)`.
    pub h0: f64,
}

impl BaselineConfig {
    /// Light-leakage parameter set.
    pub fn text_preset() -> Self {
        Self {
            poles: [1.0, 2.0, 3.0],
            rate: 2.5,
            leakage: 0.1,
            aux_gain: 25.0,
            pe_threshold: 0.001,
            l1: 1.5,
            l2: 1.1,
            h0: 1.0,
        }
    }

    /// Reference-script parameter set for the same signal.
    pub fn script_preset() -> Self {
        Self {
            leakage: 1.0,
            aux_gain: 0.0,
            l1: 10.0,
            l2: 2.0,
            h0: 5e6,
            ..Self::text_preset()
        }
    }

    /// Parameter set of the `2 + 3 sin(4t + pi/4)` example.
    pub fn example3_preset() -> Self {
        Self {
            poles: [1.0, 2.0, 3.0],
            rate: 2.5,
            leakage: 3.0,
            aux_gain: 0.0,
            pe_threshold: 1e-4,
            l1: 30.0,
            l2: 2.0,
            h0: 5.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [b1, b2, b3] = self.poles;
        if self.poles.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
            return Err(Error::config("kernel poles must be positive"));
        }
        if b1 == b2 || b2 == b3 || b1 == b3 {
            return Err(Error::config("kernel poles must be pairwise distinct"));
        }
        let gains = [self.rate, self.leakage, self.pe_threshold, self.l1, self.l2];
        if gains.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
            return Err(Error::config(
                "baseline rate, leakage, threshold and sliding-mode gains must be positive",
            ));
        }
        if !(self.aux_gain.is_finite() && self.aux_gain >= 0.0) {
            return Err(Error::config("aux_gain must be finite and non-negative"));
        }
        if !self.h0.is_finite() {
            return Err(Error::config("h0 must be finite"));
        }
        Ok(())
    }
}

/// Kernel values at one instant. `f` is shared by all poles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernels {
    pub f: f64,
    /// `fk[j][k - 1]` is `F_{j,k}` for pole `j` and power `k = 1..=3`.
    pub fk: [[f64; 3]; 3],
}

pub fn kernels(t: f64, cfg: &BaselineConfig) -> Kernels {
    let b = cfg.rate;
    let e1 = (-b * t).exp();
    let e2 = (-2.0 * b * t).exp();
    let e3 = (-3.0 * b * t).exp();
    let f = 1.0 - 3.0 * e1 + 3.0 * e2 - e3;
    let mut fk = [[0.0; 3]; 3];
    for (j, &bj) in cfg.poles.iter().enumerate() {
        let (c0, c1, c2, c3) = (bj, bj - b, bj - 2.0 * b, bj - 3.0 * b);
        let (mut p0, mut p1, mut p2, mut p3) = (1.0, 1.0, 1.0, 1.0);
        for slot in fk[j].iter_mut() {
            p0 *= c0;
            p1 *= c1;
            p2 *= c2;
            p3 *= c3;
            *slot = p0 - 3.0 * p1 * e1 + 3.0 * p2 * e2 - p3 * e3;
        }
    }
    Kernels { f, fk }
}

/// Named view of the baseline state vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineState {
    /// `xi_11, xi_13, xi_21, xi_23, xi_31, xi_33`.
    pub xi: [f64; 6],
    pub r1: f64,
    pub r2: f64,
    /// Squared-frequency estimate.
    pub h: f64,
    /// Sliding-mode auxiliary state.
    pub y_sm: f64,
}

impl BaselineState {
    pub fn new(cfg: &BaselineConfig) -> Self {
        Self {
            xi: [0.0; 6],
            r1: 0.0,
            r2: 0.0,
            h: cfg.h0,
            y_sm: 0.0,
        }
    }

    pub fn to_array(&self) -> [f64; STATE_LEN] {
        let x = &self.xi;
        [
            x[0], x[1], x[2], x[3], x[4], x[5], self.r1, self.r2, self.h, self.y_sm,
        ]
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Self {
            xi: [s[0], s[1], s[2], s[3], s[4], s[5]],
            r1: s[6],
            r2: s[7],
            h: s[8],
            y_sm: s[9],
        }
    }
}

const STATE_NAMES: [&str; STATE_LEN] = [
    "xi11", "xi13", "xi21", "xi23", "xi31", "xi33", "r1", "r2", "h", "y_sm",
];

/// Checks a baseline state vector for NaN/Inf, naming the offending entry.
pub fn check_state(x: &[f64], t: f64) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFiniteState {
            time: t,
            variable: STATE_NAMES[i].into(),
            value: x[i],
        }),
        None => Ok(()),
    }
}

/// Time derivative of the baseline state for measurement `y` at `t`.
pub fn baseline_field(
    x: &[f64],
    y: f64,
    t: f64,
    cfg: &BaselineConfig,
    dx: &mut [f64],
) -> Result<()> {
    debug_assert_eq!(x.len(), STATE_LEN);
    check_state(x, t)?;
    if !y.is_finite() {
        return Err(Error::NonFiniteState {
            time: t,
            variable: "y_meas".into(),
            value: y,
        });
    }
    let k = kernels(t, cfg);
    let xi = &x[..6];
    let (r1, r2, h, y_sm) = (x[6], x[7], x[8], x[9]);

    let mut ka = [0.0; 3];
    let mut kb = [0.0; 3];
    let mut kd = [0.0; 3];
    for j in 0..3 {
        let bj = cfg.poles[j];
        let (xi1, xi3) = (xi[2 * j], xi[2 * j + 1]);
        dx[2 * j] = k.fk[j][0] * y - bj * xi1;
        dx[2 * j + 1] = k.fk[j][2] * y - bj * xi3;
        ka[j] = xi3 - k.fk[j][1] * y;
        kb[j] = k.fk[j][0];
        kd[j] = xi1 - k.f * y;
    }
    let comb = [kb[2] - kb[1], kb[0] - kb[2], kb[1] - kb[0]];
    let k1: f64 = ka.iter().zip(&comb).map(|(a, c)| a * c).sum();
    let k2: f64 = kd.iter().zip(&comb).map(|(a, c)| a * c).sum();

    let dr1 = k1.abs() - cfg.leakage * r1;
    let dr2 = k2.abs() - cfg.leakage * r2;
    dx[6] = dr1;
    dx[7] = dr2;

    let slide = r1 - r2 * h;
    dx[8] = if r2 > cfg.pe_threshold {
        (y_sm + cfg.l1 * spow(slide, 0.5) - h * dr2 + dr1) / r2
    } else {
        0.0
    };
    // keeps integrating even while h is frozen
    dx[9] = cfg.l2 * sign(slide);
    Ok(())
}

/// Frequency estimate `|h|^(1/2)`.
#[inline]
pub fn baseline_output(h: f64) -> f64 {
    h.abs().sqrt()
}
