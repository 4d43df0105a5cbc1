//! Hybrid arbitrary-order differentiator.
//!
//! Before the switch time `T_u` the correction terms have homogeneity degree
//! `alpha > 0`, which pulls arbitrarily large initial errors into a bounded
//! set within a bounded time. From `T_u` on the standard sliding-mode terms
//! take over and make `z_i` exact in finite time. State `z_i` estimates the
//! `(i-1)`-th derivative of the measured signal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// States with a magnitude above this are reported as divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// Sign with `sign(0) = 0`.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Signed power `|x|^a sign(x)`.
///
/// This is the only way fractional powers are evaluated anywhere in the
/// crate: it is odd in `x`, continuous, and defined for negative arguments.
#[inline]
pub fn spow(x: f64, a: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(a).copysign(x)
    }
}

/// Right-continuous switching signal: 0 before `switch_time`, 1 from it on.
#[inline]
pub fn theta(t: f64, switch_time: f64) -> f64 {
    if t >= switch_time {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifferentiatorConfig {
    /// Number of states `m >= 4`.
    pub order: usize,
    /// Sliding-mode gains `kappa_1..kappa_m`, active for `t >= switch_time`.
    pub kappa: Vec<f64>,
    /// Uniform-phase gains `k_1..k_m`, active for `t < switch_time`.
    pub k: Vec<f64>,
    /// Homogeneity degree of the uniform terms.
    pub alpha: f64,
    /// Switch time `T_u`.
    pub switch_time: f64,
    /// Known bound `L` on the `m`-th derivative of the signal.
    pub derivative_bound: f64,
    /// Initial state; empty means all zeros.
    #[serde(default)]
    pub z0: Vec<f64>,
}

impl DifferentiatorConfig {
    /// Fourth-order differentiator with the gains used in the reference
    /// simulation of `4 sin(2t + 2) + 10`.
    pub fn reference() -> Self {
        Self {
            order: 4,
            kappa: vec![16.0, 88.0, 140.0, 110.0],
            k: vec![24.0, 216.0, 864.0, 1296.0],
            alpha: 0.6,
            switch_time: 3.0,
            derivative_bound: 160.0,
            z0: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.order;
        if m < 4 {
            return Err(Error::config(format!(
                "differentiator order must be >= 4, got {m}"
            )));
        }
        if self.kappa.len() != m || self.k.len() != m {
            return Err(Error::config(format!(
                "differentiator of order {m} needs {m} kappa and {m} k gains (got {} and {})",
                self.kappa.len(),
                self.k.len()
            )));
        }
        if self
            .kappa
            .iter()
            .chain(&self.k)
            .any(|g| !(*g > 0.0 && g.is_finite()))
        {
            return Err(Error::config(
                "differentiator gains must be positive and finite",
            ));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::config("differentiator alpha must be positive"));
        }
        if !(self.switch_time > 0.0 && self.switch_time.is_finite()) {
            return Err(Error::config("switch time T_u must be positive"));
        }
        if !self.z0.is_empty() && self.z0.len() != m {
            return Err(Error::config(format!("z0 must have {m} entries")));
        }
        if self.z0.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("z0 must be finite"));
        }
        Ok(())
    }

    pub fn initial_state(&self) -> Vec<f64> {
        if self.z0.is_empty() {
            vec![0.0; self.order]
        } else {
            self.z0.clone()
        }
    }
}

/// Sliding-mode gains derived from the derivative bound `L`.
///
/// Only the fourth-order recipe is known:
/// `kappa_1 = 5 L^(1/4)`, `kappa_2 = 3 L^(1/3) kappa_1^(2/3)`,
/// `kappa_3 = 1.5 L^(1/2) kappa_2^(1/2)`, `kappa_4 = 1.1 L`.
pub fn kappa_from_bound(bound: f64, order: usize) -> Result<Vec<f64>> {
    if order != 4 {
        return Err(Error::config(format!(
            "gain recipe from L is only defined for order 4, got {order}"
        )));
    }
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(Error::config("derivative bound L must be positive"));
    }
    let k1 = 5.0 * bound.powf(0.25);
    let k2 = 3.0 * bound.cbrt() * k1.powf(2.0 / 3.0);
    let k3 = 1.5 * bound.sqrt() * k2.sqrt();
    let k4 = 1.1 * bound;
    Ok(vec![k1, k2, k3, k4])
}

#[derive(Debug, Clone, PartialEq)]
pub struct DifferentiatorState {
    pub z: Vec<f64>,
    pub t: f64,
}

impl DifferentiatorState {
    pub fn new(cfg: &DifferentiatorConfig) -> Self {
        Self {
            z: cfg.initial_state(),
            t: 0.0,
        }
    }
}

/// Rejects NaN/Inf and divergent states, naming the offending variable.
pub fn check_state(z: &[f64], t: f64) -> Result<()> {
    for (i, &v) in z.iter().enumerate() {
        if !v.is_finite() || v.abs() > DIVERGENCE_LIMIT {
            return Err(Error::NonFiniteState {
                time: t,
                variable: format!("z{}", i + 1),
                value: v,
            });
        }
    }
    Ok(())
}

/// Output-injection terms of the field, i.e. everything except the
/// integrator chain `z_{i+1}`: `dz_i = inject_i + z_{i+1}`, `dz_m = inject_m`.
pub fn injection(
    z: &[f64],
    t: f64,
    y_meas: f64,
    cfg: &DifferentiatorConfig,
    out: &mut [f64],
) -> Result<()> {
    let m = cfg.order;
    debug_assert_eq!(z.len(), m);
    debug_assert_eq!(out.len(), m);
    check_state(z, t)?;
    if !y_meas.is_finite() {
        return Err(Error::NonFiniteState {
            time: t,
            variable: "y_meas".into(),
            value: y_meas,
        });
    }
    let err = z[0] - y_meas;
    let mf = m as f64;
    // theta is exactly 0 or 1, so only one family of terms is ever evaluated
    if theta(t, cfg.switch_time) == 1.0 {
        for i in 1..m {
            out[i - 1] = -cfg.kappa[i - 1] * spow(err, (m - i) as f64 / mf);
        }
        out[m - 1] = -cfg.kappa[m - 1] * sign(err);
    } else {
        for i in 1..m {
            out[i - 1] = -cfg.k[i - 1] * spow(err, (mf + cfg.alpha * i as f64) / mf);
        }
        out[m - 1] = -cfg.k[m - 1] * spow(err, 1.0 + cfg.alpha);
    }
    Ok(())
}

/// Adds the integrator chain to held injection terms: `dz = inject + shift(z)`.
#[inline]
pub fn chain_field(z: &[f64], inject: &[f64], dz: &mut [f64]) {
    let m = z.len();
    for i in 0..m - 1 {
        dz[i] = inject[i] + z[i + 1];
    }
    dz[m - 1] = inject[m - 1];
}

/// Time derivative of the differentiator state for measurement `y_meas` at `t`.
pub fn derivative_field(
    z: &[f64],
    t: f64,
    y_meas: f64,
    cfg: &DifferentiatorConfig,
    dz: &mut [f64],
) -> Result<()> {
    injection(z, t, y_meas, cfg, dz)?;
    for i in 0..z.len() - 1 {
        dz[i] += z[i + 1];
    }
    Ok(())
}

/// First time after which `max_i |z_i - y^(i-1)| <= tol` for the rest of the
/// trace; `0` if the whole trace complies and `f64::INFINITY` if the last
/// sample still violates the tolerance.
///
/// `estimates[i]` and `truth[i]` are the columns for state `z_{i+1}`.
pub fn exactness_time(
    times: &[f64],
    estimates: &[Vec<f64>],
    truth: &[Vec<f64>],
    tol: f64,
) -> Result<f64> {
    if times.is_empty() || estimates.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let violates = |k: usize| {
        estimates
            .iter()
            .zip(truth)
            .any(|(est, tr)| !((est[k] - tr[k]).abs() <= tol))
    };
    match (0..times.len()).rev().find(|&k| violates(k)) {
        None => Ok(0.0),
        Some(k) if k + 1 == times.len() => Ok(f64::INFINITY),
        Some(k) => Ok(times[k + 1]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spow_examples() {
        assert!((spow(-8.0, 4.0 / 3.0) + 16.0).abs() < 1e-12);
        assert_eq!(spow(0.0, 0.5), 0.0);
        assert!((spow(9.0, 0.5) - 3.0).abs() < 1e-15);
        assert_eq!(spow(-0.0, 0.5), 0.0);
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(2.0, 3.0), 0.0);
        assert_eq!(theta(4.0, 3.0), 1.0);
        assert_eq!(theta(3.0, 3.0), 1.0);
    }

    #[test]
    fn sign_of_zero_is_zero() {
        assert_eq!(sign(0.0), 0.0);
        assert_eq!(sign(-0.0), 0.0);
        assert_eq!(sign(-2.0), -1.0);
        assert_eq!(sign(1e-300), 1.0);
    }

    #[test]
    fn zero_error_leaves_pure_chain() {
        let cfg = DifferentiatorConfig::reference();
        let z = [1.0, 2.0, 3.0, 4.0];
        let mut dz = [0.0; 4];
        derivative_field(&z, 5.0, 1.0, &cfg, &mut dz).unwrap();
        assert_eq!(dz, [2.0, 3.0, 4.0, 0.0]);
    }

    #[test]
    fn unit_error_sliding_phase() {
        let cfg = DifferentiatorConfig::reference();
        let mut dz = [0.0; 4];
        derivative_field(&[1.0, 0.0, 0.0, 0.0], 5.0, 0.0, &cfg, &mut dz).unwrap();
        assert_eq!(dz, [-16.0, -88.0, -140.0, -110.0]);
    }

    #[test]
    fn unit_error_uniform_phase() {
        let cfg = DifferentiatorConfig::reference();
        let mut dz = [0.0; 4];
        derivative_field(&[1.0, 0.0, 0.0, 0.0], 1.0, 0.0, &cfg, &mut dz).unwrap();
        assert_eq!(dz, [-24.0, -216.0, -864.0, -1296.0]);
    }

    #[test]
    fn uniform_exponents() {
        let cfg = DifferentiatorConfig::reference();
        let mut dz = [0.0; 4];
        derivative_field(&[-2.0, 0.0, 0.0, 0.0], 0.0, 0.0, &cfg, &mut dz).unwrap();
        for i in 1..=4 {
            let expected = cfg.k[i - 1] * 2f64.powf(1.0 + 0.6 * i as f64 / 4.0);
            assert!((dz[i - 1] - expected).abs() < 1e-9 * expected, "z{i}");
        }
    }

    #[test]
    fn nonfinite_inputs_rejected() {
        let cfg = DifferentiatorConfig::reference();
        let mut dz = [0.0; 4];
        let err = derivative_field(&[f64::NAN, 0.0, 0.0, 0.0], 0.0, 0.0, &cfg, &mut dz);
        assert!(matches!(err, Err(Error::NonFiniteState { .. })));
        let err = derivative_field(&[0.0; 4], 0.0, f64::INFINITY, &cfg, &mut dz);
        assert!(matches!(err, Err(Error::NonFiniteState { .. })));
        let err = derivative_field(&[0.0, 0.0, 2e12, 0.0], 0.0, 0.0, &cfg, &mut dz);
        match err {
            Err(Error::NonFiniteState { variable, .. }) => assert_eq!(variable, "z3"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = DifferentiatorConfig::reference();
        assert!(cfg.validate().is_ok());
        cfg.kappa[2] = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = DifferentiatorConfig::reference();
        cfg.order = 3;
        assert!(cfg.validate().is_err());
        let mut cfg = DifferentiatorConfig::reference();
        cfg.z0 = vec![1.0, 2.0];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn kappa_recipe() {
        let g = kappa_from_bound(160.0, 4).unwrap();
        let k1 = 5.0 * 160f64.powf(0.25);
        assert!((g[0] - k1).abs() < 1e-12);
        assert!((g[3] - 176.0).abs() < 1e-12);
        assert!(kappa_from_bound(160.0, 5).is_err());
    }

    #[test]
    fn exactness_time_edges() {
        let t = vec![0.1, 0.2, 0.3];
        let truth = vec![vec![1.0, 2.0, 3.0]];
        assert_eq!(exactness_time(&t, &truth, &truth, 1e-9).unwrap(), 0.0);
        let late = vec![vec![5.0, 2.0, 3.0]];
        assert_eq!(exactness_time(&t, &late, &truth, 1e-9).unwrap(), 0.2);
        let never = vec![vec![1.0, 2.0, 9.0]];
        assert_eq!(
            exactness_time(&t, &never, &truth, 1e-9).unwrap(),
            f64::INFINITY
        );
        assert_eq!(exactness_time(&[], &[], &[], 1.0), Err(Error::EmptyTrace));
    }

    #[test]
    fn held_injection_plus_chain_is_the_field() {
        let cfg = DifferentiatorConfig::reference();
        let z = [9.5, -3.0, 2.0, 40.0];
        for t in [0.5, 3.0, 7.0] {
            let (mut full, mut inj, mut parts) = ([0.0; 4], [0.0; 4], [0.0; 4]);
            derivative_field(&z, t, 10.0, &cfg, &mut full).unwrap();
            injection(&z, t, 10.0, &cfg, &mut inj).unwrap();
            chain_field(&z, &inj, &mut parts);
            assert_eq!(full, parts);
            assert_eq!(parts[0], inj[0] + z[1]);
        }
    }

    proptest! {
        #[test]
        fn spow_is_odd(x in -1e6f64..1e6, a in 0.01f64..4.0) {
            prop_assert_eq!(spow(-x, a), -spow(x, a));
        }

        #[test]
        fn spow_preserves_sign(x in -1e6f64..1e6, a in 0.01f64..4.0) {
            prop_assert!(spow(x, a) * x >= 0.0);
        }
    }
}
