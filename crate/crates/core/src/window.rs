//! Sliding-window absolute-value integrals `int_{t-r}^{t} |u(tau)| dtau`.
//!
//! Samples older than the start of the stream read as zero, so the window is
//! well defined from the first push on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::SignalSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrature {
    /// `dt * sum` of the last `N` samples.
    #[default]
    LeftRectangle,
    /// Trapezoid rule over the last `N + 1` samples.
    Trapezoid,
}

/// Slack, in steps, allowed when checking that a duration is a multiple of `dt`.
const GRID_TOL: f64 = 1e-4;

/// Number of `dt` steps in `span`, or an error when `span` is off the grid.
pub fn steps_in(span: f64, dt: f64, what: &str) -> Result<usize> {
    let n = span / dt;
    let rounded = n.round();
    if !((n - rounded).abs() <= GRID_TOL) {
        return Err(Error::config(format!(
            "{what} = {span} is not an integer multiple of dt = {dt}"
        )));
    }
    Ok(rounded as usize)
}

/// Ring-buffered sliding integral with access to the `r`-delayed sample.
#[derive(Debug, Clone)]
pub struct WindowIntegral {
    window: f64,
    dt: f64,
    rule: Quadrature,
    buffer: Vec<f64>,
    head: usize,
    sum: f64,
    filled: usize,
    since_anchor: usize,
    newest: f64,
    last_evicted: f64,
}

impl WindowIntegral {
    pub fn new(window: f64, dt: f64, rule: Quadrature) -> Result<Self> {
        if !(window > 0.0) {
            return Err(Error::NonPositiveWindow(window));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::config(format!(
                "sample period dt = {dt} must be positive"
            )));
        }
        let n = steps_in(window, dt, "window length r")?;
        if n == 0 {
            return Err(Error::config(format!(
                "window length r = {window} is shorter than dt = {dt}"
            )));
        }
        Ok(Self {
            window,
            dt,
            rule,
            buffer: vec![0.0; n],
            head: 0,
            sum: 0.0,
            filled: 0,
            since_anchor: 0,
            newest: 0.0,
            last_evicted: 0.0,
        })
    }

    /// Appends `|u|` and returns the sample that dropped out of the window.
    pub fn push(&mut self, u_abs: f64) -> Result<f64> {
        if !(u_abs.is_finite() && u_abs >= 0.0) {
            return Err(Error::NonFiniteSample(u_abs));
        }
        let evicted = std::mem::replace(&mut self.buffer[self.head], u_abs);
        self.head += 1;
        if self.head == self.buffer.len() {
            self.head = 0;
        }
        self.sum += u_abs - evicted;
        self.filled = self.filled.saturating_add(1);
        self.newest = u_abs;
        self.last_evicted = evicted;
        self.since_anchor += 1;
        // running sums drift over 10^7 pushes; periodically re-sum exactly
        if self.since_anchor >= self.buffer.len() {
            self.sum = self.buffer.iter().sum();
            self.since_anchor = 0;
        }
        Ok(evicted)
    }

    /// Current integral estimate, never negative.
    pub fn value(&self) -> f64 {
        let rect = self.dt * self.sum;
        let v = match self.rule {
            Quadrature::LeftRectangle => rect,
            Quadrature::Trapezoid => rect + 0.5 * self.dt * (self.last_evicted - self.newest),
        };
        v.max(0.0)
    }

    /// The sample from `r` seconds ago, i.e. the one the next push evicts;
    /// zero while the window is still filling.
    pub fn delayed(&self) -> f64 {
        self.buffer[self.head]
    }

    /// Window length in samples, `N = r / dt`.
    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filled == 0
    }

    pub fn filled(&self) -> usize {
        self.filled
    }

    pub fn is_full(&self) -> bool {
        self.filled >= self.buffer.len()
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
}

/// Lower bound on the first windowed regressor once the differentiator is
/// exact: `2B` when the window spans at least half a period, otherwise
/// `2B (1 - |cos(r w / 2)|)`, and 0 for a constant signal.
pub fn pe_lower_bound(signal: &SignalSpec, window: f64) -> Result<f64> {
    if !(window > 0.0) {
        return Err(Error::NonPositiveWindow(window));
    }
    let w = signal.omega.abs();
    let b = signal.amplitude;
    if w == 0.0 {
        Ok(0.0)
    } else if window >= std::f64::consts::PI / w {
        Ok(2.0 * b)
    } else {
        Ok(2.0 * b * (1.0 - (window * w / 2.0).cos().abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_stream_integrates_to_c_times_r() {
        let mut wi = WindowIntegral::new(1.0, 1e-3, Quadrature::LeftRectangle).unwrap();
        for _ in 0..2500 {
            wi.push(3.0).unwrap();
        }
        assert!((wi.value() - 3.0).abs() <= 3.0 * 1e-3);
        assert_eq!(wi.delayed(), 3.0);
    }

    #[test]
    fn zero_stream_stays_zero() {
        let mut wi = WindowIntegral::new(0.5, 1e-2, Quadrature::LeftRectangle).unwrap();
        for _ in 0..500 {
            wi.push(0.0).unwrap();
            assert_eq!(wi.value(), 0.0);
        }
    }

    #[test]
    fn delayed_sample_semantics() {
        let dt = 0.1;
        let mut wi = WindowIntegral::new(1.0, dt, Quadrature::LeftRectangle).unwrap();
        assert_eq!(wi.delayed(), 0.0);
        let n = wi.len();
        assert_eq!(n, 10);
        for k in 0..n {
            wi.push(k as f64 * dt).unwrap();
            if k + 1 < n {
                assert_eq!(wi.delayed(), 0.0);
            }
        }
        // the first ramp sample, which is 0
        assert_eq!(wi.delayed(), 0.0);
        wi.push(5.0).unwrap();
        assert!((wi.delayed() - dt).abs() < 1e-15);
    }

    #[test]
    fn push_rejects_bad_samples() {
        let mut wi = WindowIntegral::new(1.0, 0.1, Quadrature::LeftRectangle).unwrap();
        assert!(matches!(wi.push(f64::NAN), Err(Error::NonFiniteSample(_))));
        assert!(matches!(wi.push(-1.0), Err(Error::NonFiniteSample(_))));
    }

    #[test]
    fn construction_checks() {
        assert!(matches!(
            WindowIntegral::new(0.0, 0.1, Quadrature::LeftRectangle),
            Err(Error::NonPositiveWindow(_))
        ));
        assert!(WindowIntegral::new(1.05, 0.1, Quadrature::LeftRectangle).is_err());
        assert_eq!(
            WindowIntegral::new(1.0, 1e-6, Quadrature::LeftRectangle)
                .unwrap()
                .len(),
            1_000_000
        );
    }

    #[test]
    fn trapezoid_is_exact_for_linear_ramp() {
        let dt = 0.01;
        let mut wi = WindowIntegral::new(1.0, dt, Quadrature::Trapezoid).unwrap();
        let mut t = 0.0;
        for k in 0..=300 {
            t = k as f64 * dt;
            wi.push(t).unwrap();
        }
        // int_{t-1}^{t} tau dtau = t - 1/2
        assert!((wi.value() - (t - 0.5)).abs() < 1e-9);
    }

    #[test]
    fn pe_bound_examples() {
        let s = SignalSpec::new(10.0, 4.0, 2.0, 2.0);
        let b = pe_lower_bound(&s, 1.0).unwrap();
        assert!((b - 8.0 * (1.0 - 1f64.cos())).abs() < 1e-12);
        assert!((b - 3.6775).abs() < 1e-3);
        assert_eq!(pe_lower_bound(&s, 2.0).unwrap(), 8.0);
        let flat = SignalSpec::new(10.0, 4.0, 0.0, 0.0);
        assert_eq!(pe_lower_bound(&flat, 1.0).unwrap(), 0.0);
        assert!(matches!(
            pe_lower_bound(&s, -1.0),
            Err(Error::NonPositiveWindow(_))
        ));
    }

    /// Composite Simpson quadrature of `8 |cos(2 tau + 2)|` over `[a, b]`,
    /// split at the kinks of `|cos|` so each piece is smooth.
    fn simpson_abs_cos(a: f64, b: f64) -> f64 {
        let f = |x: f64| 8.0 * (2.0 * x + 2.0).cos().abs();
        let mut cuts = vec![a];
        // zeros of cos(2x + 2): x = (pi/2 + k pi - 2) / 2
        let mut k = ((2.0 * a + 2.0 - std::f64::consts::FRAC_PI_2) / std::f64::consts::PI).floor();
        loop {
            let z = (std::f64::consts::FRAC_PI_2 + k * std::f64::consts::PI - 2.0) / 2.0;
            if z >= b {
                break;
            }
            if z > a {
                cuts.push(z);
            }
            k += 1.0;
        }
        cuts.push(b);
        cuts.windows(2)
            .map(|w| {
                let (lo, hi) = (w[0], w[1]);
                let n = 200;
                let h = (hi - lo) / n as f64;
                let mut s = f(lo) + f(hi);
                for i in 1..n {
                    s += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                s * h / 3.0
            })
            .sum()
    }

    #[test]
    fn cosine_window_minimum_matches_quadrature() {
        let dt = 1e-4;
        let r = 1.0;
        let mut wi = WindowIntegral::new(r, dt, Quadrature::LeftRectangle).unwrap();
        let mut min_push = f64::INFINITY;
        let mut max_push: f64 = 0.0;
        let steps = 60_000;
        for k in 1..=steps {
            let t = k as f64 * dt;
            wi.push(8.0 * (2.0 * t + 2.0).cos().abs()).unwrap();
            if t >= r {
                min_push = min_push.min(wi.value());
                max_push = max_push.max(wi.value());
            }
        }
        // oracle: quadrature over a fine grid of window placements
        let mut min_q = f64::INFINITY;
        let mut max_q: f64 = 0.0;
        let mut t = r;
        while t <= steps as f64 * dt {
            let v = simpson_abs_cos(t - r, t);
            min_q = min_q.min(v);
            max_q = max_q.max(v);
            t += 1e-3;
        }
        assert!(
            (min_q - 8.0 * (1.0 - 1f64.cos())).abs() < 1e-4,
            "oracle min {min_q}"
        );
        assert!(
            (max_q - 8.0 * 1f64.sin()).abs() < 1e-4,
            "oracle max {max_q}"
        );
        assert!((min_push - min_q).abs() < 2e-3, "{min_push} vs {min_q}");
        assert!((max_push - max_q).abs() < 2e-3, "{max_push} vs {max_q}");
    }

    proptest! {
        #[test]
        fn matches_brute_force(samples in proptest::collection::vec(0.0f64..10.0, 1..2000),
                               n in 1usize..300) {
            let dt = 0.01;
            let mut wi = WindowIntegral::new(n as f64 * dt, dt, Quadrature::LeftRectangle).unwrap();
            for (k, &u) in samples.iter().enumerate() {
                wi.push(u).unwrap();
                let lo = (k + 1).saturating_sub(n);
                let brute: f64 = samples[lo..=k].iter().sum::<f64>() * dt;
                let tol = 1e-9 * brute.abs().max(1e-300);
                prop_assert!((wi.value() - brute).abs() <= tol,
                    "k={} value={} brute={}", k, wi.value(), brute);
                prop_assert!(wi.value() <= n as f64 * dt * 10.0);
            }
        }
    }
}
