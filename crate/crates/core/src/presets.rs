//! Built-in scenarios: the `4 sin(2t + 2) + 10` reference runs for both
//! estimators, their noisy variants, the five-initialization study of the
//! `2 + 3 sin(4t + pi/4)` example, and a zero-frequency check.

use std::f64::consts::FRAC_PI_4;

use crate::baseline::BaselineConfig;
use crate::differentiator::{kappa_from_bound, DifferentiatorConfig};
use crate::estimator::EstimatorConfig;
use crate::integrate::Scheme;
use crate::signal::{NoiseSpec, SignalSpec};
use crate::sim::{EstimatorKind, Scenario, SimConfig};
use crate::window::Quadrature;

/// `zeta_hat(0) = h(0) = 1`, i.e. an initial frequency error of -1.
pub const SMALL_INIT: f64 = 1.0;
/// `zeta_hat(0) = h(0) = 5e6`, i.e. an initial frequency error of about 2234.
pub const LARGE_INIT: f64 = 5e6;
/// Noise bound of the noisy comparison runs.
pub const NOISE_ETA: f64 = 0.25;
pub const NOISE_SEED: u64 = 20_200_601;

/// Nominal initial errors `h(0)^(1/2) - w` of the five example-3 scenarios
/// (a)..(e). The script for (a) starts from `h(0) = 5^(1/2)`.
pub const EXAMPLE3_INITIAL_ERRORS: [f64; 5] = [-1.7, 17.0, 7e4, 2.2e5, 7e6];
/// Horizon of the example-3 runs, seconds; long enough to time scenario (d).
pub const EXAMPLE3_HORIZON: f64 = 1000.0;
/// Step of the example-3 runs; settling times agree with `dt = 1e-6` to ~0.1%.
pub const EXAMPLE3_DT: f64 = 1e-5;

pub fn reference_signal() -> SignalSpec {
    SignalSpec::new(10.0, 4.0, 2.0, 2.0)
}

pub fn example3_signal() -> SignalSpec {
    SignalSpec::new(2.0, 3.0, 4.0, FRAC_PI_4)
}

/// Initial `h` of example-3 scenario `case`. Scenario (a) uses the script's
/// literal `5^(1/2)`; the others are `(w + err)^2`.
pub fn example3_h0(case: usize) -> f64 {
    match case {
        0 => 5f64.sqrt(),
        _ => (example3_signal().omega + EXAMPLE3_INITIAL_ERRORS[case]).powi(2),
    }
}

fn sim(horizon: f64, estimators: Vec<EstimatorKind>) -> SimConfig {
    SimConfig {
        dt: 1e-6,
        horizon,
        scheme: Scheme::Euler,
        estimators,
        record_stride: 100,
        settle_tol: 0.02,
        quadrature: Quadrature::LeftRectangle,
        start_time: 0.0,
    }
}

fn estimator(zeta0: f64) -> EstimatorConfig {
    EstimatorConfig {
        zeta0,
        ..EstimatorConfig::default()
    }
}

/// Proposed estimator on the reference signal, reference gains, 10 s.
pub fn proposed(zeta0: f64) -> Scenario {
    Scenario {
        signal: reference_signal(),
        noise: NoiseSpec::none(),
        differentiator: DifferentiatorConfig::reference(),
        estimator: estimator(zeta0),
        baseline: BaselineConfig::text_preset(),
        sim: sim(10.0, vec![EstimatorKind::Proposed]),
    }
}

/// Proposed estimator with the sliding-mode gains computed from `L = 160`
/// and `T_u = 1`, as in the reference script.
pub fn proposed_script_gains(zeta0: f64) -> Scenario {
    let mut sc = proposed(zeta0);
    sc.differentiator.kappa = kappa_from_bound(160.0, 4).expect("order-4 recipe");
    sc.differentiator.switch_time = 1.0;
    sc
}

/// Baseline with the light-leakage set (g = 0.1, L1 = 1.5, L2 = 1.1), 40 s.
pub fn baseline_text(h0: f64) -> Scenario {
    let mut sc = proposed(SMALL_INIT);
    sc.baseline = BaselineConfig {
        h0,
        ..BaselineConfig::text_preset()
    };
    sc.sim = sim(40.0, vec![EstimatorKind::Baseline]);
    sc
}

/// Baseline with the reference-script set (g = 1, L1 = 10, L2 = 2), 40 s.
pub fn baseline_script(h0: f64) -> Scenario {
    let mut sc = baseline_text(h0);
    sc.baseline = BaselineConfig {
        h0,
        ..BaselineConfig::script_preset()
    };
    script_clock(&mut sc);
    sc
}

/// The scripts label their initial state `t = dt`.
fn script_clock(sc: &mut Scenario) {
    sc.sim.start_time = sc.sim.dt;
}

/// Both estimators side by side from the same initial frequency error.
pub fn comparison(init: f64, noise: NoiseSpec) -> Scenario {
    let mut sc = baseline_text(init);
    sc.estimator.zeta0 = init;
    sc.noise = noise;
    sc.sim.estimators = vec![EstimatorKind::Proposed, EstimatorKind::Baseline];
    // 1 ms resolution keeps the 40 s figure traces small
    sc.sim.record_stride = 1000;
    sc
}

/// Biased `2 + 3 sin(4t + pi/4)` baseline run for scenario index 0..=4 ((a)..(e)).
pub fn example3(case: usize) -> Scenario {
    let mut sc = proposed(SMALL_INIT);
    sc.signal = example3_signal();
    // B w^4 = 768
    sc.differentiator.derivative_bound = 1000.0;
    sc.baseline = BaselineConfig {
        h0: example3_h0(case),
        ..BaselineConfig::example3_preset()
    };
    sc.sim = SimConfig {
        dt: EXAMPLE3_DT,
        // 10 ms resolution over 1000 s
        record_stride: 1000,
        ..sim(EXAMPLE3_HORIZON, vec![EstimatorKind::Baseline])
    };
    script_clock(&mut sc);
    sc
}

/// Constant signal `y = 10`: the estimate must collapse to zero.
pub fn zero_frequency() -> Scenario {
    let mut sc = proposed(SMALL_INIT);
    sc.signal = SignalSpec::new(10.0, 4.0, 0.0, 0.0);
    sc.sim.horizon = 14.0;
    sc
}

/// Built-in scenario names with a one-line description.
pub const NAMES: &[(&str, &str)] = &[
    (
        "ref-proposed",
        "proposed estimator, 4sin(2t+2)+10, zeta0 = 1",
    ),
    (
        "ref-proposed-large",
        "proposed estimator, 4sin(2t+2)+10, zeta0 = 5e6",
    ),
    (
        "ref-proposed-script-gains",
        "proposed estimator with kappa from L = 160 and T_u = 1",
    ),
    ("ref-baseline-text", "baseline, g = 0.1, L1 = 1.5, L2 = 1.1, h0 = 1"),
    (
        "ref-baseline-text-large",
        "baseline, g = 0.1, L1 = 1.5, L2 = 1.1, h0 = 5e6",
    ),
    (
        "ref-baseline-mfile",
        "baseline, g = 1, L1 = 10, L2 = 2, script clock, h0 = 5e6",
    ),
    (
        "fig1-small",
        "both estimators, noise-free, initial error -1",
    ),
    (
        "fig1-large",
        "both estimators, noise-free, initial error ~2234",
    ),
    (
        "fig2-small",
        "both estimators, |n| <= 0.25 uniform noise, initial error -1",
    ),
    (
        "fig2-large",
        "both estimators, |n| <= 0.25 uniform noise, initial error ~2234",
    ),
    ("ex3-a", "baseline, 3sin(4t+pi/4)+2, initial error -1.7"),
    ("ex3-b", "baseline, 3sin(4t+pi/4)+2, initial error 17"),
    ("ex3-c", "baseline, 3sin(4t+pi/4)+2, initial error 7e4"),
    ("ex3-d", "baseline, 3sin(4t+pi/4)+2, initial error 2.2e5"),
    ("ex3-e", "baseline, 3sin(4t+pi/4)+2, initial error 7e6"),
    (
        "zero-frequency",
        "proposed estimator on the constant signal y = 10",
    ),
];

/// Looks up a built-in scenario by name.
pub fn named(name: &str) -> Option<Scenario> {
    let noisy = || NoiseSpec::uniform(NOISE_ETA, NOISE_SEED);
    Some(match name {
        "ref-proposed" => proposed(SMALL_INIT),
        "ref-proposed-large" => proposed(LARGE_INIT),
        "ref-proposed-script-gains" => proposed_script_gains(SMALL_INIT),
        "ref-baseline-text" => baseline_text(SMALL_INIT),
        "ref-baseline-text-large" => baseline_text(LARGE_INIT),
        "ref-baseline-mfile" => baseline_script(LARGE_INIT),
        "fig1-small" => comparison(SMALL_INIT, NoiseSpec::none()),
        "fig1-large" => comparison(LARGE_INIT, NoiseSpec::none()),
        "fig2-small" => comparison(SMALL_INIT, noisy()),
        "fig2-large" => comparison(LARGE_INIT, noisy()),
        "ex3-a" => example3(0),
        "ex3-b" => example3(1),
        "ex3-c" => example3(2),
        "ex3-d" => example3(3),
        "ex3-e" => example3(4),
        "zero-frequency" => zero_frequency(),
        _ => return None,
    })
}
