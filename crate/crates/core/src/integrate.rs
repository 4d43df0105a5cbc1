//! Fixed-step explicit integration schemes.

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    Euler,
    Rk4,
}

/// Scratch space for one state vector of a fixed length.
#[derive(Debug, Clone)]
pub struct Stepper {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Stepper {
    pub fn new(len: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; len]),
            tmp: vec![0.0; len],
        }
    }

    /// Advances `x` from `t` to `t + dt` under `field(t, x, dx)`.
    pub fn step<F>(
        &mut self,
        scheme: Scheme,
        t: f64,
        dt: f64,
        x: &mut [f64],
        mut field: F,
    ) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    {
        match scheme {
            Scheme::Euler => {
                let k1 = &mut self.k[0];
                field(t, x, k1)?;
                for (xi, d) in x.iter_mut().zip(k1.iter()) {
                    *xi += dt * d;
                }
            }
            Scheme::Rk4 => {
                let [k1, k2, k3, k4] = &mut self.k;
                let tmp = &mut self.tmp;
                let half = 0.5 * dt;
                field(t, x, k1)?;
                for i in 0..x.len() {
                    tmp[i] = x[i] + half * k1[i];
                }
                field(t + half, tmp, k2)?;
                for i in 0..x.len() {
                    tmp[i] = x[i] + half * k2[i];
                }
                field(t + half, tmp, k3)?;
                for i in 0..x.len() {
                    tmp[i] = x[i] + dt * k3[i];
                }
                field(t + dt, tmp, k4)?;
                let sixth = dt / 6.0;
                for i in 0..x.len() {
                    x[i] += sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
        }
        Ok(())
    }
}

/// Scalar convenience wrapper around [`Stepper::step`].
pub fn step_scalar<F>(scheme: Scheme, t: f64, dt: f64, x: f64, mut field: F) -> Result<f64>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    Ok(match scheme {
        Scheme::Euler => x + dt * field(t, x)?,
        Scheme::Rk4 => {
            let half = 0.5 * dt;
            let k1 = field(t, x)?;
            let k2 = field(t + half, x + half * k1)?;
            let k3 = field(t + half, x + half * k2)?;
            let k4 = field(t + dt, x + dt * k3)?;
            x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(scheme: Scheme, dt: f64) -> f64 {
        let mut st = Stepper::new(1);
        let mut x = [1.0];
        let n = (1.0 / dt).round() as usize;
        for k in 0..n {
            st.step(scheme, k as f64 * dt, dt, &mut x, |_, x, dx| {
                dx[0] = -x[0];
                Ok(())
            })
            .unwrap();
        }
        x[0]
    }

    #[test]
    fn convergence_orders() {
        let exact = (-1f64).exp();
        let e1 = (decay(Scheme::Euler, 1e-2) - exact).abs();
        let e2 = (decay(Scheme::Euler, 5e-3) - exact).abs();
        assert!((e1 / e2 - 2.0).abs() < 0.1);
        let r1 = (decay(Scheme::Rk4, 1e-1) - exact).abs();
        let r2 = (decay(Scheme::Rk4, 5e-2) - exact).abs();
        assert!((r1 / r2 - 16.0).abs() < 1.0);
    }

    #[test]
    fn scalar_matches_vector() {
        for scheme in [Scheme::Euler, Scheme::Rk4] {
            let mut st = Stepper::new(1);
            let mut x = [2.0];
            st.step(scheme, 0.3, 0.1, &mut x, |t, x, dx| {
                dx[0] = t * x[0].sin();
                Ok(())
            })
            .unwrap();
            let y = step_scalar(scheme, 0.3, 0.1, 2.0, |t, x| Ok(t * x.sin())).unwrap();
            assert_eq!(x[0], y);
        }
    }
}
