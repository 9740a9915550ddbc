use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quad::GaussLegendre;

/// Riemann-Liouville kernel `u^{H-1/2}` and its compactly supported
/// version, equal to it on `(0, T]` and zero from `3T/2` on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub hurst: f64,
    pub horizon: f64,
}

/// `exp(-1/x)` for `x > 0`, else 0.
fn psi(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

fn psi_prime(x: f64) -> f64 {
    if x > 0.0 {
        psi(x) / (x * x)
    } else {
        0.0
    }
}

impl KernelSpec {
    /// `hurst` in `(1/4, 1/2]`; `1/2` is the degenerate Brownian case.
    pub fn new(hurst: f64, horizon: f64) -> Result<Self> {
        if !(hurst > 0.25 && hurst <= 0.5) {
            return Err(invalid("hurst", format!("{hurst} is not in (1/4, 1/2]")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid("horizon", "must be positive"));
        }
        Ok(Self { hurst, horizon })
    }

    /// End of the support of the cut-off kernel.
    pub fn support_end(&self) -> f64 {
        1.5 * self.horizon
    }

    pub fn rl(&self, u: f64) -> f64 {
        if u > 0.0 {
            u.powf(self.hurst - 0.5)
        } else {
            0.0
        }
    }

    pub fn rl_derivative(&self, u: f64) -> f64 {
        if u > 0.0 {
            (self.hurst - 0.5) * u.powf(self.hurst - 1.5)
        } else {
            0.0
        }
    }

    /// Smooth step: 1 up to `T`, 0 from `3T/2`.
    pub fn cutoff(&self, u: f64) -> f64 {
        let s = (u - self.horizon) / (0.5 * self.horizon);
        if s <= 0.0 {
            return 1.0;
        }
        if s >= 1.0 {
            return 0.0;
        }
        let (a, b) = (psi(1.0 - s), psi(s));
        a / (a + b)
    }

    pub fn cutoff_derivative(&self, u: f64) -> f64 {
        let s = (u - self.horizon) / (0.5 * self.horizon);
        if s <= 0.0 || s >= 1.0 {
            return 0.0;
        }
        let (a, b) = (psi(1.0 - s), psi(s));
        let (da, db) = (-psi_prime(1.0 - s), psi_prime(s));
        (da * b - a * db) / ((a + b) * (a + b)) * (2.0 / self.horizon)
    }

    pub fn stationary(&self, u: f64) -> f64 {
        self.rl(u) * self.cutoff(u)
    }

    pub fn stationary_derivative(&self, u: f64) -> f64 {
        self.rl_derivative(u) * self.cutoff(u) + self.rl(u) * self.cutoff_derivative(u)
    }

    /// `max |d/du K_hat(u)| / |d/du K(u)|` over `points` (`u > 0`).
    pub fn domination_constant(&self, points: &[f64]) -> f64 {
        points
            .iter()
            .filter(|&&u| u > 0.0)
            .map(|&u| {
                let d = self.rl_derivative(u).abs();
                if d > 0.0 {
                    self.stationary_derivative(u).abs() / d
                } else {
                    // H = 1/2: the cut-off kernel has the only slope.
                    if self.stationary_derivative(u) == 0.0 {
                        1.0
                    } else {
                        f64::INFINITY
                    }
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Cell averages of `u^{H-1/2}` on `[(m-1)h, mh]`, `m = 0..len` with entry
/// 0 set to zero: `h^{H-1/2} (m^p - (m-1)^p) / p`, `p = H + 1/2`.
pub fn rl_cell_weights(hurst: f64, step: f64, len: usize) -> Vec<f64> {
    let p = hurst + 0.5;
    let scale = step.powf(hurst - 0.5) / p;
    (0..len)
        .map(|m| {
            if m == 0 {
                0.0
            } else {
                let m = m as f64;
                scale * (m.powf(p) - (m - 1.0).powf(p))
            }
        })
        .collect()
}

/// Cell averages of the cut-off kernel; cells inside `(0, T]` reuse
/// [`rl_cell_weights`] exactly.
pub fn stationary_cell_weights(kernel: &KernelSpec, step: f64, len: usize) -> Vec<f64> {
    let mut w = rl_cell_weights(kernel.hurst, step, len);
    let gl = GaussLegendre::new(12);
    let t = kernel.horizon;
    for (m, wm) in w.iter_mut().enumerate().skip(1) {
        let (lo, hi) = ((m - 1) as f64 * step, m as f64 * step);
        if hi <= t * (1.0 + 1e-12) {
            continue;
        }
        *wm = if lo >= kernel.support_end() {
            0.0
        } else {
            gl.integrate(lo, hi, |u| kernel.stationary(u)) / step
        };
    }
    w
}
