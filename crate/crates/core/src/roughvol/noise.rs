use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::conv::causal_convolution;
use crate::error::{invalid, Result};
use crate::grid::{sample_brownian, Grid, RngStream, SampledPath};
use crate::quad::adaptive;

/// Two-sided Brownian path on a uniform lattice `T i / steps`, pinned to
/// zero at time 0, together with the sub-grid on `[0, T]`.
#[derive(Clone, Debug)]
pub struct NoisePath {
    w: SampledPath,
    horizon: f64,
    steps: usize,
    zero: usize,
    unit_grid: Grid,
}

impl NoisePath {
    /// Lattice of step `T / steps` covering `[-before, T + after]`.
    pub fn lattice(horizon: f64, steps: usize, before: f64, after: f64) -> Result<Grid> {
        if !(before >= 0.0 && after >= 0.0) {
            return Err(invalid("noise", "extensions must be non-negative"));
        }
        let h = horizon / steps as f64;
        let lo = (before / h - 1e-9).ceil().max(0.0) as i64;
        let hi = (after / h - 1e-9).ceil().max(0.0) as i64;
        Grid::lattice(horizon, steps, -lo, steps as i64 + hi)
    }

    /// Brownian noise on [`NoisePath::lattice`].
    pub fn sample(
        horizon: f64,
        steps: usize,
        before: f64,
        after: f64,
        rng: &RngStream,
    ) -> Result<Self> {
        let g = Self::lattice(horizon, steps, before, after)?;
        Self::new(sample_brownian(&g, rng)?, horizon, steps)
    }

    /// Wraps a path on a lattice `T i / steps` containing `0` and `T`; the
    /// path is re-anchored so that `W(0) = 0`.
    pub fn new(w: SampledPath, horizon: f64, steps: usize) -> Result<Self> {
        let g = w.grid();
        let h = horizon / steps as f64;
        match g.uniform_step() {
            Some(s) if (s - h).abs() <= 1e-9 * h => {}
            _ => {
                return Err(invalid(
                    "noise",
                    "grid is not the lattice of step T / steps",
                ))
            }
        }
        let zero = g
            .find(0.0)
            .or_else(|| {
                let i = g.nearest(0.0);
                (g.points()[i].abs() <= 1e-9 * h).then_some(i)
            })
            .ok_or_else(|| invalid("noise", "grid does not contain 0"))?;
        if zero + steps > g.len() - 1 || g.find(horizon) != Some(zero + steps) {
            return Err(invalid("noise", "grid does not cover [0, T]"));
        }
        let w0 = w.values()[zero];
        let w = if w0 == 0.0 { w } else { w.map(|v| v - w0)? };
        let unit_grid = Grid::lattice(horizon, steps, 0, steps as i64)?;
        Ok(Self {
            w,
            horizon,
            steps,
            zero,
            unit_grid,
        })
    }

    pub fn path(&self) -> &SampledPath {
        &self.w
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// Index of time 0 in the full grid.
    pub fn zero_index(&self) -> usize {
        self.zero
    }

    /// Grid points on `[0, T]`, shared by all paths built from this noise.
    pub fn unit_grid(&self) -> &Grid {
        &self.unit_grid
    }

    /// Time covered before 0 and after `T`.
    pub fn extent(&self) -> (f64, f64) {
        let h = self.step();
        (
            self.zero as f64 * h,
            (self.w.len() - 1 - self.zero - self.steps) as f64 * h,
        )
    }

    pub fn increments(&self) -> Vec<f64> {
        self.w.increments()
    }

    /// `W` on `[0, T]`.
    pub fn on_unit(&self) -> Result<SampledPath> {
        SampledPath::new(
            self.unit_grid.clone(),
            self.w.values()[self.zero..=self.zero + self.steps].to_vec(),
        )
    }

    /// Same noise with every increment before time 0 set to zero.
    pub fn without_negative_time(&self) -> Result<Self> {
        let values = self
            .w
            .values()
            .iter()
            .enumerate()
            .map(|(i, &v)| if i < self.zero { 0.0 } else { v })
            .collect();
        Self::new(
            SampledPath::new(self.w.grid().clone(), values)?,
            self.horizon,
            self.steps,
        )
    }
}

/// Bump `exp(-1/(1-t^2))` on `(-1, 1)`, unnormalised.
fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| adaptive(&bump, -1.0, 1.0, 1e-15))
}

/// Unit-mass bump on `(-1, 1)`.
pub fn rho(t: f64) -> f64 {
    bump(t) / bump_mass()
}

/// `rho_bar(y) = int rho(x) rho(x + y) dx`, even with support `[-2, 2]`.
pub fn rho_bar(y: f64) -> f64 {
    let y = y.abs();
    if y >= 2.0 {
        return 0.0;
    }
    adaptive(&|x: f64| rho(x) * rho(x + y), -1.0, 1.0 - y, 1e-15)
}

/// `int rho^2`.
pub fn rho_l2_squared() -> f64 {
    static NORM: OnceLock<f64> = OnceLock::new();
    *NORM.get_or_init(|| adaptive(&|t: f64| rho(t) * rho(t), -1.0, 1.0, 1e-15))
}

/// Mollifier `rho_eps(t) = rho(t / eps) / eps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub epsilon: f64,
}

impl MollifierSpec {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid("epsilon", "must be positive"));
        }
        Ok(Self { epsilon })
    }

    pub fn eval(&self, t: f64) -> f64 {
        rho(t / self.epsilon) / self.epsilon
    }

    pub fn bar(&self, y: f64) -> f64 {
        rho_bar(y / self.epsilon) / self.epsilon
    }
}

/// `xi_eps(t_k) = sum_j rho_eps(t_k - m_j) dW_j` with `m_j` the midpoint of
/// cell `j`, on the noise sub-grid `[a, b]`.
///
/// Requires `eps >= 2 h` and noise on `[a - eps, b + eps]`.
pub fn mollified_noise_on(
    noise: &NoisePath,
    moll: &MollifierSpec,
    a: f64,
    b: f64,
) -> Result<SampledPath> {
    let h = noise.step();
    let eps = moll.epsilon;
    if eps < 2.0 * h * (1.0 - 1e-12) {
        return Err(invalid(
            "epsilon",
            format!("{eps} is below twice the grid step {h}"),
        ));
    }
    let g = noise.path().grid();
    let (ia, ib) = match (g.find(a), g.find(b)) {
        (Some(i), Some(j)) if i < j => (i, j),
        _ => {
            return Err(invalid(
                "interval",
                format!("[{a}, {b}] is not a grid interval"),
            ))
        }
    };
    let reach = (eps / h - 1e-9).ceil() as usize;
    if ia < reach || ib + reach > g.len() - 1 {
        return Err(invalid(
            "noise",
            format!("[{a}, {b}] widened by {eps} leaves the noise grid"),
        ));
    }
    let dw = noise.increments();
    // Offsets d = k - j in [1 - reach, reach] sit at kernel index d + reach - 1.
    let kernel: Vec<f64> = (0..2 * reach)
        .map(|m| moll.eval((m as f64 - reach as f64 + 0.5) * h))
        .collect();
    let start = ia - reach;
    let conv = causal_convolution(&kernel, &dw[start..ib + reach]);
    let values: Vec<f64> = (ia..=ib).map(|k| conv[k - ia + 2 * reach - 1]).collect();
    let grid = Grid::new(g.points()[ia..=ib].to_vec())?;
    SampledPath::new(grid, values)
}

/// [`mollified_noise_on`] over `[0, T]`, on the shared unit grid.
pub fn mollified_noise(noise: &NoisePath, moll: &MollifierSpec) -> Result<SampledPath> {
    let p = mollified_noise_on(noise, moll, 0.0, noise.horizon())?;
    SampledPath::new(noise.unit_grid().clone(), p.values().to_vec())
}
