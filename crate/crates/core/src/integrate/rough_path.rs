use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::controlled::{ControlledPath, Controller};
use super::improper::{build_report, dyadic_anchors, ImproperLevel, ImproperReport};
use super::young::snap_interval;
use crate::error::{check_unit_exponent, invalid, Error, Result};
use crate::grid::{RngStream, SampledPath, TwoParamField};
use crate::norms::check_same_grid;

/// Triple `(X, X_hat, XX)` with regularities `(alpha, beta, alpha + beta)`.
#[derive(Clone, Debug)]
pub struct InhomRoughPath {
    x: SampledPath,
    x_hat: SampledPath,
    xx: TwoParamField,
    alpha: f64,
    beta: f64,
}

impl InhomRoughPath {
    pub fn new(
        x: SampledPath,
        x_hat: SampledPath,
        xx: TwoParamField,
        alpha: f64,
        beta: f64,
    ) -> Result<Self> {
        check_unit_exponent("alpha", alpha)?;
        check_unit_exponent("beta", beta)?;
        if !(alpha + 2.0 * beta > 1.0) {
            return Err(invalid(
                "beta",
                format!("alpha + 2 beta = {} must exceed 1", alpha + 2.0 * beta),
            ));
        }
        check_same_grid(&x, &x_hat)?;
        if !x.grid().same_as(xx.grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            x,
            x_hat,
            xx,
            alpha,
            beta,
        })
    }

    /// Second level from left-point sums of `X_hat` against `X`.
    pub fn from_left_point(
        x: SampledPath,
        x_hat: SampledPath,
        alpha: f64,
        beta: f64,
    ) -> Result<Self> {
        let xx = levy_area_leftpoint(&x_hat, &x)?;
        Self::new(x, x_hat, xx, alpha, beta)
    }

    pub fn x(&self) -> &SampledPath {
        &self.x
    }

    pub fn x_hat(&self) -> &SampledPath {
        &self.x_hat
    }

    pub fn xx(&self) -> &TwoParamField {
        &self.xx
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// `XX_{s,t} = sum_{u in [s,t)} (X_hat_u - X_hat_s)(X_{u+} - X_u)`.
pub fn levy_area_leftpoint(x_hat: &SampledPath, x: &SampledPath) -> Result<TwoParamField> {
    check_same_grid(x_hat, x)?;
    Ok(TwoParamField::left_point_area(
        x.grid().clone(),
        x_hat.values().to_vec(),
        x.values().to_vec(),
    ))
}

/// Largest Chen defect found.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChenReport {
    pub max_defect: f64,
    /// `max|X_hat| * max|dX| * N`, the natural size of accumulated sums.
    pub scale: f64,
    pub triples_checked: usize,
    /// Triples were drawn at random instead of enumerated.
    pub subsampled: bool,
}

/// Triples enumerated exhaustively up to this count.
pub const CHEN_EXHAUSTIVE_LIMIT: usize = 1_000_000;

/// Maximum of `|XX_{s,t} - XX_{s,u} - XX_{u,t} - (X_hat_u - X_hat_s)(X_t - X_u)|`
/// over grid triples `s < u < t`; above [`CHEN_EXHAUSTIVE_LIMIT`] triples a
/// fixed-seed random subsample of that size is used.
pub fn chen_defect(rp: &InhomRoughPath) -> ChenReport {
    let n = rp.x.len();
    let xv = rp.x.values();
    let hv = rp.x_hat.values();
    let defect = |s: usize, u: usize, t: usize| {
        let f = &rp.xx;
        (f.get(s, t) - f.get(s, u) - f.get(u, t) - (hv[u] - hv[s]) * (xv[t] - xv[u])).abs()
    };
    let total = if n < 3 { 0 } else { n * (n - 1) * (n - 2) / 6 };
    let max_hat = hv.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let max_dx = xv
        .windows(2)
        .fold(0.0f64, |m, w| m.max((w[1] - w[0]).abs()));
    let scale = max_hat * max_dx * n as f64;
    if total <= CHEN_EXHAUSTIVE_LIMIT {
        let max_defect = (0..n)
            .into_par_iter()
            .map(|s| {
                let mut m = 0.0f64;
                for u in s + 1..n {
                    for t in u + 1..n {
                        m = m.max(defect(s, u, t));
                    }
                }
                m
            })
            .reduce(|| 0.0, f64::max);
        return ChenReport {
            max_defect,
            scale,
            triples_checked: total,
            subsampled: false,
        };
    }
    let mut rng = RngStream::new(0x5eed, 0).rng();
    let mut max_defect = 0.0f64;
    for _ in 0..CHEN_EXHAUSTIVE_LIMIT {
        let mut v = [
            rng.random_range(0..n),
            rng.random_range(0..n),
            rng.random_range(0..n),
        ];
        v.sort_unstable();
        if v[0] == v[1] || v[1] == v[2] {
            continue;
        }
        max_defect = max_defect.max(defect(v[0], v[1], v[2]));
    }
    ChenReport {
        max_defect,
        scale,
        triples_checked: CHEN_EXHAUSTIVE_LIMIT,
        subsampled: true,
    }
}

fn check_controller(cp: &ControlledPath, rp: &InhomRoughPath) -> Result<()> {
    check_same_grid(cp.y(), rp.x())?;
    if cp.controller_path().values() != rp.x_hat.values() {
        return Err(Error::ControllerMismatch("X_hat"));
    }
    Ok(())
}

/// Compensated sum over the partition given by grid indices.
fn compensated_sum(cp: &ControlledPath, rp: &InhomRoughPath, partition: &[usize]) -> f64 {
    let (y, yp) = (cp.y().values(), cp.y_prime().values());
    let x = rp.x.values();
    partition
        .windows(2)
        .map(|w| {
            let (u, v) = (w[0], w[1]);
            y[u] * (x[v] - x[u]) + yp[u] * rp.xx.get(u, v)
        })
        .sum()
}

/// Compensated sum `sum Y_u (X_{u+} - X_u) + Y'_u XX_{u,u+}` over grid
/// points in `[s, t)`.
pub fn rough_integral(cp: &ControlledPath, rp: &InhomRoughPath, s: f64, t: f64) -> Result<f64> {
    rough_integral_strided(cp, rp, s, t, 1)
}

/// As [`rough_integral`] on the coarser partition taking every `stride`-th
/// grid point from `s` (and always `t`).
pub fn rough_integral_strided(
    cp: &ControlledPath,
    rp: &InhomRoughPath,
    s: f64,
    t: f64,
    stride: usize,
) -> Result<f64> {
    check_controller(cp, rp)?;
    if stride == 0 {
        return Err(invalid("stride", "must be positive"));
    }
    let (i, j, _) = snap_interval(cp.y(), s, t)?;
    let mut partition: Vec<usize> = (i..j).step_by(stride).collect();
    partition.push(j);
    Ok(compensated_sum(cp, rp, &partition))
}

/// Which hypotheses on the exponents hold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RoughConditions {
    /// `eta2 > max(alpha, beta)`.
    pub eta2_dominates: bool,
    /// `2 (eta2 - beta) + eta1 - alpha > 0`.
    pub balance: bool,
    /// `eta1` is neither 0 nor `beta`.
    pub eta1_admissible: bool,
    pub all: bool,
}

impl RoughConditions {
    pub fn check(alpha: f64, beta: f64, eta1: f64, eta2: f64) -> Self {
        let eta2_dominates = eta2 > alpha.max(beta);
        let balance = 2.0 * (eta2 - beta) + eta1 - alpha > 0.0;
        let eta1_admissible = eta1 != 0.0 && eta1 != beta;
        Self {
            eta2_dominates,
            balance,
            eta1_admissible,
            all: eta2_dominates && balance && eta1_admissible,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ImproperRoughReport {
    pub report: ImproperReport,
    pub conditions: RoughConditions,
    /// `(Z, Y)` on the grid points up to `t`, controlled by `X`.
    pub z: ControlledPath,
}

/// Improper rough integral `Z_t = int_{0+}^t Y dX` along anchors `2^-n t`.
///
/// The predicted rate is `eta2 - beta + min(eta2 - alpha + min(eta1 - beta, 0), 0)`.
/// Hypotheses on `(eta1, eta2)` are reported, not enforced.
pub fn improper_rough(
    cp: &ControlledPath,
    rp: &InhomRoughPath,
    t: f64,
    eta1: f64,
    eta2: f64,
) -> Result<ImproperRoughReport> {
    check_controller(cp, rp)?;
    let g = rp.x.grid();
    let ti = g
        .find(t)
        .ok_or_else(|| invalid("t", format!("{t} is not a grid point")))?;
    let anchors = dyadic_anchors(g, ti);
    if anchors.len() < 3 {
        return Err(invalid("grid", "fewer than three dyadic anchors below t"));
    }
    let (alpha, beta) = (rp.alpha, rp.beta);
    let (y, yp, x) = (cp.y().values(), cp.y_prime().values(), rp.x.values());
    // Fine-grid running sums from the right: running[u] = int_u^t.
    let mut running = vec![0.0; ti + 1];
    for u in (0..ti).rev() {
        running[u] = running[u + 1] + y[u] * (x[u + 1] - x[u]) + yp[u] * rp.xx.get(u, u + 1);
    }
    let levels = anchors
        .iter()
        .map(|&(n, idx, _)| ImproperLevel {
            n,
            anchor: g.points()[idx],
            value: running[idx],
        })
        .collect();
    let predicted = eta2 - beta + (eta2 - alpha + (eta1 - beta).min(0.0)).min(0.0);
    let report = build_report(levels, predicted, anchors.iter().any(|a| !a.2));

    let limit = report.value;
    let grid = crate::grid::Grid::new(g.points()[..=ti].to_vec())?;
    let z_vals: Vec<f64> = running.iter().map(|r| limit - r).collect();
    let z = ControlledPath::new(
        SampledPath::new(grid.clone(), z_vals)?,
        SampledPath::new(grid.clone(), y[..=ti].to_vec())?,
        Controller::X,
        SampledPath::new(grid, x[..=ti].to_vec())?,
        beta,
    )?;
    Ok(ImproperRoughReport {
        report,
        conditions: RoughConditions::check(alpha, beta, eta1, eta2),
        z,
    })
}
