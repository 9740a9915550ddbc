//! Loewner traces from sampled drivers and the exponent algebra of the
//! moment bounds for SLE traces.
//!
//! Traces are computed with a piecewise-constant driver: on each step the
//! inverse Loewner map is the explicit vertical-slit map
//! `g^-1(w) = U + sqrt((w - U)^2 - 4 dt)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::{make_uniform_grid, sample_brownian, Grid, PlanarPath, RngStream, SampledPath};
use crate::norms::{
    default_alpha_grid, estimate_exponents, reparametrize_power, singular_holder_seminorm,
};
use crate::stats::{median, profile_trend, quartiles, Quartiles, TREND_TOLERANCE};

/// `(q(r), zeta(r))` with `q = (1 + kappa/4) r - kappa r^2 / 8` and
/// `zeta = r - kappa r^2 / 8`.
pub fn moment_exponents(r: f64, kappa: f64) -> (f64, f64) {
    let quad = kappa * r * r / 8.0;
    ((1.0 + kappa / 4.0) * r - quad, r - quad)
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa < 8.0 {
        Ok(())
    } else {
        Err(invalid("kappa", format!("{kappa} is not in (0, 8)")))
    }
}

/// Critical moment parameter `1/2 + 4/kappa`.
pub fn critical_r(kappa: f64) -> f64 {
    0.5 + 4.0 / kappa
}

/// Maximiser of `(zeta + q - 2) / (2q)`: `(-8 + 4 sqrt(8 + kappa)) / kappa`.
pub fn optimal_r(kappa: f64) -> f64 {
    (-8.0 + 4.0 * (8.0 + kappa).sqrt()) / kappa
}

/// `1 - kappa / (24 + 2 kappa - 8 sqrt(kappa + 8))`.
pub fn alpha_star(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(1.0 - kappa / (24.0 + 2.0 * kappa - 8.0 * (kappa + 8.0).sqrt()))
}

/// Exponent profile `(zeta + q - 2) / (2q)` whose maximum over `(1, r_c)`
/// is `alpha_star`.
pub fn holder_gain(r: f64, kappa: f64) -> f64 {
    let (q, zeta) = moment_exponents(r, kappa);
    (zeta + q - 2.0) / (2.0 * q)
}

/// Numerical maximum of [`holder_gain`] over `(1, r_c)`: a 4000-point scan
/// followed by golden-section refinement. Returns `(argmax, max)`.
pub fn alpha_star_numeric(kappa: f64) -> Result<(f64, f64)> {
    check_kappa(kappa)?;
    let (lo, hi) = (1.0, critical_r(kappa));
    let f = |r: f64| holder_gain(r, kappa);
    let m = 4000;
    let step = (hi - lo) / m as f64;
    let best = (1..m)
        .map(|k| lo + k as f64 * step)
        .max_by(|a, b| f(*a).total_cmp(&f(*b)))
        .expect("non-empty scan");
    let (mut a, mut b) = ((best - step).max(lo), (best + step).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    while b - a > 1e-13 * b.abs().max(1.0) {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    let r = 0.5 * (a + b);
    Ok((r, f(r)))
}

/// Parameters derived from `kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SleParams {
    pub kappa: f64,
    pub r_c: f64,
    pub r_star: f64,
    pub alpha_star: f64,
}

impl SleParams {
    pub fn new(kappa: f64) -> Result<Self> {
        Ok(Self {
            kappa,
            r_c: critical_r(kappa),
            r_star: optimal_r(kappa),
            alpha_star: alpha_star(kappa)?,
        })
    }
}

/// Admissible moment parameters `(1, r_c)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdmissibleInterval {
    pub lower: f64,
    pub upper: f64,
    /// All defining inequalities hold on a sample of the interval and the
    /// binding one fails just outside each end.
    pub verified: bool,
}

fn admissible(r: f64, kappa: f64) -> bool {
    let (q, zeta) = moment_exponents(r, kappa);
    r < critical_r(kappa) && q > 1.0 && q + zeta > 0.0 && q + zeta > 2.0
}

pub fn admissible_interval(kappa: f64) -> Result<AdmissibleInterval> {
    check_kappa(kappa)?;
    let (lower, upper) = (1.0, critical_r(kappa));
    let inside = (1..200).all(|k| admissible(lower + (upper - lower) * k as f64 / 200.0, kappa));
    let outside = !admissible(lower - 0.01, kappa) && !admissible(upper + 0.01, kappa);
    Ok(AdmissibleInterval {
        lower,
        upper,
        verified: inside && outside,
    })
}

/// Window of singular exponents `(0, upper)` for which the singular Besov
/// moment of the trace is finite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaWindow {
    pub q: f64,
    pub zeta: f64,
    /// `min(delta - zeta/(2q), delta - 1/q)`.
    pub upper: f64,
    pub empty: bool,
}

/// Admissible `eta` for moment parameter `r` and Besov regularity `delta`;
/// `q = q(r)`.
pub fn admissible_eta(kappa: f64, r: f64, delta: f64) -> Result<EtaWindow> {
    check_kappa(kappa)?;
    let (q, zeta) = moment_exponents(r, kappa);
    if !(q + zeta > 2.0) || !(r < critical_r(kappa)) || !(q > 1.0) {
        return Err(invalid("r", format!("{r} is outside (1, r_c)")));
    }
    let (lo, hi) = (1.0 / q, (zeta + q) / (2.0 * q));
    if !(delta > lo && delta < hi) {
        return Err(invalid("delta", format!("{delta} is outside ({lo}, {hi})")));
    }
    let upper = (delta - zeta / (2.0 * q)).min(delta - 1.0 / q);
    Ok(EtaWindow {
        q,
        zeta,
        upper,
        empty: upper <= 0.0,
    })
}

/// Discretisation of the trace computation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    pub steps: usize,
    /// Tip evaluated at height `c_tip * sqrt(dt)` above the driver.
    pub c_tip: f64,
    pub horizon: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            steps: 4096,
            c_tip: 0.1,
            horizon: 1.0,
        }
    }
}

impl TraceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(invalid("steps", "need at least 2"));
        }
        if !(self.c_tip > 0.0) {
            return Err(invalid("c_tip", "must be positive"));
        }
        if !(self.horizon > 0.0) {
            return Err(invalid("horizon", "must be positive"));
        }
        Ok(())
    }
}

/// Trace on the grid points after 0 and the indices where a map was
/// evaluated within `1e-14` of the real axis.
#[derive(Clone, Debug)]
pub struct Trace {
    pub path: PlanarPath,
    pub flagged: Vec<usize>,
}

const BRANCH_TOL: f64 = 1e-14;

/// Loewner trace of a driver sampled on a uniform grid starting at 0.
pub fn loewner_trace(driver: &SampledPath, cfg: &TraceConfig) -> Result<Trace> {
    cfg.validate()?;
    let g = driver.grid();
    let dt = g
        .uniform_step()
        .ok_or_else(|| invalid("driver", "grid must be uniform"))?;
    if g.first() != 0.0 {
        return Err(invalid("driver", "grid must start at 0"));
    }
    let u = driver.values();
    let n = u.len() - 1;
    let tip = cfg.c_tip * dt.sqrt();
    let four_dt = Complex64::new(4.0 * dt, 0.0);
    let results: Vec<(Complex64, bool)> = (1..=n)
        .into_par_iter()
        .map(|k| {
            let mut w = Complex64::new(u[k], tip);
            let mut flag = false;
            for j in (1..=k).rev() {
                let c = u[j - 1];
                let z = w - c;
                let mut s = (z * z - four_dt).sqrt();
                if s.im < 0.0 {
                    s = -s;
                }
                if s.im.abs() < BRANCH_TOL {
                    flag = true;
                }
                w = Complex64::new(c, 0.0) + s;
            }
            (w, flag)
        })
        .collect();
    let flagged = results
        .iter()
        .enumerate()
        .filter(|(_, r)| r.1)
        .map(|(i, _)| i)
        .collect();
    let grid = Grid::new(g.points()[1..].to_vec())?;
    let path = SampledPath::new(grid, results.into_iter().map(|r| r.0).collect())?;
    Ok(Trace { path, flagged })
}

/// Driver `sqrt(kappa) B` on the uniform grid of `cfg`.
pub fn sle_driver(kappa: f64, cfg: &TraceConfig, rng: &RngStream) -> Result<SampledPath> {
    let g = make_uniform_grid(0.0, cfg.horizon, cfg.steps + 1)?;
    let b = sample_brownian(&g, rng)?;
    let s = kappa.sqrt();
    b.map(|v| s * v)
}

/// Settings of the regularity experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SleExperimentConfig {
    pub kappa: f64,
    pub trace: TraceConfig,
    pub replications: usize,
    pub seed: u64,
    /// `(alpha, eta)` of the profile check.
    pub profile_alpha: f64,
    pub profile_eta: f64,
    /// Smallest octave `k` of the trend fit is `octaves / 2`.
    pub octaves: u32,
}

impl SleExperimentConfig {
    pub fn new(kappa: f64, replications: usize, seed: u64) -> Self {
        Self {
            kappa,
            trace: TraceConfig::default(),
            replications,
            seed,
            profile_alpha: 0.65,
            profile_eta: 0.45,
            octaves: 12,
        }
    }
}

/// Outcome of one replication.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SleReplication {
    pub stream: u64,
    /// Estimated Hölder exponent of `t -> gamma(t^2)`.
    pub alpha_hat: Option<f64>,
    /// Weighted profile at `eps = 2^-k T`, `k = 1..=octaves`.
    pub profile: Vec<f64>,
    pub trend: Option<f64>,
    pub upward: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SleReport {
    pub config: SleExperimentConfig,
    pub params: Option<SleParams>,
    pub replications: Vec<SleReplication>,
    /// Replications dropped because of branch flags.
    pub failures: usize,
    pub alpha_hat: Option<Quartiles>,
    pub eps: Vec<f64>,
    /// Per-`eps` median of the weighted profile.
    pub profile_median: Vec<f64>,
    pub trend_tolerance: f64,
    /// Share of kept replications without an upward trend.
    pub fraction_bounded: f64,
}

/// Traces `gamma` driven by `sqrt(kappa) B`, estimating the Hölder exponent
/// of `t -> gamma(t^2)` and the small-`eps` trend of the singular profile.
pub fn sle_regularity_experiment(cfg: &SleExperimentConfig) -> Result<SleReport> {
    if !(cfg.kappa >= 0.0 && cfg.kappa < 1.0) {
        return Err(invalid("kappa", format!("{} is not in [0, 1)", cfg.kappa)));
    }
    if cfg.replications == 0 {
        return Err(invalid("replications", "must be positive"));
    }
    cfg.trace.validate()?;
    let horizon = cfg.trace.horizon;
    let first = horizon / cfg.trace.steps as f64;
    let eps: Vec<f64> = (1..=cfg.octaves)
        .map(|k| horizon * 0.5f64.powi(k as i32))
        .take_while(|&e| e >= first * (1.0 - 1e-12))
        .collect();
    if eps.len() < 4 {
        return Err(invalid("octaves", "grid too coarse for the profile"));
    }
    let alpha_grid = default_alpha_grid();
    let runs: Vec<Result<Option<SleReplication>>> = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|stream| {
            let driver = sle_driver(cfg.kappa, &cfg.trace, &RngStream::new(cfg.seed, stream))?;
            let trace = loewner_trace(&driver, &cfg.trace)?;
            if !trace.flagged.is_empty() {
                return Ok(None);
            }
            let squared = reparametrize_power(&trace.path, 2.0)?;
            let est = estimate_exponents(&squared, &alpha_grid)?;
            let norm = singular_holder_seminorm(&trace.path, cfg.profile_alpha, cfg.profile_eta)?;
            let t = trace.path.times();
            let profile: Vec<f64> = eps
                .iter()
                .map(|&e| {
                    let i = t.partition_point(|&s| s < e * (1.0 - 1e-12));
                    norm.eps_profile[i.min(norm.eps_profile.len() - 1)].weighted
                })
                .collect();
            let half = eps.len() / 2;
            let ks: Vec<f64> = (half..eps.len()).map(|i| (i + 1) as f64).collect();
            let trend = profile_trend(&ks, &profile[half..]);
            Ok(Some(SleReplication {
                stream,
                alpha_hat: est.alpha_hat,
                profile,
                trend,
                upward: trend.is_some_and(|s| s > TREND_TOLERANCE),
            }))
        })
        .collect();
    let mut kept = Vec::new();
    let mut failures = 0;
    for r in runs {
        match r? {
            Some(rep) => kept.push(rep),
            None => failures += 1,
        }
    }
    let alpha_hats: Vec<f64> = kept.iter().filter_map(|r| r.alpha_hat).collect();
    let profile_median = (0..eps.len())
        .map(|i| {
            let col: Vec<f64> = kept.iter().map(|r| r.profile[i]).collect();
            median(&col).unwrap_or(f64::NAN)
        })
        .collect();
    let bounded = kept.iter().filter(|r| !r.upward).count();
    Ok(SleReport {
        config: *cfg,
        params: (cfg.kappa > 0.0)
            .then(|| SleParams::new(cfg.kappa))
            .transpose()?,
        failures,
        alpha_hat: quartiles(&alpha_hats),
        eps,
        profile_median,
        trend_tolerance: TREND_TOLERANCE,
        fraction_bounded: if kept.is_empty() {
            0.0
        } else {
            bounded as f64 / kept.len() as f64
        },
        replications: kept,
    })
}
