use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::{Grid, RngStream, SampledPath};
use crate::integrate::{singular_controlled_norm, ControlledPath, Controller};
use crate::stats::{loglog_slope, profile_trend, quartiles, Quartiles, TREND_TOLERANCE};

use super::fbm::{rl_fbm, stationary_fbm};
use super::kernel::KernelSpec;
use super::noise::NoisePath;

/// Offset below `H` of the singular exponent, and the exponent `delta` of
/// the derivative envelope `s^{H - 3/2 + delta}`.
pub const ETA_OFFSET: f64 = 0.01;
pub const ENVELOPE_DELTA: f64 = 0.49;

/// Largest difference quotient of `D` on one dyadic block.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnvelopeBlock {
    pub s_lo: f64,
    pub s_hi: f64,
    pub max_slope: f64,
    /// `max_slope / s_lo^{H - 3/2 + delta}`.
    pub scaled: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemainderDiagnostics {
    /// Singular controlled norm of `(W^H, 1)` with respect to `W_hat^H`.
    pub controlled_norm: f64,
    pub beta: f64,
    pub eta: f64,
    /// `(eps, weighted)` at `eps = 2^-k T`.
    pub profile: Vec<(f64, f64)>,
    pub profile_trend: Option<f64>,
    pub stable: bool,
    pub envelope: Vec<EnvelopeBlock>,
    pub envelope_max: f64,
    /// Log-log slope of the block maxima of `|D'|` against `s`, over the
    /// half of the blocks closest to 0.
    pub envelope_exponent: Option<f64>,
}

/// Positive-time sub-grid `(0, T]` of a path on `[0, T]`.
fn drop_origin(p: &SampledPath) -> Result<SampledPath> {
    let g = Grid::new(p.times()[1..].to_vec())?;
    SampledPath::new(g, p.values()[1..].to_vec())
}

/// Regularity checks on `D = W^H - W_hat^H` for one noise path.
pub fn remainder_diagnostics(
    noise: &NoisePath,
    kernel: &KernelSpec,
) -> Result<RemainderDiagnostics> {
    let wh = rl_fbm(noise, kernel.hurst)?;
    let what = stationary_fbm(noise, kernel)?;
    let y = drop_origin(&wh)?;
    let c = drop_origin(&what)?;
    let beta = kernel.hurst - ETA_OFFSET;
    let eta = beta;
    let gamma = 1.0 - beta;
    let ones = SampledPath::constant(y.grid().clone(), 1.0)?;
    let cp = ControlledPath::new(y.clone(), ones, Controller::XHat, c.clone(), gamma)?;
    let norm = singular_controlled_norm(&cp, gamma, beta, eta)?;

    let t = y.times();
    let horizon = noise.horizon();
    let mut profile = Vec::new();
    let mut k = 1;
    loop {
        let e = horizon * 0.5f64.powi(k);
        if e < t[0] * (1.0 - 1e-12) {
            break;
        }
        let i = t
            .partition_point(|&s| s < e * (1.0 - 1e-12))
            .min(norm.eps_profile.len() - 1);
        profile.push((e, norm.eps_profile[i].weighted));
        k += 1;
    }
    let half = profile.len() / 2;
    let octaves: Vec<f64> = (half..profile.len()).map(|i| (i + 1) as f64).collect();
    let tail: Vec<f64> = profile[half..].iter().map(|p| p.1).collect();
    let trend = profile_trend(&octaves, &tail);
    let all_zero = profile.iter().all(|p| p.1 == 0.0);

    let d: Vec<f64> = y
        .values()
        .iter()
        .zip(c.values())
        .map(|(a, b)| a - b)
        .collect();
    let power = kernel.hurst - 1.5 + ENVELOPE_DELTA;
    let mut envelope = Vec::new();
    let mut hi = horizon;
    while hi > 2.0 * t[0] * (1.0 - 1e-12) {
        let lo = 0.5 * hi;
        let (a, b) = (
            t.partition_point(|&s| s < lo * (1.0 - 1e-12)),
            t.partition_point(|&s| s <= hi * (1.0 + 1e-12)),
        );
        let max_slope = (a..b.saturating_sub(1))
            .map(|i| (d[i + 1] - d[i]).abs() / (t[i + 1] - t[i]))
            .fold(0.0, f64::max);
        envelope.push(EnvelopeBlock {
            s_lo: lo,
            s_hi: hi,
            max_slope,
            scaled: max_slope / lo.powf(power),
        });
        hi = lo;
    }
    // Exponent from the blocks nearest 0; the cut-off shapes the others.
    let near = &envelope[envelope.len() / 2..];
    let (s, m): (Vec<f64>, Vec<f64>) = near.iter().map(|b| (b.s_lo, b.max_slope)).unzip();
    Ok(RemainderDiagnostics {
        controlled_norm: norm.value,
        beta,
        eta,
        profile_trend: trend,
        stable: all_zero || trend.is_some_and(|s| s <= TREND_TOLERANCE),
        profile,
        envelope_max: envelope.iter().map(|b| b.scaled).fold(0.0, f64::max),
        envelope_exponent: loglog_slope(&s, &m),
        envelope,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RemainderExperimentConfig {
    pub hurst: f64,
    pub horizon: f64,
    pub steps: usize,
    pub replications: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemainderExperimentReport {
    pub config: RemainderExperimentConfig,
    pub finite: usize,
    pub stable: usize,
    pub fraction_stable: f64,
    pub norm: Option<Quartiles>,
    pub envelope_exponent: Option<Quartiles>,
    /// Same statistics with the noise before 0 removed; both are exactly 0.
    pub control_norm: f64,
    pub control_envelope: f64,
}

/// [`remainder_diagnostics`] over independent noise paths.
pub fn remainder_experiment(cfg: &RemainderExperimentConfig) -> Result<RemainderExperimentReport> {
    if cfg.replications == 0 {
        return Err(invalid("replications", "must be positive"));
    }
    let kernel = KernelSpec::new(cfg.hurst, cfg.horizon)?;
    let sample = |rep: u64| {
        NoisePath::sample(
            cfg.horizon,
            cfg.steps,
            kernel.support_end(),
            0.0,
            &RngStream::new(cfg.seed, rep),
        )
    };
    let runs = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|rep| remainder_diagnostics(&sample(rep)?, &kernel))
        .collect::<Result<Vec<_>>>()?;
    let control = remainder_diagnostics(&sample(0)?.without_negative_time()?, &kernel)?;
    let finite = runs
        .iter()
        .filter(|r| r.controlled_norm.is_finite())
        .count();
    let stable = runs
        .iter()
        .filter(|r| r.controlled_norm.is_finite() && r.stable)
        .count();
    let norms: Vec<f64> = runs.iter().map(|r| r.controlled_norm).collect();
    let exps: Vec<f64> = runs.iter().filter_map(|r| r.envelope_exponent).collect();
    Ok(RemainderExperimentReport {
        config: *cfg,
        finite,
        stable,
        fraction_stable: stable as f64 / runs.len() as f64,
        norm: quartiles(&norms),
        envelope_exponent: quartiles(&exps),
        control_norm: control.controlled_norm,
        control_envelope: control.envelope_max,
    })
}
