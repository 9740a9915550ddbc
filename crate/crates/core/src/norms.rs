//! Hölder, singular Hölder and singular Besov seminorms on sampled paths,
//! plus empirical exponent estimation.
//!
//! Every supremum over continuum pairs is a maximum over grid pairs. The
//! workhorse is the row maximum `M_i = max_{j>i} |Y_j - Y_i| / (t_j - t_i)^a`:
//! the Hölder seminorm on `[t_i, T]` is the suffix maximum of `M`, and the
//! singular seminorm is `max_i t_i^{a-eta} M_i`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_unit_exponent, invalid, Error, Result};
use crate::grid::{Grid, PathValue, SampledPath};
use crate::stats::ols;

/// Row maxima `M_i = max_{j>i} |Y_j - Y_i| / (t_j - t_i)^alpha`; the last
/// entry is 0.
fn row_maxima<V: PathValue>(times: &[f64], values: &[V], alpha: f64) -> Vec<f64> {
    let n = times.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let uniform = Grid::new(times.to_vec())
        .ok()
        .and_then(|g| g.uniform_step());
    match uniform {
        Some(h) => {
            // one power per lag
            let inv: Vec<f64> = (0..n)
                .map(|l| {
                    if l == 0 {
                        0.0
                    } else {
                        (l as f64 * h).powf(-alpha)
                    }
                })
                .collect();
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let yi = values[i];
                    let mut m = 0.0f64;
                    for (j, &yj) in values.iter().enumerate().skip(i + 1) {
                        m = m.max((yj - yi).modulus() * inv[j - i]);
                    }
                    m
                })
                .collect()
        }
        None => (0..n)
            .into_par_iter()
            .map(|i| {
                let (ti, yi) = (times[i], values[i]);
                let mut m = 0.0f64;
                for j in i + 1..n {
                    let d = (values[j] - yi).modulus();
                    if d > 0.0 {
                        m = m.max(d / (times[j] - ti).powf(alpha));
                    }
                }
                m
            })
            .collect(),
    }
}

fn suffix_max(m: &[f64]) -> Vec<f64> {
    let mut out = m.to_vec();
    for i in (0..out.len().saturating_sub(1)).rev() {
        out[i] = out[i].max(out[i + 1]);
    }
    out
}

fn check_positive_domain(grid: &Grid) -> Result<()> {
    if grid.first() <= 0.0 {
        return Err(invalid(
            "path",
            format!(
                "singular seminorms need a grid inside (0, T]; first point is {}",
                grid.first()
            ),
        ));
    }
    Ok(())
}

/// Hölder seminorm on `[a, b]` with its degeneracy flag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolderReport {
    pub value: f64,
    /// Fewer than two grid points in `[a, b]`.
    pub degenerate: bool,
}

/// `max |Y_t - Y_s| / |t - s|^alpha` over grid pairs `a <= s < t <= b`.
pub fn holder_seminorm<V: PathValue>(
    path: &SampledPath<V>,
    alpha: f64,
    a: f64,
    b: f64,
) -> Result<HolderReport> {
    check_unit_exponent("alpha", alpha)?;
    let g = path.grid();
    if !(a <= b) || a < g.first() - 1e-12 || b > g.horizon() + 1e-12 {
        return Err(invalid(
            "interval",
            format!("[{a}, {b}] outside the path domain"),
        ));
    }
    let r = g.index_range(a, b);
    if r.len() < 2 {
        return Ok(HolderReport {
            value: 0.0,
            degenerate: true,
        });
    }
    let m = row_maxima(&g.points()[r.clone()], &path.values()[r], alpha);
    Ok(HolderReport {
        value: m.iter().fold(0.0, |x, &y| x.max(y)),
        degenerate: false,
    })
}

/// One point of the scale profile: `(eps, eps^{alpha-eta} ||Y||_{alpha;[eps,T]})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub eps: f64,
    pub weighted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularNormReport {
    pub alpha: f64,
    pub eta: f64,
    pub value: f64,
    /// One entry per grid point except the last.
    pub eps_profile: Vec<ProfilePoint>,
}

fn check_alpha_eta(alpha: f64, eta: f64) -> Result<()> {
    check_unit_exponent("alpha", alpha)?;
    if !(eta <= alpha) || !eta.is_finite() {
        return Err(invalid(
            "eta",
            format!("{eta} must not exceed alpha = {alpha}"),
        ));
    }
    Ok(())
}

/// Singular `(alpha, eta)` seminorm: `max |Y_t - Y_s| / (s^{eta-alpha} |t-s|^alpha)`
/// over grid pairs, together with its scale profile.
pub fn singular_holder_seminorm<V: PathValue>(
    path: &SampledPath<V>,
    alpha: f64,
    eta: f64,
) -> Result<SingularNormReport> {
    check_alpha_eta(alpha, eta)?;
    check_positive_domain(path.grid())?;
    let t = path.times();
    let m = row_maxima(t, path.values(), alpha);
    let w = alpha - eta;
    let value = t
        .iter()
        .zip(&m)
        .map(|(&s, &mi)| if mi > 0.0 { s.powf(w) * mi } else { 0.0 })
        .fold(0.0, f64::max);
    let tail = suffix_max(&m);
    let eps_profile = t[..t.len() - 1]
        .iter()
        .zip(&tail)
        .map(|(&eps, &hm)| ProfilePoint {
            eps,
            weighted: if hm > 0.0 { eps.powf(w) * hm } else { 0.0 },
        })
        .collect();
    Ok(SingularNormReport {
        alpha,
        eta,
        value,
        eps_profile,
    })
}

/// `max_eps eps^{alpha-eta} ||Y||_{alpha;[eps,T]}` over grid points `eps`.
pub fn singular_via_eps_profile<V: PathValue>(
    path: &SampledPath<V>,
    alpha: f64,
    eta: f64,
) -> Result<f64> {
    check_alpha_eta(alpha, eta)?;
    check_positive_domain(path.grid())?;
    let t = path.times();
    let tail = suffix_max(&row_maxima(t, path.values(), alpha));
    Ok(t.iter()
        .zip(&tail)
        .map(|(&eps, &hm)| {
            if hm > 0.0 {
                eps.powf(alpha - eta) * hm
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max))
}

fn weighted_scan<V: PathValue>(
    path: &SampledPath<V>,
    alpha: f64,
    delta: f64,
    eta: f64,
    restricted: bool,
) -> Result<f64> {
    check_unit_exponent("alpha", alpha)?;
    if !(delta > 0.0) {
        return Err(invalid("delta", format!("{delta} must be positive")));
    }
    if !(eta <= delta) {
        return Err(invalid(
            "eta",
            format!("{eta} must not exceed delta = {delta}"),
        ));
    }
    check_positive_domain(path.grid())?;
    let t = path.times();
    let y = path.values();
    let n = t.len();
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let s = t[i];
            let end = if restricted {
                t.partition_point(|&u| u - s <= s)
            } else {
                n
            };
            let mut m = 0.0f64;
            for j in i + 1..end {
                let d = (y[j] - y[i]).modulus();
                if d > 0.0 {
                    m = m.max(d / (t[j] - s).powf(alpha));
                }
            }
            if m > 0.0 {
                m * s.powf(delta - eta)
            } else {
                0.0
            }
        })
        .reduce(|| 0.0, f64::max))
}

/// `max |Y_t - Y_s| / (s^{eta-delta} |t-s|^alpha)` over all grid pairs.
pub fn weighted_seminorm<V: PathValue>(
    path: &SampledPath<V>,
    alpha: f64,
    delta: f64,
    eta: f64,
) -> Result<f64> {
    weighted_scan(path, alpha, delta, eta, false)
}

/// As [`weighted_seminorm`] but only over pairs with `t - s <= s`.
pub fn restricted_seminorm<V: PathValue>(
    path: &SampledPath<V>,
    alpha: f64,
    delta: f64,
    eta: f64,
) -> Result<f64> {
    weighted_scan(path, alpha, delta, eta, true)
}

/// Constant `C` with `weighted <= C * restricted`.
///
/// Chaining `s, 2s, 4s, ..., 2^N s, t` with `2^N s <= t < 2^{N+1} s` bounds
/// the ratio by `2^{N(eta-delta)} + sum_{n<N} 2^{n x} / (2^N - 1)^alpha`
/// where `x = alpha + eta - delta`; the first term is at most 1. The bound is
/// exact on grids closed under doubling, e.g. `{k h : k >= 1}`.
pub fn restricted_equivalence_constant(alpha: f64, delta: f64, eta: f64) -> Result<f64> {
    check_unit_exponent("alpha", alpha)?;
    if !(delta > 0.0) || !(eta <= delta) {
        return Err(invalid("eta", "need delta > 0 and eta <= delta"));
    }
    let x = alpha + eta - delta;
    let ln2 = std::f64::consts::LN_2;
    let mut best = 0.0f64;
    // log-sum-exp accumulation of sum_{n<N} 2^{n x}
    let mut log_sum = f64::NEG_INFINITY;
    for big_n in 1..=1024u32 {
        let term = (big_n - 1) as f64 * x * ln2;
        log_sum = if log_sum == f64::NEG_INFINITY {
            term
        } else {
            let hi = log_sum.max(term);
            hi + ((log_sum - hi).exp() + (term - hi).exp()).ln()
        };
        // (2^N - 1)^alpha
        let log_den = alpha * (big_n as f64 * ln2 + (-(-(big_n as f64) * ln2).exp()).ln_1p());
        best = best.max((log_sum - log_den).exp());
    }
    Ok(1.0 + best)
}

/// `Z(t) = Y(t^beta)` on the grid `{t_i^{1/beta}}`, so no interpolation occurs.
pub fn reparametrize_power<V: PathValue>(
    path: &SampledPath<V>,
    beta: f64,
) -> Result<SampledPath<V>> {
    if !(beta >= 1.0) || !beta.is_finite() {
        return Err(invalid("beta", format!("{beta} must be at least 1")));
    }
    check_positive_domain(path.grid())?;
    power_regrid(path, 1.0 / beta)
}

/// Inverse of [`reparametrize_power`]: maps the grid back by `s -> s^beta`.
pub fn undo_power_reparametrization<V: PathValue>(
    path: &SampledPath<V>,
    beta: f64,
) -> Result<SampledPath<V>> {
    if !(beta >= 1.0) || !beta.is_finite() {
        return Err(invalid("beta", format!("{beta} must be at least 1")));
    }
    check_positive_domain(path.grid())?;
    power_regrid(path, beta)
}

fn power_regrid<V: PathValue>(path: &SampledPath<V>, exponent: f64) -> Result<SampledPath<V>> {
    let points: Vec<f64> = if exponent == 1.0 {
        path.times().to_vec()
    } else {
        path.times().iter().map(|t| t.powf(exponent)).collect()
    };
    SampledPath::new(Grid::new(points)?, path.values().to_vec())
}

/// Midpoint-rule singular Besov norm, excluding cell pairs closer than one
/// cell.
pub fn singular_besov_norm<V: PathValue>(
    path: &SampledPath<V>,
    delta: f64,
    q: f64,
    eta: f64,
) -> Result<f64> {
    singular_besov_norm_with_band(path, delta, q, eta, 1)
}

/// Midpoint-rule singular Besov norm over pairs of grid cells `(i, j)`
/// with `j - i >= band`.
///
/// Path values at cell midpoints come from linear interpolation and the
/// weight `s^{q(alpha-eta)}` is taken at the earlier midpoint.
pub fn singular_besov_norm_with_band<V: PathValue>(
    path: &SampledPath<V>,
    delta: f64,
    q: f64,
    eta: f64,
    band: usize,
) -> Result<f64> {
    check_unit_exponent("delta", delta)?;
    if !(q >= 1.0) || !q.is_finite() {
        return Err(invalid("q", format!("{q} must be at least 1")));
    }
    let alpha = delta - 1.0 / q;
    if !(alpha > 0.0) {
        return Err(invalid(
            "q",
            format!("delta - 1/q = {alpha} must be positive"),
        ));
    }
    if !(eta <= alpha + 1e-12) {
        return Err(invalid(
            "eta",
            format!("{eta} must not exceed delta - 1/q = {alpha}"),
        ));
    }
    if band == 0 {
        return Err(invalid("band", "must be at least one cell"));
    }
    check_positive_domain(path.grid())?;
    let t = path.times();
    let y = path.values();
    let cells = t.len() - 1;
    let mid: Vec<f64> = t.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let ym: Vec<V> = y.windows(2).map(|w| (w[0] + w[1]) * 0.5).collect();
    let width: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let p_dist = 1.0 + delta * q;
    let p_weight = q * (alpha - eta);
    let pow_q = |d: f64| if q == 2.0 { d * d } else { d.powf(q) };
    // Sequential final sum keeps the result independent of the thread count.
    let total: f64 = (0..cells)
        .into_par_iter()
        .map(|i| {
            let wi = mid[i].powf(p_weight) * width[i];
            let mut acc = 0.0;
            for j in i + band..cells {
                let d = (ym[j] - ym[i]).modulus();
                if d > 0.0 {
                    acc += pow_q(d) * width[j] / (mid[j] - mid[i]).powf(p_dist);
                }
            }
            acc * wi
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    Ok(total.powf(1.0 / q))
}

/// Constant `C` in `||Y||_{alpha,eta} <= C ||Y||_{delta,q,eta}` with
/// `alpha = delta - 1/q`.
///
/// Comes from the Garsia-Rodemich-Rumsey inequality with `Psi(u) = u^q` and
/// `p(u) = u^{delta + 1/q}`, applied on each `[eps, T]`; the extra `2^{1/q}`
/// accounts for integrating over `s < t` only.
pub fn besov_embedding_constant(delta: f64, q: f64) -> Result<f64> {
    check_unit_exponent("delta", delta)?;
    let a = delta - 1.0 / q;
    if !(q >= 1.0) || !(a > 0.0) {
        return Err(invalid("q", "need q >= 1 and delta - 1/q > 0"));
    }
    Ok(8.0 * 8f64.powf(1.0 / q) * (delta + 1.0 / q) / a)
}

/// Estimated exponents of a sampled path.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentEstimate {
    pub alpha_hat: Option<f64>,
    pub eta_hat: Option<f64>,
    /// Raw log-log slope of mean oscillation against lag on `[T/2, T]`.
    pub oscillation_slope: Option<f64>,
    /// Raw log-log slope of `||Y||_{alpha_hat;[eps,T]}` against `eps`.
    pub profile_slope: Option<f64>,
    /// `(eps, ||Y||_{alpha_hat;[eps,T]})` at dyadic scales.
    pub profile: Vec<(f64, f64)>,
    /// Path constant: every seminorm vanishes.
    pub degenerate: bool,
    /// The dyadic profile is not strictly increasing as `eps` decreases.
    pub low_confidence: bool,
}

/// Minimum number of grid points accepted by [`estimate_exponents`].
pub const MIN_ESTIMATION_POINTS: usize = 64;

/// Estimates `(alpha_hat, eta_hat)` by log-log regression.
///
/// `alpha_hat` is the largest entry of `alpha_grid` not above the slope of
/// mean absolute increment against lag on `[T/2, T]` (dyadic index lags).
/// `eta_hat` adds the slope of `log ||Y||_{alpha_hat;[eps,T]}` against
/// `log eps` for `eps = T 2^{-k}` down to sixteen times the first grid point.
pub fn estimate_exponents<V: PathValue>(
    path: &SampledPath<V>,
    alpha_grid: &[f64],
) -> Result<ExponentEstimate> {
    let n = path.len();
    if n < MIN_ESTIMATION_POINTS {
        return Err(invalid(
            "path",
            format!("{n} points; need at least {MIN_ESTIMATION_POINTS}"),
        ));
    }
    check_positive_domain(path.grid())?;
    if alpha_grid.is_empty() {
        return Err(invalid("alpha_grid", "empty"));
    }
    for &a in alpha_grid {
        check_unit_exponent("alpha_grid", a)?;
    }
    let t = path.times();
    let y = path.values();
    let horizon = path.grid().horizon();
    let y0 = y[0];
    if y.iter().all(|&v| (v - y0).modulus() == 0.0) {
        return Ok(ExponentEstimate {
            alpha_hat: None,
            eta_hat: None,
            oscillation_slope: None,
            profile_slope: None,
            profile: Vec::new(),
            degenerate: true,
            low_confidence: false,
        });
    }

    let start = t.partition_point(|&s| s < 0.5 * horizon);
    let tail = &y[start..];
    let tt = &t[start..];
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    let mut lag = 1;
    while lag <= tail.len() / 4 {
        let count = tail.len() - lag;
        let (mut osc, mut span) = (0.0, 0.0);
        for i in 0..count {
            osc += (tail[i + lag] - tail[i]).modulus();
            span += tt[i + lag] - tt[i];
        }
        if osc > 0.0 {
            lx.push((span / count as f64).ln());
            ly.push((osc / count as f64).ln());
        }
        lag *= 2;
    }
    let oscillation_slope = ols(&lx, &ly).map(|f| f.slope);
    let mut sorted = alpha_grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let alpha_hat = match oscillation_slope {
        Some(s) => sorted
            .iter()
            .rev()
            .find(|&&a| a <= s)
            .copied()
            .unwrap_or(sorted[0]),
        None => sorted[0],
    };

    let tail_max = suffix_max(&row_maxima(t, y, alpha_hat));
    let floor = 16.0 * t[0];
    let mut profile = Vec::new();
    let mut k = 1;
    loop {
        let eps = horizon * 0.5f64.powi(k);
        if eps < floor {
            break;
        }
        let i = t.partition_point(|&s| s < eps);
        if i >= n - 1 {
            k += 1;
            continue;
        }
        profile.push((eps, tail_max[i]));
        k += 1;
    }
    let (px, py): (Vec<f64>, Vec<f64>) = profile
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|&(e, v)| (e.ln(), v.ln()))
        .unzip();
    let profile_slope = ols(&px, &py).map(|f| f.slope);
    let low_confidence = profile.len() < 3 || profile.windows(2).any(|w| w[1].1 <= w[0].1);
    Ok(ExponentEstimate {
        alpha_hat: Some(alpha_hat),
        eta_hat: profile_slope.map(|s| alpha_hat + s),
        oscillation_slope,
        profile_slope,
        profile,
        degenerate: false,
        low_confidence,
    })
}

/// Default exponent grid `0.01, 0.02, ..., 0.99`.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..100).map(|k| k as f64 / 100.0).collect()
}

/// Rejects paths on different grids.
pub(crate) fn check_same_grid<A: PathValue, B: PathValue>(
    a: &SampledPath<A>,
    b: &SampledPath<B>,
) -> Result<()> {
    if a.grid().same_as(b.grid()) {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}
