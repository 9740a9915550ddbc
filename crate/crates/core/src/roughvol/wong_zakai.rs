use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::{RngStream, SampledPath};
use crate::norms::check_same_grid;
use crate::stats::{loglog_slope, median};

use super::fbm::{mollified_rl_fbm, rl_fbm};
use super::kernel::KernelSpec;
use super::noise::{mollified_noise, MollifierSpec, NoisePath};
use super::renorm::{renorm_constant, RenormMethod};

/// Running left-point sum `t_k -> sum_{j<k} f(W^H_{t_j}) (W_{t_{j+1}} - W_{t_j})`.
pub fn ito_integral_oracle(
    f: impl Fn(f64) -> f64,
    wh: &SampledPath,
    w: &SampledPath,
) -> Result<SampledPath> {
    check_same_grid(wh, w)?;
    let (a, b) = (wh.values(), w.values());
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(a.len());
    out.push(0.0);
    for j in 0..a.len() - 1 {
        acc += f(a[j]) * (b[j + 1] - b[j]);
        out.push(acc);
    }
    SampledPath::new(w.grid().clone(), out)
}

fn running_trapezoid(h: f64, g: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(g.len());
    out.push(0.0);
    for w in g.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Smooth approximation and its renormalised version on `[0, T]`.
#[derive(Clone, Debug)]
pub struct WongZakaiPaths {
    /// `int_0^t f(W^{eps,H}) xi^eps ds`.
    pub uncorrected: SampledPath,
    /// `uncorrected - c int_0^t Df(W^{eps,H}) ds`.
    pub corrected: SampledPath,
}

/// Trapezoidal time integrals of the mollified model for one noise path.
pub fn wong_zakai_approximation(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    noise: &NoisePath,
    hurst: f64,
    moll: &MollifierSpec,
    c: f64,
) -> Result<WongZakaiPaths> {
    let xi = mollified_noise(noise, moll)?;
    let weh = mollified_rl_fbm(&xi, hurst)?;
    let h = noise.step();
    let prod: Vec<f64> = weh
        .values()
        .iter()
        .zip(xi.values())
        .map(|(&w, &x)| f(w) * x)
        .collect();
    let drift: Vec<f64> = weh.values().iter().map(|&w| df(w)).collect();
    let u = running_trapezoid(h, &prod);
    let d = running_trapezoid(h, &drift);
    let corrected = u.iter().zip(&d).map(|(a, b)| a - c * b).collect();
    let grid = noise.unit_grid().clone();
    Ok(WongZakaiPaths {
        uncorrected: SampledPath::new(grid.clone(), u)?,
        corrected: SampledPath::new(grid, corrected)?,
    })
}

/// Integrands of the experiment, each with its derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    Cos,
    /// `sin(x) + 2`.
    SinPlus2,
    /// `1 / (1 + x^2)`.
    Rational,
}

impl TestFunction {
    pub fn f(&self, x: f64) -> f64 {
        match self {
            Self::Cos => x.cos(),
            Self::SinPlus2 => x.sin() + 2.0,
            Self::Rational => 1.0 / (1.0 + x * x),
        }
    }

    pub fn df(&self, x: f64) -> f64 {
        match self {
            Self::Cos => -x.sin(),
            Self::SinPlus2 => x.cos(),
            Self::Rational => -2.0 * x / ((1.0 + x * x) * (1.0 + x * x)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Cos => "cos",
            Self::SinPlus2 => "sinplus2",
            Self::Rational => "rational",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct WongZakaiConfig {
    pub hurst: f64,
    pub horizon: f64,
    /// Decreasing.
    pub epsilons: Vec<f64>,
    pub replications: usize,
    /// Grid steps on `[0, T]`.
    pub steps: usize,
    pub function: TestFunction,
    pub seed: u64,
    /// Replications of the Monte Carlo estimate of `c`.
    pub mc_replications: usize,
}

impl WongZakaiConfig {
    /// `eps = 2^-3 .. 2^-7`, `T = 1`, `2^14` steps.
    pub fn standard(hurst: f64, function: TestFunction, replications: usize, seed: u64) -> Self {
        Self {
            hurst,
            horizon: 1.0,
            epsilons: (3..=7).map(|k| 2f64.powi(-k)).collect(),
            replications,
            steps: 1 << 14,
            function,
            seed,
            mc_replications: 20000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hurst > 0.25 && self.hurst < 0.5) {
            return Err(invalid(
                "hurst",
                format!("{} is not in (1/4, 1/2)", self.hurst),
            ));
        }
        if !(self.horizon > 0.0) {
            return Err(invalid("horizon", "must be positive"));
        }
        if self.epsilons.len() < 2 {
            return Err(invalid("epsilons", "need at least two scales"));
        }
        if !self.epsilons.windows(2).all(|w| w[1] < w[0])
            || !(self.epsilons[self.epsilons.len() - 1] > 0.0)
        {
            return Err(invalid(
                "epsilons",
                "must be positive and strictly decreasing",
            ));
        }
        if 2.0 * self.epsilons[0] > self.horizon {
            return Err(invalid("epsilons", "largest eps exceeds T / 2"));
        }
        if self.replications == 0 {
            return Err(invalid("replications", "must be positive"));
        }
        if self.steps == 0 {
            return Err(invalid("steps", "must be positive"));
        }
        let h = self.horizon / self.steps as f64;
        let e = self.epsilons[self.epsilons.len() - 1];
        if h > e * e * (1.0 + 1e-12) {
            return Err(invalid(
                "steps",
                format!("grid step {h} exceeds eps_min^2 = {}", e * e),
            ));
        }
        Ok(())
    }
}

/// Three estimates of `c^{eps,H}` at one scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RenormValues {
    pub epsilon: f64,
    pub mc: f64,
    pub mc_std_error: f64,
    pub mc_flagged: bool,
    pub double_integral: f64,
    pub closed_form: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FittedRates {
    /// Log-log slope of median corrected error against `eps`.
    pub corrected: Option<f64>,
    pub uncorrected: Option<f64>,
    /// Log-log slope of the closed-form constant against `eps`.
    pub renorm: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WongZakaiReport {
    pub config: WongZakaiConfig,
    pub epsilons: Vec<f64>,
    pub c_values: Vec<RenormValues>,
    /// Per-`eps` median of `sup_t |corrected - Ito|`.
    pub sup_errors: Vec<f64>,
    pub uncorrected_errors: Vec<f64>,
    pub fitted_rates: FittedRates,
    pub corrected_decreasing: bool,
    pub c_increasing: bool,
}

fn sup_distance(a: &SampledPath, b: &SampledPath) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Compares the renormalised and plain smooth approximations with the Itô
/// integral on shared noise, for every `eps` and replication.
pub fn wong_zakai_experiment(cfg: &WongZakaiConfig) -> Result<WongZakaiReport> {
    cfg.validate()?;
    let kernel = KernelSpec::new(cfg.hurst, cfg.horizon)?;
    let molls = cfg
        .epsilons
        .iter()
        .map(|&e| MollifierSpec::new(e))
        .collect::<Result<Vec<_>>>()?;
    let c_values = molls
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let closed = renorm_constant(&kernel, m, RenormMethod::ClosedForm)?.value;
            let quad = renorm_constant(&kernel, m, RenormMethod::DoubleIntegral)?.value;
            let mc = renorm_constant(
                &kernel,
                m,
                RenormMethod::MonteCarlo {
                    replications: cfg.mc_replications,
                    rng: RngStream::new(cfg.seed ^ 0xc0ffee, i as u64),
                },
            )?;
            Ok(RenormValues {
                epsilon: m.epsilon,
                mc: mc.value,
                mc_std_error: mc.std_error.unwrap_or(0.0),
                mc_flagged: mc.flagged,
                double_integral: quad,
                closed_form: closed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let reach = 2.0 * cfg.epsilons[0];
    let f = cfg.function;
    let errors: Vec<Vec<(f64, f64)>> = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|rep| {
            let noise = NoisePath::sample(
                cfg.horizon,
                cfg.steps,
                reach,
                reach,
                &RngStream::new(cfg.seed, rep),
            )?;
            let wh = rl_fbm(&noise, cfg.hurst)?;
            let ito = ito_integral_oracle(|x| f.f(x), &wh, &noise.on_unit()?)?;
            molls
                .iter()
                .zip(&c_values)
                .map(|(m, c)| {
                    let p = wong_zakai_approximation(
                        |x| f.f(x),
                        |x| f.df(x),
                        &noise,
                        cfg.hurst,
                        m,
                        c.closed_form,
                    )?;
                    Ok((
                        sup_distance(&p.corrected, &ito),
                        sup_distance(&p.uncorrected, &ito),
                    ))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let column = |i: usize, second: bool| -> f64 {
        let v: Vec<f64> = errors
            .iter()
            .map(|r| if second { r[i].1 } else { r[i].0 })
            .collect();
        median(&v).unwrap_or(f64::NAN)
    };
    let sup_errors: Vec<f64> = (0..molls.len()).map(|i| column(i, false)).collect();
    let uncorrected_errors: Vec<f64> = (0..molls.len()).map(|i| column(i, true)).collect();
    let closed: Vec<f64> = c_values.iter().map(|c| c.closed_form).collect();
    Ok(WongZakaiReport {
        config: cfg.clone(),
        epsilons: cfg.epsilons.clone(),
        fitted_rates: FittedRates {
            corrected: loglog_slope(&cfg.epsilons, &sup_errors),
            uncorrected: loglog_slope(&cfg.epsilons, &uncorrected_errors),
            renorm: loglog_slope(&cfg.epsilons, &closed),
        },
        corrected_decreasing: sup_errors.windows(2).all(|w| w[1] < w[0]),
        c_increasing: closed.windows(2).all(|w| w[1] > w[0]),
        c_values,
        sup_errors,
        uncorrected_errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::mean_estimate;

    #[test]
    fn oracle_reductions() {
        let nz = NoisePath::sample(1.0, 1024, 0.0, 0.0, &RngStream::new(4, 0)).unwrap();
        let w = nz.on_unit().unwrap();
        let wh = rl_fbm(&nz, 0.4).unwrap();
        let one = ito_integral_oracle(|_| 1.0, &wh, &w).unwrap();
        for (a, b) in one.values().iter().zip(w.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ito_formula_in_mean() {
        // sum W_j dW_j - (W_T^2 - T)/2 = -(sum dW^2 - T)/2 has mean 0
        let diffs: Vec<f64> = (0..400)
            .map(|r| {
                let nz = NoisePath::sample(1.0, 256, 0.0, 0.0, &RngStream::new(8, r)).unwrap();
                let w = nz.on_unit().unwrap();
                let wh = rl_fbm(&nz, 0.5).unwrap();
                let i = ito_integral_oracle(|x| x, &wh, &w).unwrap().last();
                i - (w.last() * w.last() - 1.0) / 2.0
            })
            .collect();
        let e = mean_estimate(&diffs);
        assert!(e.mean.abs() < 3.0 * e.std_error + 1e-12, "{e:?}");
    }

    #[test]
    fn constant_integrand_recovers_noise() {
        // drift noise W(t) = t: the mollified noise is 1 up to the Riemann
        // sum error of rho_eps
        let g = NoisePath::lattice(1.0, 4096, 0.25, 0.25).unwrap();
        let nz = NoisePath::new(SampledPath::from_fn(g, |t| t).unwrap(), 1.0, 4096).unwrap();
        let m = MollifierSpec::new(1.0 / 32.0).unwrap();
        let p = wong_zakai_approximation(|_| 1.0, |_| 0.0, &nz, 0.4, &m, 5.0).unwrap();
        assert_eq!(p.corrected.values(), p.uncorrected.values());
        let err = sup_distance(&p.corrected, &nz.on_unit().unwrap());
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn rejects_coarse_grid() {
        let mut cfg = WongZakaiConfig::standard(0.4, TestFunction::Cos, 2, 0);
        cfg.steps = 1 << 12;
        assert!(cfg.validate().is_err());
        cfg.steps = 1 << 14;
        assert!(cfg.validate().is_ok());
        cfg.hurst = 0.5;
        assert!(cfg.validate().is_err());
    }
}
