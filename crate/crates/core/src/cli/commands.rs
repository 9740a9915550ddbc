use clap::Args;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::generators::{GridChoice, PathFactory, PathSpec};
use super::{clap_defaults, CliError, Command, ExperimentConfig};
use crate::error::{check_unit_exponent, invalid, Error, Result};
use crate::grid::{RngStream, SampledPath};
use crate::integrate::{
    chen_defect, improper_rough, improper_young, ControlledPath, Controller, InhomRoughPath,
};
use crate::io::write_path;
use crate::norms::{
    besov_embedding_constant, default_alpha_grid, estimate_exponents, singular_besov_norm,
    singular_holder_seminorm,
};
use crate::roughvol::{
    remainder_experiment, renorm_constant, rl_fbm, stationary_fbm, wong_zakai_experiment,
    KernelSpec, MollifierSpec, NoisePath, RemainderExperimentConfig, RenormMethod, TestFunction,
    WongZakaiConfig,
};
use crate::sle::{
    admissible_interval, loewner_trace, sle_driver, sle_regularity_experiment, SleExperimentConfig,
    SleParams, TraceConfig,
};
use crate::stats::loglog_slope;

fn parse_spec(s: &str) -> std::result::Result<String, String> {
    s.parse::<PathSpec>()
        .map(|_| s.to_string())
        .map_err(|e| e.to_string())
}

fn parse_function(s: &str) -> std::result::Result<TestFunction, String> {
    match s {
        "cos" => Ok(TestFunction::Cos),
        "sinplus2" => Ok(TestFunction::SinPlus2),
        "rational" => Ok(TestFunction::Rational),
        _ => Err(format!("unknown function `{s}` (cos, sinplus2, rational)")),
    }
}

macro_rules! clap_default {
    ($($t:ty),*) => {
        $(impl Default for $t {
            fn default() -> Self {
                clap_defaults()
            }
        })*
    };
}

clap_default!(
    NormsArgs,
    YoungArgs,
    RoughArgs,
    SleArgs,
    RoughvolArgs,
    WongZakaiArgs
);

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct NormsArgs {
    /// Path source: CSV file or generator (`power:eta=..`, `brownian`).
    #[arg(long, default_value = "power:eta=0.3", value_parser = parse_spec)]
    pub input: String,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub eta: f64,
    /// Besov regularity; with `--q` adds the singular Besov norm.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 12)]
    pub levels: u32,
    #[arg(long = "per-level", default_value_t = 64)]
    pub per_level: usize,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct YoungArgs {
    /// `power` integrates `t^eta1` against `t^eta2`; any other source is
    /// used as the integrator.
    #[arg(long, default_value = "power")]
    pub generator: String,
    #[arg(long, default_value_t = -0.2, allow_negative_numbers = true)]
    pub eta1: f64,
    #[arg(long, default_value_t = 0.6, allow_negative_numbers = true)]
    pub eta2: f64,
    /// Integrand override.
    #[arg(long, value_parser = parse_spec)]
    pub y: Option<String>,
    /// Integrator override.
    #[arg(long, value_parser = parse_spec)]
    pub x: Option<String>,
    /// Upper limit (default: the horizon).
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 40)]
    pub levels: u32,
    #[arg(long = "per-level", default_value_t = 256)]
    pub per_level: usize,
    #[arg(long, default_value_t = 16384)]
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct RoughArgs {
    #[arg(long, default_value = "brownian", value_parser = parse_spec)]
    pub x: String,
    #[arg(long = "x-hat", default_value = "fbm:H=0.4", value_parser = parse_spec)]
    pub x_hat: String,
    /// Controlled path, with derivative `y-prime` against `x-hat`.
    #[arg(long, default_value = "fbm:H=0.4", value_parser = parse_spec)]
    pub y: String,
    #[arg(long = "y-prime", default_value = "const:c=1", value_parser = parse_spec)]
    pub y_prime: String,
    #[arg(long, default_value_t = 0.45)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.35)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.34, allow_negative_numbers = true)]
    pub eta1: f64,
    #[arg(long, default_value_t = 0.49, allow_negative_numbers = true)]
    pub eta2: f64,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 30)]
    pub levels: u32,
    #[arg(long = "per-level", default_value_t = 64)]
    pub per_level: usize,
    #[arg(long, default_value_t = 4096)]
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SleArgs {
    #[arg(long, default_value_t = 0.5)]
    pub kappa: f64,
    #[arg(long, default_value_t = 4096)]
    pub steps: usize,
    /// Replications of the regularity experiment (needs kappa < 1).
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    #[arg(long = "c-tip", default_value_t = 0.1)]
    pub c_tip: f64,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    /// Exponents of the singular profile check.
    #[arg(long = "profile-alpha", default_value_t = 0.65)]
    pub profile_alpha: f64,
    #[arg(long = "profile-eta", default_value_t = 0.45)]
    pub profile_eta: f64,
}

fn default_renorm_eps() -> Vec<f64> {
    (4..=9).map(|k| 2f64.powi(-k)).collect()
}

fn default_wz_eps() -> Vec<f64> {
    (3..=7).map(|k| 2f64.powi(-k)).collect()
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct RoughvolArgs {
    #[arg(long = "H", default_value_t = 0.4)]
    #[serde(rename = "H")]
    pub hurst: f64,
    #[arg(long = "T", default_value_t = 1.0)]
    #[serde(rename = "T")]
    pub horizon: f64,
    #[arg(long = "eps-list", value_delimiter = ',', default_values_t = default_renorm_eps())]
    pub eps_list: Vec<f64>,
    /// Paths in the remainder diagnostics.
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 4096)]
    pub steps: usize,
    #[arg(long = "mc-reps", default_value_t = 20000)]
    pub mc_reps: usize,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct WongZakaiArgs {
    #[arg(long = "H", default_value_t = 0.4)]
    #[serde(rename = "H")]
    pub hurst: f64,
    #[arg(long = "T", default_value_t = 1.0)]
    #[serde(rename = "T")]
    pub horizon: f64,
    #[arg(long = "eps-list", value_delimiter = ',', default_values_t = default_wz_eps())]
    pub eps_list: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    pub reps: usize,
    #[arg(long, default_value_t = 16384)]
    pub steps: usize,
    #[arg(long = "f", default_value = "cos", value_parser = parse_function)]
    pub f: TestFunction,
    #[arg(long = "mc-reps", default_value_t = 20000)]
    pub mc_reps: usize,
}

impl WongZakaiArgs {
    fn config(&self, seed: u64) -> WongZakaiConfig {
        WongZakaiConfig {
            hurst: self.hurst,
            horizon: self.horizon,
            epsilons: self.eps_list.clone(),
            replications: self.reps,
            steps: self.steps,
            function: self.f,
            seed,
            mc_replications: self.mc_reps,
        }
    }
}

impl SleArgs {
    fn trace(&self) -> TraceConfig {
        TraceConfig {
            steps: self.steps,
            c_tip: self.c_tip,
            horizon: self.horizon,
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("{v} must be positive")))
    }
}

fn check_eps_list(eps: &[f64], horizon: f64, step: f64) -> Result<()> {
    if eps.is_empty() {
        return Err(invalid("eps-list", "empty"));
    }
    for &e in eps {
        positive("eps-list", e)?;
        if 2.0 * e > horizon {
            return Err(invalid("eps-list", format!("{e} exceeds T / 2")));
        }
        if e < 2.0 * step * (1.0 - 1e-12) {
            return Err(invalid(
                "eps-list",
                format!("{e} is below twice the grid step"),
            ));
        }
    }
    Ok(())
}

/// Checks every parameter before any computation.
pub(super) fn validate(cfg: &ExperimentConfig) -> Result<()> {
    match &cfg.command {
        Command::Norms(a) => {
            a.input.parse::<PathSpec>()?;
            check_unit_exponent("alpha", a.alpha)?;
            if !(a.eta <= a.alpha) {
                return Err(invalid("eta", "must not exceed alpha"));
            }
            positive("horizon", a.horizon)?;
            match (a.delta, a.q) {
                (Some(d), Some(q)) => {
                    besov_embedding_constant(d, q)?;
                    if !(a.eta <= d - 1.0 / q + 1e-12) {
                        return Err(invalid("eta", "must not exceed delta - 1/q"));
                    }
                }
                (None, None) => {}
                _ => return Err(invalid("delta", "give both --delta and --q")),
            }
        }
        Command::Young(a) => {
            young_specs(a)?;
            positive("horizon", a.horizon)?;
            if let Some(t) = a.t {
                positive("t", t)?;
            }
        }
        Command::Rough(a) => {
            for s in [&a.x, &a.x_hat, &a.y, &a.y_prime] {
                s.parse::<PathSpec>()?;
            }
            check_unit_exponent("alpha", a.alpha)?;
            check_unit_exponent("beta", a.beta)?;
            if !(a.alpha + 2.0 * a.beta > 1.0) {
                return Err(invalid("beta", "alpha + 2 beta must exceed 1"));
            }
            positive("horizon", a.horizon)?;
        }
        Command::Sle(a) => {
            if !(a.kappa >= 0.0 && a.kappa < 8.0) {
                return Err(invalid("kappa", format!("{} is not in [0, 8)", a.kappa)));
            }
            a.trace().validate()?;
            check_unit_exponent("profile-alpha", a.profile_alpha)?;
            if !(a.profile_eta <= a.profile_alpha) {
                return Err(invalid("profile-eta", "must not exceed profile-alpha"));
            }
        }
        Command::Roughvol(a) => {
            KernelSpec::new(a.hurst, a.horizon)?;
            if a.steps < 2 || a.reps == 0 || a.mc_reps < 2 {
                return Err(invalid(
                    "steps",
                    "steps >= 2, reps >= 1 and mc-reps >= 2 required",
                ));
            }
            check_eps_list(&a.eps_list, a.horizon, 0.0)?;
        }
        Command::Wongzakai(a) => a.config(cfg.seed).validate()?,
    }
    Ok(())
}

fn young_specs(a: &YoungArgs) -> Result<(PathSpec, PathSpec)> {
    let x = match (&a.x, a.generator.as_str()) {
        (Some(s), _) => s.parse()?,
        (None, "power") => PathSpec::Power { eta: a.eta2 },
        (None, g) => g.parse()?,
    };
    let y = match &a.y {
        Some(s) => s.parse()?,
        None => PathSpec::Power { eta: a.eta1 },
    };
    Ok((y, x))
}

pub(super) struct Output {
    pub files: Vec<(String, Vec<u8>)>,
    pub flags: Vec<String>,
}

fn report(cfg: &ExperimentConfig, result: serde_json::Value, flags: &[String]) -> Result<Vec<u8>> {
    let v = json!({ "config": cfg, "result": result, "flags": flags });
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|v| format!("{v:.16e}")))?;
    }
    w.into_inner().map_err(|e| Error::Malformed(e.to_string()))
}

fn path_bytes<V: crate::grid::PathValue>(p: &SampledPath<V>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_path(p, &mut buf)?;
    Ok(buf)
}

pub(super) fn execute(cfg: &ExperimentConfig) -> std::result::Result<Output, CliError> {
    Ok(match &cfg.command {
        Command::Norms(a) => norms(cfg, a)?,
        Command::Young(a) => young(cfg, a)?,
        Command::Rough(a) => rough(cfg, a)?,
        Command::Sle(a) => sle(cfg, a)?,
        Command::Roughvol(a) => roughvol(cfg, a)?,
        Command::Wongzakai(a) => wongzakai(cfg, a)?,
    })
}

fn norms(cfg: &ExperimentConfig, a: &NormsArgs) -> Result<Output> {
    let spec: PathSpec = a.input.parse()?;
    let choice = GridChoice {
        horizon: a.horizon,
        levels: a.levels,
        per_level: a.per_level,
        steps: 1 << 12,
    };
    let fac = PathFactory::new(&[&spec], choice, cfg.seed)?;
    let path = fac.realise(&spec)?;
    let norm = singular_holder_seminorm(&path, a.alpha, a.eta)?;
    let est = estimate_exponents(&path, &default_alpha_grid())?;
    let besov = match (a.delta, a.q) {
        (Some(d), Some(q)) => Some(json!({
            "delta": d,
            "q": q,
            "value": singular_besov_norm(&path, d, q, a.eta)?,
            "embedding_constant": besov_embedding_constant(d, q)?,
        })),
        _ => None,
    };
    let result = json!({
        "grid_points": path.len(),
        "value": norm.value,
        "eps_profile": norm.eps_profile,
        "alpha_hat": est.alpha_hat,
        "eta_hat": est.eta_hat,
        "estimate": est,
        "besov": besov,
    });
    Ok(Output {
        files: vec![("report.json".into(), report(cfg, result, &[])?)],
        flags: vec![],
    })
}

fn young(cfg: &ExperimentConfig, a: &YoungArgs) -> Result<Output> {
    let (ys, xs) = young_specs(a)?;
    let choice = GridChoice {
        horizon: a.horizon,
        levels: a.levels,
        per_level: a.per_level,
        steps: a.steps,
    };
    let fac = PathFactory::new(&[&ys, &xs], choice, cfg.seed)?;
    let (y, x) = (fac.realise(&ys)?, fac.realise(&xs)?);
    let t = a.t.unwrap_or(fac.grid().horizon());
    let r = improper_young(&y, &x, t, a.eta1, a.eta2)?;
    let mut flags = Vec::new();
    if r.diverging {
        flags.push(format!(
            "improper Young integral diverges (fitted rate {:?})",
            r.fitted_rate
        ));
    }
    let result = json!({
        "value": r.value,
        "I_n": r.levels,
        "fitted_rate": r.fitted_rate,
        "predicted_rate": r.predicted_rate,
        "convergence_expected": r.predicted_rate > 0.0,
        "report": r,
    });
    Ok(Output {
        files: vec![("report.json".into(), report(cfg, result, &flags)?)],
        flags,
    })
}

fn rough(cfg: &ExperimentConfig, a: &RoughArgs) -> Result<Output> {
    let specs: Vec<PathSpec> = [&a.x, &a.x_hat, &a.y, &a.y_prime]
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_>>()?;
    let choice = GridChoice {
        horizon: a.horizon,
        levels: a.levels,
        per_level: a.per_level,
        steps: a.steps,
    };
    let refs: Vec<&PathSpec> = specs.iter().collect();
    let fac = PathFactory::new(&refs, choice, cfg.seed)?;
    let paths = specs
        .iter()
        .map(|s| fac.realise(s))
        .collect::<Result<Vec<_>>>()?;
    let rp = InhomRoughPath::from_left_point(paths[0].clone(), paths[1].clone(), a.alpha, a.beta)?;
    let cp = ControlledPath::new(
        paths[2].clone(),
        paths[3].clone(),
        Controller::XHat,
        paths[1].clone(),
        a.beta,
    )?;
    let t = a.t.unwrap_or(fac.grid().horizon());
    let r = improper_rough(&cp, &rp, t, a.eta1, a.eta2)?;
    let chen = chen_defect(&rp);
    let mut flags = Vec::new();
    if r.report.diverging {
        flags.push(format!(
            "improper rough integral diverges (fitted rate {:?})",
            r.report.fitted_rate
        ));
    }
    let result = json!({
        "value": r.report.value,
        "I_n": r.report.levels,
        "fitted_rate": r.report.fitted_rate,
        "predicted_rate": r.report.predicted_rate,
        "conditions": r.conditions,
        "chen": chen,
        "report": r.report,
    });
    Ok(Output {
        files: vec![
            ("report.json".into(), report(cfg, result, &flags)?),
            ("z.csv".into(), path_bytes(r.z.y())?),
        ],
        flags,
    })
}

fn sle(cfg: &ExperimentConfig, a: &SleArgs) -> Result<Output> {
    let trace_cfg = a.trace();
    let driver = sle_driver(a.kappa, &trace_cfg, &RngStream::new(cfg.seed, 0))?;
    let trace = loewner_trace(&driver, &trace_cfg)?;
    let mut flags = Vec::new();
    if !trace.flagged.is_empty() {
        flags.push(format!(
            "{} trace points hit the real axis",
            trace.flagged.len()
        ));
    }
    let params = if a.kappa > 0.0 {
        Some(SleParams::new(a.kappa)?)
    } else {
        None
    };
    let interval = if a.kappa > 0.0 {
        Some(admissible_interval(a.kappa)?)
    } else {
        None
    };
    let zero_driver_error = (a.kappa == 0.0).then(|| {
        trace
            .path
            .times()
            .iter()
            .zip(trace.path.values())
            .map(|(&t, z)| (z - Complex64::new(0.0, 2.0 * t.sqrt())).norm() / (2.0 * t.sqrt()))
            .fold(0.0, f64::max)
    });
    let experiment = if a.kappa < 1.0 && a.reps > 0 {
        let mut e = SleExperimentConfig::new(a.kappa, a.reps, cfg.seed);
        e.trace = trace_cfg;
        e.profile_alpha = a.profile_alpha;
        e.profile_eta = a.profile_eta;
        let r = sle_regularity_experiment(&e)?;
        if r.failures > 0 {
            flags.push(format!(
                "{} replications dropped by branch flags",
                r.failures
            ));
        }
        Some(r)
    } else {
        None
    };
    let eps_profile: Option<Vec<(f64, f64)>> = experiment.as_ref().map(|r| {
        r.eps
            .iter()
            .copied()
            .zip(r.profile_median.iter().copied())
            .collect()
    });
    let result = json!({
        "alpha_star": params.map(|p| p.alpha_star),
        "alpha_hat_median": experiment.as_ref().and_then(|r| r.alpha_hat.map(|q| q.median)),
        "eps_profile": eps_profile,
        "params": params,
        "admissible_interval": interval,
        "zero_driver_max_rel_error": zero_driver_error,
        "trace_flagged": trace.flagged.len(),
        "experiment": experiment,
    });
    Ok(Output {
        files: vec![
            ("report.json".into(), report(cfg, result, &flags)?),
            ("trace.csv".into(), path_bytes(&trace.path)?),
        ],
        flags,
    })
}

fn roughvol(cfg: &ExperimentConfig, a: &RoughvolArgs) -> Result<Output> {
    let kernel = KernelSpec::new(a.hurst, a.horizon)?;
    let mut flags = Vec::new();
    let mut rows = Vec::new();
    let mut c_values = Vec::new();
    for (i, &e) in a.eps_list.iter().enumerate() {
        let m = MollifierSpec::new(e)?;
        let closed = renorm_constant(&kernel, &m, RenormMethod::ClosedForm)?.value;
        let quad = renorm_constant(&kernel, &m, RenormMethod::DoubleIntegral)?.value;
        let mc = renorm_constant(
            &kernel,
            &m,
            RenormMethod::MonteCarlo {
                replications: a.mc_reps,
                rng: RngStream::new(cfg.seed ^ 0xc0ffee, i as u64),
            },
        )?;
        if mc.flagged {
            flags.push(format!(
                "Monte Carlo estimate of c at eps = {e} is unreliable"
            ));
        }
        let se = mc.std_error.unwrap_or(0.0);
        rows.push(vec![e, mc.value, se, quad, closed]);
        c_values.push(json!({
            "epsilon": e, "mc": mc.value, "mc_std_error": se, "mc_flagged": mc.flagged,
            "double_integral": quad, "closed_form": closed,
        }));
    }
    let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    let slopes = json!({
        "closed_form": loglog_slope(&a.eps_list, &col(4)),
        "double_integral": loglog_slope(&a.eps_list, &col(3)),
        "mc": loglog_slope(&a.eps_list, &col(1)),
        "expected": a.hurst - 0.5,
    });

    let noise = NoisePath::sample(
        a.horizon,
        a.steps,
        kernel.support_end(),
        0.0,
        &RngStream::new(cfg.seed, 0),
    )?;
    let w = noise.on_unit()?;
    let wh = rl_fbm(&noise, a.hurst)?;
    let what = stationary_fbm(&noise, &kernel)?;
    let paths_csv = csv_bytes(
        &["t", "w", "w_rl", "w_stationary"],
        (0..w.len()).map(|i| {
            vec![
                w.times()[i],
                w.values()[i],
                wh.values()[i],
                what.values()[i],
            ]
        }),
    )?;
    let remainder = remainder_experiment(&RemainderExperimentConfig {
        hurst: a.hurst,
        horizon: a.horizon,
        steps: a.steps,
        replications: a.reps,
        seed: cfg.seed,
    })?;
    if remainder.control_norm != 0.0 || remainder.control_envelope != 0.0 {
        flags.push("zero negative-time noise left a non-zero remainder".into());
    }
    if remainder.finite < a.reps {
        flags.push("remainder norm not finite on some paths".into());
    }
    let lattice: Vec<f64> = (1..=2000)
        .map(|i| 2.0 * a.horizon * i as f64 / 2000.0)
        .collect();
    let result = json!({
        "c_values": c_values,
        "c_slopes": slopes,
        "kernel_domination_constant": kernel.domination_constant(&lattice),
        "remainder": remainder,
    });
    Ok(Output {
        files: vec![
            ("report.json".into(), report(cfg, result, &flags)?),
            (
                "renorm.csv".into(),
                csv_bytes(&["epsilon", "c_mc", "c_mc_se", "c_quad", "c_closed"], rows)?,
            ),
            ("paths.csv".into(), paths_csv),
        ],
        flags,
    })
}

fn wongzakai(cfg: &ExperimentConfig, a: &WongZakaiArgs) -> Result<Output> {
    let r = wong_zakai_experiment(&a.config(cfg.seed))?;
    let mut flags = Vec::new();
    if !r.corrected_decreasing {
        flags.push("median corrected error is not decreasing in eps".into());
    }
    for c in r.c_values.iter().filter(|c| c.mc_flagged) {
        flags.push(format!(
            "Monte Carlo estimate of c at eps = {} is unreliable",
            c.epsilon
        ));
    }
    let rows = r.c_values.iter().enumerate().map(|(i, c)| {
        vec![
            c.epsilon,
            c.mc,
            c.double_integral,
            c.closed_form,
            r.sup_errors[i],
            r.uncorrected_errors[i],
        ]
    });
    let table = csv_bytes(
        &[
            "epsilon",
            "c_mc",
            "c_quad",
            "c_closed",
            "err_corrected_median",
            "err_uncorrected_median",
        ],
        rows,
    )?;
    let result = serde_json::to_value(&r)?;
    Ok(Output {
        files: vec![
            ("report.json".into(), report(cfg, result, &flags)?),
            ("wongzakai.csv".into(), table),
        ],
        flags,
    })
}
