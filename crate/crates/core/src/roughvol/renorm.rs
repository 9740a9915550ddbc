use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::RngStream;
use crate::quad::{adaptive, GaussLegendre};
use crate::stats::mean_estimate;

use super::kernel::KernelSpec;
use super::noise::{rho_bar, MollifierSpec};

/// How to evaluate `c = E(W_hat^{eps,H}_t xi^eps_t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RenormMethod {
    /// Sample mean over simulated noise on a grid of step `eps / 64`.
    MonteCarlo { replications: usize, rng: RngStream },
    /// Tensor Gauss-Legendre quadrature of `int Khat(u) rho_bar_eps(u) du`
    /// with `rho_bar_eps` itself integrated numerically.
    DoubleIntegral,
    /// `eps^{H-1/2} int_0^2 u^{H-1/2} rho_bar(u) du`.
    ClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RenormEstimate {
    pub value: f64,
    /// Monte Carlo only.
    pub std_error: Option<f64>,
    /// Standard error above 10% of the value.
    pub flagged: bool,
}

/// Grid cells per `eps` in the Monte Carlo estimator.
pub const MC_CELLS_PER_EPS: usize = 64;

/// `int_0^2 u^{H-1/2} rho_bar(u) du`, after `w = u^{H+1/2}` removes the
/// singularity at 0.
pub fn mollifier_constant(hurst: f64) -> f64 {
    let p = hurst + 0.5;
    adaptive(&|w: f64| rho_bar(w.powf(1.0 / p)), 0.0, 2f64.powf(p), 1e-14) / p
}

pub fn renorm_constant(
    kernel: &KernelSpec,
    moll: &MollifierSpec,
    method: RenormMethod,
) -> Result<RenormEstimate> {
    let eps = moll.epsilon;
    if 2.0 * eps > kernel.horizon {
        return Err(invalid(
            "epsilon",
            format!(
                "2 eps = {} exceeds the horizon where the kernels agree",
                2.0 * eps
            ),
        ));
    }
    let exact = |value| RenormEstimate {
        value,
        std_error: None,
        flagged: false,
    };
    match method {
        RenormMethod::ClosedForm => Ok(exact(
            eps.powf(kernel.hurst - 0.5) * mollifier_constant(kernel.hurst),
        )),
        RenormMethod::DoubleIntegral => Ok(exact(double_integral(kernel, moll))),
        RenormMethod::MonteCarlo { replications, rng } => {
            monte_carlo(kernel, moll, replications, &rng)
        }
    }
}

fn double_integral(kernel: &KernelSpec, moll: &MollifierSpec) -> f64 {
    let eps = moll.epsilon;
    let p = kernel.hurst + 0.5;
    let gl = GaussLegendre::new(20);
    let rho = |x: f64| moll.eval(x);
    // rho_bar_eps(u) = int rho_eps(x) rho_eps(x + u) dx over [-eps, eps - u]
    let inner = |u: f64| gl.composite(-eps, eps - u, 16, |x| rho(x) * rho(x + u));
    // Khat(u) du = (Khat / K)(u) dw / p with w = u^p
    let outer = gl.composite(0.0, (2.0 * eps).powf(p), 48, |w| {
        let u = w.powf(1.0 / p);
        kernel.cutoff(u) * inner(u)
    });
    outer / p
}

/// Both `xi^eps_t` and `W_hat^{eps,H}_t` are linear in the cell increments.
/// Increments outside the mollifier window around `t` are independent of
/// `xi^eps_t` and add nothing to the mean, so only the window is sampled.
fn monte_carlo(
    kernel: &KernelSpec,
    moll: &MollifierSpec,
    replications: usize,
    rng: &RngStream,
) -> Result<RenormEstimate> {
    if replications < 2 {
        return Err(invalid("replications", "need at least 2"));
    }
    let eps = moll.epsilon;
    let h = eps / MC_CELLS_PER_EPS as f64;
    let p = kernel.hurst + 0.5;
    let gl = GaussLegendre::new(20);
    // Cell j has midpoint t - d_j, d_j = (j + 1/2) h, j in [-64, 63].
    let m = MC_CELLS_PER_EPS as i64;
    let offsets: Vec<f64> = (-m..m).map(|j| (j as f64 + 0.5) * h).collect();
    let a: Vec<f64> = offsets.iter().map(|&d| moll.eval(d)).collect();
    // b_j = int_0^inf Khat(u) rho_eps(d_j - u) du
    let b: Vec<f64> = offsets
        .iter()
        .map(|&d| {
            let (lo, hi) = ((d - eps).max(0.0), d + eps);
            gl.composite(lo.powf(p), hi.powf(p), 8, |w| {
                let u = w.powf(1.0 / p);
                kernel.cutoff(u) * moll.eval(d - u)
            }) / p
        })
        .collect();
    let sd = h.sqrt();
    let mut g = rng.rng();
    let samples: Vec<f64> = (0..replications)
        .map(|_| {
            let (mut xi, mut wh) = (0.0, 0.0);
            for (aj, bj) in a.iter().zip(&b) {
                let z: f64 = StandardNormal.sample(&mut g);
                xi += aj * z * sd;
                wh += bj * z * sd;
            }
            xi * wh
        })
        .collect();
    let est = mean_estimate(&samples);
    Ok(RenormEstimate {
        value: est.mean,
        std_error: Some(est.std_error),
        flagged: est.std_error > 0.1 * est.mean.abs(),
    })
}
