use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_unit_exponent, invalid, Result};
use crate::grid::SampledPath;
use crate::norms::{check_same_grid, ProfilePoint};

/// Which level-one path of a rough path a controlled path refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Controller {
    X,
    XHat,
}

/// Pair `(Y, Y')` controlled by a path `C`, with remainder
/// `R_{s,t} = Y_t - Y_s - Y'_s (C_t - C_s)` derived on demand.
#[derive(Clone, Debug)]
pub struct ControlledPath {
    y: SampledPath,
    y_prime: SampledPath,
    controller: Controller,
    controller_path: SampledPath,
    gamma: f64,
}

impl ControlledPath {
    pub fn new(
        y: SampledPath,
        y_prime: SampledPath,
        controller: Controller,
        controller_path: SampledPath,
        gamma: f64,
    ) -> Result<Self> {
        check_unit_exponent("gamma", gamma)?;
        check_same_grid(&y, &y_prime)?;
        check_same_grid(&y, &controller_path)?;
        Ok(Self {
            y,
            y_prime,
            controller,
            controller_path,
            gamma,
        })
    }

    pub fn y(&self) -> &SampledPath {
        &self.y
    }

    pub fn y_prime(&self) -> &SampledPath {
        &self.y_prime
    }

    pub fn controller(&self) -> Controller {
        self.controller
    }

    pub fn controller_path(&self) -> &SampledPath {
        &self.controller_path
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `R_{i,j}` for grid indices `i <= j`.
    pub fn remainder(&self, i: usize, j: usize) -> f64 {
        let (y, yp, c) = (
            self.y.values(),
            self.y_prime.values(),
            self.controller_path.values(),
        );
        y[j] - y[i] - yp[i] * (c[j] - c[i])
    }
}

/// `(f(Y), Df(Y) Y')` with the same controller.
pub fn controlled_compose(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    cp: &ControlledPath,
) -> Result<ControlledPath> {
    let y = cp.y.map(&f)?;
    let values =
        cp.y.values()
            .iter()
            .zip(cp.y_prime.values())
            .map(|(&v, &d)| df(v) * d)
            .collect();
    let y_prime = SampledPath::new(cp.y.grid().clone(), values)?;
    ControlledPath::new(
        y,
        y_prime,
        cp.controller,
        cp.controller_path.clone(),
        cp.gamma,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ControlledNormReport {
    /// Larger of the two weighted parts.
    pub value: f64,
    /// `max |Y'_t - Y'_s| / (s^{eta-(gamma+beta)} |t-s|^gamma)`.
    pub derivative_part: f64,
    /// `max |R_{s,t}| / (s^{eta-(gamma+beta)} |t-s|^{gamma+beta})`.
    pub remainder_part: f64,
    /// `(eps, eps^{gamma+beta-eta} ||Y,Y'||_{gamma+beta;[eps,T]})` per grid point.
    pub eps_profile: Vec<ProfilePoint>,
}

/// Singular controlled seminorm over grid pairs, taking the maximum of the
/// derivative part and the remainder part.
pub fn singular_controlled_norm(
    cp: &ControlledPath,
    gamma: f64,
    beta: f64,
    eta: f64,
) -> Result<ControlledNormReport> {
    check_unit_exponent("gamma", gamma)?;
    check_unit_exponent("beta", beta)?;
    if !(eta <= gamma + beta) {
        return Err(invalid(
            "eta",
            format!("{eta} must not exceed gamma + beta"),
        ));
    }
    let t = cp.y.times();
    if t[0] <= 0.0 {
        return Err(invalid("path", "singular norms need a grid inside (0, T]"));
    }
    let n = t.len();
    let yp = cp.y_prime.values();
    let rows: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (mut a, mut b) = (0.0f64, 0.0f64);
            for j in i + 1..n {
                let dt = t[j] - t[i];
                let d = (yp[j] - yp[i]).abs();
                if d > 0.0 {
                    a = a.max(d / dt.powf(gamma));
                }
                let r = cp.remainder(i, j).abs();
                if r > 0.0 {
                    b = b.max(r / dt.powf(gamma + beta));
                }
            }
            (a, b)
        })
        .collect();
    let w = gamma + beta - eta;
    let weight = |s: f64, m: f64| if m > 0.0 { s.powf(w) * m } else { 0.0 };
    let derivative_part = t
        .iter()
        .zip(&rows)
        .map(|(&s, r)| weight(s, r.0))
        .fold(0.0, f64::max);
    let remainder_part = t
        .iter()
        .zip(&rows)
        .map(|(&s, r)| weight(s, r.1))
        .fold(0.0, f64::max);
    let mut tail = 0.0f64;
    let mut eps_profile: Vec<ProfilePoint> = Vec::with_capacity(n - 1);
    for i in (0..n - 1).rev() {
        tail = tail.max(rows[i].0.max(rows[i].1));
        eps_profile.push(ProfilePoint {
            eps: t[i],
            weighted: weight(t[i], tail),
        });
    }
    eps_profile.reverse();
    Ok(ControlledNormReport {
        value: derivative_part.max(remainder_part),
        derivative_part,
        remainder_part,
        eps_profile,
    })
}
