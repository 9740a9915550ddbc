use serde::Serialize;

use super::improper::{build_report, dyadic_anchors, ImproperLevel, ImproperReport};
use crate::error::{invalid, Result};
use crate::grid::SampledPath;
use crate::norms::check_same_grid;

/// A grid integral and whether its limits had to be snapped to the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct YoungValue {
    pub value: f64,
    pub snapped: bool,
}

/// Snaps `[s, t]` to grid indices.
pub(crate) fn snap_interval(path: &SampledPath, s: f64, t: f64) -> Result<(usize, usize, bool)> {
    let g = path.grid();
    if !(s < t) {
        return Err(invalid("interval", format!("need s < t, got [{s}, {t}]")));
    }
    let (i, ei) = match g.find(s) {
        Some(i) => (i, false),
        None => (g.nearest(s), true),
    };
    let (j, ej) = match g.find(t) {
        Some(j) => (j, false),
        None => (g.nearest(t), true),
    };
    if j <= i {
        return Err(invalid(
            "interval",
            format!("[{s}, {t}] collapses on the grid"),
        ));
    }
    Ok((i, j, ei || ej))
}

pub(crate) fn left_point_sum(y: &[f64], x: &[f64], i: usize, j: usize) -> f64 {
    (i..j).map(|u| y[u] * (x[u + 1] - x[u])).sum()
}

/// Left-point sum `sum Y_u (X_{u+} - X_u)` over grid points in `[s, t)`.
pub fn young_integral(y: &SampledPath, x: &SampledPath, s: f64, t: f64) -> Result<YoungValue> {
    check_same_grid(y, x)?;
    let (i, j, snapped) = snap_interval(y, s, t)?;
    Ok(YoungValue {
        value: left_point_sum(y.values(), x.values(), i, j),
        snapped,
    })
}

/// Improper Young integral `int_{0+}^t Y dX` along the anchors `2^-n t`.
///
/// `eta1`, `eta2` are the singular exponents of `Y` and `X`; they only
/// enter the predicted rate `min(eta1, 0) + eta2`.
pub fn improper_young(
    y: &SampledPath,
    x: &SampledPath,
    t: f64,
    eta1: f64,
    eta2: f64,
) -> Result<ImproperReport> {
    check_same_grid(y, x)?;
    let g = y.grid();
    let ti = g
        .find(t)
        .ok_or_else(|| invalid("t", format!("{t} is not a grid point")))?;
    let anchors = dyadic_anchors(g, ti);
    if anchors.len() < 3 {
        return Err(invalid("grid", "fewer than three dyadic anchors below t"));
    }
    // Running sums so each truncation costs O(1).
    let (yv, xv) = (y.values(), x.values());
    let mut running = vec![0.0; ti + 1];
    for u in (0..ti).rev() {
        running[u] = running[u + 1] + yv[u] * (xv[u + 1] - xv[u]);
    }
    let snapped = anchors.iter().any(|a| !a.2);
    let levels = anchors
        .iter()
        .map(|&(n, idx, _)| ImproperLevel {
            n,
            anchor: g.points()[idx],
            value: running[idx],
        })
        .collect();
    Ok(build_report(levels, eta1.min(0.0) + eta2, snapped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_uniform_grid, Grid};
    use approx::assert_relative_eq;

    #[test]
    fn linear_integrand() {
        let g = make_uniform_grid(0.0, 1.0, (1 << 12) + 1).unwrap();
        let p = SampledPath::from_fn(g, |t| t).unwrap();
        let v = young_integral(&p, &p, 0.0, 1.0).unwrap();
        assert!((v.value - 0.5).abs() < 2e-4);
        assert!(!v.snapped);
        let off = young_integral(&p, &p, 0.1234567, 1.0).unwrap();
        assert!(off.snapped);
    }

    #[test]
    fn power_family_closed_form() {
        let g = make_uniform_grid(0.25, 1.0, (1 << 16) + 1).unwrap();
        let y = SampledPath::from_fn(g.clone(), |t| t.powf(-0.2)).unwrap();
        let x = SampledPath::from_fn(g, |t| t.powf(0.6)).unwrap();
        let v = young_integral(&y, &x, 0.25, 1.0).unwrap().value;
        let exact = 1.5 * (1.0 - 0.25f64.powf(0.4));
        assert!((v - exact).abs() / exact < 1e-3);
    }

    #[test]
    fn constant_integrand_and_additivity() {
        let g = make_uniform_grid(0.0, 1.0, 33).unwrap();
        let x = SampledPath::from_fn(g.clone(), |t| (5.0 * t).sin()).unwrap();
        let c = SampledPath::constant(g, 2.5).unwrap();
        let v = young_integral(&c, &x, 0.25, 0.75).unwrap().value;
        let direct = 2.5 * (x.value_at(0.75) - x.value_at(0.25));
        assert_relative_eq!(v, direct, epsilon = 1e-14);

        let whole = young_integral(&x, &x, 0.0, 1.0).unwrap().value;
        let split = young_integral(&x, &x, 0.0, 0.40625).unwrap().value
            + young_integral(&x, &x, 0.40625, 1.0).unwrap().value;
        assert_relative_eq!(whole, split, epsilon = 1e-14);
    }

    #[test]
    fn improper_power_families() {
        let g = Grid::dyadic(1.0, 40, 256).unwrap();
        let y = SampledPath::from_fn(g.clone(), |t| t.powf(-0.2)).unwrap();
        let x = SampledPath::from_fn(g.clone(), |t| t.powf(0.6)).unwrap();
        let r = improper_young(&y, &x, 1.0, -0.2, 0.6).unwrap();
        assert!((r.value - 1.5).abs() / 1.5 < 1e-2, "{}", r.value);
        assert!((r.fitted_rate.unwrap() - 0.4).abs() < 0.1);
        assert!(!r.diverging);

        let y = SampledPath::from_fn(g.clone(), |t| t.powf(-0.6)).unwrap();
        let x = SampledPath::from_fn(g.clone(), |t| t.powf(0.4)).unwrap();
        let r = improper_young(&y, &x, 1.0, -0.6, 0.4).unwrap();
        assert!(r.diverging);
        assert!((r.fitted_rate.unwrap() + 0.2).abs() < 0.05);

        let c = SampledPath::constant(g, 3.0).unwrap();
        let r = improper_young(&c, &x, 1.0, 0.0, 0.4).unwrap();
        assert!((r.value - 3.0).abs() < 1e-6);
    }
}
