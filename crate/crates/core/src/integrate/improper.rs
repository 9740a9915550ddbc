use serde::Serialize;

use crate::grid::Grid;
use crate::stats::ols;

/// One dyadic truncation `I_n = int_{2^-n t}^t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ImproperLevel {
    pub n: u32,
    /// Grid point used as lower limit.
    pub anchor: f64,
    pub value: f64,
}

/// Dyadic truncations of an improper integral and their convergence rate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImproperReport {
    /// Extrapolated limit (see [`extrapolate`]).
    pub value: f64,
    /// Deepest truncation, before extrapolation.
    pub last: f64,
    pub levels: Vec<ImproperLevel>,
    /// `|I_n - I_{n-1}|` for consecutive levels.
    pub increments: Vec<f64>,
    /// Minus the least-squares slope of `log2 |I_n - I_{n-1}|` against `n`.
    pub fitted_rate: Option<f64>,
    /// Rate predicted from the exponents.
    pub predicted_rate: f64,
    /// Fitted rate is not positive.
    pub diverging: bool,
    /// Some anchor `2^-n t` was not a grid point and was snapped.
    pub snapped: bool,
}

/// Grid indices of the anchors `2^-n t`, `n = 1, 2, ...`, down to the first
/// grid point. Returns `(n, index, exact)`.
pub(crate) fn dyadic_anchors(grid: &Grid, t_index: usize) -> Vec<(u32, usize, bool)> {
    let t = grid.points()[t_index];
    let first = grid.first();
    let mut out = Vec::new();
    let mut n = 1u32;
    loop {
        let a = t * 0.5f64.powi(n as i32);
        if a < first * (1.0 - 1e-12) || n > 1000 {
            break;
        }
        let (idx, exact) = match grid.find(a) {
            Some(i) => (i, true),
            None => (grid.nearest(a), false),
        };
        if idx >= t_index || out.last().is_some_and(|&(_, j, _)| j == idx) {
            break;
        }
        out.push((n, idx, exact));
        n += 1;
    }
    out
}

/// Limit of a sequence with geometric increments, from its last three terms.
///
/// With `r = d_n / d_{n-1}` in `(0, 1)` the tail `d_n r / (1 - r)` is added;
/// otherwise the last term is returned unchanged.
pub(crate) fn extrapolate(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 3 {
        return values.last().copied().unwrap_or(0.0);
    }
    let d1 = values[n - 2] - values[n - 3];
    let d2 = values[n - 1] - values[n - 2];
    if d1 == 0.0 {
        return values[n - 1];
    }
    let r = d2 / d1;
    if r > 0.0 && r < 1.0 {
        values[n - 1] + d2 * r / (1.0 - r)
    } else {
        values[n - 1]
    }
}

pub(crate) fn build_report(
    levels: Vec<ImproperLevel>,
    predicted_rate: f64,
    snapped: bool,
) -> ImproperReport {
    let values: Vec<f64> = levels.iter().map(|l| l.value).collect();
    let increments: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let (ns, logs): (Vec<f64>, Vec<f64>) = levels
        .iter()
        .skip(1)
        .zip(&increments)
        .filter(|(_, &d)| d > 0.0)
        .map(|(l, &d)| (l.n as f64, d.log2()))
        .unzip();
    let fitted_rate = ols(&ns, &logs).map(|f| -f.slope);
    ImproperReport {
        value: extrapolate(&values),
        last: values.last().copied().unwrap_or(0.0),
        levels,
        increments,
        fitted_rate,
        predicted_rate,
        diverging: fitted_rate.is_some_and(|r| r <= 0.0),
        snapped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn extrapolation_is_exact_for_geometric_sequences() {
        let seq: Vec<f64> = (1..8).map(|n| 2.0 - 0.5f64.powi(n)).collect();
        assert_relative_eq!(extrapolate(&seq), 2.0, epsilon = 1e-14);
        // growing increments are left alone
        let seq = [1.0, 2.0, 4.0];
        assert_eq!(extrapolate(&seq), 4.0);
        assert_eq!(extrapolate(&[3.0]), 3.0);
    }

    #[test]
    fn anchors_on_dyadic_grid() {
        let g = Grid::dyadic(1.0, 6, 4).unwrap();
        let a = dyadic_anchors(&g, g.len() - 1);
        assert_eq!(a.len(), 6);
        assert!(a.iter().all(|&(_, _, exact)| exact));
        assert_eq!(a[5].1, 0);
    }
}
