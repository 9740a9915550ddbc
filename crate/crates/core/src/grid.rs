//! Time grids, sampled paths, two-parameter fields and seeded Gaussian
//! sampling.
//!
//! Everything downstream works on finite grids: suprema over continuum pairs
//! become maxima over grid pairs and off-grid evaluation is linear
//! interpolation. All types are immutable after construction.

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Relative tolerance used to decide whether a time coincides with a grid
/// point.
pub const GRID_MATCH_TOL: f64 = 1e-12;

fn same_time(a: f64, b: f64) -> bool {
    (a - b).abs() <= GRID_MATCH_TOL * a.abs().max(b.abs()).max(1.0)
}

/// A strictly increasing finite set of times. The last point is the horizon.
#[derive(Clone, Debug)]
pub struct Grid {
    points: Arc<[f64]>,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid(format!("point {i} is not finite")));
        }
        if let Some(i) = points.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "points not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Self {
            points: points.into(),
        })
    }

    /// `n` equally spaced points from `t_min` to `horizon` inclusive.
    pub fn uniform(t_min: f64, horizon: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need N >= 2, got {n}")));
        }
        if !(t_min < horizon) {
            return Err(Error::InvalidGrid(format!(
                "t_min = {t_min} must be below T = {horizon}"
            )));
        }
        let span = horizon - t_min;
        let last = (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| t_min + span * (i as f64 / last)).collect();
        points[n - 1] = horizon;
        Self::new(points)
    }

    /// Lattice `horizon * i / steps` for `i` in `first..=last`.
    ///
    /// Used for noise grids: both `0` and `horizon` are hit exactly whenever
    /// `first <= 0 <= steps <= last`.
    pub fn lattice(horizon: f64, steps: usize, first: i64, last: i64) -> Result<Self> {
        if steps == 0 || horizon <= 0.0 {
            return Err(Error::InvalidGrid(
                "lattice needs steps > 0 and T > 0".into(),
            ));
        }
        if last <= first {
            return Err(Error::InvalidGrid("lattice needs last > first".into()));
        }
        let n = steps as f64;
        Self::new((first..=last).map(|i| horizon * (i as f64 / n)).collect())
    }

    /// Grid on `(0, horizon]` refined dyadically towards zero.
    ///
    /// Every block `[2^-n T, 2^-(n-1) T]`, `n = 1..=levels`, carries
    /// `per_level` equal cells, so the first point is `2^-levels T` and every
    /// dyadic anchor `2^-n T` is a grid point.
    pub fn dyadic(horizon: f64, levels: u32, per_level: usize) -> Result<Self> {
        if levels == 0 || per_level == 0 || horizon <= 0.0 {
            return Err(Error::InvalidGrid(
                "dyadic grid needs levels > 0, per_level > 0 and T > 0".into(),
            ));
        }
        let mut points = Vec::with_capacity(levels as usize * per_level + 1);
        for n in (1..=levels).rev() {
            let lo = horizon * 0.5f64.powi(n as i32);
            let width = lo;
            for k in 0..per_level {
                points.push(lo + width * (k as f64 / per_level as f64));
            }
        }
        points.push(horizon);
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    /// The horizon `T`, i.e. the last grid point.
    pub fn horizon(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Index of the grid point equal to `t` (up to rounding).
    pub fn find(&self, t: f64) -> Option<usize> {
        let i = self.nearest(t);
        same_time(self.points[i], t).then_some(i)
    }

    /// Index of the grid point closest to `t`.
    pub fn nearest(&self, t: f64) -> usize {
        let p = &self.points;
        match p.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= p.len() => p.len() - 1,
            Err(i) => {
                if t - p[i - 1] <= p[i] - t {
                    i - 1
                } else {
                    i
                }
            }
        }
    }

    /// Common spacing if the grid is uniform up to rounding.
    pub fn uniform_step(&self) -> Option<f64> {
        let p = &self.points;
        let h = (p[p.len() - 1] - p[0]) / (p.len() - 1) as f64;
        p.windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
            .then_some(h)
    }

    /// True when both grids hold identical points.
    pub fn same_as(&self, other: &Grid) -> bool {
        Arc::ptr_eq(&self.points, &other.points) || self.points[..] == other.points[..]
    }

    /// Indices of grid points inside `[a, b]` (with rounding tolerance).
    pub fn index_range(&self, a: f64, b: f64) -> std::ops::Range<usize> {
        let p = &self.points;
        let lo = p.partition_point(|&x| x < a && !same_time(x, a));
        let hi = p.partition_point(|&x| x <= b || same_time(x, b));
        lo..hi.max(lo)
    }
}

/// `N` equally spaced points from `t_min` to `T` inclusive.
pub fn make_uniform_grid(t_min: f64, horizon: f64, n: usize) -> Result<Grid> {
    Grid::uniform(t_min, horizon, n)
}

/// Values a path may take: real numbers or points of the plane.
pub trait PathValue:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
    + 'static
{
    /// CSV column names after `t`.
    const COLUMNS: &'static [&'static str];

    fn zero() -> Self;
    /// Euclidean modulus.
    fn modulus(self) -> f64;
    fn is_finite(self) -> bool;
    fn push_columns(self, out: &mut Vec<f64>);
    fn from_columns(cols: &[f64]) -> Option<Self>;
}

impl PathValue for f64 {
    const COLUMNS: &'static [&'static str] = &["value"];

    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn push_columns(self, out: &mut Vec<f64>) {
        out.push(self);
    }
    fn from_columns(cols: &[f64]) -> Option<Self> {
        (cols.len() == 1).then(|| cols[0])
    }
}

impl PathValue for Complex64 {
    const COLUMNS: &'static [&'static str] = &["re", "im"];

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn push_columns(self, out: &mut Vec<f64>) {
        out.push(self.re);
        out.push(self.im);
    }
    fn from_columns(cols: &[f64]) -> Option<Self> {
        (cols.len() == 2).then(|| Complex64::new(cols[0], cols[1]))
    }
}

/// A path sampled on a finite grid.
#[derive(Clone, Debug)]
pub struct SampledPath<V = f64> {
    grid: Grid,
    values: Vec<V>,
}

/// Planar (complex valued) path, e.g. an SLE trace.
pub type PlanarPath = SampledPath<Complex64>;

impl<V: PathValue> SampledPath<V> {
    pub fn new(grid: Grid, values: Vec<V>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Malformed(format!(
                "{} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> V) -> Result<Self> {
        let values = grid.points().iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: Grid, c: V) -> Result<Self> {
        let values = vec![c; grid.len()];
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        self.grid.points()
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last(&self) -> V {
        self.values[self.values.len() - 1]
    }

    /// Linear interpolation; constant extrapolation outside the grid.
    pub fn value_at(&self, t: f64) -> V {
        let p = self.grid.points();
        if t <= p[0] {
            return self.values[0];
        }
        if t >= p[p.len() - 1] {
            return self.values[p.len() - 1];
        }
        let i = p.partition_point(|&x| x <= t) - 1;
        let w = (t - p[i]) / (p[i + 1] - p[i]);
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    /// Pointwise map onto the same grid.
    pub fn map<W: PathValue>(&self, f: impl Fn(V) -> W) -> Result<SampledPath<W>> {
        SampledPath::new(
            self.grid.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Path restricted to `[a, b]`; endpoints missing from the grid are added
    /// by linear interpolation.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Self> {
        let (t0, t1) = (self.grid.first(), self.grid.horizon());
        if !(a < b) {
            return Err(Error::EmptyRestriction { a, b });
        }
        if a < t0 && !same_time(a, t0) || b > t1 && !same_time(b, t1) {
            return Err(invalid(
                "interval",
                format!("[{a}, {b}] not inside the path domain [{t0}, {t1}]"),
            ));
        }
        let range = self.grid.index_range(a, b);
        let mut points = Vec::with_capacity(range.len() + 2);
        let mut values = Vec::with_capacity(range.len() + 2);
        let p = self.grid.points();
        if range.is_empty() || !same_time(p[range.start], a) {
            points.push(a);
            values.push(self.value_at(a));
        }
        for i in range.clone() {
            points.push(p[i]);
            values.push(self.values[i]);
        }
        if range.is_empty() || !same_time(p[range.end - 1], b) {
            points.push(b);
            values.push(self.value_at(b));
        }
        if points.len() < 2 {
            return Err(Error::EmptyRestriction { a, b });
        }
        Self::new(Grid::new(points)?, values)
    }

    /// Drops the leading grid points at or below zero.
    pub fn positive_part(&self) -> Result<Self> {
        let start = self.grid.points().partition_point(|&t| t <= 0.0);
        if self.len() - start < 2 {
            return Err(Error::EmptyRestriction {
                a: 0.0,
                b: self.grid.horizon(),
            });
        }
        Self::new(
            Grid::new(self.grid.points()[start..].to_vec())?,
            self.values[start..].to_vec(),
        )
    }
}

impl SampledPath<f64> {
    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Path restricted to `[a, b]`.
pub fn restrict<V: PathValue>(path: &SampledPath<V>, a: f64, b: f64) -> Result<SampledPath<V>> {
    path.restrict(a, b)
}

#[derive(Clone, Debug)]
enum FieldRepr {
    /// Packed upper triangle, row `i` holding `F_{i,i..n}`.
    Dense(Vec<f64>),
    /// `F_{i,j} = S_j - S_i - a_i (b_j - b_i)` with `S` the running
    /// left-point sum of `a db`.
    LeftPointArea {
        running: Vec<f64>,
        a: Vec<f64>,
        b: Vec<f64>,
    },
}

/// Values `F_{s,t}` on ordered grid pairs `s <= t` with `F_{t,t} = 0`.
///
/// Fields built from left-point sums are stored in `O(N)` form; arbitrary
/// fields use a dense `O(N^2)` triangle.
#[derive(Clone, Debug)]
pub struct TwoParamField {
    grid: Grid,
    repr: FieldRepr,
}

impl TwoParamField {
    /// Dense field from `f(i, j)` for `i < j`; the diagonal is zero.
    pub fn from_fn(grid: Grid, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let n = grid.len();
        let mut data = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            data.push(0.0);
            for j in i + 1..n {
                let v = f(i, j);
                if !v.is_finite() {
                    return Err(Error::NonFinite(i));
                }
                data.push(v);
            }
        }
        Ok(Self {
            grid,
            repr: FieldRepr::Dense(data),
        })
    }

    pub fn zero(grid: Grid) -> Self {
        let n = grid.len();
        Self {
            grid,
            repr: FieldRepr::Dense(vec![0.0; n * (n + 1) / 2]),
        }
    }

    /// `F_{s,t} = sum_{u in [s,t)} (a_u - a_s)(b_{u+} - b_u)`.
    pub(crate) fn left_point_area(grid: Grid, a: Vec<f64>, b: Vec<f64>) -> Self {
        let mut running = Vec::with_capacity(a.len());
        let mut acc = 0.0;
        running.push(acc);
        for k in 0..a.len() - 1 {
            acc += a[k] * (b[k + 1] - b[k]);
            running.push(acc);
        }
        Self {
            grid,
            repr: FieldRepr::LeftPointArea { running, a, b },
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// `F_{i,j}` for grid indices `i <= j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i <= j && j < self.len());
        match &self.repr {
            FieldRepr::Dense(data) => {
                let n = self.len();
                let row = i * n - i * i.saturating_sub(1) / 2;
                data[row + (j - i)]
            }
            FieldRepr::LeftPointArea { running, a, b } => {
                if i == j {
                    0.0
                } else {
                    running[j] - running[i] - a[i] * (b[j] - b[i])
                }
            }
        }
    }
}

/// One reproducible random stream: `(seed, stream)` fixes the output bit
/// for bit. Each Monte Carlo replication owns its own stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Counter-based generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    pub fn standard_normals(&self, n: usize) -> Vec<f64> {
        let mut rng = self.rng();
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }
}

/// Brownian path on `grid` started at zero at the first grid point.
pub fn sample_brownian(grid: &Grid, rng: &RngStream) -> Result<SampledPath> {
    let z = rng.standard_normals(grid.len() - 1);
    let mut values = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    values.push(acc);
    for (w, zi) in grid.points().windows(2).zip(z) {
        acc += (w[1] - w[0]).sqrt() * zi;
        values.push(acc);
    }
    SampledPath::new(grid.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_examples() {
        assert_eq!(
            make_uniform_grid(0.0, 1.0, 3).unwrap().points(),
            &[0.0, 0.5, 1.0]
        );
        assert_eq!(
            make_uniform_grid(-2.0, 1.0, 4).unwrap().points(),
            &[-2.0, -1.0, 0.0, 1.0]
        );
        assert!(make_uniform_grid(0.0, 1.0, 1).is_err());
        assert!(make_uniform_grid(1.0, 1.0, 5).is_err());
    }

    #[test]
    fn dyadic_grid_hits_anchors() {
        let g = Grid::dyadic(1.0, 10, 8).unwrap();
        assert_eq!(g.len(), 81);
        assert_eq!(g.first(), 2f64.powi(-10));
        for n in 0..=10 {
            assert!(g.find(2f64.powi(-n)).is_some(), "anchor 2^-{n}");
        }
    }

    #[test]
    fn lattice_contains_zero_and_horizon() {
        let g = Grid::lattice(1.0, 8, -16, 10).unwrap();
        assert_eq!(g.points()[16], 0.0);
        assert_eq!(g.points()[24], 1.0);
        assert_eq!(g.uniform_step(), Some(0.125));
    }

    #[test]
    fn restrict_examples() {
        let g = make_uniform_grid(0.0, 1.0, 3).unwrap();
        let p = SampledPath::new(g, vec![0.0, 1.0, 4.0]).unwrap();
        let full = p.restrict(0.0, 1.0).unwrap();
        assert_eq!(full.values(), p.values());
        assert_eq!(full.times(), p.times());

        let r = p.restrict(0.25, 1.0).unwrap();
        assert_eq!(r.times(), &[0.25, 0.5, 1.0]);
        assert_eq!(r.values(), &[0.5, 1.0, 4.0]);

        assert!(p.restrict(0.5, 0.5).is_err());
        assert!(p.restrict(0.7, 0.2).is_err());
    }

    #[test]
    fn brownian_determinism_and_two_points() {
        let g = make_uniform_grid(0.0, 1.0, 65).unwrap();
        let a = sample_brownian(&g, &RngStream::new(7, 3)).unwrap();
        let b = sample_brownian(&g, &RngStream::new(7, 3)).unwrap();
        let c = sample_brownian(&g, &RngStream::new(7, 4)).unwrap();
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), c.values());
        assert_eq!(a.values()[0], 0.0);

        let g2 = make_uniform_grid(0.0, 2.0, 2).unwrap();
        let p = sample_brownian(&g2, &RngStream::new(1, 0)).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.increments().len(), 1);
    }

    #[test]
    fn dense_field_indexing() {
        let g = make_uniform_grid(0.0, 1.0, 6).unwrap();
        let f = TwoParamField::from_fn(g, |i, j| (10 * i + j) as f64).unwrap();
        for i in 0..6 {
            assert_eq!(f.get(i, i), 0.0);
            for j in i + 1..6 {
                assert_eq!(f.get(i, j), (10 * i + j) as f64);
            }
        }
    }

    #[test]
    fn left_point_field_matches_direct_sum() {
        let g = make_uniform_grid(0.0, 1.0, 9).unwrap();
        let a: Vec<f64> = g.points().iter().map(|t| (3.0 * t).sin()).collect();
        let b: Vec<f64> = g.points().iter().map(|t| t * t).collect();
        let f = TwoParamField::left_point_area(g, a.clone(), b.clone());
        for i in 0..9 {
            for j in i..9 {
                let direct: f64 = (i..j).map(|u| (a[u] - a[i]) * (b[u + 1] - b[u])).sum();
                assert!((f.get(i, j) - direct).abs() < 1e-14);
            }
        }
    }
}
