use num_complex::Complex64;

use crate::error::Result;
use crate::grid::{Grid, PlanarPath, TwoParamField};

/// Second level of a planar path: `L^{kl}_{s,t} = int_s^t (g^k_r - g^k_s) dg^l_r`
/// by left-point sums, `k, l` in `{re, im}`.
#[derive(Clone, Debug)]
pub struct Level2Field {
    /// Indexed `[k][l]`.
    pub components: [[TwoParamField; 2]; 2],
}

impl Level2Field {
    pub fn grid(&self) -> &Grid {
        self.components[0][0].grid()
    }

    /// 2x2 matrix at grid indices `i <= j`.
    pub fn at(&self, i: usize, j: usize) -> [[f64; 2]; 2] {
        let c = &self.components;
        [
            [c[0][0].get(i, j), c[0][1].get(i, j)],
            [c[1][0].get(i, j), c[1][1].get(i, j)],
        ]
    }

    /// Antisymmetric part `(L^{12} - L^{21}) / 2`.
    pub fn signed_area(&self, i: usize, j: usize) -> f64 {
        0.5 * (self.components[0][1].get(i, j) - self.components[1][0].get(i, j))
    }
}

/// Iterated left-point Young integrals of `path` over grid pairs in `[a, T]`.
pub fn level2_lift_young(path: &PlanarPath, a: f64) -> Result<Level2Field> {
    let p = path.restrict(a, path.grid().horizon())?;
    let re: Vec<f64> = p.values().iter().map(|z: &Complex64| z.re).collect();
    let im: Vec<f64> = p.values().iter().map(|z| z.im).collect();
    let g = p.grid().clone();
    let f = |x: &Vec<f64>, y: &Vec<f64>| {
        TwoParamField::left_point_area(g.clone(), x.clone(), y.clone())
    };
    Ok(Level2Field {
        components: [[f(&re, &re), f(&re, &im)], [f(&im, &re), f(&im, &im)]],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_uniform_grid, SampledPath};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn straight_line() {
        let g = make_uniform_grid(0.0, 1.0, 2049).unwrap();
        let p = SampledPath::from_fn(g, |t| Complex64::new(3.0 * t, -t)).unwrap();
        let l = level2_lift_young(&p, 0.0).unwrap();
        let m = l.at(0, 2048);
        let inc = [3.0, -1.0];
        for k in 0..2 {
            for j in 0..2 {
                // left-point bias is exactly -inc inc / (2N)
                let bias = (inc[k] * inc[j] / 2.0) / 2048.0;
                assert!((m[k][j] - inc[k] * inc[j] / 2.0 + bias).abs() < 1e-10);
            }
        }
        assert!(l.signed_area(0, 2048).abs() < 1e-12);
    }

    #[test]
    fn arc_area_matches_shoelace() {
        let n = 1000;
        let g = make_uniform_grid(0.0, PI, n + 1).unwrap();
        let p = SampledPath::from_fn(g, |t| Complex64::new(t.cos(), t.sin())).unwrap();
        let l = level2_lift_young(&p, 0.0).unwrap();
        let v = p.values();
        let z0 = v[0];
        let shoelace: f64 = (0..n)
            .map(|k| {
                let (a, b) = (v[k] - z0, v[k + 1] - z0);
                a.re * b.im - b.re * a.im
            })
            .sum::<f64>()
            / 2.0;
        assert_relative_eq!(l.signed_area(0, n), shoelace, epsilon = 1e-6);
        assert!((shoelace - PI / 2.0).abs() < 1e-4);
    }

    #[test]
    fn tensor_chen_relation() {
        let g = make_uniform_grid(0.0, 1.0, 40).unwrap();
        let p = SampledPath::from_fn(g, |t| Complex64::new((7.0 * t).sin(), t * t)).unwrap();
        let l = level2_lift_young(&p, 0.0).unwrap();
        let v = p.values();
        let comp = |z: Complex64, k: usize| if k == 0 { z.re } else { z.im };
        for (s, u, t) in [(0, 10, 39), (3, 4, 5), (5, 20, 30)] {
            let (a, b, c) = (l.at(s, t), l.at(s, u), l.at(u, t));
            for k in 0..2 {
                for j in 0..2 {
                    let cross = (comp(v[u], k) - comp(v[s], k)) * (comp(v[t], j) - comp(v[u], j));
                    assert!((a[k][j] - b[k][j] - c[k][j] - cross).abs() < 1e-13);
                }
            }
        }
    }
}
