use crate::conv::causal_convolution;
use crate::error::{invalid, Result};
use crate::grid::SampledPath;
use crate::integrate::InhomRoughPath;

use super::kernel::{rl_cell_weights, stationary_cell_weights, KernelSpec};
use super::noise::NoisePath;

fn check_hurst(hurst: f64) -> Result<()> {
    if hurst > 0.0 && hurst < 1.0 {
        Ok(())
    } else {
        Err(invalid("hurst", format!("{hurst} is not in (0, 1)")))
    }
}

/// Riemann-Liouville fBM on `[0, T]`:
/// `W^H_{t_k} = sum_{j<k} Kbar(t_k - t_j) dW_j` with `Kbar` the cell
/// average of `u^{H-1/2}` (see [`rl_cell_weights`]).
pub fn rl_fbm(noise: &NoisePath, hurst: f64) -> Result<SampledPath> {
    check_hurst(hurst)?;
    let n = noise.steps();
    let dw = noise.increments();
    let z = noise.zero_index();
    let mut signal = dw[z..z + n].to_vec();
    signal.push(0.0);
    let w = rl_cell_weights(hurst, noise.step(), n + 1);
    SampledPath::new(noise.unit_grid().clone(), causal_convolution(&w, &signal))
}

/// Contribution of the noise before time 0 to the stationary fBM on `[0, T]`:
/// `sum_{t_j < 0} Khat(t_k - t_j) dW_j`. Exactly zero when that noise is.
pub fn negative_noise_part(noise: &NoisePath, kernel: &KernelSpec) -> Result<SampledPath> {
    check_kernel_noise(noise, kernel)?;
    let (n, z) = (noise.steps(), noise.zero_index());
    let dw = noise.increments();
    let mut signal = vec![0.0; z + n + 1];
    signal[..z].copy_from_slice(&dw[..z]);
    let w = stationary_cell_weights(kernel, noise.step(), z + n + 1);
    let out = causal_convolution(&w, &signal);
    SampledPath::new(noise.unit_grid().clone(), out[z..=z + n].to_vec())
}

fn check_kernel_noise(noise: &NoisePath, kernel: &KernelSpec) -> Result<()> {
    if (noise.horizon() - kernel.horizon).abs() > 1e-12 * kernel.horizon {
        return Err(invalid("kernel", "horizon differs from the noise horizon"));
    }
    let (before, _) = noise.extent();
    if before < kernel.support_end() * (1.0 - 1e-12) {
        return Err(invalid(
            "noise",
            format!(
                "covers {before} before 0; the kernel needs {}",
                kernel.support_end()
            ),
        ));
    }
    Ok(())
}

/// Stationary fBM `Khat * xi` on `[0, T]`: the Riemann-Liouville part from
/// positive-time noise plus [`negative_noise_part`]. The cut-off kernel
/// equals the Riemann-Liouville one on `(0, T]`, so the split is exact.
pub fn stationary_fbm(noise: &NoisePath, kernel: &KernelSpec) -> Result<SampledPath> {
    let pos = rl_fbm(noise, kernel.hurst)?;
    let neg = negative_noise_part(noise, kernel)?;
    let values = pos
        .values()
        .iter()
        .zip(neg.values())
        .map(|(a, b)| a + b)
        .collect();
    SampledPath::new(noise.unit_grid().clone(), values)
}

/// `int_0^t (t-s)^{H-1/2} xi(s) ds` for `xi` sampled on a uniform grid
/// starting at 0, exact for piecewise-linear `xi`.
pub fn mollified_rl_fbm(xi: &SampledPath, hurst: f64) -> Result<SampledPath> {
    check_hurst(hurst)?;
    let h = xi
        .grid()
        .uniform_step()
        .ok_or_else(|| invalid("xi", "grid must be uniform"))?;
    if xi.grid().first() != 0.0 {
        return Err(invalid("xi", "grid must start at 0"));
    }
    let n = xi.len();
    let p = hurst + 0.5;
    let (s0, s1) = (h.powf(p) / p, h.powf(p) / (p + 1.0));
    // On cell m (u in [(m-1)h, mh]) the left sample carries weight
    // 1 - theta = 1 - m + u/h, the right one theta.
    let mass = |m: f64| s0 * (m.powf(p) - (m - 1.0).powf(p));
    let first = |m: f64| s1 * (m.powf(p + 1.0) - (m - 1.0).powf(p + 1.0));
    let right = |m: f64| m * mass(m) - first(m);
    let ka: Vec<f64> = (0..n)
        .map(|m| {
            if m == 0 {
                0.0
            } else {
                mass(m as f64) - right(m as f64)
            }
        })
        .collect();
    let kb: Vec<f64> = (0..n).map(|m| right((m + 1) as f64)).collect();
    let v = xi.values();
    let a = causal_convolution(&ka, v);
    let b = causal_convolution(&kb, v);
    let values = (0..n).map(|k| a[k] + b[k] - kb[k] * v[0]).collect();
    SampledPath::new(xi.grid().clone(), values)
}

/// Exponents `(alpha, beta)` just below `(1/2, H)` with `alpha + 2 beta > 1`.
pub fn w_exponents(hurst: f64) -> (f64, f64) {
    let d = (0.01f64).min((2.0 * hurst - 0.5) / 6.0);
    (0.5 - d, hurst - d)
}

/// Rough path `(W, W_hat^H, int (W_hat^H - W_hat^H_s) dW)` on `[0, T]`.
pub fn build_w_triple(noise: &NoisePath, kernel: &KernelSpec) -> Result<InhomRoughPath> {
    let x = noise.on_unit()?;
    let x_hat = stationary_fbm(noise, kernel)?;
    let (alpha, beta) = w_exponents(kernel.hurst);
    InhomRoughPath::from_left_point(x, x_hat, alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RngStream;
    use crate::integrate::chen_defect;
    use approx::assert_relative_eq;

    fn noise(steps: usize, seed: u64) -> NoisePath {
        NoisePath::sample(1.0, steps, 1.5, 0.0, &RngStream::new(seed, 0)).unwrap()
    }

    #[test]
    fn half_is_brownian() {
        let nz = noise(256, 1);
        let w = rl_fbm(&nz, 0.5).unwrap();
        let b = nz.on_unit().unwrap();
        for (x, y) in w.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn drift_noise_gives_kernel_integral() {
        let n = 1 << 14;
        let g = NoisePath::lattice(1.0, n, 0.0, 0.0).unwrap();
        let w = SampledPath::from_fn(g, |t| t).unwrap();
        let nz = NoisePath::new(w, 1.0, n).unwrap();
        let f = rl_fbm(&nz, 0.3).unwrap();
        for (&t, &v) in f.times().iter().zip(f.values()).skip(1) {
            let exact = t.powf(0.8) / 0.8;
            assert!((v - exact).abs() / exact < 1e-2);
        }
    }

    #[test]
    fn stationary_split_and_zero_control() {
        let k = KernelSpec::new(0.4, 1.0).unwrap();
        let nz = noise(128, 3);
        let s = stationary_fbm(&nz, &k).unwrap();
        // brute force over the whole noise grid
        let dw = nz.increments();
        let h = nz.step();
        let weights = stationary_cell_weights(&k, h, dw.len() + 1);
        for kk in [0usize, 1, 50, 128] {
            let idx = nz.zero_index() + kk;
            let direct: f64 = (0..idx).map(|j| weights[idx - j] * dw[j]).sum();
            assert_relative_eq!(s.values()[kk], direct, epsilon = 1e-12);
        }
        let pos = nz.without_negative_time().unwrap();
        assert!(negative_noise_part(&pos, &k)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));
        assert_eq!(
            stationary_fbm(&pos, &k).unwrap().values(),
            rl_fbm(&pos, 0.4).unwrap().values()
        );

        let short = NoisePath::sample(1.0, 128, 1.0, 0.0, &RngStream::new(0, 0)).unwrap();
        assert!(stationary_fbm(&short, &k).is_err());
    }

    #[test]
    fn mollified_convolution_exact_for_linear() {
        let g = NoisePath::lattice(1.0, 200, 0.0, 0.0).unwrap();
        let xi = SampledPath::from_fn(g, |t| 2.0 - 3.0 * t).unwrap();
        let w = mollified_rl_fbm(&xi, 0.35).unwrap();
        let p = 0.85;
        for (&t, &v) in w.times().iter().zip(w.values()) {
            let exact = 2.0 * t.powf(p) / p - 3.0 * t.powf(p + 1.0) / (p * (p + 1.0));
            assert!((v - exact).abs() < 1e-12, "{t}: {v} vs {exact}");
        }
    }

    #[test]
    fn triple_satisfies_chen() {
        let k = KernelSpec::new(0.3, 1.0).unwrap();
        let rp = build_w_triple(&noise(256, 5), &k).unwrap();
        let c = chen_defect(&rp);
        assert!(c.max_defect <= 1e-10 * c.scale.max(1.0));
        let (a, b) = w_exponents(0.26);
        assert!(a + 2.0 * b > 1.0);
    }
}
