//! Causal discrete convolution, direct for short inputs and FFT otherwise.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

const DIRECT_LIMIT: usize = 64;

/// `out[k] = sum_{m=0}^{k} kernel[m] * signal[k - m]` for `k < signal.len()`.
pub fn causal_convolution(kernel: &[f64], signal: &[f64]) -> Vec<f64> {
    let n = signal.len();
    let kernel = &kernel[..kernel.len().min(n)];
    if n == 0 || kernel.is_empty() {
        return vec![0.0; n];
    }
    if kernel.len().min(n) <= DIRECT_LIMIT || (n as f64) * (kernel.len() as f64) < 4e6 {
        return direct(kernel, signal);
    }
    let size = (n + kernel.len()).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut a: Vec<Complex<f64>> = kernel.iter().map(|&x| Complex::new(x, 0.0)).collect();
    a.resize(size, Complex::new(0.0, 0.0));
    let mut b: Vec<Complex<f64>> = signal.iter().map(|&x| Complex::new(x, 0.0)).collect();
    b.resize(size, Complex::new(0.0, 0.0));
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= *y;
    }
    inv.process(&mut a);
    let scale = 1.0 / size as f64;
    a[..n].iter().map(|c| c.re * scale).collect()
}

fn direct(kernel: &[f64], signal: &[f64]) -> Vec<f64> {
    (0..signal.len())
        .map(|k| {
            let top = k.min(kernel.len() - 1);
            (0..=top).map(|m| kernel[m] * signal[k - m]).sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_matches_direct() {
        let n = 5000;
        let kernel: Vec<f64> = (0..n).map(|m| 1.0 / (1.0 + m as f64).sqrt()).collect();
        let signal: Vec<f64> = (0..n).map(|k| ((k * 37 % 11) as f64 - 5.0) / 3.0).collect();
        let fast = causal_convolution(&kernel, &signal);
        let slow = direct(&kernel, &signal);
        let scale = slow.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-11 * scale);
        }
    }

    #[test]
    fn short_kernel() {
        assert_eq!(
            causal_convolution(&[1.0, 1.0], &[1.0, 2.0, 3.0]),
            vec![1.0, 3.0, 5.0]
        );
        assert_eq!(causal_convolution(&[], &[1.0, 2.0]), vec![0.0, 0.0]);
    }
}
