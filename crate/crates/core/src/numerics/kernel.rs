//! Shift-invariant linear operators `y_o = Σ_j x_j k[o − j + offset]`.
//!
//! Short kernels are applied directly; long ones through a zero-padded FFT.
//! Both paths use a fixed operation order, so results are reproducible.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Kernels up to this length are applied by direct summation.
const DIRECT_MAX_LEN: usize = 96;

struct Spectral {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    spectrum: Vec<Complex<f64>>,
}

pub(crate) struct KernelOp {
    kernel: Vec<f64>,
    reversed: Vec<f64>,
    offset: usize,
    n_in: usize,
    n_out: usize,
    spectral: Option<Spectral>,
}

impl KernelOp {
    /// Operator from `n_in` inputs to `n_out` outputs. Requires `offset < kernel.len()`.
    pub(crate) fn new(kernel: Vec<f64>, offset: usize, n_in: usize, n_out: usize) -> Self {
        debug_assert!(offset < kernel.len());
        let reversed = kernel.iter().rev().cloned().collect();
        let spectral = (kernel.len() > DIRECT_MAX_LEN).then(|| {
            let size = (n_in + kernel.len())
                .max(n_out + offset + 1)
                .next_power_of_two();
            let mut planner = FftPlanner::new();
            let forward = planner.plan_fft_forward(size);
            let inverse = planner.plan_fft_inverse(size);
            let mut spectrum = vec![Complex::new(0.0, 0.0); size];
            for (s, &k) in spectrum.iter_mut().zip(&kernel) {
                s.re = k;
            }
            forward.process(&mut spectrum);
            Spectral {
                size,
                forward,
                inverse,
                spectrum,
            }
        });
        Self {
            kernel,
            reversed,
            offset,
            n_in,
            n_out,
            spectral,
        }
    }

    /// Symmetric banded kernel `k[|i − j|]`, `half[0..=B]`, on `n` points.
    pub(crate) fn symmetric(half: &[f64], n: usize) -> Self {
        let b = half.len() - 1;
        let mut kernel = Vec::with_capacity(2 * b + 1);
        kernel.extend(half.iter().rev());
        kernel.extend(&half[1..]);
        Self::new(kernel, b, n, n)
    }

    /// Whether the FFT path is used; its absolute error is about 1e−16 of the largest output.
    pub(crate) fn is_spectral(&self) -> bool {
        self.spectral.is_some()
    }

    /// y_o = Σ_j x_j k[o − j + offset].
    pub(crate) fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n_in);
        debug_assert_eq!(y.len(), self.n_out);
        if let Some(sp) = &self.spectral {
            let mut buf = vec![Complex::new(0.0, 0.0); sp.size];
            for (b, &v) in buf.iter_mut().zip(x) {
                b.re = v;
            }
            sp.forward.process(&mut buf);
            for (b, k) in buf.iter_mut().zip(&sp.spectrum) {
                *b *= k;
            }
            sp.inverse.process(&mut buf);
            let scale = 1.0 / sp.size as f64;
            for (o, out) in y.iter_mut().enumerate() {
                *out = buf[o + self.offset].re * scale;
            }
            return;
        }
        let m = self.kernel.len() as isize;
        let off = self.offset as isize;
        for (o, out) in y.iter_mut().enumerate() {
            let o = o as isize;
            // kernel index t = o − j + off ∈ [0, m)
            let j_lo = (o + off - m + 1).max(0);
            let j_hi = (o + off).min(self.n_in as isize - 1);
            if j_hi < j_lo {
                *out = 0.0;
                continue;
            }
            // reversed[u] = kernel[m − 1 − u], u = j + (m − 1 − o − off)
            let u_lo = (j_lo + m - 1 - o - off) as usize;
            let len = (j_hi - j_lo + 1) as usize;
            *out = super::grid::dot(
                &x[j_lo as usize..j_lo as usize + len],
                &self.reversed[u_lo..u_lo + len],
            );
        }
    }

    /// Transpose: z_j = Σ_o g_o k[o − j + offset].
    pub(crate) fn apply_transpose(&self, g: &[f64], z: &mut [f64]) {
        debug_assert_eq!(g.len(), self.n_out);
        debug_assert_eq!(z.len(), self.n_in);
        if let Some(sp) = &self.spectral {
            let mut buf = vec![Complex::new(0.0, 0.0); sp.size];
            for (o, &v) in g.iter().enumerate() {
                buf[o + self.offset].re = v;
            }
            sp.forward.process(&mut buf);
            for (b, k) in buf.iter_mut().zip(&sp.spectrum) {
                *b *= k.conj();
            }
            sp.inverse.process(&mut buf);
            let scale = 1.0 / sp.size as f64;
            for (j, out) in z.iter_mut().enumerate() {
                *out = buf[j].re * scale;
            }
            return;
        }
        let m = self.kernel.len() as isize;
        let off = self.offset as isize;
        for (j, out) in z.iter_mut().enumerate() {
            let j = j as isize;
            // o − j + off ∈ [0, m)
            let o_lo = (j - off).max(0);
            let o_hi = (j - off + m - 1).min(self.n_out as isize - 1);
            if o_hi < o_lo {
                *out = 0.0;
                continue;
            }
            let t_lo = (o_lo - j + off) as usize;
            let len = (o_hi - o_lo + 1) as usize;
            *out = super::grid::dot(
                &g[o_lo as usize..o_lo as usize + len],
                &self.kernel[t_lo..t_lo + len],
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(kernel: &[f64], offset: usize, x: &[f64], n_out: usize) -> Vec<f64> {
        (0..n_out)
            .map(|o| {
                (0..x.len())
                    .filter_map(|j| {
                        let t = o as isize - j as isize + offset as isize;
                        (t >= 0 && (t as usize) < kernel.len()).then(|| x[j] * kernel[t as usize])
                    })
                    .sum()
            })
            .collect()
    }

    fn naive_t(kernel: &[f64], offset: usize, g: &[f64], n_in: usize) -> Vec<f64> {
        (0..n_in)
            .map(|j| {
                (0..g.len())
                    .filter_map(|o| {
                        let t = o as isize - j as isize + offset as isize;
                        (t >= 0 && (t as usize) < kernel.len()).then(|| g[o] * kernel[t as usize])
                    })
                    .sum()
            })
            .collect()
    }

    fn check(klen: usize, offset: usize, n_in: usize, n_out: usize) {
        let kernel: Vec<f64> = (0..klen)
            .map(|t| 1.0 / (1.0 + t as f64) + 0.1 * (t as f64).sin())
            .collect();
        let x: Vec<f64> = (0..n_in).map(|j| (0.3 * j as f64).cos() + 1.5).collect();
        let g: Vec<f64> = (0..n_out).map(|o| (0.7 * o as f64).sin()).collect();
        let op = KernelOp::new(kernel.clone(), offset, n_in, n_out);
        let mut y = vec![0.0; n_out];
        op.apply(&x, &mut y);
        for (a, b) in y.iter().zip(naive(&kernel, offset, &x, n_out)) {
            assert!((a - b).abs() < 1e-11, "{a} vs {b}");
        }
        let mut z = vec![0.0; n_in];
        op.apply_transpose(&g, &mut z);
        for (a, b) in z.iter().zip(naive_t(&kernel, offset, &g, n_in)) {
            assert!((a - b).abs() < 1e-11, "{a} vs {b}");
        }
    }

    #[test]
    fn direct_matches_naive() {
        check(9, 4, 50, 50);
        check(5, 0, 20, 24);
    }

    #[test]
    fn spectral_matches_naive() {
        check(301, 150, 400, 400);
        check(200, 0, 300, 499);
        assert!(KernelOp::new(vec![1.0; 200], 0, 10, 10).is_spectral());
    }

    #[test]
    fn symmetric_layout() {
        let op = KernelOp::symmetric(&[1.0, 0.5], 3);
        let mut y = vec![0.0; 3];
        op.apply(&[1.0, 0.0, 0.0], &mut y);
        assert_eq!(y, vec![1.0, 0.5, 0.0]);
    }
}
