//! Densities sampled on a uniform grid.
//!
//! A [`GridDensity`] is read as the piecewise-linear interpolant of its
//! samples. Mass, mean and entropy use trapezoid weights (end points count
//! half); absolute moments integrate |x − c|^p exactly against the
//! interpolant, which keeps p ∈ (−1, 0) finite when c falls on the grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on the trapezoid mass after normalization.
pub const MASS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDensity {
    x_min: f64,
    step: f64,
    values: Vec<f64>,
    /// Trapezoid mass of the samples before normalization.
    raw_mass: f64,
}

impl GridDensity {
    /// Builds a grid and normalizes it to unit trapezoid mass.
    pub fn new(x_min: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Argument(format!(
                "grid needs at least 2 points, got {}",
                values.len()
            )));
        }
        if !(step > 0.0) || !step.is_finite() || !x_min.is_finite() {
            return Err(Error::Argument(format!(
                "invalid grid geometry x_min={x_min}, step={step}"
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::Argument(format!(
                "grid values must be finite and ≥ 0, found {bad}"
            )));
        }
        let raw_mass = trapezoid_sum(&values) * step;
        if !(raw_mass > 0.0) {
            return Err(Error::Argument("grid has zero mass".into()));
        }
        let values = values.into_iter().map(|v| v / raw_mass).collect();
        Ok(Self {
            x_min,
            step,
            values,
            raw_mass,
        })
    }

    /// Samples `f` at `n` equispaced points spanning `[lo, hi]`.
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(Error::Argument(format!(
                "cannot sample [{lo}, {hi}] with {n} points"
            )));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let values = (0..n).map(|i| f(lo + i as f64 * step)).collect();
        Self::new(lo, step, values)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.abscissa(self.values.len() - 1)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn abscissa(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.step
    }

    pub fn abscissas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| self.abscissa(i))
    }

    /// Trapezoid mass of the samples before normalization.
    pub fn raw_mass(&self) -> f64 {
        self.raw_mass
    }

    /// Trapezoid mass (1 up to rounding after construction).
    pub fn mass(&self) -> f64 {
        trapezoid_sum(&self.values) * self.step
    }

    fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.values.len() {
            0.5
        } else {
            1.0
        }
    }

    /// Probability masses `w_i·step·f_i` of the discretized law; they sum to 1.
    pub fn masses(&self) -> Vec<f64> {
        let mut m: Vec<f64> = (0..self.values.len())
            .map(|i| self.weight(i) * self.step * self.values[i])
            .collect();
        let total: f64 = m.iter().sum();
        m.iter_mut().for_each(|v| *v /= total);
        m
    }

    pub fn mean(&self) -> f64 {
        let mass = self.mass();
        (0..self.len())
            .map(|i| self.weight(i) * self.abscissa(i) * self.values[i])
            .sum::<f64>()
            * self.step
            / mass
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let mass = self.mass();
        (0..self.len())
            .map(|i| {
                let d = self.abscissa(i) - mean;
                self.weight(i) * d * d * self.values[i]
            })
            .sum::<f64>()
            * self.step
            / mass
    }

    /// Largest sample.
    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Linear interpolation of the density at `x` (0 outside the grid).
    pub fn interpolate(&self, x: f64) -> f64 {
        let t = (x - self.x_min) / self.step;
        if t < 0.0 || t > (self.len() - 1) as f64 {
            return 0.0;
        }
        let i = (t.floor() as usize).min(self.len() - 2);
        let frac = t - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }
}

fn trapezoid_sum(v: &[f64]) -> f64 {
    let n = v.len();
    v.iter().sum::<f64>() - 0.5 * (v[0] + v[n - 1])
}

/// Differential entropy −∫ f ln f of the grid, in nats (0·ln 0 = 0).
pub fn entropy_of_grid(f: &GridDensity) -> f64 {
    let mass = f.mass();
    let sum: f64 = (0..f.len())
        .map(|i| {
            let v = f.values[i] / mass;
            if v > 0.0 {
                f.weight(i) * v * v.ln()
            } else {
                0.0
            }
        })
        .sum();
    -sum * f.step
}

/// D(f ‖ N(0, m₂)) = ½ ln(2πe m₂) − h(f), with m₂ the second moment about 0.
pub fn kl_to_gaussian(f: &GridDensity) -> f64 {
    let m2 = moment_of_grid(f, 2.0, 0.0)
        .expect("p = 2 is always valid")
        .powi(2);
    0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * m2).ln() - entropy_of_grid(f)
}

/// (E|X − center|^p)^{1/p} for the piecewise-linear interpolant of `f`.
///
/// For |p| < 1e−8 the limit exp(E ln|X − center|) is returned.
pub fn moment_of_grid(f: &GridDensity, p: f64, center: f64) -> Result<f64> {
    if !(p > -1.0) {
        return Err(Error::Domain(format!(
            "moment order must exceed −1, got {p}"
        )));
    }
    let log_limit = p.abs() < 1e-8;
    let mut acc = 0.0;
    for i in 0..f.len() - 1 {
        let u0 = f.abscissa(i) - center;
        let u1 = f.abscissa(i + 1) - center;
        let slope = (f.values[i + 1] - f.values[i]) / f.step;
        let intercept = f.values[i] - slope * u0;
        let piece = |lo: f64, hi: f64| -> f64 {
            // ∫_lo^hi |u|^p (intercept + slope·u) du
            if lo >= 0.0 {
                cell_integral(lo, hi, intercept, slope, p, log_limit)
            } else {
                // u = −w on [−hi, −lo], integrand |w|^p (intercept − slope·w)
                cell_integral(-hi, -lo, intercept, -slope, p, log_limit)
            }
        };
        acc += if u0 < 0.0 && u1 > 0.0 {
            piece(u0, 0.0) + piece(0.0, u1)
        } else {
            piece(u0, u1)
        };
    }
    let mass = f.mass();
    let mean = acc / mass;
    if log_limit {
        Ok(mean.exp())
    } else {
        Ok(mean.max(0.0).powf(1.0 / p))
    }
}

/// ∫_lo^hi u^p (a + b u) du for 0 ≤ lo ≤ hi, or ∫ ln(u)(a + b u) du in the log limit.
fn cell_integral(lo: f64, hi: f64, a: f64, b: f64, p: f64, log_limit: bool) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if log_limit {
        let prim = |u: f64| {
            if u == 0.0 {
                0.0
            } else {
                a * (u * u.ln() - u) + b * (0.5 * u * u * u.ln() - 0.25 * u * u)
            }
        };
        return prim(hi) - prim(lo);
    }
    a * power_difference(lo, hi, p + 1.0) + b * power_difference(lo, hi, p + 2.0)
}

/// (hi^k − lo^k)/k for k > 0, accurate when k is tiny.
fn power_difference(lo: f64, hi: f64, k: f64) -> f64 {
    if lo == 0.0 {
        return hi.powf(k) / k;
    }
    let ratio_log = (hi / lo).ln();
    lo.powf(k) * (k * ratio_log).exp_m1() / k
}

/// Density of the independent sum, by trapezoid-weighted discrete convolution.
pub fn convolve(f: &GridDensity, g: &GridDensity) -> Result<GridDensity> {
    let rel = (f.step - g.step).abs() / f.step.max(g.step);
    if rel > 1e-12 {
        return Err(Error::Argument(format!(
            "convolution needs equal steps, got {} and {}",
            f.step, g.step
        )));
    }
    let (n, m) = (f.len(), g.len());
    let a = &f.values;
    let rev: Vec<f64> = g.values.iter().rev().cloned().collect();
    let mut out = Vec::with_capacity(n + m - 1);
    for k in 0..n + m - 1 {
        let lo = k.saturating_sub(m - 1);
        let hi = k.min(n - 1);
        // g[k − i] = rev[m − 1 − k + i]
        let off = m - 1 + lo - k;
        let len = hi - lo + 1;
        let s = if len == 1 {
            0.0
        } else {
            let full = dot(&a[lo..=hi], &rev[off..off + len]);
            full - 0.5 * (a[lo] * rev[off] + a[hi] * rev[off + len - 1])
        };
        out.push((s * f.step).max(0.0));
    }
    GridDensity::new(f.x_min + g.x_min, f.step, out)
}

/// Dot product with four fixed accumulators (fixed summation order).
pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = [0.0f64; 4];
    let chunks = x.len() / 4;
    for c in 0..chunks {
        let j = 4 * c;
        acc[0] += x[j] * y[j];
        acc[1] += x[j + 1] * y[j + 1];
        acc[2] += x[j + 2] * y[j + 2];
        acc[3] += x[j + 3] * y[j + 3];
    }
    let mut tail = 0.0;
    for j in 4 * chunks..x.len() {
        tail += x[j] * y[j];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{E, PI};

    fn gaussian(sigma: f64, n: usize) -> GridDensity {
        let c = 1.0 / (sigma * (2.0 * PI).sqrt());
        GridDensity::from_fn(
            |x| c * (-0.5 * (x / sigma).powi(2)).exp(),
            -10.0 * sigma,
            10.0 * sigma,
            n,
        )
        .unwrap()
    }

    #[test]
    fn uniform_entropies() {
        let u01 = GridDensity::from_fn(|_| 1.0, 0.0, 1.0, 1001).unwrap();
        assert!(entropy_of_grid(&u01).abs() < 1e-6);
        let u = GridDensity::from_fn(|_| 0.5, -1.0, 1.0, 1001).unwrap();
        assert!((entropy_of_grid(&u) - 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn gaussian_entropy_and_kl() {
        let g = gaussian(1.0, 4096);
        assert!((entropy_of_grid(&g) - 0.5 * (2.0 * PI * E).ln()).abs() < 1e-5);
        assert!(kl_to_gaussian(&g).abs() < 1e-5);
    }

    #[test]
    fn uniform_kl_matches_normalized_second_moment() {
        let u = GridDensity::from_fn(|_| 1.0 / 3.0, -1.5, 1.5, 3001).unwrap();
        assert!((kl_to_gaussian(&u) - 0.5 * (2.0 * PI * E / 12.0).ln()).abs() < 1e-6);
    }

    #[test]
    fn laplace_kl() {
        let lap = GridDensity::from_fn(|x: f64| 0.5 * (-x.abs()).exp(), -30.0, 30.0, 6001).unwrap();
        // ½ln(4πe) − (1 + ln 2)
        assert!((kl_to_gaussian(&lap) - 0.072_364_942_924_700_09).abs() < 1e-5);
    }

    #[test]
    fn moments() {
        let u = GridDensity::from_fn(|_| 0.5, -1.0, 1.0, 1001).unwrap();
        assert_relative_eq!(
            moment_of_grid(&u, 2.0, 0.0).unwrap(),
            1.0 / 3f64.sqrt(),
            max_relative = 1e-12
        );
        // E|U|^{-1/2} = ∫_0^1 u^{-1/2} du = 2 → ‖U‖_{-1/2} = 1/4
        assert_relative_eq!(
            moment_of_grid(&u, -0.5, 0.0).unwrap(),
            0.25,
            max_relative = 1e-12
        );
        let g = gaussian(1.0, 4096);
        assert_relative_eq!(
            moment_of_grid(&g, 1.0, 0.0).unwrap(),
            (2.0 / PI).sqrt(),
            max_relative = 1e-5
        );
        let lap = GridDensity::from_fn(|x: f64| 0.5 * (-x.abs()).exp(), -40.0, 40.0, 8001).unwrap();
        assert_relative_eq!(
            moment_of_grid(&lap, 2.0, 0.0).unwrap(),
            2f64.sqrt(),
            max_relative = 1e-4
        );
        assert!(matches!(
            moment_of_grid(&u, -1.0, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn log_moment_limit() {
        // E ln|U| for U uniform on [−1,1] is −1
        let u = GridDensity::from_fn(|_| 0.5, -1.0, 1.0, 1001).unwrap();
        assert_relative_eq!(
            moment_of_grid(&u, 0.0, 0.0).unwrap(),
            (-1f64).exp(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn triangle_from_uniforms() {
        let u = GridDensity::from_fn(|_| 1.0, 0.0, 1.0, 1001).unwrap();
        let t = convolve(&u, &u).unwrap();
        assert_eq!(t.len(), 2001);
        assert_relative_eq!(t.x_min(), 0.0);
        assert_relative_eq!(t.x_max(), 2.0, max_relative = 1e-12);
        assert!((t.values()[1000] - 1.0).abs() < 1e-12);
        for (i, x) in t.abscissas().enumerate() {
            let exact = 1.0 - (x - 1.0).abs();
            assert!((t.values()[i] - exact).abs() < 1e-9, "x={x}");
        }
        assert!((entropy_of_grid(&t) - 0.5).abs() < 1e-5);
    }

    #[test]
    fn gaussian_sum() {
        let g = gaussian(1.0, 4096);
        let s = convolve(&g, &g).unwrap();
        let c = 1.0 / (2.0 * PI.sqrt());
        let worst = s
            .abscissas()
            .zip(s.values())
            .map(|(x, v)| (v - c * (-x * x / 4.0).exp()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-5, "L∞ = {worst}");
        assert_relative_eq!(s.variance(), 2.0, max_relative = 1e-5);
    }

    #[test]
    fn narrow_uniform_is_approximate_identity() {
        let g = gaussian(1.0, 4001);
        let h = g.step();
        let width = 10.0 * h;
        let narrow = GridDensity::from_fn(|_| 1.0 / width, -width / 2.0, width / 2.0, 11).unwrap();
        let s = convolve(&g, &narrow).unwrap();
        let l1: f64 = s
            .abscissas()
            .zip(s.values())
            .map(|(x, v)| (v - g.interpolate(x)).abs())
            .sum::<f64>()
            * h;
        // |f'| ≤ (2πe)^{-1/2}, shift by at most width/2
        let bound = width * (2.0 * PI * E).powf(-0.5);
        assert!(l1 <= bound, "L1 = {l1}, bound {bound}");
    }

    #[test]
    fn mismatched_steps_rejected() {
        let a = GridDensity::from_fn(|_| 1.0, 0.0, 1.0, 11).unwrap();
        let b = GridDensity::from_fn(|_| 1.0, 0.0, 1.0, 21).unwrap();
        assert!(matches!(convolve(&a, &b), Err(Error::Argument(_))));
    }

    #[test]
    fn invalid_grids() {
        assert!(GridDensity::new(0.0, 0.1, vec![1.0]).is_err());
        assert!(GridDensity::new(0.0, -0.1, vec![1.0, 1.0]).is_err());
        assert!(GridDensity::new(0.0, 0.1, vec![1.0, -1.0]).is_err());
        assert!(GridDensity::new(0.0, 0.1, vec![0.0, 0.0]).is_err());
    }
}
