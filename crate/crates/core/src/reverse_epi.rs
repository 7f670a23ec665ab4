//! Forward and reverse entropy power inequalities for independent sums.
//!
//! N(X) and N(Y) come from the entropy table; N(X+Y) from the trapezoid
//! convolution of grids that share one step and put every shift on a grid
//! point.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::numerics::grid::{convolve, entropy_of_grid, GridDensity};
use crate::vector_bounds::{c_constant, ProductDistribution};

/// Grid points given to the narrowest input.
pub const POINTS_PER_INPUT: usize = 4096;
/// Largest tail mass an input window may leave out.
pub const MAX_MASS_LOSS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpiReport {
    pub n_x: f64,
    pub n_y: f64,
    pub n_sum: f64,
    /// N(X+Y)/(N(X) + N(Y)).
    pub ratio: f64,
    /// ratio − 1; the forward inequality asks for ≥ 0.
    pub forward_slack: f64,
    pub reverse_constant: f64,
    /// reverse_constant − ratio.
    pub reverse_slack: f64,
    pub forward_passed: bool,
    pub reverse_passed: bool,
}

impl EpiReport {
    fn new(n_x: f64, n_y: f64, n_sum: f64, reverse_constant: f64) -> Self {
        let ratio = n_sum / (n_x + n_y);
        Self {
            n_x,
            n_y,
            n_sum,
            ratio,
            forward_slack: ratio - 1.0,
            reverse_constant,
            reverse_slack: reverse_constant - ratio,
            forward_passed: ratio >= 1.0 - 1e-4,
            reverse_passed: ratio <= reverse_constant + 1e-3,
        }
    }

    pub fn passed(&self) -> bool {
        self.forward_passed && self.reverse_passed
    }
}

/// N(X) = e^{2h/n}.
pub fn entropy_power(h: f64, n: usize) -> Result<f64> {
    if n == 0 || !h.is_finite() {
        return Err(Error::Domain(format!(
            "entropy power needs finite h and n ≥ 1, got h={h}, n={n}"
        )));
    }
    Ok((2.0 * h / n as f64).exp())
}

/// Window around the shift whose outside mass is below `target`.
fn tail_window(spec: &DistributionSpec, target: f64) -> Result<(f64, f64)> {
    let (slo, shi) = spec.support();
    if slo.is_finite() && shi.is_finite() {
        return Ok((slo, shi));
    }
    let mut extent = 10.0;
    loop {
        let (lo, hi) = spec.grid_window(extent);
        if spec.mass_outside(lo, hi)? <= target {
            return Ok((lo, hi));
        }
        extent *= 1.25;
        if extent > 1e4 {
            return Err(Error::accuracy(
                format!("no finite window holds {spec}"),
                0.0,
                target,
            ));
        }
    }
}

/// Grids with a common step for independent summands.
///
/// The narrowest window gets about `points` samples. When some input has
/// compact support the step divides its half-width, so its edges fall on
/// grid points.
pub fn aligned_grids(specs: &[DistributionSpec], points: usize) -> Result<Vec<GridDensity>> {
    let windows = specs
        .iter()
        .map(|s| {
            let target = if s.is_log_concave() { 1e-9 } else { 1e-7 };
            tail_window(s, target)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut step = windows
        .iter()
        .map(|(lo, hi)| (hi - lo) / (points - 1) as f64)
        .fold(f64::INFINITY, f64::min);
    if let Some(compact) = specs.iter().find(|s| {
        let (lo, hi) = s.support();
        lo.is_finite() && hi.is_finite()
    }) {
        let (lo, hi) = compact.support();
        let half = 0.5 * (hi - lo);
        step = half / (half / step).ceil();
    }
    specs
        .iter()
        .zip(&windows)
        .map(|(spec, (lo, hi))| {
            let below = ((spec.shift - lo) / step - 1e-9).ceil().max(0.0) as usize;
            let above = ((hi - spec.shift) / step - 1e-9).ceil().max(0.0) as usize;
            let x_min = spec.shift - below as f64 * step;
            let lost = spec.mass_outside(x_min, spec.shift + above as f64 * step)?;
            if lost > MAX_MASS_LOSS {
                return Err(Error::accuracy(
                    format!("grid for {spec} loses too much mass"),
                    1.0 - lost,
                    lost,
                ));
            }
            spec.sample_grid(x_min, step, below + above + 1)
        })
        .collect()
}

/// h(X + Y) for independent X, Y from their grid convolution.
pub fn sum_entropy(x: &DistributionSpec, y: &DistributionSpec) -> Result<f64> {
    let grids = aligned_grids(&[*x, *y], POINTS_PER_INPUT)?;
    Ok(entropy_of_grid(&convolve(&grids[0], &grids[1])?))
}

fn require_zero_mean(spec: &DistributionSpec) -> Result<()> {
    let scale = spec.std_dev().unwrap_or(1.0);
    if spec.mean().abs() > 1e-12 * scale {
        return Err(Error::Contract(format!("{spec} is not zero-mean")));
    }
    Ok(())
}

/// N(X) + N(Y) ≤ N(X+Y) ≤ (πe/2)(N(X) + N(Y)) for independent zero-mean log-concave X, Y.
pub fn verify_reverse_epi_scalar(x: &DistributionSpec, y: &DistributionSpec) -> Result<EpiReport> {
    for s in [x, y] {
        if !s.is_log_concave() {
            return Err(Error::Contract(format!("{s} is not log-concave")));
        }
        require_zero_mean(s)?;
    }
    let n_x = entropy_power(x.entropy()?, 1)?;
    let n_y = entropy_power(y.entropy()?, 1)?;
    let n_sum = entropy_power(sum_entropy(x, y)?, 1)?;
    Ok(EpiReport::new(n_x, n_y, n_sum, 0.5 * PI * E))
}

/// πe(γ+1)²/((2γ+1)(3γ+1)) for γ ∈ (−1/3, 0).
pub fn gamma_reverse_constant(gamma: f64) -> Result<f64> {
    if !(gamma > -1.0 / 3.0 && gamma < 0.0) {
        return Err(Error::Domain(format!(
            "γ must lie in (−1/3, 0), got {gamma}"
        )));
    }
    Ok(PI * E * (gamma + 1.0).powi(2) / ((2.0 * gamma + 1.0) * (3.0 * gamma + 1.0)))
}

/// Reverse EPI for two symmetric γ-concave laws with the same γ.
pub fn verify_reverse_epi_gamma(x: &DistributionSpec, y: &DistributionSpec) -> Result<EpiReport> {
    let (gx, gy) = match (x.gamma_concave(), y.gamma_concave()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Contract(
                "both laws must be declared γ-concave".into(),
            ))
        }
    };
    if gx != gy {
        return Err(Error::Argument(format!(
            "γ differs between summands: {gx} vs {gy}"
        )));
    }
    let constant = gamma_reverse_constant(gx)?;
    if !x.is_symmetric() || !y.is_symmetric() {
        return Err(Error::Contract(
            "γ-concave reverse EPI needs symmetric laws".into(),
        ));
    }
    let n_x = entropy_power(x.entropy()?, 1)?;
    let n_y = entropy_power(y.entropy()?, 1)?;
    let n_sum = entropy_power(sum_entropy(x, y)?, 1)?;
    Ok(EpiReport::new(n_x, n_y, n_sum, constant))
}

/// Reverse EPI for product vectors with proportional (diagonal) covariances.
///
/// The constant is 2πe·c(n), which is πe³n²/(2√2(n+2)) in general and at most
/// πe³ when both products are unconditional.
pub fn verify_reverse_epi_product(
    x: &ProductDistribution,
    y: &ProductDistribution,
) -> Result<EpiReport> {
    if x.n() != y.n() {
        return Err(Error::Argument(format!(
            "dimensions differ: {} vs {}",
            x.n(),
            y.n()
        )));
    }
    x.require_symmetric_log_concave()?;
    y.require_symmetric_log_concave()?;
    let n = x.n();
    let vx = x.variances()?;
    let vy = y.variances()?;
    let t = vy[0] / vx[0];
    if let Some(i) = (0..n).find(|&i| (vy[i] / vx[i] - t).abs() > 1e-9 * t) {
        return Err(Error::Contract(format!(
            "covariances are not proportional: ratio {} at coordinate 0 but {} at coordinate {i}",
            t,
            vy[i] / vx[i]
        )));
    }
    let constant = 2.0 * PI * E * c_constant(n, x.unconditional() && y.unconditional())?;
    let mut cache: Vec<(DistributionSpec, DistributionSpec, f64)> = Vec::new();
    let mut h_sum = 0.0;
    for (a, b) in x.components().iter().zip(y.components()) {
        let h = match cache.iter().find(|(ca, cb, _)| ca == a && cb == b) {
            Some(&(_, _, h)) => h,
            None => {
                let h = sum_entropy(a, b)?;
                cache.push((*a, *b, h));
                h
            }
        };
        h_sum += h;
    }
    let n_x = entropy_power(x.entropy()?, n)?;
    let n_y = entropy_power(y.entropy()?, n)?;
    let n_sum = entropy_power(h_sum, n)?;
    Ok(EpiReport::new(n_x, n_y, n_sum, constant))
}
