//! Rate-distortion bounds under the distortion |x − x̂|^r.
//!
//! The closed-form side (Shannon lower bound, test-channel upper bounds and
//! the universal gap curves) is checked against a Blahut–Arimoto solver on
//! the source grid.

use std::f64::consts::{E, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::entropy_bounds::{log_alpha, DEFAULT_EXTENT, DEFAULT_GRID_N};
use crate::error::{Error, Result};
use crate::numerics::grid::{convolve, moment_of_grid, GridDensity};
use crate::numerics::kernel::KernelOp;
use crate::numerics::special::{log_gamma, log_gamma_root};
use crate::report::{format_cell, BoundReport, Units};
use crate::reverse_epi::aligned_grids;
use crate::vector_bounds::{c_constant, ProductDistribution};

/// Kernel entries below e^{−50} are dropped.
const KERNEL_CUTOFF: f64 = 50.0;

/// β_r = √(1 + r^{2/r} Γ(3/r)/Γ(1/r)).
pub fn beta(r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("β_r requires r > 0, got {r}")));
    }
    let log_ratio = 2.0 * r.ln() / r + log_gamma(3.0 / r)? - log_gamma(1.0 / r)?;
    Ok((1.0 + log_ratio.exp()).sqrt())
}

fn check_r_d(r: f64, d: f64) -> Result<()> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::Domain(format!(
            "distortion exponent must be ≥ 1, got {r}"
        )));
    }
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Domain(format!(
            "distortion must be positive, got {d}"
        )));
    }
    Ok(())
}

/// h(X) − ln α_r − (1/r) ln d.
pub fn shannon_lower_bound(spec: &DistributionSpec, r: f64, d: f64) -> Result<f64> {
    check_r_d(r, d)?;
    Ok(spec.entropy()? - log_alpha(r)? - d.ln() / r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Positive,
    Zero,
    IndeterminateWindow,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Positive => "positive",
            Regime::Zero => "zero",
            Regime::IndeterminateWindow => "indeterminate_window",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UpperBounds {
    pub gaussian_test_channel: Option<f64>,
    pub gg_test_channel: Option<f64>,
    pub symmetric_test_channel: Option<f64>,
}

impl UpperBounds {
    pub fn min(&self) -> Option<f64> {
        [
            self.gaussian_test_channel,
            self.gg_test_channel,
            self.symmetric_test_channel,
        ]
        .into_iter()
        .flatten()
        .reduce(f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestChannelUpper {
    pub regime: Regime,
    pub bounds: UpperBounds,
}

/// Upper bounds on R(d) from the additive-noise test channels.
///
/// In the zero regime every applicable entry is 0. In the window between the
/// ‖X‖₂ and ‖X‖_r thresholds only the absolute caps are known.
pub fn test_channel_upper(spec: &DistributionSpec, r: f64, d: f64) -> Result<TestChannelUpper> {
    check_r_d(r, d)?;
    let sigma = spec.abs_moment(2.0, 0.0)?.value;
    let t = d.powf(1.0 / r);
    let mut bounds = UpperBounds::default();
    if r <= 2.0 {
        let regime = if sigma > t {
            bounds.gaussian_test_channel = Some((sigma / t).ln());
            Regime::Positive
        } else {
            bounds.gaussian_test_channel = Some(0.0);
            Regime::Zero
        };
        return Ok(TestChannelUpper { regime, bounds });
    }
    let symmetric = spec.is_symmetric() && spec.is_log_concave();
    let g_root = log_gamma_root(r)?;
    let norm_r = spec.abs_moment(r, 0.0)?.value;
    let zero = norm_r <= t || (symmetric && sigma.ln() <= 0.5 * LN_2 + t.ln() - g_root);
    if zero {
        bounds.gg_test_channel = Some(0.0);
        if symmetric {
            bounds.symmetric_test_channel = Some(0.0);
        }
        return Ok(TestChannelUpper {
            regime: Regime::Zero,
            bounds,
        });
    }
    let la = log_alpha(r)?;
    let lb = beta(r)?.ln();
    if sigma >= t {
        // SLB + D(X‖G_X) = ½ ln(2πe σ²) − ln α_r − (1/r) ln d
        let base = 0.5 * (2.0 * PI * E * sigma * sigma).ln() - la - d.ln() / r;
        bounds.gg_test_channel = Some(base + lb);
        if symmetric {
            bounds.symmetric_test_channel = Some(base + la + g_root - LN_2 - 0.5 * (PI * E).ln());
        }
        return Ok(TestChannelUpper {
            regime: Regime::Positive,
            bounds,
        });
    }
    let cap = 0.5 * (2.0 * PI * E).ln() + lb - la;
    bounds.gg_test_channel = Some(cap);
    if symmetric {
        bounds.symmetric_test_channel = Some(cap.min(g_root - 0.5 * LN_2));
    }
    Ok(TestChannelUpper {
        regime: Regime::IndeterminateWindow,
        bounds,
    })
}

/// Distribution-free bound on R(d) − SLB for log-concave sources, in nats.
///
/// ln(α_r/2) for r ≤ 2. For r > 2 it is ln(√(πe/2) β_r), and for symmetric
/// sources additionally at most ln(α_r Γ(r+1)^{1/r}/(2√2)).
pub fn universal_gap_curve(r: f64, symmetric: bool) -> Result<f64> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::Domain(format!(
            "distortion exponent must be ≥ 1, got {r}"
        )));
    }
    if r <= 2.0 {
        return Ok(log_alpha(r)? - LN_2);
    }
    let general = 0.5 * (0.5 * PI * E).ln() + beta(r)?.ln();
    if !symmetric {
        return Ok(general);
    }
    let refined = log_alpha(r)? + log_gamma_root(r)? - 1.5 * LN_2;
    Ok(general.min(refined))
}

/// E|X − X̂|^r for the Gaussian test channel X̂ = (1 − D/σ²)(X + Z), D = d^{2/r},
/// computed on a grid.
pub fn gaussian_test_channel_distortion(spec: &DistributionSpec, r: f64, d: f64) -> Result<f64> {
    check_r_d(r, d)?;
    let sigma2 = spec.abs_moment(2.0, 0.0)?.value.powi(2);
    let dd = d.powf(2.0 / r);
    if dd >= sigma2 {
        return Err(Error::Domain(format!(
            "the Gaussian test channel needs d^(2/r) < ‖X‖₂², got {dd} ≥ {sigma2}"
        )));
    }
    let a = 1.0 - dd / sigma2;
    let noise_sd = a * (sigma2 * dd / (sigma2 - dd)).sqrt();
    // X − X̂ = (1 − a)X − aZ, and aZ is symmetric
    let signal = spec.scaled(1.0 - a)?;
    let noise = DistributionSpec::gaussian(noise_sd)?;
    let grids = aligned_grids(&[signal, noise], 2048)?;
    let err = convolve(&grids[0], &grids[1])?;
    Ok(moment_of_grid(&err, r, 0.0)?.powf(r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaSettings {
    pub max_iterations: usize,
    /// Stop once the relative change of the objective is at most this.
    pub tolerance: f64,
    pub sweep_points: usize,
    /// The sweep spans [1/span, span]·(r/d_min).
    pub sweep_span: f64,
    /// A point that hits `max_iterations` is still accepted when its
    /// certified gap max_j ln λ_j (an upper bound on the rate error) is below this.
    pub gap_tolerance: f64,
}

impl Default for BaSettings {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            tolerance: 1e-9,
            sweep_points: 60,
            sweep_span: 1e3,
            gap_tolerance: 5e-3,
        }
    }
}

/// One Lagrange point of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaSample {
    pub s: f64,
    pub d: f64,
    pub rate: f64,
    pub iterations: usize,
    /// max_j ln λ_j at the returned iterate.
    pub certified_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaCurve {
    pub r: f64,
    /// Smallest distortion reachable at zero rate.
    pub d_max: f64,
    /// Parametric points ordered by increasing d, ending at (d_max, 0).
    pub samples: Vec<BaSample>,
    pub targets: Vec<f64>,
    pub rates: Vec<f64>,
}

impl BaCurve {
    /// Linear interpolation of the parametric points.
    pub fn rate_at(&self, d: f64) -> Result<f64> {
        if d >= self.d_max {
            return Ok(0.0);
        }
        let first = &self.samples[0];
        if d < first.d {
            return Err(Error::Range(format!(
                "d = {d} lies below the smallest swept distortion {}",
                first.d
            )));
        }
        let k = self.samples.partition_point(|p| p.d <= d);
        if k == self.samples.len() {
            return Ok(self.samples[k - 1].rate);
        }
        let (a, b) = (&self.samples[k - 1], &self.samples[k]);
        let w = if b.d > a.d {
            (d - a.d) / (b.d - a.d)
        } else {
            0.0
        };
        Ok(a.rate + w * (b.rate - a.rate))
    }
}

fn distortion_ops(step: f64, n: usize, r: f64, s: f64) -> (KernelOp, KernelOp) {
    let reach = (KERNEL_CUTOFF / s).powf(1.0 / r) / step;
    let band = if reach.is_finite() {
        (reach.floor() as usize).min(n - 1)
    } else {
        n - 1
    };
    let rho: Vec<f64> = (0..=band).map(|k| (k as f64 * step).powf(r)).collect();
    let kern: Vec<f64> = rho.iter().map(|&x| (-s * x).exp()).collect();
    let weighted: Vec<f64> = kern.iter().zip(&rho).map(|(k, x)| k * x).collect();
    (
        KernelOp::symmetric(&kern, n),
        KernelOp::symmetric(&weighted, n),
    )
}

struct BaState {
    objective: f64,
    ratio: Vec<f64>,
    lam: Vec<f64>,
}

/// Objective −Σ p ln(Kq) at `q` and the multipliers λ = Kᵀ(p/Kq).
fn ba_eval(op: &KernelOp, p: &[f64], q: &[f64]) -> BaState {
    let n = p.len();
    let mut c = vec![0.0; n];
    op.apply(q, &mut c);
    let floor_rel = if op.is_spectral() { 1e-14 } else { 0.0 };
    let floor = (floor_rel * c.iter().cloned().fold(0.0, f64::max)).max(f64::MIN_POSITIVE);
    let mut objective = 0.0;
    let mut ratio = vec![0.0; n];
    for i in 0..n {
        let ci = c[i].max(floor);
        if p[i] > 0.0 {
            objective -= p[i] * ci.ln();
        }
        ratio[i] = p[i] / ci;
    }
    let mut lam = vec![0.0; n];
    op.apply_transpose(&ratio, &mut lam);
    BaState {
        objective,
        ratio,
        lam,
    }
}

/// One multiplicative update q ← qλ, renormalized.
fn ba_update(q: &[f64], lam: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = q.iter().zip(lam).map(|(a, l)| a * l.max(0.0)).collect();
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= total);
    out
}

/// Fixed point of the alternating minimization at slope −s, started from q = p.
fn ba_point(p: &[f64], s: f64, step: f64, r: f64, settings: &BaSettings) -> Result<BaSample> {
    let n = p.len();
    let (op, op_rho) = distortion_ops(step, n, r, s);
    // warm starts from a neighbouring s carry structure that decays only like 1/iterations
    let q = &mut p.to_vec();
    let mut state = ba_eval(&op, p, q);
    let mut prev = f64::NAN;
    let mut it = 1;
    loop {
        let done = it > 1
            && (prev - state.objective).abs()
                <= settings.tolerance * state.objective.abs().max(f64::MIN_POSITIVE);
        if done || it >= settings.max_iterations {
            let mut weighted = vec![0.0; n];
            op_rho.apply(q, &mut weighted);
            let d: f64 = state.ratio.iter().zip(&weighted).map(|(a, b)| a * b).sum();
            let kl: f64 = q
                .iter()
                .zip(&state.lam)
                .filter(|(qj, l)| **qj > 0.0 && **l > 0.0)
                .map(|(qj, l)| qj * l * l.ln())
                .sum();
            let rate = (state.objective - s * d - kl).max(0.0);
            let certified_gap = state.lam.iter().cloned().fold(0.0, f64::max).ln().max(0.0);
            if done || certified_gap <= settings.gap_tolerance {
                return Ok(BaSample {
                    s,
                    d,
                    rate,
                    iterations: it,
                    certified_gap,
                });
            }
            return Err(Error::accuracy(
                format!(
                    "Blahut–Arimoto did not converge at s = {s} within {} iterations (last d = {d})",
                    settings.max_iterations
                ),
                rate,
                certified_gap,
            ));
        }
        prev = state.objective;
        *q = ba_update(q, &state.lam);
        state = ba_eval(&op, p, q);
        it += 1;
    }
}

/// R(d) of the grid source with reconstruction on the same grid.
///
/// The Lagrange grid is s_k = span·(r/d_min)·ratio^{−k} with `sweep_points`
/// points down to (r/d_min)/span. Only the indices that bracket the targets
/// are solved: the walk starts near the high-resolution estimate s ≈ 4/(r·d_min),
/// moves up until d(s) < d_min, then down until d(s) passes the largest target.
/// Targets at or above d_max have rate 0.
pub fn blahut_arimoto_rd(
    f: &GridDensity,
    r: f64,
    d_targets: &[f64],
    settings: &BaSettings,
) -> Result<BaCurve> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::Domain(format!(
            "distortion exponent must be ≥ 1, got {r}"
        )));
    }
    if d_targets.is_empty() || d_targets.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(Error::Argument(
            "distortion targets must be positive and finite".into(),
        ));
    }
    if settings.sweep_points < 2 || !(settings.sweep_span > 1.0) || !(settings.tolerance > 0.0) {
        return Err(Error::Argument(format!(
            "invalid Blahut–Arimoto settings {settings:?}"
        )));
    }
    let p = f.masses();
    let n = p.len();
    let step = f.step();
    let d_max = {
        let rho: Vec<f64> = (0..n).map(|k| (k as f64 * step).powf(r)).collect();
        let mut e = vec![0.0; n];
        KernelOp::symmetric(&rho, n).apply_transpose(&p, &mut e);
        e.into_iter().fold(f64::INFINITY, f64::min)
    };
    let active: Vec<f64> = d_targets.iter().cloned().filter(|&d| d < d_max).collect();
    let mut samples = Vec::new();
    if let (Some(lo), Some(hi)) = (
        active.iter().cloned().reduce(f64::min),
        active.iter().cloned().reduce(f64::max),
    ) {
        // s_k = s_top·ratio^{−k}; only the indices needed to bracket the targets are solved
        let ratio = settings
            .sweep_span
            .powf(2.0 / (settings.sweep_points - 1) as f64);
        let s_top = settings.sweep_span * r / lo;
        let s_at = |k: i64| s_top * ratio.powf(-(k as f64));
        let points = settings.sweep_points as i64;
        // high-resolution estimate d ≈ 1/(r·s), started a factor 4 finer
        let mut k = ((s_top * r * lo / 4.0).ln() / ratio.ln()).ceil().max(0.0) as i64;
        k = k.min(points - 1);
        let mut first = ba_point(&p, s_at(k), step, r, settings)?;
        while first.d > lo {
            k -= 1;
            if k < -points {
                return Err(Error::Range(format!(
                    "d = {lo} is below the smallest distortion {} reachable on this grid",
                    first.d
                )));
            }
            first = ba_point(&p, s_at(k), step, r, settings)?;
        }
        samples.push(first);
        while samples.last().map_or(true, |b| b.d <= hi) && k < 2 * points {
            k += 1;
            samples.push(ba_point(&p, s_at(k), step, r, settings)?);
        }
    }
    samples.retain(|b| b.d < d_max);
    samples.sort_by(|a, b| a.d.total_cmp(&b.d));
    samples.push(BaSample {
        s: 0.0,
        d: d_max,
        rate: 0.0,
        iterations: 0,
        certified_gap: 0.0,
    });
    let mut curve = BaCurve {
        r,
        d_max,
        samples,
        targets: d_targets.to_vec(),
        rates: Vec::new(),
    };
    curve.rates = d_targets
        .iter()
        .map(|&d| curve.rate_at(d))
        .collect::<Result<_>>()?;
    Ok(curve)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RDPoint {
    pub d: f64,
    pub r: f64,
    pub slb: f64,
    pub ba_rate: Option<f64>,
    pub upper_bounds: UpperBounds,
    pub regime: Regime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RDCurve {
    pub spec: DistributionSpec,
    pub r: f64,
    pub points: Vec<RDPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdOptions {
    pub grid_n: usize,
    pub extent: f64,
    /// Solver settings; `None` skips the numerical R(d).
    pub ba: Option<BaSettings>,
}

impl Default for RdOptions {
    fn default() -> Self {
        Self {
            grid_n: DEFAULT_GRID_N,
            extent: DEFAULT_EXTENT,
            ba: Some(BaSettings::default()),
        }
    }
}

/// Closed-form bounds and (optionally) the Blahut–Arimoto rate at each target.
pub fn rd_curve(
    spec: &DistributionSpec,
    r: f64,
    d_targets: &[f64],
    options: &RdOptions,
) -> Result<RDCurve> {
    let mut targets = d_targets.to_vec();
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    let rates = match &options.ba {
        Some(settings) => {
            let grid = spec.to_grid(options.grid_n, options.extent)?;
            Some(blahut_arimoto_rd(&grid, r, &targets, settings)?.rates)
        }
        None => None,
    };
    let points = targets
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let tc = test_channel_upper(spec, r, d)?;
            Ok(RDPoint {
                d,
                r,
                slb: shannon_lower_bound(spec, r, d)?,
                ba_rate: rates.as_ref().map(|v| v[i]),
                upper_bounds: tc.bounds,
                regime: tc.regime,
            })
        })
        .collect::<Result<_>>()?;
    Ok(RDCurve {
        spec: *spec,
        r,
        points,
    })
}

const RD_COLUMNS: [&str; 5] = ["slb", "ba", "ub_gauss", "ub_gg", "ub_sym"];

impl RDCurve {
    /// CSV with nats columns, plus bits columns when `bits` is set.
    pub fn to_csv(&self, bits: bool) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["d".to_string(), "r".to_string()];
        header.extend(RD_COLUMNS.iter().map(|c| format!("{c}_nats")));
        header.push("regime".into());
        if bits {
            header.extend(RD_COLUMNS.iter().map(|c| format!("{c}_bits")));
        }
        w.write_record(&header).map_err(csv_error)?;
        for p in &self.points {
            let values = [
                Some(p.slb),
                p.ba_rate,
                p.upper_bounds.gaussian_test_channel,
                p.upper_bounds.gg_test_channel,
                p.upper_bounds.symmetric_test_channel,
            ];
            let mut row = vec![format_cell(Some(p.d)), format_cell(Some(p.r))];
            row.extend(values.iter().map(|v| format_cell(*v)));
            row.push(p.regime.as_str().into());
            if bits {
                row.extend(values.iter().map(|v| format_cell(v.map(|x| x / LN_2))));
            }
            w.write_record(&row).map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    Error::Internal(format!("csv: {e}"))
}

/// Covariance-constrained R(d): SLB ≤ (n/2) ln(|K|^{1/n}/d) ≤ SLB + (n/2) ln(2πe c(n)).
///
/// For n = 1 the cap is the scalar ½ ln(πe/2).
pub fn covariance_rd_bounds(pd: &ProductDistribution, d: f64) -> Result<BoundReport> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Domain(format!(
            "distortion must be positive, got {d}"
        )));
    }
    pd.require_symmetric_log_concave()?;
    let n = pd.n();
    let half_n = 0.5 * n as f64;
    let log_k = pd.log_det_cov()? / n as f64;
    let slb = pd.entropy()? - half_n * (2.0 * PI * E * d).ln();
    let cap = if n == 1 {
        0.5 * (0.5 * PI * E).ln()
    } else {
        half_n * (2.0 * PI * E * c_constant(n, pd.unconditional())?).ln()
    };
    let zero = log_k <= d.ln();
    let report = if zero {
        BoundReport::new(
            "covariance_rd",
            Some(slb),
            0.0,
            Some(0.0),
            1e-12,
            Units::Nats,
        )
    } else {
        let chain = half_n * (log_k - d.ln());
        BoundReport::new(
            "covariance_rd",
            Some(slb),
            chain,
            Some(slb + cap),
            1e-9,
            Units::Nats,
        )
        .with_param("gap", chain - slb)
    };
    Ok(report
        .with_param("d", d)
        .with_param("n", n as f64)
        .with_param("cap", cap)
        .with_param("zero_regime", if zero { 1.0 } else { 0.0 }))
}

/// Gap bound of the vector rate-distortion theorem, evaluated from its formula.
///
/// In the positive regime `measured` is the bound on R(d) − SLB and, for
/// isotropic symmetric log-concave products at r = 2, `upper` is the
/// dimensional cap (n/2) ln(2πe c(n)). In the zero regime `measured` is 0;
/// in the window it is the absolute cap on R(d).
pub fn rd_gap_bound_vector(pd: &ProductDistribution, r: f64, d: f64) -> Result<BoundReport> {
    check_r_d(r, d)?;
    let n = pd.n();
    let nf = n as f64;
    let m2 = pd.second_moment()?;
    let t = d.powf(1.0 / r);
    let log_k = pd.log_det_cov()? / nf;
    let kl = 0.5 * nf * (2.0 * PI * E * m2 / nf).ln() - pd.entropy()?;
    // D(X‖G_X) with G_X matching the covariance, plus the anisotropy term
    let anisotropy = 0.5 * nf * ((m2 / nf).ln() - log_k);
    let d_cov = kl - anisotropy;
    let norm_r = || -> Result<f64> {
        let s: f64 = pd
            .components()
            .iter()
            .map(|c| c.abs_moment(r, 0.0).map(|m| m.value.powf(r)))
            .sum::<Result<f64>>()?;
        Ok(s.powf(1.0 / r))
    };
    let la = log_alpha(r)?;
    let (regime, measured) = if r <= 2.0 {
        if m2.sqrt() > nf.sqrt() * t {
            (
                Regime::Positive,
                d_cov + nf * (la - 0.5 * (2.0 * PI * E).ln()) + anisotropy,
            )
        } else {
            (Regime::Zero, 0.0)
        }
    } else {
        let lb = beta(r)?.ln();
        if norm_r()? <= (nf * d).powf(1.0 / r) {
            (Regime::Zero, 0.0)
        } else if m2.sqrt() >= nf.sqrt() * t {
            (Regime::Positive, d_cov + nf * lb + anisotropy)
        } else {
            (
                Regime::IndeterminateWindow,
                nf * (0.5 * (2.0 * PI * E).ln() + lb - la),
            )
        }
    };
    let isotropic = pd.common_variance().is_ok();
    let upper = if regime == Regime::Positive
        && r == 2.0
        && isotropic
        && n >= 2
        && pd.is_symmetric_log_concave()
    {
        Some(0.5 * nf * (2.0 * PI * E * c_constant(n, pd.unconditional())?).ln())
    } else {
        None
    };
    let regime_code = match regime {
        Regime::Positive => 0.0,
        Regime::Zero => 1.0,
        Regime::IndeterminateWindow => 2.0,
    };
    Ok(BoundReport::new(
        "rd_gap_vector",
        Some(0.0),
        measured,
        upper,
        1e-9,
        Units::Nats,
    )
    .with_param("r", r)
    .with_param("d", d)
    .with_param("n", nf)
    .with_param("relative_entropy", d_cov)
    .with_param("anisotropy", anisotropy)
    .with_param("regime", regime_code))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn beta_values() {
        assert_relative_eq!(beta(2.0).unwrap(), 2f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(beta(4.0).unwrap(), 1.294595782500192, max_relative = 1e-12);
        assert_relative_eq!(beta(1e4).unwrap(), 1.15494995307404, max_relative = 1e-10);
        assert!(beta(0.0).is_err());
    }

    #[test]
    fn slb_examples() {
        let g = DistributionSpec::gaussian(1.0).unwrap();
        assert_relative_eq!(
            shannon_lower_bound(&g, 2.0, 0.25).unwrap(),
            LN_2,
            max_relative = 1e-13
        );
        let gg = DistributionSpec::generalized_gaussian(3.0, 0.7).unwrap();
        assert!(shannon_lower_bound(&gg, 3.0, 0.7).unwrap().abs() < 1e-12);
        let u = DistributionSpec::uniform(1.0).unwrap();
        let v = shannon_lower_bound(&u, 2.0, 1.0).unwrap();
        assert_relative_eq!(v, -0.5 * (2.0 * PI * E).ln(), max_relative = 1e-13);
    }

    #[test]
    fn gaussian_channel_is_tight_for_gaussian() {
        let g = DistributionSpec::gaussian(1.0).unwrap();
        let tc = test_channel_upper(&g, 2.0, 0.25).unwrap();
        assert_eq!(tc.regime, Regime::Positive);
        assert_relative_eq!(
            tc.bounds.gaussian_test_channel.unwrap(),
            LN_2,
            max_relative = 1e-13
        );
        assert_eq!(
            test_channel_upper(&g, 2.0, 1.5).unwrap().regime,
            Regime::Zero
        );
    }

    #[test]
    fn large_r_regimes() {
        let l = DistributionSpec::laplace(1.0).unwrap();
        let tc = test_channel_upper(&l, 3.0, 0.01).unwrap();
        assert_eq!(tc.regime, Regime::Positive);
        let (gg, sym) = (
            tc.bounds.gg_test_channel.unwrap(),
            tc.bounds.symmetric_test_channel.unwrap(),
        );
        // near r = 2 the symmetric channel is the better one
        assert!(sym < gg);
        let big = test_channel_upper(&l, 3.0, 1e3).unwrap();
        assert_eq!(big.regime, Regime::Zero);
        assert_eq!(big.bounds.min(), Some(0.0));
        // skewed source: ‖X‖₂ < d^{1/r} < ‖X‖_r
        let e = DistributionSpec::exponential(1.0).unwrap();
        let m2 = e.abs_moment(2.0, 0.0).unwrap().value;
        let m4 = e.abs_moment(4.0, 0.0).unwrap().value;
        let t = 0.5 * (m2 + m4);
        let w = test_channel_upper(&e, 4.0, t.powi(4)).unwrap();
        assert_eq!(w.regime, Regime::IndeterminateWindow);
        assert!(w.bounds.symmetric_test_channel.is_none());
        let cap = 0.5 * (2.0 * PI * E).ln() + beta(4.0).unwrap().ln() - log_alpha(4.0).unwrap();
        assert_relative_eq!(w.bounds.gg_test_channel.unwrap(), cap, max_relative = 1e-13);
    }

    #[test]
    fn gap_curve_values() {
        assert_relative_eq!(
            universal_gap_curve(1.0, false).unwrap(),
            1.0,
            max_relative = 1e-13
        );
        let r2 = 0.5 * (0.5 * PI * E).ln();
        assert_relative_eq!(
            universal_gap_curve(2.0, true).unwrap(),
            r2,
            max_relative = 1e-13
        );
        let above = universal_gap_curve(2.0 + 1e-12, true).unwrap();
        assert!((above - r2).abs() < 1e-9);
        let jump = universal_gap_curve(2.0 + 1e-12, false).unwrap()
            - universal_gap_curve(2.0, false).unwrap();
        assert!(jump > 0.1);
        for k in 0..200 {
            let r = 1.0 + 0.05 * k as f64;
            assert!(universal_gap_curve(r, false).unwrap() <= 0.5 * (PI * E).ln() + 1e-12);
            assert!(universal_gap_curve(r, true).unwrap() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn admissible_gaussian_channel() {
        for spec in [
            DistributionSpec::laplace(1.0).unwrap(),
            DistributionSpec::uniform(3.0).unwrap(),
        ] {
            for (r, d) in [(1.0, 0.2), (1.5, 0.1), (2.0, 0.05)] {
                let dist = gaussian_test_channel_distortion(&spec, r, d).unwrap();
                assert!(dist <= d * (1.0 + 1e-3), "{spec} r={r}: {dist} > {d}");
            }
        }
    }

    #[test]
    fn ba_gaussian_matches_closed_form() {
        let g = DistributionSpec::gaussian(1.0).unwrap();
        let grid = g.to_grid(512, 8.0).unwrap();
        let curve = blahut_arimoto_rd(&grid, 2.0, &[0.25, 0.5], &BaSettings::default()).unwrap();
        assert!((curve.rates[0] - LN_2).abs() < 0.01, "{}", curve.rates[0]);
        assert!(
            (curve.rates[1] - 0.5 * LN_2).abs() < 0.01,
            "{}",
            curve.rates[1]
        );
        assert!((curve.d_max - 1.0).abs() < 1e-3);
    }

    #[test]
    fn ba_zero_above_dmax() {
        let u = DistributionSpec::uniform(1.0).unwrap();
        let grid = u.to_grid(256, 10.0).unwrap();
        let curve = blahut_arimoto_rd(&grid, 2.0, &[0.2], &BaSettings::default()).unwrap();
        assert_eq!(curve.rates[0], 0.0);
        assert!(curve.samples.len() == 1);
    }

    #[test]
    fn ba_saturates_at_discrete_entropy() {
        let g = DistributionSpec::gaussian(1.0).unwrap();
        let grid = g.to_grid(64, 8.0).unwrap();
        let h: f64 = grid
            .masses()
            .iter()
            .filter(|m| **m > 0.0)
            .map(|m| -m * m.ln())
            .sum();
        let curve = blahut_arimoto_rd(&grid, 2.0, &[1e-30], &BaSettings::default()).unwrap();
        assert!(
            (curve.rates[0] - h).abs() < 1e-6,
            "{} vs {h}",
            curve.rates[0]
        );
        assert!(matches!(
            blahut_arimoto_rd(&grid, 2.0, &[0.0], &BaSettings::default()),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn covariance_rd_examples() {
        let g = ProductDistribution::iid(DistributionSpec::gaussian(1.0).unwrap(), 3).unwrap();
        let rep = covariance_rd_bounds(&g, 0.3).unwrap();
        assert!(rep.parameters["gap"].abs() < 1e-12);
        assert!(rep.passed);
        let u =
            ProductDistribution::iid(DistributionSpec::uniform(12f64.sqrt()).unwrap(), 5).unwrap();
        let rep = covariance_rd_bounds(&u, 0.1).unwrap();
        assert!(rep.parameters["gap"] <= 2.5 * (2.0 * PI * E / 12.0).ln() + 1e-12);
        assert!(rep.passed);
        assert_eq!(
            covariance_rd_bounds(&u, 2.0).unwrap().parameters["zero_regime"],
            1.0
        );
    }

    #[test]
    fn vector_gap_examples() {
        let l = ProductDistribution::iid(DistributionSpec::laplace(1.0).unwrap(), 4).unwrap();
        let rep = rd_gap_bound_vector(&l, 2.0, 0.1).unwrap();
        assert_relative_eq!(
            rep.measured,
            rep.parameters["relative_entropy"],
            max_relative = 1e-12
        );
        assert!(rep.passed);
        let a = ProductDistribution::from_components(vec![
            DistributionSpec::gaussian(1.0).unwrap(),
            DistributionSpec::gaussian(2.0).unwrap(),
        ])
        .unwrap();
        let rep = rd_gap_bound_vector(&a, 2.0, 0.1).unwrap();
        assert_relative_eq!(
            rep.parameters["anisotropy"],
            (2.5f64 / 2.0).ln(),
            max_relative = 1e-12
        );
        let one = ProductDistribution::iid(DistributionSpec::laplace(1.0).unwrap(), 1).unwrap();
        let scalar = test_channel_upper(&one.components()[0], 3.0, 0.05).unwrap();
        let slb = shannon_lower_bound(&one.components()[0], 3.0, 0.05).unwrap();
        let rep = rd_gap_bound_vector(&one, 3.0, 0.05).unwrap();
        assert_relative_eq!(
            rep.measured,
            scalar.bounds.gg_test_channel.unwrap() - slb,
            max_relative = 1e-12
        );
    }
}
