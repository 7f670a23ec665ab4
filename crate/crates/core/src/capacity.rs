//! Capacity of additive-noise channels under an average power constraint.
//!
//! Closed forms (Gaussian capacity, the log-concave gap cap, the vector chain
//! and the JSCC floor) are checked against a constrained Blahut–Arimoto solver
//! whose input alphabet shares the noise grid step.

use std::f64::consts::{E, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::entropy_bounds::{DEFAULT_EXTENT, DEFAULT_GRID_N};
use crate::error::{Error, Result};
use crate::numerics::grid::{convolve, entropy_of_grid, GridDensity};
use crate::numerics::kernel::KernelOp;
use crate::rate_distortion::csv_error;
use crate::report::{format_cell, BoundReport, Units};
use crate::vector_bounds::{c_constant, ProductDistribution};

/// ½ ln(πe/2): the largest excess over the Gaussian capacity for log-concave noise.
pub fn capacity_gap_constant() -> f64 {
    0.5 * (0.5 * PI * E).ln()
}

/// ½ ln(1 + P/Var Z).
pub fn gaussian_capacity(var_z: f64, p: f64) -> Result<f64> {
    if !(var_z > 0.0) || !var_z.is_finite() || !(p >= 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!(
            "need Var Z > 0 and P ≥ 0, got {var_z}, {p}"
        )));
    }
    Ok(0.5 * (p / var_z).ln_1p())
}

/// d ≥ (2/(πe))² σ²/(1 + snr).
pub fn jscc_converse(sigma2: f64, snr: f64) -> Result<f64> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() || !(snr >= 0.0) || !snr.is_finite() {
        return Err(Error::Domain(format!(
            "need σ² > 0 and snr ≥ 0, got {sigma2}, {snr}"
        )));
    }
    Ok((2.0 / (PI * E)).powi(2) * sigma2 / (1.0 + snr))
}

/// σ²/(1 + snr), the optimum for a Gaussian source over a Gaussian channel.
pub fn jscc_gaussian_benchmark(sigma2: f64, snr: f64) -> Result<f64> {
    jscc_converse(sigma2, snr).map(|d| d * (0.5 * PI * E).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacitySettings {
    pub max_iterations: usize,
    /// Relative change of the Lagrangian objective that counts as converged.
    pub tolerance: f64,
    /// Certified gap accepted when `max_iterations` is reached.
    pub gap_tolerance: f64,
    pub sweep_points: usize,
    /// μ sweep over [lo, hi]/(2(P + Var Z)).
    pub mu_range: (f64, f64),
    /// Bisection stops when the input power is within this relative distance of P.
    pub power_tolerance: f64,
    /// Input grid spans ±extent·√(P + Var Z).
    pub input_extent: f64,
}

impl Default for CapacitySettings {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            tolerance: 1e-9,
            gap_tolerance: 5e-3,
            sweep_points: 20,
            mu_range: (0.05, 20.0),
            power_tolerance: 1e-3,
            input_extent: 6.0,
        }
    }
}

/// Solver output at one multiplier μ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuPoint {
    pub mu: f64,
    pub power: f64,
    pub information: f64,
    /// max_x [D(W_x‖r) − μx²]; plus μP it bounds the grid capacity at any P.
    pub dual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaCapacity {
    /// Lower estimate: chord between the two solved points that bracket P.
    pub capacity: f64,
    /// Smallest dual bound over all solved multipliers.
    pub upper: f64,
    pub power: f64,
    /// Input mass within 10% of the alphabet edge at the bracketing points.
    pub boundary_mass: f64,
    pub points: Vec<MuPoint>,
}

struct Channel {
    op: KernelOp,
    xs: Vec<f64>,
    neg_entropy_w: f64,
    n_out: usize,
}

impl Channel {
    fn new(noise: &GridDensity, extent: f64) -> Self {
        let h = noise.step();
        let half = (extent / h).ceil() as usize;
        let xs: Vec<f64> = (0..=2 * half)
            .map(|j| (j as f64 - half as f64) * h)
            .collect();
        let w = noise.masses();
        let neg_entropy_w = w.iter().filter(|v| **v > 0.0).map(|v| v * v.ln()).sum();
        let n_out = xs.len() + w.len() - 1;
        Self {
            op: KernelOp::new(w, 0, xs.len(), n_out),
            xs,
            neg_entropy_w,
            n_out,
        }
    }

    /// D(W_x‖r) for every input, r = output law of `p`.
    fn divergences(&self, p: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; self.n_out];
        self.op.apply(p, &mut r);
        let floor_rel = if self.op.is_spectral() { 1e-14 } else { 0.0 };
        let floor = (floor_rel * r.iter().cloned().fold(0.0, f64::max)).max(f64::MIN_POSITIVE);
        let log_r: Vec<f64> = r.iter().map(|v| v.max(floor).ln()).collect();
        let mut t = vec![0.0; self.xs.len()];
        self.op.apply_transpose(&log_r, &mut t);
        t.iter().map(|tj| self.neg_entropy_w - tj).collect()
    }

    fn solve(
        &self,
        mu: f64,
        start: &[f64],
        settings: &CapacitySettings,
    ) -> Result<(MuPoint, Vec<f64>)> {
        let m = self.xs.len();
        let mut p = start.to_vec();
        let mut prev = f64::NAN;
        let mut it = 1;
        loop {
            let d = self.divergences(&p);
            let v: Vec<f64> = (0..m)
                .map(|j| d[j] - mu * self.xs[j] * self.xs[j])
                .collect();
            let information: f64 = (0..m).map(|j| p[j] * d[j]).sum();
            let power: f64 = (0..m).map(|j| p[j] * self.xs[j] * self.xs[j]).sum();
            let objective = information - mu * power;
            let top = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let done = it > 1
                && (objective - prev).abs() <= settings.tolerance * (objective.abs() + information);
            if done || it >= settings.max_iterations {
                let gap = top - objective;
                if done || gap <= settings.gap_tolerance {
                    let point = MuPoint {
                        mu,
                        power,
                        information,
                        dual: top,
                        iterations: it,
                    };
                    return Ok((point, p));
                }
                return Err(Error::accuracy(
                    format!("capacity Blahut–Arimoto did not converge at μ = {mu}"),
                    information,
                    gap,
                ));
            }
            let mut total = 0.0;
            for j in 0..m {
                p[j] *= (v[j] - top).exp();
                total += p[j];
            }
            p.iter_mut().for_each(|x| *x /= total);
            prev = objective;
            it += 1;
        }
    }

    fn gaussian_start(&self, var: f64) -> Vec<f64> {
        // the floor keeps every input reachable by the multiplicative update
        let floor = 1e-6 / self.xs.len() as f64;
        let mut p: Vec<f64> = self.xs.iter().map(|x| (-0.5 * x * x / var).exp()).collect();
        let total: f64 = p.iter().sum();
        p.iter_mut()
            .for_each(|x| *x = (1.0 - 1e-6) * *x / total + floor);
        p
    }

    fn edge_mass(&self, p: &[f64]) -> f64 {
        let edge = 0.9 * self.xs[self.xs.len() - 1];
        self.xs
            .iter()
            .zip(p)
            .filter(|(x, _)| x.abs() > edge)
            .map(|(_, q)| q)
            .sum()
    }
}

/// Capacity of the grid channel y = x + z with E X² ≤ P.
///
/// The input alphabet is the noise step on [−E, E], E = `input_extent`. Each
/// multiplier is solved from a Gaussian start. A walk over the geometric μ
/// grid, outward from 1/(2(P + Var Z)), brackets P and bisection in ln μ
/// narrows the bracket.
pub fn blahut_arimoto_capacity(
    noise_grid: &GridDensity,
    p: f64,
    input_extent: f64,
    settings: &CapacitySettings,
) -> Result<BaCapacity> {
    if !(p > 0.0) || !p.is_finite() || !(input_extent > 0.0) {
        return Err(Error::Domain(format!(
            "need P > 0 and a positive input extent, got {p}, {input_extent}"
        )));
    }
    if settings.sweep_points < 2
        || !(settings.mu_range.0 > 0.0)
        || !(settings.mu_range.1 > settings.mu_range.0)
    {
        return Err(Error::Argument(format!(
            "invalid capacity settings {settings:?}"
        )));
    }
    let var_z = noise_grid.variance();
    let channel = Channel::new(noise_grid, input_extent);
    let start = channel.gaussian_start(p);
    let scale = 1.0 / (2.0 * (p + var_z));
    let (lo, hi) = settings.mu_range;
    let ratio = (hi / lo).powf(1.0 / (settings.sweep_points - 1) as f64);
    let mu_at = |k: usize| scale * lo * ratio.powi(k as i32);
    // first point sits where the multiplier of a Gaussian channel would be
    let mut k = ((1.0 / lo).ln() / ratio.ln())
        .round()
        .clamp(0.0, (settings.sweep_points - 1) as f64) as usize;
    let mut points = Vec::new();
    let mut solved: Vec<Option<(MuPoint, Vec<f64>)>> = vec![None; settings.sweep_points];
    let b = loop {
        let (pt, q) = channel.solve(mu_at(k), &start, settings)?;
        points.push(pt);
        let feasible = pt.power <= p;
        solved[k] = Some((pt, q));
        // powers fall as μ grows
        if feasible {
            if k > 0 && solved[k - 1].is_some() {
                break k;
            }
            if k == 0 {
                return Err(Error::Range(format!(
                    "power {p} exceeds every swept input power"
                )));
            }
            k -= 1;
        } else {
            if k + 1 < settings.sweep_points && solved[k + 1].is_some() {
                break k + 1;
            }
            if k + 1 == settings.sweep_points {
                return Err(Error::Range(format!(
                    "power {p} is below every swept input power"
                )));
            }
            k += 1;
        }
    };
    let (a_pt, a_in) = solved[b - 1].take().expect("bracket solved");
    let (b_pt, b_in) = solved[b].take().expect("bracket solved");
    let (mut a_pt, mut b_pt, mut a_in, mut b_in) = (a_pt, b_pt, a_in, b_in);
    for _ in 0..60 {
        if a_pt.power - p <= settings.power_tolerance * p
            || p - b_pt.power <= settings.power_tolerance * p
        {
            break;
        }
        let mu = (a_pt.mu * b_pt.mu).sqrt();
        let (pt, q) = channel.solve(mu, &start, settings)?;
        points.push(pt);
        if pt.power > p {
            a_pt = pt;
            a_in = q;
        } else {
            b_pt = pt;
            b_in = q;
        }
    }
    let w = if a_pt.power > b_pt.power {
        (p - b_pt.power) / (a_pt.power - b_pt.power)
    } else {
        0.0
    };
    let capacity = b_pt.information + w * (a_pt.information - b_pt.information);
    let upper = points
        .iter()
        .map(|pt| pt.dual + pt.mu * p)
        .fold(f64::INFINITY, f64::min);
    let boundary_mass = channel.edge_mass(&a_in).max(channel.edge_mass(&b_in));
    if boundary_mass > 1e-6 {
        return Err(Error::accuracy(
            format!(
                "optimal input puts mass {boundary_mass} near the alphabet edge ±{input_extent}"
            ),
            capacity,
            boundary_mass,
        ));
    }
    if capacity > upper + settings.gap_tolerance {
        return Err(Error::Internal(format!(
            "capacity lower estimate {capacity} exceeds dual bound {upper}"
        )));
    }
    Ok(BaCapacity {
        capacity,
        upper,
        power: p,
        boundary_mass,
        points,
    })
}

/// I(X*; X* + Z) = h(X* + Z) − h(Z) for Gaussian X* with variance P.
pub fn gaussian_input_mi(noise_grid: &GridDensity, p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("power must be positive, got {p}")));
    }
    let h = noise_grid.step();
    let k = (10.0 * p.sqrt() / h).ceil() as usize;
    let values = (0..=2 * k)
        .map(|i| {
            let x = (i as f64 - k as f64) * h;
            (-0.5 * x * x / p).exp() / (2.0 * PI * p).sqrt()
        })
        .collect();
    let gauss = GridDensity::new(-(k as f64) * h, h, values)?;
    let out = convolve(&gauss, noise_grid)?;
    Ok(entropy_of_grid(&out) - entropy_of_grid(noise_grid))
}

fn require_log_concave(noise: &DistributionSpec) -> Result<f64> {
    if !noise.is_log_concave() {
        return Err(Error::Contract(format!("{noise} is not log-concave")));
    }
    noise
        .variance()
        .ok_or_else(|| Error::Contract(format!("{noise} has infinite variance")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityOptions {
    pub grid_n: usize,
    pub extent: f64,
    /// `None` skips both numerical quantities.
    pub ba: Option<CapacitySettings>,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        Self {
            grid_n: DEFAULT_GRID_N,
            extent: DEFAULT_EXTENT,
            ba: Some(CapacitySettings::default()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityPoint {
    pub power: f64,
    pub noise: DistributionSpec,
    pub lower_gaussian: f64,
    pub ba_capacity: Option<f64>,
    pub gaussian_input_mi: Option<f64>,
    pub upper: f64,
}

pub fn capacity_point(
    noise: &DistributionSpec,
    p: f64,
    options: &CapacityOptions,
) -> Result<CapacityPoint> {
    let var_z = require_log_concave(noise)?;
    let lower_gaussian = gaussian_capacity(var_z, p)?;
    let (ba_capacity, gaussian_mi) = match &options.ba {
        Some(settings) => {
            let grid = noise.to_grid(options.grid_n, options.extent)?;
            let extent = settings.input_extent * (p + var_z).sqrt();
            let ba = blahut_arimoto_capacity(&grid, p, extent, settings)?;
            (Some(ba.capacity), Some(gaussian_input_mi(&grid, p)?))
        }
        None => (None, None),
    };
    Ok(CapacityPoint {
        power: p,
        noise: *noise,
        lower_gaussian,
        ba_capacity,
        gaussian_input_mi: gaussian_mi,
        upper: lower_gaussian + capacity_gap_constant(),
    })
}

/// ½ ln(1 + P/Var Z) ≤ C ≤ that + ½ ln(πe/2), with the solver capacity measured.
pub fn capacity_gap_bound(
    noise: &DistributionSpec,
    p: f64,
    options: &CapacityOptions,
) -> Result<BoundReport> {
    let pt = capacity_point(noise, p, options)?;
    let measured = pt.ba_capacity.unwrap_or(pt.lower_gaussian);
    let mut report = BoundReport::new(
        "capacity_gap",
        Some(pt.lower_gaussian),
        measured,
        Some(pt.upper),
        0.01,
        Units::Nats,
    )
    .with_param("P", p)
    .with_param("var_z", require_log_concave(noise)?);
    if let Some(mi) = pt.gaussian_input_mi {
        report = report.with_param("gaussian_input_mi", mi);
    }
    Ok(report)
}

/// (n/2) ln(1 + P/|K|^{1/n}) ≤ C ≤ that + (n/2) ln(2πe c(n)(‖Z‖₂²/n + P)/(|K|^{1/n} + P)).
///
/// `measured` is Σᵢ ½ ln(1 + P/Var Zᵢ), which an isotropic Gaussian input
/// achieves; n = 1 falls back to the scalar cap ½ ln(πe/2).
pub fn capacity_vector_bound(pd_noise: &ProductDistribution, p: f64) -> Result<BoundReport> {
    pd_noise.require_symmetric_log_concave()?;
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("power must be positive, got {p}")));
    }
    let n = pd_noise.n();
    let nf = n as f64;
    let k_root = (pd_noise.log_det_cov()? / nf).exp();
    let lower = 0.5 * nf * (p / k_root).ln_1p();
    let gap = if n == 1 {
        capacity_gap_constant()
    } else {
        let ratio = (pd_noise.second_moment()? / nf + p) / (k_root + p);
        0.5 * nf * (2.0 * PI * E * c_constant(n, pd_noise.unconditional())? * ratio).ln()
    };
    let measured = pd_noise
        .variances()?
        .iter()
        .map(|v| gaussian_capacity(*v, p))
        .sum::<Result<f64>>()?;
    Ok(BoundReport::new(
        "capacity_vector",
        Some(lower),
        measured,
        Some(lower + gap),
        1e-12,
        Units::Nats,
    )
    .with_param("P", p)
    .with_param("n", nf)
    .with_param("gap", gap))
}

const CAP_COLUMNS: [&str; 4] = ["lower", "ba", "gaussmi", "upper"];

/// CSV rows `power, noise_spec, lower_nats, ba_nats, gaussmi_nats, upper_nats`,
/// with bits columns appended when `bits` is set.
pub fn capacity_csv(points: &[CapacityPoint], bits: bool) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["power".to_string(), "noise_spec".to_string()];
    header.extend(CAP_COLUMNS.iter().map(|c| format!("{c}_nats")));
    if bits {
        header.extend(CAP_COLUMNS.iter().map(|c| format!("{c}_bits")));
    }
    w.write_record(&header).map_err(csv_error)?;
    for pt in points {
        let values = [
            Some(pt.lower_gaussian),
            pt.ba_capacity,
            pt.gaussian_input_mi,
            Some(pt.upper),
        ];
        let mut row = vec![format_cell(Some(pt.power)), pt.noise.to_string()];
        row.extend(values.iter().map(|v| format_cell(*v)));
        if bits {
            row.extend(values.iter().map(|v| format_cell(v.map(|x| x / LN_2))));
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}
