//! Catalog of one-dimensional densities.
//!
//! Every family carries a location `shift`. Closed-form moments are taken
//! about the family's natural origin (the shift, which is the left end of the
//! support for the exponential law); any other center goes through
//! quadrature.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::grid::GridDensity;
use crate::numerics::quadrature::{integrate, QuadratureSettings};
use crate::numerics::special::{digamma, log_gamma_unchecked};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Gaussian {
        sigma: f64,
    },
    Laplace {
        b: f64,
    },
    /// Uniform on [−a/2, a/2].
    Uniform {
        a: f64,
    },
    /// Rate λ on [0, ∞).
    Exponential {
        lambda: f64,
    },
    /// Density ∝ exp(−|x|^r/(r·d)).
    GeneralizedGaussian {
        r: f64,
        d: f64,
    },
    /// Density C_γ/(1 + |x|^{1−1/γ}), γ ∈ (−1, 0).
    ExtendedCauchy {
        gamma: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub family: Family,
    pub shift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    ClosedForm,
    Quadrature,
}

/// ‖X − center‖_p together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentValue {
    pub p: f64,
    pub value: f64,
    pub center: f64,
    pub method: MomentMethod,
}

/// Distance from an open endpoint inside which quadrature moments are refused.
pub const BOUNDARY_MARGIN: f64 = 1e-3;

fn moment_settings() -> QuadratureSettings {
    QuadratureSettings {
        abs_tol: 1e-15,
        rel_tol: 1e-12,
        max_subdivisions: 4000,
    }
}

impl DistributionSpec {
    pub fn new(family: Family, shift: f64) -> Result<Self> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        let valid = match family {
            Family::Gaussian { sigma } => ok(sigma),
            Family::Laplace { b } => ok(b),
            Family::Uniform { a } => ok(a),
            Family::Exponential { lambda } => ok(lambda),
            Family::GeneralizedGaussian { r, d } => r >= 1.0 && r.is_finite() && ok(d),
            Family::ExtendedCauchy { gamma } => gamma > -1.0 && gamma < 0.0,
        };
        if !valid || !shift.is_finite() {
            return Err(Error::Domain(format!(
                "invalid distribution parameters {family:?} @ {shift}"
            )));
        }
        Ok(Self { family, shift })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(Family::Gaussian { sigma }, 0.0)
    }

    pub fn laplace(b: f64) -> Result<Self> {
        Self::new(Family::Laplace { b }, 0.0)
    }

    pub fn uniform(a: f64) -> Result<Self> {
        Self::new(Family::Uniform { a }, 0.0)
    }

    pub fn exponential(lambda: f64) -> Result<Self> {
        Self::new(Family::Exponential { lambda }, 0.0)
    }

    pub fn generalized_gaussian(r: f64, d: f64) -> Result<Self> {
        Self::new(Family::GeneralizedGaussian { r, d }, 0.0)
    }

    pub fn extended_cauchy(gamma: f64) -> Result<Self> {
        Self::new(Family::ExtendedCauchy { gamma }, 0.0)
    }

    pub fn with_shift(self, shift: f64) -> Result<Self> {
        Self::new(self.family, shift)
    }

    pub fn is_symmetric(&self) -> bool {
        self.shift == 0.0 && !matches!(self.family, Family::Exponential { .. })
    }

    pub fn is_log_concave(&self) -> bool {
        !matches!(self.family, Family::ExtendedCauchy { .. })
    }

    /// γ for which the density is declared γ-concave (extended Cauchy only).
    pub fn gamma_concave(&self) -> Option<f64> {
        match self.family {
            Family::ExtendedCauchy { gamma } => Some(gamma),
            _ => None,
        }
    }

    /// Exponent m = 1 − 1/γ of the extended Cauchy law.
    fn cauchy_m(gamma: f64) -> f64 {
        1.0 - 1.0 / gamma
    }

    fn cauchy_norm(gamma: f64) -> f64 {
        let m = Self::cauchy_m(gamma);
        m * (PI / m).sin() / (2.0 * PI)
    }

    fn gg_norm_ln(r: f64, d: f64) -> f64 {
        (1.0 - 1.0 / r) * r.ln()
            - std::f64::consts::LN_2
            - log_gamma_unchecked(1.0 / r)
            - d.ln() / r
    }

    /// Closed support `[lo, hi]` (infinite ends allowed).
    pub fn support(&self) -> (f64, f64) {
        match self.family {
            Family::Uniform { a } => (self.shift - 0.5 * a, self.shift + 0.5 * a),
            Family::Exponential { .. } => (self.shift, f64::INFINITY),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let u = x - self.shift;
        match self.family {
            Family::Gaussian { sigma } => {
                (-0.5 * (u / sigma).powi(2)).exp() / (sigma * (2.0 * PI).sqrt())
            }
            Family::Laplace { b } => (-u.abs() / b).exp() / (2.0 * b),
            Family::Uniform { a } => {
                if u.abs() <= 0.5 * a {
                    1.0 / a
                } else {
                    0.0
                }
            }
            Family::Exponential { lambda } => {
                if u >= 0.0 {
                    lambda * (-lambda * u).exp()
                } else {
                    0.0
                }
            }
            Family::GeneralizedGaussian { r, d } => {
                (Self::gg_norm_ln(r, d) - u.abs().powf(r) / (r * d)).exp()
            }
            Family::ExtendedCauchy { gamma } => {
                Self::cauchy_norm(gamma) / (1.0 + u.abs().powf(Self::cauchy_m(gamma)))
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self.family {
            Family::Exponential { lambda } => self.shift + 1.0 / lambda,
            _ => self.shift,
        }
    }

    /// Variance, `None` when infinite.
    pub fn variance(&self) -> Option<f64> {
        Some(match self.family {
            Family::Gaussian { sigma } => sigma * sigma,
            Family::Laplace { b } => 2.0 * b * b,
            Family::Uniform { a } => a * a / 12.0,
            Family::Exponential { lambda } => 1.0 / (lambda * lambda),
            Family::GeneralizedGaussian { r, d } => (2.0 / r * (r * d).ln()
                + log_gamma_unchecked(3.0 / r)
                - log_gamma_unchecked(1.0 / r))
            .exp(),
            Family::ExtendedCauchy { gamma } => {
                let m = Self::cauchy_m(gamma);
                if m <= 3.0 {
                    return None;
                }
                (PI / m).sin() / (3.0 * PI / m).sin()
            }
        })
    }

    pub fn std_dev(&self) -> Option<f64> {
        self.variance().map(f64::sqrt)
    }

    /// Open range (lo, hi) of p for which E|X|^p is finite.
    pub fn moment_range(&self) -> (f64, f64) {
        match self.family {
            Family::ExtendedCauchy { gamma } => (-1.0, Self::cauchy_m(gamma) - 1.0),
            _ => (-1.0, f64::INFINITY),
        }
    }

    fn check_moment_order(&self, p: f64) -> Result<()> {
        let (lo, hi) = self.moment_range();
        if !(p > lo && p < hi) {
            return Err(Error::Domain(format!(
                "moment order p = {p} outside the finite range ({lo}, {hi})"
            )));
        }
        Ok(())
    }

    /// ln E|X − shift|^p from the closed-form table.
    fn log_moment_closed(&self, p: f64) -> f64 {
        let lg = log_gamma_unchecked;
        match self.family {
            Family::Gaussian { sigma } => {
                p * sigma.ln() + 0.5 * p * std::f64::consts::LN_2 + lg(0.5 * (p + 1.0))
                    - 0.5 * PI.ln()
            }
            Family::Laplace { b } => p * b.ln() + lg(p + 1.0),
            Family::Uniform { a } => p * (0.5 * a).ln() - (p + 1.0).ln(),
            Family::Exponential { lambda } => lg(p + 1.0) - p * lambda.ln(),
            Family::GeneralizedGaussian { r, d } => {
                p / r * (r * d).ln() + lg((p + 1.0) / r) - lg(1.0 / r)
            }
            Family::ExtendedCauchy { gamma } => {
                let m = Self::cauchy_m(gamma);
                (PI / m).sin().ln() - (PI * (p + 1.0) / m).sin().ln()
            }
        }
    }

    /// E ln|X − shift|, the p → 0 derivative of the closed-form log-moment.
    fn mean_log_closed(&self) -> f64 {
        let psi = |x: f64| digamma(x).expect("positive argument");
        match self.family {
            Family::Gaussian { sigma } => {
                sigma.ln() + 0.5 * std::f64::consts::LN_2 + 0.5 * psi(0.5)
            }
            Family::Laplace { b } => b.ln() + psi(1.0),
            Family::Uniform { a } => (0.5 * a).ln() - 1.0,
            Family::Exponential { lambda } => psi(1.0) - lambda.ln(),
            Family::GeneralizedGaussian { r, d } => ((r * d).ln() + psi(1.0 / r)) / r,
            Family::ExtendedCauchy { gamma } => {
                let m = Self::cauchy_m(gamma);
                -(PI / m) / (PI / m).tan()
            }
        }
    }

    fn natural_center(&self, center: f64) -> bool {
        (center - self.shift).abs() <= 1e-15 * self.shift.abs().max(1.0)
    }

    /// ‖X − center‖_p, closed form about the natural origin and quadrature otherwise.
    pub fn abs_moment(&self, p: f64, center: f64) -> Result<MomentValue> {
        self.check_moment_order(p)?;
        if self.natural_center(center) {
            let value = if p.abs() < 1e-8 {
                self.mean_log_closed().exp()
            } else {
                (self.log_moment_closed(p) / p).exp()
            };
            return Ok(MomentValue {
                p,
                value,
                center,
                method: MomentMethod::ClosedForm,
            });
        }
        self.abs_moment_quadrature(p, center)
    }

    /// ‖X − center‖_p by adaptive quadrature, whatever the center.
    pub fn abs_moment_quadrature(&self, p: f64, center: f64) -> Result<MomentValue> {
        self.check_moment_order(p)?;
        let (lo, hi) = self.moment_range();
        if p - lo < BOUNDARY_MARGIN || hi - p < BOUNDARY_MARGIN {
            return Err(Error::Domain(format!(
                "moment order p = {p} is within {BOUNDARY_MARGIN} of the endpoint of ({lo}, {hi})"
            )));
        }
        let log_limit = p.abs() < 1e-8;
        let weight = move |u: f64| if log_limit { u.ln() } else { u.powf(p) };
        let tail_kappa = match self.family {
            Family::ExtendedCauchy { gamma } => Some(Self::cauchy_m(gamma) - 1.0 - p),
            _ => None,
        };
        let s = moment_settings();
        let (slo, shi) = self.support();
        let mut total = 0.0;
        for dir in [1.0, -1.0] {
            let reach = if dir > 0.0 {
                shi - center
            } else {
                center - slo
            };
            if reach <= 0.0 {
                continue;
            }
            let kink = dir * (self.shift - center);
            let mut breaks: Vec<f64> = Vec::new();
            if kink > 0.0 && kink < reach {
                breaks.push(kink);
            }
            if reach.is_finite() {
                breaks.push(reach);
            } else {
                let scale = self.std_dev().unwrap_or(1.0);
                let anchor = kink.max(0.0) + scale;
                if breaks.last().map_or(true, |&b| anchor > b) {
                    breaks.push(anchor);
                }
                breaks.push(f64::INFINITY);
            }
            let g = |u: f64| self.pdf(center + dir * u);
            let mut start = 0.0;
            for (k, &end) in breaks.iter().enumerate() {
                let piece = if k == 0 {
                    if log_limit {
                        integrate(|u| weight(u) * g(u), 0.0, end, &s)?
                    } else if p < 0.0 {
                        // u = t^{1/(p+1)} absorbs the u^p singularity
                        let q = p + 1.0;
                        integrate(|t: f64| g(t.powf(1.0 / q)) / q, 0.0, end.powf(q), &s)?
                    } else {
                        integrate(|u| weight(u) * g(u), 0.0, end, &s)?
                    }
                } else if end.is_infinite() {
                    match tail_kappa {
                        Some(kappa) => power_tail(|u| weight(u) * g(u), start, kappa, &s)?,
                        None => integrate(|u| weight(u) * g(u), start, end, &s)?,
                    }
                } else {
                    integrate(|u| weight(u) * g(u), start, end, &s)?
                };
                total += piece;
                start = end;
            }
        }
        let value = if log_limit {
            total.exp()
        } else {
            total.powf(1.0 / p)
        };
        Ok(MomentValue {
            p,
            value,
            center,
            method: MomentMethod::Quadrature,
        })
    }

    /// Differential entropy in nats.
    pub fn entropy(&self) -> Result<f64> {
        Ok(match self.family {
            Family::Gaussian { sigma } => 0.5 * (2.0 * PI * E * sigma * sigma).ln(),
            Family::Laplace { b } => 1.0 + (2.0 * b).ln(),
            Family::Uniform { a } => a.ln(),
            Family::Exponential { lambda } => 1.0 - lambda.ln(),
            // h = −ln c + E|X|^r/(rd) and E|X|^r = d
            Family::GeneralizedGaussian { r, d } => -Self::gg_norm_ln(r, d) + 1.0 / r,
            Family::ExtendedCauchy { gamma } => {
                let m = Self::cauchy_m(gamma);
                let c = Self::cauchy_norm(gamma);
                let s = moment_settings();
                let integrand = |u: f64| (u.powf(m)).ln_1p() / (1.0 + u.powf(m));
                let body = integrate(integrand, 0.0, 1.0, &s)?;
                let tail = power_tail(integrand, 1.0, m - 1.0, &s)?;
                -c.ln() + 2.0 * c * (body + tail)
            }
        })
    }

    /// Entropy of the density by direct quadrature of −f ln f (independent of the table).
    pub fn entropy_quadrature(&self) -> Result<f64> {
        let s = moment_settings();
        let f = |x: f64| {
            let v = self.pdf(x);
            if v > 0.0 {
                -v * v.ln()
            } else {
                0.0
            }
        };
        let (lo, hi) = self.support();
        match self.family {
            Family::Uniform { .. } => integrate(f, lo, hi, &s),
            Family::Exponential { .. } => integrate(f, lo, hi, &s),
            _ => {
                let left = integrate(f, f64::NEG_INFINITY, self.shift, &s)?;
                let right = integrate(f, self.shift, f64::INFINITY, &s)?;
                Ok(left + right)
            }
        }
    }

    /// Grid window `[mean − extent·σ, mean + extent·σ] ∩ support`.
    ///
    /// Uses σ = 1 for extended Cauchy laws with infinite variance.
    pub fn grid_window(&self, extent_sigmas: f64) -> (f64, f64) {
        let scale = self.std_dev().unwrap_or(1.0);
        let mean = self.mean();
        let (slo, shi) = self.support();
        (
            (mean - extent_sigmas * scale).max(slo),
            (mean + extent_sigmas * scale).min(shi),
        )
    }

    /// Samples the density on `n_points` equispaced abscissas spanning [`Self::grid_window`].
    pub fn to_grid(&self, n_points: usize, extent_sigmas: f64) -> Result<GridDensity> {
        if n_points < 64 {
            return Err(Error::Argument(format!(
                "grid needs at least 64 points, got {n_points}"
            )));
        }
        if !(extent_sigmas > 0.0) {
            return Err(Error::Argument(format!(
                "extent must be positive, got {extent_sigmas}"
            )));
        }
        let (lo, hi) = self.grid_window(extent_sigmas);
        self.check_window_mass(lo, hi)?;
        GridDensity::from_fn(|x| self.pdf(x), lo, hi, n_points)
    }

    /// Samples the density at `x_min + i·step`, i < n.
    pub fn sample_grid(&self, x_min: f64, step: f64, n: usize) -> Result<GridDensity> {
        self.check_window_mass(x_min, x_min + (n.max(1) - 1) as f64 * step)?;
        let values = (0..n).map(|i| self.pdf(x_min + i as f64 * step)).collect();
        GridDensity::new(x_min, step, values)
    }

    /// Probability mass outside `[lo, hi]`, by quadrature of the tails.
    pub fn mass_outside(&self, lo: f64, hi: f64) -> Result<f64> {
        let s = moment_settings();
        let (slo, shi) = self.support();
        let mut lost = 0.0;
        for (edge, dir, limit) in [(hi, 1.0, shi), (lo, -1.0, slo)] {
            if dir * (limit - edge) <= 0.0 {
                continue;
            }
            // distance from the shift to the edge along the tail direction
            let reach = dir * (edge - self.shift);
            let g = |u: f64| self.pdf(self.shift + dir * u);
            let start = reach.max(0.0);
            if reach < 0.0 {
                lost += integrate(g, reach, 0.0, &s)?;
            }
            lost += match self.family {
                Family::ExtendedCauchy { gamma } => {
                    let from = start.max(1.0);
                    let body = if start < from {
                        integrate(g, start, from, &s)?
                    } else {
                        0.0
                    };
                    body + power_tail(g, from, Self::cauchy_m(gamma) - 1.0, &s)?
                }
                _ if limit.is_finite() => {
                    let end = dir * (limit - self.shift);
                    if end > start {
                        integrate(g, start, end, &s)?
                    } else {
                        0.0
                    }
                }
                _ => integrate(g, start, f64::INFINITY, &s)?,
            };
        }
        Ok(lost)
    }

    /// Heavy-tailed laws must keep 1 − 1e−6 of their mass inside a grid window.
    fn check_window_mass(&self, lo: f64, hi: f64) -> Result<()> {
        if let Family::ExtendedCauchy { .. } = self.family {
            let lost = self.mass_outside(lo, hi)?;
            if lost > 1e-6 {
                return Err(Error::accuracy(
                    format!("grid window [{lo}, {hi}] misses more than 1e-6 of the mass"),
                    1.0 - lost,
                    lost,
                ));
            }
        }
        Ok(())
    }

    /// Law of s·X for s > 0.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!(
                "scale factor must be positive, got {s}"
            )));
        }
        let family = match self.family {
            Family::Gaussian { sigma } => Family::Gaussian { sigma: sigma * s },
            Family::Laplace { b } => Family::Laplace { b: b * s },
            Family::Uniform { a } => Family::Uniform { a: a * s },
            Family::Exponential { lambda } => Family::Exponential { lambda: lambda / s },
            Family::GeneralizedGaussian { r, d } => Family::GeneralizedGaussian {
                r,
                d: d * s.powf(r),
            },
            Family::ExtendedCauchy { .. } => {
                return Err(Error::Contract(
                    "the extended Cauchy family has no scale parameter".into(),
                ))
            }
        };
        Self::new(family, self.shift * s)
    }

    /// Same family rescaled to unit variance and zero mean.
    pub fn standardized(&self) -> Result<Self> {
        let sd = self
            .std_dev()
            .ok_or_else(|| Error::Contract(format!("{self} has infinite variance")))?;
        let base = Self::new(self.family, 0.0)?.scaled(1.0 / sd)?;
        let offset = base.mean();
        base.with_shift(-offset)
    }
}

/// ∫_L^∞ h(u) du for h(u) ~ u^{−1−κ}, via u = L·w^{−1/κ} on w ∈ (0, 1].
fn power_tail<F: Fn(f64) -> f64>(
    h: F,
    start: f64,
    kappa: f64,
    s: &QuadratureSettings,
) -> Result<f64> {
    integrate(
        |w: f64| {
            if w <= 0.0 {
                return 0.0;
            }
            let u = start * w.powf(-1.0 / kappa);
            h(u) * start / kappa * w.powf(-1.0 / kappa - 1.0)
        },
        0.0,
        1.0,
        s,
    )
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Gaussian { sigma } => write!(f, "gaussian:{sigma}")?,
            Family::Laplace { b } => write!(f, "laplace:{b}")?,
            Family::Uniform { a } => write!(f, "uniform:{a}")?,
            Family::Exponential { lambda } => write!(f, "exponential:{lambda}")?,
            Family::GeneralizedGaussian { r, d } => write!(f, "gg:{r},{d}")?,
            Family::ExtendedCauchy { gamma } => write!(f, "cauchyext:{gamma}")?,
        }
        if self.shift != 0.0 {
            write!(f, "@{}", self.shift)?;
        }
        Ok(())
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    /// `family:param[,param][@shift]`, case-insensitive.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim().to_ascii_lowercase();
        let (name, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected family:params, got '{text}'")))?;
        let (params, shift) = match rest.split_once('@') {
            Some((p, s)) => (p, parse_number(s)?),
            None => (rest, 0.0),
        };
        let values = params
            .split(',')
            .map(parse_number)
            .collect::<Result<Vec<f64>>>()?;
        let arity = |k: usize| -> Result<()> {
            if values.len() != k {
                return Err(Error::Parse(format!(
                    "family '{name}' takes {k} parameter(s), got {}",
                    values.len()
                )));
            }
            Ok(())
        };
        let family = match name.trim() {
            "gaussian" | "normal" | "gauss" => {
                arity(1)?;
                Family::Gaussian { sigma: values[0] }
            }
            "laplace" => {
                arity(1)?;
                Family::Laplace { b: values[0] }
            }
            "uniform" => {
                arity(1)?;
                Family::Uniform { a: values[0] }
            }
            "exponential" | "exp" => {
                arity(1)?;
                Family::Exponential { lambda: values[0] }
            }
            "gg" | "gengauss" | "generalized_gaussian" => {
                arity(2)?;
                Family::GeneralizedGaussian {
                    r: values[0],
                    d: values[1],
                }
            }
            "cauchyext" | "extcauchy" | "extended_cauchy" => {
                arity(1)?;
                Family::ExtendedCauchy { gamma: values[0] }
            }
            other => {
                return Err(Error::Parse(format!(
                    "unknown distribution family '{other}'"
                )))
            }
        };
        Self::new(family, shift).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse(format!("'{s}' is not a finite number")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pdf_examples() {
        assert_eq!(DistributionSpec::uniform(2.0).unwrap().pdf(0.0), 0.5);
        assert_eq!(DistributionSpec::laplace(1.0).unwrap().pdf(0.0), 0.5);
        let c = DistributionSpec::extended_cauchy(-0.5).unwrap().pdf(0.0);
        assert_relative_eq!(c, 0.413_496_671_566_344, max_relative = 1e-14);
    }

    #[test]
    fn moment_examples() {
        let lap = DistributionSpec::laplace(1.0).unwrap();
        assert_relative_eq!(
            lap.abs_moment(3.0, 0.0).unwrap().value,
            6f64.cbrt(),
            max_relative = 1e-13
        );
        let gg = DistributionSpec::generalized_gaussian(2.0, 1.0).unwrap();
        assert_relative_eq!(
            gg.abs_moment(2.0, 0.0).unwrap().value,
            1.0,
            max_relative = 1e-13
        );
        // ‖U‖_p = (a/2)(p+1)^{−1/p}
        let u = DistributionSpec::uniform(2.0).unwrap();
        let p = -0.999;
        assert_relative_eq!(
            u.abs_moment(p, 0.0).unwrap().value,
            (0.001f64).powf(-1.0 / p),
            max_relative = 1e-12
        );
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let specs = [
            DistributionSpec::gaussian(1.3).unwrap(),
            DistributionSpec::laplace(0.7).unwrap(),
            DistributionSpec::uniform(2.5).unwrap(),
            DistributionSpec::exponential(1.5).unwrap(),
            DistributionSpec::generalized_gaussian(3.0, 0.8).unwrap(),
            DistributionSpec::extended_cauchy(-0.2).unwrap(),
        ];
        for spec in specs {
            for p in [-0.5, 0.0, 0.5, 1.0, 2.0, 3.0] {
                let closed = spec.abs_moment(p, spec.shift).unwrap();
                let quad = spec.abs_moment_quadrature(p, spec.shift).unwrap();
                assert_eq!(closed.method, MomentMethod::ClosedForm);
                assert_relative_eq!(closed.value, quad.value, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn cauchy_finiteness_range() {
        let c = DistributionSpec::extended_cauchy(-0.5).unwrap();
        assert!(matches!(c.abs_moment(2.0, 0.0), Err(Error::Domain(_))));
        assert!(c.abs_moment(1.5, 0.0).is_ok());
        assert!(matches!(
            c.abs_moment_quadrature(1.9995, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(c.variance().is_none());
    }

    #[test]
    fn entropy_table_matches_quadrature() {
        for text in [
            "gaussian:1",
            "laplace:2",
            "uniform:3",
            "exp:0.5",
            "gg:3,0.7",
            "gg:1.5,2",
            "cauchyext:-0.3",
        ] {
            let spec: DistributionSpec = text.parse().unwrap();
            let a = spec.entropy().unwrap();
            let b = spec.entropy_quadrature().unwrap();
            assert!((a - b).abs() < 1e-9, "{text}: {a} vs {b}");
        }
    }

    #[test]
    fn variances_match_second_moment() {
        for text in [
            "gaussian:1.5",
            "laplace:0.5",
            "uniform:2",
            "gg:4,1.3",
            "cauchyext:-0.1",
        ] {
            let spec: DistributionSpec = text.parse().unwrap();
            let m2 = spec.abs_moment(2.0, 0.0).unwrap().value.powi(2);
            assert_relative_eq!(spec.variance().unwrap(), m2, max_relative = 1e-12);
        }
    }

    #[test]
    fn grids() {
        let u = DistributionSpec::uniform(2.0)
            .unwrap()
            .to_grid(1001, 10.0)
            .unwrap();
        assert_eq!(u.x_min(), -1.0);
        assert_relative_eq!(u.x_max(), 1.0, max_relative = 1e-15);
        assert!(u.values().iter().all(|&v| (v - 0.5).abs() < 1e-12));
        let g = DistributionSpec::gaussian(1.0)
            .unwrap()
            .to_grid(4096, 10.0)
            .unwrap();
        assert!((g.raw_mass() - 1.0).abs() < 1e-12);
        assert!(DistributionSpec::gaussian(1.0)
            .unwrap()
            .to_grid(10, 10.0)
            .is_err());
        let c = DistributionSpec::extended_cauchy(-0.5).unwrap();
        assert!(matches!(c.to_grid(4096, 10.0), Err(Error::Accuracy { .. })));
    }

    #[test]
    fn tail_masses() {
        let lap = DistributionSpec::laplace(1.0).unwrap();
        assert_relative_eq!(
            lap.mass_outside(-3.0, 2.0).unwrap(),
            0.5 * ((-3f64).exp() + (-2f64).exp()),
            max_relative = 1e-10
        );
        let ex = DistributionSpec::exponential(2.0)
            .unwrap()
            .with_shift(1.0)
            .unwrap();
        assert_relative_eq!(
            ex.mass_outside(-5.0, 2.0).unwrap(),
            (-2f64).exp(),
            max_relative = 1e-10
        );
        assert_relative_eq!(
            ex.mass_outside(1.5, 2.0).unwrap(),
            1.0 - (-1f64).exp() + (-2f64).exp(),
            max_relative = 1e-10
        );
        let u = DistributionSpec::uniform(2.0).unwrap();
        assert_relative_eq!(
            u.mass_outside(-0.5, 2.0).unwrap(),
            0.25,
            max_relative = 1e-12
        );
        // m = 3: ∫_L^∞ C/(1+x³) with C = 3√3/(4π)
        let c = DistributionSpec::extended_cauchy(-0.5).unwrap();
        let whole = c.mass_outside(0.0, 0.0).unwrap();
        assert!((whole - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flags() {
        let lap: DistributionSpec = "LAPLACE:1.0".parse().unwrap();
        assert!(lap.is_symmetric() && lap.is_log_concave());
        assert!(!lap.with_shift(0.5).unwrap().is_symmetric());
        assert!(!DistributionSpec::exponential(1.0).unwrap().is_symmetric());
        let c = DistributionSpec::extended_cauchy(-0.5).unwrap();
        assert!(!c.is_log_concave());
        assert_eq!(c.gamma_concave(), Some(-0.5));
    }

    #[test]
    fn parse_and_display() {
        let s: DistributionSpec = "uniform:2.0@0.5".parse().unwrap();
        assert_eq!(s.family, Family::Uniform { a: 2.0 });
        assert_eq!(s.shift, 0.5);
        assert_eq!(s.to_string(), "uniform:2@0.5");
        let g: DistributionSpec = "gg:3,0.5".parse().unwrap();
        assert_eq!(g.to_string().parse::<DistributionSpec>().unwrap(), g);
        for bad in [
            "laplace",
            "laplace:",
            "laplace:x",
            "foo:1",
            "laplace:-1",
            "gg:3",
            "cauchyext:0.5",
            "laplace:1@nan",
        ] {
            assert!(
                matches!(bad.parse::<DistributionSpec>(), Err(Error::Parse(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn scaling() {
        let gg = DistributionSpec::generalized_gaussian(3.0, 0.5).unwrap();
        let s = gg.scaled(2.0).unwrap();
        assert_relative_eq!(
            s.variance().unwrap(),
            4.0 * gg.variance().unwrap(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            s.entropy().unwrap(),
            gg.entropy().unwrap() + 2f64.ln(),
            max_relative = 1e-12
        );
        let z = DistributionSpec::exponential(2.0)
            .unwrap()
            .standardized()
            .unwrap();
        assert!(z.mean().abs() < 1e-15);
        assert_relative_eq!(z.variance().unwrap(), 1.0, max_relative = 1e-12);
    }
}
