//! Scalar entropy, moment and relative-entropy bounds.
//!
//! Entropies are in nats. Symmetric bounds use moments about 0; the general
//! (possibly skewed) variants use moments about the mean.

use std::f64::consts::{E, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::numerics::grid::kl_to_gaussian;
use crate::numerics::quadrature::{integrate, QuadratureSettings};
use crate::numerics::special::{log_gamma, log_gamma_root, log_gamma_unchecked};
use crate::report::{BoundReport, Units};

/// Grid used when a bound needs a numerically measured quantity.
pub const DEFAULT_GRID_N: usize = 4096;
pub const DEFAULT_EXTENT: f64 = 10.0;

/// ln α_p with α_p = 2 e^{1/p} Γ(1 + 1/p) p^{1/p}.
pub fn log_alpha(p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("α_p requires p > 0, got {p}")));
    }
    Ok(LN_2 + 1.0 / p + log_gamma_unchecked(1.0 + 1.0 / p) + p.ln() / p)
}

pub fn alpha(p: f64) -> Result<f64> {
    log_alpha(p).map(f64::exp)
}

/// Gap ln α_p − ln 2 + (1/p) ln Γ(p+1) between the moment upper bound and the
/// symmetric lower bound; spec independent.
pub fn entropy_bound_gap(p: f64) -> Result<f64> {
    Ok(log_alpha(p)? - LN_2 + log_gamma_root(p)?)
}

fn require_symmetric_log_concave(spec: &DistributionSpec) -> Result<()> {
    if !spec.is_symmetric() || !spec.is_log_concave() {
        return Err(Error::Contract(format!(
            "{spec} is not symmetric log-concave"
        )));
    }
    Ok(())
}

fn require_log_concave(spec: &DistributionSpec) -> Result<()> {
    if !spec.is_log_concave() {
        return Err(Error::Contract(format!("{spec} is not log-concave")));
    }
    Ok(())
}

fn norm(spec: &DistributionSpec, p: f64, center: f64) -> Result<f64> {
    spec.abs_moment(p, center).map(|m| m.value)
}

/// h(X) ≤ ln(α_p ‖X‖_p).
pub fn entropy_upper(spec: &DistributionSpec, p: f64) -> Result<f64> {
    Ok(log_alpha(p)? + norm(spec, p, 0.0)?.ln())
}

/// h(X) ≥ ln(2‖X‖_p) − (1/p) ln Γ(p+1), tightened to ln(2‖X‖₂) at p = 2.
pub fn entropy_lower_symmetric(spec: &DistributionSpec, p: f64) -> Result<f64> {
    require_symmetric_log_concave(spec)?;
    if !(p > -1.0) {
        return Err(Error::Domain(format!("p must exceed −1, got {p}")));
    }
    let base = (2.0 * norm(spec, p, 0.0)?).ln();
    if p == 2.0 {
        return Ok(base);
    }
    Ok(base - log_gamma_root(p)?)
}

/// h(X) ≥ ln(2‖X − EX‖_p) − (1/p) ln Γ(p+1) for p ≥ 1, and ln(2√Var X) at p = 2.
pub fn entropy_lower_general(spec: &DistributionSpec, p: f64) -> Result<f64> {
    require_log_concave(spec)?;
    if !(p >= 1.0) {
        return Err(Error::Domain(format!(
            "the centered bound needs p ≥ 1, got {p}"
        )));
    }
    if p == 2.0 {
        let var = spec
            .variance()
            .ok_or_else(|| Error::Internal("log-concave law with infinite variance".into()))?;
        return Ok((2.0 * var.sqrt()).ln());
    }
    Ok((2.0 * norm(spec, p, spec.mean())?).ln() - log_gamma_root(p)?)
}

/// sup f_X ≤ Γ(p+1)^{1/p}/(2‖X‖_p); measured on the default grid plus the mode.
pub fn density_max_bound(spec: &DistributionSpec, p: f64) -> Result<BoundReport> {
    require_symmetric_log_concave(spec)?;
    let grid = spec.to_grid(DEFAULT_GRID_N, DEFAULT_EXTENT)?;
    let measured = grid
        .abscissas()
        .map(|x| spec.pdf(x))
        .fold(spec.pdf(spec.shift), f64::max);
    let upper = log_gamma_root(p)?.exp() / (2.0 * norm(spec, p, 0.0)?);
    Ok(BoundReport::new(
        "density_max",
        None,
        measured,
        Some(upper),
        1e-12 * upper,
        Units::Plain,
    )
    .with_param("p", p))
}

/// ‖X‖_p ≤ ‖X‖_q ≤ Γ(q+1)^{1/q}/Γ(p+1)^{1/p} ‖X‖_p for −1 < p ≤ q.
pub fn moment_comparison_symmetric(spec: &DistributionSpec, p: f64, q: f64) -> Result<BoundReport> {
    if p > q {
        return Err(Error::Argument(format!(
            "moment comparison needs p ≤ q, got p={p}, q={q}"
        )));
    }
    require_symmetric_log_concave(spec)?;
    let np = norm(spec, p, 0.0)?;
    let nq = norm(spec, q, 0.0)?;
    let upper = (log_gamma_root(q)? - log_gamma_root(p)?).exp() * np;
    Ok(BoundReport::new(
        "moment_comparison_symmetric",
        Some(np),
        nq,
        Some(upper),
        1e-10 * upper,
        Units::Plain,
    )
    .with_param("p", p)
    .with_param("q", q))
}

/// ‖X − EX‖_q ≤ 2 Γ(q+1)^{1/q}/Γ(p+1)^{1/p} ‖X − EX‖_p for 1 ≤ p ≤ q.
pub fn moment_comparison_general(spec: &DistributionSpec, p: f64, q: f64) -> Result<BoundReport> {
    if !(p >= 1.0) || p > q {
        return Err(Error::Argument(format!(
            "general comparison needs 1 ≤ p ≤ q, got p={p}, q={q}"
        )));
    }
    require_log_concave(spec)?;
    let c = spec.mean();
    let np = norm(spec, p, c)?;
    let nq = norm(spec, q, c)?;
    let upper = 2.0 * (log_gamma_root(q)? - log_gamma_root(p)?).exp() * np;
    Ok(BoundReport::new(
        "moment_comparison_general",
        Some(np),
        nq,
        Some(upper),
        1e-9 * upper,
        Units::Plain,
    )
    .with_param("p", p)
    .with_param("q", q))
}

/// Δ_p = ln(Γ(p+1)^{1/p}/√2 · ‖X‖₂/‖X‖_p), and −½ ln 2 at p = 2.
pub fn delta_p(spec: &DistributionSpec, p: f64) -> Result<f64> {
    if p == 2.0 {
        return Ok(-0.5 * LN_2);
    }
    let c = if spec.is_symmetric() {
        0.0
    } else {
        spec.mean()
    };
    Ok(log_gamma_root(p)? - 0.5 * LN_2 + norm(spec, 2.0, c)?.ln() - norm(spec, p, c)?.ln())
}

/// D(X‖G_X) ≤ ln√(πe) + Δ_p, with the grid divergence as the measured side.
///
/// Symmetric laws accept p > −1; zero-mean skewed laws need p ≥ 1.
pub fn relative_entropy_bound(spec: &DistributionSpec, p: f64) -> Result<BoundReport> {
    require_log_concave(spec)?;
    if !spec.is_symmetric() {
        let scale = spec.std_dev().unwrap_or(1.0);
        if spec.mean().abs() > 1e-12 * scale {
            return Err(Error::Contract(format!("{spec} is not zero-mean")));
        }
        if !(p >= 1.0) {
            return Err(Error::Domain(format!("skewed laws need p ≥ 1, got {p}")));
        }
    }
    let grid = spec.to_grid(DEFAULT_GRID_N, DEFAULT_EXTENT)?;
    let measured = kl_to_gaussian(&grid);
    let closed = 0.5 * (2.0 * PI * E * norm(spec, 2.0, 0.0)?.powi(2)).ln() - spec.entropy()?;
    let upper = 0.5 * (PI * E).ln() + delta_p(spec, p)?;
    Ok(BoundReport::new(
        "relative_entropy",
        Some(0.0),
        measured,
        Some(upper),
        1e-6,
        Units::Nats,
    )
    .with_param("p", p)
    .with_param("measured_closed_form", closed))
}

/// F(r) = (1/Γ(r+1)) ∫₀^∞ x^r f(x) dx in both conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KpbPoint {
    pub r: f64,
    /// f = f_X restricted to x ≥ 0, so F(0) = ½.
    pub value: f64,
    /// f = 2 f_X on x ≥ 0 (density of |X|), so F(0) = 1.
    pub conditional: f64,
}

/// Evaluates F on `grid`; any r > −1 is accepted and F(r) → f_X(0) as r → −1.
pub fn kpb_f(spec: &DistributionSpec, grid: &[f64]) -> Result<Vec<KpbPoint>> {
    require_symmetric_log_concave(spec)?;
    let s = QuadratureSettings {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_subdivisions: 4000,
    };
    let (_, hi) = spec.support();
    let f0 = spec.pdf(0.0);
    let delta = hi.min(spec.std_dev().unwrap_or(1.0));
    grid.iter()
        .map(|&r| {
            if !(r > -1.0) {
                return Err(Error::Domain(format!("F(r) needs r > −1, got {r}")));
            }
            // subtracting f(0) near 0 keeps the integral regular as r → −1
            let near = integrate(|x: f64| x.powf(r) * (spec.pdf(x) - f0), 0.0, delta, &s)?;
            let far = if delta < hi {
                integrate(|x: f64| x.powf(r) * spec.pdf(x), delta, hi, &s)?
            } else {
                0.0
            };
            let j = near + far;
            let log_norm = log_gamma(r + 2.0)?;
            let value = (f0 * delta.powf(r + 1.0) + (r + 1.0) * j) / log_norm.exp();
            Ok(KpbPoint {
                r,
                value,
                conditional: 2.0 * value,
            })
        })
        .collect()
}

/// Parameter a = −1/γ of the γ-concave bound.
fn gamma_a(gamma: f64) -> Result<f64> {
    if !(gamma > -1.0 && gamma < 0.0) {
        return Err(Error::Domain(format!("γ must lie in (−1, 0), got {gamma}")));
    }
    Ok(-1.0 / gamma)
}

/// Constant term K with h(X) ≥ ln(2‖X‖_p) − (1/p) ln Γ(p+1) + K for symmetric γ-concave X.
pub fn gamma_concave_log_constant(gamma: f64, p: f64) -> Result<f64> {
    let a = gamma_a(gamma)?;
    if !(p > -1.0 && p < a - 1.0) {
        return Err(Error::Domain(format!(
            "p = {p} outside (−1, {}) for γ = {gamma}",
            a - 1.0
        )));
    }
    let lg = log_gamma_unchecked;
    if p.abs() < 1e-8 {
        // (1/p)[lnΓ(a−1) − lnΓ(a−1−p)] → ψ(a−1)
        let psi = crate::numerics::special::digamma(a - 1.0)?;
        return Ok(lg(a - 1.0) - lg(a) + psi);
    }
    Ok((1.0 + 1.0 / p) * lg(a - 1.0) - lg(a) - lg(a - p - 1.0) / p)
}

/// Lower bound on h(X) for a symmetric γ-concave law, γ ∈ (−1, 0), p ∈ (−1, −1 − 1/γ).
pub fn entropy_lower_gamma_concave(spec: &DistributionSpec, p: f64) -> Result<f64> {
    let gamma = spec
        .gamma_concave()
        .ok_or_else(|| Error::Contract(format!("{spec} carries no γ-concavity declaration")))?;
    if !spec.is_symmetric() {
        return Err(Error::Contract(format!("{spec} is not symmetric")));
    }
    let k = gamma_concave_log_constant(gamma, p)?;
    Ok((2.0 * norm(spec, p, 0.0)?).ln() - log_gamma_root(p)? + k)
}

/// Γ(a−1)³/(Γ(a)²Γ(a−3)) with a = −1/γ, γ ∈ (−1/3, 0).
pub fn gamma_ratio_p2(gamma: f64) -> Result<f64> {
    let a = gamma_a(gamma)?;
    if a <= 3.0 {
        return Err(Error::Domain(format!("needs γ > −1/3, got {gamma}")));
    }
    let lg = log_gamma_unchecked;
    Ok((3.0 * lg(a - 1.0) - 2.0 * lg(a) - lg(a - 3.0)).exp())
}

/// The rational form (2γ+1)(3γ+1)/(γ+1)² of [`gamma_ratio_p2`].
pub fn gamma_ratio_p2_rational(gamma: f64) -> f64 {
    (2.0 * gamma + 1.0) * (3.0 * gamma + 1.0) / ((gamma + 1.0) * (gamma + 1.0))
}

/// Sandwich report lower ≤ h ≤ upper at p (symmetric lower bound).
pub fn entropy_sandwich(spec: &DistributionSpec, p: f64) -> Result<BoundReport> {
    let lower = entropy_lower_symmetric(spec, p)?;
    let upper = if p > 0.0 {
        Some(entropy_upper(spec, p)?)
    } else {
        None
    };
    Ok(BoundReport::new(
        "entropy_sandwich",
        Some(lower),
        spec.entropy()?,
        upper,
        1e-6,
        Units::Nats,
    )
    .with_param("p", p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lap() -> DistributionSpec {
        DistributionSpec::laplace(1.0).unwrap()
    }

    #[test]
    fn alpha_values() {
        assert_relative_eq!(
            alpha(2.0).unwrap(),
            (2.0 * PI * E).sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(alpha(1.0).unwrap(), 2.0 * E, max_relative = 1e-14);
        assert_relative_eq!(
            alpha(4.0).unwrap(),
            3.291_847_424_613_842,
            max_relative = 1e-13
        );
        assert!(matches!(alpha(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn gap_at_one_is_one_nat() {
        assert!((entropy_bound_gap(1.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn upper_examples() {
        let g = DistributionSpec::gaussian(1.7).unwrap();
        assert_relative_eq!(
            entropy_upper(&g, 2.0).unwrap(),
            g.entropy().unwrap(),
            max_relative = 1e-14
        );
        let gg = DistributionSpec::generalized_gaussian(3.0, 0.6).unwrap();
        assert!((entropy_upper(&gg, 3.0).unwrap() - gg.entropy().unwrap()).abs() < 1e-12);
        let u = DistributionSpec::uniform(2.0).unwrap();
        assert_relative_eq!(
            entropy_upper(&u, 2.0).unwrap(),
            ((2.0 * PI * E).sqrt() / 3f64.sqrt()).ln(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn lower_examples() {
        let u = DistributionSpec::uniform(3.0).unwrap();
        let l = entropy_lower_symmetric(&u, -0.999).unwrap();
        assert!(l <= 3f64.ln() && 3f64.ln() - l <= 1e-3);
        assert_relative_eq!(
            entropy_lower_symmetric(&lap(), 2.0).unwrap(),
            (2.0 * 2f64.sqrt()).ln(),
            max_relative = 1e-14
        );
        let g = DistributionSpec::gaussian(1.0).unwrap();
        assert_relative_eq!(
            entropy_lower_symmetric(&g, 2.0).unwrap(),
            LN_2,
            max_relative = 1e-14
        );
        let ex = DistributionSpec::exponential(1.0).unwrap();
        assert!(matches!(
            entropy_lower_symmetric(&ex, 1.0),
            Err(Error::Contract(_))
        ));
        assert_relative_eq!(
            entropy_lower_general(&ex, 2.0).unwrap(),
            LN_2,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            entropy_lower_general(&ex, 1.0).unwrap(),
            (4.0 / E).ln(),
            max_relative = 1e-9
        );
        assert!(matches!(
            entropy_lower_general(&ex, 0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn density_max_examples() {
        let r = density_max_bound(&lap(), 2.0).unwrap();
        assert!(r.passed);
        assert!((r.measured - 0.5).abs() < 1e-15 && (r.upper.unwrap() - 0.5).abs() < 1e-14);
        let u = density_max_bound(&DistributionSpec::uniform(2.0).unwrap(), 2.0).unwrap();
        assert_relative_eq!(u.upper.unwrap(), 6f64.sqrt() / 2.0, max_relative = 1e-13);
        assert!(
            density_max_bound(&DistributionSpec::gaussian(1.0).unwrap(), 2.0)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn moment_comparisons() {
        let r = moment_comparison_symmetric(&lap(), 1.0, 3.0).unwrap();
        assert!(r.passed);
        assert!((r.upper.unwrap() - r.measured).abs() < 1e-10);
        let u = moment_comparison_symmetric(&DistributionSpec::uniform(2.0).unwrap(), 1.0, 2.0)
            .unwrap();
        assert!(u.passed);
        assert!(matches!(
            moment_comparison_symmetric(&lap(), 2.0, 1.0),
            Err(Error::Argument(_))
        ));
        let ex = moment_comparison_general(&DistributionSpec::exponential(1.0).unwrap(), 1.0, 2.0)
            .unwrap();
        assert!(ex.passed);
        assert_relative_eq!(ex.measured, 1.0, max_relative = 1e-9);
        assert_relative_eq!(
            ex.upper.unwrap(),
            2.0 * 2f64.sqrt() * 2.0 / E,
            max_relative = 1e-9
        );
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_p(&lap(), 2.0).unwrap(), -0.5 * LN_2);
        assert!(delta_p(&lap(), 1.0).unwrap().abs() < 1e-14);
        let u = DistributionSpec::uniform(1.0).unwrap();
        assert!((delta_p(&u, -1.0 + 1e-7).unwrap() - 0.5 * (1.0f64 / 6.0).ln()).abs() < 1e-6);
    }

    #[test]
    fn relative_entropy_examples() {
        let g = relative_entropy_bound(&DistributionSpec::gaussian(1.0).unwrap(), 2.0).unwrap();
        assert!(g.passed && g.measured.abs() < 1e-5);
        let u =
            relative_entropy_bound(&DistributionSpec::uniform(2.0).unwrap(), -1.0 + 1e-5).unwrap();
        let target = 0.5 * (2.0 * PI * E / 12.0).ln();
        assert!((u.upper.unwrap() - target).abs() < 1e-4);
        assert!((u.measured - target).abs() < 1e-6);
        let ex = DistributionSpec::exponential(1.0).unwrap();
        assert!(matches!(
            relative_entropy_bound(&ex, 2.0),
            Err(Error::Contract(_))
        ));
        let centered = ex.with_shift(-1.0).unwrap();
        assert!(relative_entropy_bound(&centered, 2.0).unwrap().passed);
    }

    #[test]
    fn kpb_examples() {
        // Laplace(1): f_X = ½e^{−x} on x ≥ 0, so F ≡ ½
        let pts = kpb_f(&lap(), &[-0.9, 0.0, 1.0, 3.5]).unwrap();
        for pt in pts {
            assert!((pt.value - 0.5).abs() < 1e-10, "r={}", pt.r);
            assert!((pt.conditional - 1.0).abs() < 1e-10);
        }
        let u = DistributionSpec::uniform(2.0).unwrap();
        let pt = kpb_f(&u, &[1.0]).unwrap()[0];
        // ½ ∫₀¹ x dx
        assert!((pt.conditional - 0.5).abs() < 1e-12);
        let g = DistributionSpec::gaussian(1.0).unwrap();
        let near = kpb_f(&g, &[-1.0 + 1e-7]).unwrap()[0];
        assert!((near.value - g.pdf(0.0)).abs() < 1e-6);
    }

    #[test]
    fn gamma_concave_examples() {
        let c = DistributionSpec::extended_cauchy(-0.25).unwrap();
        let b = entropy_lower_gamma_concave(&c, 2.0).unwrap();
        let m2 = c.abs_moment(2.0, 0.0).unwrap().value.powi(2);
        let g = -0.25;
        let alt = 0.5 * (2.0 * m2 * gamma_ratio_p2_rational(g)).ln();
        assert!((b - alt).abs() < 1e-12);
        let half = DistributionSpec::extended_cauchy(-0.5).unwrap();
        assert!(matches!(
            entropy_lower_gamma_concave(&half, 1.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            entropy_lower_gamma_concave(&lap(), 1.0),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn gamma_identity() {
        for k in 1..=20 {
            let g = -k as f64 / 63.0;
            assert_relative_eq!(
                gamma_ratio_p2(g).unwrap(),
                gamma_ratio_p2_rational(g),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn gamma_constant_continuity_at_zero_p() {
        let a = gamma_concave_log_constant(-0.1, 0.0).unwrap();
        let b = gamma_concave_log_constant(-0.1, 1e-6).unwrap();
        assert!((a - b).abs() < 1e-5);
    }
}
