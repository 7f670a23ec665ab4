//! Vector entropy bounds, exercised on product densities.
//!
//! For a product law the entropy, covariance determinant and density at 0 are
//! exact sums and products of scalar quantities, so no n-dimensional
//! integration is needed.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::numerics::special::log_gamma_root;
use crate::report::{BoundReport, Units};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductDistribution {
    components: Vec<DistributionSpec>,
    unconditional: bool,
    permutation_invariant: bool,
}

impl ProductDistribution {
    /// Product law with explicitly declared flags; declarations are checked.
    pub fn new(
        components: Vec<DistributionSpec>,
        unconditional: bool,
        permutation_invariant: bool,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Argument(
                "a product needs at least one component".into(),
            ));
        }
        if unconditional && !components.iter().all(DistributionSpec::is_symmetric) {
            return Err(Error::Contract(
                "unconditional products need symmetric components".into(),
            ));
        }
        if permutation_invariant && components.iter().any(|c| *c != components[0]) {
            return Err(Error::Contract(
                "permutation invariance needs identical components".into(),
            ));
        }
        Ok(Self {
            components,
            unconditional,
            permutation_invariant,
        })
    }

    /// Product law with the flags it actually has.
    pub fn from_components(components: Vec<DistributionSpec>) -> Result<Self> {
        let unconditional = components.iter().all(DistributionSpec::is_symmetric);
        let permutation_invariant = components.iter().all(|c| *c == components[0]);
        Self::new(components, unconditional, permutation_invariant)
    }

    pub fn iid(spec: DistributionSpec, n: usize) -> Result<Self> {
        Self::from_components(vec![spec; n])
    }

    pub fn components(&self) -> &[DistributionSpec] {
        &self.components
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn unconditional(&self) -> bool {
        self.unconditional
    }

    pub fn permutation_invariant(&self) -> bool {
        self.permutation_invariant
    }

    pub fn variances(&self) -> Result<Vec<f64>> {
        self.components
            .iter()
            .map(|c| {
                c.variance()
                    .ok_or_else(|| Error::Contract(format!("{c} has infinite variance")))
            })
            .collect()
    }

    /// ln |K_X| for the diagonal covariance.
    pub fn log_det_cov(&self) -> Result<f64> {
        Ok(self.variances()?.iter().map(|v| v.ln()).sum())
    }

    /// ‖X‖₂² = Σ E X_i².
    pub fn second_moment(&self) -> Result<f64> {
        self.components
            .iter()
            .map(|c| c.abs_moment(2.0, 0.0).map(|m| m.value * m.value))
            .sum()
    }

    pub fn entropy(&self) -> Result<f64> {
        self.components.iter().map(DistributionSpec::entropy).sum()
    }

    pub fn is_symmetric_log_concave(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.is_symmetric() && c.is_log_concave())
    }

    pub(crate) fn require_symmetric_log_concave(&self) -> Result<()> {
        match self
            .components
            .iter()
            .position(|c| !(c.is_symmetric() && c.is_log_concave()))
        {
            Some(i) => Err(Error::Contract(format!(
                "component {i} ({}) is not symmetric log-concave",
                self.components[i]
            ))),
            None => Ok(()),
        }
    }

    /// Common variance, or a contract error naming the first unequal pair.
    pub fn common_variance(&self) -> Result<f64> {
        let vars = self.variances()?;
        for (i, v) in vars.iter().enumerate().skip(1) {
            if (v - vars[0]).abs() > 1e-12 * vars[0] {
                return Err(Error::Contract(format!(
                    "not isotropic: Var(X0) = {} but Var(X{i}) = {v}",
                    vars[0]
                )));
            }
        }
        Ok(vars[0])
    }
}

/// c(n) = e²n²/(4√2(n+2)); for unconditional laws the smaller of that and e²/2.
pub fn c_constant(n: usize, unconditional: bool) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("c(n) is defined for n ≥ 2, got {n}")));
    }
    let nf = n as f64;
    let general = E * E * nf * nf / (4.0 * 2f64.sqrt() * (nf + 2.0));
    Ok(if unconditional {
        general.min(0.5 * E * E)
    } else {
        general
    })
}

/// (n/2) ln(|K|^{1/n}/c(n)) ≤ h(X) ≤ (n/2) ln(2πe|K|^{1/n}).
pub fn vector_entropy_lower(pd: &ProductDistribution) -> Result<BoundReport> {
    pd.require_symmetric_log_concave()?;
    let n = pd.n();
    let c = c_constant(n, pd.unconditional)?;
    let half_n = 0.5 * n as f64;
    let log_k = pd.log_det_cov()? / n as f64;
    let lower = half_n * (log_k - c.ln());
    let upper = half_n * ((2.0 * PI * E).ln() + log_k);
    Ok(BoundReport::new(
        "vector_entropy",
        Some(lower),
        pd.entropy()?,
        Some(upper),
        1e-9,
        Units::Nats,
    )
    .with_param("n", n as f64)
    .with_param("c", c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsotropyReport {
    pub m_squared: f64,
    pub density_at_zero: f64,
    pub ell_squared: f64,
    pub n: usize,
}

/// ℓ² = f_X(0)^{2/n} m² for an isotropic product.
pub fn isotropy(pd: &ProductDistribution) -> Result<IsotropyReport> {
    let m_squared = pd.common_variance()?;
    let log_f0: f64 = pd.components.iter().map(|c| c.pdf(0.0).ln()).sum();
    let n = pd.n();
    Ok(IsotropyReport {
        m_squared,
        density_at_zero: log_f0.exp(),
        ell_squared: (2.0 * log_f0 / n as f64).exp() * m_squared,
        n,
    })
}

/// ℓ² against its dimensional cap (e²/2 when unconditional).
pub fn isotropic_constant_bound(pd: &ProductDistribution) -> Result<BoundReport> {
    pd.require_symmetric_log_concave()?;
    let iso = isotropy(pd)?;
    let cap = c_constant(pd.n(), pd.unconditional)?;
    Ok(BoundReport::new(
        "isotropic_constant",
        None,
        iso.ell_squared,
        Some(cap),
        1e-12,
        Units::Plain,
    )
    .with_param("n", pd.n() as f64))
}

/// h(X) ≥ maxᵢ n ln(2‖Xᵢ‖_p/(Γ(p+1)^{1/p} c)), c = e√6 or e under permutation invariance.
pub fn extend_iso_lower(pd: &ProductDistribution, p: f64) -> Result<BoundReport> {
    if !pd.unconditional {
        return Err(Error::Contract(
            "the bound needs an unconditional law".into(),
        ));
    }
    pd.require_symmetric_log_concave()?;
    pd.common_variance()?;
    if !(p > -1.0) {
        return Err(Error::Domain(format!("p must exceed −1, got {p}")));
    }
    let c = if pd.permutation_invariant {
        E
    } else {
        E * 6f64.sqrt()
    };
    let nf = pd.n() as f64;
    let gr = log_gamma_root(p)?;
    let mut lower = f64::NEG_INFINITY;
    for comp in &pd.components {
        let norm = comp.abs_moment(p, 0.0)?.value;
        lower = lower.max(nf * ((2.0 * norm).ln() - gr - c.ln()));
    }
    Ok(BoundReport::new(
        "extend_iso",
        Some(lower),
        pd.entropy()?,
        None,
        1e-9,
        Units::Nats,
    )
    .with_param("p", p)
    .with_param("c", c)
    .with_param("n", nf))
}

/// D(X‖G_X) = Σᵢ D(Xᵢ‖Gᵢ) ≤ (n/2) ln(2πe c(n)).
pub fn vector_relative_entropy_bound(pd: &ProductDistribution) -> Result<BoundReport> {
    pd.require_symmetric_log_concave()?;
    let measured = product_relative_entropy(pd)?;
    let upper = 0.5 * pd.n() as f64 * (2.0 * PI * E * c_constant(pd.n(), pd.unconditional)?).ln();
    Ok(BoundReport::new(
        "vector_relative_entropy",
        Some(0.0),
        measured,
        Some(upper),
        1e-9,
        Units::Nats,
    )
    .with_param("n", pd.n() as f64))
}

/// Σᵢ [½ ln(2πe E Xᵢ²) − h(Xᵢ)].
pub fn product_relative_entropy(pd: &ProductDistribution) -> Result<f64> {
    pd.components
        .iter()
        .map(|c| {
            let m2 = c.abs_moment(2.0, 0.0)?.value.powi(2);
            Ok(0.5 * (2.0 * PI * E * m2).ln() - c.entropy()?)
        })
        .sum()
}
