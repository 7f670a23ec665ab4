//! Special functions: log-gamma, gamma, digamma and a few Γ-ratio helpers.
//!
//! `log_gamma` is a Lanczos rational approximation (g ≈ 6.0247, 13 terms)
//! with Taylor expansions around the two roots z = 1 and z = 2, where the
//! Lanczos form loses relative accuracy.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 6.024_680_040_776_729_583_740_234_375;

const LANCZOS_NUM: [f64; 13] = [
    23_531_376_880.410_759_688_572_007_674_451_636_754_734_846_804_940,
    42_919_803_642.649_098_768_957_899_047_001_988_850_926_355_848_959,
    35_711_959_237.355_668_049_440_185_451_547_166_705_960_488_635_843,
    17_921_034_426.037_209_699_919_755_754_458_931_112_671_403_265_390,
    6_039_542_586.352_028_005_064_291_644_307_297_921_069_938_842_070_8,
    1_439_720_407.311_721_673_663_223_072_794_912_393_971_548_578_677_2,
    248_874_557.862_054_156_511_460_386_413_229_423_216_321_251_278_01,
    31_426_415.585_400_194_380_614_231_628_318_205_362_874_684_987_640,
    2_876_370.628_935_372_441_225_409_051_620_849_613_599_114_537_876_8,
    186_056.265_395_223_495_040_294_989_716_045_699_282_207_842_363_28,
    8_071.672_002_365_816_210_638_002_902_272_250_613_821_851_632_502_4,
    210.824_277_751_579_345_872_509_733_920_713_362_711_669_695_802_91,
    2.506_628_274_631_000_270_164_908_177_133_837_338_626_431_079_340_8,
];

const LANCZOS_DEN: [f64; 13] = [
    0.0,
    39_916_800.0,
    120_543_840.0,
    150_917_976.0,
    105_258_076.0,
    45_995_730.0,
    13_339_535.0,
    2_637_558.0,
    357_423.0,
    32_670.0,
    1_925.0,
    66.0,
    1.0,
];

fn lanczos_sum(x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    if x < 5.0 {
        for i in (0..13).rev() {
            num = num * x + LANCZOS_NUM[i];
            den = den * x + LANCZOS_DEN[i];
        }
    } else {
        for i in 0..13 {
            num = num / x + LANCZOS_NUM[i];
            den = den / x + LANCZOS_DEN[i];
        }
    }
    num / den
}

/// ζ(k) for k = 2..=8; larger k use a direct sum.
const ZETA_SMALL: [f64; 7] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_369_9,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
];

fn zeta_int(k: usize) -> f64 {
    if (2..=8).contains(&k) {
        return ZETA_SMALL[k - 2];
    }
    // k ≥ 9: tail beyond n = 40 is below 40^{-8}/8
    (1..=40).rev().map(|n| (n as f64).powi(-(k as i32))).sum()
}

/// ln Γ(1 + e) for |e| ≤ 0.25 via the Taylor series −γe + Σ_{k≥2} (−e)^k ζ(k)/k.
fn log_gamma_1p_series(e: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = e * e;
    for k in 2..40 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * pow * zeta_int(k) / k as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
        pow *= e;
    }
    -EULER_GAMMA * e + sum
}

/// Natural logarithm of the gamma function for z > 0.
pub fn log_gamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires z > 0, got {z}")));
    }
    Ok(log_gamma_unchecked(z))
}

pub(crate) fn log_gamma_unchecked(z: f64) -> f64 {
    if z < 1e-20 {
        return -z.ln();
    }
    if (z - 1.0).abs() <= 0.25 {
        return log_gamma_1p_series(z - 1.0);
    }
    if (z - 2.0).abs() <= 0.25 {
        let e = z - 2.0;
        return e.ln_1p() + log_gamma_1p_series(e);
    }
    if z < 0.5 {
        // Γ(z) = Γ(z+1)/z keeps the Lanczos sum in its accurate range
        return log_gamma_unchecked(z + 1.0) - z.ln();
    }
    let mut r = lanczos_sum(z).ln() - LANCZOS_G;
    r += (z - 0.5) * ((z + LANCZOS_G - 0.5).ln() - 1.0);
    r
}

/// Γ(z) for z > 0 (overflows to +∞ beyond z ≈ 171.6).
pub fn gamma(z: f64) -> Result<f64> {
    log_gamma(z).map(f64::exp)
}

/// Digamma ψ(x) for x > 0: upward recurrence to x ≥ 10, then the asymptotic series.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let series = inv2
        * (1.0 / 12.0
            - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    Ok(acc + x.ln() - 0.5 / x - series)
}

/// (1/p)·ln Γ(p+1), continuous at p = 0 where it equals −γ.
///
/// This is ln of the normalizer Γ(p+1)^{1/p} that appears in every moment bound.
pub fn log_gamma_root(p: f64) -> Result<f64> {
    if !(p > -1.0) {
        return Err(Error::Domain(format!(
            "Γ(p+1)^(1/p) requires p > −1, got {p}"
        )));
    }
    if p.abs() < 1e-8 {
        return Ok(-EULER_GAMMA + std::f64::consts::PI.powi(2) / 12.0 * p);
    }
    Ok(log_gamma_unchecked(p + 1.0) / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_gamma_anchor_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-17);
        assert_relative_eq!(
            log_gamma(0.5).unwrap(),
            0.5 * std::f64::consts::PI.ln(),
            max_relative = 1e-14
        );
        // 4! = 24
        assert_relative_eq!(
            log_gamma(5.0).unwrap(),
            (24.0f64).ln(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn log_gamma_rejects_nonpositive() {
        assert!(matches!(log_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(-1.5), Err(Error::Domain(_))));
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn log_gamma_matches_factorials() {
        let mut lf = 0.0f64;
        for n in 1..170u32 {
            // lf = ln((n-1)!)
            let got = log_gamma(n as f64).unwrap();
            if lf != 0.0 {
                assert_relative_eq!(got, lf, max_relative = 1e-13);
            }
            lf += (n as f64).ln();
        }
    }

    #[test]
    fn log_gamma_recurrence_across_branches() {
        // ln Γ(z+1) − ln Γ(z) = ln z must hold where the evaluation path changes
        for &z in &[
            0.2, 0.49, 0.51, 0.74, 0.76, 1.24, 1.26, 1.74, 1.76, 2.24, 2.26, 4.9, 5.1,
        ] {
            let d = log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap();
            assert!(
                (d - f64::ln(z)).abs() < 2e-15 * (1.0 + log_gamma(z).unwrap().abs()),
                "z={z}"
            );
        }
    }

    #[test]
    fn digamma_values() {
        assert_relative_eq!(digamma(1.0).unwrap(), -EULER_GAMMA, max_relative = 1e-13);
        // ψ(1/2) = −γ − 2 ln 2
        assert_relative_eq!(
            digamma(0.5).unwrap(),
            -EULER_GAMMA - 2.0 * std::f64::consts::LN_2,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            digamma(11.0).unwrap() - digamma(10.0).unwrap(),
            0.1,
            max_relative = 1e-12
        );
    }

    #[test]
    fn gamma_root_is_continuous_at_zero() {
        let at0 = log_gamma_root(0.0).unwrap();
        let near = log_gamma_root(1e-6).unwrap();
        assert!((at0 + EULER_GAMMA).abs() < 1e-15);
        assert!((near - at0).abs() < 1e-5);
        assert_relative_eq!(
            log_gamma_root(2.0).unwrap(),
            0.5 * 2f64.ln(),
            max_relative = 1e-14
        );
    }
}
