//! Normal and Student-t helpers.
//!
//! `erfc` and `lgamma` come from `libm` (musl ports, accurate to a few ulp);
//! the regularized incomplete beta comes from `statrs`. The normal quantile
//! is Wichura's AS 241 (PPND16) followed by one Halley correction against
//! the erfc-based CDF.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use libm::{erfc, lgamma as ln_gamma};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal CDF, accurate in relative terms in the lower tail.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal survival function `1 - Φ(x)`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

pub fn normal_logpdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

pub fn normal_pdf(x: f64) -> f64 {
    normal_logpdf(x).exp()
}

/// Inverse of the standard normal CDF.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "normal quantile needs p in (0, 1), got {p}"
        )));
    }
    if p > 0.5 {
        // 1 - p is exact for p in (0.5, 1)
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

fn lower_quantile(p: f64) -> f64 {
    let x = ppnd16(p);
    if x == 0.0 {
        return 0.0;
    }
    // Halley step; Φ is relatively accurate for x <= 0 so the lower tail is safe.
    let t = (normal_cdf(x) - p) / normal_pdf(x);
    x - t / (1.0 + 0.5 * x * t)
}

#[allow(clippy::excessive_precision)]
fn ppnd16(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = ((((((r * 2_509.080_928_730_122_7 + 33_430.575_583_588_128) * r
            + 67_265.770_927_008_7)
            * r
            + 45_921.953_931_549_87)
            * r
            + 13_731.693_765_509_461)
            * r
            + 1_971.590_950_306_551_4)
            * r
            + 133.141_667_891_784_38)
            * r
            + 3.387_132_872_796_366_6;
        let den = ((((((r * 5_226.495_278_852_546 + 28_729.085_735_721_943) * r
            + 39_307.895_800_092_71)
            * r
            + 21_213.794_301_586_596)
            * r
            + 5_394.196_021_424_751)
            * r
            + 687.187_007_492_057_9)
            * r
            + 42.313_330_701_600_91)
            * r
            + 1.0;
        return q * num / den;
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((r * 7.745_450_142_783_414e-4 + 0.022_723_844_989_269_184) * r
            + 0.241_780_725_177_450_6)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_6)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_545)
            * r
            + 1.423_437_110_749_683_6;
        let den = ((((((r * 1.050_750_071_644_416_8e-9 + 5.475_938_084_995_345e-4) * r
            + 0.015_198_666_563_616_457)
            * r
            + 0.148_103_976_427_480_08)
            * r
            + 0.689_767_334_985_1)
            * r
            + 1.676_384_830_183_803_8)
            * r
            + 2.053_191_626_637_759)
            * r
            + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((r * 2.010_334_399_292_288_1e-7 + 2.711_555_568_743_487_6e-5) * r
            + 0.001_242_660_947_388_078_4)
            * r
            + 0.026_532_189_526_576_124)
            * r
            + 0.296_560_571_828_504_9)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103_8;
        let den = ((((((r * 2.044_263_103_389_939_8e-15 + 1.421_511_758_316_445_9e-7) * r
            + 1.846_318_317_510_054_7e-5)
            * r
            + 7.868_691_311_456_133e-4)
            * r
            + 0.014_875_361_290_850_615)
            * r
            + 0.136_929_880_922_735_8)
            * r
            + 0.599_832_206_555_887_9)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

/// Density of the standard Student-t with `df` degrees of freedom.
pub fn student_t_pdf(x: f64, df: f64) -> f64 {
    let half = 0.5 * (df + 1.0);
    let ln_norm = ln_gamma(half) - ln_gamma(0.5 * df) - 0.5 * (df * PI).ln();
    (ln_norm - half * (x * x / df).ln_1p()).exp()
}

/// CDF of the standard Student-t via the regularized incomplete beta.
pub fn student_t_cdf(x: f64, df: f64) -> f64 {
    if x.is_infinite() {
        return if x > 0.0 { 1.0 } else { 0.0 };
    }
    let w = df / (df + x * x);
    let tail = 0.5 * beta_reg(0.5 * df, 0.5, w);
    if x > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Numerically stable `log(Σ exp(x_i))`; `-inf` for empty or all-`-inf`
/// input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_center_and_reference_points() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        let q = std_normal_quantile(0.975).unwrap();
        assert!((q - 1.959_963_984_540_054).abs() < 1e-12, "{q}");
        let q = std_normal_quantile(0.025).unwrap();
        assert!((q + 1.959_963_984_540_054).abs() < 1e-12, "{q}");
        // Φ^{-1}(1e-10)
        let q = std_normal_quantile(1e-10).unwrap();
        assert!((q + 6.361_340_902_404_056).abs() < 1e-9, "{q}");
    }

    #[test]
    fn quantile_rejects_outside_unit_interval() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(std_normal_quantile(p), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn quantile_symmetry() {
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let a = std_normal_quantile(p).unwrap();
            let b = std_normal_quantile(1.0 - p).unwrap();
            assert!((a + b).abs() < 1e-12, "p={p}: {a} vs {b}");
        }
    }

    #[test]
    fn student_t_against_closed_forms() {
        // df = 1 is Cauchy
        for x in [-3.0, -0.5, 0.0, 0.7, 4.0] {
            let cauchy = 0.5 + f64::atan(x) / PI;
            assert!((student_t_cdf(x, 1.0) - cauchy).abs() < 1e-12);
            let dens = 1.0 / (PI * (1.0 + x * x));
            assert!((student_t_pdf(x, 1.0) - dens).abs() < 1e-12);
        }
        // df = 2 has cdf 1/2 + x / (2 sqrt(2 + x^2))
        for x in [-2.0f64, 0.3, 5.0] {
            let exact = 0.5 + x / (2.0 * (2.0f64 + x * x).sqrt());
            assert!((student_t_cdf(x, 2.0) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn log_sum_exp_edges() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
        let v = log_sum_exp(&[1000.0, 1000.0]);
        assert!((v - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
