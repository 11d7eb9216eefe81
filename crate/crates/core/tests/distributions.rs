use hetgev::gev::{
    gev_cdf, gev_interval_logprob, gev_logpdf, gev_quantile, gev_sample, log_likelihood,
    support_bounds,
};
use hetgev::mixture::{
    mixture_cdf, mixture_pdf, mixture_quantile, mixture_sample, quantile_bracket, stick_to_weights,
};
use hetgev::rng::chain_rng;
use hetgev::{GevMixture, GevParams};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = GevParams> {
    (-50.0..50.0f64, 0.05..20.0f64, -0.49..1.5f64)
        .prop_map(|(m, s, x)| GevParams::new(m, s, x).unwrap())
}

fn mixtures() -> impl Strategy<Value = GevMixture> {
    prop::collection::vec((params(), 0.05..0.95f64), 1..=10).prop_map(|parts| {
        let (comps, sticks): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
        GevMixture::new(comps, stick_to_weights(&sticks).unwrap()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn quantile_roundtrip(th in params(), p in 1e-6..(1.0 - 1e-6f64)) {
        let z = gev_quantile(p, &th).unwrap();
        prop_assert!((gev_cdf(z, &th).unwrap() - p).abs() < 1e-10);
    }

    #[test]
    fn cdf_is_monotone_and_bounded(th in params(), a in -200.0..200.0f64, d in 0.0..50.0f64) {
        let fa = gev_cdf(a, &th).unwrap();
        let fb = gev_cdf(a + d, &th).unwrap();
        prop_assert!((0.0..=1.0).contains(&fa));
        prop_assert!(fa <= fb);
    }

    #[test]
    fn cdf_is_zero_or_one_outside_support(th in params(), off in 1e-3..100.0f64) {
        let b = support_bounds(&th);
        if b.lower.is_finite() {
            prop_assert_eq!(gev_cdf(b.lower - off, &th).unwrap(), 0.0);
            prop_assert_eq!(gev_logpdf(b.lower - off, &th).unwrap(), f64::NEG_INFINITY);
        }
        if b.upper.is_finite() {
            prop_assert_eq!(gev_cdf(b.upper + off, &th).unwrap(), 1.0);
        }
    }

    #[test]
    fn gumbel_continuity(mu in -20.0..20.0f64, s in 0.1..10.0f64, z in -5.0..15.0f64) {
        let g = GevParams::new(mu, s, 0.0).unwrap();
        let z = mu + s * z;
        for xi in [1e-9, -1e-9] {
            let near = GevParams::new(mu, s, xi).unwrap();
            prop_assert!((gev_cdf(z, &near).unwrap() - gev_cdf(z, &g).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn density_matches_cdf_slope(th in params(), p in 0.02..0.98f64) {
        let z = gev_quantile(p, &th).unwrap();
        let h = 1e-5 * th.sigma();
        let fd = (gev_cdf(z + h, &th).unwrap() - gev_cdf(z - h, &th).unwrap()) / (2.0 * h);
        let dens = gev_logpdf(z, &th).unwrap().exp();
        prop_assert!((fd - dens).abs() < 1e-6, "{} {}", fd, dens);
    }

    #[test]
    fn censored_mass_approaches_density(th in params(), p in 0.05..0.95f64) {
        let z = gev_quantile(p, &th).unwrap();
        let dens = gev_logpdf(z, &th).unwrap().exp();
        let ratio = |d: f64| (gev_interval_logprob(z - d, z + d, &th).unwrap().exp() / (2.0 * d)) / dens;
        let coarse = (ratio(1e-2 * th.sigma()) - 1.0).abs();
        let fine = (ratio(1e-5 * th.sigma()) - 1.0).abs();
        prop_assert!(fine < 1e-6, "{}", fine);
        prop_assert!(fine <= coarse + 1e-9);
    }

    #[test]
    fn interval_mass_is_cdf_difference(th in params(), p in 0.05..0.9f64, w in 0.1..3.0f64) {
        let zl = gev_quantile(p, &th).unwrap();
        let zr = zl + w * th.sigma();
        let direct = gev_cdf(zr, &th).unwrap() - gev_cdf(zl, &th).unwrap();
        let logm = gev_interval_logprob(zl, zr, &th).unwrap();
        prop_assert!((logm.exp() - direct).abs() < 1e-12);
    }

    #[test]
    fn stick_weights_form_a_probability_vector(v in prop::collection::vec(0.0..=1.0f64, 1..60)) {
        let w = stick_to_weights(&v).unwrap();
        let total: f64 = w.weights().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(w.weights().iter().all(|&x| x >= 0.0));
        prop_assert_eq!(*w.sticks().last().unwrap(), 1.0);
    }

    #[test]
    fn mixture_quantile_consistency(mix in mixtures(), p in 1e-4..(1.0 - 1e-4f64)) {
        let q = mixture_quantile(p, &mix).unwrap();
        prop_assert!((mixture_cdf(q, &mix) - p).abs() < 1e-10);
        let (lo, hi) = quantile_bracket(p, &mix).unwrap();
        prop_assert!(lo <= q && q <= hi);
    }

    #[test]
    fn mixture_cdf_is_weighted_sum(mix in mixtures(), z in -100.0..100.0f64) {
        let direct: f64 = mix
            .components()
            .iter()
            .zip(mix.weights())
            .map(|(c, w)| w * gev_cdf(z, c).unwrap())
            .sum();
        prop_assert!((mixture_cdf(z, &mix) - direct.min(1.0)).abs() < 1e-12);
        prop_assert!(mixture_pdf(z, &mix) >= 0.0);
    }

    #[test]
    fn log_likelihood_sums_terms(th in params(), ps in prop::collection::vec(0.01..0.99f64, 1..20)) {
        let zs: Vec<f64> = ps.iter().map(|&p| gev_quantile(p, &th).unwrap()).collect();
        let direct: f64 = zs.iter().map(|&z| gev_logpdf(z, &th).unwrap()).sum();
        prop_assert!((log_likelihood(&zs, &th, None) - direct).abs() < 1e-9 * direct.abs().max(1.0));
    }
}

/// Kolmogorov-Smirnov statistic of a sample against a CDF.
fn ks(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / m - f).max(f - i as f64 / m)
        })
        .fold(0.0, f64::max)
}

// 1% critical value of the one-sample KS statistic for m = 20 000
const KS_CRIT_20K: f64 = 1.628 / 141.421_356_237_309_5;

#[test]
fn gev_sampler_matches_cdf() {
    let mut rng = chain_rng(11);
    for th in [
        GevParams::new(10.0, 1.5, 0.2).unwrap(),
        GevParams::new(1.0, 1.5, -0.2).unwrap(),
        GevParams::new(0.0, 1.0, 0.0).unwrap(),
        GevParams::new(-3.0, 0.1, -0.45).unwrap(),
    ] {
        let xs: Vec<f64> = (0..20_000).map(|_| gev_sample(&mut rng, &th)).collect();
        let d = ks(xs, |z| gev_cdf(z, &th).unwrap());
        assert!(d < KS_CRIT_20K, "{th:?}: {d}");
    }
}

#[test]
fn mixture_sampler_matches_cdf() {
    let mix = GevMixture::from_weights(
        vec![
            GevParams::new(1.0, 1.5, -0.2).unwrap(),
            GevParams::new(18.0, 1.0, 0.4).unwrap(),
        ],
        &[0.7, 0.3],
    )
    .unwrap();
    let mut rng = chain_rng(12);
    let draws: Vec<(f64, usize)> = (0..20_000)
        .map(|_| mixture_sample(&mut rng, &mix))
        .collect();
    let share = draws.iter().filter(|d| d.1 == 0).count() as f64 / 20_000.0;
    // binomial sd is about 0.0032
    assert!((share - 0.7).abs() < 0.015, "{share}");
    let xs = draws.into_iter().map(|d| d.0).collect();
    assert!(ks(xs, |z| mixture_cdf(z, &mix)) < KS_CRIT_20K);
}
