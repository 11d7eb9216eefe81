use hetgev::gev::{gev_logpdf, gev_sample};
use hetgev::mixture::{mixture_sample, stick_to_weights};
use hetgev::rng::chain_rng;
use hetgev::sampler::{
    gibbs_sweep, initial_state, sample_components, ComponentProposals, Likelihood, ProposalScales,
};
use hetgev::{fit, BlockMaximaSeries, ChainConfig, GevParams, MixtureState, PriorSpec};

fn gev_data(n: usize, seed: u64) -> Vec<f64> {
    let th = GevParams::new(10.0, 1.5, 0.2).unwrap();
    let mut rng = chain_rng(seed);
    (0..n).map(|_| gev_sample(&mut rng, &th)).collect()
}

#[test]
fn zero_proposal_scale_never_moves_occupied_slots() {
    let data = gev_data(50, 1);
    let priors = PriorSpec::default();
    let mut rng = chain_rng(2);
    let mut state = initial_state(&data, Likelihood::Exact, &priors, 6, &mut rng).unwrap();
    let zero = ProposalScales {
        mu: 0.0,
        log_sigma: 0.0,
        xi: 0.0,
    };
    let mut props = ComponentProposals::new(6, zero, 0.25);
    let counts = state.counts();
    let before = state.components.clone();
    for _ in 0..50 {
        let stats = sample_components(
            &mut state,
            &data,
            Likelihood::Exact,
            &priors,
            &mut props,
            false,
            &mut rng,
        );
        assert_eq!(stats.accepted, stats.proposed);
        for k in 0..6 {
            if counts[k] > 0 {
                assert_eq!(state.components[k], before[k]);
            }
        }
    }
}

#[test]
fn empty_slots_are_redrawn_from_the_prior() {
    let priors = PriorSpec::default();
    let comps = vec![GevParams::new(10.0, 1.0, 0.1).unwrap(); 2];
    let data = [10.0, 10.5];
    let mut state = MixtureState::new(
        stick_to_weights(&[0.5, 1.0]).unwrap(),
        comps,
        vec![0, 0],
        1.0,
    )
    .unwrap();
    let mut props = ComponentProposals::new(2, ProposalScales::from_data(&data), 0.25);
    let mut rng = chain_rng(3);
    let n = 40_000;
    let (mut mu, mut ls, mut xi) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..n {
        sample_components(
            &mut state,
            &data,
            Likelihood::Exact,
            &priors,
            &mut props,
            false,
            &mut rng,
        );
        let c = state.components[1];
        mu.push(c.mu());
        ls.push(c.sigma().ln());
        xi.push(c.xi());
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let var = |v: &[f64]| {
        let m = mean(v);
        v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
    };
    let se = 100.0 / (n as f64).sqrt();
    assert!(mean(&mu).abs() < 5.0 * se);
    assert!(mean(&ls).abs() < 5.0 * se);
    assert!((var(&mu) / 1e4 - 1.0).abs() < 0.05);
    assert!(xi.iter().all(|&x| x > -0.5));
    // N(0, 100) truncated to (-0.5, inf): mean 10 phi(0.05) / (1 - Phi(-0.05))
    let xi_mean = 10.0 * 0.398_443_914_094_764_6 / 0.519_938_805_838_372_4;
    assert!(
        (mean(&xi) - xi_mean).abs() < 5.0 * 6.1 / (n as f64).sqrt(),
        "{}",
        mean(&xi)
    );
}

#[test]
fn chains_are_reproducible_from_the_seed() {
    let series = BlockMaximaSeries::new(gev_data(120, 4)).unwrap();
    let config = ChainConfig {
        truncation: 10,
        seed: 99,
        ..ChainConfig::with_iterations(300)
    };
    let a = fit(&series, &PriorSpec::default(), &config).unwrap();
    let b = fit(&series, &PriorSpec::default(), &config).unwrap();
    assert_eq!(a, b);
    let c = fit(
        &series,
        &PriorSpec::default(),
        &ChainConfig {
            seed: 100,
            ..config
        },
    )
    .unwrap();
    assert_ne!(a.draws, c.draws);
}

#[test]
fn thinning_and_burn_in_bookkeeping() {
    let series = BlockMaximaSeries::new(gev_data(60, 5)).unwrap();
    let config = ChainConfig {
        truncation: 5,
        n_iter: 103,
        burn_in: 40,
        thin: 7,
        ..ChainConfig::default()
    };
    let draws = fit(&series, &PriorSpec::default(), &config).unwrap();
    assert_eq!(draws.len(), config.retained());
    let its: Vec<usize> = draws.draws.iter().map(|d| d.iteration).collect();
    assert_eq!(its[0], 47);
    assert!(its.windows(2).all(|w| w[1] - w[0] == 7));
    assert!(draws.acceptance.burn_in.proposed > 0 && draws.acceptance.sampling.proposed > 0);
}

#[test]
fn sweep_invariants_hold_for_a_thousand_sweeps() {
    let mix = hetgev::GevMixture::from_weights(
        vec![
            GevParams::new(1.0, 1.5, -0.2).unwrap(),
            GevParams::new(18.0, 1.0, 0.4).unwrap(),
        ],
        &[0.7, 0.3],
    )
    .unwrap();
    let mut rng = chain_rng(6);
    let data: Vec<f64> = (0..200).map(|_| mixture_sample(&mut rng, &mix).0).collect();
    let priors = PriorSpec::default();
    for lik in [Likelihood::Exact, Likelihood::Censored { delta: 0.05 }] {
        let mut state = initial_state(&data, lik, &priors, 12, &mut rng).unwrap();
        let mut props = ComponentProposals::new(12, ProposalScales::from_data(&data), 0.25);
        for it in 0..1000 {
            gibbs_sweep(
                &mut state,
                &data,
                lik,
                &priors,
                &mut props,
                it < 500,
                &mut rng,
            )
            .unwrap();
            let w = state.sticks.weights();
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(w.iter().all(|&x| x >= 0.0));
            assert_eq!(*state.sticks.sticks().last().unwrap(), 1.0);
            assert!(state.alpha > 0.0 && state.alpha.is_finite());
            assert!(state.occupied() >= 1 && state.occupied() <= 12);
            for (&c, &z) in state.allocations.iter().zip(&data) {
                let th = &state.components[c];
                let ok = match lik {
                    Likelihood::Exact => gev_logpdf(z, th).unwrap() > f64::NEG_INFINITY,
                    Likelihood::Censored { delta } => {
                        hetgev::gev::gev_interval_logprob(z - delta, z + delta, th).unwrap()
                            > f64::NEG_INFINITY
                    }
                };
                assert!(ok, "observation {z} allocated to {th:?}");
            }
        }
    }
}

#[test]
fn initial_state_supports_every_observation() {
    let data = gev_data(500, 7);
    let priors = PriorSpec::default();
    let state = initial_state(&data, Likelihood::Exact, &priors, 50, &mut chain_rng(1)).unwrap();
    assert_eq!(state.occupied(), 5);
    for (&c, &z) in state.allocations.iter().zip(&data) {
        assert!(gev_logpdf(z, &state.components[c]).unwrap().is_finite());
    }
}

#[test]
fn single_gev_posterior_concentrates_near_truth() {
    let series = BlockMaximaSeries::new(gev_data(1000, 8)).unwrap();
    let config = ChainConfig {
        truncation: 20,
        seed: 8,
        ..ChainConfig::with_iterations(4000)
    };
    let draws = fit(&series, &PriorSpec::default(), &config).unwrap();
    let single = draws.draws.iter().filter(|d| d.occupied() == 1).count();
    assert!(single * 2 > draws.len());
    let mut mu = Vec::new();
    let mut sigma = Vec::new();
    let mut xi = Vec::new();
    for d in &draws.draws {
        let k = (0..d.counts.len()).max_by_key(|&k| d.counts[k]).unwrap();
        let c = d.mixture.components()[k];
        mu.push(c.mu());
        sigma.push(c.sigma());
        xi.push(c.xi());
    }
    let median = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    // asymptotic posterior sds at m = 1000 are about 0.055, 0.04, 0.025
    let (mu, sigma, xi) = (median(mu), median(sigma), median(xi));
    assert!((mu - 10.0).abs() < 0.25, "{mu}");
    assert!((sigma - 1.5).abs() < 0.2, "{sigma}");
    assert!((xi - 0.2).abs() < 0.12, "{xi}");
}

/// Successive-conditional simulation: alternate a sweep with a fresh draw
/// of the data given the state. The state marginals must match the prior.
#[test]
fn joint_distribution_test() {
    let priors = PriorSpec {
        mu_mean: 0.0,
        mu_var: 1.0,
        logscale_mean: 0.0,
        logscale_var: 0.09,
        shape_mean: 0.1,
        shape_var: 0.04,
        alpha_shape: 2.0,
        alpha_rate: 2.0,
    };
    let k_max = 3;
    let m = 4;
    let scales = ProposalScales {
        mu: 0.6,
        log_sigma: 0.25,
        xi: 0.2,
    };
    let mut rng = chain_rng(31);
    let mut props = ComponentProposals::new(k_max, scales, 0.25);

    // exact draw from the joint
    let alpha = 1.0;
    let comps: Vec<GevParams> = (0..k_max)
        .map(|_| priors.sample_component(&mut rng))
        .collect();
    let sticks = stick_to_weights(&[0.5, 0.5, 1.0]).unwrap();
    let mut state = MixtureState::new(sticks, comps, vec![0; m], alpha).unwrap();
    let mut data: Vec<f64> = state
        .allocations
        .iter()
        .map(|&c| gev_sample(&mut rng, &state.components[c]))
        .collect();

    let n = 400_000;
    let batch = 2_000;
    let mut stats: Vec<[f64; 4]> = Vec::with_capacity(n);
    for _ in 0..n {
        gibbs_sweep(
            &mut state,
            &data,
            Likelihood::Exact,
            &priors,
            &mut props,
            false,
            &mut rng,
        )
        .unwrap();
        for (z, &c) in data.iter_mut().zip(&state.allocations) {
            *z = gev_sample(&mut rng, &state.components[c]);
        }
        let c0 = state.components[0];
        stats.push([state.alpha, c0.mu(), c0.sigma().ln(), c0.xi()]);
    }
    // alpha ~ Gamma(2, 2); mu ~ N(0, 1); log sigma ~ N(0, 0.09);
    // xi ~ N(0.1, 0.04) truncated at -0.5, whose mean is
    // 0.1 + 0.2 phi(3) / (1 - Phi(-3))
    let xi_mean = 0.1 + 0.2 * 0.004_431_848_411_938_008 / 0.998_650_101_968_369_9;
    let truth = [1.0, 0.0, 0.0, xi_mean];
    for j in 0..4 {
        let batches: Vec<f64> = stats
            .chunks(batch)
            .map(|c| c.iter().map(|s| s[j]).sum::<f64>() / c.len() as f64)
            .collect();
        let nb = batches.len() as f64;
        let mean = batches.iter().sum::<f64>() / nb;
        let var = batches.iter().map(|b| (b - mean) * (b - mean)).sum::<f64>() / (nb - 1.0);
        let se = (var / nb).sqrt();
        assert!(
            (mean - truth[j]).abs() < 4.0 * se,
            "statistic {j}: mean {mean}, truth {}, se {se}",
            truth[j]
        );
    }
}
