//! Fits one synthetic scenario and prints occupancy, q95 and ISE.
//!
//! `cargo run --release --example scenario_fit -- B 6000 7`

use std::time::Instant;

use hetgev::diagnostics::{occupancy_distribution, posterior_curves, return_levels};
use hetgev::rng::chain_rng;
use hetgev::simdata::{gen_scenario, truth_grid, ScenarioSpec, ScenarioTag};
use hetgev::{run_chain, ChainConfig, PriorSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let tag: ScenarioTag = args.first().map_or("A", String::as_str).parse()?;
    let n_iter: usize = args.get(1).map_or(Ok(6000), |s| s.parse())?;
    let seed: u64 = args.get(2).map_or(Ok(1), |s| s.parse())?;

    let spec = ScenarioSpec::from_tag(tag, 1000);
    let mut rng = chain_rng(seed);
    let series = gen_scenario(&spec, &mut rng)?;
    let config = ChainConfig {
        seed,
        ..ChainConfig::with_iterations(n_iter)
    };
    let start = Instant::now();
    let draws = run_chain(&series, &PriorSpec::default(), &config, &mut rng)?;
    println!("chain: {:.1}s", start.elapsed().as_secs_f64());
    println!(
        "acceptance: burn-in {:.3}, sampling {:.3}",
        draws.acceptance.burn_in.rate(),
        draws.acceptance.sampling.rate()
    );
    for (k, f) in occupancy_distribution(&draws.draws) {
        println!("occupied {k}: {f:.4}");
    }
    let grid = truth_grid(&spec, 512)?;
    let (dens, _) = posterior_curves(&draws.draws, &grid, 0.95, 250)?;
    let truth: Vec<f64> = grid.iter().map(|&z| spec.density(z)).collect();
    let ise = hetgev::diagnostics::integrated_squared_error(&truth, &dens.median, &grid)?;
    let rl = return_levels(&draws.draws, &[0.05, 0.01], 0.95, 100)?;
    println!("ise: {ise:.3e}");
    for (j, p) in rl.p.iter().enumerate() {
        println!(
            "r_{p}: {:.3} [{:.3}, {:.3}] truth {:.3}",
            rl.median[j],
            rl.lower[j],
            rl.upper[j],
            spec.quantile(1.0 - p)?
        );
    }
    if std::env::var_os("SHOW_EXTRA").is_some() {
        for d in draws
            .draws
            .iter()
            .filter(|d| d.occupied() > 2)
            .step_by(97)
            .take(8)
        {
            let occ: Vec<String> = d
                .counts
                .iter()
                .enumerate()
                .filter(|(_, &n)| n > 0)
                .map(|(k, n)| {
                    let c = d.mixture.components()[k];
                    format!(
                        "n={n} w={:.3} ({:.2},{:.2},{:.2})",
                        d.mixture.weights()[k],
                        c.mu(),
                        c.sigma(),
                        c.xi()
                    )
                })
                .collect();
            println!(
                "it {} alpha {:.3}: {}",
                d.iteration,
                d.alpha,
                occ.join(" | ")
            );
        }
    }
    Ok(())
}
