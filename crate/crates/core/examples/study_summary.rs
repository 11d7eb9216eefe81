//! Replicated scenario study; prints one line per replicate and quantile
//! summaries of the ISE and the posterior-median 95% quantile.
//!
//! `cargo run --release --example study_summary -- A 20 6000 7`

use hetgev::simdata::{monte_carlo_study, ScenarioSpec, ScenarioTag, StudyConfig};
use hetgev::ChainConfig;

fn quantile(mut v: Vec<f64>, q: f64) -> f64 {
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q;
    let (i, f) = (h.floor() as usize, h.fract());
    if i + 1 < v.len() {
        v[i] + f * (v[i + 1] - v[i])
    } else {
        v[i]
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let tag: ScenarioTag = args.first().map_or("A", String::as_str).parse()?;
    let replicates: usize = args.get(1).map_or(Ok(20), |s| s.parse())?;
    let n_iter: usize = args.get(2).map_or(Ok(6000), |s| s.parse())?;
    let master_seed: u64 = args.get(3).map_or(Ok(7), |s| s.parse())?;

    let spec = ScenarioSpec::from_tag(tag, 1000);
    let config = StudyConfig {
        replicates,
        chain: ChainConfig::with_iterations(n_iter),
        master_seed,
        ..StudyConfig::default()
    };
    let study = monte_carlo_study(&spec, &config)?;
    println!(
        "truth q95 {:.6} q99 {:.6}",
        study.truth_q95, study.truth_q99
    );
    for r in &study.replicates {
        let modal = r
            .occupancy
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map_or(0, |o| o.0);
        println!(
            "rep {:>2} ise {:.4e} q95 {:.4} [{:.4}, {:.4}] q99 {:.4} [{:.4}, {:.4}] modal {modal}",
            r.replicate,
            r.ise,
            r.q95.median,
            r.q95.lower,
            r.q95.upper,
            r.q99.median,
            r.q99.lower,
            r.q99.upper
        );
    }
    let ise: Vec<f64> = study.replicates.iter().map(|r| r.ise).collect();
    let q95: Vec<f64> = study.replicates.iter().map(|r| r.q95.median).collect();
    println!(
        "median ise {:.6e}; q95 median 5%/95%: {:.6} {:.6}",
        quantile(ise, 0.5),
        quantile(q95.clone(), 0.05),
        quantile(q95, 0.95)
    );
    println!(
        "coverage q95 {:.2} q99 {:.2}",
        study.coverage_q95(),
        study.coverage_q99()
    );
    Ok(())
}
