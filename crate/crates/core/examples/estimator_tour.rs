//! Every estimator family evaluated on one sample, given the known auxiliary
//! mean. Shows the member catalogue and the singular cases.

use poismean::estimators::{evaluate, EstimatorSpec, MemberId};
use poismean::model::{GammaTriple, MomentConvention};
use poismean::synth::{draw_bivariate_sample, sample_stats, SeedSpec};
use poismean::theory;

fn main() -> poismean::Result<()> {
    let g = GammaTriple::new(4.1813, 8.104, 2.112)?;
    let pop = g.moments();
    let n = 20;
    let sample = draw_bivariate_sample(&g, n, SeedSpec::new(3))?;
    let stats = sample_stats(&sample);
    println!(
        "sample: xbar = {:.3}, ybar = {:.3} (truth Ybar = {:.4})\n",
        stats.xbar, stats.ybar, pop.ybar
    );

    let conv = MomentConvention::Corrected;
    let families = [
        EstimatorSpec::MeanOnly,
        EstimatorSpec::Ratio,
        EstimatorSpec::Product,
        EstimatorSpec::ExpRatio,
        EstimatorSpec::ExpProduct,
        EstimatorSpec::ExpAlpha {
            alpha: theory::optimum_alpha(&g, conv),
        },
        EstimatorSpec::Difference {
            b: theory::optimum_b(&g, conv),
        },
    ];
    for spec in families {
        println!(
            "{:<42} -> {:.4}",
            spec.to_string(),
            evaluate(&spec, &stats, pop.xbar)?
        );
    }

    // The sixteen catalogued members, free slots resolved under the
    // corrected convention at this sample size.
    println!("\nmembers (free weights resolved at n = {n}):");
    for id in MemberId::ALL {
        let resolved = theory::resolve_member(id, &g, n, conv)?;
        let value = evaluate(&resolved.spec, &stats, pop.xbar)?;
        println!(
            "  {:<3} alpha = {:+.3}, w1 = {:.4} -> {:.4}",
            id.to_string(),
            resolved.alpha,
            resolved.w1,
            value
        );
    }

    // Degenerate samples are errors, not infinities.
    let zeros = sample_stats(&draw_bivariate_sample(
        &GammaTriple::new(0.01, 1.0, 0.0)?,
        1,
        SeedSpec::new(5),
    )?);
    if zeros.xbar == 0.0 {
        if let Err(e) = evaluate(&EstimatorSpec::Ratio, &zeros, pop.xbar) {
            println!("\nxbar = 0 sample: {e}");
        }
    }
    Ok(())
}
