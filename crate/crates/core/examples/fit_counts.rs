//! Fitting the latent rates from paired counts and testing the Poisson
//! marginals, mirroring the data workflow the CLI `fit` command wraps.

use poismean::fit::{fit_gammas, poisson_gof};
use poismean::model::GammaTriple;
use poismean::synth::{draw_bivariate_sample, SeedSpec};

fn main() -> poismean::Result<()> {
    // Synthesize a dataset from known rates, then pretend we don't know them.
    let truth = GammaTriple::new(4.1813, 8.104, 2.112)?;
    let data = draw_bivariate_sample(&truth, 5000, SeedSpec::new(404))?;

    let fitted = fit_gammas(&data, false)?;
    println!(
        "fitted rates: ({:.4}, {:.4}, {:.4})   truth ({}, {}, {})",
        fitted.gammas.gamma1(),
        fitted.gammas.gamma2(),
        fitted.gammas.gamma3(),
        truth.gamma1(),
        truth.gamma2(),
        truth.gamma3()
    );
    println!(
        "lambda1 = {:.4}, lambda2 = {:.4}, rho = {:.4}",
        fitted.lambda1, fitted.lambda2, fitted.rho
    );

    for (axis, values) in [("x", data.x_values()), ("y", data.y_values())] {
        let gof = poisson_gof(&values)?;
        println!(
            "\n{axis} marginal: lambda_hat = {:.4}, chi2 = {:.3}, df = {}, p = {:.4}",
            gof.lambda_hat, gof.chi2, gof.df, gof.pvalue
        );
        println!("  cell        observed   expected");
        for bin in &gof.bins {
            let range = match bin.hi {
                Some(hi) if hi == bin.lo => format!("{}", bin.lo),
                Some(hi) => format!("{}-{}", bin.lo, hi),
                None => format!("{}+", bin.lo),
            };
            println!("  {range:<10} {:>8} {:>10.1}", bin.observed, bin.expected);
        }
    }

    // Tiny or degenerate inputs are explicit errors.
    let two = draw_bivariate_sample(&truth, 1, SeedSpec::new(405))?;
    if let Err(e) = fit_gammas(&two, false) {
        println!("\n1-row fit: {e}");
    }
    Ok(())
}
