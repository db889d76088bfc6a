//! Population-mean estimators for correlated Poisson count data.
//!
//! A pair of correlated counts (x, y) is modeled by trivariate reduction:
//! x = k + z and y = w + z with independent Poisson components of rates
//! (γ1, γ2, γ3). On top of that model this crate provides
//!
//! * exact synthetic data generation (reproducible, splittable random
//!   streams; inversion and transformed-rejection Poisson sampling),
//! * every classical auxiliary-information estimator of the mean of y —
//!   ratio, product, exponential ratio/product, a scalar exponential family,
//!   a difference estimator, and a two-weight generalized family with
//!   sixteen catalogued members,
//! * first-order bias/MSE theory for all of them under two moment
//!   conventions ("as-printed" reproduces the originally published closed
//!   forms verbatim; "corrected" uses the self-consistent moments), with
//!   closed-form optimum parameters and percent-relative-efficiency tables,
//! * Monte Carlo machinery that measures empirical bias/MSE with standard
//!   errors and z-scores, and empirically optimizes estimator parameters
//!   under common random numbers — which is how the two conventions are
//!   arbitrated against data,
//! * method-of-moments rate fitting from paired counts with chi-square
//!   goodness-of-fit tests of the Poisson marginals.
//!
//! # Quick start
//!
//! ```
//! use poismean::model::{GammaTriple, MomentConvention};
//! use poismean::{estimators, synth, theory};
//!
//! let gammas = GammaTriple::new(4.1813, 8.104, 2.112)?;
//! let pop = gammas.moments();
//!
//! // Draw a reproducible sample and estimate the mean of y three ways.
//! let sample = synth::draw_bivariate_sample(&gammas, 200, synth::SeedSpec::new(7))?;
//! let stats = synth::sample_stats(&sample);
//! for spec in [
//!     estimators::EstimatorSpec::MeanOnly,
//!     estimators::EstimatorSpec::Ratio,
//!     estimators::EstimatorSpec::Difference { b: 0.3356 },
//! ] {
//!     println!("{spec}: {:.4}", estimators::evaluate(&spec, &stats, pop.xbar)?);
//! }
//!
//! // First-order theory at n = 200 under the corrected convention.
//! let table = theory::pre_table(&gammas, 200, MomentConvention::Corrected)?;
//! println!("best PRE: {:.1}", table.rows.iter().map(|r| r.pre).fold(0.0, f64::max));
//! # Ok::<(), poismean::Error>(())
//! ```
//!
//! # Runnable examples
//!
//! Each major capability has a standalone example under `examples/`:
//!
//! ```text
//! cargo run --release --example population_moments    # model round trips, both conventions
//! cargo run --release --example draw_sample           # generation, stats, determinism
//! cargo run --release --example finite_population     # frame + SRSWOR subsampling
//! cargo run --release --example estimator_tour        # every family on one sample
//! cargo run --release --example theory_table          # PRE table + efficiency conditions
//! cargo run --release --example fit_counts            # rate fitting + goodness of fit
//! cargo run --release --example monte_carlo_check     # empirical vs theory, z-scores
//! cargo run --release --example optimum_search        # CRN grid searches for alpha and weights
//! ```
//!
//! The same functionality is scriptable through the thin `poismean` binary
//! (`fit`, `pre-table`, `simulate`, `optimize`, `members`); see the README.

pub mod cli;
pub mod error;
pub mod estimators;
pub mod fit;
pub mod model;
pub mod montecarlo;
mod special;
pub mod synth;
pub mod theory;

pub use error::{Error, Result};
