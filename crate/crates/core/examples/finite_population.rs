//! Finite-population mode: materialize a frame of N units, then subsample it
//! by simple random sampling without replacement.
//!
//! The i.i.d. mode (see `draw_sample`) matches the moment bookkeeping used by
//! the theory; the finite frame + SRSWOR mode exists for workflows that start
//! from an enumerated population.

use poismean::model::GammaTriple;
use poismean::synth::{generate_finite_population, sample_stats, srswor, SeedSpec};

fn main() -> poismean::Result<()> {
    let g = GammaTriple::new(4.1813, 8.104, 2.112)?;

    let frame = generate_finite_population(&g, 10_000, SeedSpec::new(77))?;
    let frame_stats = sample_stats(&frame);
    println!(
        "frame: N = {}, xbar = {:.4}, ybar = {:.4}",
        frame_stats.n, frame_stats.xbar, frame_stats.ybar
    );

    // Draw a 20-unit SRSWOR sample from the frame; every unit has inclusion
    // probability 20/10000.
    let sample = srswor(&frame, 20, SeedSpec::new(78))?;
    let stats = sample_stats(&sample);
    println!(
        "srswor n = {}: xbar = {:.3}, ybar = {:.3}",
        stats.n, stats.xbar, stats.ybar
    );

    // A census returns the whole frame (as a multiset).
    let census = srswor(&frame, frame.n(), SeedSpec::new(79))?;
    println!("census size = {}", census.n());

    // Oversampling is rejected.
    match srswor(&frame, frame.n() + 1, SeedSpec::new(80)) {
        Err(e) => println!("oversampling rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
