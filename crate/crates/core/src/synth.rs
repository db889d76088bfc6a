//! Synthetic count data: exact Poisson sampling, correlated pair generation
//! by trivariate reduction, finite populations with SRSWOR subsampling, and
//! sample statistics.
//!
//! # Reproducibility
//!
//! Every generator is driven by a [`SeedSpec`]. Record i of a sample reads
//! from stream i of a ChaCha8 cipher keyed by the master seed, so generation
//! can be split across any number of workers without changing the output:
//! the pair at index i depends only on (master_seed, i). Nested structures
//! (e.g. simulation replicates) derive independent child seeds with a
//! SplitMix64-style bijective mix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::GammaTriple;
use crate::special::ln_gamma;

/// Below this many records, generation stays on the calling thread.
const PAR_MIN_RECORDS: usize = 8192;

/// Master seed for a reproducible generation task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeedSpec {
    pub master_seed: u64,
}

/// SplitMix64 finalizer; a bijection on u64.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    /// Cipher keyed by the master seed; callers select a stream per record.
    pub(crate) fn base_rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.master_seed)
    }

    /// Independent child seed for nested structures (one per replicate).
    /// Distinct indices give distinct children because the mix is bijective.
    pub fn child(&self, index: u64) -> SeedSpec {
        SeedSpec {
            master_seed: mix64(self.master_seed ^ mix64(index)),
        }
    }
}

/// One draw from the exact Poisson(λ) law.
///
/// λ < 10 uses inversion by sequential search on the cdf; λ ≥ 10 uses the
/// PTRS transformed-rejection sampler (Hörmann 1993). Both are exact — no
/// normal approximation anywhere.
pub fn poisson_draw<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<u64> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "poisson rate must be finite and >= 0, got {lambda}"
        )));
    }
    Ok(sample_poisson(lambda, rng))
}

/// Internal sampler; assumes a validated rate.
pub(crate) fn sample_poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    if lambda == 0.0 {
        0
    } else if lambda < 10.0 {
        poisson_inversion(lambda, rng)
    } else {
        poisson_ptrs(lambda, rng)
    }
}

/// Inversion by sequential search: walk the cdf until it passes a uniform.
fn poisson_inversion<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut pmf = (-lambda).exp();
    let mut cdf = pmf;
    while u >= cdf {
        k += 1;
        pmf *= lambda / k as f64;
        cdf += pmf;
        // cdf can plateau one ulp below 1 once pmf underflows; the tail mass
        // out here is far below the resolution of u, so stop.
        if k >= 220 {
            break;
        }
    }
    k
}

/// PTRS transformed rejection (Hörmann 1993), valid for λ ≥ 10.
fn poisson_ptrs<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    let log_lambda = lambda.ln();
    let b = 0.931 + 2.53 * lambda.sqrt();
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let v_r = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= v_r {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln()
            <= k * log_lambda - lambda - ln_gamma(k + 1.0)
        {
            return k as u64;
        }
    }
}

/// An ordered collection of (x, y) count pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sample {
    pairs: Vec<(u64, u64)>,
}

impl Sample {
    pub fn new(pairs: Vec<(u64, u64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidArgument(
                "a sample must hold at least one pair".into(),
            ));
        }
        Ok(Self { pairs })
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    pub fn x_values(&self) -> Vec<u64> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn y_values(&self) -> Vec<u64> {
        self.pairs.iter().map(|p| p.1).collect()
    }
}

/// Sample variances and covariance, divisor n − 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondMoments {
    pub s2x: f64,
    pub s2y: f64,
    pub sxy: f64,
}

/// First and (when n ≥ 2) second sample moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleStats {
    pub n: usize,
    pub xbar: f64,
    pub ybar: f64,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    second: Option<SecondMoments>,
}

impl SampleStats {
    pub(crate) fn from_means(n: usize, xbar: f64, ybar: f64) -> Self {
        Self {
            n,
            xbar,
            ybar,
            second: None,
        }
    }

    /// Second moments, or an insufficient-data error when n = 1.
    pub fn second_moments(&self) -> Result<SecondMoments> {
        self.second.ok_or_else(|| {
            Error::InsufficientData(format!(
                "second moments need n >= 2 observations, sample has {}",
                self.n
            ))
        })
    }

    pub fn s2x(&self) -> Result<f64> {
        Ok(self.second_moments()?.s2x)
    }

    pub fn s2y(&self) -> Result<f64> {
        Ok(self.second_moments()?.s2y)
    }

    pub fn sxy(&self) -> Result<f64> {
        Ok(self.second_moments()?.sxy)
    }
}

fn draw_pair(g: &GammaTriple, base: &ChaCha8Rng, index: u64) -> (u64, u64) {
    let mut rng = base.clone();
    rng.set_stream(index);
    let k = sample_poisson(g.gamma1(), &mut rng);
    let w = sample_poisson(g.gamma2(), &mut rng);
    let z = sample_poisson(g.gamma3(), &mut rng);
    (k + z, w + z)
}

fn draw_pairs(g: &GammaTriple, n: usize, seed: SeedSpec) -> Vec<(u64, u64)> {
    let base = seed.base_rng();
    if n >= PAR_MIN_RECORDS {
        (0..n)
            .into_par_iter()
            .map(|i| draw_pair(g, &base, i as u64))
            .collect()
    } else {
        (0..n).map(|i| draw_pair(g, &base, i as u64)).collect()
    }
}

/// n i.i.d. pairs (x, y) = (k + z, w + z) with k ~ Poisson(γ1),
/// w ~ Poisson(γ2), z ~ Poisson(γ3) drawn independently per record.
/// Deterministic in (g, n, seed), independent of worker count.
pub fn draw_bivariate_sample(g: &GammaTriple, n: usize, seed: SeedSpec) -> Result<Sample> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "sample size must be at least 1".into(),
        ));
    }
    Sample::new(draw_pairs(g, n, seed))
}

/// A finite population frame of N i.i.d. trivariate-reduction pairs.
pub fn generate_finite_population(g: &GammaTriple, n_pop: usize, seed: SeedSpec) -> Result<Sample> {
    if n_pop == 0 {
        return Err(Error::InvalidArgument(
            "population size must be at least 1".into(),
        ));
    }
    Sample::new(draw_pairs(g, n_pop, seed))
}

/// Simple random sample without replacement: a uniformly random n-subset of
/// the population, in frame order. Every unit's inclusion probability is n/N.
///
/// Selection sampling (one pass, one uniform integer per unit) on a dedicated
/// stream of the seed, reserved so it never collides with record streams.
pub fn srswor(population: &Sample, n: usize, seed: SeedSpec) -> Result<Sample> {
    let n_pop = population.n();
    if n == 0 {
        return Err(Error::InvalidArgument(
            "sample size must be at least 1".into(),
        ));
    }
    if n > n_pop {
        return Err(Error::InvalidArgument(format!(
            "sample size {n} exceeds population size {n_pop}"
        )));
    }
    let mut rng = seed.base_rng();
    rng.set_stream(u64::MAX);
    let mut picked = Vec::with_capacity(n);
    let mut remaining = n as u64;
    for (i, pair) in population.pairs().iter().enumerate() {
        let left = (n_pop - i) as u64;
        if rng.random_range(0..left) < remaining {
            picked.push(*pair);
            remaining -= 1;
            if remaining == 0 {
                break;
            }
        }
    }
    Sample::new(picked)
}

/// Sample means, plus variances/covariance (divisor n − 1) when n ≥ 2.
pub fn sample_stats(s: &Sample) -> SampleStats {
    let n = s.n();
    let (sum_x, sum_y) = s
        .pairs()
        .iter()
        .fold((0u64, 0u64), |(sx, sy), &(x, y)| (sx + x, sy + y));
    let xbar = sum_x as f64 / n as f64;
    let ybar = sum_y as f64 / n as f64;
    let second = (n >= 2).then(|| {
        let mut sxx = 0.0;
        let mut syy = 0.0;
        let mut sxy = 0.0;
        for &(x, y) in s.pairs() {
            let dx = x as f64 - xbar;
            let dy = y as f64 - ybar;
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
        let denom = (n - 1) as f64;
        SecondMoments {
            s2x: sxx / denom,
            s2y: syy / denom,
            sxy: sxy / denom,
        }
    });
    SampleStats {
        n,
        xbar,
        ybar,
        second,
    }
}

/// Means of a fresh sample without materializing it; draws exactly the same
/// pair sequence as [`draw_bivariate_sample`], so the means agree bit for
/// bit. Used by the Monte Carlo engine, which only needs (x̄, ȳ).
pub fn sample_means(g: &GammaTriple, n: usize, seed: SeedSpec) -> SampleStats {
    assert!(n >= 1, "sample size must be at least 1");
    let base = seed.base_rng();
    let mut sum_x = 0u64;
    let mut sum_y = 0u64;
    for i in 0..n {
        let (x, y) = draw_pair(g, &base, i as u64);
        sum_x += x;
        sum_y += y;
    }
    SampleStats::from_means(n, sum_x as f64 / n as f64, sum_y as f64 / n as f64)
}
