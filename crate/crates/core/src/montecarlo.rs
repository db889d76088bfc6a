//! Monte Carlo measurement of estimator bias and MSE, and empirical
//! optimization of estimator parameters.
//!
//! Replicate r draws its sample from the child seed (master_seed, r), and
//! aggregation always walks replicates in index order, so a report is
//! bit-identical no matter how many workers ran it. Parameter sweeps reuse
//! one replicate set across all parameter values (common random numbers), so
//! parameter comparisons are not washed out by resampling noise.
//!
//! Replicates on which an estimator is undefined (a Poisson sample can hit
//! x̄ = 0) are counted as failed and excluded rather than imputed; reports
//! carry the count, and the command-line layer refuses quality-gated output
//! when failures exceed 0.1% of the requested replicates.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{evaluate, EstimatorSpec, MemberId};
use crate::model::GammaTriple;
use crate::model::MomentConvention;
use crate::synth::{sample_means, SampleStats, SeedSpec};
use crate::theory;

/// Configuration of one Monte Carlo experiment.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct McConfig {
    pub gammas: GammaTriple,
    /// Sample size per replicate.
    pub n: usize,
    /// Number of replicates.
    pub replicates: usize,
    pub master_seed: u64,
    /// Convention used for the theory columns of the report.
    pub convention: MomentConvention,
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidArgument(
                "replicate sample size must be >= 1".into(),
            ));
        }
        if self.replicates < 2 {
            return Err(Error::InvalidArgument("need at least 2 replicates".into()));
        }
        Ok(())
    }

    fn replicate_stats(&self, r: usize) -> SampleStats {
        sample_means(
            &self.gammas,
            self.n,
            SeedSpec::new(self.master_seed).child(r as u64),
        )
    }

    /// Per-replicate sample means, in replicate order; the shared replicate
    /// set behind every sweep in this module.
    fn all_replicate_stats(&self) -> Vec<SampleStats> {
        (0..self.replicates)
            .into_par_iter()
            .map(|r| self.replicate_stats(r))
            .collect()
    }
}

/// Empirical bias/MSE with Monte Carlo standard errors and standardized
/// deviations from the convention's theory values.
#[derive(Debug, Clone, Serialize)]
pub struct McReport {
    pub estimator: EstimatorSpec,
    pub convention: MomentConvention,
    pub n: usize,
    pub replicates: usize,
    pub used_replicates: usize,
    pub failed_replicates: usize,
    pub emp_bias: f64,
    pub emp_mse: f64,
    pub se_bias: f64,
    pub se_mse: f64,
    pub theory_bias: f64,
    pub theory_mse: f64,
    /// (emp − theory)/se; null when the standard error is zero.
    pub z_bias: Option<f64>,
    pub z_mse: Option<f64>,
}

impl McReport {
    /// Failed replicates stay under 1 per 1000 requested.
    pub fn quality_ok(&self) -> bool {
        (self.failed_replicates as f64) <= 0.001 * self.replicates as f64
    }
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

fn zscore(emp: f64, theory: f64, se: f64) -> Option<f64> {
    (se > 0.0).then(|| (emp - theory) / se)
}

/// Run the experiment: R fresh samples, each evaluated against the true
/// mean Ȳ = λ2 with the true auxiliary mean X̄ = λ1.
pub fn run_mc(cfg: &McConfig, spec: &EstimatorSpec) -> Result<McReport> {
    cfg.validate()?;
    let pop = cfg.gammas.moments();
    let deviations: Vec<Option<f64>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let stats = cfg.replicate_stats(r);
            evaluate(spec, &stats, pop.xbar).ok().map(|t| t - pop.ybar)
        })
        .collect();

    let devs: Vec<f64> = deviations.iter().copied().flatten().collect();
    let failed = cfg.replicates - devs.len();
    if devs.is_empty() {
        return Err(Error::Simulation(format!(
            "all {} replicates failed to evaluate {spec}",
            cfg.replicates
        )));
    }
    let sq: Vec<f64> = devs.iter().map(|d| d * d).collect();
    let (emp_bias, se_bias) = mean_and_se(&devs);
    let (emp_mse, se_mse) = mean_and_se(&sq);
    let theory_bias = theory::theory_bias(spec, &cfg.gammas, cfg.n, cfg.convention)?;
    let theory_mse = theory::theory_mse(spec, &cfg.gammas, cfg.n, cfg.convention)?;
    Ok(McReport {
        estimator: *spec,
        convention: cfg.convention,
        n: cfg.n,
        replicates: cfg.replicates,
        used_replicates: devs.len(),
        failed_replicates: failed,
        emp_bias,
        emp_mse,
        se_bias,
        se_mse,
        theory_bias,
        theory_mse,
        z_bias: zscore(emp_bias, theory_bias, se_bias),
        z_mse: zscore(emp_mse, theory_mse, se_mse),
    })
}

/// An inclusive scalar grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && step.is_finite()) || step <= 0.0 || max < min {
            return Err(Error::InvalidArgument(format!(
                "invalid grid [{min}, {max}] step {step}"
            )));
        }
        Ok(Self { min, max, step })
    }

    pub fn values(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step).round() as usize;
        (0..=count)
            .map(|i| self.min + self.step * i as f64)
            .collect()
    }
}

/// Which one-parameter family a scalar search sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarFamily {
    /// α of the exponential family.
    ExpAlpha,
    /// b of the difference estimator.
    DifferenceB,
}

impl ScalarFamily {
    fn spec(&self, param: f64) -> EstimatorSpec {
        match self {
            ScalarFamily::ExpAlpha => EstimatorSpec::ExpAlpha { alpha: param },
            ScalarFamily::DifferenceB => EstimatorSpec::Difference { b: param },
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridPoint {
    pub param: f64,
    pub emp_mse: f64,
}

/// Result of a common-random-numbers scalar sweep.
#[derive(Debug, Clone, Serialize)]
pub struct ScalarSearch {
    pub family: ScalarFamily,
    pub grid: GridSpec,
    pub best_param: f64,
    pub best_mse: f64,
    pub used_replicates: usize,
    pub failed_replicates: usize,
    pub curve: Vec<GridPoint>,
}

/// Minimize empirical MSE over a scalar grid under common random numbers.
///
/// Replicates on which the family is undefined anywhere (x̄ = 0 for the
/// exponential family) are dropped from the whole sweep so every grid point
/// sees the same replicate set.
pub fn empirical_optimum_scalar(
    cfg: &McConfig,
    family: ScalarFamily,
    grid: &GridSpec,
) -> Result<ScalarSearch> {
    cfg.validate()?;
    let values = grid.values();
    if values.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    let pop = cfg.gammas.moments();
    let all = cfg.all_replicate_stats();
    let kept: Vec<SampleStats> = match family {
        // x̄ = 0 breaks exp-alpha at any α ≠ 0; drop those replicates from
        // the whole sweep, keeping one replicate set across all grid points.
        ScalarFamily::ExpAlpha => all.iter().copied().filter(|s| s.xbar != 0.0).collect(),
        ScalarFamily::DifferenceB => all,
    };
    let failed = cfg.replicates - kept.len();
    if kept.is_empty() {
        return Err(Error::Simulation(
            "all replicates failed for the sweep".into(),
        ));
    }

    let curve: Vec<GridPoint> = values
        .par_iter()
        .map(|&param| {
            let spec = family.spec(param);
            let mut sum = 0.0;
            for stats in &kept {
                let t = evaluate(&spec, stats, pop.xbar)
                    .expect("undefined replicates were filtered out");
                let d = t - pop.ybar;
                sum += d * d;
            }
            GridPoint {
                param,
                emp_mse: sum / kept.len() as f64,
            }
        })
        .collect();

    let best = curve
        .iter()
        .copied()
        .min_by(|a, b| a.emp_mse.total_cmp(&b.emp_mse))
        .expect("non-empty curve");
    Ok(ScalarSearch {
        family,
        grid: *grid,
        best_param: best.param,
        best_mse: best.emp_mse,
        used_replicates: kept.len(),
        failed_replicates: failed,
        curve,
    })
}

/// α minimizing the empirical MSE of the exponential family over the grid.
pub fn empirical_optimum_alpha(cfg: &McConfig, grid: &GridSpec) -> Result<ScalarSearch> {
    empirical_optimum_scalar(cfg, ScalarFamily::ExpAlpha, grid)
}

/// Result of the two-weight grid search around a member's theory optimum.
#[derive(Debug, Clone, Serialize)]
pub struct WeightSearch {
    pub member: MemberId,
    pub alpha: f64,
    pub eta: f64,
    pub theta: f64,
    pub convention: MomentConvention,
    /// Theory optimum (w1*, w2*) under the configured convention.
    pub theory_w1: f64,
    pub theory_w2: f64,
    /// Empirical MSE at the theory optimum (the grid center).
    pub center_mse: f64,
    pub best_w1: f64,
    pub best_w2: f64,
    pub best_mse: f64,
    pub grid_points_per_axis: usize,
    pub half_span_w1: f64,
    pub half_span_w2: f64,
    pub used_replicates: usize,
    pub failed_replicates: usize,
}

/// Span covering the region where the theory MSE roughly doubles along each
/// axis: half-span_i = sqrt(minMSE / H_ii) with H the quadratic-form matrix.
fn default_half_spans(min_mse: f64, quad_a: f64, quad_b: f64) -> (f64, f64) {
    let floor = 1e-6;
    (
        (min_mse / quad_a).sqrt().max(floor),
        (min_mse / quad_b).sqrt().max(floor),
    )
}

/// Minimize empirical MSE over a 41×41 weight grid centered on the theory
/// optimum of the member's parameter choice, under common random numbers.
pub fn empirical_optimum_weights(
    cfg: &McConfig,
    member: MemberId,
    half_spans: Option<(f64, f64)>,
) -> Result<WeightSearch> {
    cfg.validate()?;
    const POINTS: usize = 41;
    let resolved = theory::resolve_member(member, &cfg.gammas, cfg.n, cfg.convention)?;
    let c = resolved.coefficients;
    let (w1_star, w2_star) = theory::optimum_weights(&c)?;
    let min_mse = theory::min_mse_tm(&c)?;
    let (hs1, hs2) =
        half_spans.unwrap_or_else(|| default_half_spans(min_mse.max(1e-12), c.quad_a, c.quad_b));

    let pop = cfg.gammas.moments();
    let all = cfg.all_replicate_stats();
    // Precompute the weight-free core of the member on every replicate; the
    // estimator is then linear in (w1, w2), exactly as `evaluate` computes it.
    let core_spec = EstimatorSpec::General {
        w1: 1.0,
        w2: 0.0,
        alpha: resolved.alpha,
        eta: resolved.member.eta,
        theta: resolved.member.theta,
    };
    let cores: Vec<Option<(f64, f64)>> = all
        .iter()
        .map(|s| {
            evaluate(&core_spec, s, pop.xbar)
                .ok()
                .map(|core| (core, s.xbar))
        })
        .collect();
    let kept: Vec<(f64, f64)> = cores.iter().copied().flatten().collect();
    let failed = cfg.replicates - kept.len();
    if kept.is_empty() {
        return Err(Error::Simulation(
            "all replicates failed for the weight sweep".into(),
        ));
    }

    let mse_at = |w1: f64, w2: f64| -> f64 {
        let mut sum = 0.0;
        for &(core, xbar) in &kept {
            let t = w1 * core + w2 * xbar + (1.0 - w1 - w2) * pop.xbar;
            let d = t - pop.ybar;
            sum += d * d;
        }
        sum / kept.len() as f64
    };

    let axis = |center: f64, half: f64| -> Vec<f64> {
        let step = 2.0 * half / (POINTS - 1) as f64;
        (0..POINTS)
            .map(|i| center - half + step * i as f64)
            .collect()
    };
    let w1_axis = axis(w1_star, hs1);
    let w2_axis = axis(w2_star, hs2);
    let grid: Vec<(f64, f64, f64)> = w1_axis
        .par_iter()
        .flat_map_iter(|&w1| w2_axis.iter().map(move |&w2| (w1, w2)))
        .map(|(w1, w2)| (w1, w2, mse_at(w1, w2)))
        .collect();
    let &(best_w1, best_w2, best_mse) = grid
        .iter()
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .expect("non-empty grid");

    Ok(WeightSearch {
        member,
        alpha: resolved.alpha,
        eta: resolved.member.eta,
        theta: resolved.member.theta,
        convention: cfg.convention,
        theory_w1: w1_star,
        theory_w2: w2_star,
        center_mse: mse_at(w1_star, w2_star),
        best_w1,
        best_w2,
        best_mse,
        grid_points_per_axis: POINTS,
        half_span_w1: hs1,
        half_span_w2: hs2,
        used_replicates: kept.len(),
        failed_replicates: failed,
    })
}
