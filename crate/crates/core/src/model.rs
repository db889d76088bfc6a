//! Bivariate Poisson population model built by trivariate reduction.
//!
//! A correlated count pair (x, y) is constructed from three independent
//! Poisson components k ~ Poisson(γ1), w ~ Poisson(γ2), z ~ Poisson(γ3) as
//!
//! ```text
//! x = k + z,    y = w + z
//! ```
//!
//! so the marginals are Poisson(λ1 = γ1 + γ3) and Poisson(λ2 = γ2 + γ3),
//! the covariance is Cov(x, y) = γ3, and the correlation is never negative.
//! Everything downstream (estimator theory, simulation, fitting) is
//! parameterized by the latent rate triple.

use serde::Serialize;

use crate::error::{Error, Result};

/// Latent component rates (γ1, γ2, γ3) of the trivariate-reduction model.
///
/// Invariants enforced at construction: all rates finite and ≥ 0, and both
/// marginal rates γ1 + γ3 and γ2 + γ3 strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaTriple {
    gamma1: f64,
    gamma2: f64,
    gamma3: f64,
}

impl GammaTriple {
    pub fn new(gamma1: f64, gamma2: f64, gamma3: f64) -> Result<Self> {
        for (name, v) in [("gamma1", gamma1), ("gamma2", gamma2), ("gamma3", gamma3)] {
            if !v.is_finite() {
                return Err(Error::InvalidRates(format!("{name} = {v} is not finite")));
            }
            if v < 0.0 {
                return Err(Error::InvalidRates(format!("{name} = {v} is negative")));
            }
        }
        if gamma1 + gamma3 <= 0.0 {
            return Err(Error::InvalidRates(
                "gamma1 + gamma3 must be > 0 (x marginal is degenerate)".into(),
            ));
        }
        if gamma2 + gamma3 <= 0.0 {
            return Err(Error::InvalidRates(
                "gamma2 + gamma3 must be > 0 (y marginal is degenerate)".into(),
            ));
        }
        Ok(Self {
            gamma1,
            gamma2,
            gamma3,
        })
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    pub fn gamma3(&self) -> f64 {
        self.gamma3
    }

    /// Marginal rate of x, λ1 = γ1 + γ3.
    pub fn lambda1(&self) -> f64 {
        self.gamma1 + self.gamma3
    }

    /// Marginal rate of y, λ2 = γ2 + γ3.
    pub fn lambda2(&self) -> f64 {
        self.gamma2 + self.gamma3
    }

    pub fn moments(&self) -> PopulationMoments {
        moments_from_gammas(self)
    }
}

/// Closed-form population quantities of the pair (x, y).
///
/// For a Poisson(λ) marginal the mean and variance are both λ, the
/// coefficient of variation is 1/√λ, the skewness is 1/√λ, and the kurtosis
/// is 3 + 1/λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PopulationMoments {
    /// Mean and variance of x (= γ1 + γ3).
    pub lambda1: f64,
    /// Mean and variance of y (= γ2 + γ3).
    pub lambda2: f64,
    /// Population mean of x (= λ1).
    pub xbar: f64,
    /// Population mean of y (= λ2).
    pub ybar: f64,
    /// Cov(x, y) (= γ3).
    pub cov_xy: f64,
    /// Correlation γ3 / √(λ1 λ2); zero iff γ3 = 0, one iff γ1 = γ2 = 0.
    pub rho: f64,
    /// Coefficient of variation of x (= 1/√λ1).
    pub cx: f64,
    /// Coefficient of variation of y (= 1/√λ2).
    pub cy: f64,
    /// Skewness of x (= 1/√λ1).
    pub skew_x: f64,
    /// Kurtosis of x (= 3 + 1/λ1).
    pub kurt_x: f64,
}

/// Which set of relative moments drives the first-order theory.
///
/// The two modes disagree on the scale of E(e0²), E(e1²), E(e0·e1), where
/// e0 = (ȳ − Ȳ)/Ȳ and e1 = (x̄ − X̄)/X̄ are the relative errors of the sample
/// means:
///
/// * [`AsPrinted`](MomentConvention::AsPrinted) uses E(e0²) = λ2/n,
///   E(e1²) = λ1/n, E(e0e1) = γ3/n. This is the bookkeeping used by the
///   originally published derivations, and reproduces their closed forms
///   verbatim.
/// * [`Corrected`](MomentConvention::Corrected) uses the self-consistent
///   values implied by the definitions of e0 and e1 for sample means of
///   i.i.d. Poisson pairs: E(e0²) = 1/(nλ2), E(e1²) = 1/(nλ1),
///   E(e0e1) = γ3/(nλ1λ2).
///
/// Both are kept so simulation can arbitrate empirically; see the
/// `montecarlo` module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentConvention {
    AsPrinted,
    Corrected,
}

impl MomentConvention {
    pub const ALL: [MomentConvention; 2] =
        [MomentConvention::AsPrinted, MomentConvention::Corrected];

    pub fn label(&self) -> &'static str {
        match self {
            MomentConvention::AsPrinted => "as-printed",
            MomentConvention::Corrected => "corrected",
        }
    }
}

impl std::str::FromStr for MomentConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as-printed" | "as_printed" | "asprinted" => Ok(MomentConvention::AsPrinted),
            "corrected" => Ok(MomentConvention::Corrected),
            other => Err(Error::InvalidArgument(format!(
                "unknown convention {other:?} (expected \"as-printed\" or \"corrected\")"
            ))),
        }
    }
}

impl std::fmt::Display for MomentConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Second-order relative moments of the sample means at sample size n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeMoments {
    /// E(e0²).
    pub e00: f64,
    /// E(e1²).
    pub e11: f64,
    /// E(e0·e1).
    pub e01: f64,
    /// Sample size the moments are scaled to.
    pub n: usize,
}

/// Population moments from the latent rates; pure arithmetic.
pub fn moments_from_gammas(g: &GammaTriple) -> PopulationMoments {
    let lambda1 = g.lambda1();
    let lambda2 = g.lambda2();
    let rho = g.gamma3 / (lambda1 * lambda2).sqrt();
    PopulationMoments {
        lambda1,
        lambda2,
        xbar: lambda1,
        ybar: lambda2,
        cov_xy: g.gamma3,
        rho,
        cx: 1.0 / lambda1.sqrt(),
        cy: 1.0 / lambda2.sqrt(),
        skew_x: 1.0 / lambda1.sqrt(),
        kurt_x: 3.0 + 1.0 / lambda1,
    }
}

/// Inverse of [`moments_from_gammas`]: recover (γ1, γ2, γ3) from the two
/// marginal rates and the covariance.
///
/// Feasibility requires 0 ≤ cov ≤ min(λ1, λ2); the returned triple is
/// (λ1 − cov, λ2 − cov, cov).
pub fn gammas_from_moments(lambda1: f64, lambda2: f64, cov: f64) -> Result<GammaTriple> {
    for (name, v) in [("lambda1", lambda1), ("lambda2", lambda2), ("cov", cov)] {
        if !v.is_finite() {
            return Err(Error::InfeasibleMoments(format!(
                "{name} = {v} is not finite"
            )));
        }
    }
    if lambda1 <= 0.0 || lambda2 <= 0.0 {
        return Err(Error::InfeasibleMoments(format!(
            "marginal rates must be positive (lambda1 = {lambda1}, lambda2 = {lambda2})"
        )));
    }
    if cov < 0.0 {
        return Err(Error::InfeasibleMoments(format!(
            "cov = {cov} violates cov >= 0 (this construction cannot produce negative correlation)"
        )));
    }
    let min_lambda = lambda1.min(lambda2);
    if cov > min_lambda {
        return Err(Error::InfeasibleMoments(format!(
            "cov = {cov} violates cov <= min(lambda1, lambda2) = {min_lambda}"
        )));
    }
    GammaTriple::new(lambda1 - cov, lambda2 - cov, cov)
}

/// Relative moments of the sample means at sample size `n` under the chosen
/// convention.
///
/// Panics if `n == 0`.
pub fn relative_moments(g: &GammaTriple, n: usize, conv: MomentConvention) -> RelativeMoments {
    assert!(n >= 1, "sample size must be at least 1");
    let nf = n as f64;
    let lambda1 = g.lambda1();
    let lambda2 = g.lambda2();
    let (e00, e11, e01) = match conv {
        MomentConvention::AsPrinted => (lambda2 / nf, lambda1 / nf, g.gamma3 / nf),
        MomentConvention::Corrected => (
            1.0 / (nf * lambda2),
            1.0 / (nf * lambda1),
            g.gamma3 / (nf * (lambda1 * lambda2)),
        ),
    };
    debug_assert!(e01 * e01 <= e00 * e11 * (1.0 + 1e-12));
    RelativeMoments { e00, e11, e01, n }
}
