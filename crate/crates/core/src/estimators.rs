//! Point estimators of the population mean Ȳ that exploit a known auxiliary
//! mean X̄.
//!
//! All estimators are functions of the sample means (x̄, ȳ) only. The
//! `General` family
//!
//! ```text
//! t = w1·ȳ·(X̄/x̄)^α·exp(η(X̄ − x̄) / (η(X̄ + x̄) + 2θ)) + w2·x̄ + (1 − w1 − w2)·X̄
//! ```
//!
//! nests every other family here for suitable parameter choices, and the
//! named members m1–m7 and q1–q9 are its catalogued specializations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::PopulationMoments;
use crate::synth::SampleStats;

/// An estimator family together with its free parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum EstimatorSpec {
    /// The plain sample mean ȳ.
    #[serde(rename = "mean")]
    MeanOnly,
    /// Classical ratio estimator ȳ·X̄/x̄.
    Ratio,
    /// Product estimator ȳ·x̄/X̄.
    Product,
    /// Exponential ratio estimator ȳ·exp((X̄ − x̄)/(X̄ + x̄)).
    ExpRatio,
    /// Exponential product estimator ȳ·exp((x̄ − X̄)/(x̄ + X̄)).
    ExpProduct,
    /// Exponential family ȳ·exp(α(X̄ − x̄)/(X̄ + x̄)); α = 0, 1, −1 recover
    /// the mean, exponential ratio, and exponential product estimators.
    ExpAlpha { alpha: f64 },
    /// Difference (regression-type) estimator ȳ + b(X̄ − x̄).
    Difference { b: f64 },
    /// The full generalized family; see the module docs for the formula.
    General {
        w1: f64,
        w2: f64,
        alpha: f64,
        eta: f64,
        theta: f64,
    },
}

impl std::fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EstimatorSpec::MeanOnly => write!(f, "mean"),
            EstimatorSpec::Ratio => write!(f, "ratio"),
            EstimatorSpec::Product => write!(f, "product"),
            EstimatorSpec::ExpRatio => write!(f, "exp-ratio"),
            EstimatorSpec::ExpProduct => write!(f, "exp-product"),
            EstimatorSpec::ExpAlpha { alpha } => write!(f, "exp-alpha(alpha={alpha})"),
            EstimatorSpec::Difference { b } => write!(f, "difference(b={b})"),
            EstimatorSpec::General {
                w1,
                w2,
                alpha,
                eta,
                theta,
            } => {
                write!(
                    f,
                    "general(w1={w1}, w2={w2}, alpha={alpha}, eta={eta}, theta={theta})"
                )
            }
        }
    }
}

fn require_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "estimator parameter {name} = {v} is not finite"
        )))
    }
}

/// Evaluate the estimator on sample statistics, given the known auxiliary
/// population mean `xbar_pop`.
///
/// Estimators carrying an auxiliary ratio term are undefined on samples with
/// x̄ = 0; those return a singular-denominator error naming the term, so a
/// simulation layer can count the replicate as failed instead of letting an
/// infinity leak into its aggregates.
pub fn evaluate(spec: &EstimatorSpec, stats: &SampleStats, xbar_pop: f64) -> Result<f64> {
    if !(xbar_pop.is_finite() && xbar_pop > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "auxiliary population mean must be finite and positive, got {xbar_pop}"
        )));
    }
    let xb = xbar_pop;
    let (xbar, ybar) = (stats.xbar, stats.ybar);
    match *spec {
        EstimatorSpec::MeanOnly => Ok(ybar),
        EstimatorSpec::Ratio => {
            if xbar == 0.0 {
                return Err(Error::SingularDenominator {
                    term: "ratio term Xbar/xbar (sample mean of x is 0)".into(),
                });
            }
            Ok(ybar * (xb / xbar))
        }
        EstimatorSpec::Product => Ok(ybar * (xbar / xb)),
        EstimatorSpec::ExpRatio => exp_alpha_value(1.0, xbar, ybar, xb),
        EstimatorSpec::ExpProduct => exp_alpha_value(-1.0, xbar, ybar, xb),
        EstimatorSpec::ExpAlpha { alpha } => {
            require_finite("alpha", alpha)?;
            exp_alpha_value(alpha, xbar, ybar, xb)
        }
        EstimatorSpec::Difference { b } => {
            require_finite("b", b)?;
            Ok(ybar + b * (xb - xbar))
        }
        EstimatorSpec::General {
            w1,
            w2,
            alpha,
            eta,
            theta,
        } => {
            for (name, v) in [
                ("w1", w1),
                ("w2", w2),
                ("alpha", alpha),
                ("eta", eta),
                ("theta", theta),
            ] {
                require_finite(name, v)?;
            }
            let core = general_core(alpha, eta, theta, xbar, ybar, xb)?;
            Ok(w1 * core + w2 * xbar + (1.0 - w1 - w2) * xb)
        }
    }
}

fn exp_alpha_value(alpha: f64, xbar: f64, ybar: f64, xb: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Ok(ybar);
    }
    if xbar == 0.0 {
        return Err(Error::SingularDenominator {
            term: format!("exp-alpha factor exp({alpha}(Xbar - xbar)/(Xbar + xbar)) on a sample with xbar = 0"),
        });
    }
    Ok(ybar * (alpha * (xb - xbar) / (xb + xbar)).exp())
}

/// The w1-multiplied core ȳ·(X̄/x̄)^α·exp(η(X̄ − x̄)/(η(X̄ + x̄) + 2θ)).
///
/// With η = 0 the exponential factor is identically 1 and the quotient is
/// never formed, so θ is unconstrained there.
pub(crate) fn general_core(
    alpha: f64,
    eta: f64,
    theta: f64,
    xbar: f64,
    ybar: f64,
    xb: f64,
) -> Result<f64> {
    let power = if alpha == 0.0 {
        1.0
    } else {
        if xbar == 0.0 {
            return Err(Error::SingularDenominator {
                term: format!("power term (Xbar/xbar)^{alpha} on a sample with xbar = 0"),
            });
        }
        (xb / xbar).powf(alpha)
    };
    let expf = if eta == 0.0 {
        1.0
    } else {
        let denom = eta * (xb + xbar) + 2.0 * theta;
        if denom == 0.0 {
            return Err(Error::SingularDenominator {
                term: format!(
                    "exponential term eta(Xbar + xbar) + 2 theta = 0 (eta = {eta}, theta = {theta})"
                ),
            });
        }
        (eta * (xb - xbar) / denom).exp()
    };
    Ok(ybar * power * expf)
}

/// Identifier of a catalogued member of the generalized family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MemberId {
    M1,
    M2,
    M3,
    M4,
    M5,
    M6,
    M7,
    Q1,
    Q2,
    Q3,
    Q4,
    Q5,
    Q6,
    Q7,
    Q8,
    Q9,
}

impl MemberId {
    pub const ALL: [MemberId; 16] = [
        MemberId::M1,
        MemberId::M2,
        MemberId::M3,
        MemberId::M4,
        MemberId::M5,
        MemberId::M6,
        MemberId::M7,
        MemberId::Q1,
        MemberId::Q2,
        MemberId::Q3,
        MemberId::Q4,
        MemberId::Q5,
        MemberId::Q6,
        MemberId::Q7,
        MemberId::Q8,
        MemberId::Q9,
    ];
}

impl std::fmt::Display for MemberId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", format!("{self:?}").to_lowercase())
    }
}

impl std::str::FromStr for MemberId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lowered = s.to_ascii_lowercase();
        MemberId::ALL
            .into_iter()
            .find(|id| id.to_string() == lowered)
            .ok_or_else(|| Error::UnknownMember(s.into()))
    }
}

/// A parameter position that is either pinned to a value or left to the
/// optimizer. Serializes as the number, or null when free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slot {
    Fixed(f64),
    Free,
}

impl Slot {
    pub fn fixed(&self) -> Option<f64> {
        match self {
            Slot::Fixed(v) => Some(*v),
            Slot::Free => None,
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, Slot::Free)
    }
}

impl serde::Serialize for Slot {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Slot::Fixed(v) => s.serialize_f64(*v),
            Slot::Free => s.serialize_none(),
        }
    }
}

/// A catalogued member with η and θ already substituted from the population
/// (ρ and X̄ where the catalogue calls for them). `w1` stays free for the
/// members whose defining form carries a leading weight; `alpha` stays free
/// only for m3. Free slots are filled by the theory layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MemberSpec {
    pub id: MemberId,
    pub w1: Slot,
    pub w2: f64,
    pub alpha: Slot,
    pub eta: f64,
    pub theta: f64,
}

/// Resolve a member id against the population moments.
///
/// Note m5 keeps its leading weight free: its defining form carries a w1
/// multiplier even though one catalogue column pins it to 1; the form wins.
pub fn resolve_named_member(id: MemberId, pop: &PopulationMoments) -> MemberSpec {
    use MemberId::*;
    use Slot::{Fixed, Free};
    let (w1, alpha, eta, theta) = match id {
        M1 => (Fixed(1.0), Fixed(0.0), 0.0, 1.0),
        M2 => (Fixed(1.0), Fixed(1.0), 0.0, 1.0),
        M3 => (Fixed(1.0), Free, 0.0, 1.0),
        M4 => (Fixed(1.0), Fixed(-1.0), 0.0, 1.0),
        M5 => (Free, Fixed(1.0), 0.0, 1.0),
        M6 => (Free, Fixed(-1.0), 0.0, 1.0),
        M7 => (Free, Fixed(0.0), 0.0, 1.0),
        Q1 => (Free, Fixed(1.0), 1.0, 1.0),
        Q2 => (Free, Fixed(1.0), 1.0, pop.rho),
        Q3 => (Free, Fixed(1.0), 1.0, pop.xbar),
        Q4 => (Free, Fixed(1.0), 1.0, 0.0),
        Q5 => (Free, Fixed(-1.0), 1.0, 1.0),
        Q6 => (Free, Fixed(1.0), pop.xbar, pop.rho),
        Q7 => (Free, Fixed(0.0), pop.xbar, pop.rho),
        Q8 => (Free, Fixed(1.0), pop.rho, pop.xbar),
        Q9 => (Free, Fixed(-1.0), pop.rho, pop.xbar),
    };
    MemberSpec {
        id,
        w1,
        w2: 0.0,
        alpha,
        eta,
        theta,
    }
}
