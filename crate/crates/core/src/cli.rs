//! Command-line surface: `fit`, `pre-table`, `simulate`, `optimize`, and
//! `members`.
//!
//! Reports go to stdout as a single JSON document or as TSV (header row plus
//! data rows); diagnostics go to stderr. Exit codes: 0 success, 2 input or
//! validation error, 3 simulation-quality failure (more than 0.1% of
//! replicates failed to evaluate).
//!
//! # CSV schema (`fit`)
//!
//! Two comma-separated nonnegative integer columns `x,y` per line, UTF-8.
//! An optional first line `x,y` is treated as a header; blank lines are
//! ignored. Column x is the auxiliary count, column y the study count. The
//! fitted covariance uses divisor n − 1.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{resolve_named_member, EstimatorSpec, MemberId};
use crate::fit::{fit_gammas, poisson_gof, FittedGammas, GofReport};
use crate::model::{GammaTriple, MomentConvention};
use crate::montecarlo::{
    empirical_optimum_scalar, empirical_optimum_weights, run_mc, GridSpec, McConfig, McReport,
    ScalarFamily, ScalarSearch, WeightSearch,
};
use crate::synth::Sample;
use crate::theory::{self, EfficiencyReport, TheoryReport};

#[derive(Debug, Parser)]
#[command(
    name = "poismean",
    version,
    about = "Population-mean estimators for correlated Poisson count data",
    long_about = "Fits the latent-rate model to paired count data, prints first-order \
bias/MSE/PRE theory under both moment conventions, and validates the theory by Monte Carlo \
simulation. PRE is 100*Var(mean)/MSE; values above 100 beat the plain sample mean."
)]
pub struct Cli {
    /// Output format for the report on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for simulation commands (default: all cores). Output
    /// is byte-identical for any thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Convention {
    /// Moment bookkeeping that reproduces the originally published closed
    /// forms verbatim.
    AsPrinted,
    /// Self-consistent relative moments of i.i.d. Poisson sample means.
    Corrected,
}

impl From<Convention> for MomentConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::AsPrinted => MomentConvention::AsPrinted,
            Convention::Corrected => MomentConvention::Corrected,
        }
    }
}

#[derive(Debug, Args)]
struct GammaArgs {
    /// Rate of the latent component entering x only.
    #[arg(long)]
    gamma1: f64,
    /// Rate of the latent component entering y only.
    #[arg(long)]
    gamma2: f64,
    /// Rate of the shared component (the covariance of x and y).
    #[arg(long)]
    gamma3: f64,
}

impl GammaArgs {
    fn triple(&self) -> Result<GammaTriple> {
        GammaTriple::new(self.gamma1, self.gamma2, self.gamma3)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the latent rates to a two-column count CSV and test each
    /// marginal's Poisson fit.
    Fit {
        /// Path to the CSV file (schema: `x,y` integer counts per line).
        csv: PathBuf,
        /// Clamp infeasible (negative) fitted components to 0 with a warning
        /// instead of failing.
        #[arg(long)]
        clamp: bool,
    },
    /// Print bias, MSE, and percent relative efficiency for every estimator,
    /// plus the efficiency-ordering conditions.
    PreTable {
        #[command(flatten)]
        gammas: GammaArgs,
        /// Sample size the theory is scaled to.
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        convention: Convention,
    },
    /// Monte Carlo bias/MSE of one estimator, with z-scores against the
    /// chosen convention's theory.
    Simulate {
        #[command(flatten)]
        gammas: GammaArgs,
        /// Sample size per replicate.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        replicates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        convention: Convention,
        /// mean | ratio | product | exp-ratio | exp-product | exp-alpha |
        /// difference | general | member:<id>
        #[arg(long)]
        estimator: String,
        /// Estimator parameters as key=value, comma-separated or repeated
        /// (alpha=, b=, w1=, w2=, eta=, theta=).
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
    },
    /// Empirically optimize an estimator parameter under common random
    /// numbers and print it next to both conventions' closed-form optima.
    Optimize {
        #[command(flatten)]
        gammas: GammaArgs,
        /// alpha | b | weights
        #[arg(long)]
        family: String,
        /// Member id for the weights family (e.g. q4).
        #[arg(long)]
        member: Option<String>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        replicates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        convention: Convention,
        /// Grid lower bound (defaults: alpha 0, b 0).
        #[arg(long)]
        grid_min: Option<f64>,
        /// Grid upper bound (defaults: alpha 1, b 1.5).
        #[arg(long)]
        grid_max: Option<f64>,
        /// Grid step (default 0.01).
        #[arg(long)]
        grid_step: Option<f64>,
        /// Half-width of the w1 grid (weights family; default adapts to the
        /// theory MSE surface).
        #[arg(long)]
        span1: Option<f64>,
        /// Half-width of the w2 grid (weights family).
        #[arg(long)]
        span2: Option<f64>,
    },
    /// List the sixteen catalogued members of the generalized family with
    /// their resolved parameters.
    Members {
        #[command(flatten)]
        gammas: GammaArgs,
    },
}

/// Parse arguments, execute, and return the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let format = cli.format;
    let body = move || dispatch(cli.command, format);
    match cli.threads {
        Some(t) if t > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("cannot build thread pool: {e}")))?;
            pool.install(body)
        }
        _ => body(),
    }
}

fn dispatch(command: Command, format: Format) -> Result<i32> {
    match command {
        Command::Fit { csv, clamp } => cmd_fit(&csv, clamp, format),
        Command::PreTable {
            gammas,
            n,
            convention,
        } => cmd_pre_table(&gammas.triple()?, n, convention.into(), format),
        Command::Simulate {
            gammas,
            n,
            replicates,
            seed,
            convention,
            estimator,
            params,
        } => cmd_simulate(
            &gammas.triple()?,
            n,
            replicates,
            seed,
            convention.into(),
            &estimator,
            &params,
            format,
        ),
        Command::Optimize {
            gammas,
            family,
            member,
            n,
            replicates,
            seed,
            convention,
            grid_min,
            grid_max,
            grid_step,
            span1,
            span2,
        } => cmd_optimize(
            &gammas.triple()?,
            &family,
            member.as_deref(),
            n,
            replicates,
            seed,
            convention.into(),
            (grid_min, grid_max, grid_step),
            (span1, span2),
            format,
        ),
        Command::Members { gammas } => cmd_members(&gammas.triple()?, format),
    }
}

// ---------------------------------------------------------------------------
// fit

/// Read the two-column count CSV described in the module docs.
pub fn read_counts_csv(path: &Path) -> Result<Sample> {
    let content = std::fs::read_to_string(path)?;
    let mut pairs = Vec::new();
    let mut saw_data_or_header = false;
    for (idx, raw) in content.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if !saw_data_or_header && is_header(line) {
            saw_data_or_header = true;
            continue;
        }
        saw_data_or_header = true;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(Error::CsvParse {
                line: line_no,
                message: format!("expected 2 comma-separated columns, found {}", fields.len()),
            });
        }
        let mut parsed = [0u64; 2];
        for (slot, (name, field)) in parsed.iter_mut().zip([("x", fields[0]), ("y", fields[1])]) {
            *slot = field.trim().parse::<u64>().map_err(|_| Error::CsvParse {
                line: line_no,
                message: format!(
                    "column {name}: expected a nonnegative integer count, got {:?}",
                    field.trim()
                ),
            })?;
        }
        pairs.push((parsed[0], parsed[1]));
    }
    if pairs.is_empty() {
        return Err(Error::CsvParse {
            line: 1,
            message: "file contains no data rows".into(),
        });
    }
    Sample::new(pairs)
}

fn is_header(line: &str) -> bool {
    let cols: Vec<String> = line
        .split(',')
        .map(|c| c.trim().to_ascii_lowercase())
        .collect();
    cols == ["x", "y"]
}

#[derive(Debug, Serialize)]
struct FitOutput {
    #[serde(flatten)]
    fitted: FittedGammas,
    /// Poisson goodness of fit of the x marginal; null when the sample is
    /// too small for a binned test.
    gof_x: Option<GofReport>,
    gof_y: Option<GofReport>,
}

fn cmd_fit(csv: &Path, clamp: bool, format: Format) -> Result<i32> {
    let sample = read_counts_csv(csv)?;
    let mut fitted = fit_gammas(&sample, clamp)?;
    let mut gof = |values: Vec<u64>, axis: &str| match poisson_gof(&values) {
        Ok(r) => Some(r),
        Err(e) => {
            fitted
                .warnings
                .push(format!("goodness-of-fit skipped for {axis}: {e}"));
            None
        }
    };
    let gof_x = gof(sample.x_values(), "x");
    let gof_y = gof(sample.y_values(), "y");
    let out = FitOutput {
        fitted,
        gof_x,
        gof_y,
    };
    match format {
        Format::Json => print_json(&out),
        Format::Tsv => {
            let g = out.fitted.gammas;
            let gof_cols = |r: &Option<GofReport>| match r {
                Some(r) => {
                    vec![
                        r.lambda_hat.to_string(),
                        r.chi2.to_string(),
                        r.df.to_string(),
                        r.pvalue.to_string(),
                    ]
                }
                None => vec![String::new(); 4],
            };
            let mut row = vec![
                g.gamma1().to_string(),
                g.gamma2().to_string(),
                g.gamma3().to_string(),
                out.fitted.lambda1.to_string(),
                out.fitted.lambda2.to_string(),
                out.fitted.rho.to_string(),
            ];
            row.extend(gof_cols(&out.gof_x));
            row.extend(gof_cols(&out.gof_y));
            row.push(out.fitted.warnings.join("; "));
            println!(
                "gamma1\tgamma2\tgamma3\tlambda1\tlambda2\trho\tgof_x_lambda\tgof_x_chi2\tgof_x_df\tgof_x_pvalue\tgof_y_lambda\tgof_y_chi2\tgof_y_df\tgof_y_pvalue\twarnings"
            );
            println!("{}", row.join("\t"));
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// pre-table

#[derive(Debug, Serialize)]
struct PreTableOutput {
    theory: TheoryReport,
    efficiency: EfficiencyReport,
}

fn cmd_pre_table(g: &GammaTriple, n: usize, conv: MomentConvention, format: Format) -> Result<i32> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let out = PreTableOutput {
        theory: theory::pre_table(g, n, conv)?,
        efficiency: theory::efficiency_report(g, n, conv),
    };
    match format {
        Format::Json => print_json(&out),
        Format::Tsv => {
            println!("row_type\tlabel\tbias\tmse\tpre\treported_pre\tlhs\trhs\tholds\tnote");
            for r in &out.theory.rows {
                println!(
                    "estimator\t{}\t{}\t{}\t{}\t{}\t\t\t\t{}",
                    r.label,
                    r.bias,
                    r.mse,
                    r.pre,
                    r.reported_pre.map(|v| v.to_string()).unwrap_or_default(),
                    r.note.as_deref().unwrap_or(""),
                );
            }
            for c in &out.efficiency.conditions {
                println!(
                    "condition\t{}\t\t\t\t\t{}\t{}\t{}\t{}",
                    c.id,
                    c.lhs,
                    c.rhs,
                    c.holds,
                    c.note.as_deref().unwrap_or(""),
                );
            }
            if let Some(note) = &out.theory.as_printed_note {
                println!("note\tgeneral-opt\t\t\t\t\t\t\t\t{note}");
            }
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// simulate

fn parse_params(list: &[String]) -> Result<HashMap<String, f64>> {
    let mut map = HashMap::new();
    for entry in list {
        let entry = entry.trim();
        if entry.is_empty() {
            continue;
        }
        let (key, value) = entry.split_once('=').ok_or_else(|| {
            Error::InvalidArgument(format!("parameter {entry:?} is not of the form key=value"))
        })?;
        let parsed: f64 = value.trim().parse().map_err(|_| {
            Error::InvalidArgument(format!("parameter {key} has non-numeric value {value:?}"))
        })?;
        map.insert(key.trim().to_string(), parsed);
    }
    Ok(map)
}

fn build_estimator(
    name: &str,
    params: &HashMap<String, f64>,
    g: &GammaTriple,
    n: usize,
    conv: MomentConvention,
) -> Result<EstimatorSpec> {
    let get = |key: &str| {
        params.get(key).copied().ok_or_else(|| {
            Error::InvalidArgument(format!("estimator {name} requires --params {key}=<value>"))
        })
    };
    let allow = |keys: &[&str]| -> Result<()> {
        for k in params.keys() {
            if !keys.contains(&k.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "unknown parameter {k:?} for estimator {name}"
                )));
            }
        }
        Ok(())
    };
    if let Some(id) = name.strip_prefix("member:") {
        allow(&[])?;
        let member: MemberId = id.parse()?;
        return Ok(theory::resolve_member(member, g, n, conv)?.spec);
    }
    match name {
        "mean" => {
            allow(&[])?;
            Ok(EstimatorSpec::MeanOnly)
        }
        "ratio" => {
            allow(&[])?;
            Ok(EstimatorSpec::Ratio)
        }
        "product" => {
            allow(&[])?;
            Ok(EstimatorSpec::Product)
        }
        "exp-ratio" => {
            allow(&[])?;
            Ok(EstimatorSpec::ExpRatio)
        }
        "exp-product" => {
            allow(&[])?;
            Ok(EstimatorSpec::ExpProduct)
        }
        "exp-alpha" => {
            allow(&["alpha"])?;
            Ok(EstimatorSpec::ExpAlpha {
                alpha: get("alpha")?,
            })
        }
        "difference" => {
            allow(&["b"])?;
            Ok(EstimatorSpec::Difference { b: get("b")? })
        }
        "general" => {
            allow(&["w1", "w2", "alpha", "eta", "theta"])?;
            Ok(EstimatorSpec::General {
                w1: get("w1")?,
                w2: get("w2")?,
                alpha: get("alpha")?,
                eta: get("eta")?,
                theta: get("theta")?,
            })
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown estimator {other:?} (expected mean, ratio, product, exp-ratio, exp-product, \
             exp-alpha, difference, general, or member:<id>)"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    g: &GammaTriple,
    n: usize,
    replicates: usize,
    seed: u64,
    conv: MomentConvention,
    estimator: &str,
    params: &[String],
    format: Format,
) -> Result<i32> {
    let spec = build_estimator(estimator, &parse_params(params)?, g, n, conv)?;
    let cfg = McConfig {
        gammas: *g,
        n,
        replicates,
        master_seed: seed,
        convention: conv,
    };
    let report = run_mc(&cfg, &spec)?;
    if !report.quality_ok() {
        eprintln!(
            "simulation quality failure: {} of {} replicates failed to evaluate (limit is 0.1%); \
             refusing to report bias/MSE",
            report.failed_replicates, report.replicates
        );
        return Ok(3);
    }
    print_mc_report(&report, format);
    Ok(0)
}

fn print_mc_report(report: &McReport, format: Format) {
    match format {
        Format::Json => print_json(report),
        Format::Tsv => {
            println!(
                "estimator\tconvention\tn\treplicates\tused\tfailed\temp_bias\tse_bias\temp_mse\tse_mse\ttheory_bias\ttheory_mse\tz_bias\tz_mse"
            );
            println!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                report.estimator,
                report.convention,
                report.n,
                report.replicates,
                report.used_replicates,
                report.failed_replicates,
                report.emp_bias,
                report.se_bias,
                report.emp_mse,
                report.se_mse,
                report.theory_bias,
                report.theory_mse,
                report.z_bias.map(|z| z.to_string()).unwrap_or_default(),
                report.z_mse.map(|z| z.to_string()).unwrap_or_default(),
            );
        }
    }
}

// ---------------------------------------------------------------------------
// optimize

#[derive(Debug, Serialize)]
struct ScalarOptimizeOutput {
    convention: MomentConvention,
    n: usize,
    replicates: usize,
    seed: u64,
    #[serde(flatten)]
    search: ScalarSearch,
    theory_as_printed: f64,
    theory_corrected: f64,
}

#[derive(Debug, Serialize)]
struct WeightsOptimizeOutput {
    n: usize,
    replicates: usize,
    seed: u64,
    #[serde(flatten)]
    search: WeightSearch,
    theory_as_printed_w1: f64,
    theory_as_printed_w2: f64,
    theory_corrected_w1: f64,
    theory_corrected_w2: f64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    g: &GammaTriple,
    family: &str,
    member: Option<&str>,
    n: usize,
    replicates: usize,
    seed: u64,
    conv: MomentConvention,
    grid: (Option<f64>, Option<f64>, Option<f64>),
    spans: (Option<f64>, Option<f64>),
    format: Format,
) -> Result<i32> {
    let cfg = McConfig {
        gammas: *g,
        n,
        replicates,
        master_seed: seed,
        convention: conv,
    };
    match family {
        "alpha" | "b" => {
            let (scalar_family, default_max, theory): (
                _,
                f64,
                fn(&GammaTriple, MomentConvention) -> f64,
            ) = if family == "alpha" {
                (ScalarFamily::ExpAlpha, 1.0, theory::optimum_alpha)
            } else {
                (ScalarFamily::DifferenceB, 1.5, theory::optimum_b)
            };
            let spec = GridSpec::new(
                grid.0.unwrap_or(0.0),
                grid.1.unwrap_or(default_max),
                grid.2.unwrap_or(0.01),
            )?;
            let search = empirical_optimum_scalar(&cfg, scalar_family, &spec)?;
            if !quality_ok(search.failed_replicates, replicates) {
                return quality_failure(search.failed_replicates, replicates);
            }
            let out = ScalarOptimizeOutput {
                convention: conv,
                n,
                replicates,
                seed,
                theory_as_printed: theory(g, MomentConvention::AsPrinted),
                theory_corrected: theory(g, MomentConvention::Corrected),
                search,
            };
            match format {
                Format::Json => print_json(&out),
                Format::Tsv => {
                    println!(
                        "family\tgrid_min\tgrid_max\tgrid_step\tbest_param\tbest_mse\ttheory_as_printed\ttheory_corrected\tused\tfailed"
                    );
                    println!(
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                        family,
                        out.search.grid.min,
                        out.search.grid.max,
                        out.search.grid.step,
                        out.search.best_param,
                        out.search.best_mse,
                        out.theory_as_printed,
                        out.theory_corrected,
                        out.search.used_replicates,
                        out.search.failed_replicates,
                    );
                }
            }
            Ok(0)
        }
        "weights" => {
            let member: MemberId = member
                .ok_or_else(|| {
                    Error::InvalidArgument("the weights family requires --member <id>".into())
                })?
                .parse()?;
            let half_spans = match spans {
                (Some(a), Some(b)) => Some((a, b)),
                (None, None) => None,
                _ => {
                    return Err(Error::InvalidArgument(
                        "--span1 and --span2 must be given together".into(),
                    ))
                }
            };
            let search = empirical_optimum_weights(&cfg, member, half_spans)?;
            if !quality_ok(search.failed_replicates, replicates) {
                return quality_failure(search.failed_replicates, replicates);
            }
            let theory_of = |c: MomentConvention| -> Result<(f64, f64)> {
                let resolved = theory::resolve_member(member, g, n, c)?;
                theory::optimum_weights(&resolved.coefficients)
            };
            let (ap1, ap2) = theory_of(MomentConvention::AsPrinted)?;
            let (co1, co2) = theory_of(MomentConvention::Corrected)?;
            let out = WeightsOptimizeOutput {
                n,
                replicates,
                seed,
                search,
                theory_as_printed_w1: ap1,
                theory_as_printed_w2: ap2,
                theory_corrected_w1: co1,
                theory_corrected_w2: co2,
            };
            match format {
                Format::Json => print_json(&out),
                Format::Tsv => {
                    println!(
                        "member\talpha\teta\ttheta\tconvention\ttheory_w1\ttheory_w2\tcenter_mse\tbest_w1\tbest_w2\tbest_mse\tused\tfailed"
                    );
                    println!(
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                        out.search.member,
                        out.search.alpha,
                        out.search.eta,
                        out.search.theta,
                        out.search.convention,
                        out.search.theory_w1,
                        out.search.theory_w2,
                        out.search.center_mse,
                        out.search.best_w1,
                        out.search.best_w2,
                        out.search.best_mse,
                        out.search.used_replicates,
                        out.search.failed_replicates,
                    );
                }
            }
            Ok(0)
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown family {other:?} (expected alpha, b, or weights)"
        ))),
    }
}

fn quality_ok(failed: usize, replicates: usize) -> bool {
    (failed as f64) <= 0.001 * replicates as f64
}

fn quality_failure(failed: usize, replicates: usize) -> Result<i32> {
    eprintln!(
        "simulation quality failure: {failed} of {replicates} replicates failed to evaluate \
         (limit is 0.1%); refusing to report results"
    );
    Ok(3)
}

// ---------------------------------------------------------------------------
// members

#[derive(Debug, Serialize)]
struct MembersOutput {
    gammas: GammaTriple,
    xbar: f64,
    rho: f64,
    rows: Vec<crate::estimators::MemberSpec>,
}

fn cmd_members(g: &GammaTriple, format: Format) -> Result<i32> {
    let pop = g.moments();
    let rows: Vec<_> = MemberId::ALL
        .iter()
        .map(|&id| resolve_named_member(id, &pop))
        .collect();
    let out = MembersOutput {
        gammas: *g,
        xbar: pop.xbar,
        rho: pop.rho,
        rows,
    };
    match format {
        Format::Json => print_json(&out),
        Format::Tsv => {
            println!("id\tw1\tw2\talpha\teta\ttheta");
            for r in &out.rows {
                let slot = |s: crate::estimators::Slot| {
                    s.fixed()
                        .map(|v| v.to_string())
                        .unwrap_or_else(|| "free".into())
                };
                println!(
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    r.id,
                    slot(r.w1),
                    r.w2,
                    slot(r.alpha),
                    r.eta,
                    r.theta,
                );
            }
        }
    }
    Ok(0)
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serialization is infallible")
    );
}
