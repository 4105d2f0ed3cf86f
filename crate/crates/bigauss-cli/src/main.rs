//! Command-line front end for the `bigauss` verification library.
//!
//! Three subcommands cover the library surface: `profile` tabulates the
//! isoperimetric profile (ray point and perimeter per grid cell),
//! `verify` runs the full check suite and aggregates the reports into a
//! JSON document, and `candidates` prints the scored stationary table
//! for a single cell. All output is deterministic: grids are sorted
//! before evaluation and every float is printed with 17 significant
//! digits, so identical invocations produce byte-identical tables.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bigauss::oracle::{brute_force_minimum, OracleConfig};
use bigauss::par::ExecMode;
use bigauss::plane::{compare_lines, split_rays_check, stationary_lines_check, PlaneDensity};
use bigauss::report::{format_sig17, VerificationReport};
use bigauss::stationary::{inflection_point, log_derivative_positive_zero, CandidateTag};
use bigauss::{
    gamma_nonnegativity_check, ray_for_mass, score_candidates, tail_point_comparison_check,
    two_ray_replacement_check, verify_rays_minimize, DoubleGaussianDensity, ScoredCandidate,
    VariationSign, WeightedMeasure, MASS_GRID, VARIANCE_GRID,
};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_BAD_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

/// Straddling windows fed to the two-ray replacement check per variance.
const REPLACEMENT_WINDOWS: [(f64, f64); 2] = [(-0.3, 0.3), (-0.1, 0.45)];

#[derive(Parser)]
#[command(
    name = "bigauss",
    version,
    about = "Numerical verification of the two-Gaussian isoperimetric problem",
    after_help = "Exit codes: 0 success, 1 verification failure, 2 invalid arguments, 3 I/O error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Variance grid a^2 (comma-separated); defaults to the built-in grid.
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    variances: Vec<f64>,

    /// Mass grid A in (0, 1/2) (comma-separated); defaults to the built-in grid.
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    masses: Vec<f64>,

    /// Oracle grid nodes (odd, at least 3).
    #[arg(long, global = true, default_value_t = 4001)]
    grid_points: usize,

    /// Largest boundary-point count the oracle searches (1..=6).
    #[arg(long, global = true, default_value_t = 4)]
    kmax: usize,

    /// Output format; defaults to csv for tables and json for verify.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for the grid sweeps; defaults to the number of
    /// logical cores.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Accepted |recovered mass - target| in the residual checks.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol_mass: f64,

    /// Accepted residual of the stationary-point root equations.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol_root: f64,

    /// Required strict-win margin in the comparison checks.
    #[arg(long, global = true, default_value_t = 0.0)]
    margin: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the isoperimetric profile: one row (a^2, A, ray point,
    /// ray perimeter) per grid cell.
    Profile,
    /// Run every verification check over the grids and aggregate the
    /// reports into one JSON document.
    Verify,
    /// Print the scored stationary-candidate table for one cell.
    Candidates {
        /// Variance a^2 (positive).
        a2: f64,
        /// Region mass A, strictly inside (0, 1/2).
        mass: f64,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum CliError {
    Config(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_BAD_CONFIG,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Io(m) => m,
        }
    }
}

fn config_err<E: std::fmt::Display>(err: E) -> CliError {
    CliError::Config(err.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("bigauss: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let grids = Grids::from_cli(&cli)?;
    configure_workers(cli.workers)?;
    match cli.command {
        Command::Profile => {
            let format = cli.format.unwrap_or(Format::Csv);
            let content = render_profile(&grids, format)?;
            write_output(&cli.out, &content)?;
            Ok(0)
        }
        Command::Verify => {
            let format = cli.format.unwrap_or(Format::Json);
            if format == Format::Csv {
                return Err(CliError::Config(
                    "verify emits a structured report; csv is not supported, use --format json"
                        .into(),
                ));
            }
            let suite = run_verify(&grids)?;
            let content = render_verify(&suite);
            write_output(&cli.out, &content)?;
            Ok(if suite.passed { 0 } else { EXIT_VERIFY_FAILED })
        }
        Command::Candidates { a2, mass } => {
            let format = cli.format.unwrap_or(Format::Csv);
            let content = render_candidates(a2, mass, format)?;
            write_output(&cli.out, &content)?;
            Ok(0)
        }
    }
}

/// Validated, sorted, deduplicated run grids plus the tolerance flags.
struct Grids {
    variances: Vec<f64>,
    masses: Vec<f64>,
    oracle: OracleConfig,
    tol_mass: f64,
    tol_root: f64,
    margin: f64,
}

impl Grids {
    fn from_cli(cli: &Cli) -> Result<Grids, CliError> {
        let mut variances = if cli.variances.is_empty() {
            VARIANCE_GRID.to_vec()
        } else {
            cli.variances.clone()
        };
        let mut masses = if cli.masses.is_empty() {
            MASS_GRID.to_vec()
        } else {
            cli.masses.clone()
        };
        for &a2 in &variances {
            if !(a2.is_finite() && a2 > 0.0) {
                return Err(CliError::Config(format!(
                    "variance {a2} is not a positive finite number"
                )));
            }
        }
        for &m in &masses {
            if !(m.is_finite() && m > 0.0 && m < 0.5) {
                return Err(CliError::Config(format!(
                    "mass {m} lies outside the open interval (0, 0.5)"
                )));
            }
        }
        variances.sort_by(f64::total_cmp);
        variances.dedup();
        masses.sort_by(f64::total_cmp);
        masses.dedup();

        if cli.grid_points < 3 || cli.grid_points.is_multiple_of(2) {
            return Err(CliError::Config(format!(
                "--grid-points must be odd and at least 3, got {}",
                cli.grid_points
            )));
        }
        if !(1..=6).contains(&cli.kmax) {
            return Err(CliError::Config(format!(
                "--kmax must lie in 1..=6, got {}",
                cli.kmax
            )));
        }
        for (name, value) in [("--tol-mass", cli.tol_mass), ("--tol-root", cli.tol_root)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(CliError::Config(format!(
                    "{name} must be a positive finite number, got {value}"
                )));
            }
        }
        if !(cli.margin.is_finite() && cli.margin >= 0.0) {
            return Err(CliError::Config(format!(
                "--margin must be a nonnegative finite number, got {}",
                cli.margin
            )));
        }

        Ok(Grids {
            variances,
            masses,
            oracle: OracleConfig {
                grid_points: cli.grid_points,
                k_max: cli.kmax,
                ..OracleConfig::default()
            },
            tol_mass: cli.tol_mass,
            tol_root: cli.tol_root,
            margin: cli.margin,
        })
    }
}

#[cfg(feature = "parallel")]
fn configure_workers(workers: Option<usize>) -> Result<(), CliError> {
    let Some(n) = workers else { return Ok(()) };
    if n == 0 {
        return Err(CliError::Config("--workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(config_err)
}

#[cfg(not(feature = "parallel"))]
fn configure_workers(workers: Option<usize>) -> Result<(), CliError> {
    match workers {
        Some(0) => Err(CliError::Config("--workers must be at least 1".into())),
        _ => Ok(()),
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write standard output: {e}"))),
    }
}

#[derive(Serialize)]
struct ProfileEntry {
    a2: f64,
    mass: f64,
    ray_point: f64,
    ray_perimeter: f64,
}

fn render_profile(grids: &Grids, format: Format) -> Result<String, CliError> {
    let mut rows = Vec::with_capacity(grids.variances.len() * grids.masses.len());
    for &a2 in &grids.variances {
        let dens = DoubleGaussianDensity::new(a2).map_err(config_err)?;
        for &mass in &grids.masses {
            let ray = ray_for_mass(&dens, mass).map_err(config_err)?;
            rows.push(ProfileEntry {
                a2,
                mass,
                ray_point: ray.points[0],
                ray_perimeter: ray.perimeter,
            });
        }
    }
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut out = String::from("a2,A,ray_point,ray_perimeter\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    format_sig17(r.a2),
                    format_sig17(r.mass),
                    format_sig17(r.ray_point),
                    format_sig17(r.ray_perimeter)
                );
            }
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct CandidateEntry {
    a2: f64,
    mass_target: f64,
    tag: String,
    points: Vec<f64>,
    mass: f64,
    perimeter: f64,
    curvature: f64,
    stability: Option<String>,
    gap_vs_ray: f64,
}

impl CandidateEntry {
    fn from_scored(a2: f64, target: f64, row: &ScoredCandidate) -> CandidateEntry {
        CandidateEntry {
            a2,
            mass_target: target,
            tag: match row.candidate.tag {
                CandidateTag::SingleRay => "single_ray",
                CandidateTag::IntervalRight => "interval",
                CandidateTag::IntervalStraddling => "interval_straddling",
                CandidateTag::ThreePoint => "three_point",
                CandidateTag::Anomalous => "anomalous",
            }
            .to_string(),
            points: row.candidate.points.clone(),
            mass: row.mass,
            perimeter: row.perimeter,
            curvature: row.curvature,
            stability: row.stability.as_ref().map(|s| {
                match s.second_variation_sign {
                    VariationSign::Negative => "negative",
                    VariationSign::Zero => "zero",
                    VariationSign::Positive => "positive",
                }
                .to_string()
            }),
            gap_vs_ray: row.gap_vs_ray,
        }
    }
}

fn render_candidates(a2: f64, mass: f64, format: Format) -> Result<String, CliError> {
    if !(a2.is_finite() && a2 > 0.0) {
        return Err(CliError::Config(format!(
            "variance {a2} is not a positive finite number"
        )));
    }
    if !(mass.is_finite() && mass > 0.0 && mass < 0.5) {
        return Err(CliError::Config(format!(
            "mass {mass} lies outside the open interval (0, 0.5)"
        )));
    }
    let dens = DoubleGaussianDensity::new(a2).map_err(config_err)?;
    let rows = score_candidates(&dens, mass, ExecMode::Parallel).map_err(config_err)?;
    let entries: Vec<CandidateEntry> = rows
        .iter()
        .map(|r| CandidateEntry::from_scored(a2, mass, r))
        .collect();
    match format {
        Format::Json => to_json(&entries),
        Format::Csv => {
            let width = entries.iter().map(|e| e.points.len()).max().unwrap_or(1);
            let mut out = String::from("a2,A,tag");
            for i in 1..=width {
                let _ = write!(out, ",p{i}");
            }
            out.push_str(",mass,perimeter,curvature,stability,gap_vs_ray\n");
            for e in &entries {
                let _ = write!(
                    out,
                    "{},{},{}",
                    format_sig17(e.a2),
                    format_sig17(e.mass_target),
                    e.tag
                );
                for i in 0..width {
                    match e.points.get(i) {
                        Some(&p) => {
                            let _ = write!(out, ",{}", format_sig17(p));
                        }
                        None => out.push(','),
                    }
                }
                let _ = writeln!(
                    out,
                    ",{},{},{},{},{}",
                    format_sig17(e.mass),
                    format_sig17(e.perimeter),
                    format_sig17(e.curvature),
                    e.stability.as_deref().unwrap_or(""),
                    format_sig17(e.gap_vs_ray)
                );
            }
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct VerifySuite {
    schema: &'static str,
    passed: bool,
    checks_total: usize,
    checks_failed: usize,
    failing: Vec<FailingCheck>,
    reports: Vec<VerificationReport>,
}

#[derive(Serialize)]
struct FailingCheck {
    check_id: String,
    parameters: std::collections::BTreeMap<String, f64>,
}

fn render_verify(suite: &VerifySuite) -> String {
    let mut s = serde_json::to_string_pretty(suite).expect("suite serializes");
    s.push('\n');
    s
}

fn run_verify(grids: &Grids) -> Result<VerifySuite, CliError> {
    let mut reports: Vec<VerificationReport> = Vec::new();
    for &a2 in &grids.variances {
        let dens = DoubleGaussianDensity::new(a2).map_err(config_err)?;
        let plane = PlaneDensity::new(a2).map_err(config_err)?;

        if a2 < 1.0 {
            reports.push(root_residual_check(&dens, grids.tol_root).map_err(config_err)?);
        }
        if a2 <= 0.5 {
            reports.push(gamma_nonnegativity_check(&dens).map_err(config_err)?);
            for &(s, t) in &REPLACEMENT_WINDOWS {
                reports.push(two_ray_replacement_check(&dens, s, t).map_err(config_err)?);
            }
        }
        reports.push(stationary_lines_check(&plane).map_err(config_err)?);

        for &mass in &grids.masses {
            reports.push(mass_residual_check(&dens, mass, grids.tol_mass).map_err(config_err)?);
            reports
                .push(verify_rays_minimize(&dens, mass, ExecMode::Parallel).map_err(config_err)?);
            if mass <= 0.25 {
                reports.push(tail_point_comparison_check(&dens, mass).map_err(config_err)?);
            }
            reports.push(with_required_margin(
                compare_lines(&plane, mass).map_err(config_err)?,
                grids.margin,
            ));
            reports.push(split_rays_check(&plane, mass).map_err(config_err)?);
            reports.push(oracle_agreement_check(&dens, mass, &grids.oracle).map_err(config_err)?);
        }
    }

    let failing: Vec<FailingCheck> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| FailingCheck {
            check_id: r.check_id.clone(),
            parameters: r.parameters.clone(),
        })
        .collect();
    Ok(VerifySuite {
        schema: "bigauss-verify/1",
        passed: failing.is_empty(),
        checks_total: reports.len(),
        checks_failed: failing.len(),
        failing,
        reports,
    })
}

/// Residuals of the two root equations behind the candidate geometry:
/// the positive zero `d` of the log-derivative (fixed point of
/// `tanh(x / a^2)`) and the curvature at the closed-form inflection
/// abscissa, both of which must vanish.
fn root_residual_check(
    dens: &DoubleGaussianDensity,
    tol: f64,
) -> Result<VerificationReport, bigauss::stationary::StationaryError> {
    let start = std::time::Instant::now();
    let a2 = dens.variance();
    let d = log_derivative_positive_zero(dens)?;
    let fixed_point_residual = (d - (d / a2).tanh()).abs();
    let c = inflection_point(dens)?;
    let inflection_curvature = dens.log_density_derivatives(c).1.abs();
    let passed = fixed_point_residual <= tol && inflection_curvature <= tol;
    Ok(VerificationReport::new("stationary-root-residuals")
        .parameter("a2", a2)
        .tolerance("root_residual", tol)
        .witness("positive_zero", d)
        .witness("fixed_point_residual", fixed_point_residual)
        .witness("inflection_point", c)
        .witness("inflection_curvature", inflection_curvature)
        .pass(passed)
        .timed(start))
}

/// Recovers the ray for a target mass, then re-measures its mass by
/// adaptive quadrature of the density and checks the two routes agree
/// to the flag tolerance.
fn mass_residual_check(
    dens: &DoubleGaussianDensity,
    mass: f64,
    tol: f64,
) -> Result<VerificationReport, bigauss::line::LineError> {
    let start = std::time::Instant::now();
    let ray = ray_for_mass(dens, mass)?;
    let b = ray.points[0];
    // The density beyond 1 + 12a is below e^-72 of its peak, so the
    // truncated integral carries the full mass to well under 1e-14.
    let hi = (1.0 + 12.0 * dens.stddev()).max(b + 12.0 * dens.stddev());
    let quad_mass = bigauss::quad::integrate(&|x| dens.density(x), b, hi, 1e-13);
    let residual = (quad_mass - ray.mass.value()).abs();
    Ok(VerificationReport::new("ray-mass-residual")
        .parameter("a2", dens.variance())
        .parameter("mass", mass)
        .tolerance("mass_residual", tol)
        .witness("ray_point", b)
        .witness("tail_mass", ray.mass.value())
        .witness("quadrature_mass", quad_mass)
        .witness("mass_residual", residual)
        .pass(residual <= tol)
        .timed(start))
}

/// Cross-checks the grid-search oracle against the ray on one cell.
fn oracle_agreement_check(
    dens: &DoubleGaussianDensity,
    mass: f64,
    cfg: &OracleConfig,
) -> Result<VerificationReport, bigauss::oracle::OracleError> {
    let start = std::time::Instant::now();
    let ray = ray_for_mass(dens, mass)?;
    let best = brute_force_minimum(dens, WeightedMeasure::new(mass)?, cfg, ExecMode::Parallel)?;
    let gap = best.perimeter - ray.perimeter;
    let tol = 1e-6;
    Ok(VerificationReport::new("oracle-ray-agreement")
        .parameter("a2", dens.variance())
        .parameter("mass", mass)
        .parameter("grid_points", cfg.grid_points as f64)
        .parameter("k_max", cfg.k_max as f64)
        .tolerance("gap", tol)
        .witness("ray_perimeter", ray.perimeter)
        .witness("oracle_perimeter", best.perimeter)
        .witness("gap", gap)
        .witness_points("oracle_points", &best.points)
        .pass(gap >= -tol)
        .timed(start))
}

/// Tightens a comparison report so it only passes when its margin
/// witness strictly exceeds the required margin flag.
fn with_required_margin(report: VerificationReport, margin: f64) -> VerificationReport {
    let mut report = report.tolerance("required_margin", margin);
    let observed = report
        .witnesses
        .get("margin")
        .and_then(|v| v.as_f64())
        .unwrap_or(f64::NEG_INFINITY);
    report.passed = report.passed && observed > margin;
    report
}

fn to_json<T: Serialize>(rows: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(rows)
        .map_err(|e| CliError::Io(format!("cannot serialize output: {e}")))?;
    s.push('\n');
    Ok(s)
}
