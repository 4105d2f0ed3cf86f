//! Numerical verification toolkit for the isoperimetric problem under a
//! sum of two unit-separated Gaussian densities.
//!
//! The crate models the density, its log-derivative structure, and the
//! boundary configurations that compete for minimal weighted perimeter at a
//! fixed mass: single rays, intervals, and multi-point candidates.  On top
//! of the closed-form machinery sit independent numerical cross-checks
//! (quadrature, finite differences, root bracketing) and a grid-based
//! search oracle that looks for anything beating the ray.  A planar module
//! extends the comparison to half-plane cuts under the product density.
//!
//! Checks return [`report::VerificationReport`] values carrying pass/fail,
//! witnesses, and tolerances, so callers can aggregate them into machine
//! readable output.  Heavy sweeps are data-parallel by default through the
//! `parallel` feature; disabling it (or passing
//! [`par::ExecMode::Sequential`]) runs the same code single-threaded with
//! identical results.

pub mod density;
pub mod extended;
pub mod line;
pub mod oracle;
pub mod par;
pub mod plane;
pub mod quad;
pub mod report;
pub mod roots;
pub mod special;
pub mod stationary;

pub use density::{DensityError, DoubleGaussianDensity, Interval, WeightedMeasure};
pub use line::{
    gamma, gamma_nonnegativity_check, ray_for_mass, score_candidates, second_variation_test,
    sliding_interval_mass, tail_point_comparison_check, two_ray_replacement_check,
    verify_rays_minimize, BoundaryConfiguration, LineError, ScoredCandidate, StabilityResult,
    VariationSign,
};
pub use oracle::{
    brute_force_minimum, oracle_rows, profile_table, write_oracle_csv, OracleConfig, OracleError,
    OracleRow, ProfileRow,
};
pub use par::ExecMode;
pub use plane::{
    compare_lines, compare_rows, horizontal_halfplane, line_generalized_curvature,
    split_rays_check, stationary_lines_check, vertical_halfplane, write_plane_csv,
    PlaneComparisonRow, PlaneDensity, PlaneError, PlaneLine,
};
pub use report::{format_sig17, VerificationReport};
pub use stationary::{
    classify_candidates, generalized_curvature_at, inflection_data, inflection_point,
    log_derivative_level_set, log_derivative_positive_zero, CandidateClass, CandidateTag,
    InflectionData, RegionSide, StationaryError,
};

/// Variance grid covering the small-variance, transitional, and
/// large-variance regimes.
pub const VARIANCE_GRID: [f64; 12] = [
    0.05, 0.1, 0.16, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0, 1.25, 1.5,
];

/// Mass grid over the open lower half, in steps of 0.02.
pub const MASS_GRID: [f64; 24] = [
    0.02, 0.04, 0.06, 0.08, 0.10, 0.12, 0.14, 0.16, 0.18, 0.20, 0.22, 0.24, 0.26, 0.28, 0.30, 0.32,
    0.34, 0.36, 0.38, 0.40, 0.42, 0.44, 0.46, 0.48,
];
