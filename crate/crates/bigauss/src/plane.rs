//! Two-dimensional extension of the double-Gaussian density.
//!
//! The planar density places the two unit-separated Gaussian bumps on the
//! x-axis and multiplies by a centered Gaussian factor in y, so vertical
//! slices all carry the same profile and horizontal slices see a plain
//! mass-one Gaussian.  Straight lines are the natural boundary candidates:
//! this module evaluates their generalized curvature, checks which
//! orientations are stationary, and compares the vertical and horizontal
//! half-plane cuts at equal mass.

use std::f64::consts::PI;
use std::io;
use std::time::Instant;

use serde::Serialize;

use crate::density::{DensityError, DoubleGaussianDensity, WeightedMeasure};
use crate::line::gaussian_quantile;
use crate::quad::integrate_2d;
use crate::report::{format_sig17, VerificationReport};
use crate::roots::RootError;
use crate::special::normal_tail;

/// Errors from planar constructions and checks.
#[derive(Debug, thiserror::Error)]
pub enum PlaneError {
    /// A target mass outside the open interval where the check is defined.
    #[error("mass {value} outside the open interval ({lo}, {hi})")]
    MassOutOfRange { value: f64, lo: f64, hi: f64 },
    /// A sloped line with zero or non-finite slope.
    #[error("sloped line requires a finite nonzero slope, got {slope}")]
    InvalidSlope { slope: f64 },
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Density(#[from] DensityError),
}

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Product density on the plane: the double-Gaussian profile in x times a
/// centered Gaussian of the same standard deviation in y.
///
/// Written out, `f(x, y) = exp(-y^2 / 2a^2) * (exp(-(x-1)^2 / 2a^2) +
/// exp(-(x+1)^2 / 2a^2)) / (4 pi a^2)`.  Total mass is one, and the density
/// is symmetric under `x -> -x` and `y -> -y` separately.
#[derive(Debug, Clone)]
pub struct PlaneDensity {
    variance: f64,
    stddev: f64,
    norm: f64,
    line: DoubleGaussianDensity,
}

impl PlaneDensity {
    pub fn new(variance: f64) -> Result<PlaneDensity, DensityError> {
        let line = DoubleGaussianDensity::new(variance)?;
        Ok(PlaneDensity {
            variance,
            stddev: line.stddev(),
            norm: 1.0 / (4.0 * PI * variance),
            line,
        })
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn stddev(&self) -> f64 {
        self.stddev
    }

    /// The x-axis profile as a standalone one-dimensional density.
    pub fn line_density(&self) -> &DoubleGaussianDensity {
        &self.line
    }

    /// Density evaluated directly from the two-bump product formula.
    pub fn density(&self, x: f64, y: f64) -> f64 {
        let a = self.stddev;
        let zp = (x - 1.0) / a;
        let zm = (x + 1.0) / a;
        let zy = y / a;
        self.norm * (-0.5 * zy * zy).exp() * ((-0.5 * zp * zp).exp() + (-0.5 * zm * zm).exp())
    }

    /// Log-density `psi(x, y)`.
    pub fn log_density(&self, x: f64, y: f64) -> f64 {
        let a = self.stddev;
        let zy = y / a;
        self.line.log_density(x) - 0.5 * zy * zy - 0.5 * (2.0 * PI).ln() - a.ln()
    }

    /// Gradient of the log-density, `(d psi/dx, d psi/dy)`.
    pub fn log_density_gradient(&self, x: f64, y: f64) -> (f64, f64) {
        let (d1, _, _) = self.line.log_density_derivatives(x);
        (d1, -y / self.variance)
    }
}

/// A straight line in the plane, as a boundary between two half-planes.
///
/// `Sloped` lines must have a finite nonzero slope; build them through
/// [`PlaneLine::sloped`] so the invariant is checked.  Slope zero is spelled
/// `Horizontal` and infinite slope is spelled `Vertical`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlaneLine {
    /// The line `x = offset`, bounding the half-plane `x > offset`.
    Vertical { offset: f64 },
    /// The line `y = offset`, bounding the half-plane `y > offset`.
    Horizontal { offset: f64 },
    /// The line `y = slope * x + intercept`, bounding the half-plane above.
    Sloped { slope: f64, intercept: f64 },
}

impl PlaneLine {
    pub fn sloped(slope: f64, intercept: f64) -> Result<PlaneLine, PlaneError> {
        if !slope.is_finite() || slope == 0.0 || !intercept.is_finite() {
            return Err(PlaneError::InvalidSlope { slope });
        }
        Ok(PlaneLine::Sloped { slope, intercept })
    }
}

/// Generalized curvature of a straight line at the point with abscissa
/// `at_x` (ordinate for vertical lines), with the region on the side the
/// line's unit normal points away from.
///
/// A straight line has no Euclidean curvature, so only the normal derivative
/// of the log-density contributes.  Vertical and horizontal lines reduce to
/// closed forms `(b - tanh(b/a^2)) / a^2` and `b / a^2`; sloped lines are
/// evaluated through the gradient with normal `(-c, 1) / sqrt(1 + c^2)`.
pub fn line_generalized_curvature(dens: &PlaneDensity, line: PlaneLine, at_x: f64) -> f64 {
    let a2 = dens.variance();
    match line {
        PlaneLine::Vertical { offset } => {
            let _ = at_x;
            (offset - (offset / a2).tanh()) / a2
        }
        PlaneLine::Horizontal { offset } => offset / a2,
        PlaneLine::Sloped { slope, intercept } => {
            let y = slope * at_x + intercept;
            let (gx, gy) = dens.log_density_gradient(at_x, y);
            -(gx * (-slope) + gy) / slope.hypot(1.0)
        }
    }
}

/// Half-plane `{x > b}`: exact mass and boundary perimeter.
///
/// The y-factor integrates out, so both values come verbatim from the
/// one-dimensional profile: mass is its upper tail past `b` and perimeter is
/// its density at `b`.
pub fn vertical_halfplane(
    dens: &PlaneDensity,
    b: f64,
) -> Result<(WeightedMeasure, f64), PlaneError> {
    let mass = dens.line_density().upper_tail(b)?;
    Ok((mass, dens.line_density().density(b)))
}

/// Half-plane `{y > c}`: exact mass and boundary perimeter.
///
/// The x-factor integrates out, leaving the mass-one Gaussian of standard
/// deviation `a` in y: mass is its tail past `c` and perimeter its density.
pub fn horizontal_halfplane(
    dens: &PlaneDensity,
    c: f64,
) -> Result<(WeightedMeasure, f64), PlaneError> {
    let a = dens.stddev();
    let z = c / a;
    let mass = WeightedMeasure::new(normal_tail(z))?;
    let perimeter = (-0.5 * z * z).exp() / (a * SQRT_2PI);
    Ok((mass, perimeter))
}

/// Mass of `{x > b}` by two-dimensional adaptive quadrature over a box that
/// captures the density to well below the comparison tolerance.
pub fn vertical_halfplane_quadrature(dens: &PlaneDensity, b: f64) -> f64 {
    let a = dens.stddev();
    let x_hi = (1.0 + 10.0 * a).max(b + 10.0 * a);
    let y_hi = 10.0 * a;
    integrate_2d(&|x, y| dens.density(x, y), b, x_hi, -y_hi, y_hi, 1e-9)
}

/// Mass of `{y > c}` by two-dimensional adaptive quadrature.
pub fn horizontal_halfplane_quadrature(dens: &PlaneDensity, c: f64) -> f64 {
    let a = dens.stddev();
    let x_hi = 1.0 + 10.0 * a;
    let y_hi = (10.0 * a).max(c + 10.0 * a);
    integrate_2d(&|x, y| dens.density(x, y), -x_hi, x_hi, c, y_hi, 1e-9)
}

/// Deterministic pseudo-random stream for sample generation inside checks.
struct SampleStream {
    state: u64,
}

impl SampleStream {
    fn new(seed: u64) -> SampleStream {
        SampleStream { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)`.
    fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform draw in `[lo, hi)`.
    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }
}

/// `tanh(z) - 1` without cancellation for large `z`.
fn tanh_minus_one(z: f64) -> f64 {
    let e = (-2.0 * z).exp();
    -2.0 * e / (1.0 + e)
}

/// Checks which straight lines have constant generalized curvature.
///
/// Horizontal and vertical lines are sampled at 100 points each and must
/// agree with their closed forms, evaluated independently through the
/// log-density gradient, to `1e-12`.  For 20 deterministic slope/intercept
/// pairs the curvature difference between abscissas 0 and 1 is compared
/// against `c * tanh(1/a^2) / (a^2 sqrt(1 + c^2))`, and after removing the
/// tilt contribution `c / (a^2 sqrt(1 + c^2))` shared by every line through
/// a tilted frame, against `c * (tanh(1/a^2) - 1) / (a^2 sqrt(1 + c^2))`.
/// Both residuals must stay within `1e-12`, and the adjusted value is
/// nonzero for every nonzero slope, so no sloped line is stationary.
pub fn stationary_lines_check(dens: &PlaneDensity) -> Result<VerificationReport, PlaneError> {
    let start = Instant::now();
    let a2 = dens.variance();
    let constancy_tol = 1e-12;
    let identity_tol = 1e-12;

    let offsets = [-2.0, -1.0, -0.3, 0.0, 0.7, 1.5, 2.0];
    let samples = 100usize;

    let mut max_horizontal_dev: f64 = 0.0;
    let mut max_vertical_dev: f64 = 0.0;
    for &b in &offsets {
        let horizontal = line_generalized_curvature(dens, PlaneLine::Horizontal { offset: b }, 0.0);
        let vertical = line_generalized_curvature(dens, PlaneLine::Vertical { offset: b }, 0.0);
        for i in 0..samples {
            let s = -3.0 + 6.0 * i as f64 / (samples - 1) as f64;
            let (_, gy) = dens.log_density_gradient(s, b);
            max_horizontal_dev = max_horizontal_dev.max((-gy - horizontal).abs());
            let (gx, _) = dens.log_density_gradient(b, s);
            max_vertical_dev = max_vertical_dev.max((-gx - vertical).abs());
        }
    }

    let mut stream = SampleStream::new(0x5113_B1D5_0C66_D2E1);
    let mut max_raw_residual: f64 = 0.0;
    let mut max_adjusted_residual: f64 = 0.0;
    let mut min_adjusted_magnitude = f64::INFINITY;
    let mut worst_pair = (0.0, 0.0);
    for _ in 0..20 {
        let mut slope = stream.range(-3.0, 3.0);
        while slope.abs() < 0.2 {
            slope = stream.range(-3.0, 3.0);
        }
        let intercept = stream.range(-2.0, 2.0);
        let line = PlaneLine::sloped(slope, intercept)?;
        let k0 = line_generalized_curvature(dens, line, 0.0);
        let k1 = line_generalized_curvature(dens, line, 1.0);
        let scale = slope / (a2 * slope.hypot(1.0));
        let raw = k1 - k0;
        let raw_expected = scale * (1.0 / a2).tanh();
        let adjusted = raw - scale;
        let adjusted_expected = scale * tanh_minus_one(1.0 / a2);
        let raw_residual = (raw - raw_expected).abs();
        let adjusted_residual = (adjusted - adjusted_expected).abs();
        if raw_residual > max_raw_residual || adjusted_residual > max_adjusted_residual {
            worst_pair = (slope, intercept);
        }
        max_raw_residual = max_raw_residual.max(raw_residual);
        max_adjusted_residual = max_adjusted_residual.max(adjusted_residual);
        min_adjusted_magnitude = min_adjusted_magnitude.min(adjusted_expected.abs());
    }

    let passed = max_horizontal_dev <= constancy_tol
        && max_vertical_dev <= constancy_tol
        && max_raw_residual <= identity_tol
        && max_adjusted_residual <= identity_tol
        && min_adjusted_magnitude > 0.0;

    Ok(VerificationReport::new("line-curvature-constancy")
        .parameter("a2", a2)
        .tolerance("constancy", constancy_tol)
        .tolerance("difference_identity", identity_tol)
        .witness("max_horizontal_deviation", max_horizontal_dev)
        .witness("max_vertical_deviation", max_vertical_dev)
        .witness("max_raw_difference_residual", max_raw_residual)
        .witness("max_adjusted_difference_residual", max_adjusted_residual)
        .witness("min_adjusted_difference_magnitude", min_adjusted_magnitude)
        .witness("worst_slope", worst_pair.0)
        .witness("worst_intercept", worst_pair.1)
        .pass(passed)
        .timed(start))
}

/// One row of the vertical-versus-horizontal comparison table.
#[derive(Debug, Clone, Serialize)]
pub struct PlaneComparisonRow {
    pub variance: f64,
    pub mass: f64,
    pub b_vertical: f64,
    pub c_horizontal: f64,
    pub perim_vertical: f64,
    pub perim_horizontal: f64,
    pub margin: f64,
}

/// Solves both half-plane cuts for the same mass and builds the comparison.
fn compare_row(dens: &PlaneDensity, mass: f64) -> Result<PlaneComparisonRow, PlaneError> {
    if !(mass > 0.0 && mass < 0.5) {
        return Err(PlaneError::MassOutOfRange {
            value: mass,
            lo: 0.0,
            hi: 0.5,
        });
    }
    let b = dens.line_density().upper_tail_quantile(mass)?;
    let (_, perim_vertical) = vertical_halfplane(dens, b)?;
    let z = gaussian_quantile(0.0, 1.0, 1.0 - mass)?;
    let c = dens.stddev() * z;
    let (_, perim_horizontal) = horizontal_halfplane(dens, c)?;
    Ok(PlaneComparisonRow {
        variance: dens.variance(),
        mass,
        b_vertical: b,
        c_horizontal: c,
        perim_vertical,
        perim_horizontal,
        margin: perim_horizontal - perim_vertical,
    })
}

/// Comparison rows for a list of masses, in input order.
pub fn compare_rows(
    dens: &PlaneDensity,
    masses: &[f64],
) -> Result<Vec<PlaneComparisonRow>, PlaneError> {
    masses.iter().map(|&m| compare_row(dens, m)).collect()
}

/// Compares the vertical and horizontal half-plane cuts at equal mass.
///
/// Both offsets are solved to put exactly `mass` above the line, and the
/// check passes when the vertical cut has strictly smaller perimeter, with
/// the recomputed masses agreeing with the target to `1e-12`.
pub fn compare_lines(dens: &PlaneDensity, mass: f64) -> Result<VerificationReport, PlaneError> {
    let start = Instant::now();
    let row = compare_row(dens, mass)?;
    let (mass_v, _) = vertical_halfplane(dens, row.b_vertical)?;
    let (mass_h, _) = horizontal_halfplane(dens, row.c_horizontal)?;
    let residual_v = (mass_v.value() - mass).abs();
    let residual_h = (mass_h.value() - mass).abs();
    let mass_tol = 1e-12;
    let passed = row.margin > 0.0 && residual_v <= mass_tol && residual_h <= mass_tol;
    Ok(VerificationReport::new("vertical-beats-horizontal")
        .parameter("a2", dens.variance())
        .parameter("mass", mass)
        .tolerance("mass_residual", mass_tol)
        .witness("b_vertical", row.b_vertical)
        .witness("c_horizontal", row.c_horizontal)
        .witness("perim_vertical", row.perim_vertical)
        .witness("perim_horizontal", row.perim_horizontal)
        .witness("margin", row.margin)
        .witness("mass_residual_vertical", residual_v)
        .witness("mass_residual_horizontal", residual_h)
        .pass(passed)
        .timed(start))
}

/// Point and density of the half-weight Gaussian ray holding tail mass `m`.
///
/// The half-weight Gaussian is one bump of the planar x-profile viewed on
/// its own: total mass one half, standard deviation `a`.  The ray `[q, inf)`
/// with `mass = m` has `q = a * z` where the standard normal tail at `z` is
/// `2m`, and boundary cost equal to the bump's density at `q`.
fn half_gaussian_ray(a: f64, m: f64) -> Result<(f64, f64), PlaneError> {
    let z = gaussian_quantile(0.0, 1.0, 1.0 - 2.0 * m)?;
    let q = a * z;
    let dens = 0.5 * (-0.5 * z * z).exp() / (a * SQRT_2PI);
    Ok((q, dens))
}

/// Checks that splitting a ray of the half-weight Gaussian into two rays of
/// shares `lambda` and `1 - lambda` never helps.
///
/// The cost `h(lambda * m) + h((1 - lambda) * m)` must decrease strictly as
/// `lambda` grows from the symmetric split toward 1, and the single ray must
/// beat the most lopsided pair sampled, so the optimal pair degenerates to
/// one ray.  `h` is the boundary density of the tail ray at the given mass.
pub fn split_rays_check(dens: &PlaneDensity, mass: f64) -> Result<VerificationReport, PlaneError> {
    let start = Instant::now();
    if !(mass > 0.0 && mass < 0.5) {
        return Err(PlaneError::MassOutOfRange {
            value: mass,
            lo: 0.0,
            hi: 0.5,
        });
    }
    let a = dens.stddev();
    let lambdas = [0.5, 0.55, 0.65, 0.75, 0.85, 0.95];
    let mut costs = Vec::with_capacity(lambdas.len());
    for &lambda in &lambdas {
        let (_, left) = half_gaussian_ray(a, lambda * mass)?;
        let (_, right) = half_gaussian_ray(a, (1.0 - lambda) * mass)?;
        costs.push(left + right);
    }
    let (_, single_cost) = half_gaussian_ray(a, mass)?;
    let strictly_decreasing = costs.windows(2).all(|w| w[1] < w[0]);
    let single_beats_pairs = single_cost < costs[costs.len() - 1];
    let passed = strictly_decreasing && single_beats_pairs;
    Ok(VerificationReport::new("ray-split-degenerates")
        .parameter("a2", dens.variance())
        .parameter("mass", mass)
        .witness("symmetric_pair_cost", costs[0])
        .witness("most_lopsided_pair_cost", costs[costs.len() - 1])
        .witness("single_ray_cost", single_cost)
        .witness_points("split_costs", &costs)
        .witness_value(
            "strictly_decreasing",
            serde_json::json!(strictly_decreasing),
        )
        .pass(passed)
        .timed(start))
}

/// Writes comparison rows as CSV with full-precision decimal fields.
pub fn write_plane_csv<W: io::Write>(
    writer: W,
    rows: &[PlaneComparisonRow],
) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record([
        "a2",
        "A",
        "b_vertical",
        "c_horizontal",
        "perim_vertical",
        "perim_horizontal",
        "margin",
    ])?;
    for row in rows {
        out.write_record([
            format_sig17(row.variance),
            format_sig17(row.mass),
            format_sig17(row.b_vertical),
            format_sig17(row.c_horizontal),
            format_sig17(row.perim_vertical),
            format_sig17(row.perim_horizontal),
            format_sig17(row.margin),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_is_symmetric_in_both_axes() {
        let p = PlaneDensity::new(0.4).unwrap();
        for &(x, y) in &[(0.3, 0.7), (1.2, -0.4), (0.0, 1.5), (2.1, 0.01)] {
            let v = p.density(x, y);
            assert_eq!(v, p.density(-x, y));
            assert_eq!(v, p.density(x, -y));
        }
    }

    #[test]
    fn density_factors_into_profile_times_gaussian() {
        let p = PlaneDensity::new(0.5).unwrap();
        let a = p.stddev();
        for &(x, y) in &[(0.0, 0.0), (0.9, 0.3), (-1.4, 1.1), (2.5, -0.8)] {
            let z = y / a;
            let marginal = (-0.5 * z * z).exp() / (a * SQRT_2PI);
            let product = p.line_density().density(x) * marginal;
            assert!((p.density(x, y) - product).abs() <= 1e-13);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = PlaneDensity::new(0.25).unwrap();
        let h = 1e-6;
        for &(x, y) in &[(0.4, 0.2), (-0.9, -1.1), (1.3, 0.6)] {
            let (gx, gy) = p.log_density_gradient(x, y);
            let fx = (p.log_density(x + h, y) - p.log_density(x - h, y)) / (2.0 * h);
            let fy = (p.log_density(x, y + h) - p.log_density(x, y - h)) / (2.0 * h);
            assert!((gx - fx).abs() <= 1e-8);
            assert!((gy - fy).abs() <= 1e-8);
        }
    }

    #[test]
    fn sloped_constructor_rejects_degenerate_slopes() {
        assert!(PlaneLine::sloped(0.0, 1.0).is_err());
        assert!(PlaneLine::sloped(f64::INFINITY, 1.0).is_err());
        assert!(PlaneLine::sloped(f64::NAN, 1.0).is_err());
        assert!(PlaneLine::sloped(1.0, f64::NAN).is_err());
        assert!(PlaneLine::sloped(-0.5, 0.3).is_ok());
    }

    #[test]
    fn axis_line_curvatures_match_their_closed_forms() {
        let p = PlaneDensity::new(0.5).unwrap();
        let a2 = 0.5;
        let horizontal = line_generalized_curvature(&p, PlaneLine::Horizontal { offset: 0.8 }, 3.0);
        assert!((horizontal - 0.8 / a2).abs() <= 1e-15);
        assert_eq!(
            line_generalized_curvature(&p, PlaneLine::Horizontal { offset: 0.0 }, -1.0),
            0.0
        );
        let vertical = line_generalized_curvature(&p, PlaneLine::Vertical { offset: 0.6 }, 0.0);
        let (gx, _) = p.log_density_gradient(0.6, 2.2);
        assert!((vertical + gx).abs() <= 1e-15);
    }

    #[test]
    fn sloped_curvature_difference_matches_both_identities() {
        let p = PlaneDensity::new(0.5).unwrap();
        let a2 = 0.5;
        let line = PlaneLine::sloped(1.0, 0.0).unwrap();
        let diff =
            line_generalized_curvature(&p, line, 1.0) - line_generalized_curvature(&p, line, 0.0);
        let scale = 1.0 / (a2 * 2.0_f64.sqrt());
        assert!((diff - scale * (1.0 / a2).tanh()).abs() <= 1e-12);
        let adjusted = diff - scale;
        assert!((adjusted - scale * tanh_minus_one(1.0 / a2)).abs() <= 1e-12);
        assert!(adjusted < 0.0);
    }

    #[test]
    fn stationary_line_check_passes_across_variances() {
        for &a2 in &[0.05, 0.5, 1.25] {
            let p = PlaneDensity::new(a2).unwrap();
            let report = stationary_lines_check(&p).unwrap();
            assert!(report.passed, "failed at a2 = {a2}: {report:?}");
        }
    }

    #[test]
    fn halfplane_values_delegate_to_the_marginals() {
        let p = PlaneDensity::new(0.4).unwrap();
        let (mass_v, perim_v) = vertical_halfplane(&p, 0.35).unwrap();
        assert_eq!(
            mass_v.value(),
            p.line_density().upper_tail(0.35).unwrap().value()
        );
        assert_eq!(perim_v, p.line_density().density(0.35));
        let (mass_mid, _) = vertical_halfplane(&p, 0.0).unwrap();
        assert!((mass_mid.value() - 0.5).abs() <= 1e-15);

        let (mass_h, perim_h) = horizontal_halfplane(&p, 0.0).unwrap();
        assert!((mass_h.value() - 0.5).abs() <= 1e-15);
        let a = p.stddev();
        assert!((perim_h - 1.0 / (a * SQRT_2PI)).abs() <= 1e-15);
    }

    #[test]
    fn vertical_cut_beats_horizontal_at_equal_mass() {
        for &(a2, mass) in &[(0.5, 0.25), (0.16, 0.1), (1.5, 0.4), (1.0, 0.02)] {
            let p = PlaneDensity::new(a2).unwrap();
            let report = compare_lines(&p, mass).unwrap();
            assert!(report.passed, "failed at ({a2}, {mass}): {report:?}");
            assert!(report.witnesses["margin"].as_f64().unwrap() > 0.0);
        }
        let p = PlaneDensity::new(0.5).unwrap();
        assert!(compare_lines(&p, 0.5).is_err());
        assert!(compare_lines(&p, 0.0).is_err());
    }

    #[test]
    fn ray_splits_degenerate_to_a_single_ray() {
        for &(a2, mass) in &[(0.5, 0.25), (0.16, 0.1), (1.0, 0.4)] {
            let p = PlaneDensity::new(a2).unwrap();
            let report = split_rays_check(&p, mass).unwrap();
            assert!(report.passed, "failed at ({a2}, {mass}): {report:?}");
        }
        let p = PlaneDensity::new(0.5).unwrap();
        assert!(split_rays_check(&p, 0.6).is_err());
    }

    #[test]
    fn comparison_csv_has_header_and_full_precision() {
        let p = PlaneDensity::new(0.5).unwrap();
        let rows = compare_rows(&p, &[0.1, 0.3]).unwrap();
        let mut buf = Vec::new();
        write_plane_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "a2,A,b_vertical,c_horizontal,perim_vertical,perim_horizontal,margin"
        );
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 7);
        let margin: f64 = first[6].parse().unwrap();
        assert_eq!(margin, rows[0].margin);
    }
}
