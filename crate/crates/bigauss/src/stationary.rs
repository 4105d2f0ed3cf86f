//! Stationary structure of the log-density: inflection points, zeros and
//! level sets of `psi'`, generalized curvature, and the enumeration of
//! constant-curvature candidate boundaries.
//!
//! Write `psi = log f`. For component variance `a^2 <= 1` the derivative
//! `psi'` is zero at the origin, increases to a maximum at the inflection
//! abscissa `c = a^2 arccosh(1/a)`, then decreases through a second zero
//! `d` (present only for `a < 1`) and on to `-infinity`. Those monotone
//! pieces delimit every solution of `|psi'(x)| = kappa`, which is what
//! makes an exhaustive candidate enumeration possible: a stationary
//! boundary has the same generalized curvature at every point, so its
//! points all live on one level set, and each level set has at most six
//! points.

use crate::density::{DensityError, DoubleGaussianDensity, Interval, WeightedMeasure};
use crate::par::{self, ExecMode};
use crate::roots::{self, RootError};

/// Errors from stationary-structure computations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StationaryError {
    /// `psi''` has no zero when `a^2 > 1` (the density is log-concave
    /// at the origin only up to `a = 1`).
    #[error("no inflection point: variance {variance} exceeds 1")]
    NoInflection { variance: f64 },
    /// `psi'` has no positive zero when `a^2 >= 1`.
    #[error("no positive zero of the log-derivative: variance {variance} is not below 1")]
    NoPositiveZero { variance: f64 },
    /// Curvature level must be a nonnegative finite number.
    #[error("invalid curvature level {kappa}")]
    InvalidCurvature { kappa: f64 },
    /// Candidate enumeration needs a target mass strictly between 0 and 1/2.
    #[error("target mass {value} is not in (0, 1/2)")]
    MassOutOfRange { value: f64 },
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Density(#[from] DensityError),
}

/// Which side of a boundary point the enclosed region lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionSide {
    /// The region continues to the right of the point (the point is a
    /// lower endpoint of a region component).
    Right,
    /// The region continues to the left of the point.
    Left,
}

/// The distinguished abscissae of the log-density for one variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InflectionData {
    /// Positive zero of `psi''`: `c = a^2 arccosh(1/a)`. Zero at `a = 1`.
    pub c: f64,
    /// Positive zero of `psi'` (solves `x = tanh(x/a^2)`), which exists
    /// only for `a < 1`; it satisfies `c < d <= 1`.
    pub d: Option<f64>,
    /// The unique point `b > c` with `psi(b) = psi(c)`, only for `a < 1`.
    pub b_match: Option<f64>,
}

/// The shape of a constant-curvature candidate boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateTag {
    /// One boundary point enclosing a ray.
    SingleRay,
    /// A bounded interval on one side of the origin whose nearer endpoint
    /// lies in the window `[-c, c]` (or its mirror image).
    IntervalRight,
    /// A bounded interval containing the origin with at least one endpoint
    /// in the window `[-c, c]`.
    IntervalStraddling,
    /// A symmetric pair in the window plus one point beyond `d`: region
    /// `[-s, s] + [u, inf)` or its complement-side variant and mirrors.
    ThreePoint,
    /// Constant-curvature configuration outside the four shapes above
    /// (for example a symmetric pair of far tails); reported rather than
    /// silently dropped.
    Anomalous,
}

/// One candidate boundary: its shape tag, sorted boundary points, and the
/// enclosed region. Curvature constancy and the mass constraint hold for
/// every emitted candidate by construction and are re-verifiable from the
/// fields alone.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateClass {
    pub tag: CandidateTag,
    pub points: Vec<f64>,
    pub region: Vec<Interval>,
}

/// Tolerance on abscissae returned by the root searches in this module.
const ROOT_TOL: f64 = 1e-13;

/// Two candidates within this distance in every coordinate are duplicates.
const DEDUP_TOL: f64 = 1e-6;

/// Seed count for the candidate sweep over `[0, c]`.
const SWEEP_SEEDS: usize = 512;

fn psi1(d: &DoubleGaussianDensity, x: f64) -> f64 {
    d.log_density_derivatives(x).0
}

fn psi2(d: &DoubleGaussianDensity, x: f64) -> f64 {
    d.log_density_derivatives(x).1
}

/// The positive zero `c` of `psi''`, in closed form `a^2 arccosh(1/a)`.
///
/// Fails for `a^2 > 1`, where `psi'' < 0` away from the origin and
/// `psi''(0) <= 0`: the log-density has no inflection.
pub fn inflection_point(d: &DoubleGaussianDensity) -> Result<f64, StationaryError> {
    let a2 = d.variance();
    if a2 > 1.0 {
        return Err(StationaryError::NoInflection { variance: a2 });
    }
    Ok(a2 * (1.0 / d.stddev()).acosh())
}

/// The unique positive zero `d` of `psi'`, solving `x = tanh(x / a^2)`.
///
/// Exists only for `a < 1`; it lies strictly between the inflection
/// abscissa `c` and 1.
pub fn log_derivative_positive_zero(d: &DoubleGaussianDensity) -> Result<f64, StationaryError> {
    let a2 = d.variance();
    if a2 >= 1.0 {
        return Err(StationaryError::NoPositiveZero { variance: a2 });
    }
    let c = inflection_point(d)?;
    // psi' > 0 at c (it increases from 0 on [0, c]) and psi'(1) < 0
    // because tanh(1/a^2) < 1, so [c, 1] brackets the zero.
    let mut root = roots::find_root(|x| psi1(d, x), c, 1.0, ROOT_TOL)?;
    for _ in 0..2 {
        let slope = psi2(d, root);
        if slope.abs() > 1e-9 {
            root -= psi1(d, root) / slope;
        }
    }
    Ok(root)
}

/// All distinguished abscissae for one variance; `d` and `b_match` are
/// present only for `a < 1`.
pub fn inflection_data(dens: &DoubleGaussianDensity) -> Result<InflectionData, StationaryError> {
    let c = inflection_point(dens)?;
    if dens.variance() >= 1.0 {
        return Ok(InflectionData {
            c,
            d: None,
            b_match: None,
        });
    }
    let d = log_derivative_positive_zero(dens)?;
    // psi increases on [0, d] and decreases beyond d toward -infinity, so
    // psi(x) = psi(c) has exactly one solution right of d.
    let target = dens.log_density(c);
    let mut hi = 1.0 + 8.0 * dens.stddev();
    for _ in 0..60 {
        if dens.log_density(hi) < target {
            break;
        }
        hi *= 2.0;
    }
    let b_match = roots::find_root(|x| dens.log_density(x) - target, d, hi, ROOT_TOL)?;
    Ok(InflectionData {
        c,
        d: Some(d),
        b_match: Some(b_match),
    })
}

/// Generalized curvature of a region boundary at the point `x`: `-psi'(x)`
/// when the region lies to the right of `x` and `+psi'(x)` when it lies to
/// the left. For an interval `[p, q]` this gives `-psi'(p)` at `p` and
/// `psi'(q)` at `q`.
pub fn generalized_curvature_at(d: &DoubleGaussianDensity, x: f64, side: RegionSide) -> f64 {
    match side {
        RegionSide::Right => -psi1(d, x),
        RegionSide::Left => psi1(d, x),
    }
}

/// Expands `hi` until `psi'(hi) < -kappa`; beyond the tanh saturation
/// `psi'(x)` behaves like `(1 - x) / a^2`, so a few doublings suffice.
fn far_bracket(d: &DoubleGaussianDensity, kappa: f64) -> f64 {
    let mut hi = 1.0 + 8.0 * d.stddev();
    for _ in 0..60 {
        if psi1(d, hi) < -kappa {
            break;
        }
        hi *= 2.0;
    }
    hi
}

/// All solutions of `|psi'(x)| = kappa`, sorted ascending.
///
/// Solutions are bracketed on the monotone pieces of `psi'` (delimited by
/// the inflection abscissae and the zero `d` when `a < 1`), so none can be
/// missed; there are at most six. Each returned point satisfies the
/// equation to 1e-10.
pub fn log_derivative_level_set(
    d: &DoubleGaussianDensity,
    kappa: f64,
) -> Result<Vec<f64>, StationaryError> {
    if !kappa.is_finite() || kappa < 0.0 {
        return Err(StationaryError::InvalidCurvature { kappa });
    }
    let mut positive: Vec<(f64, f64)> = Vec::new(); // (root, target psi' value)
    if d.variance() < 1.0 {
        let c = inflection_point(d)?;
        let dd = log_derivative_positive_zero(d)?;
        let kappa_max = psi1(d, c);
        if kappa <= kappa_max {
            positive.push((
                roots::find_root(|x| psi1(d, x) - kappa, 0.0, c, ROOT_TOL)?,
                kappa,
            ));
            positive.push((
                roots::find_root(|x| psi1(d, x) - kappa, c, dd, ROOT_TOL)?,
                kappa,
            ));
        }
        let hi = far_bracket(d, kappa);
        positive.push((
            roots::find_root(|x| psi1(d, x) + kappa, dd, hi, ROOT_TOL)?,
            -kappa,
        ));
    } else {
        // psi' is nonincreasing on [0, inf) with psi'(0) = 0: only the
        // crossing of -kappa exists.
        let hi = far_bracket(d, kappa);
        positive.push((
            roots::find_root(|x| psi1(d, x) + kappa, 0.0, hi, ROOT_TOL)?,
            -kappa,
        ));
    }
    // Newton polish where psi'' is comfortably nonzero.
    for (root, target) in positive.iter_mut() {
        for _ in 0..2 {
            let slope = psi2(d, *root);
            if slope.abs() > 1e-6 {
                let step = (psi1(d, *root) - *target) / slope;
                if step.abs() < 1e-6 {
                    *root -= step;
                }
            }
        }
    }
    let mut all: Vec<f64> = positive.iter().map(|&(r, _)| r).collect();
    all.extend(positive.iter().map(|&(r, _)| -r));
    all.sort_by(f64::total_cmp);
    all.dedup_by(|p, q| (*p - *q).abs() <= 1e-8);
    Ok(all)
}

/// Labels for the six potential level-set points of one curvature value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    NegU,
    NegT,
    NegS,
    S,
    T,
    U,
}

use Slot::{NegS, NegT, NegU, S, T, U};

/// Every subset of `{-u, -t, -s, s, t, u}` that can carry a constant
/// generalized curvature with an alternating region, other than single
/// points (the ray is added separately). Mirror images are listed
/// explicitly; the sweep realizes each with both region orientations.
const PATTERNS: &[&[Slot]] = &[
    &[NegU, NegT],
    &[NegU, NegS],
    &[NegU, U],
    &[NegT, S],
    &[NegT, T],
    &[NegS, S],
    &[NegS, T],
    &[S, U],
    &[T, U],
    &[NegS, S, U],
    &[NegT, S, U],
    &[NegT, T, U],
    &[NegS, T, U],
    &[NegU, NegS, S],
    &[NegU, NegS, T],
    &[NegU, NegT, T],
    &[NegU, NegT, S],
    &[NegU, NegT, S, U],
    &[NegU, NegT, T, U],
    &[NegU, NegS, S, U],
    &[NegU, NegS, T, U],
];

/// Level-set partner points for one seed `s` in `[0, c]`: `t` in `[c, d]`
/// with `psi'(t) = psi'(s)` and `u >= d` with `psi'(u) = -psi'(s)`.
#[derive(Debug, Clone, Copy)]
struct Partners {
    s: f64,
    t: f64,
    u: f64,
}

fn partners(
    dens: &DoubleGaussianDensity,
    c: f64,
    d: f64,
    s: f64,
) -> Result<Partners, StationaryError> {
    let kappa0 = psi1(dens, s);
    let t = roots::find_root(|x| psi1(dens, x) - kappa0, c, d, ROOT_TOL)?;
    let hi = far_bracket(dens, kappa0);
    let u = roots::find_root(|x| psi1(dens, x) + kappa0, d, hi, ROOT_TOL)?;
    Ok(Partners { s, t, u })
}

fn slot_value(p: &Partners, slot: Slot) -> f64 {
    match slot {
        NegU => -p.u,
        NegT => -p.t,
        NegS => -p.s,
        S => p.s,
        T => p.t,
        U => p.u,
    }
}

/// Realizes a pattern at given partner values; `None` when two points
/// collide (degenerate configuration at a sweep boundary).
fn realize(p: &Partners, pattern: &[Slot]) -> Option<Vec<f64>> {
    let points: Vec<f64> = pattern.iter().map(|&s| slot_value(p, s)).collect();
    for w in points.windows(2) {
        if w[1] - w[0] < 1e-9 {
            return None;
        }
    }
    Some(points)
}

/// Region cells of a sorted point list, taking cells of the given parity
/// (`0` includes the leftmost ray, `1` starts after the first point).
fn region_cells(points: &[f64], parity: usize) -> Vec<Interval> {
    let mut cells = Vec::new();
    let k = points.len();
    for i in 0..=k {
        if i % 2 != parity {
            continue;
        }
        let lo = if i == 0 {
            f64::NEG_INFINITY
        } else {
            points[i - 1]
        };
        let hi = if i == k { f64::INFINITY } else { points[i] };
        cells.push(Interval::new(lo, hi).expect("sorted points give ordered cells"));
    }
    cells
}

fn region_mass_of(dens: &DoubleGaussianDensity, region: &[Interval]) -> Option<f64> {
    dens.region_mass(region).ok().map(WeightedMeasure::value)
}

/// The side of the region at each boundary point of `region`, in the
/// order the points appear sorted.
pub(crate) fn region_sides(points: &[f64], region: &[Interval]) -> Vec<RegionSide> {
    points
        .iter()
        .map(|&p| {
            if region.iter().any(|iv| iv.lo() == p) {
                RegionSide::Right
            } else {
                RegionSide::Left
            }
        })
        .collect()
}

fn tag_of(points: &[f64], region: &[Interval], c: f64) -> CandidateTag {
    let window = |p: f64| p.abs() <= c + 1e-9;
    match points.len() {
        1 => CandidateTag::SingleRay,
        2 => {
            if region.len() != 1 || !region[0].lo().is_finite() || !region[0].hi().is_finite() {
                return CandidateTag::Anomalous;
            }
            if !points.iter().copied().any(window) {
                return CandidateTag::Anomalous;
            }
            if points[0] > 0.0 || points[1] < 0.0 {
                CandidateTag::IntervalRight
            } else {
                CandidateTag::IntervalStraddling
            }
        }
        3 => {
            // A symmetric pair inside the window plus a third point.
            let pairs = [(0, 1), (1, 2), (0, 2)];
            for (i, j) in pairs {
                if (points[i] + points[j]).abs() <= DEDUP_TOL
                    && window(points[i])
                    && window(points[j])
                {
                    return CandidateTag::ThreePoint;
                }
            }
            CandidateTag::Anomalous
        }
        _ => CandidateTag::Anomalous,
    }
}

/// Checks curvature constancy across the configuration and the mass
/// target, then builds the candidate record.
fn finalize_candidate(
    dens: &DoubleGaussianDensity,
    c: f64,
    points: Vec<f64>,
    region: Vec<Interval>,
    target: f64,
) -> Option<CandidateClass> {
    let sides = region_sides(&points, &region);
    let kappas: Vec<f64> = points
        .iter()
        .zip(&sides)
        .map(|(&p, &side)| generalized_curvature_at(dens, p, side))
        .collect();
    let spread = kappas.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - kappas.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread > 1e-9 {
        return None;
    }
    let mass = region_mass_of(dens, &region)?;
    if (mass - target).abs() > 1e-9 || mass <= 0.0 || mass >= 0.5 {
        return None;
    }
    let tag = tag_of(&points, &region, c);
    Some(CandidateClass {
        tag,
        points,
        region,
    })
}

fn same_candidate(a: &CandidateClass, b: &CandidateClass) -> bool {
    if a.points.len() != b.points.len() || a.region.len() != b.region.len() {
        return false;
    }
    let close = |p: f64, q: f64| p == q || (p - q).abs() <= DEDUP_TOL;
    a.points.iter().zip(&b.points).all(|(&p, &q)| close(p, q))
        && a.region
            .iter()
            .zip(&b.region)
            .all(|(ia, ib)| close(ia.lo(), ib.lo()) && close(ia.hi(), ib.hi()))
}

/// Enumerates every constant-curvature boundary configuration whose
/// region mass equals `target` (within 1e-9), for `a^2 <= 1` and
/// `0 < target < 1/2`.
///
/// The enumeration sweeps seed points `s` over `[0, c]`, builds the
/// level-set partners `t` and `u` of each seed, and root-finds the seed
/// at which each sign-consistent configuration shape reaches the target
/// mass; the pure ray and the symmetric far-tail pair are included
/// directly through quantiles. Shapes that cannot reach the target are
/// simply absent. The output is deterministically sorted.
pub fn classify_candidates(
    dens: &DoubleGaussianDensity,
    target: WeightedMeasure,
    mode: ExecMode,
) -> Result<Vec<CandidateClass>, StationaryError> {
    let a2 = dens.variance();
    if a2 > 1.0 {
        return Err(StationaryError::NoInflection { variance: a2 });
    }
    let target = target.value();
    if !(target > 0.0 && target < 0.5) {
        return Err(StationaryError::MassOutOfRange { value: target });
    }
    let mut found: Vec<CandidateClass> = Vec::new();

    // The ray candidate always exists: one point at the upper-tail
    // quantile of the target mass.
    let b = dens.upper_tail_quantile(target)?;
    found.push(CandidateClass {
        tag: CandidateTag::SingleRay,
        points: vec![b],
        region: vec![Interval::ray_right(b)],
    });

    let c = inflection_point(dens)?;

    // Symmetric pairs are always stationary by symmetry, and their
    // curvature level can exceed every seed's, so both orientations are
    // built from quantiles directly rather than from the sweep: far tails
    // (-inf, -u] + [u, inf) of mass `target`, and the interval [-x, x] of
    // mass `target`.
    let u = dens.upper_tail_quantile(target / 2.0)?;
    if u > 0.0 {
        let points = vec![-u, u];
        let region = vec![Interval::ray_left(-u), Interval::ray_right(u)];
        if let Some(cand) = finalize_candidate(dens, c, points, region, target) {
            found.push(cand);
        }
    }
    let x = dens.upper_tail_quantile((1.0 - target) / 2.0)?;
    if x > 0.0 {
        let points = vec![-x, x];
        let region = vec![Interval::new(-x, x).expect("ordered")];
        if let Some(cand) = finalize_candidate(dens, c, points, region, target) {
            found.push(cand);
        }
    }
    if a2 < 1.0 && c > 0.0 {
        let d = log_derivative_positive_zero(dens)?;
        let seeds: Vec<f64> = (0..SWEEP_SEEDS)
            .map(|i| c * i as f64 / (SWEEP_SEEDS - 1) as f64)
            .collect();
        let part: Vec<Option<Partners>> =
            par::map_slice(mode, &seeds, |&s| partners(dens, c, d, s).ok());

        for pattern in PATTERNS {
            for parity in [0usize, 1] {
                // Mass along the sweep for this shape and orientation.
                let mass_at = |p: &Partners| -> Option<f64> {
                    let points = realize(p, pattern)?;
                    region_mass_of(dens, &region_cells(&points, parity))
                };
                let masses: Vec<Option<f64>> =
                    part.iter().map(|p| p.as_ref().and_then(mass_at)).collect();
                for i in 0..SWEEP_SEEDS - 1 {
                    let (Some(m0), Some(m1)) = (masses[i], masses[i + 1]) else {
                        continue;
                    };
                    if (m0 - target) * (m1 - target) > 0.0 {
                        continue;
                    }
                    let residual = |s: f64| -> f64 {
                        partners(dens, c, d, s)
                            .ok()
                            .as_ref()
                            .and_then(mass_at)
                            .map_or(f64::NAN, |m| m - target)
                    };
                    let Ok(s_star) = roots::find_root(residual, seeds[i], seeds[i + 1], ROOT_TOL)
                    else {
                        continue;
                    };
                    let Ok(p) = partners(dens, c, d, s_star) else {
                        continue;
                    };
                    let Some(points) = realize(&p, pattern) else {
                        continue;
                    };
                    let region = region_cells(&points, parity);
                    if let Some(cand) = finalize_candidate(dens, c, points, region, target) {
                        if !found.iter().any(|f| same_candidate(f, &cand)) {
                            found.push(cand);
                        }
                    }
                }
            }
        }
    }

    found.sort_by(|x, y| {
        x.points
            .len()
            .cmp(&y.points.len())
            .then_with(|| {
                for (p, q) in x.points.iter().zip(&y.points) {
                    let ord = p.total_cmp(q);
                    if ord != std::cmp::Ordering::Equal {
                        return ord;
                    }
                }
                std::cmp::Ordering::Equal
            })
            .then_with(|| x.region[0].lo().total_cmp(&y.region[0].lo()))
    });
    Ok(found)
}

/// The region side at each point of a candidate, for curvature checks.
pub fn candidate_sides(cand: &CandidateClass) -> Vec<RegionSide> {
    region_sides(&cand.points, &cand.region)
}
