//! Independent brute-force minimizer over discretized k-point boundaries:
//! the ground-truth cross-check for every optimality claim on the line.
//!
//! The search fixes up to `k_max - 1` boundary points on a uniform grid,
//! then solves for the rightmost point continuously so the enclosed mass
//! hits the target exactly; both region orientations are searched. The
//! default mode prunes with exact feasibility bounds, a branch-and-bound
//! cut against the best perimeter found so far, and a stationarity band
//! on the fixed points. An exhaustive mode for small grids disables the
//! heuristic cuts and validates the pruned search in tests.

use crate::density::{DensityError, DoubleGaussianDensity, Interval, WeightedMeasure};
use crate::line::{ray_for_mass, BoundaryConfiguration, LineError};
use crate::par::{map_range, ExecMode};
use crate::report::format_sig17;
use crate::roots::{self, RootError};

/// Fixed points of one pruned-mode configuration may spread at most this
/// much in |ψ′| before the prefix is discarded; stationary boundaries
/// have equal |ψ′| at every point, so the band is generous slack.
pub const STATIONARITY_BAND: f64 = 0.2;

/// Largest grid for which the exhaustive mode is accepted.
pub const EXHAUSTIVE_GRID_LIMIT: usize = 401;

/// Search-space parameters of the brute-force minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Half-width of the symmetric grid box; `None` derives `1 + 8a`.
    pub domain_halfwidth: Option<f64>,
    /// Number of grid nodes; must be odd and at least 3 so the grid is
    /// symmetric about 0.
    pub grid_points: usize,
    /// Largest boundary-point count searched, between 1 and 6.
    pub k_max: usize,
    /// Accepted |mass − target| of the returned configuration.
    pub mass_tolerance: f64,
    /// Disables every heuristic cut (band, branch-and-bound, estimate);
    /// only exact feasibility pruning remains. Requires a grid of at
    /// most [`EXHAUSTIVE_GRID_LIMIT`] nodes.
    pub exhaustive: bool,
}

impl Default for OracleConfig {
    fn default() -> OracleConfig {
        OracleConfig {
            domain_halfwidth: None,
            grid_points: 4001,
            k_max: 4,
            mass_tolerance: 5e-4,
            exhaustive: false,
        }
    }
}

impl OracleConfig {
    fn validate(&self) -> Result<(), OracleError> {
        if self.grid_points < 3 || self.grid_points.is_multiple_of(2) {
            return Err(OracleError::InvalidGridPoints {
                points: self.grid_points,
            });
        }
        if !(1..=6).contains(&self.k_max) {
            return Err(OracleError::InvalidMaxBoundaryPoints { k_max: self.k_max });
        }
        if !(self.mass_tolerance > 0.0 && self.mass_tolerance.is_finite()) {
            return Err(OracleError::InvalidMassTolerance {
                value: self.mass_tolerance,
            });
        }
        if let Some(l) = self.domain_halfwidth {
            if !(l > 0.0 && l.is_finite()) {
                return Err(OracleError::InvalidHalfwidth { value: l });
            }
        }
        if self.exhaustive && self.grid_points > EXHAUSTIVE_GRID_LIMIT {
            return Err(OracleError::ExhaustiveGridTooLarge {
                points: self.grid_points,
                limit: EXHAUSTIVE_GRID_LIMIT,
            });
        }
        Ok(())
    }

    /// Effective half-width of the search box: the configured value, or
    /// `1 + 8a` which holds all but ~1e-15 of the mass.
    pub fn halfwidth(&self, dens: &DoubleGaussianDensity) -> f64 {
        self.domain_halfwidth
            .unwrap_or_else(|| 1.0 + 8.0 * dens.stddev())
    }
}

/// Errors from the oracle search.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    /// Grid node counts must be odd and at least 3.
    #[error("grid_points must be odd and >= 3, got {points}")]
    InvalidGridPoints { points: usize },
    /// The boundary-point cap must lie in 1..=6.
    #[error("k_max must be between 1 and 6, got {k_max}")]
    InvalidMaxBoundaryPoints { k_max: usize },
    /// The mass tolerance must be a positive finite number.
    #[error("mass_tolerance must be positive and finite, got {value}")]
    InvalidMassTolerance { value: f64 },
    /// The domain half-width must be a positive finite number.
    #[error("domain_halfwidth must be positive and finite, got {value}")]
    InvalidHalfwidth { value: f64 },
    /// The exhaustive mode refuses large grids.
    #[error("exhaustive mode allows at most {limit} grid points, got {points}")]
    ExhaustiveGridTooLarge { points: usize, limit: usize },
    /// Target masses must lie strictly between 0 and 1/2.
    #[error("target mass {value} is outside the open interval (0, 1/2)")]
    MassOutOfRange { value: f64 },
    /// No configuration reached the target mass; cannot happen for
    /// targets in (0, 1/2), where the ray always qualifies.
    #[error("no feasible configuration encloses mass {mass}")]
    NoFeasibleConfiguration { mass: f64 },
    /// The winning configuration's recomputed mass missed the target by
    /// more than the configured tolerance.
    #[error("snapped mass misses the target by {residual}, tolerance {tolerance}")]
    SnapResidual { residual: f64, tolerance: f64 },
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Line(#[from] LineError),
}

struct Tables {
    x: Vec<f64>,
    cdf: Vec<f64>,
    f: Vec<f64>,
    ap: Vec<f64>,
}

fn build_tables(dens: &DoubleGaussianDensity, halfwidth: f64, n: usize) -> Tables {
    let mid = (n - 1) / 2;
    let h = halfwidth / mid as f64;
    let x: Vec<f64> = (0..n).map(|i| (i as f64 - mid as f64) * h).collect();
    let cdf = x.iter().map(|&p| cdf_exact(dens, p)).collect();
    let f = x.iter().map(|&p| dens.density(p)).collect();
    let ap = x
        .iter()
        .map(|&p| dens.log_density_derivatives(p).0.abs())
        .collect();
    Tables { x, cdf, f, ap }
}

fn cdf_exact(dens: &DoubleGaussianDensity, p: f64) -> f64 {
    dens.interval_mass(f64::NEG_INFINITY, p)
        .map(|m| m.value())
        .unwrap_or(f64::NAN)
}

/// Inclusive index ranges over which |ψ′| is monotone on the grid.
fn monotone_pieces(ap: &[f64]) -> Vec<(usize, usize, bool)> {
    let n = ap.len();
    let mut pieces = Vec::new();
    let mut start = 0usize;
    let mut dir: Option<bool> = None;
    for i in 1..n {
        let step = match ap[i].partial_cmp(&ap[i - 1]) {
            Some(std::cmp::Ordering::Greater) => Some(true),
            Some(std::cmp::Ordering::Less) => Some(false),
            _ => None,
        };
        match (dir, step) {
            (None, Some(s)) => dir = Some(s),
            (Some(cur), Some(s)) if s != cur => {
                pieces.push((start, i - 1, cur));
                start = i;
                dir = Some(s);
            }
            _ => {}
        }
    }
    pieces.push((start, n - 1, dir.unwrap_or(true)));
    pieces
}

fn first_index<P: Fn(f64) -> bool>(ap: &[f64], s: usize, e: usize, pred: P) -> usize {
    let (mut lo, mut hi) = (s, e + 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(ap[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// One candidate found by the search, ordered by perimeter, then by
/// lexicographic points, then by orientation parity.
#[derive(Debug, Clone)]
struct Entry {
    perimeter: f64,
    points: Vec<f64>,
    parity: usize,
}

fn entry_less(a: &Entry, b: &Entry) -> bool {
    match a.perimeter.total_cmp(&b.perimeter) {
        std::cmp::Ordering::Less => return true,
        std::cmp::Ordering::Greater => return false,
        std::cmp::Ordering::Equal => {}
    }
    for (x, y) in a.points.iter().zip(&b.points) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    if a.points.len() != b.points.len() {
        return a.points.len() < b.points.len();
    }
    a.parity < b.parity
}

/// Solves CDF(p) = target with p strictly above `strictly_above`,
/// bracketing in the precomputed grid CDF (expanding beyond the box when
/// the target falls outside it), then polishing with Newton steps on the
/// exact CDF. Returns `None` when the residual cannot be driven below
/// 1e-10 or the solution does not clear `strictly_above`.
fn snap_to_mass(
    dens: &DoubleGaussianDensity,
    tables: &Tables,
    target: f64,
    strictly_above: f64,
) -> Option<f64> {
    let n = tables.x.len();
    let (mut lo, mut hi);
    if target >= tables.cdf[n - 1] {
        lo = tables.x[n - 1];
        hi = lo;
        let mut step = dens.stddev();
        for _ in 0..200 {
            hi += step;
            if cdf_exact(dens, hi) > target {
                break;
            }
            lo = hi;
            step *= 2.0;
        }
    } else if target <= tables.cdf[0] {
        hi = tables.x[0];
        lo = hi;
        let mut step = dens.stddev();
        for _ in 0..200 {
            lo -= step;
            if cdf_exact(dens, lo) < target {
                break;
            }
            hi = lo;
            step *= 2.0;
        }
    } else {
        let u = tables.cdf.partition_point(|&c| c <= target);
        lo = tables.x[u - 1];
        hi = tables.x[u];
    }
    let g = |p: f64| cdf_exact(dens, p) - target;
    let mut p = roots::find_root(g, lo, hi, 1e-13).ok()?;
    for _ in 0..2 {
        let d = dens.density(p);
        if d > 0.0 {
            p -= g(p) / d;
        }
    }
    if !(p.is_finite() && p > strictly_above && g(p).abs() <= 1e-10) {
        return None;
    }
    Some(p)
}

/// The enclosed region of sorted boundary points under parity `parity`:
/// the cells of the induced partition of the line carry indices 0..=k,
/// and a cell belongs to the region iff its index matches the parity.
fn region_for(points: &[f64], parity: usize) -> Result<Vec<Interval>, DensityError> {
    let k = points.len();
    let mut region = Vec::new();
    for cell in 0..=k {
        if cell % 2 != parity {
            continue;
        }
        region.push(if cell == 0 {
            Interval::ray_left(points[0])
        } else if cell == k {
            Interval::ray_right(points[k - 1])
        } else {
            Interval::new(points[cell - 1], points[cell])?
        });
    }
    Ok(region)
}

struct Search<'a> {
    dens: &'a DoubleGaussianDensity,
    t: &'a Tables,
    pieces: &'a [(usize, usize, bool)],
    target: f64,
    max_fixed: usize,
    exhaustive: bool,
}

struct ScanState<'b> {
    parity: usize,
    idx: Vec<usize>,
    best: Option<Entry>,
    cut: f64,
    baseline: &'b Entry,
}

impl Search<'_> {
    /// Enumerates every configuration whose leftmost fixed point is grid
    /// node `i1` and returns the best improvement over the baseline.
    fn scan_from(&self, i1: usize, baseline: &Entry) -> Option<Entry> {
        let mut st = ScanState {
            parity: 0,
            idx: Vec::with_capacity(self.max_fixed),
            best: None,
            cut: baseline.perimeter,
            baseline,
        };
        for parity in 0..2usize {
            let m1 = if parity == 0 { self.t.cdf[i1] } else { 0.0 };
            if m1 >= self.target {
                continue;
            }
            if self.target - m1 >= 1.0 - self.t.cdf[i1] {
                continue;
            }
            if !self.exhaustive && self.t.f[i1] >= st.cut {
                continue;
            }
            st.parity = parity;
            st.idx.clear();
            st.idx.push(i1);
            let ap = self.t.ap[i1];
            self.descend(&mut st, m1, self.t.f[i1], ap, ap);
        }
        st.best
    }

    fn descend(&self, st: &mut ScanState, m_pre: f64, partial: f64, ap_lo: f64, ap_hi: f64) {
        self.complete(st, m_pre, partial);
        if st.idx.len() >= self.max_fixed {
            return;
        }
        let prev = *st.idx.last().unwrap();
        let cell_in = st.idx.len() % 2 == st.parity;
        if cell_in && self.target - m_pre + self.t.cdf[prev] >= 1.0 {
            return;
        }
        let break_cdf = 1.0 - self.target + m_pre;
        let windows = self.extension_windows(ap_lo, ap_hi, prev);
        for (ws, we) in windows {
            for j in ws..=we {
                let m_new = if cell_in {
                    let m = m_pre + (self.t.cdf[j] - self.t.cdf[prev]);
                    if m >= self.target {
                        break;
                    }
                    m
                } else {
                    if self.t.cdf[j] >= break_cdf {
                        break;
                    }
                    m_pre
                };
                let partial_new = partial + self.t.f[j];
                if !self.exhaustive && partial_new >= st.cut {
                    continue;
                }
                st.idx.push(j);
                let ap_j = self.t.ap[j];
                self.descend(st, m_new, partial_new, ap_lo.min(ap_j), ap_hi.max(ap_j));
                st.idx.pop();
            }
        }
    }

    /// Index ranges of admissible next fixed points: strictly right of
    /// `prev`, and inside the |ψ′| band of the prefix unless exhaustive.
    fn extension_windows(&self, ap_lo: f64, ap_hi: f64, prev: usize) -> Vec<(usize, usize)> {
        let n = self.t.x.len();
        if prev + 1 >= n {
            return Vec::new();
        }
        if self.exhaustive {
            return vec![(prev + 1, n - 1)];
        }
        let level_lo = ap_hi - STATIONARITY_BAND;
        let level_hi = ap_lo + STATIONARITY_BAND;
        let ap = &self.t.ap;
        let mut out = Vec::new();
        for &(s, e, asc) in self.pieces {
            if e <= prev {
                continue;
            }
            let (mut ws, we) = if asc {
                let ws = first_index(ap, s, e, |v| v >= level_lo);
                let we = first_index(ap, s, e, |v| v > level_hi);
                (ws, we.wrapping_sub(1))
            } else {
                let ws = first_index(ap, s, e, |v| v <= level_hi);
                let we = first_index(ap, s, e, |v| v < level_lo);
                (ws, we.wrapping_sub(1))
            };
            ws = ws.max(prev + 1);
            if ws <= we && we <= e {
                out.push((ws, we));
            }
        }
        out
    }

    /// Snaps the final point of the current prefix and records the
    /// resulting configuration if it beats the best entry so far.
    fn complete(&self, st: &mut ScanState, m_pre: f64, partial: f64) {
        let last = *st.idx.last().unwrap();
        let r = self.target - m_pre;
        if r < 1e-14 {
            return;
        }
        let bounded_in = st.idx.len() % 2 == st.parity;
        let v = if bounded_in {
            self.t.cdf[last] + r
        } else {
            1.0 - r
        };
        if !self.exhaustive {
            if let Some(est) = self.density_at_mass_estimate(v) {
                if partial + 0.98 * est >= st.cut + 1e-12 {
                    return;
                }
            }
        }
        let Some(p) = snap_to_mass(self.dens, self.t, v, self.t.x[last]) else {
            return;
        };
        let perimeter = partial + self.dens.density(p);
        if perimeter > st.cut {
            return;
        }
        let mut points: Vec<f64> = st.idx.iter().map(|&i| self.t.x[i]).collect();
        points.push(p);
        let cand = Entry {
            perimeter,
            points,
            parity: st.parity,
        };
        let improves = match &st.best {
            Some(b) => entry_less(&cand, b),
            None => entry_less(&cand, st.baseline),
        };
        if improves {
            st.cut = st.cut.min(cand.perimeter);
            st.best = Some(cand);
        }
    }

    /// Secant estimate of the density at the point whose CDF is `v`,
    /// from the bracketing grid cell; used only as a pre-cut, with the
    /// exact snap deciding every near-tie.
    fn density_at_mass_estimate(&self, v: f64) -> Option<f64> {
        let cdf = &self.t.cdf;
        let n = cdf.len();
        if v <= cdf[0] || v >= cdf[n - 1] {
            return None;
        }
        let u = cdf.partition_point(|&c| c <= v);
        let (c0, c1) = (cdf[u - 1], cdf[u]);
        let (f0, f1) = (self.t.f[u - 1], self.t.f[u]);
        let w = c1 - c0;
        if w <= 0.0 {
            return Some(f0.min(f1));
        }
        Some(f0 + (v - c0) * (f1 - f0) / w)
    }
}

/// Minimum-perimeter boundary over all grid configurations of up to
/// `cfg.k_max` points enclosing mass `target`, with the rightmost point
/// solved continuously so the mass is exact.
pub fn brute_force_minimum(
    dens: &DoubleGaussianDensity,
    target: WeightedMeasure,
    cfg: &OracleConfig,
    mode: ExecMode,
) -> Result<BoundaryConfiguration, OracleError> {
    cfg.validate()?;
    let a = target.value();
    if !(a > 0.0 && a < 0.5) {
        return Err(OracleError::MassOutOfRange { value: a });
    }
    let n = cfg.grid_points;
    let tables = build_tables(dens, cfg.halfwidth(dens), n);
    let pieces = monotone_pieces(&tables.ap);

    let ray = ray_for_mass(dens, a)?;
    let mut best = Entry {
        perimeter: ray.perimeter,
        points: ray.points.clone(),
        parity: 1,
    };
    for (parity, v) in [(0usize, a), (1usize, 1.0 - a)] {
        if let Some(p) = snap_to_mass(dens, &tables, v, f64::NEG_INFINITY) {
            let cand = Entry {
                perimeter: dens.density(p),
                points: vec![p],
                parity,
            };
            if entry_less(&cand, &best) {
                best = cand;
            }
        }
    }

    if cfg.k_max >= 2 {
        let search = Search {
            dens,
            t: &tables,
            pieces: &pieces,
            target: a,
            max_fixed: cfg.k_max - 1,
            exhaustive: cfg.exhaustive,
        };
        let baseline = best.clone();
        let found = map_range(mode, n, |i1| search.scan_from(i1, &baseline));
        for entry in found.into_iter().flatten() {
            if entry_less(&entry, &best) {
                best = entry;
            }
        }
    }

    let region = region_for(&best.points, best.parity)?;
    let config = BoundaryConfiguration::from_parts(dens, best.points, region)?;
    let residual = (config.mass.value() - a).abs();
    if residual > cfg.mass_tolerance {
        return Err(OracleError::SnapResidual {
            residual,
            tolerance: cfg.mass_tolerance,
        });
    }
    Ok(config)
}

/// One line of the isoperimetric profile: the ray solution against the
/// oracle's best find at the same mass.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ProfileRow {
    pub mass: f64,
    pub ray_point: f64,
    pub ray_perimeter: f64,
    pub oracle_perimeter: f64,
    /// Oracle best minus ray perimeter; nonnegative up to arithmetic
    /// noise when rays are optimal.
    pub gap: f64,
}

/// Profile of ray-vs-oracle perimeters over a mass grid.
pub fn profile_table(
    dens: &DoubleGaussianDensity,
    masses: &[f64],
    cfg: &OracleConfig,
    mode: ExecMode,
) -> Result<Vec<ProfileRow>, OracleError> {
    let mut rows = Vec::with_capacity(masses.len());
    for &mass in masses {
        let ray = ray_for_mass(dens, mass)?;
        let best = brute_force_minimum(dens, WeightedMeasure::new(mass)?, cfg, mode)?;
        rows.push(ProfileRow {
            mass,
            ray_point: ray.points[0],
            ray_perimeter: ray.perimeter,
            oracle_perimeter: best.perimeter,
            gap: best.perimeter - ray.perimeter,
        });
    }
    Ok(rows)
}

/// Full oracle result for one (variance, mass) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub variance: f64,
    pub mass: f64,
    pub best: BoundaryConfiguration,
    pub ray_perimeter: f64,
    pub gap: f64,
}

/// Oracle best configurations over a mass grid.
pub fn oracle_rows(
    dens: &DoubleGaussianDensity,
    masses: &[f64],
    cfg: &OracleConfig,
    mode: ExecMode,
) -> Result<Vec<OracleRow>, OracleError> {
    let mut rows = Vec::with_capacity(masses.len());
    for &mass in masses {
        let ray = ray_for_mass(dens, mass)?;
        let best = brute_force_minimum(dens, WeightedMeasure::new(mass)?, cfg, mode)?;
        rows.push(OracleRow {
            variance: dens.variance(),
            mass,
            gap: best.perimeter - ray.perimeter,
            ray_perimeter: ray.perimeter,
            best,
        });
    }
    Ok(rows)
}

/// Writes oracle rows as CSV with columns a2, A, k, one point column per
/// possible boundary point (blank when unused), mass, perimeter,
/// ray_perimeter, gap.
pub fn write_oracle_csv<W: std::io::Write>(
    writer: W,
    rows: &[OracleRow],
    k_max: usize,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = vec!["a2".into(), "A".into(), "k".into()];
    for i in 1..=k_max {
        header.push(format!("p{i}"));
    }
    header.extend(
        ["mass", "perimeter", "ray_perimeter", "gap"]
            .iter()
            .map(|s| s.to_string()),
    );
    w.write_record(&header)?;
    for row in rows {
        let mut rec: Vec<String> = vec![
            format_sig17(row.variance),
            format_sig17(row.mass),
            row.best.points.len().to_string(),
        ];
        for i in 0..k_max {
            rec.push(
                row.best
                    .points
                    .get(i)
                    .map(|&p| format_sig17(p))
                    .unwrap_or_default(),
            );
        }
        rec.push(format_sig17(row.best.mass.value()));
        rec.push(format_sig17(row.best.perimeter));
        rec.push(format_sig17(row.ray_perimeter));
        rec.push(format_sig17(row.gap));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
