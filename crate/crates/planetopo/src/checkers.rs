//! Theorem-level checks tying the index and variation machinery together.
//!
//! Each checker takes a concrete map and curve, verifies the hypotheses of
//! one statement mechanically (sampled where the statement quantifies over a
//! continuum), and reports whether the claimed identity holds for the
//! computed integers:
//!
//! * [`check_index_variation`] — the master identity
//!   `ind(f, S) = var(f, S) + 1` for a partitioned simple closed curve.
//! * [`check_lollipop`] — the lollipop identity: a crosscut arc `I` from
//!   `a_0` to `a_{n+1}` splits `T(S)` into two sides; whichever side
//!   receives `f(a_{n+1})` satisfies `Σ var + 1 = ind` along its boundary
//!   loop, and when the loop index vanishes some arc on that side carries
//!   negative variation.
//! * [`check_hull_index`] — a fixed-point-free map sending `S` into `T(S)`
//!   has index exactly `1`.
//! * [`locate_fixed_point`] / [`locate_all_fixed_points`] — certified
//!   quadtree search: a nonzero boundary index is subdivided (with jittered
//!   cuts when a fixed point blocks a cut line) until a point with residual
//!   below `10·tol` is produced, or absence is certified by index `0`.
//! * [`check_period_two`] — the locator applied to `f ∘ f`.

use crate::curve::region::polyline_min_dist;
use crate::curve::{point_segment_dist, OrientedClosedCurve};
use crate::error::{Error, Result};
use crate::geom::{Point, Window};
use crate::maps::PlaneMap;
use crate::variation::{
    hull_raster, make_junction, variation_total, ArcRecord, VariationReport,
    DEFAULT_CELLS_ACROSS, HULL_MEMBERSHIP_TOL, SEPARATION_TOL,
};
use crate::winding::{index, winding_number, NEAR_ZERO};

/// A stick endpoint must project onto the curve within this distance and
/// match a partition parameter within this fraction of the loop.
pub const ON_CURVE_TOL: f64 = 1e-7;
/// The decisive image `f(a_{n+1})` must clear both dividing arcs by this
/// distance, otherwise the side decision is ambiguous.
pub const SIDE_GUARD: f64 = 1e-6;
/// A located fixed point is accepted when `|f(x) - x| < RESIDUAL_FACTOR·tol`.
pub const RESIDUAL_FACTOR: f64 = 10.0;
/// Jittered subdivision cuts tried before giving up on a blocked box.
pub const MAX_CUT_RETRIES: usize = 8;
/// Samples per curve or polyline when checking pointwise hypotheses.
pub const HYPOTHESIS_SAMPLES: usize = 512;
/// Raster density (cells across) for seeding the fixed-point-freeness scan.
pub const FPF_CELLS_ACROSS: f64 = 96.0;

// --------------------------------------------------------------------------
// ind = var + 1
// --------------------------------------------------------------------------

/// Outcome of [`check_index_variation`].
#[derive(Debug, Clone)]
pub struct IndexVariationReport {
    /// Fixed-point index `ind(f, S)`.
    pub index: i32,
    /// Total variation `var(f, S)` over the given partition.
    pub variation: i32,
    /// Whether `index == variation + 1`.
    pub identity_holds: bool,
    /// Per-arc variation records (diagnostics).
    pub arcs: Vec<ArcRecord>,
}

/// Verify `ind(f, S) = var(f, S) + 1` on the partition `a_0 < … < a_m`.
///
/// The partition hypotheses (`f(a_i) ∈ T(S)`, `f(A_i) ∩ A_i = ∅`) are
/// enforced by the variation computation; the index is computed
/// independently by the certified argument lift, so agreement is a genuine
/// cross-check rather than a tautology.
pub fn check_index_variation(
    f: &PlaneMap,
    s: &OrientedClosedCurve,
    partition: &[f64],
) -> Result<IndexVariationReport> {
    let report: VariationReport = variation_total(f, s, partition)?;
    let ind = index(f, s)?;
    Ok(IndexVariationReport {
        index: ind,
        variation: report.total,
        identity_holds: ind == report.total + 1,
        arcs: report.arcs,
    })
}

// --------------------------------------------------------------------------
// The lollipop identity
// --------------------------------------------------------------------------

/// Which side of the stick received `f(a_{n+1})`.
///
/// `Right` is the side bounded by the positively oriented subarc
/// `[a_0, a_{n+1}]` of `S` together with the stick; `Left` is bounded by
/// the complementary subarc `[a_{n+1}, a_0]` and the stick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LollipopSide {
    Right,
    Left,
}

/// Outcome of [`check_lollipop`].
#[derive(Debug, Clone)]
pub struct LollipopReport {
    /// Side of the stick containing `f(a_{n+1})`.
    pub side: LollipopSide,
    /// Sum of the arc variations on the decided side.
    pub side_variation: i32,
    /// Index of `f` along the decided side's boundary loop (stick plus
    /// subarc), positively oriented.
    pub loop_index: i32,
    /// Whether `side_variation + 1 == loop_index`.
    pub identity_holds: bool,
    /// Index of `f` along the full curve `S` (for reference; `0` whenever
    /// `f` is fixed-point free on `T(S)`).
    pub curve_index: i32,
    /// Position in `arcs` of a negative-variation arc on the decided side,
    /// when one exists. Whenever `loop_index == 0` and the identity holds,
    /// this is guaranteed to be `Some`.
    pub negative_arc: Option<usize>,
    /// Per-arc variation records for the whole partition.
    pub arcs: Vec<ArcRecord>,
}

/// Counterclockwise parameter offset from `from` to `to` on the unit loop.
fn ccw_offset(from: f64, to: f64) -> f64 {
    (to - from).rem_euclid(1.0)
}

/// Arclength-uniform resampling of an open polyline, endpoints included.
fn sample_polyline(pts: &[Point], n: usize) -> Vec<Point> {
    let mut cum = Vec::with_capacity(pts.len());
    cum.push(0.0);
    for w in pts.windows(2) {
        cum.push(cum.last().unwrap() + w[0].dist(w[1]));
    }
    let total = *cum.last().unwrap();
    if total <= 0.0 {
        return vec![pts[0]];
    }
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let target = total * k as f64 / n as f64;
        let i = match cum.binary_search_by(|c| c.total_cmp(&target)) {
            Ok(i) => i.min(pts.len() - 2),
            Err(i) => (i - 1).min(pts.len() - 2),
        };
        let seg = cum[i + 1] - cum[i];
        let u = if seg > 0.0 { (target - cum[i]) / seg } else { 0.0 };
        out.push(pts[i].lerp(pts[i + 1], u));
    }
    out
}

/// Distance from `p` to an open polyline.
fn point_polyline_dist(p: Point, pts: &[Point]) -> f64 {
    if pts.len() < 2 {
        return p.dist(pts[0]);
    }
    pts.windows(2)
        .map(|w| point_segment_dist(p, w[0], w[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Twice the signed area of a closed vertex loop.
fn signed_area2(v: &[Point]) -> f64 {
    let mut a = 0.0;
    for i in 0..v.len() {
        a += v[i].cross(v[(i + 1) % v.len()]);
    }
    a
}

/// Vertex loop of one lollipop side: the exact subarc of `s` from
/// `t_start` counterclockwise to `t_end`, followed by the stick interior
/// (`interior` must already run from the `t_end` endpoint back towards
/// `t_start`).
fn side_loop(
    s: &OrientedClosedCurve,
    t_start: f64,
    t_end: f64,
    interior: &[Point],
) -> Vec<Point> {
    let span = ccw_offset(t_start, t_end);
    let mut inner: Vec<(f64, Point)> = (0..s.vertices().len())
        .filter_map(|i| {
            let off = ccw_offset(t_start, s.vertex_param(i));
            (off > 1e-9 && off < span - 1e-9).then(|| (off, s.vertices()[i]))
        })
        .collect();
    inner.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut verts = Vec::with_capacity(inner.len() + interior.len() + 2);
    verts.push(s.point_at(t_start));
    verts.extend(inner.into_iter().map(|(_, p)| p));
    verts.push(s.point_at(t_end));
    verts.extend_from_slice(interior);
    verts
}

/// Minimum of `|f(x) - x|` over the seeds, sharpened by a shrinking
/// pattern search from the best seed (the sampled stand-in for "`f` is
/// fixed point free on the region the seeds cover").
fn refined_min_displacement(f: &PlaneMap, seeds: &[Point], step0: f64) -> (Point, f64) {
    let res = |p: Point| (f.eval_pt(p) - p).norm();
    let mut best_p = seeds[0];
    let mut best_r = res(best_p);
    for &p in &seeds[1..] {
        let r = res(p);
        if r < best_r {
            best_p = p;
            best_r = r;
        }
    }
    let dirs = [
        Point::new(1.0, 0.0),
        Point::new(-1.0, 0.0),
        Point::new(0.0, 1.0),
        Point::new(0.0, -1.0),
        Point::new(1.0, 1.0),
        Point::new(-1.0, 1.0),
        Point::new(1.0, -1.0),
        Point::new(-1.0, -1.0),
    ];
    let mut step = step0;
    while step > 1e-10 {
        let mut improved = false;
        for d in dirs {
            let q = best_p + d * step;
            let r = res(q);
            if r < best_r {
                best_p = q;
                best_r = r;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best_p, best_r)
}

/// Verify the lollipop identity for the stick `stick` (the arc `I`).
///
/// `stick` is an open polyline inside `T(S)` from `a_0` to `a_{n+1}`; both
/// endpoints must lie on `S` at partition parameters, and the interior must
/// avoid `S`. Hypotheses checked (sampled): `f` fixed point free on `T(S)`;
/// `f(a_i) ∈ T(S)` and `f(A_i) ∩ A_i = ∅` for every partition arc; a
/// junction at `a_0` exterior to `T(S)` with `f(I) ∩ (I ∪ J) = ∅`. The side
/// containing `f(a_{n+1})` is decided by exact winding numbers of the two
/// side loops, guarded by a minimum clearance of [`SIDE_GUARD`] from the
/// dividing arcs; an ambiguous decision is a hypothesis violation.
pub fn check_lollipop(
    f: &PlaneMap,
    s: &OrientedClosedCurve,
    partition: &[f64],
    stick: &[Point],
) -> Result<LollipopReport> {
    if stick.len() < 2 {
        return Err(Error::HypothesisViolation(
            "the stick needs at least two vertices".into(),
        ));
    }
    let (t0, d0) = s.project(stick[0]);
    let (t1, d1) = s.project(*stick.last().unwrap());
    if d0 > ON_CURVE_TOL || d1 > ON_CURVE_TOL {
        return Err(Error::HypothesisViolation(format!(
            "stick endpoints must lie on S (distances {d0:.3e}, {d1:.3e})"
        )));
    }
    if ccw_offset(t0, t1).min(ccw_offset(t1, t0)) < 1e-7 {
        return Err(Error::HypothesisViolation(
            "stick endpoints coincide on S".into(),
        ));
    }

    // The stick stays in T(S) and meets S only at its endpoints.
    let dense = sample_polyline(stick, HYPOTHESIS_SAMPLES);
    let stick_len: f64 = stick.windows(2).map(|w| w[0].dist(w[1])).sum();
    for (k, &q) in dense.iter().enumerate() {
        if !s.contains_closed(q, HULL_MEMBERSHIP_TOL) {
            return Err(Error::HypothesisViolation(format!(
                "stick leaves T(S) at {q:?}"
            )));
        }
        let arclen = stick_len * k as f64 / (dense.len() - 1) as f64;
        let from_end = arclen.min(stick_len - arclen);
        if from_end > 0.02 * stick_len && s.project(q).1 <= SIDE_GUARD {
            return Err(Error::HypothesisViolation(format!(
                "stick touches S away from its endpoints at {q:?}"
            )));
        }
    }

    // Workspace window covering S, the stick, and every image in play.
    let mut pts: Vec<Point> = s.vertices().to_vec();
    pts.extend_from_slice(stick);
    for k in 0..1024 {
        pts.push(f.eval_pt(s.point_at(k as f64 / 1024.0)));
    }
    let rough = Window::around(&pts, 0.0)?;
    let window = Window::around(&pts, 0.15 * rough.extent() + 0.5)?;

    // f fixed point free on T(S), sampled on a raster of the hull plus the
    // curve and stick, then sharpened locally.
    let coarse = hull_raster(s, window, FPF_CELLS_ACROSS)?;
    let mut seeds = coarse.marked_centers();
    for k in 0..HYPOTHESIS_SAMPLES {
        seeds.push(s.point_at(k as f64 / HYPOTHESIS_SAMPLES as f64));
    }
    seeds.extend_from_slice(&dense);
    let (near, min_disp) = refined_min_displacement(f, &seeds, coarse.cell_size());
    if min_disp <= NEAR_ZERO {
        return Err(Error::HypothesisViolation(format!(
            "f has a near-fixed point at {near:?} (|f(x)-x| = {min_disp:.3e}); \
             the lollipop needs f fixed point free on T(S)"
        )));
    }

    // Partition hypotheses and per-arc variations.
    let report = variation_total(f, s, partition)?;
    let find_param = |t: f64| -> Option<f64> {
        report
            .arcs
            .iter()
            .map(|a| a.a)
            .find(|&a| ccw_offset(a, t).min(ccw_offset(t, a)) <= 1e-7)
    };
    let t0 = find_param(t0).ok_or_else(|| {
        Error::HypothesisViolation("the stick must start at a partition point".into())
    })?;
    let t1 = find_param(t1).ok_or_else(|| {
        Error::HypothesisViolation("the stick must end at a partition point".into())
    })?;

    // Junction at a_0 exterior to T(S), avoided by f(I).
    let avoid = hull_raster(s, window, DEFAULT_CELLS_ACROSS)?;
    let junction = make_junction(&avoid, s.point_at(t0))?;
    let image: Vec<Point> = dense.iter().map(|&q| f.eval_pt(q)).collect();
    let to_stick = polyline_min_dist(&image, &dense);
    if to_stick <= SEPARATION_TOL {
        return Err(Error::HypothesisViolation(format!(
            "f(I) meets I (sampled distance {to_stick:.3e})"
        )));
    }
    for (label, ray) in junction.rays() {
        let d = polyline_min_dist(&image, ray);
        if d <= SEPARATION_TOL {
            return Err(Error::HypothesisViolation(format!(
                "f(I) meets the junction ray {} at distance {d:.3e}",
                label.as_char()
            )));
        }
    }

    // Decide the side of f(a_{n+1}) by exact winding, with a clearance
    // guard against the dividing arcs.
    let q = f.eval_pt(s.point_at(t1));
    if point_polyline_dist(q, stick) <= SIDE_GUARD || s.project(q).1 <= SIDE_GUARD {
        return Err(Error::HypothesisViolation(format!(
            "f(a_{{n+1}}) = {q:?} lies on a dividing arc; the side is undecidable"
        )));
    }
    let interior_rev: Vec<Point> = stick[1..stick.len() - 1].iter().rev().copied().collect();
    let interior_fwd: Vec<Point> = stick[1..stick.len() - 1].to_vec();
    let right_loop = side_loop(s, t0, t1, &interior_rev);
    let left_loop = side_loop(s, t1, t0, &interior_fwd);
    let in_right = winding_number(&right_loop, q)? != 0;
    let in_left = winding_number(&left_loop, q)? != 0;
    if in_right == in_left {
        return Err(Error::HypothesisViolation(format!(
            "side decision for f(a_{{n+1}}) = {q:?} is ambiguous \
             (right: {in_right}, left: {in_left})"
        )));
    }
    let side = if in_right { LollipopSide::Right } else { LollipopSide::Left };

    // Sum the decided side's arc variations: an arc belongs to the right
    // side when its midpoint lies on the ccw subarc from t0 to t1.
    let span_right = ccw_offset(t0, t1);
    let on_right = |arc: &ArcRecord| {
        let mid = arc.a + 0.5 * ccw_offset(arc.a, arc.b);
        ccw_offset(t0, mid) < span_right
    };
    let mut side_variation = 0;
    let mut negative_arc = None;
    for (i, arc) in report.arcs.iter().enumerate() {
        let on_side = match side {
            LollipopSide::Right => on_right(arc),
            LollipopSide::Left => !on_right(arc),
        };
        if on_side {
            side_variation += arc.var;
            if arc.var < 0 && negative_arc.is_none() {
                negative_arc = Some(i);
            }
        }
    }

    // Index along the decided side's boundary loop, positively oriented.
    let mut loop_verts = match side {
        LollipopSide::Right => right_loop,
        LollipopSide::Left => left_loop,
    };
    if signed_area2(&loop_verts) < 0.0 {
        loop_verts.reverse();
    }
    let loop_curve = OrientedClosedCurve::from_vertices(loop_verts).map_err(|e| {
        Error::HypothesisViolation(format!("stick plus subarc is not a simple loop: {e}"))
    })?;
    let loop_index = index(f, &loop_curve)?;
    let curve_index = index(f, s)?;

    Ok(LollipopReport {
        side,
        side_variation,
        loop_index,
        identity_holds: side_variation + 1 == loop_index,
        curve_index,
        negative_arc,
        arcs: report.arcs,
    })
}

// --------------------------------------------------------------------------
// Maps into the hull
// --------------------------------------------------------------------------

/// Outcome of [`check_hull_index`].
#[derive(Debug, Clone, Copy)]
pub struct HullIndexReport {
    /// Computed `ind(f, S)`.
    pub index: i32,
    /// Whether the index equals `1` as the statement demands.
    pub holds: bool,
}

/// Verify that a fixed-point-free map sending `S` into `T(S)` has index
/// `1` along `S`.
///
/// Both hypotheses are sampled on [`HYPOTHESIS_SAMPLES`] curve points:
/// every image must lie in the closed hull and the displacement must stay
/// above [`NEAR_ZERO`] (the certified lift re-checks the latter with local
/// refinement while integrating).
pub fn check_hull_index(f: &PlaneMap, s: &OrientedClosedCurve) -> Result<HullIndexReport> {
    for k in 0..HYPOTHESIS_SAMPLES {
        let x = s.point_at(k as f64 / HYPOTHESIS_SAMPLES as f64);
        let y = f.eval_pt(x);
        if !s.contains_closed(y, HULL_MEMBERSHIP_TOL) {
            return Err(Error::HypothesisViolation(format!(
                "f({x:?}) = {y:?} lies outside T(S)"
            )));
        }
        if (y - x).norm() <= NEAR_ZERO {
            return Err(Error::HypothesisViolation(format!(
                "f has a near-fixed point on S at {x:?}"
            )));
        }
    }
    let ind = index(f, s).map_err(|e| match e {
        Error::FixedPointOnCurve { at, .. } => Error::HypothesisViolation(format!(
            "f has a near-fixed point on S at {at:?}"
        )),
        other => other,
    })?;
    Ok(HullIndexReport { index: ind, holds: ind == 1 })
}

// --------------------------------------------------------------------------
// Certified fixed-point location
// --------------------------------------------------------------------------

/// A certified near-fixed point.
#[derive(Debug, Clone, Copy)]
pub struct Located {
    pub point: Point,
    /// `|f(point) - point|`, always below `RESIDUAL_FACTOR · tol`.
    pub residual: f64,
}

/// Outcome of a fixed-point search over a window.
#[derive(Debug, Clone, Copy)]
pub enum FixedPointOutcome {
    /// A point with residual below `RESIDUAL_FACTOR · tol`.
    Found(Located),
    /// No fixed point: the boundary index of the searched window is `0`.
    Absent { boundary_index: i32 },
}

/// Relative growth factors for jittering a window whose boundary passes
/// near a fixed point. Growth (rather than shrinking) keeps every point of
/// the original window inside the searched region.
const JITTER_GROWTH: [f64; MAX_CUT_RETRIES + 1] =
    [0.0, 0.0137, 0.0281, 0.0419, 0.0563, 0.0701, 0.0847, 0.0983, 0.1129];

/// Subdivision cut fractions, tried in order when a cut line lands on a
/// fixed point.
const CUT_FRACTIONS: [(f64, f64); MAX_CUT_RETRIES + 1] = [
    (0.5, 0.5),
    (0.53, 0.47),
    (0.46, 0.55),
    (0.57, 0.52),
    (0.44, 0.43),
    (0.52, 0.58),
    (0.41, 0.49),
    (0.55, 0.41),
    (0.48, 0.54),
];

fn validate_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::HypothesisViolation(format!(
            "tolerance must be a positive finite number, got {tol}"
        )));
    }
    Ok(())
}

fn rect_index(f: &PlaneMap, w: &Window) -> Result<i32> {
    let s = OrientedClosedCurve::rectangle(w.center(), 0.5 * w.width(), 0.5 * w.height())?;
    index(f, &s)
}

enum RootIndex {
    Certified(Window, i32),
    Hit(Located),
}

/// Boundary index of (a jittered inflation of) `window`. When the boundary
/// passes within `RESIDUAL_FACTOR·tol` of a fixed point and `accept_hit` is
/// set, that point is returned directly; otherwise inflation retries move
/// the boundary off the fixed point.
fn root_index(f: &PlaneMap, window: Window, tol: f64, accept_hit: bool) -> Result<RootIndex> {
    let mut last_at = window.center();
    for &g in &JITTER_GROWTH {
        let px = g * window.width();
        let py = g * window.height();
        let w = Window::new(window.x0 - px, window.y0 - py, window.x1 + px, window.y1 + py);
        match rect_index(f, &w) {
            Ok(i) => return Ok(RootIndex::Certified(w, i)),
            Err(Error::FixedPointOnCurve { at, min, .. }) => {
                if accept_hit && min < RESIDUAL_FACTOR * tol {
                    return Ok(RootIndex::Hit(Located { point: at, residual: min }));
                }
                last_at = at;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::BoundaryFixedPoint(last_at))
}

fn quadrants(w: &Window, fx: f64, fy: f64) -> [Window; 4] {
    let xc = w.x0 + fx * w.width();
    let yc = w.y0 + fy * w.height();
    [
        Window::new(w.x0, w.y0, xc, yc),
        Window::new(xc, w.y0, w.x1, yc),
        Window::new(w.x0, yc, xc, w.y1),
        Window::new(xc, yc, w.x1, w.y1),
    ]
}

/// Below this scale (relative to the coordinate magnitude) boundary curves
/// become too small for the absolute geometric tolerances; the descent
/// switches from certified subdivision to local refinement.
const REFINE_FLOOR: f64 = 2e-7;

/// Narrow a window of nonzero boundary index down to a point with residual
/// below `RESIDUAL_FACTOR·tol`.
///
/// Subdivision runs while the box is large; once the box reaches the
/// refinement floor the enclosed fixed point is already certified, and a
/// shrinking pattern search polishes the center to the requested residual.
fn descend(f: &PlaneMap, start: Window, tol: f64) -> Result<Located> {
    let mut w = start;
    loop {
        let c = w.center();
        let r = (f.eval_pt(c) - c).norm();
        if r <= tol {
            return Ok(Located { point: c, residual: r });
        }
        if w.extent() <= tol.max(REFINE_FLOOR * (1.0 + c.norm())) {
            let (p, r) = refined_min_displacement(f, &[c], w.extent());
            if r < RESIDUAL_FACTOR * tol {
                return Ok(Located { point: p, residual: r });
            }
            return Err(Error::CertificationFailed { depth: 0, worst: r });
        }
        let mut next = None;
        let mut blocked_at = c;
        'cuts: for &(fx, fy) in &CUT_FRACTIONS {
            for q in quadrants(&w, fx, fy) {
                match rect_index(f, &q) {
                    Ok(0) => {}
                    Ok(_) => {
                        next = Some(q);
                        break 'cuts;
                    }
                    Err(Error::FixedPointOnCurve { at, min, .. }) => {
                        if min < RESIDUAL_FACTOR * tol {
                            return Ok(Located { point: at, residual: min });
                        }
                        blocked_at = at;
                        continue 'cuts;
                    }
                    Err(e) => return Err(e),
                }
            }
            // All four quadrants certified to index zero: the cut must have
            // split a cancelling pair; a different cut can separate them.
        }
        match next {
            Some(q) => w = q,
            None => {
                // Every cut line passes near the fixed point: the box is at
                // the certification scale, so polish the best known point.
                let (p, r) = refined_min_displacement(f, &[blocked_at, c], w.extent());
                if r < RESIDUAL_FACTOR * tol {
                    return Ok(Located { point: p, residual: r });
                }
                return Err(Error::BoundaryFixedPoint(blocked_at));
            }
        }
    }
}

/// Split `w` into four certified sub-windows, jittering the cut point when
/// a cut line lands on a fixed point. A hit within tolerance is still only
/// one point — other fixed points may hide in the siblings — so the cut is
/// moved rather than returned early.
fn split_certified(f: &PlaneMap, w: &Window) -> Result<Vec<(Window, i32)>> {
    let mut blocked_at = w.center();
    'cuts: for &(fx, fy) in &CUT_FRACTIONS {
        let mut out = Vec::with_capacity(4);
        for q in quadrants(w, fx, fy) {
            match rect_index(f, &q) {
                Ok(i) => out.push((q, i)),
                Err(Error::FixedPointOnCurve { at, .. }) => {
                    blocked_at = at;
                    continue 'cuts;
                }
                Err(e) => return Err(e),
            }
        }
        return Ok(out);
    }
    Err(Error::BoundaryFixedPoint(blocked_at))
}

/// Search `window` for one fixed point of `f`.
///
/// Returns [`FixedPointOutcome::Absent`] with the certified boundary index
/// `0` when the window holds no fixed point, and otherwise a point whose
/// residual `|f(x) - x|` is below `RESIDUAL_FACTOR · tol`. The search is a
/// quadtree descent along nonzero boundary indices; a cut line passing
/// near a fixed point is jittered up to [`MAX_CUT_RETRIES`] times before
/// [`Error::BoundaryFixedPoint`] is reported. A window boundary or center
/// already within tolerance short-circuits, which also covers maps (such
/// as involutions composed with themselves) whose displacement vanishes
/// identically.
pub fn locate_fixed_point(f: &PlaneMap, window: Window, tol: f64) -> Result<FixedPointOutcome> {
    validate_tol(tol)?;
    let c = window.center();
    let r = (f.eval_pt(c) - c).norm();
    if r <= tol {
        return Ok(FixedPointOutcome::Found(Located { point: c, residual: r }));
    }
    match root_index(f, window, tol, true)? {
        RootIndex::Hit(loc) => Ok(FixedPointOutcome::Found(loc)),
        RootIndex::Certified(_, 0) => Ok(FixedPointOutcome::Absent { boundary_index: 0 }),
        RootIndex::Certified(w, _) => Ok(FixedPointOutcome::Found(descend(f, w, tol)?)),
    }
}

/// Locate every isolated fixed point of `f` in `window` (counted by
/// index): windows of boundary index `±1` are refined directly, larger
/// magnitudes are subdivided until they separate. Results are sorted by
/// coordinates and deduplicated at radius `RESIDUAL_FACTOR · tol`.
///
/// Maps with non-isolated fixed points (an identically vanishing
/// displacement) cannot be enumerated and report
/// [`Error::BoundaryFixedPoint`]; use [`locate_fixed_point`] for those.
pub fn locate_all_fixed_points(
    f: &PlaneMap,
    window: Window,
    tol: f64,
) -> Result<Vec<Located>> {
    validate_tol(tol)?;
    let RootIndex::Certified(w0, i0) = root_index(f, window, tol, false)? else {
        unreachable!("root_index with accept_hit = false never returns a hit");
    };
    let mut work = vec![(w0, i0)];
    let mut found: Vec<Located> = Vec::new();
    while let Some((w, i)) = work.pop() {
        if i == 0 {
            continue;
        }
        if i.abs() == 1 || w.extent() <= 4.0 * tol.max(REFINE_FLOOR * (1.0 + w.center().norm())) {
            found.push(descend(f, w, tol)?);
            continue;
        }
        match split_certified(f, &w) {
            Ok(children) => {
                for (q, iq) in children {
                    if iq != 0 {
                        work.push((q, iq));
                    }
                }
            }
            // A cluster too tight to separate (e.g. a double fixed point)
            // yields one representative point instead of failing.
            Err(Error::BoundaryFixedPoint(_)) => found.push(descend(f, w, tol)?),
            Err(e) => return Err(e),
        }
    }
    found.sort_by(|a, b| (a.point.x, a.point.y).partial_cmp(&(b.point.x, b.point.y)).unwrap());
    found.dedup_by(|b, a| {
        if a.point.dist(b.point) <= RESIDUAL_FACTOR * tol {
            if b.residual < a.residual {
                a.point = b.point;
                a.residual = b.residual;
            }
            true
        } else {
            false
        }
    });
    Ok(found)
}

/// Search `window` for a point of period two: a fixed point of `f ∘ f`.
/// Genuine 2-cycles and fixed points of `f` both qualify.
pub fn check_period_two(f: &PlaneMap, window: Window, tol: f64) -> Result<FixedPointOutcome> {
    locate_fixed_point(&f.squared(), window, tol)
}
