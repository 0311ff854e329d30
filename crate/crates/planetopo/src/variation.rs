//! Junctions and Bell variation on boundary arcs.
//!
//! A junction at `v` is three disjoint rays J⁺, Jⁱ, J⁻ from `v` to the
//! window boundary, meeting the reference set only at `v` and appearing in
//! counterclockwise order (J⁺, Jⁱ, J⁻) — the image of the standard rays at
//! angles 0, π/2, π under an orientation-preserving map. The variation of
//! `f` on an arc `A` scans the crossings of the junction by the image path
//! `f(A)` in arc order: each (+ then i) adjacency counts +1, each (i then
//! +) counts −1, and nothing else — J⁻ events participate only by breaking
//! adjacency.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{
    segment_intersection, segment_segment_dist, CurveArc, OrientedClosedCurve, Region,
};
use crate::error::{Error, Result};
use crate::geom::{Point, Window};
use crate::maps::PlaneMap;

/// Crossings with |sin| of the incidence angle below this are tangential.
pub const TANGENCY_SIN: f64 = 1e-4;
/// Junction / sampling perturbation retries before giving up.
pub const MAX_RETRIES: u32 = 8;
/// Partitions may not exceed this many arcs.
pub const MAX_ARCS: usize = 10_000;
/// Tolerance for the closed membership test `f(a_i) ∈ T(S)`.
pub const HULL_MEMBERSHIP_TOL: f64 = 1e-7;
/// Sampled images of an arc must stay this far from the arc itself.
pub const SEPARATION_TOL: f64 = 1e-6;
/// Default raster density (cells across the window extent) for junctions.
pub const DEFAULT_CELLS_ACROSS: f64 = 512.0;

/// Which junction ray an event crossed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayLabel {
    Plus,
    Center,
    Minus,
}

impl RayLabel {
    pub fn as_char(self) -> char {
        match self {
            RayLabel::Plus => '+',
            RayLabel::Center => 'i',
            RayLabel::Minus => '-',
        }
    }
}

/// One transversal intersection of the image path with a junction ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingEvent {
    /// Arc-local parameter in `[0, 1]` of the crossing preimage.
    pub t: f64,
    pub ray: RayLabel,
    /// Where the image path met the ray.
    pub at: Point,
}

/// Ordered crossing events along an arc.
pub type CrossingSequence = Vec<CrossingEvent>;

/// Three polyline rays from `v` to the window boundary, pairwise disjoint
/// except at `v`, in counterclockwise order (J⁺, Jⁱ, J⁻) around `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Junction {
    pub v: Point,
    pub plus: Vec<Point>,
    pub center: Vec<Point>,
    pub minus: Vec<Point>,
    /// Initial escape direction (diagnostic / orientation tag).
    pub escape_dir: Point,
    /// Construction retries burned (diagnostic).
    pub retries: u32,
}

impl Junction {
    pub fn rays(&self) -> [(RayLabel, &[Point]); 3] {
        [
            (RayLabel::Plus, self.plus.as_slice()),
            (RayLabel::Center, self.center.as_slice()),
            (RayLabel::Minus, self.minus.as_slice()),
        ]
    }
}

fn polyline_point_dist(poly: &[Point], p: Point) -> f64 {
    let mut best = f64::INFINITY;
    for w in poly.windows(2) {
        best = best.min(crate::curve::point_segment_dist(p, w[0], w[1]));
    }
    if poly.len() == 1 {
        best = best.min(p.dist(poly[0]));
    }
    best
}

fn collapse_collinear(path: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(path.len());
    for &p in path {
        while out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            if (b - a).cross(p - b).abs() <= 1e-12 && (b - a).dot(p - b) >= 0.0 {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

/// March straight from `v` along `dir`; `Some(t_exit)` when every sample
/// past the base zone is clear of the marked set and the ray leaves the
/// window.
fn straight_clear(avoid: &Region, v: Point, dir: Point, r_free: f64, r_clear: f64) -> Option<f64> {
    let step = 0.5 * avoid.cell_size();
    let mut t = r_free;
    loop {
        let p = v + dir * t;
        if avoid.locate(p).is_none() {
            return Some(t + 2.0 * avoid.cell_size());
        }
        if avoid.contains_point(p) {
            return None;
        }
        if t >= r_clear && avoid.near_marked(p, 1) {
            return None;
        }
        t += step;
    }
}

/// Escape polyline from `v` through free cells to the window boundary, or
/// `None` when `v` is not accessible from the border at this resolution.
fn escape_polyline(avoid: &Region, v: Point, rng: &mut ChaCha8Rng) -> Option<Vec<Point>> {
    // Straight shot first: cheapest and gives the cleanest rays.
    let base: f64 = rng.gen_range(0.0..(2.0 * PI));
    let r_free = 1.6 * avoid.cell_size();
    let r_clear = 3.2 * avoid.cell_size();
    for k in 0..16 {
        let ang = base + k as f64 * PI / 8.0;
        let dir = Point::new(ang.cos(), ang.sin());
        if let Some(t_exit) = straight_clear(avoid, v, dir, r_free, r_clear) {
            // Break at the clearance radius so lateral offsets reach their
            // full width right past the base fan.
            return Some(vec![v, v + dir * r_free, v + dir * t_exit]);
        }
    }
    // BFS through free cells, starting from a free cell next to v.
    let (vx, vy) = avoid.locate(v)?;
    let (nx, ny) = avoid.dims();
    let mut starts = Vec::new();
    if !avoid.get(vx, vy) {
        starts.push((vx, vy));
    }
    for dy in -1i64..=1 {
        for dx in -1i64..=1 {
            let (jx, jy) = (vx as i64 + dx, vy as i64 + dy);
            if (dx, dy) == (0, 0) || jx < 0 || jy < 0 || jx >= nx as i64 || jy >= ny as i64 {
                continue;
            }
            let (jx, jy) = (jx as usize, jy as usize);
            if !avoid.get(jx, jy) {
                starts.push((jx, jy));
            }
        }
    }
    // Seed-dependent start order gives junction variety for invariance tests.
    let rot = if starts.is_empty() { 0 } else { rng.gen_range(0..starts.len()) };
    starts.rotate_left(rot);
    for (sx, sy) in starts {
        if let Some(mut path) = avoid.escape_path(avoid.cell_center(sx, sy)) {
            // Extend past the border so the ray genuinely leaves the window.
            if path.len() >= 2 {
                let n = path.len();
                let d = (path[n - 1] - path[n - 2]).normalize().unwrap_or(Point::new(1.0, 0.0));
                let last = path[n - 1] + d * (2.0 * avoid.cell_size());
                path.push(last);
            }
            let mut full = vec![v];
            full.extend(path);
            return Some(collapse_collinear(&full));
        }
    }
    None
}

/// Offset `path` laterally by `eps` on `side` (+1 = left of travel,
/// −1 = right). The base point is kept exact.
fn offset_path(path: &[Point], eps: f64, side: f64) -> Vec<Point> {
    let n = path.len();
    let mut out = Vec::with_capacity(n);
    out.push(path[0]);
    for k in 1..n {
        let ahead = path[(k + 1).min(n - 1)];
        let behind = path[k - 1];
        let d = (ahead - behind).normalize().unwrap_or(Point::new(1.0, 0.0));
        out.push(path[k] + d.rot90() * (eps * side));
    }
    out
}

fn sample_polyline(poly: &[Point], step: f64) -> Vec<(f64, Point)> {
    let mut out = Vec::new();
    let mut arclen = 0.0;
    for w in poly.windows(2) {
        let seg = w[1] - w[0];
        let len = seg.norm();
        let n = (len / step).ceil().max(1.0) as usize;
        for k in 0..n {
            let u = k as f64 / n as f64;
            out.push((arclen + u * len, w[0] + seg * u));
        }
        arclen += len;
    }
    if let Some(&last) = poly.last() {
        out.push((arclen, last));
    }
    out
}

/// Check the standing invariants of a candidate junction: rays clear of the
/// marked set past the base zone, and pairwise separation beyond three
/// shrinking neighborhoods of `v`.
fn validate_junction(avoid: &Region, j: &Junction, eps: f64) -> bool {
    let cell = avoid.cell_size();
    let r_free = 1.6 * cell;
    let step = cell / 3.0;
    let samples: Vec<Vec<(f64, Point)>> = j
        .rays()
        .iter()
        .map(|(_, ray)| sample_polyline(ray, step))
        .collect();
    for ray in &samples {
        for &(_, p) in ray {
            if p.dist(j.v) > r_free && avoid.contains_point(p) {
                return false;
            }
        }
    }
    // Rays fan out from `v`, so near the base their mutual distance grows
    // roughly like eps · s / ℓ₁ with ℓ₁ the first-segment length (≲ 2.2
    // cells); beyond it they run as parallel offsets a full eps apart.
    for scale in [2.0 * eps, 4.0 * eps, 8.0 * eps] {
        for a in 0..3 {
            for b in (a + 1)..3 {
                let mut min = f64::INFINITY;
                for &(la, pa) in &samples[a] {
                    if la <= scale {
                        continue;
                    }
                    for &(lb, pb) in &samples[b] {
                        if lb <= scale {
                            continue;
                        }
                        min = min.min(pa.dist(pb));
                    }
                }
                if min < 0.2 * eps {
                    return false;
                }
            }
        }
    }
    true
}

/// Build a junction at `v` with respect to the marked set in `avoid`
/// (typically a rasterized `S ∪ T(X)`). Rays trace an escape route through
/// the unbounded complement; J⁺ is offset to the right of travel, J⁻ to the
/// left, preserving the counterclockwise order (J⁺, Jⁱ, J⁻).
pub fn make_junction(avoid: &Region, v: Point) -> Result<Junction> {
    make_junction_seeded(avoid, v, 0)
}

/// As [`make_junction`], with a seed varying the escape route — useful for
/// checking junction independence.
pub fn make_junction_seeded(avoid: &Region, v: Point, seed: u64) -> Result<Junction> {
    let cell = avoid.cell_size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4a63_746e);
    for attempt in 0..MAX_RETRIES {
        let Some(path) = escape_polyline(avoid, v, &mut rng) else {
            return Err(Error::NoEscape(v));
        };
        let eps = 0.35 * cell / (1 << attempt.min(2)) as f64;
        let escape_dir = (path[1] - path[0]).normalize().unwrap_or(Point::new(0.0, 1.0));
        let j = Junction {
            v,
            plus: offset_path(&path, eps, -1.0),
            center: path.clone(),
            minus: offset_path(&path, eps, 1.0),
            escape_dir,
            retries: attempt,
        };
        if validate_junction(avoid, &j, eps) {
            return Ok(j);
        }
    }
    Err(Error::NoEscape(v))
}

/// Events of one sampling pass, or a tangency flag.
fn events_at(
    img: &dyn Fn(f64) -> Point,
    j: &Junction,
    n: usize,
    phase: f64,
) -> std::result::Result<CrossingSequence, ()> {
    let params: Vec<f64> = (0..=n)
        .map(|k| {
            if k == 0 || k == n {
                k as f64 / n as f64
            } else {
                (k as f64 + phase) / n as f64
            }
        })
        .collect();
    let pts: Vec<Point> = params.iter().map(|&u| img(u)).collect();
    let mut events: CrossingSequence = Vec::new();
    for k in 0..n {
        let (y0, y1) = (pts[k], pts[k + 1]);
        let d_img = y1 - y0;
        let img_len = d_img.norm();
        if img_len <= 1e-15 {
            continue;
        }
        for (label, ray) in j.rays() {
            for m in 0..ray.len().saturating_sub(1) {
                let (r0, r1) = (ray[m], ray[m + 1]);
                let d_ray = r1 - r0;
                let ray_len = d_ray.norm();
                if ray_len <= 1e-15 {
                    continue;
                }
                let sin = d_img.cross(d_ray).abs() / (img_len * ray_len);
                if sin < TANGENCY_SIN {
                    if segment_segment_dist(y0, y1, r0, r1) <= 1e-9 {
                        return Err(());
                    }
                    continue;
                }
                if let Some((at, t_seg)) = segment_intersection(y0, y1, r0, r1) {
                    let t = params[k] + t_seg * (params[k + 1] - params[k]);
                    events.push(CrossingEvent { t, ray: label, at });
                }
            }
        }
    }
    events.sort_by(|a, b| a.t.total_cmp(&b.t));
    events.dedup_by(|b, a| a.ray == b.ray && (a.t - b.t).abs() <= 1e-12);
    Ok(events)
}

/// Crossing sequence of the image path `u ↦ img(u)`, `u ∈ [0, 1]`, with the
/// junction. The sampling density doubles until the label sequence is
/// reproduced twice; tangential contacts are retried with perturbed sample
/// phases.
pub fn crossings_fn(img: &dyn Fn(f64) -> Point, j: &Junction) -> Result<CrossingSequence> {
    for u in [0.0, 1.0] {
        let p = img(u);
        for (label, ray) in j.rays() {
            if polyline_point_dist(ray, p) <= 1e-9 {
                return Err(Error::EndpointOnJunction { ray: label.as_char(), at: p });
            }
        }
    }
    let mut retries: u32 = 0;
    let mut phase = 0.0;
    let mut n = 1024usize;
    let mut prev: Option<Vec<RayLabel>> = None;
    let mut agree = 0;
    loop {
        match events_at(img, j, n, phase) {
            Ok(events) => {
                let labels: Vec<RayLabel> = events.iter().map(|e| e.ray).collect();
                if prev.as_deref() == Some(labels.as_slice()) {
                    agree += 1;
                    if agree >= 2 {
                        return Ok(events);
                    }
                } else {
                    agree = 0;
                }
                prev = Some(labels);
                if n >= 16_384 {
                    if agree >= 1 {
                        return Ok(events);
                    }
                    return Err(Error::UnresolvedTangency { retries });
                }
                n *= 2;
            }
            Err(()) => {
                retries += 1;
                if retries > MAX_RETRIES {
                    return Err(Error::UnresolvedTangency { retries: retries - 1 });
                }
                phase = 0.37 * retries as f64;
                prev = None;
                agree = 0;
            }
        }
    }
}

/// Crossing sequence of `f(A)` with the junction.
pub fn crossings(f: &PlaneMap, arc: &CurveArc<'_>, j: &Junction) -> Result<CrossingSequence> {
    crossings_fn(&|u| f.eval_pt(arc.point_at(u)), j)
}

/// Scan adjacent event pairs: (+ then i) counts +1, (i then +) counts −1,
/// nothing else.
pub fn variation_from_events(events: &[CrossingEvent]) -> i32 {
    let mut var = 0;
    for w in events.windows(2) {
        match (w[0].ray, w[1].ray) {
            (RayLabel::Plus, RayLabel::Center) => var += 1,
            (RayLabel::Center, RayLabel::Plus) => var -= 1,
            _ => {}
        }
    }
    var
}

/// Result of a single-arc variation computation.
#[derive(Debug, Clone)]
pub struct ArcVariation {
    pub var: i32,
    pub junction: Junction,
    pub events: CrossingSequence,
}

/// Minimum sampled distance between the image polyline `f(A)` and `A`.
fn arc_image_separation(f: &PlaneMap, arc: &CurveArc<'_>) -> f64 {
    let n = 128;
    let pts = arc.sample(n);
    let imgs: Vec<Point> = pts.iter().map(|&p| f.eval_pt(p)).collect();
    let mut min = f64::INFINITY;
    for iw in imgs.windows(2) {
        for aw in pts.windows(2) {
            min = min.min(segment_segment_dist(iw[0], iw[1], aw[0], aw[1]));
        }
    }
    min
}

/// Rasterize `T(S)` (curve plus its interior) on a window that must also
/// cover every image the caller will trace.
pub fn hull_raster(s: &OrientedClosedCurve, window: Window, cells_across: f64) -> Result<Region> {
    let mut r = Region::empty(window, cells_across / window.extent())?;
    r.mark_polyline(s.vertices(), true);
    Ok(r.hull())
}

/// Window around the curve, the images of the whole curve, and the junction
/// workspace.
fn working_window(f: &PlaneMap, s: &OrientedClosedCurve) -> Result<Window> {
    let mut pts: Vec<Point> = s.vertices().to_vec();
    for k in 0..1024 {
        pts.push(f.eval_pt(s.point_at(k as f64 / 1024.0)));
    }
    let w = Window::around(&pts, 0.0)?;
    Window::around(&pts, 0.15 * w.extent() + 0.5)
}

fn arc_variation_with(
    f: &PlaneMap,
    arc: &CurveArc<'_>,
    avoid: &Region,
    arc_index: usize,
) -> Result<ArcVariation> {
    let sep = arc_image_separation(f, arc);
    if sep <= SEPARATION_TOL {
        return Err(Error::InvalidPartition {
            arc: arc_index,
            reason: format!("f(A) meets A (sampled distance {sep:.3e})"),
        });
    }
    let candidates = [0.5, 0.35, 0.65, 0.2, 0.8, 0.42, 0.58, 0.28];
    let mut last_err = Error::NoEscape(arc.point_at(0.5));
    for (i, &u) in candidates.iter().enumerate() {
        let v = arc.point_at(u);
        let j = match make_junction_seeded(avoid, v, i as u64) {
            Ok(j) => j,
            Err(e) => {
                last_err = e;
                continue;
            }
        };
        match crossings(f, arc, &j) {
            Ok(events) => {
                return Ok(ArcVariation { var: variation_from_events(&events), junction: j, events });
            }
            Err(e @ (Error::UnresolvedTangency { .. } | Error::EndpointOnJunction { .. })) => {
                // A different junction is allowed to resolve these.
                last_err = e;
                continue;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

/// Variation of `f` on the subarc `arc` of its parent curve.
///
/// Junction placement is arbitrary on the arc (the count is
/// junction-independent), so several vertices and escape routes are tried
/// before reporting failure.
pub fn variation_arc(f: &PlaneMap, arc: &CurveArc<'_>) -> Result<ArcVariation> {
    let s = arc.curve;
    let window = working_window(f, s)?;
    let avoid = hull_raster(s, window, DEFAULT_CELLS_ACROSS)?;
    arc_variation_with(f, arc, &avoid, 0)
}

/// Per-arc record in a [`VariationReport`].
#[derive(Debug, Clone)]
pub struct ArcRecord {
    /// Arc start and end parameters on the curve.
    pub a: f64,
    pub b: f64,
    pub var: i32,
    /// Junction vertex used.
    pub junction_v: Point,
    /// Event labels in arc order, e.g. `"-i+"`.
    pub events: String,
    /// Junction construction retries (diagnostics).
    pub retries: u32,
}

/// Variation of `f` over a full partitioned curve.
#[derive(Debug, Clone)]
pub struct VariationReport {
    pub total: i32,
    pub arcs: Vec<ArcRecord>,
}

fn normalize_partition(partition: &[f64]) -> Vec<f64> {
    let mut ts: Vec<f64> = partition.iter().map(|t| t.rem_euclid(1.0)).collect();
    ts.sort_by(|a, b| a.total_cmp(b));
    ts.dedup_by(|b, a| (*b - *a).abs() <= 1e-12);
    if ts.len() >= 2 && (ts[ts.len() - 1] - 1.0 - ts[0]).abs() <= 1e-12 {
        ts.pop();
    }
    ts
}

/// Variation of `f` on `s` with respect to the partition `a_0 < … < a_n`
/// (curve parameters).
///
/// Validates the partition: every `f(a_i)` must lie in the closed hull
/// `T(S)` and every arc must satisfy `f(A_i) ∩ A_i = ∅` (sampled); the
/// total is the sum of per-arc variations and is refinement-invariant.
pub fn variation_total(
    f: &PlaneMap,
    s: &OrientedClosedCurve,
    partition: &[f64],
) -> Result<VariationReport> {
    let ts = normalize_partition(partition);
    if ts.is_empty() {
        return Err(Error::InvalidPartition { arc: 0, reason: "empty partition".into() });
    }
    if ts.len() > MAX_ARCS {
        return Err(Error::InvalidPartition {
            arc: ts.len(),
            reason: format!("partition exceeds {MAX_ARCS} arcs"),
        });
    }
    for (i, &t) in ts.iter().enumerate() {
        let image = f.eval_pt(s.point_at(t));
        if !s.contains_closed(image, HULL_MEMBERSHIP_TOL) {
            return Err(Error::InvalidPartition {
                arc: i,
                reason: format!("f(a_{i}) = {image:?} is outside T(S)"),
            });
        }
    }
    let window = working_window(f, s)?;
    let avoid = hull_raster(s, window, DEFAULT_CELLS_ACROSS)?;
    let mut arcs = Vec::with_capacity(ts.len());
    let mut total = 0;
    for i in 0..ts.len() {
        let a = ts[i];
        let b = ts[(i + 1) % ts.len()];
        let arc = s.arc(a, b);
        let av = arc_variation_with(f, &arc, &avoid, i)?;
        total += av.var;
        arcs.push(ArcRecord {
            a,
            b,
            var: av.var,
            junction_v: av.junction.v,
            events: av.events.iter().map(|e| e.ray.as_char()).collect(),
            retries: av.junction.retries,
        });
    }
    Ok(VariationReport { total, arcs })
}

/// Greedily build a valid partition of `s` from contact points with the
/// marked set `x`: candidates are contact parameters whose images lie in
/// `T(S)`; arcs violating `f(A) ∩ A = ∅` are split at further candidates
/// until every arc separates or no candidate remains.
pub fn auto_partition(
    f: &PlaneMap,
    s: &OrientedClosedCurve,
    x: &Region,
) -> Result<Vec<f64>> {
    let probe = 1024;
    let mut contacts: Vec<f64> = (0..probe)
        .map(|k| k as f64 / probe as f64)
        .filter(|&t| x.near_marked(s.point_at(t), 1))
        .collect();
    if contacts.is_empty() {
        return Err(Error::NoValidPartition("curve has no contact with the reference set".into()));
    }
    if contacts.len() > 256 {
        let stride = contacts.len().div_ceil(256);
        contacts = contacts.into_iter().step_by(stride).collect();
    }
    let eligible: Vec<f64> = contacts
        .into_iter()
        .filter(|&t| s.contains_closed(f.eval_pt(s.point_at(t)), HULL_MEMBERSHIP_TOL))
        .collect();
    if eligible.is_empty() {
        return Err(Error::NoValidPartition(
            "no contact point has its image in T(S)".into(),
        ));
    }
    // Start with up to four spread-out points, then split invalid arcs.
    let mut used = vec![false; eligible.len()];
    let mut partition: Vec<usize> = Vec::new();
    let k0 = eligible.len().min(4);
    for j in 0..k0 {
        let idx = j * eligible.len() / k0;
        if !used[idx] {
            used[idx] = true;
            partition.push(idx);
        }
    }
    partition.sort_unstable();
    loop {
        if partition.len() > MAX_ARCS {
            return Err(Error::NoValidPartition(format!("exceeded {MAX_ARCS} arcs")));
        }
        let mut violation = None;
        for i in 0..partition.len() {
            let a = eligible[partition[i]];
            let b = eligible[partition[(i + 1) % partition.len()]];
            let arc = s.arc(a, b);
            if arc_image_separation(f, &arc) <= SEPARATION_TOL {
                violation = Some(i);
                break;
            }
        }
        let Some(i) = violation else {
            return Ok(partition.into_iter().map(|idx| eligible[idx]).collect());
        };
        let a = eligible[partition[i]];
        let b = eligible[partition[(i + 1) % partition.len()]];
        let span = (b - a).rem_euclid(1.0);
        let span = if span < 1e-15 { 1.0 } else { span };
        let mid = (a + 0.5 * span).rem_euclid(1.0);
        // Closest unused eligible point strictly inside (a, b).
        let mut best: Option<(f64, usize)> = None;
        for (idx, &t) in eligible.iter().enumerate() {
            if used[idx] {
                continue;
            }
            let off = (t - a).rem_euclid(1.0);
            if off <= 1e-9 || off >= span - 1e-9 {
                continue;
            }
            let d = (t - mid).rem_euclid(1.0).min((mid - t).rem_euclid(1.0));
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, idx));
            }
        }
        let Some((_, idx)) = best else {
            return Err(Error::NoValidPartition(format!(
                "arc [{a:.4}, {b:.4}] cannot be separated with available contact points"
            )));
        };
        used[idx] = true;
        partition.push(idx);
        partition.sort_by(|&p, &q| eligible[p].total_cmp(&eligible[q]));
    }
}
