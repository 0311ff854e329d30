//! Kulkarni–Pinkall partitions of the complement of a compact plane set.
//!
//! A maximal ball is a closed disk, half-plane, or exterior disk whose
//! interior misses the compactum `K` while its boundary meets `K` in at
//! least two points. The hyperbolic convex hull of the contact set inside
//! each ball tiles the complement: two-contact balls contribute open chords
//! (circular arcs meeting the ball boundary at right angles), richer
//! contact sets contribute gaps with nonempty interior. This module
//! enumerates representative maximal balls for sampled compacta, locates
//! the element through any probe point by inversion, groups chords with
//! shared endpoints into chord families, classifies small chords by their
//! variation, rasterizes auxiliary continua, and scans for outchannel-style
//! chains of nested nonzero-variation chords.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{segment_segment_dist, shadow_of, Compactum, Region};
use crate::error::{Error, Result};
use crate::geom::{
    circumscribe, invert, min_enclosing_ball, perpendicular_arc, ArcKind, Ball, CircularArc,
    Point, Window, GEOM_EPS,
};
use crate::maps::PlaneMap;
use crate::variation::{
    crossings_fn, make_junction_seeded, variation_from_events, SEPARATION_TOL,
};

/// Default boundary-sample count across the window extent.
pub const DEFAULT_SAMPLE_DIVISOR: f64 = 512.0;
/// Additive pad on the contact tolerance `h + CONTACT_PAD`.
pub const CONTACT_PAD: f64 = 1e-9;
/// Contacts within `RUN_GAP_FACTOR * h` of boundary distance share a run.
pub const RUN_GAP_FACTOR: f64 = 2.0;
/// Runs spanning at most `POINTLIKE_SPAN_FACTOR * h` collapse to one point.
pub const POINTLIKE_SPAN_FACTOR: f64 = 4.0;
/// Candidate balls with radius below `MIN_RADIUS_FACTOR * h` are noise.
pub const MIN_RADIUS_FACTOR: f64 = 2.0;
/// Relative threshold deciding the half-plane case of the inversion lemma.
pub const HALF_PLANE_REL_TOL: f64 = 1e-7;

/// One element of the partition: a maximal ball, its contact points on the
/// boundary (circularly ordered), the chords bounding the hyperbolic hull,
/// and whether the hull has nonempty interior.
#[derive(Debug, Clone)]
pub struct KPElement {
    pub ball: Ball,
    /// Contact points projected onto the ball boundary, in boundary order.
    pub contacts: Vec<Point>,
    /// Contact runs as `(start, len)` ranges into `contacts`; each run is a
    /// maximal cluster of contacts with no boundary gap above `2h`.
    pub runs: Vec<(usize, usize)>,
    /// Hull-bounding chords, one per boundary gap between consecutive runs
    /// (duplicates between the same endpoint pair removed).
    pub chords: Vec<CircularArc>,
    /// Whether the hull has nonempty interior (three or more effective
    /// boundary points; a single wide contact run already qualifies).
    pub is_gap: bool,
}

/// The sampled partition: enumerated elements plus everything needed for
/// on-demand point location.
#[derive(Debug, Clone)]
pub struct KPPartition {
    pub elements: Vec<KPElement>,
    /// Boundary samples of the compactum at spacing `h`.
    pub samples: Vec<Point>,
    pub h: f64,
    pub window: Window,
    /// Number of candidate centers examined (provenance).
    pub sites: usize,
    k: Compactum,
}

/// A chord together with its variation and diameter.
#[derive(Debug, Clone)]
pub struct SignedChord {
    pub chord: CircularArc,
    pub variation: i32,
    pub diameter: f64,
}

/// Chords of diameter at most delta, split by the sign of their variation.
/// The inclusive families are `plus ∪ zero` (variation ≥ 0) and
/// `minus ∪ zero` (variation ≤ 0).
#[derive(Debug, Clone, Default)]
pub struct ChordClasses {
    pub plus: Vec<SignedChord>,
    pub minus: Vec<SignedChord>,
    pub zero: Vec<SignedChord>,
    /// Chords whose hypotheses failed (image overlap, junction failure),
    /// with the diagnostic.
    pub excluded: Vec<(CircularArc, Error)>,
}

/// The union of all chords between one endpoint pair.
#[derive(Debug, Clone)]
pub enum ChordFamily {
    /// Exactly one realizing chord.
    Single(CircularArc),
    /// A closed disk region bounded by the two extreme chords.
    DiskRegion { extreme: [CircularArc; 2] },
}

/// Boundary geometry of one hull: its chords and, for bounded gaps, a
/// closed outline polyline alternating contact runs and chord samples.
#[derive(Debug, Clone)]
pub struct HullGeometry {
    pub chords: Vec<CircularArc>,
    pub outline: Option<Vec<Point>>,
    /// False exactly when the hull contains the point at infinity.
    pub bounded: bool,
}

/// A maximal sequence of same-sign nonzero chords with strictly nested
/// shadows and non-increasing diameters.
#[derive(Debug, Clone)]
pub struct OutchannelChain {
    /// Outermost first.
    pub chords: Vec<SignedChord>,
    pub sign: i8,
    pub total_variation: i32,
}

// ---------------------------------------------------------------------------
// Contact detection and element assembly
// ---------------------------------------------------------------------------

/// Project `p` onto the boundary of `ball`.
fn project_to_boundary(ball: &Ball, p: Point) -> Point {
    match *ball {
        Ball::Disk { center, radius } | Ball::ExteriorDisk { center, radius } => {
            match (p - center).normalize() {
                Some(d) => center + d * radius,
                None => center + Point::new(radius, 0.0),
            }
        }
        Ball::HalfPlane { point, normal } => p - normal * (p - point).dot(normal),
    }
}

/// Position of a boundary point along the boundary, used to order contacts:
/// angle for round boundaries, a signed line parameter for half-planes (in
/// the direction that makes the traversal counterclockwise as seen from the
/// complement, consistently with the round cases).
fn boundary_key(ball: &Ball, p: Point) -> f64 {
    match *ball {
        Ball::Disk { center, .. } | Ball::ExteriorDisk { center, .. } => (p - center).angle(),
        Ball::HalfPlane { point, normal } => {
            let dir = -normal.rot90();
            (p - point).dot(dir)
        }
    }
}

/// Distance along the boundary between consecutive keys.
fn boundary_gap(ball: &Ball, from: f64, to: f64) -> f64 {
    match *ball {
        Ball::Disk { radius, .. } | Ball::ExteriorDisk { radius, .. } => {
            (to - from).rem_euclid(std::f64::consts::TAU) * radius
        }
        Ball::HalfPlane { .. } => to - from,
    }
}

fn is_circular(ball: &Ball) -> bool {
    !matches!(ball, Ball::HalfPlane { .. })
}

/// Contact samples of `ball`: samples within `h + pad` of the boundary that
/// are local minima of the boundary distance along the sample chain, so a
/// tangential approach yields a single contact rather than a smeared arc.
/// `chain` tells whether consecutive samples are boundary-adjacent.
fn contact_samples(ball: &Ball, samples: &[Point], h: f64, chain: bool) -> Vec<Point> {
    let tol = h + CONTACT_PAD;
    let n = samples.len();
    let signed: Vec<f64> = samples.iter().map(|&s| ball.signed(s).abs()).collect();
    let mut out = Vec::new();
    for i in 0..n {
        if signed[i] > tol {
            continue;
        }
        if chain && n > 2 {
            let prev = signed[(i + n - 1) % n];
            let next = signed[(i + 1) % n];
            if signed[i] > prev.min(next) + 1e-12 {
                continue;
            }
        }
        out.push(samples[i]);
    }
    out
}

struct RunStructure {
    /// Projected contacts in boundary order.
    contacts: Vec<Point>,
    runs: Vec<(usize, usize)>,
    any_wide: bool,
}

/// Order contacts along the boundary and cluster them into runs; point-like
/// runs collapse to their best representative.
fn build_runs(ball: &Ball, raw: &[Point], h: f64) -> Option<RunStructure> {
    if raw.len() < 1 {
        return None;
    }
    let mut pts: Vec<(f64, Point, f64)> = raw
        .iter()
        .map(|&p| (boundary_key(ball, p), project_to_boundary(ball, p), ball.signed(p).abs()))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|b, a| b.1.dist(a.1) <= 1e-12);

    let gap_limit = RUN_GAP_FACTOR * h;
    let mut clusters: Vec<Vec<(f64, Point, f64)>> = vec![vec![pts[0]]];
    for &e in &pts[1..] {
        let last = clusters.last().unwrap().last().unwrap();
        if boundary_gap(ball, last.0, e.0) <= gap_limit {
            clusters.last_mut().unwrap().push(e);
        } else {
            clusters.push(vec![e]);
        }
    }
    // Circular boundaries can wrap a run across the angle cut.
    if is_circular(ball) && clusters.len() >= 2 {
        let last = *clusters.last().unwrap().last().unwrap();
        let first = clusters[0][0];
        if boundary_gap(ball, last.0, first.0) <= gap_limit {
            let tail = clusters.pop().unwrap();
            // Prepend so run order stays monotone within the run.
            let head = std::mem::take(&mut clusters[0]);
            clusters[0] = tail.into_iter().chain(head).collect();
        }
    }

    let wide_limit = POINTLIKE_SPAN_FACTOR * h;
    let mut contacts = Vec::new();
    let mut runs = Vec::new();
    let mut any_wide = false;
    for cluster in clusters {
        let span = boundary_gap(ball, cluster[0].0, cluster.last().unwrap().0);
        let start = contacts.len();
        if span <= wide_limit {
            // Point-like: keep the sample closest to the boundary.
            let rep = cluster
                .iter()
                .min_by(|a, b| a.2.total_cmp(&b.2))
                .unwrap()
                .1;
            contacts.push(rep);
            runs.push((start, 1));
        } else {
            any_wide = true;
            contacts.extend(cluster.iter().map(|e| e.1));
            runs.push((start, contacts.len() - start));
        }
    }
    Some(RunStructure { contacts, runs, any_wide })
}

/// Assemble a partition element from a validated ball, or `None` when the
/// contact structure does not support one (fewer than two effective
/// boundary points).
fn element_from_ball(ball: Ball, samples: &[Point], h: f64, chain: bool) -> Option<KPElement> {
    let raw = contact_samples(&ball, samples, h, chain);
    let rs = build_runs(&ball, &raw, h)?;
    // Two effective boundary points minimum: either two runs, or one run
    // wide enough to be a genuine continuum of contact.
    if rs.runs.len() < 2 && !rs.any_wide {
        return None;
    }
    let k = rs.runs.len();
    let mut chords: Vec<CircularArc> = Vec::new();
    let mut seen: Vec<(Point, Point)> = Vec::new();
    for i in 0..k {
        // Chord across the gap after run i: from this run's last contact to
        // the next run's first. Half-plane boundaries have a single
        // wrap-around gap through infinity, which reuses the same indices.
        if k == 1 && rs.runs[0].1 < 2 {
            break;
        }
        let (s_i, l_i) = rs.runs[i];
        let (s_j, _) = rs.runs[(i + 1) % k];
        let a = rs.contacts[s_i + l_i - 1];
        let b = rs.contacts[s_j];
        if a.dist(b) < GEOM_EPS {
            continue;
        }
        if seen.iter().any(|&(p, q)| {
            (p.dist(a) < 1e-12 && q.dist(b) < 1e-12) || (p.dist(b) < 1e-12 && q.dist(a) < 1e-12)
        }) {
            continue;
        }
        if let Ok(arc) = perpendicular_arc(&ball, a, b) {
            seen.push((a, b));
            chords.push(arc);
        }
    }
    if chords.is_empty() {
        return None;
    }
    let is_gap = k >= 3 || rs.any_wide;
    Some(KPElement { ball, contacts: rs.contacts, runs: rs.runs, chords, is_gap })
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// Strict convex hull (counterclockwise, collinear points dropped); two
/// points for degenerate clouds.
fn convex_hull(pts: &[Point]) -> Vec<Point> {
    let mut v: Vec<Point> = pts.to_vec();
    v.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    v.dedup_by(|b, a| b.dist(*a) <= 1e-12);
    if v.len() <= 2 {
        return v;
    }
    let half = |iter: &mut dyn Iterator<Item = Point>| {
        let mut chain: Vec<Point> = Vec::new();
        for p in iter {
            while chain.len() >= 2 {
                let a = chain[chain.len() - 2];
                let b = chain[chain.len() - 1];
                if (b - a).cross(p - b) <= 1e-12 {
                    chain.pop();
                } else {
                    break;
                }
            }
            chain.push(p);
        }
        chain
    };
    let lower = half(&mut v.iter().copied());
    let upper = half(&mut v.iter().rev().copied());
    let mut hull = lower;
    hull.pop();
    hull.extend_from_slice(&upper[..upper.len().saturating_sub(1)]);
    if hull.len() < 2 {
        // Fully collinear cloud: the chain degenerates to its endpoints.
        return vec![*v.first().unwrap(), *v.last().unwrap()];
    }
    hull
}

/// Candidate ball centers from the Delaunay triangulation of the samples:
/// triangle circumcenters plus Voronoi-edge midpoints, which track the
/// medial axis of the complement.
fn voronoi_candidates(samples: &[Point]) -> Vec<Point> {
    let pts: Vec<delaunator::Point> =
        samples.iter().map(|p| delaunator::Point { x: p.x, y: p.y }).collect();
    let tri = delaunator::triangulate(&pts);
    let nt = tri.triangles.len() / 3;
    let mut centers: Vec<Point> = Vec::with_capacity(nt * 2);
    let mut circum: Vec<Point> = Vec::with_capacity(nt);
    for t in 0..nt {
        let a = samples[tri.triangles[3 * t]];
        let b = samples[tri.triangles[3 * t + 1]];
        let c = samples[tri.triangles[3 * t + 2]];
        let (cc, _) = circumscribe(a, b, c);
        circum.push(cc);
        centers.push(cc);
    }
    for (e, &pair) in tri.halfedges.iter().enumerate() {
        if pair != delaunator::EMPTY && e < pair {
            centers.push(circum[e / 3].mid(circum[pair / 3]));
        }
    }
    centers
}

fn ball_key(ball: &Ball, q: f64) -> (u8, i64, i64, i64) {
    let quant = |v: f64| (v / q).round() as i64;
    match *ball {
        Ball::Disk { center, radius } => (0, quant(center.x), quant(center.y), quant(radius)),
        Ball::HalfPlane { point, normal } => {
            let offset = point.dot(normal);
            (1, quant(normal.x * 1000.0), quant(normal.y * 1000.0), quant(offset))
        }
        Ball::ExteriorDisk { center, radius } => {
            (2, quant(center.x), quant(center.y), quant(radius))
        }
    }
}

/// Enumerate representative maximal balls of the complement of `k` and
/// assemble the partition. Boundary samples are spaced
/// `window.extent() / DEFAULT_SAMPLE_DIVISOR` apart.
pub fn maximal_balls(k: &Compactum, window: Window) -> Result<KPPartition> {
    maximal_balls_with(k, window, window.extent() / DEFAULT_SAMPLE_DIVISOR)
}

/// As [`maximal_balls`] with an explicit boundary sample spacing `h`.
pub fn maximal_balls_with(k: &Compactum, window: Window, h: f64) -> Result<KPPartition> {
    let samples = k.boundary_samples(h);
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let chain = !matches!(k, Compactum::Points(_));

    // The complement must be connected for the partition to make sense.
    {
        let mut r = Region::empty(window, DEFAULT_SAMPLE_DIVISOR / window.extent())?;
        k.rasterize_into(&mut r);
        if !r.complement_connected() {
            return Err(Error::DisconnectedComplement);
        }
    }

    let mut elements: Vec<KPElement> = Vec::new();
    let mut seen: std::collections::HashSet<(u8, i64, i64, i64)> = Default::default();
    let mut sites = 0usize;
    let mut push = |ball: Ball, elements: &mut Vec<KPElement>| {
        if seen.insert(ball_key(&ball, h / 2.0)) {
            if let Some(e) = element_from_ball(ball, &samples, h, chain) {
                elements.push(e);
            }
        }
    };

    // Interior-empty disks centered near the medial axis of the complement.
    let min_r = MIN_RADIUS_FACTOR * h;
    for c in voronoi_candidates(&samples) {
        sites += 1;
        if !window.contains(c) {
            continue;
        }
        let r = k.dist(c);
        if r < min_r {
            continue;
        }
        push(Ball::Disk { center: c, radius: r }, &mut elements);
    }

    // Pair-bisector disks for small clouds, sampling the two-contact family.
    if samples.len() <= 32 {
        for i in 0..samples.len() {
            for j in (i + 1)..samples.len() {
                let (p, q) = (samples[i], samples[j]);
                let Some(dir) = (q - p).normalize() else { continue };
                let n = dir.rot90();
                let base = p.mid(q);
                for t in [0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0] {
                    sites += 1;
                    let c = base + n * (t * p.dist(q));
                    let r = k.dist(c);
                    if r < min_r || (c.dist(p) - r).abs() > h || (c.dist(q) - r).abs() > h {
                        continue;
                    }
                    push(Ball::Disk { center: c, radius: r }, &mut elements);
                }
            }
        }
    }

    // Half-planes supported by convex-hull edges.
    let hull = convex_hull(&samples);
    if hull.len() == 2 {
        // Degenerate (collinear) cloud: both sides of the supporting line.
        if let Some(dir) = (hull[1] - hull[0]).normalize() {
            let n = dir.rot90();
            for normal in [n, -n] {
                sites += 1;
                push(Ball::HalfPlane { point: hull[0], normal }, &mut elements);
            }
        }
    } else {
        for i in 0..hull.len() {
            let a = hull[i];
            let b = hull[(i + 1) % hull.len()];
            let Some(dir) = (b - a).normalize() else { continue };
            // Outward normal of a counterclockwise hull edge.
            let normal = -dir.rot90();
            sites += 1;
            push(Ball::HalfPlane { point: a, normal }, &mut elements);
        }
    }

    // The exterior element: complement of the smallest enclosing ball.
    if let Ball::Disk { center, radius } = min_enclosing_ball(&samples)? {
        if radius > GEOM_EPS {
            sites += 1;
            push(Ball::ExteriorDisk { center, radius }, &mut elements);
        }
    }

    elements.sort_by(|a, b| {
        let ka = ball_key(&a.ball, 1e-9);
        let kb = ball_key(&b.ball, 1e-9);
        ka.cmp(&kb)
    });
    Ok(KPPartition { elements, samples, h, window, sites, k: k.clone() })
}

// ---------------------------------------------------------------------------
// Point location by inversion
// ---------------------------------------------------------------------------

impl KPPartition {
    /// The partition element whose hull contains `p`, built on demand by
    /// the inversion construction: invert the samples at `p`, take the
    /// smallest enclosing ball of the image, and pull its complement back.
    pub fn locate(&self, p: Point) -> Result<KPElement> {
        if self.k.dist(p) <= 1e-9 {
            return Err(Error::OnCurve(p));
        }
        let inverted: Vec<Point> =
            self.samples.iter().map(|&s| invert(s, p)).collect::<Result<_>>()?;
        let Ball::Disk { center: a_w, radius: r_prime } = min_enclosing_ball(&inverted)? else {
            return Err(Error::EmptyInput);
        };
        let alpha = a_w - p;
        let d = alpha.norm2() - r_prime * r_prime;
        let scale = r_prime * r_prime + alpha.norm2();
        let ball = if d.abs() <= HALF_PLANE_REL_TOL * scale {
            let q = p + alpha * (1.0 / (2.0 * alpha.norm2()));
            let normal = (-alpha).normalize().unwrap_or(Point::new(1.0, 0.0));
            Ball::HalfPlane { point: q, normal }
        } else if d > 0.0 {
            Ball::ExteriorDisk { center: p + alpha * (1.0 / d), radius: r_prime / d }
        } else {
            Ball::Disk { center: p + alpha * (1.0 / d), radius: r_prime / (-d) }
        };
        let chain = !matches!(self.k, Compactum::Points(_));
        element_from_ball(ball, &self.samples, self.h, chain)
            .ok_or(Error::NoContact)
    }
}

// ---------------------------------------------------------------------------
// Hull geometry and membership
// ---------------------------------------------------------------------------

/// Signed side value of `p` with respect to the supporting circle or line
/// of `arc` (sign convention is arbitrary but fixed per arc).
fn chord_side(arc: &CircularArc, p: Point) -> f64 {
    match arc.kind {
        ArcKind::Circle { center, radius, .. } => p.dist(center) - radius,
        ArcKind::Segment | ArcKind::TwoRays => {
            let d = arc.b - arc.a;
            let n = d.norm();
            if n < GEOM_EPS {
                0.0
            } else {
                d.cross(p - arc.a) / n
            }
        }
    }
}

impl KPElement {
    /// Whether `p` lies in the closed hyperbolic hull of the contact set,
    /// within tolerance `tol`: inside the ball and on the contact side of
    /// every chord. Two-contact hulls are the chord itself.
    pub fn hull_contains(&self, p: Point, tol: f64) -> bool {
        if self.ball.signed(p) > tol {
            return false;
        }
        for chord in &self.chords {
            let side = chord_side(chord, p);
            match self.reference_side(chord, tol) {
                Some(ref_sign) => {
                    if side * ref_sign < -tol {
                        return false;
                    }
                }
                None => {
                    // No interior: membership means lying on the chord.
                    if side.abs() > tol {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Strict interior membership (gaps only; chords have no interior).
    pub fn hull_interior_contains(&self, p: Point, tol: f64) -> bool {
        if !self.is_gap || self.ball.signed(p) > -tol {
            return false;
        }
        for chord in &self.chords {
            let side = chord_side(chord, p);
            match self.reference_side(chord, tol) {
                Some(ref_sign) => {
                    if side * ref_sign < tol {
                        return false;
                    }
                }
                None => return false,
            }
        }
        true
    }

    /// Sign of the contact side of `chord`, from a contact point well off
    /// its supporting circle; `None` when every contact sits on the chord.
    fn reference_side(&self, chord: &CircularArc, tol: f64) -> Option<f64> {
        let mut best = 0.0f64;
        for &c in &self.contacts {
            let side = chord_side(chord, c);
            if side.abs() > best.abs() {
                best = side;
            }
        }
        if best.abs() > tol {
            Some(best.signum())
        } else {
            None
        }
    }

    /// Total boundary span of the contact runs (diagnostic).
    pub fn contact_count(&self) -> usize {
        self.contacts.len()
    }
}

/// Chords plus an outline polyline for bounded gap hulls: the outline walks
/// each contact run in boundary order and closes each gap with its chord.
pub fn hull_of(e: &KPElement) -> HullGeometry {
    let bounded = !matches!(e.ball, Ball::ExteriorDisk { .. });
    if !e.is_gap {
        return HullGeometry { chords: e.chords.clone(), outline: None, bounded };
    }
    let mut outline: Vec<Point> = Vec::new();
    let k = e.runs.len();
    let mut ok = true;
    for i in 0..k {
        let (s, l) = e.runs[i];
        outline.extend_from_slice(&e.contacts[s..s + l]);
        let a = e.contacts[s + l - 1];
        let b = e.contacts[e.runs[(i + 1) % k].0];
        if a.dist(b) < GEOM_EPS {
            continue;
        }
        match perpendicular_arc(&e.ball, a, b) {
            Ok(arc) => {
                if matches!(arc.kind, ArcKind::TwoRays) {
                    ok = false;
                    break;
                }
                let pts = arc.sample(32);
                outline.extend_from_slice(&pts[1..pts.len() - 1]);
            }
            Err(_) => {
                ok = false;
                break;
            }
        }
    }
    let outline = if ok && bounded && outline.len() >= 3 { Some(outline) } else { None };
    HullGeometry { chords: e.chords.clone(), outline, bounded }
}

// ---------------------------------------------------------------------------
// Chord families C(a, b)
// ---------------------------------------------------------------------------

/// All chords of the partition with endpoints `{a, b}`: a single chord or
/// the closed disk region bounded by the two extreme chords.
pub fn chords_between(p: &KPPartition, a: Point, b: Point) -> Result<ChordFamily> {
    if a.dist(b) < GEOM_EPS {
        return Err(Error::DegenerateChord(a));
    }
    let tol = 2.0 * p.h;
    let mut matches: Vec<CircularArc> = Vec::new();
    for e in &p.elements {
        for chord in &e.chords {
            let fwd = chord.a.dist(a) <= tol && chord.b.dist(b) <= tol;
            let rev = chord.a.dist(b) <= tol && chord.b.dist(a) <= tol;
            if fwd || rev {
                matches.push(*chord);
            }
        }
    }
    if matches.is_empty() {
        return Err(Error::NoChord(a, b));
    }
    // Rank finite chords by how far their midpoint sits from the line ab.
    let mid = a.mid(b);
    let n = match (b - a).normalize() {
        Some(d) => d.rot90(),
        None => return Err(Error::DegenerateChord(a)),
    };
    let mut ranked: Vec<(f64, CircularArc)> = matches
        .iter()
        .filter(|c| !matches!(c.kind, ArcKind::TwoRays))
        .map(|&c| ((c.point_at(0.5) - mid).dot(n), c))
        .collect();
    if ranked.is_empty() {
        // Only rays through infinity realize the pair.
        return Ok(ChordFamily::Single(matches[0]));
    }
    ranked.sort_by(|x, y| x.0.total_cmp(&y.0));
    let lo = ranked.first().unwrap();
    let hi = ranked.last().unwrap();
    if (hi.0 - lo.0).abs() <= tol {
        Ok(ChordFamily::Single(lo.1))
    } else {
        Ok(ChordFamily::DiskRegion { extreme: [lo.1, hi.1] })
    }
}

// ---------------------------------------------------------------------------
// Chord classification by variation
// ---------------------------------------------------------------------------

fn reverse_arc(c: &CircularArc) -> CircularArc {
    let kind = match c.kind {
        ArcKind::Circle { center, radius, start, sweep } => {
            ArcKind::Circle { center, radius, start: start + sweep, sweep: -sweep }
        }
        other => other,
    };
    CircularArc { a: c.b, b: c.a, kind }
}

fn chord_polyline(c: &CircularArc, step: f64, clip: f64) -> Vec<Point> {
    match c.kind {
        ArcKind::TwoRays => c.sample_clipped(128, clip),
        _ => {
            let len = match c.kind {
                ArcKind::Circle { radius, sweep, .. } => radius * sweep.abs(),
                _ => c.a.dist(c.b),
            };
            let n = ((len / step).ceil() as usize).clamp(16, 512);
            c.sample(n)
        }
    }
}

/// Orient `chord` so its shadow (the bounded complementary component it
/// cuts off) lies on the left of the traversal, matching counterclockwise
/// traversal around the continuum; returns the oriented chord and shadow.
fn canonical_orientation(
    hull_raster: &Region,
    chord: &CircularArc,
    poly: &[Point],
) -> (CircularArc, Region) {
    let shadow = shadow_of(hull_raster, poly);
    let cell = hull_raster.cell_size();
    let eps = 1e-3;
    let m = chord.point_at(0.5);
    let t = (chord.point_at(0.5 + eps) - chord.point_at(0.5 - eps)).normalize();
    let Some(t) = t else { return (*chord, shadow) };
    let left = m + t.rot90() * (2.0 * cell);
    let right = m - t.rot90() * (2.0 * cell);
    if shadow.contains_point(left) {
        (*chord, shadow)
    } else if shadow.contains_point(right) {
        (reverse_arc(chord), shadow)
    } else {
        (*chord, shadow)
    }
}

/// Variation of one oriented chord with respect to the continuum: junction
/// at a chord point avoiding the continuum and the chord, crossings of the
/// image path, literal adjacency count.
fn chord_variation(
    f: &PlaneMap,
    chord: &CircularArc,
    avoid: &Region,
) -> Result<i32> {
    let img = |u: f64| f.eval_pt(chord.point_at(u));
    let candidates = [0.5, 0.35, 0.65, 0.2, 0.8, 0.42, 0.58, 0.28];
    let mut last_err = Error::NoEscape(chord.point_at(0.5));
    for (i, &u) in candidates.iter().enumerate() {
        let v = chord.point_at(u);
        let j = match make_junction_seeded(avoid, v, i as u64) {
            Ok(j) => j,
            Err(e) => {
                last_err = e;
                continue;
            }
        };
        match crossings_fn(&img, &j) {
            Ok(events) => return Ok(variation_from_events(&events)),
            Err(e @ (Error::UnresolvedTangency { .. } | Error::EndpointOnJunction { .. })) => {
                last_err = e;
                continue;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

/// Classify every finite chord of diameter at most `delta`: canonical
/// orientation from its shadow, then the variation of `f` on it with
/// respect to the continuum `T(K)`. Chords whose image meets their closure
/// are excluded with a diagnostic.
pub fn classify_chords(f: &PlaneMap, p: &KPPartition, delta: f64) -> Result<ChordClasses> {
    let hull_raster = {
        let mut r = Region::empty(p.window, DEFAULT_SAMPLE_DIVISOR / p.window.extent())?;
        p.k.rasterize_into(&mut r);
        r.hull()
    };
    let cell = hull_raster.cell_size();
    let clip = p.window.extent();
    let mut out = ChordClasses::default();
    for e in &p.elements {
        for chord in &e.chords {
            if chord.diameter() > delta {
                continue;
            }
            let poly = chord_polyline(chord, cell, clip);
            let (oriented, _shadow) = canonical_orientation(&hull_raster, chord, &poly);
            // The hypotheses need the image of the closed chord off itself.
            let imgs: Vec<Point> = poly.iter().map(|&q| f.eval_pt(q)).collect();
            let mut min_sep = f64::INFINITY;
            for iw in imgs.windows(2) {
                for cw in poly.windows(2) {
                    min_sep = min_sep.min(segment_segment_dist(iw[0], iw[1], cw[0], cw[1]));
                }
            }
            if min_sep <= SEPARATION_TOL {
                out.excluded.push((*chord, Error::ChordImageOverlap { min: min_sep }));
                continue;
            }
            let mut avoid = hull_raster.clone();
            avoid.mark_polyline(&poly, false);
            match chord_variation(f, &oriented, &avoid) {
                Ok(var) => {
                    let sc = SignedChord {
                        chord: oriented,
                        variation: var,
                        diameter: chord.diameter(),
                    };
                    match var.cmp(&0) {
                        std::cmp::Ordering::Greater => out.plus.push(sc),
                        std::cmp::Ordering::Less => out.minus.push(sc),
                        std::cmp::Ordering::Equal => out.zero.push(sc),
                    }
                }
                Err(e) => out.excluded.push((*chord, e)),
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Auxiliary continua and outchannel scanning
// ---------------------------------------------------------------------------

/// Rasterized topological hull of the compactum together with the given
/// chords: the auxiliary continuum for that chord family.
pub fn auxiliary_continuum(
    k: &Compactum,
    chords: &[CircularArc],
    window: Window,
    resolution: f64,
) -> Result<Region> {
    let mut r = Region::empty(window, resolution)?;
    k.rasterize_into(&mut r);
    let cell = r.cell_size();
    for c in chords {
        let poly = chord_polyline(c, cell, window.extent());
        r.mark_polyline(&poly, false);
    }
    Ok(r.hull())
}

/// Scan the classified chords for maximal chains of nested same-sign
/// nonzero chords: strictly nested shadows, diameters non-increasing,
/// length at least two. Chains are reported outermost chord first.
pub fn outchannel_scan(
    k: &Compactum,
    classes: &ChordClasses,
    window: Window,
    resolution: f64,
) -> Result<Vec<OutchannelChain>> {
    let hull_raster = {
        let mut r = Region::empty(window, resolution)?;
        k.rasterize_into(&mut r);
        r.hull()
    };
    let cell = hull_raster.cell_size();
    let nodes: Vec<&SignedChord> =
        classes.plus.iter().chain(classes.minus.iter()).collect();
    if nodes.is_empty() {
        return Ok(Vec::new());
    }
    let shadows: Vec<Region> = nodes
        .iter()
        .map(|sc| shadow_of(&hull_raster, &chord_polyline(&sc.chord, cell, window.extent())))
        .collect();
    let areas: Vec<usize> = shadows.iter().map(|s| s.count()).collect();
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&i, &j| areas[j].cmp(&areas[i]));

    // nested[i] = successors of i: strictly smaller shadows nested in i's.
    let n = nodes.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut has_pred = vec![false; n];
    for &i in &order {
        for &j in &order {
            if i == j || areas[j] >= areas[i] {
                continue;
            }
            let same_sign = nodes[i].variation.signum() == nodes[j].variation.signum();
            if same_sign
                && nodes[j].diameter <= nodes[i].diameter + 1e-9
                && shadows[j].strict_subset_of(&shadows[i])
            {
                succ[i].push(j);
                has_pred[j] = true;
            }
        }
    }
    let mut chains = Vec::new();
    for &start in &order {
        if has_pred[start] || succ[start].is_empty() {
            continue;
        }
        // Greedy walk: always descend to the largest nested successor.
        let mut chain = vec![start];
        let mut cur = start;
        loop {
            let next = succ[cur].iter().copied().max_by_key(|&j| areas[j]);
            match next {
                Some(j) => {
                    chain.push(j);
                    cur = j;
                }
                None => break,
            }
        }
        if chain.len() >= 2 {
            let sign = nodes[start].variation.signum() as i8;
            let total: i32 = chain.iter().map(|&i| nodes[i].variation).sum();
            chains.push(OutchannelChain {
                chords: chain.into_iter().map(|i| nodes[i].clone()).collect(),
                sign,
                total_variation: total,
            });
        }
    }
    Ok(chains)
}

/// Hausdorff distance between two sampled arcs (helper for continuity
/// checks).
pub fn arc_hausdorff(a: &CircularArc, b: &CircularArc, n: usize) -> f64 {
    let pa = a.sample(n);
    let pb = b.sample(n);
    let one_sided = |xs: &[Point], ys: &[Point]| {
        xs.iter()
            .map(|x| ys.iter().map(|y| x.dist(*y)).fold(f64::INFINITY, f64::min))
            .fold(0.0f64, f64::max)
    };
    one_sided(&pa, &pb).max(one_sided(&pb, &pa))
}

/// Deterministic probe points in the window off the compactum.
pub fn probe_points(
    k: &Compactum,
    window: Window,
    clearance: f64,
    count: usize,
    seed: u64,
) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < count * 100 {
        attempts += 1;
        let p = Point::new(
            rng.gen_range(window.x0..window.x1),
            rng.gen_range(window.y0..window.y1),
        );
        if k.dist(p) > clearance {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn unit_square() -> Compactum {
        Compactum::Polygon(vec![
            Point::new(1.0, -1.0),
            Point::new(1.0, 1.0),
            Point::new(-1.0, 1.0),
            Point::new(-1.0, -1.0),
        ])
    }

    /// Square with a 1-wide slot cut downward from the top edge.
    fn fjord() -> Compactum {
        Compactum::Polygon(vec![
            Point::new(-2.0, -2.0),
            Point::new(2.0, -2.0),
            Point::new(2.0, 2.0),
            Point::new(0.5, 2.0),
            Point::new(0.5, -1.0),
            Point::new(-0.5, -1.0),
            Point::new(-0.5, 2.0),
            Point::new(-2.0, 2.0),
        ])
    }

    fn square_partition() -> KPPartition {
        maximal_balls(&unit_square(), Window::new(-3.0, -3.0, 3.0, 3.0)).unwrap()
    }

    #[test]
    fn square_has_exactly_five_elements() {
        let p = square_partition();
        assert_eq!(p.elements.len(), 5, "got {:?}", p.elements.len());
        let half_planes =
            p.elements.iter().filter(|e| matches!(e.ball, Ball::HalfPlane { .. })).count();
        let exteriors =
            p.elements.iter().filter(|e| matches!(e.ball, Ball::ExteriorDisk { .. })).count();
        assert_eq!(half_planes, 4);
        assert_eq!(exteriors, 1);
        assert!(p.elements.iter().all(|e| e.is_gap));
    }

    #[test]
    fn square_half_plane_hull_is_a_semicircle() {
        let p = square_partition();
        let north = p
            .elements
            .iter()
            .find(|e| matches!(e.ball, Ball::HalfPlane { normal, .. } if normal.y > 0.9))
            .expect("north half-plane");
        assert_eq!(north.chords.len(), 1);
        let ArcKind::Circle { center, radius, .. } = north.chords[0].kind else {
            panic!("expected a circular chord")
        };
        assert!(center.dist(Point::new(0.0, 1.0)) < 1e-6, "center {center:?}");
        assert!((radius - 1.0).abs() < 1e-6);
        // Chord endpoints are the top corners.
        let ends = [north.chords[0].a, north.chords[0].b];
        for corner in [Point::new(-1.0, 1.0), Point::new(1.0, 1.0)] {
            assert!(ends.iter().any(|e| e.dist(corner) < 1e-9));
        }
    }

    #[test]
    fn square_exterior_chords_bulge_outward() {
        let p = square_partition();
        let ext = p
            .elements
            .iter()
            .find(|e| matches!(e.ball, Ball::ExteriorDisk { .. }))
            .expect("exterior element");
        let Ball::ExteriorDisk { center, radius } = ext.ball else { unreachable!() };
        assert!(center.norm() < 1e-6);
        assert!((radius - SQRT_2).abs() < 1e-6);
        assert_eq!(ext.chords.len(), 4);
        let mut expected = vec![
            Point::new(2.0, 0.0),
            Point::new(-2.0, 0.0),
            Point::new(0.0, 2.0),
            Point::new(0.0, -2.0),
        ];
        for chord in &ext.chords {
            let ArcKind::Circle { center: o, radius: rho, .. } = chord.kind else {
                panic!("expected circular chords")
            };
            assert!((rho - SQRT_2).abs() < 1e-6, "radius {rho}");
            let pos = expected.iter().position(|q| q.dist(o) < 1e-6);
            assert!(pos.is_some(), "unexpected chord center {o:?}");
            expected.remove(pos.unwrap());
            // The arc lies outside the enclosing circle.
            assert!(chord.point_at(0.5).norm() > SQRT_2);
        }
        assert!(expected.is_empty());
    }

    #[test]
    fn segment_partition_has_two_half_planes_and_exterior() {
        let k = Compactum::segment(Point::new(-1.0, 0.0), Point::new(1.0, 0.0));
        let p = maximal_balls(&k, Window::new(-3.0, -3.0, 3.0, 3.0)).unwrap();
        let half: Vec<_> = p
            .elements
            .iter()
            .filter_map(|e| match e.ball {
                Ball::HalfPlane { normal, .. } => Some(normal),
                _ => None,
            })
            .collect();
        assert_eq!(half.len(), 2);
        assert!(half.iter().any(|n| n.y > 0.9));
        assert!(half.iter().any(|n| n.y < -0.9));
        let ext = p
            .elements
            .iter()
            .find(|e| matches!(e.ball, Ball::ExteriorDisk { .. }))
            .expect("exterior element");
        let Ball::ExteriorDisk { center, radius } = ext.ball else { unreachable!() };
        assert!(center.norm() < 1e-6);
        assert!((radius - 1.0).abs() < 1e-6);
        // Antipodal contacts: the hull passes through infinity.
        assert_eq!(ext.chords.len(), 1);
        assert!(matches!(ext.chords[0].kind, ArcKind::TwoRays));
    }

    #[test]
    fn two_points_give_the_unit_disk_family() {
        let a = Point::new(-1.0, 0.0);
        let b = Point::new(1.0, 0.0);
        let k = Compactum::Points(vec![a, b]);
        let p = maximal_balls(&k, Window::new(-3.0, -3.0, 3.0, 3.0)).unwrap();
        // Every element touches in exactly the two points.
        for e in &p.elements {
            assert_eq!(e.contacts.len(), 2, "ball {:?}", e.ball);
            assert!(!e.is_gap);
        }
        assert!(p.elements.len() >= 4, "want half-planes, exterior, and disks");
        match chords_between(&p, a, b).unwrap() {
            ChordFamily::DiskRegion { extreme } => {
                let mids = [extreme[0].point_at(0.5), extreme[1].point_at(0.5)];
                assert!(mids.iter().any(|m| m.dist(Point::new(0.0, 1.0)) < 1e-6));
                assert!(mids.iter().any(|m| m.dist(Point::new(0.0, -1.0)) < 1e-6));
            }
            other => panic!("expected the disk case, got {other:?}"),
        }
    }

    #[test]
    fn square_corner_pair_is_a_two_chord_lens() {
        let p = square_partition();
        let fam = chords_between(&p, Point::new(1.0, 1.0), Point::new(1.0, -1.0)).unwrap();
        let ChordFamily::DiskRegion { extreme } = fam else {
            panic!("expected the lens between the half-plane and exterior chords")
        };
        let mut centers: Vec<Point> = extreme
            .iter()
            .map(|c| match c.kind {
                ArcKind::Circle { center, .. } => center,
                _ => panic!("expected circular extremes"),
            })
            .collect();
        centers.sort_by(|a, b| a.x.total_cmp(&b.x));
        assert!(centers[0].dist(Point::new(1.0, 0.0)) < 1e-6, "{centers:?}");
        assert!(centers[1].dist(Point::new(2.0, 0.0)) < 1e-6, "{centers:?}");
    }

    #[test]
    fn chords_between_rejects_degenerate_and_unrealized_pairs() {
        let p = square_partition();
        let c = Point::new(1.0, 1.0);
        assert!(matches!(chords_between(&p, c, c), Err(Error::DegenerateChord(_))));
        assert!(matches!(
            chords_between(&p, Point::new(7.0, 7.0), Point::new(8.0, 8.0)),
            Err(Error::NoChord(..))
        ));
    }

    #[test]
    fn locate_recovers_gap_and_chord_elements() {
        let p = square_partition();
        // In the semi-disk gap above the north edge.
        let in_gap = Point::new(0.1, 1.3);
        let e = p.locate(in_gap).unwrap();
        assert!(matches!(e.ball, Ball::HalfPlane { normal, .. } if normal.y > 0.9));
        assert!(e.hull_contains(in_gap, 1e-5));
        assert!(e.is_gap);
        // East of the square between the semicircle and the exterior arc:
        // a two-contact exterior ball through the right corners.
        let on_chord = Point::new(2.5, 0.0);
        let e = p.locate(on_chord).unwrap();
        assert!(!e.is_gap, "ball {:?}", e.ball);
        assert!(e.hull_contains(on_chord, 1e-5));
        for corner in [Point::new(1.0, 1.0), Point::new(1.0, -1.0)] {
            assert!(e.contacts.iter().any(|c| c.dist(corner) < 3.0 * p.h));
        }
        // Probes on the compactum are rejected.
        assert!(matches!(p.locate(Point::new(0.0, 0.0)), Err(Error::OnCurve(_))));
    }

    #[test]
    fn probes_lie_in_exactly_one_hull() {
        let p = square_partition();
        let probes =
            probe_points(&p.k, p.window, 5.0 * p.h, 400, 0x4b50);
        assert!(probes.len() >= 390);
        let mut located = 0usize;
        for &q in &probes {
            let e = match p.locate(q) {
                Ok(e) => e,
                Err(_) => continue,
            };
            if e.hull_contains(q, 1e-4) {
                located += 1;
            }
            // Interiors of enumerated hulls are pairwise disjoint.
            let inside = p
                .elements
                .iter()
                .filter(|el| el.hull_interior_contains(q, 1e-9))
                .count();
            assert!(inside <= 1, "probe {q:?} in {inside} hull interiors");
        }
        let rate = located as f64 / probes.len() as f64;
        assert!(rate >= 0.99, "located rate {rate}");
    }

    #[test]
    fn smallest_ball_center_lies_in_contact_hull() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(0x6c32);
        for trial in 0..50 {
            let n = rng.gen_range(3..10);
            let pts: Vec<Point> = (0..n)
                .map(|_| Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let Ball::Disk { center, radius } = min_enclosing_ball(&pts).unwrap() else {
                unreachable!()
            };
            if radius < 1e-6 {
                continue;
            }
            let ball = Ball::Disk { center, radius };
            let mut contacts: Vec<Point> = pts
                .iter()
                .filter(|p| (p.dist(center) - radius).abs() < 1e-7)
                .map(|&p| project_to_boundary(&ball, p))
                .collect();
            contacts.sort_by(|a, b| {
                boundary_key(&ball, *a).total_cmp(&boundary_key(&ball, *b))
            });
            assert!(contacts.len() >= 2, "trial {trial}");
            // Hyperbolic hull side tests for every consecutive contact pair.
            let m = contacts.len();
            for i in 0..m {
                let a = contacts[i];
                let b = contacts[(i + 1) % m];
                if a.dist(b) < 1e-9 {
                    continue;
                }
                let chord = perpendicular_arc(&ball, a, b).unwrap();
                let side_c = chord_side(&chord, center);
                // Reference: a contact off this chord, if any.
                let reference = contacts
                    .iter()
                    .map(|&q| chord_side(&chord, q))
                    .max_by(|x, y| x.abs().total_cmp(&y.abs()))
                    .unwrap();
                if reference.abs() <= 1e-7 {
                    // Two antipodal contacts: the hull is the diameter and
                    // the center lies on it.
                    assert!(side_c.abs() < 1e-7, "trial {trial}: center off diameter");
                } else {
                    assert!(
                        side_c * reference.signum() > -1e-7,
                        "trial {trial}: center separated from contacts"
                    );
                }
            }
        }
    }

    #[test]
    fn located_chords_vary_continuously() {
        let k = Compactum::Points(vec![Point::new(-1.0, 0.0), Point::new(1.0, 0.0)]);
        let p = maximal_balls(&k, Window::new(-3.0, -3.0, 3.0, 3.0)).unwrap();
        let probes = [0.7, 0.5, 0.3, 0.1];
        let mut prev: Option<CircularArc> = None;
        for &y in &probes {
            let e = p.locate(Point::new(0.0, y)).unwrap();
            assert_eq!(e.chords.len(), 1);
            let chord = e.chords[0];
            assert!(e.hull_contains(Point::new(0.0, y), 1e-6));
            if let Some(prev) = prev {
                // Nearby probes give nearby chords.
                let e2 = p.locate(Point::new(0.0, y + 1e-3)).unwrap();
                let close = arc_hausdorff(&e2.chords[0], &chord, 64);
                assert!(close <= 3.0 * p.h, "jump {close} vs h {}", p.h);
                let _ = prev;
            }
            prev = Some(chord);
        }
    }

    #[test]
    fn hull_outline_of_a_gap_is_closed_and_sane() {
        let p = square_partition();
        let north = p
            .elements
            .iter()
            .find(|e| matches!(e.ball, Ball::HalfPlane { normal, .. } if normal.y > 0.9))
            .unwrap();
        let geom = hull_of(north);
        assert!(geom.bounded);
        let outline = geom.outline.expect("bounded gap outline");
        assert!(outline.len() > 10);
        // The outline stays within the semi-disk bounding box.
        for q in &outline {
            assert!(q.x >= -1.0 - 1e-6 && q.x <= 1.0 + 1e-6);
            assert!(q.y >= 1.0 - 1e-6 && q.y <= 2.0 + 1e-6);
        }
        // And surrounds an interior point of the gap.
        assert!(crate::curve::region::polygon_contains(&outline, Point::new(0.0, 1.4)));
    }

    #[test]
    fn translation_has_no_signed_small_chords() {
        let k = Compactum::segment(Point::new(-1.0, 0.0), Point::new(1.0, 0.0));
        let window = Window::new(-3.0, -3.0, 3.0, 3.0);
        let p = maximal_balls(&k, window).unwrap();
        let f = PlaneMap::parse("z + 5").unwrap();
        // Small delta: the segment has no small chords at all.
        let small = classify_chords(&f, &p, 0.5).unwrap();
        assert!(small.plus.is_empty() && small.minus.is_empty() && small.zero.is_empty());
        // Large delta: the two semicircle chords, both variation zero.
        let large = classify_chords(&f, &p, 3.0).unwrap();
        assert!(large.plus.is_empty(), "{:?}", large.plus);
        assert!(large.minus.is_empty(), "{:?}", large.minus);
        assert_eq!(large.zero.len(), 2);
        assert!(large.excluded.is_empty());
    }

    #[test]
    fn identity_chords_are_excluded_for_image_overlap() {
        let k = Compactum::segment(Point::new(-1.0, 0.0), Point::new(1.0, 0.0));
        let p = maximal_balls(&k, Window::new(-3.0, -3.0, 3.0, 3.0)).unwrap();
        let f = PlaneMap::parse("z").unwrap();
        let classes = classify_chords(&f, &p, 3.0).unwrap();
        assert_eq!(classes.excluded.len(), 2);
        assert!(classes
            .excluded
            .iter()
            .all(|(_, e)| matches!(e, Error::ChordImageOverlap { .. })));
    }

    #[test]
    fn fjord_slot_chords_have_variation_minus_one() {
        let k = fjord();
        let window = Window::new(-4.0, -4.0, 4.0, 4.0);
        let p = maximal_balls_with(&k, window, window.extent() / 256.0).unwrap();
        let f = PlaneMap::parse("-conj(z) + 0.25i").unwrap();
        let classes = classify_chords(&f, &p, 1.2).unwrap();
        assert!(
            classes.minus.len() >= 3,
            "want a ladder of negative slot chords, got {} (zero {}, plus {}, excluded {})",
            classes.minus.len(),
            classes.zero.len(),
            classes.plus.len(),
            classes.excluded.len()
        );
        for sc in &classes.minus {
            assert_eq!(sc.variation, -1);
            // Slot chords span the slot walls.
            let m = sc.chord.point_at(0.5);
            assert!(m.x.abs() < 0.6, "unexpected negative chord at {m:?}");
        }
    }

    #[test]
    fn outchannel_scan_finds_the_planted_negative_chain() {
        let k = fjord();
        let window = Window::new(-4.0, -4.0, 4.0, 4.0);
        let p = maximal_balls_with(&k, window, window.extent() / 256.0).unwrap();
        let f = PlaneMap::parse("-conj(z) + 0.25i").unwrap();
        let classes = classify_chords(&f, &p, 1.2).unwrap();
        let chains = outchannel_scan(&k, &classes, window, 256.0 / window.extent()).unwrap();
        assert!(!chains.is_empty(), "no chains found");
        let best = chains.iter().max_by_key(|c| c.chords.len()).unwrap();
        assert_eq!(best.sign, -1);
        assert!(best.chords.len() >= 3, "chain too short: {}", best.chords.len());
        assert_eq!(best.total_variation, -(best.chords.len() as i32));
        // Diameters never increase along the chain.
        for w in best.chords.windows(2) {
            assert!(w[1].diameter <= w[0].diameter + 1e-9);
        }
    }

    #[test]
    fn no_chains_for_maps_without_signed_chords() {
        let k = fjord();
        let window = Window::new(-4.0, -4.0, 4.0, 4.0);
        let p = maximal_balls_with(&k, window, window.extent() / 256.0).unwrap();
        for f in [PlaneMap::parse("z + 5").unwrap(), PlaneMap::constant(0.0.into())] {
            let classes = classify_chords(&f, &p, 1.2).unwrap();
            let chains =
                outchannel_scan(&k, &classes, window, 256.0 / window.extent()).unwrap();
            assert!(chains.is_empty(), "unexpected chains for {:?}", f.expr());
        }
    }

    #[test]
    fn auxiliary_continuum_boundary_stays_on_the_union() {
        let k = fjord();
        let window = Window::new(-4.0, -4.0, 4.0, 4.0);
        let p = maximal_balls_with(&k, window, window.extent() / 256.0).unwrap();
        let f = PlaneMap::parse("-conj(z) + 0.25i").unwrap();
        let classes = classify_chords(&f, &p, 1.2).unwrap();
        let chords: Vec<CircularArc> = classes
            .plus
            .iter()
            .chain(classes.minus.iter())
            .chain(classes.zero.iter())
            .map(|sc| sc.chord)
            .collect();
        let resolution = 256.0 / window.extent();
        let z = auxiliary_continuum(&k, &chords, window, resolution).unwrap();
        // Reference raster of the bare union (no hull fill).
        let mut union = Region::empty(window, resolution).unwrap();
        k.rasterize_into(&mut union);
        let cell = union.cell_size();
        for c in &chords {
            union.mark_polyline(&chord_polyline(c, cell, window.extent()), false);
        }
        for b in z.boundary_centers() {
            assert!(
                union.near_marked(b, 2),
                "boundary cell {b:?} is off the compactum-and-chords union"
            );
        }
    }

    #[test]
    fn segment_continuum_with_large_delta_fills_the_disk() {
        let k = Compactum::segment(Point::new(-1.0, 0.0), Point::new(1.0, 0.0));
        let window = Window::new(-3.0, -3.0, 3.0, 3.0);
        let p = maximal_balls(&k, window).unwrap();
        let f = PlaneMap::parse("z + 5").unwrap();
        let classes = classify_chords(&f, &p, 3.0).unwrap();
        let chords: Vec<CircularArc> = classes.zero.iter().map(|sc| sc.chord).collect();
        assert_eq!(chords.len(), 2);
        let resolution = 256.0 / window.extent();
        let z = auxiliary_continuum(&k, &chords, window, resolution).unwrap();
        // The hull of segment plus both semicircles is the unit disk.
        let area = z.area();
        assert!((area - std::f64::consts::PI).abs() < 0.15, "area {area}");
        assert!(z.contains_point(Point::new(0.0, 0.7)));
        assert!(z.contains_point(Point::new(0.0, -0.7)));
        assert!(!z.contains_point(Point::new(1.5, 1.5)));
    }

    /// Largest diameter among enumerated chords contained in the
    /// delta-neighborhood of the compactum.
    fn max_small_chord_diameter(p: &KPPartition, delta: f64) -> f64 {
        p.elements
            .iter()
            .flat_map(|e| e.chords.iter())
            .filter(|c| !matches!(c.kind, ArcKind::TwoRays))
            .filter(|c| c.sample(32).iter().all(|s| p.k.dist(*s) <= delta))
            .map(|c| c.diameter())
            .fold(0.0f64, f64::max)
    }

    #[test]
    fn chord_diameters_shrink_with_delta() {
        let ladder = [0.4f64, 0.2, 0.1, 0.05];
        // A wedge notch carries crosscut chords at every scale, so the
        // smallness trend is visible with real values.
        let wedge = Compactum::Polygon(vec![
            Point::new(-2.0, -2.0),
            Point::new(2.0, -2.0),
            Point::new(2.0, 2.0),
            Point::new(0.8, 2.0),
            Point::new(0.0, -1.0),
            Point::new(-0.8, 2.0),
            Point::new(-2.0, 2.0),
        ]);
        let window = Window::new(-4.0, -4.0, 4.0, 4.0);
        let p = maximal_balls(&wedge, window).unwrap();
        let diams: Vec<f64> = ladder.iter().map(|&d| max_small_chord_diameter(&p, d)).collect();
        for w in diams.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "not monotone: {diams:?}");
        }
        assert!(
            diams[3] > 0.0 && diams[3] < diams[0],
            "no genuine shrinking trend: {diams:?}"
        );
        for (&d, &delta) in diams.iter().zip(ladder.iter()) {
            assert!(d <= 4.0 * delta, "chord of diameter {d} not small at delta {delta}");
        }
        // Every chord of the square connects two corners through the outer
        // lens, so no chord lies within these distances of the square and
        // the trend there is trivially zero.
        let sq = square_partition();
        for &delta in &ladder {
            assert_eq!(max_small_chord_diameter(&sq, delta), 0.0);
        }
    }
}
