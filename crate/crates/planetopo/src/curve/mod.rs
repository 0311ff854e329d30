//! Oriented simple closed curves and their counterclockwise subarcs.
//!
//! A curve is stored as a simple closed polyline with positive signed area
//! and parameterized by normalized arc length `t in [0, 1)`. Subarcs carry a
//! start parameter and a positive parameter span, so an arc and its
//! complement always cover the parameter circle exactly once.

pub mod region;

pub use region::{shadow_of, Compactum, Region};

use crate::error::{Error, Result};
use crate::geom::{Point, GEOM_EPS};

/// A positively oriented (counterclockwise) simple closed polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedClosedCurve {
    verts: Vec<Point>,
    /// Cumulative arc length; `cum[0] = 0`, `cum[n] = total`.
    cum: Vec<f64>,
    total: f64,
}

impl OrientedClosedCurve {
    /// Build a curve from a cyclic vertex list (the closing edge from the
    /// last vertex back to the first is implicit; a repeated first vertex at
    /// the end is tolerated and dropped).
    ///
    /// Rejects polylines with fewer than three distinct vertices, any
    /// self-intersection, and clockwise orientation.
    pub fn from_vertices(vertices: Vec<Point>) -> Result<Self> {
        let mut verts: Vec<Point> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if verts.last().map_or(true, |l| l.dist(v) > GEOM_EPS) {
                verts.push(v);
            }
        }
        while verts.len() >= 2 && verts[0].dist(*verts.last().unwrap()) <= GEOM_EPS {
            verts.pop();
        }
        if verts.len() < 3 {
            return Err(Error::TooFewVertices(verts.len()));
        }
        let n = verts.len();
        let edge = |i: usize| (verts[i], verts[(i + 1) % n]);

        // Simplicity: non-adjacent edges must keep a positive distance, and
        // an edge may not run back over its neighbor past the shared vertex.
        for i in 0..n {
            let (a, b) = edge(i);
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (c, d) = edge(j);
                if adjacent {
                    let (far_c, far_d) =
                        if j == i + 1 { (d, a) } else { (c, b) };
                    // far_c: far endpoint of the later edge vs. this edge;
                    // far_d: far endpoint of this edge vs. the later edge.
                    if point_segment_dist(far_c, a, b) <= GEOM_EPS
                        || point_segment_dist(far_d, c, d) <= GEOM_EPS
                    {
                        return Err(Error::NotSimple(i, j));
                    }
                } else if segment_segment_dist(a, b, c, d) <= GEOM_EPS {
                    return Err(Error::NotSimple(i, j));
                }
            }
        }

        // Orientation: shoelace area must be positive. The sum is taken
        // about the centroid so that small loops far from the origin do not
        // cancel catastrophically, and the gate scales with the perimeter so
        // that legitimately tiny loops (subdivision boxes) are not rejected.
        let inv_n = 1.0 / n as f64;
        let centroid = verts.iter().fold(Point::new(0.0, 0.0), |s, &v| s + v) * inv_n;
        let mut area2 = 0.0;
        let mut perimeter = 0.0;
        for i in 0..n {
            let (a, b) = edge(i);
            area2 += (a - centroid).cross(b - centroid);
            perimeter += a.dist(b);
        }
        if area2 <= 1e-12 * perimeter * perimeter {
            return Err(Error::NotCounterclockwise(area2 / 2.0));
        }

        let mut cum = Vec::with_capacity(n + 1);
        cum.push(0.0);
        for i in 0..n {
            let (a, b) = edge(i);
            cum.push(cum[i] + a.dist(b));
        }
        let total = cum[n];
        Ok(OrientedClosedCurve { verts, cum, total })
    }

    /// Axis-aligned rectangle, counterclockwise.
    pub fn rectangle(center: Point, half_w: f64, half_h: f64) -> Result<Self> {
        Self::from_vertices(vec![
            center + Point::new(-half_w, -half_h),
            center + Point::new(half_w, -half_h),
            center + Point::new(half_w, half_h),
            center + Point::new(-half_w, half_h),
        ])
    }

    /// Regular `n`-gon approximation of a circle, counterclockwise.
    pub fn circle(center: Point, radius: f64, n: usize) -> Result<Self> {
        let n = n.max(3);
        Self::from_vertices(
            (0..n)
                .map(|k| {
                    let t = k as f64 / n as f64 * std::f64::consts::TAU;
                    center + Point::new(t.cos(), t.sin()) * radius
                })
                .collect(),
        )
    }

    /// Star-shaped polygon with one vertex per radius, at evenly spaced
    /// angles around `center`, counterclockwise. Star-shaped about `center`
    /// by construction, hence simple.
    pub fn star(center: Point, radii: &[f64]) -> Result<Self> {
        Self::from_vertices(
            radii
                .iter()
                .enumerate()
                .map(|(k, &r)| {
                    let t = k as f64 / radii.len() as f64 * std::f64::consts::TAU;
                    center + Point::new(t.cos(), t.sin()) * r
                })
                .collect(),
        )
    }

    pub fn vertices(&self) -> &[Point] {
        &self.verts
    }

    /// Total arc length.
    pub fn length(&self) -> f64 {
        self.total
    }

    /// Point at normalized arc-length parameter `t` (wrapped mod 1).
    pub fn point_at(&self, t: f64) -> Point {
        let s = t.rem_euclid(1.0) * self.total;
        let i = match self.cum.binary_search_by(|c| c.total_cmp(&s)) {
            Ok(i) => i.min(self.verts.len() - 1),
            Err(i) => i - 1,
        };
        let a = self.verts[i];
        let b = self.verts[(i + 1) % self.verts.len()];
        let seg = self.cum[i + 1] - self.cum[i];
        if seg <= 0.0 {
            return a;
        }
        a.lerp(b, (s - self.cum[i]) / seg)
    }

    /// Parameter of vertex `i`.
    pub fn vertex_param(&self, i: usize) -> f64 {
        self.cum[i % self.verts.len()] / self.total
    }

    /// Nearest curve point to `p`: returns `(t, distance)`.
    pub fn project(&self, p: Point) -> (f64, f64) {
        let n = self.verts.len();
        let mut best = (0.0, f64::INFINITY);
        for i in 0..n {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            let (q, u) = closest_on_segment(p, a, b);
            let d = p.dist(q);
            if d < best.1 {
                let s = self.cum[i] + u * (self.cum[i + 1] - self.cum[i]);
                best = ((s / self.total).rem_euclid(1.0), d);
            }
        }
        best
    }

    /// Even–odd membership in the bounded complementary component.
    /// Errors with [`Error::OnCurve`] when `p` is within [`GEOM_EPS`] of the
    /// curve itself.
    pub fn contains(&self, p: Point) -> Result<bool> {
        let (_, d) = self.project(p);
        if d <= GEOM_EPS {
            return Err(Error::OnCurve(p));
        }
        Ok(self.even_odd(p))
    }

    /// Closed-hull membership with tolerance: true when `p` is inside or
    /// within `tol` of the curve. Never errors.
    pub fn contains_closed(&self, p: Point, tol: f64) -> bool {
        let (_, d) = self.project(p);
        d <= tol || self.even_odd(p)
    }

    fn even_odd(&self, p: Point) -> bool {
        let n = self.verts.len();
        let mut inside = false;
        for i in 0..n {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if x > p.x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Counterclockwise subarc from parameter `a` to `b`. When `a` and `b`
    /// coincide (mod 1) the arc is the full loop.
    pub fn arc(&self, a: f64, b: f64) -> CurveArc<'_> {
        let mut span = (b - a).rem_euclid(1.0);
        if span < 1e-15 {
            span = 1.0;
        }
        CurveArc { curve: self, a: a.rem_euclid(1.0), span }
    }

    /// The full curve as an arc starting (and ending) at parameter `a`.
    pub fn full_loop(&self, a: f64) -> CurveArc<'_> {
        CurveArc { curve: self, a: a.rem_euclid(1.0), span: 1.0 }
    }
}

/// A counterclockwise subarc `[a, b]` of a parent curve; `span` is the
/// parameter length in `(0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct CurveArc<'a> {
    pub curve: &'a OrientedClosedCurve,
    pub a: f64,
    pub span: f64,
}

impl<'a> CurveArc<'a> {
    /// End parameter (mod 1).
    pub fn b(&self) -> f64 {
        (self.a + self.span).rem_euclid(1.0)
    }

    /// Point at local parameter `u in [0, 1]` along the arc.
    pub fn point_at(&self, u: f64) -> Point {
        self.curve.point_at(self.a + u * self.span)
    }

    pub fn endpoints(&self) -> (Point, Point) {
        (self.point_at(0.0), self.point_at(1.0))
    }

    /// `n + 1` points from start to end inclusive.
    pub fn sample(&self, n: usize) -> Vec<Point> {
        let n = n.max(1);
        (0..=n).map(|k| self.point_at(k as f64 / n as f64)).collect()
    }

    /// Arc length.
    pub fn length(&self) -> f64 {
        self.span * self.curve.length()
    }

    /// Whether global parameter `t` lies on this arc.
    pub fn contains_param(&self, t: f64) -> bool {
        (t - self.a).rem_euclid(1.0) <= self.span + 1e-12
    }
}

/// Closest point on segment `[a, b]` to `p`, with its parameter in `[0, 1]`.
pub fn closest_on_segment(p: Point, a: Point, b: Point) -> (Point, f64) {
    let ab = b - a;
    let len2 = ab.norm2();
    if len2 <= 0.0 {
        return (a, 0.0);
    }
    let u = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (a.lerp(b, u), u)
}

/// Distance from `p` to segment `[a, b]`.
pub fn point_segment_dist(p: Point, a: Point, b: Point) -> f64 {
    p.dist(closest_on_segment(p, a, b).0)
}

/// Distance between segments `[a, b]` and `[c, d]` (zero when they cross).
pub fn segment_segment_dist(a: Point, b: Point, c: Point, d: Point) -> f64 {
    // Proper crossing test via orientation signs.
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return 0.0;
    }
    point_segment_dist(a, c, d)
        .min(point_segment_dist(b, c, d))
        .min(point_segment_dist(c, a, b))
        .min(point_segment_dist(d, a, b))
}

/// Intersection point of segments `[a, b]` and `[c, d]` when they properly
/// cross, with the parameter along `[a, b]`.
pub fn segment_intersection(a: Point, b: Point, c: Point, d: Point) -> Option<(Point, f64)> {
    let r = b - a;
    let s = d - c;
    let denom = r.cross(s);
    if denom.abs() < 1e-18 {
        return None;
    }
    let t = (c - a).cross(s) / denom;
    let u = (c - a).cross(r) / denom;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some((a + r * t, t))
    } else {
        None
    }
}
