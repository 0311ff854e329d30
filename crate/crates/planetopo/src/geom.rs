//! Planar primitives: points, round balls (disks, half-planes, exterior
//! disks), circular arcs, orientation tests, smallest enclosing disks,
//! inversion, and arcs crossing a ball boundary at right angles.
//!
//! Everything here is a pure function on immutable values. Coordinates are
//! `f64` at desk scale (curves of size O(1)); the coincidence tolerance is
//! [`GEOM_EPS`] and the orientation zero-band is [`ORIENT_EPS`].

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Geometric coincidence tolerance, in window units.
pub const GEOM_EPS: f64 = 1e-9;
/// Zero-band for the orientation determinant.
pub const ORIENT_EPS: f64 = 1e-12;
/// Angular tolerance for the perpendicularity checks on chord endpoints.
pub const PERP_TOL: f64 = 1e-7;

/// A plane point with finite coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product, i.e. the signed parallelogram area.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm2(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Rotate by +90 degrees (counterclockwise).
    pub fn rot90(self) -> Point {
        Point::new(-self.y, self.x)
    }

    /// Rotate by `angle` radians counterclockwise.
    pub fn rotate(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Unit vector in the same direction. Returns `None` for near-zero input.
    pub fn normalize(self) -> Option<Point> {
        let n = self.norm();
        if n < GEOM_EPS {
            None
        } else {
            Some(Point::new(self.x / n, self.y / n))
        }
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        Point::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }

    pub fn mid(self, o: Point) -> Point {
        self.lerp(o, 0.5)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl std::ops::Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Closed axis-aligned rectangle serving as the computation window: the
/// bounded stand-in for the plane. Escaping rays and rasters stop here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Window { x0, y0, x1, y1 }
    }

    /// Smallest window containing `pts`, padded by `margin` on all sides.
    pub fn around(pts: &[Point], margin: f64) -> Result<Self> {
        if pts.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut w = Window::new(pts[0].x, pts[0].y, pts[0].x, pts[0].y);
        for p in pts {
            w.x0 = w.x0.min(p.x);
            w.y0 = w.y0.min(p.y);
            w.x1 = w.x1.max(p.x);
            w.y1 = w.y1.max(p.y);
        }
        w.x0 -= margin;
        w.y0 -= margin;
        w.x1 += margin;
        w.y1 += margin;
        Ok(w)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    /// Longer side length.
    pub fn extent(&self) -> f64 {
        self.width().max(self.height())
    }

    pub fn center(&self) -> Point {
        Point::new((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }

    /// Distance from `p` to the window boundary (positive inside).
    pub fn depth(&self, p: Point) -> f64 {
        (p.x - self.x0).min(self.x1 - p.x).min(p.y - self.y0).min(self.y1 - p.y)
    }
}

/// Sign of twice the signed area of the triangle (p, q, r): `+1` for a
/// counterclockwise turn, `-1` for clockwise, `0` within [`ORIENT_EPS`].
pub fn orient(p: Point, q: Point, r: Point) -> i8 {
    let det = (q - p).cross(r - p);
    if det > ORIENT_EPS {
        1
    } else if det < -ORIENT_EPS {
        -1
    } else {
        0
    }
}

/// A closed round ball: a disk, a half-plane, or the closed complement of
/// an open disk (which contains the point at infinity).
///
/// Half-planes and exterior disks are first-class variants rather than
/// huge-radius disk limits; that keeps the arithmetic stable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ball {
    /// Closed disk `|z - center| <= radius`.
    Disk { center: Point, radius: f64 },
    /// Closed half-plane `{ z : (z - point) . normal >= 0 }`; `normal` is a
    /// unit vector pointing into the ball.
    HalfPlane { point: Point, normal: Point },
    /// Closed set `|z - center| >= radius` together with infinity.
    ExteriorDisk { center: Point, radius: f64 },
}

impl Ball {
    /// Signed boundary distance: negative strictly inside the ball,
    /// positive outside, zero on the boundary.
    pub fn signed(&self, p: Point) -> f64 {
        match *self {
            Ball::Disk { center, radius } => p.dist(center) - radius,
            Ball::HalfPlane { point, normal } => -(p - point).dot(normal),
            Ball::ExteriorDisk { center, radius } => radius - p.dist(center),
        }
    }

    /// Closed membership with tolerance [`GEOM_EPS`].
    pub fn contains(&self, p: Point) -> bool {
        self.signed(p) <= GEOM_EPS
    }

    /// Strict interior membership with tolerance `tol`.
    pub fn interior_contains(&self, p: Point, tol: f64) -> bool {
        self.signed(p) < -tol
    }

    /// Whether `p` lies on the boundary within `tol`.
    pub fn on_boundary(&self, p: Point, tol: f64) -> bool {
        self.signed(p).abs() <= tol
    }

    /// Outward unit normal of the boundary at a boundary point.
    pub fn boundary_normal(&self, p: Point) -> Point {
        match *self {
            Ball::Disk { center, .. } => (p - center).normalize().unwrap_or(Point::new(1.0, 0.0)),
            Ball::HalfPlane { normal, .. } => -normal,
            Ball::ExteriorDisk { center, .. } => {
                -(p - center).normalize().unwrap_or(Point::new(1.0, 0.0))
            }
        }
    }

    /// Radius for the round variants; `None` for half-planes.
    pub fn radius(&self) -> Option<f64> {
        match *self {
            Ball::Disk { radius, .. } | Ball::ExteriorDisk { radius, .. } => Some(radius),
            Ball::HalfPlane { .. } => None,
        }
    }
}

/// The support of a [`CircularArc`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArcKind {
    /// Arc of the circle `|z - center| = radius`, from the angle of `a`,
    /// sweeping `sweep` radians (positive = counterclockwise) to `b`.
    Circle { center: Point, radius: f64, start: f64, sweep: f64 },
    /// Straight segment from `a` to `b`.
    Segment,
    /// The straight line through `a` and `b` minus the open segment
    /// `(a, b)`: two rays meeting at infinity. Arises only inside exterior
    /// balls when the endpoints are antipodal on the boundary circle.
    TwoRays,
}

/// A circular-or-straight arc with endpoints `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularArc {
    pub a: Point,
    pub b: Point,
    pub kind: ArcKind,
}

impl CircularArc {
    pub fn segment(a: Point, b: Point) -> Self {
        CircularArc { a, b, kind: ArcKind::Segment }
    }

    /// Arc on the circle `(center, radius)` from `a` to `b`, choosing the
    /// sweep direction so the arc passes through `via`.
    pub fn on_circle_via(center: Point, radius: f64, a: Point, b: Point, via: Point) -> Self {
        let ta = (a - center).angle();
        let tb = (b - center).angle();
        let tv = (via - center).angle();
        // Counterclockwise sweeps from a to b and from a to via.
        let ccw = |from: f64, to: f64| {
            let mut d = to - from;
            while d < 0.0 {
                d += std::f64::consts::TAU;
            }
            while d >= std::f64::consts::TAU {
                d -= std::f64::consts::TAU;
            }
            d
        };
        let sweep_ab = ccw(ta, tb);
        let sweep_av = ccw(ta, tv);
        let sweep = if sweep_av <= sweep_ab {
            sweep_ab
        } else {
            sweep_ab - std::f64::consts::TAU
        };
        CircularArc { a, b, kind: ArcKind::Circle { center, radius, start: ta, sweep } }
    }

    /// Point at parameter `t` in `[0, 1]` along the arc (finite kinds only;
    /// for `TwoRays` the parameterization is undefined and `a`/`b` are
    /// returned at the endpoints with a clamp in between).
    pub fn point_at(&self, t: f64) -> Point {
        match self.kind {
            ArcKind::Segment => self.a.lerp(self.b, t),
            ArcKind::Circle { center, radius, start, sweep } => {
                let ang = start + sweep * t;
                center + Point::new(ang.cos(), ang.sin()) * radius
            }
            ArcKind::TwoRays => {
                if t < 0.5 {
                    self.a
                } else {
                    self.b
                }
            }
        }
    }

    /// `n + 1` points including both endpoints (finite kinds).
    pub fn sample(&self, n: usize) -> Vec<Point> {
        let n = n.max(1);
        (0..=n).map(|k| self.point_at(k as f64 / n as f64)).collect()
    }

    /// Sample the `TwoRays` support out to `clip` from each endpoint; for
    /// finite kinds this is the same as [`CircularArc::sample`].
    pub fn sample_clipped(&self, n: usize, clip: f64) -> Vec<Point> {
        match self.kind {
            ArcKind::TwoRays => {
                let d = match (self.b - self.a).normalize() {
                    Some(d) => d,
                    None => return vec![self.a, self.b],
                };
                let n = n.max(2);
                let half = n / 2;
                let mut pts: Vec<Point> = (0..=half)
                    .rev()
                    .map(|k| self.a - d * (clip * k as f64 / half as f64))
                    .collect();
                pts.extend((0..=half).map(|k| self.b + d * (clip * k as f64 / half as f64)));
                pts
            }
            _ => self.sample(n),
        }
    }

    /// Diameter of the closed arc (infinite for `TwoRays`).
    pub fn diameter(&self) -> f64 {
        match self.kind {
            ArcKind::Segment => self.a.dist(self.b),
            ArcKind::Circle { radius, sweep, .. } => {
                if sweep.abs() >= std::f64::consts::PI {
                    2.0 * radius
                } else {
                    self.a.dist(self.b)
                }
            }
            ArcKind::TwoRays => f64::INFINITY,
        }
    }

    /// Midpoint of the arc (parameter 1/2).
    pub fn midpoint(&self) -> Point {
        self.point_at(0.5)
    }

    /// Unit tangent at endpoint `p` (which must be `a` or `b`), pointing
    /// along the arc away from that endpoint.
    pub fn tangent_from(&self, p: Point) -> Option<Point> {
        let at_a = p.dist(self.a) <= p.dist(self.b);
        match self.kind {
            ArcKind::Segment => {
                let d = if at_a { self.b - self.a } else { self.a - self.b };
                d.normalize()
            }
            ArcKind::TwoRays => {
                let d = if at_a { self.a - self.b } else { self.b - self.a };
                d.normalize()
            }
            ArcKind::Circle { center, sweep, .. } => {
                let radial = (if at_a { self.a } else { self.b }) - center;
                let t = radial.rot90();
                let sgn = if at_a { sweep.signum() } else { -sweep.signum() };
                (t * sgn).normalize()
            }
        }
    }
}

/// Smallest closed disk containing every input point.
///
/// Randomized incremental construction with a fixed seed, so the result is
/// reproducible. A single input point yields the degenerate radius-0 disk.
pub fn min_enclosing_ball(points: &[Point]) -> Result<Ball> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut pts: Vec<Point> = points.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d69_6e69_6469_736b);
    pts.shuffle(&mut rng);

    let inside = |c: Point, r: f64, p: Point| p.dist(c) <= r * (1.0 + 1e-12) + 1e-12;

    let mut center = pts[0];
    let mut radius = 0.0_f64;
    for i in 1..pts.len() {
        if inside(center, radius, pts[i]) {
            continue;
        }
        // pts[i] is on the boundary of the new disk.
        center = pts[i];
        radius = 0.0;
        for j in 0..i {
            if inside(center, radius, pts[j]) {
                continue;
            }
            // pts[i], pts[j] both on the boundary.
            center = pts[i].mid(pts[j]);
            radius = pts[i].dist(pts[j]) / 2.0;
            for k in 0..j {
                if inside(center, radius, pts[k]) {
                    continue;
                }
                // Three boundary points determine the disk.
                let (c, r) = circumscribe(pts[i], pts[j], pts[k]);
                center = c;
                radius = r;
            }
        }
    }
    Ok(Ball::Disk { center, radius })
}

/// Circumcircle of three points; for (near-)collinear triples falls back to
/// the smallest disk of the farthest pair.
pub fn circumscribe(a: Point, b: Point, c: Point) -> (Point, f64) {
    let d = 2.0 * (b - a).cross(c - a);
    if d.abs() < 1e-14 * (a.norm2() + b.norm2() + c.norm2() + 1.0) {
        // Collinear: the diametral disk of the farthest pair covers the rest.
        let pairs = [(a, b), (a, c), (b, c)];
        let (p, q) = pairs
            .iter()
            .copied()
            .max_by(|(p1, q1), (p2, q2)| p1.dist(*q1).total_cmp(&p2.dist(*q2)))
            .unwrap();
        return (p.mid(q), p.dist(q) / 2.0);
    }
    let a2 = a.norm2();
    let b2 = b.norm2();
    let c2 = c.norm2();
    let ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    let uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    let center = Point::new(ux, uy);
    let radius = center.dist(a).max(center.dist(b)).max(center.dist(c));
    (center, radius)
}

/// Inversion of `p` through the unit circle centered at `pole`:
/// `pole + (p - pole) / |p - pole|^2`. Involutive away from the pole.
pub fn invert(p: Point, pole: Point) -> Result<Point> {
    let d = p - pole;
    let n2 = d.norm2();
    if n2 < GEOM_EPS * GEOM_EPS {
        return Err(Error::PoleInput(p));
    }
    Ok(pole + d * (1.0 / n2))
}

/// The unique arc through `a` and `b` that meets the boundary of `B` at
/// right angles, restricted to the closure of the interior of `B`.
///
/// For a half-plane the result is the semicircle on diameter `[a, b]`; for
/// a diametrically opposite pair on a disk it is the straight chord; for an
/// antipodal pair on an exterior ball it is the pair of rays through
/// infinity. Endpoints must lie on the boundary within [`GEOM_EPS`].
pub fn perpendicular_arc(ball: &Ball, a: Point, b: Point) -> Result<CircularArc> {
    if a.dist(b) < GEOM_EPS {
        return Err(Error::DegenerateChord(a));
    }
    for &p in &[a, b] {
        let d = ball.signed(p).abs();
        if d > GEOM_EPS {
            return Err(Error::NotOnBoundary { point: p, dist: d, tol: GEOM_EPS });
        }
    }
    match *ball {
        Ball::HalfPlane { normal, .. } => {
            let center = a.mid(b);
            let radius = a.dist(b) / 2.0;
            let via = center + normal * radius;
            Ok(CircularArc::on_circle_via(center, radius, a, b, via))
        }
        Ball::Disk { center, radius } => {
            let ar = a - center;
            let br = b - center;
            let det = ar.cross(br);
            if det.abs() < 1e-9 * radius * radius {
                // Antipodal contacts: the geodesic is the straight diameter.
                return Ok(CircularArc::segment(a, b));
            }
            let o_rel = solve2(ar, br, radius * radius)?;
            let o = center + o_rel;
            let rho = (o_rel.norm2() - radius * radius).max(0.0).sqrt();
            // Of the two arcs through a and b, keep the one inside the disk:
            // its points are nearer to `center` than the crossing circle's
            // far side, i.e. the arc on the `center` side of chord ab.
            let via = pick_side(o, rho, a, b, |p| ball.signed(p) < 0.0);
            Ok(CircularArc::on_circle_via(o, rho, a, b, via))
        }
        Ball::ExteriorDisk { center, radius } => {
            let ar = a - center;
            let br = b - center;
            let det = ar.cross(br);
            if det.abs() < 1e-9 * radius * radius {
                // Antipodal contacts: the geodesic passes through infinity.
                return Ok(CircularArc { a, b, kind: ArcKind::TwoRays });
            }
            let o_rel = solve2(ar, br, radius * radius)?;
            let o = center + o_rel;
            let rho = (o_rel.norm2() - radius * radius).max(0.0).sqrt();
            let via = pick_side(o, rho, a, b, |p| ball.signed(p) < 0.0);
            Ok(CircularArc::on_circle_via(o, rho, a, b, via))
        }
    }
}

/// Solve `o . u = rhs`, `o . v = rhs` for `o`.
fn solve2(u: Point, v: Point, rhs: f64) -> Result<Point> {
    let det = u.cross(v);
    if det.abs() < 1e-15 {
        return Err(Error::DegenerateChord(u));
    }
    // By Cramer's rule on [[u.x, u.y], [v.x, v.y]] o = (rhs, rhs).
    let ox = (rhs * v.y - u.y * rhs) / det;
    let oy = (u.x * rhs - rhs * v.x) / det;
    Ok(Point::new(ox, oy))
}

/// Of the two arc midpoints of circle `(o, rho)` between `a` and `b`, pick
/// the one satisfying `want` (e.g. "inside the ball").
fn pick_side(o: Point, rho: f64, a: Point, b: Point, want: impl Fn(Point) -> bool) -> Point {
    let ta = (a - o).angle();
    let tb = (b - o).angle();
    let mut d = tb - ta;
    while d < 0.0 {
        d += std::f64::consts::TAU;
    }
    let m1 = o + Point::new((ta + d / 2.0).cos(), (ta + d / 2.0).sin()) * rho;
    let m2 = o + Point::new((ta + d / 2.0 + std::f64::consts::PI).cos(),
                            (ta + d / 2.0 + std::f64::consts::PI).sin()) * rho;
    if want(m1) {
        m1
    } else {
        m2
    }
}
