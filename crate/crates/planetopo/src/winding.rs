//! Certified winding numbers and the fixed-point index.
//!
//! The index of a map `f` along an oriented closed curve `s` is the winding
//! number of the displacement loop `t ↦ f(s(t)) - s(t)` about the origin.
//! The lift is computed adaptively: a direction step between consecutive
//! samples is accepted only when its principal value is below `π/2`,
//! otherwise the interval is bisected (up to [`MAX_DEPTH`] levels). Every
//! sample is checked against the near-zero threshold, so a fixed point on
//! the curve is reported rather than silently mis-winding.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::curve::{CurveArc, OrientedClosedCurve};
use crate::error::{Error, Result};
use crate::geom::{orient, Point};
use crate::maps::PlaneMap;

/// Displacement norms at or below this are treated as a fixed point hit.
pub const NEAR_ZERO: f64 = 1e-7;
/// Maximum bisection depth of the adaptive lift.
pub const MAX_DEPTH: usize = 24;
/// A certified closed lift must land within this distance of an integer.
pub const INTEGER_TOL: f64 = 1e-6;

/// Why a lift could not be certified. `t` values are loop parameters in
/// `[0, 1]`; callers translate them into their own geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum LiftFailure {
    /// The loop value came within [`NEAR_ZERO`] of the origin.
    NearZero { t: f64, min: f64 },
    /// Bisection hit [`MAX_DEPTH`] with a direction step still >= π/2.
    Depth { depth: usize, worst: f64 },
}

/// Principal angle from `a` to `b`, in `(-π, π]`.
fn angle_step(a: Point, b: Point) -> f64 {
    a.cross(b).atan2(a.dot(b))
}

/// Golden-section minimization of `|g|` over `[lo, hi]` to width `1e-10`.
fn refine_min(g: &dyn Fn(f64) -> Point, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = g(x1).norm();
    let mut f2 = g(x2).norm();
    while hi - lo > 1e-10 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = g(x1).norm();
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = g(x2).norm();
        }
    }
    let tm = 0.5 * (lo + hi);
    (tm, g(tm).norm().min(f1.min(f2)))
}

/// Check one sample against the near-zero threshold; when it is within an
/// order of magnitude, refine to locate the true local minimum before
/// deciding.
fn check_sample(
    g: &dyn Fn(f64) -> Point,
    t: f64,
    v: Point,
    halo: f64,
) -> std::result::Result<(), LiftFailure> {
    let n = v.norm();
    if n > NEAR_ZERO * 10.0 {
        return Ok(());
    }
    let (tm, min) = refine_min(g, (t - halo).max(0.0), (t + halo).min(1.0));
    if min <= NEAR_ZERO {
        return Err(LiftFailure::NearZero { t: tm, min });
    }
    Ok(())
}

fn lift_segment(
    g: &dyn Fn(f64) -> Point,
    t0: f64,
    v0: Point,
    t1: f64,
    v1: Point,
    depth: usize,
) -> std::result::Result<f64, LiftFailure> {
    let step = angle_step(v0, v1);
    if step.abs() < FRAC_PI_2 {
        return Ok(step);
    }
    if depth >= MAX_DEPTH {
        return Err(LiftFailure::Depth { depth, worst: step.abs() });
    }
    let tm = 0.5 * (t0 + t1);
    let vm = g(tm);
    check_sample(g, tm, vm, 0.5 * (t1 - t0))?;
    Ok(lift_segment(g, t0, v0, tm, vm, depth + 1)?
        + lift_segment(g, tm, vm, t1, v1, depth + 1)?)
}

/// Total turning (in turns, i.e. multiples of 2π) of the path
/// `t ↦ g(t), t in [0, 1]`. For a closed loop (`g(1) = g(0)`) this is the
/// winding about the origin; for an open path it is the net direction
/// change.
pub(crate) fn lift_path(
    g: &dyn Fn(f64) -> Point,
    initial: usize,
) -> std::result::Result<f64, LiftFailure> {
    let n = initial.max(8);
    let h = 1.0 / n as f64;
    let mut total = 0.0;
    let mut t_prev = 0.0;
    let mut v_prev = g(0.0);
    check_sample(g, 0.0, v_prev, h)?;
    for k in 1..=n {
        let t = k as f64 * h;
        let v = g(t);
        check_sample(g, t, v, h)?;
        total += lift_segment(g, t_prev, v_prev, t, v, 0)?;
        t_prev = t;
        v_prev = v;
    }
    Ok(total / (2.0 * PI))
}

/// Round a certified closed lift to the integer it must equal.
pub(crate) fn turns_to_integer(turns: f64) -> Result<i32> {
    let nearest = turns.round();
    let err = (turns - nearest).abs();
    if err > INTEGER_TOL {
        return Err(Error::CertificationFailed { depth: 0, worst: err });
    }
    Ok(nearest as i32)
}

/// Sampling density for the displacement loop of `f` along `s`, from the
/// Lipschitz bound of `f` and a coarse probe of the displacement scale.
fn initial_samples(f: &PlaneMap, s: &OrientedClosedCurve, g: &dyn Fn(f64) -> Point) -> usize {
    let r = s
        .vertices()
        .iter()
        .map(|v| v.norm())
        .fold(0.0_f64, f64::max)
        .max(1.0);
    let lip_loop = f.lipschitz_on(1.25 * r) + 1.0;
    let mut min_probe = f64::INFINITY;
    for k in 0..256 {
        min_probe = min_probe.min(g(k as f64 / 256.0).norm());
    }
    let scale = min_probe.max(10.0 * NEAR_ZERO);
    let wanted = 2.0 * lip_loop * s.length() / scale;
    (wanted.ceil() as usize).clamp(1024, 32_768)
}

/// Fixed-point index of `f` along the oriented closed curve `s`.
///
/// Errors with [`Error::FixedPointOnCurve`] when the displacement drops to
/// the near-zero threshold on `s` (after a golden-section refinement of the
/// offending neighborhood), and with [`Error::CertificationFailed`] when
/// the adaptive lift cannot certify every direction step below π/2.
pub fn index(f: &PlaneMap, s: &OrientedClosedCurve) -> Result<i32> {
    let g = |t: f64| {
        let x = s.point_at(t);
        f.eval_pt(x) - x
    };
    let initial = initial_samples(f, s, &g);
    match lift_path(&g, initial) {
        Ok(turns) => turns_to_integer(turns),
        Err(LiftFailure::NearZero { t, min }) => Err(Error::FixedPointOnCurve {
            at: s.point_at(t),
            min,
            threshold: NEAR_ZERO,
        }),
        Err(LiftFailure::Depth { depth, worst }) => {
            Err(Error::CertificationFailed { depth: depth as u32, worst })
        }
    }
}

/// Fractional index of `f` along the subarc `arc`, in turns: the net
/// direction change of the displacement `f(x) - x` along the arc divided
/// by 2π. Fractional indices of a partition of `s` sum to the index.
pub fn fractional_index(f: &PlaneMap, arc: &CurveArc<'_>) -> Result<f64> {
    let g = |u: f64| {
        let x = arc.point_at(u);
        f.eval_pt(x) - x
    };
    let initial = ((arc.span * 16_384.0).ceil() as usize).clamp(512, 16_384);
    lift_path(&g, initial).map_err(|e| match e {
        LiftFailure::NearZero { t, min } => Error::FixedPointOnCurve {
            at: arc.point_at(t),
            min,
            threshold: NEAR_ZERO,
        },
        LiftFailure::Depth { depth, worst } => {
            Error::CertificationFailed { depth: depth as u32, worst }
        }
    })
}

/// Exact winding number of a closed polyline about `w` by signed ray
/// crossings. This is deliberately independent of the certified lift so the
/// two can check each other.
///
/// Errors with [`Error::OnPath`] when `w` lies on the polyline.
pub fn winding_number(poly: &[Point], w: Point) -> Result<i32> {
    if poly.len() < 3 {
        return Err(Error::TooFewVertices(poly.len()));
    }
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        if crate::curve::point_segment_dist(w, a, b) <= 1e-9 {
            return Err(Error::OnPath(w));
        }
    }
    let mut wn = 0i32;
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        if a.y <= w.y {
            if b.y > w.y && orient(a, b, w) > 0 {
                wn += 1;
            }
        } else if b.y <= w.y && orient(a, b, w) < 0 {
            wn -= 1;
        }
    }
    Ok(wn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_circle(n: usize) -> OrientedClosedCurve {
        OrientedClosedCurve::circle(Point::new(0.0, 0.0), 1.0, n).unwrap()
    }

    /// Brute-force principal-angle integration, no certification: the
    /// independent oracle for the adaptive lift.
    fn brute_force_turns(g: &dyn Fn(f64) -> Point, n: usize) -> f64 {
        let mut total = 0.0;
        let mut prev = g(0.0);
        for k in 1..=n {
            let v = g(k as f64 / n as f64);
            total += angle_step(prev, v);
            prev = v;
        }
        total / (2.0 * PI)
    }

    #[test]
    fn translation_has_index_zero() {
        let f = PlaneMap::parse("z+1").unwrap();
        assert_eq!(index(&f, &unit_circle(64)).unwrap(), 0);
    }

    #[test]
    fn constant_with_interior_value_has_index_one() {
        let f = PlaneMap::constant(Complex64::new(0.2, -0.1));
        assert_eq!(index(&f, &unit_circle(64)).unwrap(), 1);
    }

    #[test]
    fn squaring_on_radius_two_has_index_two() {
        let f = PlaneMap::parse("z^2").unwrap();
        let s = OrientedClosedCurve::circle(Point::new(0.0, 0.0), 2.0, 128).unwrap();
        assert_eq!(index(&f, &s).unwrap(), 2);
        // Oracle: raw angle integration at 10^5 samples.
        let g = |t: f64| {
            let x = s.point_at(t);
            f.eval_pt(x) - x
        };
        let brute = brute_force_turns(&g, 100_000);
        assert!((brute - 2.0).abs() < 1e-6, "brute-force oracle gave {brute}");
    }

    #[test]
    fn doubling_map_has_index_one() {
        let f = PlaneMap::parse("2z").unwrap();
        assert_eq!(index(&f, &unit_circle(64)).unwrap(), 1);
    }

    #[test]
    fn conjugation_hits_fixed_points_on_curve() {
        let f = PlaneMap::conj();
        let r = index(&f, &unit_circle(64));
        assert!(matches!(r, Err(Error::FixedPointOnCurve { .. })), "got {r:?}");
    }

    #[test]
    fn near_zero_reports_location() {
        // The circle of radius 1 centered at 1 passes through the origin
        // (an even vertex count puts a vertex there exactly), where the
        // displacement z^2 - z vanishes.
        let f = PlaneMap::parse("z^2").unwrap();
        let s = OrientedClosedCurve::circle(Point::new(1.0, 0.0), 1.0, 96).unwrap();
        match index(&f, &s) {
            Err(Error::FixedPointOnCurve { at, min, threshold }) => {
                assert!(at.norm() < 1e-3, "reported fixed point {at:?} should be near 0");
                assert!(min <= threshold);
            }
            other => panic!("expected FixedPointOnCurve, got {other:?}"),
        }
    }

    #[test]
    fn uncertifiable_loop_fails_at_depth() {
        // Direction flips by ~π at t = 0.5 regardless of scale.
        let g = |t: f64| if t < 0.5 { Point::new(1.0, 0.0) } else { Point::new(-1.0, 1e-3) };
        match lift_path(&g, 64) {
            Err(LiftFailure::Depth { depth, worst }) => {
                assert_eq!(depth, MAX_DEPTH);
                assert!(worst >= FRAC_PI_2);
            }
            other => panic!("expected depth failure, got {other:?}"),
        }
    }

    #[test]
    fn fractional_indices_are_additive() {
        let f = PlaneMap::parse("z^2").unwrap();
        let s = OrientedClosedCurve::circle(Point::new(0.0, 0.0), 2.0, 128).unwrap();
        let cuts = [0.1, 0.37, 0.62, 0.85];
        let mut total = 0.0;
        for k in 0..cuts.len() {
            let arc = s.arc(cuts[k], cuts[(k + 1) % cuts.len()]);
            total += fractional_index(&f, &arc).unwrap();
        }
        assert!((total - 2.0).abs() < 1e-9, "arc sum {total}");
        // Splitting one arc leaves its contribution unchanged.
        let whole = fractional_index(&f, &s.arc(0.1, 0.37)).unwrap();
        let left = fractional_index(&f, &s.arc(0.1, 0.2)).unwrap();
        let right = fractional_index(&f, &s.arc(0.2, 0.37)).unwrap();
        assert!((whole - left - right).abs() < 1e-9);
    }

    #[test]
    fn full_loop_fraction_equals_index() {
        let f = PlaneMap::parse("z^2").unwrap();
        let s = OrientedClosedCurve::circle(Point::new(0.0, 0.0), 2.0, 128).unwrap();
        let frac = fractional_index(&f, &s.full_loop(0.3)).unwrap();
        assert!((frac - 2.0).abs() < 1e-9);
    }

    #[test]
    fn polyline_winding_matches_known_values() {
        let square = vec![
            Point::new(1.0, 1.0),
            Point::new(-1.0, 1.0),
            Point::new(-1.0, -1.0),
            Point::new(1.0, -1.0),
        ];
        // Counterclockwise square: winding +1 inside, 0 outside.
        assert_eq!(winding_number(&square, Point::new(0.0, 0.2)).unwrap(), 1);
        assert_eq!(winding_number(&square, Point::new(3.0, 0.0)).unwrap(), 0);
        let cw: Vec<Point> = square.iter().rev().copied().collect();
        assert_eq!(winding_number(&cw, Point::new(0.0, 0.2)).unwrap(), -1);
        assert!(matches!(
            winding_number(&cw, Point::new(1.0, 0.0)),
            Err(Error::OnPath(_))
        ));
        // Doubled circle winds twice.
        let mut doubled = Vec::new();
        for _ in 0..2 {
            for k in 0..64 {
                let a = 2.0 * PI * k as f64 / 64.0;
                doubled.push(Point::new(a.cos(), a.sin()));
            }
        }
        assert_eq!(winding_number(&doubled, Point::new(0.1, 0.0)).unwrap(), 2);
    }

    #[test]
    fn lift_agrees_with_polyline_oracle_on_random_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let deg = rng.gen_range(1..=4);
            let coeffs: Vec<Complex64> = (0..=deg)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let f = PlaneMap::poly(coeffs);
            let radius: f64 = rng.gen_range(1.5..3.0);
            let s = OrientedClosedCurve::circle(Point::new(0.0, 0.0), radius, 200).unwrap();
            let g = |t: f64| {
                let x = s.point_at(t);
                f.eval_pt(x) - x
            };
            let by_lift = match index(&f, &s) {
                Ok(v) => v,
                Err(Error::FixedPointOnCurve { .. }) => continue,
                Err(e) => panic!("trial {trial}: {e}"),
            };
            let poly: Vec<Point> = (0..4096).map(|k| g(k as f64 / 4096.0)).collect();
            let by_crossings = winding_number(&poly, Point::new(0.0, 0.0)).unwrap();
            assert_eq!(by_lift, by_crossings, "trial {trial}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        /// Affine maps a·z + b with |a| != 1 scaling: index along any circle
        /// not through the fixed point is 1 when the fixed point is inside,
        /// 0 when outside.
        #[test]
        fn affine_index_matches_fixed_point_side(
            are in -1.5f64..1.5, aim in -1.5f64..1.5,
            bre in -1.0f64..1.0, bim in -1.0f64..1.0,
            r in 0.5f64..2.0,
        ) {
            let a = Complex64::new(are, aim);
            let b = Complex64::new(bre, bim);
            let one = Complex64::new(1.0, 0.0);
            prop_assume!((a - one).norm() > 0.05);
            let fix = b / (one - a);
            prop_assume!((fix.norm() - r).abs() > 0.05);
            let f = PlaneMap::affine(a, b);
            let s = OrientedClosedCurve::circle(Point::new(0.0, 0.0), r, 96).unwrap();
            let want = if fix.norm() < r { 1 } else { 0 };
            prop_assert_eq!(index(&f, &s).unwrap(), want);
        }
    }
}
