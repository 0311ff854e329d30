//! Error type shared by every module of the crate.
//!
//! Geometric routines fail in structured ways (degenerate input, a fixed
//! point sitting on the curve we need to integrate over, a junction that
//! cannot escape to the window boundary, ...). Each failure mode gets its
//! own variant so callers can distinguish "the hypotheses of the theorem
//! are violated" from "the numerics could not certify the result".

use crate::geom::Point;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An operation that needs at least one input point got none.
    #[error("empty input: at least one point is required")]
    EmptyInput,

    /// Inversion was requested with the point equal to the pole.
    #[error("inversion pole coincides with the input point {0:?}")]
    PoleInput(Point),

    /// A chord was requested between two coincident endpoints.
    #[error("degenerate chord: endpoints coincide at {0:?}")]
    DegenerateChord(Point),

    /// A point that must lie on a ball boundary does not.
    #[error("point {point:?} is {dist:.3e} away from the ball boundary (tolerance {tol:.1e})")]
    NotOnBoundary { point: Point, dist: f64, tol: f64 },

    /// Membership test for a point lying on the curve itself.
    #[error("point {0:?} lies on the curve within tolerance; membership is undefined")]
    OnCurve(Point),

    /// A closed curve needs at least three distinct vertices.
    #[error("a simple closed curve needs at least 3 distinct vertices, got {0}")]
    TooFewVertices(usize),

    /// The polyline intersects itself.
    #[error("polyline is not simple: segments {0} and {1} intersect")]
    NotSimple(usize, usize),

    /// Stored curves must be positively (counterclockwise) oriented.
    #[error("vertex loop is clockwise (signed area {0:.6}); reverse the vertex order")]
    NotCounterclockwise(f64),

    /// Raster resolution must be a positive cell count.
    #[error("bad resolution: {0} cells per unit (must be positive)")]
    BadResolution(i64),

    /// A curve supposed to bump a compactum never touches it.
    #[error("curve does not contact the compactum at raster scale")]
    NoContact,

    /// A map has a (near-)fixed point where the construction needs none.
    #[error("|f(z)-z| drops to {min:.3e} near {at:?}; construction needs a fixed-point-free map")]
    FixedPointNearX { at: Point, min: f64 },

    /// Offset/bumping construction cannot satisfy the separation condition.
    #[error("mesh {0} too coarse: arc separation f(A)∩A=∅ unachievable at this scale")]
    MeshTooCoarse(f64),

    /// The displacement f(z)-z vanishes on the integration curve.
    #[error("fixed point on curve: |f(z)-z| = {min:.3e} at {at:?} (threshold {threshold:.1e})")]
    FixedPointOnCurve { at: Point, min: f64, threshold: f64 },

    /// Adaptive refinement exhausted its depth without certifying the lift.
    #[error("argument lift could not be certified at depth {depth} (worst step {worst:.3} rad)")]
    CertificationFailed { depth: u32, worst: f64 },

    /// Winding number about a point lying on the path.
    #[error("query point {0:?} lies on the path")]
    OnPath(Point),

    /// A junction vertex is not accessible from the unbounded component.
    #[error("no escape: {0:?} is not accessible from the unbounded complement at this resolution")]
    NoEscape(Point),

    /// The image of an arc endpoint lands on the junction.
    #[error("image of an arc endpoint lies on the junction (ray {ray}) at {at:?}")]
    EndpointOnJunction { ray: char, at: Point },

    /// Crossings stayed tangential after the allowed junction perturbations.
    #[error("tangential junction crossing unresolved after {retries} perturbation retries")]
    UnresolvedTangency { retries: u32 },

    /// A user-supplied partition violates the variation hypotheses.
    #[error("invalid partition: arc {arc}: {reason}")]
    InvalidPartition { arc: usize, reason: String },

    /// No partition satisfying the variation hypotheses exists.
    #[error("no valid partition: {0}")]
    NoValidPartition(String),

    /// The complement of the compactum is not connected at raster scale.
    #[error("complement of the compactum is disconnected at this resolution")]
    DisconnectedComplement,

    /// No enumerated maximal ball realizes the requested contact pair.
    #[error("no chord with endpoints {0:?} and {1:?}")]
    NoChord(Point, Point),

    /// A chord's image overlaps its closure, so its variation is undefined.
    #[error("chord image overlaps the chord (min distance {min:.3e}); variation undefined")]
    ChordImageOverlap { min: f64 },

    /// Evaluation outside the declared window.
    #[error("point {0:?} is outside the declared window")]
    OutsideWindow(Point),

    /// degree(f_p) needs |f(x)-f(p)| bounded away from zero on the curve.
    #[error("f(p) = {value:?} is hit by f on the curve (min distance {min:.3e})")]
    ValueHit { value: Point, min: f64 },

    /// A theorem-level check was invoked outside its hypotheses.
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    /// A subdivision cut keeps landing on near-fixed points.
    #[error("fixed point on subdivision boundary near {0:?} after jitter retries")]
    BoundaryFixedPoint(Point),

    /// Map expression text could not be parsed or lowered.
    #[error("map expression error at byte {at}: {reason}")]
    MapParse { at: usize, reason: String },
}
