//! Plane-topology toolkit: fixed-point index, boundary variation, and
//! maximal-ball partitions for compact plane sets.
//!
//! The crate computes three interlocking quantities for a plane map `f`
//! and a compact set:
//!
//! * the **fixed-point index** of `f` along an oriented closed curve — the
//!   certified winding number of the displacement `f(z) − z`
//!   ([`winding`]);
//! * the **variation** of `f` on a partitioned curve — signed junction
//!   crossings of the image of each arc, summed over the partition
//!   ([`variation`]);
//! * the **Kulkarni–Pinkall partition** of the complement of a compactum
//!   into hyperbolic hulls of maximal-ball contact sets, with chords
//!   classified by variation and scanned for outchannels ([`kp`]).
//!
//! The [`checkers`] module ties them together into mechanical theorem
//! checks: `ind = var + 1`, the lollipop identity for crosscut arcs, the
//! index of maps into the hull, and a certified quadtree fixed-point
//! locator built on boundary indices.
//!
//! Geometry primitives (points, balls, circular arcs, inversion) live in
//! [`geom`]; curves, rasters, hulls, and junction-capable regions in
//! [`curve`]; map expressions and orientation/degree diagnostics in
//! [`maps`]. Every computation that can fail does so through the shared
//! structured [`Error`] type — hypothesis violations are distinguished
//! from numerical certification failures throughout.

pub mod checkers;
pub mod curve;
pub mod error;
pub mod geom;
pub mod kp;
pub mod maps;
pub mod variation;
pub mod winding;

pub use checkers::{
    check_hull_index, check_index_variation, check_lollipop, check_period_two,
    locate_all_fixed_points, locate_fixed_point, FixedPointOutcome, IndexVariationReport,
    LollipopReport, LollipopSide,
};
pub use curve::{Compactum, OrientedClosedCurve, Region};
pub use error::{Error, Result};
pub use geom::{Ball, CircularArc, Point, Window};
pub use kp::{maximal_balls, KPElement, KPPartition};
pub use maps::PlaneMap;
pub use variation::{auto_partition, variation_total, VariationReport};
pub use winding::{fractional_index, index, winding_number};
