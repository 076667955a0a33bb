//! Metric models on the half-space chart and closed-form geometry.
//!
//! Points are written `(x, y)` with `x > 0` the boundary defining function
//! and `y ∈ R^n`. The manifold has dimension `n + 1` and the metric is
//! `(dx² + g0(x, y; dy))/x²`.

mod config;
mod distance;
mod metric;
mod warped;

pub use config::{MetricConfig, MetricKind, WarpKind};
pub use distance::{
    bdf_eval, distance_defect, hyperbolic_distance, BdfValues, BoundaryDefiningTriple, Point,
    PointPair,
};
pub use metric::{Bump, G0Sample, HalfSpaceMetric, InverseSample};
pub use warped::{warped_volume_density, Warp, WarpedMetric};
