//! The 0-geodesic flow of `(dx² + g0(x, y; dy))/x²`.
//!
//! Phase-space points carry 0-cotangent coordinates `(λ, μ)`. Integration is
//! done in `(ln x, y, λ, μ)` so that `x` keeps full relative precision all
//! the way to the boundary.

mod geodesic;
mod nontrap;
pub mod ode;
mod shoot;

pub use geodesic::{
    ball_bdf, bicharacteristic_angle, boundary_bicharacteristic, geodesic_rhs, integrate, integrate_with,
    lambda_witness, y_travel_check, y_travel_integral, FlowOptions, Tangent, Trajectory, YTravel, ZeroPhasePoint,
};
pub use nontrap::{certify_nontrapping, EscapeStatus, NontrapCertificate, NontrapOptions, SampleOutcome};
pub use shoot::shoot_distance;
