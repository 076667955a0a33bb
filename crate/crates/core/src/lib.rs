//! Exact kernels and numerical checks for spectral theory on hyperbolic space.
//!
//! The crate is organised by subsystem:
//!
//! * [`hypgeo`]: half-space and warped metric models, closed-form distances
//!   and boundary-defining-function proxies on the double space.
//! * [`flow`]: the 0-geodesic Hamiltonian flow, nontrapping certificates and
//!   distance computation by shooting.
//! * [`kernels`]: symbolic functional calculus on `H^{n+1}` for even `n`,
//!   resolvent and spectral-measure kernels, and the `chi_+^a` family.
//! * [`transform`]: the `H^3` spherical transform, radial convolution,
//!   spectral multiplier kernels and Fourier tail integrals.
//! * [`verify`]: bound checks, slope fits, Kunze–Stein integrals, restriction
//!   norms and the numbered acceptance checks.
//! * [`cli`]: the `hypspec` command line front end and report emitters.

pub mod cli;
pub mod error;
pub mod flow;
pub mod grid;
pub mod hypgeo;
pub mod kernels;
pub mod quad;
pub mod special;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
