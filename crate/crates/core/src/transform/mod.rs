//! Radial harmonic analysis on `H³` and multiplier kernels `F(αP)`.

mod fgtail;
mod multiplier;
mod spherical;

pub use fgtail::{fg_tail, fg_tails, FgTailConfig};
pub use multiplier::{
    far_diagonal_norms, multiplier_kernel, multiplier_kernel_direct, required_samples, smooth_bump, Multiplier,
    MultiplierSpec, DEFAULT_SAMPLES,
};

pub use spherical::{
    inverse_spherical_transform_h3, radial_convolve, radial_convolve_direct, radial_convolve_with,
    sphere_area, spherical_function_h3, spherical_transform_h3, spherical_transform_h3_with, RadialProfile,
    SpectralProfile, TransformGrid,
};

/// σ-grid used with an `N`-point radial grid in the round-trip check:
/// `Σ = 4√N`, `Δσ = 16/N`.
pub fn round_trip_grid(n: usize) -> TransformGrid {
    let sigma_max = 4.0 * (n as f64).sqrt();
    let count = (sigma_max * n as f64 / 16.0).ceil() as usize;
    TransformGrid { sigma_max, count, tail_tol: Some(1e-6) }
}
