//! Functional calculus of `P = (Δ - n²/4)₊^{1/2}` on `H^{n+1}`, `n = 2k`.
//!
//! A radial kernel is `(1/√(2π))·D^k ĝ(r)` with `D = -(1/2π)(1/sinh r)∂_r`.
//! The recursion is carried out exactly on polynomials in `coth r` and
//! `csch r`, then evaluated in floating point.

mod chi;
mod spectral;
mod symbolic;

pub use chi::{
    chi_plus_eval, chi_plus_pair, gamma_multiplier_bound, ChiPlusFamily, Convolved, GaussianTest, PolyBumpTest,
    TestFunction,
};
pub use spectral::{
    heat_kernel_h3, heat_recursion, heat_spectral_integral, resolvent_kernel, spectral_measure,
    spectral_measure_deriv, stone_formula, Side, MAX_SIGMA_DERIVATIVE,
};
pub(crate) use spectral::{check_n, spectral_measure_at_origin};
pub use symbolic::{apply_d, Phase, SymbolicRadialKernel, UvPoly};
