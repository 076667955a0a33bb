//! Quantitative checks: envelope sups under grid refinement, slope fits,
//! Kunze–Stein integrals, restriction norms and multiplier uniformity.

mod acceptance;
mod bounds;
mod norms;
mod slope;

pub use bounds::{
    bound_check, check_pointwise_bounds, default_grids, deriv_bound_check, envelope, pointwise_report,
    BoundCheckReport, Regime, Zone, REFINEMENT_LEVELS,
};
pub use slope::{coverage_self_test, fit_loglog, fit_slope, SlopeFit, MIN_FIT_POINTS};
pub use norms::{
    dyadic_alphas, kunze_stein_bound, kunze_stein_empirical, l1_linf_norm, multiplier_uniformity, restriction_scan,
    KunzeStein, RestrictionReport, UniformityReport, MAX_MIN_LIMIT, TREND_LIMIT,
};
pub use acceptance::{
    defect_sup, gated_multipliers, round_trip_error, run_criterion, title, CriterionResult, CRITERIA,
};
