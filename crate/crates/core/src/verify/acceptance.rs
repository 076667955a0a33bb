use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::bounds::{check_pointwise_bounds, deriv_bound_check, Regime};
use super::norms::{dyadic_alphas, kunze_stein_bound, multiplier_uniformity, restriction_scan};
use super::slope::fit_loglog;
use crate::error::{Error, Result};
use crate::flow::{
    certify_nontrapping, integrate, lambda_witness, shoot_distance, y_travel_check, y_travel_integral,
    NontrapOptions, ZeroPhasePoint,
};
use crate::grid::GridSpec;
use crate::hypgeo::{distance_defect, hyperbolic_distance, Bump, HalfSpaceMetric, Point, PointPair};
use crate::kernels::{
    chi_plus_pair, gamma_multiplier_bound, heat_kernel_h3, heat_recursion, heat_spectral_integral, spectral_measure,
    stone_formula, Convolved, GaussianTest, TestFunction,
};
use crate::transform::{
    fg_tails, inverse_spherical_transform_h3, multiplier_kernel, multiplier_kernel_direct, radial_convolve,
    radial_convolve_direct, round_trip_grid, spherical_transform_h3_with, FgTailConfig, Multiplier, MultiplierSpec,
    RadialProfile, DEFAULT_SAMPLES,
};

pub const CRITERIA: usize = 15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: String,
    pub passed: bool,
    pub summary: String,
    pub details: Value,
    pub budget_secs: f64,
    /// Wall time; left out of reports so that they stay byte-stable.
    #[serde(skip)]
    pub runtime_secs: f64,
}

impl CriterionResult {
    pub fn within_budget(&self) -> bool {
        self.runtime_secs < self.budget_secs
    }

    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} {:<28} {} [{:.1}s of {:.0}s]",
            self.id,
            if self.passed && self.within_budget() { "PASS" } else { "FAIL" },
            self.title,
            self.summary,
            self.runtime_secs,
            self.budget_secs
        )
    }
}

struct Outcome {
    passed: bool,
    summary: String,
    details: Value,
}

pub fn title(id: usize) -> &'static str {
    match id {
        1 => "stone/recursion equivalence",
        2 => "heat-kernel anchor",
        3 => "geodesic suite",
        4 => "distance oracle",
        5 => "distance defect bounded",
        6 => "y-travel",
        7 => "pointwise bounds",
        8 => "restriction exponent p=1",
        9 => "sigma-derivative bound",
        10 => "chi_+ suite",
        11 => "H3 spherical transform",
        12 => "Kunze-Stein",
        13 => "multiplier uniformity",
        14 => "FG tail slopes",
        15 => "nontrapping certificate",
        _ => "unknown",
    }
}

fn budget(id: usize) -> f64 {
    match id {
        1 | 6 | 8 | 10 => 10.0,
        2 | 5 | 9 => 30.0,
        3 | 7 | 11 | 14 => 60.0,
        4 | 13 | 15 => 120.0,
        12 => 5.0,
        _ => 0.0,
    }
}

/// Run one numbered check.
pub fn run_criterion(id: usize) -> Result<CriterionResult> {
    let start = Instant::now();
    let out = match id {
        1 => stone_equivalence()?,
        2 => heat_anchor()?,
        3 => geodesic_suite()?,
        4 => distance_oracle()?,
        5 => defect_witness()?,
        6 => y_travel()?,
        7 => pointwise_bounds()?,
        8 => restriction()?,
        9 => derivative_bound()?,
        10 => chi_suite()?,
        11 => spherical_transform()?,
        12 => kunze_stein()?,
        13 => multiplier()?,
        14 => fg_tail()?,
        15 => nontrapping()?,
        other => return Err(Error::Config(format!("criterion must be 1..={CRITERIA}, got {other}"))),
    };
    Ok(CriterionResult {
        id,
        title: title(id).to_string(),
        passed: out.passed,
        summary: out.summary,
        details: out.details,
        budget_secs: budget(id),
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn stone_equivalence() -> Result<Outcome> {
    let sigmas = GridSpec::log(0.1, 10.0, 50).points();
    let rs = GridSpec::log(1e-3, 30.0, 200).points();
    let mut worst = 0.0f64;
    for &s in &sigmas {
        for &r in &rs {
            worst = worst.max(rel(stone_formula(2, s, r)?, spectral_measure(2, s, r)?));
        }
    }
    Ok(Outcome {
        passed: worst <= 1e-12,
        summary: format!("max relative error {worst:.2e} (limit 1e-12)"),
        details: json!({ "n": 2, "sigma_points": 50, "r_points": 200, "max_rel_error": worst }),
    })
}

fn heat_anchor() -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for n in [2, 4] {
        for t in [0.1, 1.0] {
            for r in [0.5, 1.0, 5.0] {
                let a = heat_spectral_integral(n, t, r)?;
                let b = heat_recursion(n, t, r)?;
                let e = rel(a, b);
                worst = worst.max(e);
                if n == 2 {
                    worst = worst.max(rel(a, heat_kernel_h3(t, r)));
                }
                rows.push(json!({ "n": n, "t": t, "r": r, "spectral": a, "recursion": b, "rel_error": e }));
            }
        }
    }
    Ok(Outcome {
        passed: worst <= 1e-8,
        summary: format!("max relative error {worst:.2e} (limit 1e-8)"),
        details: json!({ "rows": rows, "max_rel_error": worst }),
    })
}

fn perturbed_metric() -> Result<HalfSpaceMetric> {
    HalfSpaceMetric::perturbed(2, Bump { amplitude: 0.3, center: vec![0.6, 0.1, -0.1], radius: 0.4 })
}

fn geodesic_suite() -> Result<Outcome> {
    let starts = [
        ZeroPhasePoint::new(0.9, vec![-0.3, 0.0], 0.2, vec![0.8, 0.3]),
        ZeroPhasePoint::new(0.5, vec![0.2, 0.1], -0.4, vec![0.1, -0.9]),
        ZeroPhasePoint::new(0.7, vec![0.0, -0.2], 0.6, vec![-0.5, 0.2]),
    ];
    let metrics = [HalfSpaceMetric::hyperbolic(2), perturbed_metric()?];
    let (mut drift, mut reversal) = (0.0f64, 0.0f64);
    for m in &metrics {
        for s in &starts {
            drift = drift.max(integrate(m, s, (0.0, 40.0), 1e-12)?.max_constraint_drift);
            let s = s.normalized(m)?;
            let fwd = integrate(m, &s, (0.0, 8.0), 1e-12)?;
            let back = integrate(m, fwd.end(), (8.0, 0.0), 1e-12)?;
            let e = back.end();
            let err = [(e.x - s.x).abs(), (e.lam - s.lam).abs()]
                .into_iter()
                .chain(e.y.iter().zip(&s.y).map(|(a, b)| (a - b).abs()))
                .chain(e.mu.iter().zip(&s.mu).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            reversal = reversal.max(err);
        }
    }
    let exact = HalfSpaceMetric::hyperbolic(2);
    let witness = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(i);
            let x = rng.gen_range(0.05..=1.0);
            let y = vec![rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)];
            let th: f64 = rng.gen_range(0.0..2.0 * PI);
            let start = ZeroPhasePoint::new(x, y, 0.0, vec![th.cos(), th.sin()]);
            lambda_witness(&exact, &start, 5.0, 1e-11)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let passed = drift <= 1e-9 && reversal <= 1e-8 && witness <= 1e-6;
    Ok(Outcome {
        passed,
        summary: format!("drift {drift:.1e}, reversal {reversal:.1e}, lambda excess {witness:.1e}"),
        details: json!({
            "max_constraint_drift": drift,
            "time_reversal_error": reversal,
            "lambda_witness_max": witness,
            "lambda_samples": 100,
        }),
    })
}

fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> PointPair {
    let mut pt = || Point::new(rng.gen_range(0.2..=1.5), (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect());
    PointPair::new(pt(), pt())
}

fn distance_oracle() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut per_dim = Vec::new();
    for n in [2, 4] {
        let metric = HalfSpaceMetric::hyperbolic(n);
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let pairs: Vec<PointPair> = (0..100).map(|_| random_pair(&mut rng, n)).collect();
        let errs = pairs
            .par_iter()
            .map(|p| Ok(rel(shoot_distance(&metric, p, 1e-9)?, hyperbolic_distance(p)?)))
            .collect::<Result<Vec<f64>>>()?;
        let w = errs.into_iter().fold(0.0, f64::max);
        per_dim.push(json!({ "n": n, "pairs": 100, "max_rel_error": w }));
        worst = worst.max(w);
    }
    Ok(Outcome {
        passed: worst <= 1e-6,
        summary: format!("max relative error {worst:.2e} (limit 1e-6)"),
        details: json!({ "dimensions": per_dim, "max_rel_error": worst }),
    })
}

/// `sup |b|` over `x, x' ∈ [x_min, 1]` (10 log points each) and
/// `|y - y'| ∈ [0, 10]` (100 points): 10⁴ pairs.
pub fn defect_sup(x_min: f64) -> Result<f64> {
    let xs = GridSpec::log(x_min, 1.0, 10).points();
    let ds = GridSpec::lin(0.0, 10.0, 100).points();
    let mut sup = 0.0f64;
    for &x in &xs {
        for &xp in &xs {
            for &d in &ds {
                let pair = PointPair::new(Point::new(x, vec![0.0, 0.0]), Point::new(xp, vec![d, 0.0]));
                sup = sup.max(distance_defect(&pair)?.abs());
            }
        }
    }
    Ok(sup)
}

fn defect_witness() -> Result<Outcome> {
    let a = defect_sup(1e-4)?;
    let b = defect_sup(5e-5)?;
    let change = rel(b, a);
    let diag = distance_defect(&PointPair::new(Point::new(0.37, vec![0.2, -1.0]), Point::new(0.37, vec![0.2, -1.0])))?;
    let diag_err = (diag + 2f64.ln()).abs();
    Ok(Outcome {
        passed: a.is_finite() && change < 0.05 && diag_err <= 1e-12,
        summary: format!("sup|b| {a:.6} -> {b:.6} (change {change:.1e}), diagonal error {diag_err:.1e}"),
        details: json!({ "sup_x_min_1e-4": a, "sup_x_min_5e-5": b, "relative_change": change, "diagonal": diag }),
    })
}

fn y_travel() -> Result<Outcome> {
    let r = y_travel_check(&HalfSpaceMetric::hyperbolic(2), 0.05, 0.01)?;
    let integral = y_travel_integral(1.0);
    let passed = (r.ratio - 1.0).abs() <= 1e-3 && (integral - 1.0).abs() <= 1e-10;
    Ok(Outcome {
        passed,
        summary: format!("ratio {:.6}, sech^2 integral error {:.1e}", r.ratio, (integral - 1.0).abs()),
        details: json!({ "ratio": r.ratio, "max_displacement": r.max_displacement, "integral": integral }),
    })
}

fn pointwise_bounds() -> Result<Outcome> {
    let mut reports = Vec::new();
    for n in [2, 4] {
        for regime in [Regime::Low, Regime::High] {
            reports.extend(check_pointwise_bounds(n, regime, &[0, 1, 2])?);
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    let worst_delta = reports.iter().filter_map(|r| r.refinement_deltas.last()).fold(0.0f64, |m, d| m.max(*d));
    Ok(Outcome {
        passed: failed == 0,
        summary: format!("{} reports, {failed} failed, worst final delta {worst_delta:.3}", reports.len()),
        details: serde_json::to_value(&reports)?,
    })
}

fn restriction() -> Result<Outcome> {
    let grid = GridSpec::log(10.0, 1000.0, 24);
    let reps = [restriction_scan(2, &grid, 0.05)?, restriction_scan(4, &grid, 0.05)?];
    Ok(Outcome {
        passed: reps.iter().all(|r| r.pass),
        summary: format!("slopes {:.4} (n=2), {:.4} (n=4)", reps[0].slope, reps[1].slope),
        details: serde_json::to_value(&reps)?,
    })
}

fn derivative_bound() -> Result<Outcome> {
    let reports: Vec<_> = (1..=3).map(|j| deriv_bound_check(j, GridSpec::lin(1.0, 100.0, 397))).collect();
    let sups: Vec<String> = reports.iter().map(|r| format!("{:.3}", r.sup_ratio)).collect();
    Ok(Outcome {
        passed: reports.iter().all(|r| r.passed),
        summary: format!("sup ratios j=1..3: {}", sups.join(", ")),
        details: serde_json::to_value(&reports)?,
    })
}

fn chi_suite() -> Result<Outcome> {
    let c = |re: f64| Complex64::new(re, 0.0);
    let f = GaussianTest::default();
    let mut ident = 0.0f64;
    for x in [0.0, 0.7, -1.2] {
        // χ₊^{-1} = δ, χ₊^{-2} = δ', χ₊^0 = Heaviside
        ident = ident.max((chi_plus_pair(c(-1.0), &f, x)? - f.deriv(0, x)).norm());
        ident = ident.max((chi_plus_pair(c(-2.0), &f, x)? - f.deriv(1, x)).norm());
        let (cdf, _) = crate::quad::adaptive(-30.0, x, 1e-15, 1e-14, 2000, |t: f64| (-t * t).exp());
        ident = ident.max((chi_plus_pair(c(0.0), &f, x)? - c(cdf)).norm());
    }
    let mut conv = 0.0f64;
    for (mu, nu) in [(0.0, 0.0), (0.5, 0.25), (-0.5, 1.0)] {
        let g = Convolved { nu: c(nu), inner: &f };
        let lhs = chi_plus_pair(c(mu), &g, 1.0)?;
        let rhs = chi_plus_pair(c(mu + nu + 1.0), &f, 1.0)?;
        conv = conv.max((lhs - rhs).norm());
    }
    let gamma_ok = (0..=400).all(|i| {
        let (l, r) = gamma_multiplier_bound(-20.0 + 0.1 * i as f64);
        l <= r
    });
    Ok(Outcome {
        passed: ident <= 1e-8 && conv <= 1e-6 && gamma_ok,
        summary: format!("identities {ident:.1e}, convolution {conv:.1e}, gamma bound holds: {gamma_ok}"),
        details: json!({ "identity_error": ident, "convolution_error": conv, "gamma_bound_holds": gamma_ok }),
    })
}

/// Relative `L²(H³)` error of transform followed by inverse for
/// `κ = e^{-2r}` on an `n`-point log grid.
pub fn round_trip_error(n: usize) -> Result<f64> {
    let k = RadialProfile::from_fn(2, GridSpec::log(1e-3, 40.0, n).points(), |r| (-2.0 * r).exp())?;
    let hat = spherical_transform_h3_with(&k, &round_trip_grid(n))?;
    inverse_spherical_transform_h3(&hat, &k.grid)?.relative_l2_error(&k)
}

fn spherical_transform() -> Result<Outcome> {
    let e1 = round_trip_error(2048)?;
    let e2 = round_trip_error(4096)?;
    let g1 = |r: f64| (-r * r).exp();
    let g2 = |r: f64| (-2.0 * r * r).exp();
    let coarse = GridSpec::lin(0.05, 6.0, 128).points();
    let mut grid = GridSpec::log(1e-3, 12.0, 4096).points();
    grid.extend_from_slice(&coarse);
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let a = RadialProfile::from_fn(2, grid.clone(), g1)?;
    let b = RadialProfile::from_fn(2, grid.clone(), g2)?;
    let c = radial_convolve(&a, &b)?;
    let scale = c.sup_norm();
    let conv = coarse
        .par_iter()
        .map(|&r| {
            let i = grid.partition_point(|g| *g < r - 1e-12);
            (c.values[i] - radial_convolve_direct(g1, g2, r, 8.0, 64)).abs() / scale
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max);
    let passed = e1 <= 1e-4 && e2 <= 0.5 * e1 && conv <= 1e-5;
    Ok(Outcome {
        passed,
        summary: format!("round trip {e1:.2e} -> {e2:.2e} (ratio {:.2}), convolution {conv:.1e}", e2 / e1),
        details: json!({
            "round_trip_2048": e1,
            "round_trip_4096": e2,
            "convolution_points": 128,
            "convolution_max_rel_error": conv,
        }),
    })
}

fn kunze_stein() -> Result<Outcome> {
    let grid = GridSpec::log(1e-3, 80.0, 2000).points();
    let mut rows = Vec::new();
    let mut finite = true;
    for n in [2usize, 4] {
        let k = RadialProfile::from_fn(n, grid.clone(), |r| (1.0 + r) * (-(n as f64) * r / 2.0).exp())?;
        for q in [2.5, 3.0, 4.0] {
            let ks = kunze_stein_bound(&k, q)?;
            finite &= ks.bound.is_some_and(f64::is_finite);
            rows.push(json!({ "n": n, "q": q, "bound": ks.bound, "tail_rate": ks.tail_rate }));
        }
    }
    let under = RadialProfile::from_fn(2, grid, |r| (-r / 2.0).exp())?;
    let div = kunze_stein_bound(&under, 2.1)?;
    Ok(Outcome {
        passed: finite && div.divergent,
        summary: format!("6 bounds finite: {finite}, e^(-r/2) at q=2.1 flagged divergent: {}", div.divergent),
        details: json!({ "witness": rows, "under_decaying": { "q": 2.1, "divergent": div.divergent, "tail_rate": div.tail_rate } }),
    })
}

/// Multipliers gated by the uniformity check.
pub fn gated_multipliers() -> Vec<Multiplier> {
    [1.6, 1.65, 1.7].into_iter().map(|s| Multiplier::lacunary(s, 14, 0)).collect()
}

fn multiplier() -> Result<Outcome> {
    let alphas = dyadic_alphas(10);
    let mut gated = Vec::new();
    for f in gated_multipliers() {
        gated.push(multiplier_uniformity(2, &f, &alphas, DEFAULT_SAMPLES)?);
    }
    let mut reported = Vec::new();
    for f in [Multiplier::lacunary(1.55, 14, 0), Multiplier::lacunary(1.0, 14, 0), Multiplier::Poly { p: 3 }] {
        reported.push(multiplier_uniformity(2, &f, &alphas, DEFAULT_SAMPLES)?);
    }
    let rs = GridSpec::log(0.05, 8.0, 12).points();
    let mut route_err = 0.0f64;
    for f in gated_multipliers() {
        for alpha in [1.0, 0.25] {
            let spec = MultiplierSpec::new(f.clone(), alpha)?;
            let b = multiplier_kernel(2, &spec, &rs)?;
            let a = rs.par_iter().map(|&r| multiplier_kernel_direct(2, &f, alpha, r)).collect::<Result<Vec<f64>>>()?;
            let scale = b.sup_norm();
            for (x, y) in a.iter().zip(&b.values) {
                route_err = route_err.max((x - y).abs() / scale);
            }
        }
    }
    let bounded = gated.iter().all(|r| r.bounded);
    let worst_ratio = gated.iter().map(|r| r.max_min_ratio).fold(0.0, f64::max);
    let worst_slope = gated.iter().map(|r| r.trend_slope).fold(f64::NEG_INFINITY, f64::max);
    Ok(Outcome {
        passed: bounded && route_err <= 1e-6,
        summary: format!("max/min {worst_ratio:.2}, trend {worst_slope:+.3}, routes {route_err:.1e}"),
        details: json!({ "gated": gated, "reported": reported, "route_max_rel_error": route_err }),
    })
}

fn fg_tail() -> Result<Outcome> {
    let f = Multiplier::Poly { p: 3 };
    let cfg = FgTailConfig::default();
    let window = GridSpec::log(4.0, 64.0, 16).points();
    let late = GridSpec::log(64.0, 512.0, 16).points();
    let mut rows = Vec::new();
    let mut passed = true;
    let mut parts = Vec::new();
    for m in [0.5, 1.0, 1.5] {
        let target = -(2.0 * m + 1.0);
        let fit = fit_loglog(&window, &fg_tails(&f, m, &window, &cfg)?)?;
        let late_fit = fit_loglog(&late, &fg_tails(&f, m, &late, &cfg)?)?;
        passed &= (fit.slope - target).abs() <= 0.3;
        parts.push(format!("m={m}: {:.2}", fit.slope));
        rows.push(json!({
            "m": m,
            "target": target,
            "slope_4_64": fit.slope,
            "slope_ci": fit.confidence_halfwidth,
            "slope_64_512": late_fit.slope,
        }));
    }
    Ok(Outcome {
        passed,
        summary: format!("slopes on [4,64] {} (targets -2, -3, -4 +/- 0.3)", parts.join(", ")),
        details: json!({ "multiplier": f.to_string(), "rows": rows }),
    })
}

fn nontrapping() -> Result<Outcome> {
    let opts = NontrapOptions { sample_count: 1000, t_max: 100.0, ..Default::default() };
    let exact = certify_nontrapping(&HalfSpaceMetric::hyperbolic(2), &opts)?;
    let bump = HalfSpaceMetric::perturbed(2, Bump { amplitude: 0.05, center: vec![0.5, 0.0, 0.0], radius: 0.3 })?;
    let pert = certify_nontrapping(&bump, &opts)?;
    let summary = |c: &crate::flow::NontrapCertificate| {
        json!({
            "passed": c.passed,
            "trapped_count": c.trapped_count,
            "inconclusive_count": c.inconclusive_count,
            "worst_escape_time": c.worst_escape_time,
            "seed": c.seed,
        })
    };
    Ok(Outcome {
        passed: exact.passed && pert.passed,
        summary: format!(
            "trapped {}+{}, inconclusive {}+{}, worst escape {:.1}",
            exact.trapped_count,
            pert.trapped_count,
            exact.inconclusive_count,
            pert.inconclusive_count,
            exact.worst_escape_time.max(pert.worst_escape_time)
        ),
        details: json!({ "hyperbolic": summary(&exact), "perturbed": summary(&pert) }),
    })
}
