use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::slope::{fit_loglog, fit_slope, SlopeFit};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::kernels::{check_n, spectral_measure, spectral_measure_at_origin};
use crate::quad::{adaptive, GaussLegendre};
use crate::transform::{far_diagonal_norms, radial_convolve_direct, Multiplier, RadialProfile};

/// `‖dE(σ)‖_{L¹→L^∞} = sup_r |dE(σ)(r)|`, including the `r → 0` limit.
pub fn l1_linf_norm(n: usize, sigma: f64) -> Result<f64> {
    check_n(n)?;
    if !(sigma >= 1.0) {
        return Err(Error::domain(format!("sigma must be at least 1, got {sigma}")));
    }
    let origin = spectral_measure_at_origin(n, sigma)?.abs();
    let grid = GridSpec::log(1e-4, 40.0, 2001).points();
    grid.iter().try_fold(origin, |m, &r| Ok(m.max(spectral_measure(n, sigma, r)?.abs())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictionReport {
    pub n: usize,
    pub sigma_grid: Vec<f64>,
    pub norms: Vec<f64>,
    pub fit: SlopeFit,
    pub slope: f64,
    pub target_exponent: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Log-log slope of the `L¹ → L^∞` norm; the target exponent is `n`.
pub fn restriction_scan(n: usize, sigma: &GridSpec, tolerance: f64) -> Result<RestrictionReport> {
    let sigma_grid = sigma.points();
    let norms = sigma_grid.par_iter().map(|&s| l1_linf_norm(n, s)).collect::<Result<Vec<_>>>()?;
    let fit = fit_loglog(&sigma_grid, &norms)?;
    let target = n as f64;
    Ok(RestrictionReport {
        n,
        slope: fit.slope,
        pass: (fit.slope - target).abs() <= tolerance,
        sigma_grid,
        norms,
        fit,
        target_exponent: target,
        tolerance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KunzeStein {
    pub q: f64,
    /// `∫ (sinh r)^n (1+r) e^{-nr/2} |κ|^{q/2} dr`, grid part plus fitted tail.
    pub integral: f64,
    /// `integral^{2/q}`, with the constant set to 1; `None` when divergent.
    pub bound: Option<f64>,
    pub divergent: bool,
    /// Exponential rate `γ` of the fitted tail `e^{a + γr} r^β`.
    pub tail_rate: f64,
}

/// Kunze–Stein integral of a radial kernel. The tail beyond the grid is
/// extrapolated from a fit of `ln(integrand) = a + γr + β ln r` on the outer
/// half of the grid; `γ ≥ 0` is reported as divergence.
pub fn kunze_stein_bound(kappa: &RadialProfile, q: f64) -> Result<KunzeStein> {
    if !(q > 2.0) || !q.is_finite() {
        return Err(Error::domain(format!("q must exceed 2, got {q}")));
    }
    let n = kappa.n as f64;
    let ln_sinh = |r: f64| r - std::f64::consts::LN_2 + (-(-2.0 * r).exp()).ln_1p();
    let logs: Vec<f64> = kappa
        .grid
        .iter()
        .zip(&kappa.values)
        .map(|(&r, &v)| n * ln_sinh(r) + r.ln_1p() - n * r / 2.0 + 0.5 * q * v.abs().ln())
        .collect();
    let r_max = kappa.r_max();
    let tail: Vec<(f64, f64)> = kappa
        .grid
        .iter()
        .zip(&logs)
        .filter(|(r, l)| **r >= 0.5 * r_max && l.is_finite())
        .map(|(r, l)| (*r, *l))
        .collect();
    let (rate, tail_integral) = if tail.len() < 3 {
        (f64::NEG_INFINITY, 0.0)
    } else {
        let (a, gamma, beta) = fit_exp_power(&tail)?;
        let tail_integral = if gamma < 0.0 {
            let (v, _) = adaptive(r_max, r_max + 60.0 / -gamma, 0.0, 1e-10, 400, |r: f64| {
                (a + gamma * r + beta * r.ln()).exp()
            });
            v
        } else {
            f64::INFINITY
        };
        (gamma, tail_integral)
    };
    let dens: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    let mut integral = 0.5 * kappa.grid[0] * dens[0];
    for i in 1..dens.len() {
        integral += 0.5 * (kappa.grid[i] - kappa.grid[i - 1]) * (dens[i] + dens[i - 1]);
    }
    integral += tail_integral;
    let divergent = !integral.is_finite();
    Ok(KunzeStein {
        q,
        integral,
        bound: (!divergent).then(|| integral.powf(2.0 / q)),
        divergent,
        tail_rate: rate,
    })
}

/// Least squares for `y = a + γ r + β ln r`.
fn fit_exp_power(pts: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    let mut m = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for &(r, y) in pts {
        let phi = [1.0, r, r.ln()];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += phi[i] * phi[j];
            }
            b[i] += phi[i] * y;
        }
    }
    // Cramer's rule on the 3×3 normal equations
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d.abs() < 1e-300 {
        return Err(Error::contract("tail fit is singular"));
    }
    let mut sol = [0.0; 3];
    for (k, s) in sol.iter_mut().enumerate() {
        let mut mk = m;
        for i in 0..3 {
            mk[i][k] = b[i];
        }
        *s = det(&mk) / d;
    }
    Ok((sol[0], sol[1], sol[2]))
}

/// Worst `‖κ∗f‖_q / ‖f‖_{q'}` on `H³` over Gaussians `f = e^{-b r²}`,
/// `b ∈ [1/2, 4]`, computed with the direct convolution integral.
pub fn kunze_stein_empirical(kappa: impl Fn(f64) -> f64 + Sync, q: f64, trials: usize, seed: u64) -> Result<f64> {
    if !(q > 2.0) {
        return Err(Error::domain(format!("q must exceed 2, got {q}")));
    }
    let qp = q / (q - 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bs: Vec<f64> = (0..trials).map(|_| rng.gen_range(0.5..=4.0)).collect();
    let gl = GaussLegendre::new(8);
    let h3_norm = |g: &dyn Fn(f64) -> f64, p: f64, hi: f64, panels: usize| -> f64 {
        let v: f64 = gl.composite(0.0, hi, panels, |r: f64| g(r).abs().powf(p) * r.sinh().powi(2));
        (4.0 * PI * v).powf(1.0 / p)
    };
    let ratios: Vec<f64> = bs
        .par_iter()
        .map(|&b| {
            let s_max = (40.0 / b).sqrt();
            let f = |r: f64| (-b * r * r).exp();
            let conv = |r: f64| radial_convolve_direct(f, &kappa, r, s_max, 16);
            // the grid must reach where |κ∗f|^q sinh² r is negligible
            let out = h3_norm(&conv, q, 60.0, 120);
            out / h3_norm(&f, qp, s_max, 32)
        })
        .collect();
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub multiplier: String,
    pub sobolev_order: f64,
    pub alphas: Vec<f64>,
    pub norms: Vec<f64>,
    pub max_min_ratio: f64,
    /// Fit of `ln‖K_α‖` against `ln(1/α)`; absent when all norms vanish.
    pub trend: Option<SlopeFit>,
    pub trend_slope: f64,
    pub bounded: bool,
}

pub const MAX_MIN_LIMIT: f64 = 10.0;
pub const TREND_LIMIT: f64 = 0.02;

/// Far-diagonal norms of `F(αP)` and the uniformity verdict: max/min below
/// 10 and trend slope at most 0.02.
pub fn multiplier_uniformity(n: usize, f: &Multiplier, alphas: &[f64], samples: usize) -> Result<UniformityReport> {
    let norms = far_diagonal_norms(n, f, alphas, samples)?;
    let max = norms.iter().cloned().fold(0.0, f64::max);
    let min = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let (ratio, trend) = if max == 0.0 {
        (1.0, None)
    } else {
        let xs: Vec<f64> = alphas.iter().map(|a| -a.ln()).collect();
        let ys: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
        let fit = if ys.iter().all(|y| y.is_finite()) { Some(fit_slope(&xs, &ys)?) } else { None };
        (max / min, fit)
    };
    let trend_slope = trend.as_ref().map_or(0.0, |t| t.slope);
    Ok(UniformityReport {
        multiplier: f.to_string(),
        sobolev_order: f.sobolev_order(),
        alphas: alphas.to_vec(),
        bounded: ratio < MAX_MIN_LIMIT && trend_slope <= TREND_LIMIT,
        norms,
        max_min_ratio: ratio,
        trend,
        trend_slope,
    })
}

/// `α = 2^0, 2^{-1}, …, 2^{-k}`.
pub fn dyadic_alphas(k: u32) -> Vec<f64> {
    (0..=k).map(|i| 0.5f64.powi(i as i32)).collect()
}
