use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::GridSpec;
use crate::kernels::{check_n, spectral_measure_deriv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Low,
    High,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Low => "low",
            Regime::High => "high",
        })
    }
}

impl std::str::FromStr for Regime {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low" => Ok(Regime::Low),
            "high" => Ok(Regime::High),
            other => Err(crate::Error::Config(format!("unknown regime `{other}` (low|high)"))),
        }
    }
}

/// `d ≤ 1` or `d ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Zone {
    Near,
    Far,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckReport {
    pub label: String,
    pub sigma_grid: GridSpec,
    pub r_grid: GridSpec,
    pub levels: usize,
    pub sup_ratio: f64,
    /// `|sup_k - sup_{k-1}| / sup_k` for each doubling.
    pub refinement_deltas: Vec<f64>,
    pub passed: bool,
}

/// Sup of `|kernel|/envelope` over the tensor grid, then again on
/// `levels - 1` successive doublings.
pub fn bound_check(
    label: impl Into<String>,
    sigma_grid: GridSpec,
    r_grid: GridSpec,
    levels: usize,
    kernel: impl Fn(f64, f64) -> Result<f64> + Sync,
    envelope: impl Fn(f64, f64) -> f64 + Sync,
) -> BoundCheckReport {
    let degenerate = sigma_grid.count < 2 && r_grid.count < 2;
    let levels = if degenerate { 1 } else { levels.max(1) };
    let (mut sg, mut rg) = (sigma_grid, r_grid);
    let mut sups = Vec::with_capacity(levels);
    for level in 0..levels {
        if level > 0 {
            if sg.count >= 2 {
                sg = sg.refined();
            }
            if rg.count >= 2 {
                rg = rg.refined();
            }
        }
        sups.push(grid_sup(&sg, &rg, &kernel, &envelope));
    }
    let sup_ratio = *sups.last().expect("levels >= 1");
    let refinement_deltas: Vec<f64> = sups.windows(2).map(|w| ((w[1] - w[0]) / w[1]).abs()).collect();
    let passed = sup_ratio.is_finite() && refinement_deltas.last().is_some_and(|d| *d < 0.1);
    BoundCheckReport { label: label.into(), sigma_grid, r_grid, levels, sup_ratio, refinement_deltas, passed }
}

fn grid_sup(
    sg: &GridSpec,
    rg: &GridSpec,
    kernel: &(impl Fn(f64, f64) -> Result<f64> + Sync),
    envelope: &(impl Fn(f64, f64) -> f64 + Sync),
) -> f64 {
    let rs = rg.points();
    let rows: Vec<f64> = sg
        .points()
        .par_iter()
        .map(|&s| {
            rs.iter().fold(0.0f64, |m, &r| {
                let ratio = match kernel(s, r) {
                    Ok(k) => k.abs() / envelope(s, r),
                    Err(_) => f64::INFINITY,
                };
                m.max(if ratio.is_nan() { f64::INFINITY } else { ratio })
            })
        })
        .collect();
    rows.into_iter().fold(0.0, f64::max)
}

/// Envelopes of the pointwise spectral-measure estimates. At `d = 1` both
/// zone formulas apply and the larger is used.
pub fn envelope(n: usize, regime: Regime, j: usize, sigma: f64, d: f64) -> f64 {
    let nf = n as f64;
    let jf = j as f64;
    let near = |s: f64, d: f64| match regime {
        Regime::Low => s * s,
        Regime::High => s.powf(nf - jf) * (1.0 + d * s).powf(-nf / 2.0 + jf),
    };
    let far = |s: f64, d: f64| match regime {
        Regime::Low => s * s * d / (1.0 + s * d) * (-nf * d / 2.0).exp(),
        Regime::High => s.powf(nf / 2.0) * d.powf(jf) * (-nf * d / 2.0).exp(),
    };
    if d < 1.0 {
        near(sigma, d)
    } else if d > 1.0 {
        far(sigma, d)
    } else {
        near(sigma, d).max(far(sigma, d))
    }
}

/// Default grids for one (regime, zone) cell.
pub fn default_grids(regime: Regime, zone: Zone) -> (GridSpec, GridSpec) {
    let sg = match regime {
        Regime::Low => GridSpec::log(1e-3, 1.0, 33),
        Regime::High => GridSpec::lin(1.0, 100.0, 397),
    };
    let rg = match zone {
        Zone::Near => GridSpec::log(1e-3, 1.0, 33),
        Zone::Far => GridSpec::log(1.0, 30.0, 59),
    };
    (sg, rg)
}

pub const REFINEMENT_LEVELS: usize = 3;

/// One report per `(j, zone)`; the low regime only has `j = 0`.
pub fn check_pointwise_bounds(n: usize, regime: Regime, js: &[usize]) -> Result<Vec<BoundCheckReport>> {
    check_n(n)?;
    let js: Vec<usize> = match regime {
        Regime::Low => vec![0],
        Regime::High => js.to_vec(),
    };
    let mut out = Vec::new();
    for j in js {
        for zone in [Zone::Near, Zone::Far] {
            let (sg, rg) = default_grids(regime, zone);
            out.push(pointwise_report(n, regime, j, zone, sg, rg, REFINEMENT_LEVELS, 1.0));
        }
    }
    Ok(out)
}

/// A single envelope check; `scale` multiplies the envelope.
#[allow(clippy::too_many_arguments)]
pub fn pointwise_report(
    n: usize,
    regime: Regime,
    j: usize,
    zone: Zone,
    sigma_grid: GridSpec,
    r_grid: GridSpec,
    levels: usize,
    scale: f64,
) -> BoundCheckReport {
    let zone_name = match zone {
        Zone::Near => "d<=1",
        Zone::Far => "d>=1",
    };
    bound_check(
        format!("n={n} {regime} j={j} {zone_name}"),
        sigma_grid,
        r_grid,
        levels,
        |s, r| spectral_measure_deriv(n, j, s, r),
        |s, r| scale * envelope(n, regime, j, s, r),
    )
}

/// `sup |(d/dσ)^j dE| / σ` over `σ ∈ sigma_grid`, `r ∈ (0, 30]`, on `H³`.
pub fn deriv_bound_check(j: usize, sigma_grid: GridSpec) -> BoundCheckReport {
    bound_check(
        format!("n=2 d^{j}/dsigma^{j} dE / sigma"),
        sigma_grid,
        GridSpec::log(1e-3, 30.0, 65),
        REFINEMENT_LEVELS,
        |s, r| spectral_measure_deriv(2, j, s, r),
        |s, _| s,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_inequality() {
        // |sin s| ≤ 2s/(1+s) for s ≥ 0
        for i in 0..20000 {
            let s = i as f64 * 1e-3;
            assert!(s.sin().abs() <= 2.0 * s / (1.0 + s) + 1e-15);
        }
    }

    #[test]
    fn high_regime_h3_near_witness() {
        let (sg, rg) = default_grids(Regime::High, Zone::Near);
        let r = pointwise_report(2, Regime::High, 0, Zone::Near, sg, rg, 3, 1.0);
        assert!(r.passed, "{r:?}");
        assert!(r.sup_ratio <= 1.0 / (PI * PI) + 1e-12, "{}", r.sup_ratio);
    }

    #[test]
    fn all_h3_reports_pass() {
        for regime in [Regime::Low, Regime::High] {
            for rep in check_pointwise_bounds(2, regime, &[0, 1, 2]).unwrap() {
                assert!(rep.passed, "{rep:?}");
            }
        }
    }

    #[test]
    fn one_point_grid_is_insufficient() {
        let g = GridSpec::lin(1.0, 1.0, 1);
        let r = pointwise_report(2, Regime::High, 0, Zone::Near, g, g, 3, 1.0);
        assert!(r.refinement_deltas.is_empty() && !r.passed);
        assert!(r.sup_ratio.is_finite());
    }

    #[test]
    fn doubling_the_envelope_halves_the_ratio() {
        let (sg, rg) = (GridSpec::log(1.0, 50.0, 9), GridSpec::lin(1.0, 10.0, 9));
        for j in 0..3 {
            let a = pointwise_report(2, Regime::High, j, Zone::Far, sg, rg, 2, 1.0);
            let b = pointwise_report(2, Regime::High, j, Zone::Far, sg, rg, 2, 2.0);
            assert_eq!(b.sup_ratio, a.sup_ratio / 2.0);
        }
    }

    #[test]
    fn envelope_takes_max_at_zone_boundary() {
        for regime in [Regime::Low, Regime::High] {
            let e = envelope(2, regime, 1, 3.0, 1.0);
            let near = envelope(2, regime, 1, 3.0, 1.0 - 1e-15);
            let far = envelope(2, regime, 1, 3.0, 1.0 + 1e-15);
            assert!((e - near.max(far)).abs() <= 1e-12 * e);
        }
    }

    #[test]
    fn derivative_bounds() {
        let v = spectral_measure_deriv(2, 1, 1.0, 1.0).unwrap();
        assert!((v - (1f64.sin() + 1f64.cos()) / (2.0 * PI * PI * 1f64.sinh())).abs() < 1e-14);
        for j in 1..=3 {
            let r = deriv_bound_check(j, GridSpec::lin(1.0, 100.0, 397));
            assert!(r.passed, "{r:?}");
        }
        // (d/dσ)² dE at r → 0 is 1/π² for every σ
        let v = spectral_measure_deriv(2, 2, 5.0, 1e-9).unwrap();
        assert!((v - 1.0 / (PI * PI)).abs() < 1e-9);
    }
}
