use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

pub const MIN_FIT_POINTS: usize = 8;

/// Least-squares line through log-log data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    /// 95% Student-t half-width of the slope.
    pub confidence_halfwidth: f64,
}

impl SlopeFit {
    pub fn contains(&self, slope: f64) -> bool {
        (self.slope - slope).abs() <= self.confidence_halfwidth
    }
}

pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() {
        return Err(Error::contract("xs and ys differ in length"));
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::contract(format!("slope fit needs at least {MIN_FIT_POINTS} points, got {}", xs.len())));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::contract("slope fit needs finite data"));
    }
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::contract("slope fit needs at least two distinct abscissae"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let dof = n - 2.0;
    let t = StudentsT::new(0.0, 1.0, dof).expect("dof >= 6").inverse_cdf(0.975);
    Ok(SlopeFit {
        xs: xs.to_vec(),
        ys: ys.to_vec(),
        slope,
        intercept,
        residual_rms: (ss / n).sqrt(),
        confidence_halfwidth: t * (ss / dof / sxx).sqrt(),
    })
}

/// Fit of `ln y` against `ln x`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::contract("log-log fit needs positive data"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    fit_slope(&lx, &ly)
}

/// Coverage of the stated half-width on `trials` noisy lines
/// `y = 2x + 1 + N(0, noise²)`.
pub fn coverage_self_test(trials: usize, points: usize, noise: f64, seed: u64) -> usize {
    use rand_distr::{Distribution, Normal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let dist = Normal::new(0.0, noise).expect("positive noise");
    let xs: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
    (0..trials)
        .filter(|_| {
            let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0 + dist.sample(&mut rng)).collect();
            fit_slope(&xs, &ys).map(|f| f.contains(2.0)).unwrap_or(false)
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let f = fit_slope(&xs, &ys).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-13);
        assert!(f.residual_rms < 1e-13);
    }

    #[test]
    fn power_law() {
        let s: Vec<f64> = (0..12).map(|i| 10f64.powf(1.0 + i as f64 / 11.0 * 2.0)).collect();
        let v: Vec<f64> = s.iter().map(|s| s * s).collect();
        assert!((fit_loglog(&s, &v).unwrap().slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        let xs = [1.0, 2.0, 3.0];
        assert!(matches!(fit_slope(&xs, &xs), Err(Error::Contract(_))));
        let bad = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, f64::NAN];
        assert!(fit_slope(&bad, &bad).is_err());
    }

    #[test]
    fn confidence_coverage() {
        let hits = coverage_self_test(4000, 12, 0.1, 7) as f64 / 4000.0;
        assert!((hits - 0.95).abs() < 0.01, "{hits}");
    }

    proptest! {
        #[test]
        fn deterministic(ys in proptest::collection::vec(-1e3f64..1e3, 8..20)) {
            let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64).collect();
            let a = fit_slope(&xs, &ys).unwrap();
            let b = fit_slope(&xs, &ys).unwrap();
            prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        }

        #[test]
        fn exact_on_lines(a in -5.0f64..5.0, b in -5.0f64..5.0) {
            let xs: Vec<f64> = (0..9).map(|i| 0.3 * i as f64).collect();
            let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            let f = fit_slope(&xs, &ys).unwrap();
            prop_assert!((f.slope - a).abs() < 1e-10);
        }
    }
}
