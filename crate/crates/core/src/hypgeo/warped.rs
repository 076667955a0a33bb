use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radial warp functions `f` for `dr² + f(r)² dω²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Warp {
    /// Exact hyperbolic space.
    Sinh,
    /// `sinh r + r³ e^{-r²}`: same pole and same infinity as `sinh`, with a
    /// compactly concentrated bulge in between.
    SinhPlusGaussian,
}

impl Warp {
    /// `(f, f', f'')` at `r`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        let (s, c) = (r.sinh(), r.cosh());
        match self {
            Warp::Sinh => (s, c, s),
            Warp::SinhPlusGaussian => {
                let g = (-r * r).exp();
                let r2 = r * r;
                (
                    s + r * r2 * g,
                    c + (3.0 * r2 - 2.0 * r2 * r2) * g,
                    s + (6.0 * r - 14.0 * r * r2 + 4.0 * r * r2 * r2) * g,
                )
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpedMetric {
    pub n: usize,
    pub warp: Warp,
}

impl WarpedMetric {
    pub fn new(n: usize, warp: Warp) -> Self {
        WarpedMetric { n, warp }
    }

    /// Limit of `f(r) / (e^r / 2)` as `r → ∞`.
    pub fn asymptotic_constant(&self) -> f64 {
        1.0
    }

    /// Radial sectional curvature `-f''/f`.
    pub fn radial_curvature(&self, r: f64) -> f64 {
        let (f, _, f2) = self.warp.eval(r);
        -f2 / f
    }
}

/// Polar density ratio `m(r) = (f(r)/sinh r)^n`.
pub fn warped_volume_density(metric: &WarpedMetric, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("radius must be positive, got {r}")));
    }
    let (f, _, _) = metric.warp.eval(r);
    let ratio = match metric.warp {
        Warp::Sinh => 1.0,
        Warp::SinhPlusGaussian => 1.0 + r * r * r * (-r * r).exp() / r.sinh(),
    };
    debug_assert!(f > 0.0);
    Ok(ratio.powi(metric.n as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_warp_has_unit_density() {
        for n in [2, 4] {
            let m = WarpedMetric::new(n, Warp::Sinh);
            for r in [1e-6, 1.0, 7.5, 40.0] {
                assert_eq!(warped_volume_density(&m, r).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn perturbed_density_tends_to_one() {
        let m = WarpedMetric::new(2, Warp::SinhPlusGaussian);
        assert!((warped_volume_density(&m, 20.0).unwrap() - 1.0).abs() < 1e-8);
        // and stays bounded everywhere
        let sup = (1..4000)
            .map(|i| warped_volume_density(&m, i as f64 * 0.005).unwrap())
            .fold(0.0f64, f64::max);
        assert!(sup.is_finite() && sup < 2.0);
    }

    #[test]
    fn smooth_pole_and_hyperbolic_end() {
        for warp in [Warp::Sinh, Warp::SinhPlusGaussian] {
            let r = 1e-5;
            let (f, _, _) = warp.eval(r);
            assert!((f / r - 1.0).abs() < 1e-9);
            let m = WarpedMetric::new(2, warp);
            assert!((m.radial_curvature(30.0) + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let w = Warp::SinhPlusGaussian;
        let h = 1e-5;
        for r in [0.3, 1.0, 2.2] {
            let (_, d1, d2) = w.eval(r);
            let fd1 = (w.eval(r + h).0 - w.eval(r - h).0) / (2.0 * h);
            let fd2 = (w.eval(r + h).1 - w.eval(r - h).1) / (2.0 * h);
            assert!((d1 - fd1).abs() < 1e-8);
            assert!((d2 - fd2).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_nonpositive_radius() {
        let m = WarpedMetric::new(2, Warp::Sinh);
        assert!(warped_volume_density(&m, 0.0).is_err());
    }
}
