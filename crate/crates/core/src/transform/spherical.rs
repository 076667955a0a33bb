use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{r_over_sinh, sinc};

/// `φ_σ(r) = sin(σr)/(σ sinh r)`, with `φ_σ(0) = 1` and `φ_0(r) = r/sinh r`.
pub fn spherical_function_h3(sigma: f64, r: f64) -> f64 {
    let (sigma, r) = (sigma.abs(), r.abs());
    // sin(σr)/(σ sinh r) = sinc(σr)·r/sinh r
    sinc(sigma * r) * r_over_sinh(r)
}

/// Samples of a radial function on `H^{n+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub n: usize,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(n: usize, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return Err(Error::domain(format!("n must be even and positive, got {n}")));
        }
        if grid.len() != values.len() || grid.is_empty() {
            return Err(Error::contract("grid and values must be non-empty and of equal length"));
        }
        if grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::contract("radial grid must be positive and strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract("radial profile has non-finite values"));
        }
        Ok(RadialProfile { n, grid, values })
    }

    pub fn from_fn(n: usize, grid: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.iter().map(|&r| f(r)).collect();
        Self::new(n, grid, values)
    }

    pub fn r_max(&self) -> f64 {
        *self.grid.last().expect("non-empty")
    }

    /// `∫|κ|²·area·(sinh r)^n dr` by the trapezoid rule, including the
    /// segment from the origin.
    pub fn l2_norm_sq(&self) -> f64 {
        self.weighted_sq(|i| self.values[i])
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Relative `L²` distance to `other` on the same grid.
    pub fn relative_l2_error(&self, reference: &RadialProfile) -> Result<f64> {
        check_compatible(self, reference)?;
        let num = self.weighted_sq(|i| self.values[i] - reference.values[i]);
        Ok((num / reference.l2_norm_sq()).sqrt())
    }

    fn weighted_sq(&self, f: impl Fn(usize) -> f64) -> f64 {
        let area = sphere_area(self.n);
        let w = |i: usize| {
            let v = f(i);
            v * v * self.grid[i].sinh().powi(self.n as i32)
        };
        let mut acc = 0.5 * self.grid[0] * w(0);
        for i in 1..self.grid.len() {
            acc += 0.5 * (self.grid[i] - self.grid[i - 1]) * (w(i) + w(i - 1));
        }
        area * acc
    }
}

/// Area of the unit sphere `S^n`.
pub fn sphere_area(n: usize) -> f64 {
    let half = (n + 1) as f64 / 2.0;
    2.0 * PI.powf(half) / crate::special::gamma(Complex64::from(half)).re
}

pub(crate) fn check_compatible(a: &RadialProfile, b: &RadialProfile) -> Result<()> {
    let same = a.n == b.n
        && a.grid.len() == b.grid.len()
        && a.grid.iter().zip(&b.grid).all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(1.0));
    if same {
        Ok(())
    } else {
        Err(Error::contract("radial profiles live on incompatible grids"))
    }
}

/// `κ̂` on the uniform grid `σ_m = m·Δσ`, `m = 0..=count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub sigma: Vec<f64>,
    pub values: Vec<f64>,
}

impl SpectralProfile {
    pub fn step(&self) -> f64 {
        self.sigma[1] - self.sigma[0]
    }

    /// Index of the largest `|σ·κ̂(σ)|`.
    pub fn peak(&self) -> usize {
        let g = |m: usize| (self.sigma[m] * self.values[m]).abs();
        (0..self.values.len())
            .max_by(|&a, &b| g(a).total_cmp(&g(b)))
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformGrid {
    pub sigma_max: f64,
    pub count: usize,
    /// Largest admissible `|κ(R_max) sinh R_max| / max|κ sinh r|`; `None`
    /// disables the check.
    pub tail_tol: Option<f64>,
}

impl Default for TransformGrid {
    fn default() -> Self {
        TransformGrid { sigma_max: 64.0, count: 8192, tail_tol: Some(1e-6) }
    }
}

impl TransformGrid {
    pub fn sigma(&self) -> Vec<f64> {
        let h = self.sigma_max / self.count as f64;
        (0..=self.count).map(|m| m as f64 * h).collect()
    }
}

/// `(I₀, I₁) = (∫₀¹ e^{iθs} ds, ∫₀¹ s e^{iθs} ds)`, given `e^{iθ}`.
fn filon_moments(theta: f64, e: Complex64) -> (Complex64, Complex64) {
    if theta.abs() < 0.25 {
        let w = Complex64::new(0.0, theta);
        let (mut i0, mut i1) = (Complex64::from(0.0), Complex64::from(0.0));
        let mut pow = Complex64::from(1.0);
        for m in 0..14 {
            i0 += pow / (m + 1) as f64;
            i1 += pow / (m + 2) as f64;
            pow = pow * w / (m + 1) as f64;
            if pow.norm() < 1e-17 {
                break;
            }
        }
        (i0, i1)
    } else {
        let w = Complex64::new(0.0, theta);
        let i0 = (e - 1.0) / w;
        let i1 = e / w - (e - 1.0) / (w * w);
        (i0, i1)
    }
}

/// `∫ p(x) sin(ωx) dx` for the piecewise-linear interpolant `p` of
/// `(nodes, vals)`.
#[cfg(test)]
fn filon_sine(nodes: &[f64], vals: &[f64], omega: f64) -> f64 {
    let mut acc = 0.0;
    let mut ea = Complex64::from_polar(1.0, omega * nodes[0]);
    for i in 1..nodes.len() {
        let (a, b) = (nodes[i - 1], nodes[i]);
        let h = b - a;
        let eb = Complex64::from_polar(1.0, omega * b);
        let theta = omega * h;
        let (i0, i1) = filon_moments(theta, eb * ea.conj());
        acc += (ea * (vals[i - 1] * (i0 - i1) + vals[i] * i1)).im * h;
        ea = eb;
    }
    acc
}

/// `(4π/σ)∫w sin(σr) dr` for every `σ` of a uniform grid starting at 0.
/// Loops over segments outermost so `e^{iσ_m r}` comes from a recurrence
/// in `m`.
fn forward_filon(nodes: &[f64], w: &[f64], sigma: &[f64]) -> Vec<f64> {
    let ds = sigma[1] - sigma[0];
    let mut acc = vec![0.0; sigma.len()];
    let mut lim = 0.0;
    let mut ea: Vec<Complex64> = vec![Complex64::from(1.0); sigma.len()];
    let mut eb = ea.clone();
    for i in 1..nodes.len() {
        let (a, b) = (nodes[i - 1], nodes[i]);
        let h = b - a;
        lim += h / 6.0 * (w[i - 1] * (2.0 * a + b) + w[i] * (a + 2.0 * b));
        let step = Complex64::from_polar(1.0, ds * b);
        let mut e = Complex64::from(1.0);
        for m in 0..sigma.len() {
            if m % 256 == 0 {
                e = Complex64::from_polar(1.0, sigma[m] * b);
            }
            eb[m] = e;
            e *= step;
        }
        if w[i - 1] != 0.0 || w[i] != 0.0 {
            for m in 1..sigma.len() {
                let theta = sigma[m] * h;
                let (i0, i1) = filon_moments(theta, eb[m] * ea[m].conj());
                acc[m] += (ea[m] * (w[i - 1] * (i0 - i1) + w[i] * i1)).im * h;
            }
        }
        std::mem::swap(&mut ea, &mut eb);
    }
    acc[0] = 4.0 * PI * lim;
    for m in 1..sigma.len() {
        acc[m] *= 4.0 * PI / sigma[m];
    }
    acc
}

/// Piecewise-linear Filon sine rule on the uniform grid `x_m = m·h`, starting at 0.
fn filon_sine_uniform(h: f64, vals: &[f64], omega: f64) -> f64 {
    let theta = omega * h;
    let step = Complex64::from_polar(1.0, theta);
    let (i0, i1) = filon_moments(theta, step);
    let (c0, c1) = (i0 - i1, i1);
    let mut acc = Complex64::from(0.0);
    let mut e = Complex64::from(1.0);
    for m in 1..vals.len() {
        acc += e * (vals[m - 1] * c0 + vals[m] * c1);
        e *= step;
        if m % 256 == 0 {
            e = Complex64::from_polar(1.0, theta * m as f64);
        }
    }
    acc.im * h
}

/// `κ̂(σ) = 4π∫κ(r)φ_σ(r)(sinh r)² dr` on the default σ-grid.
pub fn spherical_transform_h3(kappa: &RadialProfile) -> Result<SpectralProfile> {
    spherical_transform_h3_with(kappa, &TransformGrid::default())
}

/// Forward transform, integrating the piecewise-linear interpolant of
/// `w = κ·sinh r` (with `w(0) = 0`) exactly against `sin(σr)`.
pub fn spherical_transform_h3_with(kappa: &RadialProfile, tg: &TransformGrid) -> Result<SpectralProfile> {
    if kappa.n != 2 {
        return Err(Error::Unsupported(format!(
            "spherical transform is implemented on H³ only (n = 2), got n = {}",
            kappa.n
        )));
    }
    let mut nodes = Vec::with_capacity(kappa.grid.len() + 1);
    nodes.push(0.0);
    nodes.extend_from_slice(&kappa.grid);
    let mut w = Vec::with_capacity(nodes.len());
    w.push(0.0);
    w.extend(kappa.grid.iter().zip(&kappa.values).map(|(r, k)| k * r.sinh()));
    if let Some(tol) = tg.tail_tol {
        let peak = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tail = if peak > 0.0 { w.last().unwrap().abs() / peak } else { 0.0 };
        if tail > tol {
            return Err(Error::Truncation { tail });
        }
    }
    let sigma = tg.sigma();
    let values = forward_filon(&nodes, &w, &sigma);
    Ok(SpectralProfile { sigma, values })
}

/// `κ(r) = (1/(2π² sinh r))∫κ̂(σ)σ sin(σr) dσ` on `grid`.
pub fn inverse_spherical_transform_h3(hat: &SpectralProfile, grid: &[f64]) -> Result<RadialProfile> {
    if hat.sigma.len() < 2 || hat.sigma[0] != 0.0 {
        return Err(Error::contract("spectral profile must start at σ = 0 with at least two samples"));
    }
    let h = hat.step();
    let g: Vec<f64> = hat.sigma.iter().zip(&hat.values).map(|(s, v)| s * v).collect();
    let values = grid
        .iter()
        .map(|&r| filon_sine_uniform(h, &g, r) / (2.0 * PI * PI * r.sinh()))
        .collect();
    RadialProfile::new(2, grid.to_vec(), values)
}

/// `κ₁ ∗ κ₂` by transform, multiply, invert.
pub fn radial_convolve(k1: &RadialProfile, k2: &RadialProfile) -> Result<RadialProfile> {
    radial_convolve_with(k1, k2, &TransformGrid::default())
}

pub fn radial_convolve_with(k1: &RadialProfile, k2: &RadialProfile, tg: &TransformGrid) -> Result<RadialProfile> {
    check_compatible(k1, k2)?;
    let a = spherical_transform_h3_with(k1, tg)?;
    let b = spherical_transform_h3_with(k2, tg)?;
    let prod = SpectralProfile {
        sigma: a.sigma.clone(),
        values: a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect(),
    };
    inverse_spherical_transform_h3(&prod, &k1.grid)
}

/// `(κ₁ ∗ κ₂)(r) = (2π/sinh r)∫κ₁(s) sinh s ∫_{|r-s|}^{r+s} κ₂(u) sinh u du ds`,
/// evaluated by composite Gauss–Legendre on `[0, s_max]`.
pub fn radial_convolve_direct(
    k1: impl Fn(f64) -> f64,
    k2: impl Fn(f64) -> f64,
    r: f64,
    s_max: f64,
    panels: usize,
) -> f64 {
    let gl = crate::quad::GaussLegendre::new(16);
    let outer: f64 = gl.composite(0.0, s_max, panels, |s: f64| {
        let (lo, hi) = ((r - s).abs(), (r + s).min(s_max + r));
        let inner_panels = (((hi - lo) / s_max * panels as f64).ceil() as usize).max(1);
        let inner: f64 = gl.composite(lo, hi, inner_panels, |u: f64| k2(u) * u.sinh());
        k1(s) * s.sinh() * inner
    });
    2.0 * PI * outer / r.sinh()
}
