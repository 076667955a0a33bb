use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::multiplier::{smooth_bump, Multiplier};
use crate::error::{Error, Result};
use crate::quad::adaptive;
use crate::special::gamma;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FgTailConfig {
    /// Ambient `H^{n+1}`; only bounds `m ≤ n/2`.
    pub n: usize,
    /// `φ(σ) = ψ(σ/width)` with `ψ` the smooth bump.
    pub cutoff_width: f64,
    /// σ-spacing of the FFT grid.
    pub step: f64,
    /// Degree of the polynomial in the subtracted singular part.
    pub taylor_degree: usize,
}

impl Default for FgTailConfig {
    fn default() -> Self {
        FgTailConfig { n: 4, cutoff_width: 2.0, step: 1.0 / 1024.0, taylor_degree: 6 }
    }
}

impl FgTailConfig {
    /// Largest `R` the FFT grid resolves.
    pub fn max_radius(&self) -> f64 {
        0.25 * PI / self.step
    }
}

const SIGMA_END: f64 = 60.0;
const FIT_WIDTH: f64 = 0.25;

/// `∫_{r≥R} |(F̂ ∗ Ĝ)(r)|² dr` with `G(σ) = θ(σ)σ^m φ(σ)`.
pub fn fg_tail(f: &Multiplier, m: f64, r: f64, cfg: &FgTailConfig) -> Result<f64> {
    Ok(fg_tails(f, m, &[r], cfg)?[0])
}

/// [`fg_tail`] for several radii, sharing one FFT.
///
/// `F̂ ∗ Ĝ = 2π·(FG)^`, and `H = FG = θ(σ)σ^m Φ(σ)` is split as
/// `σ^m e^{-σ}P(σ) + rem`, where `P` matches `Φe^σ` near 0. The first part
/// transforms to `Σ a_j Γ(m+j+1)(1+ir)^{-(m+j+1)}`; `rem` vanishes to high
/// order at 0 and goes through the FFT.
pub fn fg_tails(f: &Multiplier, m: f64, radii: &[f64], cfg: &FgTailConfig) -> Result<Vec<f64>> {
    if !(m > 0.0 && m <= cfg.n as f64 / 2.0) {
        return Err(Error::domain(format!("m must lie in (0, n/2] = (0, {}], got {m}", cfg.n as f64 / 2.0)));
    }
    if let Some(&bad) = radii.iter().find(|&&r| !(r >= 1.0)) {
        return Err(Error::domain(format!("R must be at least 1, got {bad}")));
    }
    let r_c = cfg.max_radius();
    if let Some(&big) = radii.iter().find(|&&r| r > r_c) {
        return Err(Error::Resolution(format!(
            "R = {big} exceeds the resolved range {r_c:.1}; reduce the σ-step below {:.3e}",
            0.25 * PI / big
        )));
    }
    let phi = |s: f64| f.eval(s) * smooth_bump(s / cfg.cutoff_width);
    let coeffs = taylor_fit(|s| phi(s) * s.exp(), cfg.taylor_degree, FIT_WIDTH)?;
    let singular = |s: f64| {
        let p: f64 = coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c);
        s.powf(m) * (-s).exp() * p
    };
    let singular_hat = |r: f64| -> Complex64 {
        let z = Complex64::new(1.0, r);
        coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let e = m + j as f64 + 1.0;
                *a * gamma(Complex64::from(e)).re * (-e * z.ln()).exp()
            })
            .sum()
    };

    // rem on [0, SIGMA_END], zero-padded so that the r-spacing is fine
    let h = cfg.step;
    let count = (SIGMA_END / h).round() as usize;
    let len = (4 * count).next_power_of_two();
    let mut buf = vec![Complex64::from(0.0); len];
    for (i, b) in buf.iter_mut().enumerate().take(count + 1) {
        let s = i as f64 * h;
        let w = if i == 0 || i == count { 0.5 } else { 1.0 };
        let hv = if s < 1.0 { s.powf(m) * phi(s) } else { 0.0 };
        *b = Complex64::from(w * h * (hv - singular(s)));
    }
    // forward DFT carries e^{-2πi·ik/L} = e^{-iσ_i r_k}
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let dr = 2.0 * PI / (len as f64 * h);
    let k_c = (r_c / dr).floor() as usize;
    let h_hat = |k: usize| (singular_hat(k as f64 * dr) + buf[k]) * (2.0 * PI);
    let dens: Vec<f64> = (0..=k_c).map(|k| h_hat(k).norm_sqr()).collect();
    let density_at = |r: f64| {
        let x = r / dr;
        let k = x.floor() as usize;
        let t = x - k as f64;
        dens[k] * (1.0 - t) + dens[(k + 1).min(k_c)] * t
    };

    // tail of the singular part beyond r_c, in t = 1/r
    let far = {
        let (v, _) = adaptive(0.0, 1.0 / r_c, 0.0, 1e-10, 200, |t: f64| {
            if t == 0.0 {
                0.0
            } else {
                (singular_hat(1.0 / t) * (2.0 * PI)).norm_sqr() / (t * t)
            }
        });
        v
    };
    let tails = radii
        .iter()
        .map(|&r| {
            let k0 = (r / dr).ceil() as usize;
            let r0 = k0 as f64 * dr;
            let mut acc = 0.5 * (r0 - r) * (density_at(r) + dens[k0]);
            for k in k0 + 1..=k_c {
                acc += 0.5 * dr * (dens[k - 1] + dens[k]);
            }
            (acc + far).max(0.0)
        })
        .collect();
    Ok(tails)
}

/// Monomial coefficients of the degree-`deg` interpolant of `g` at
/// Chebyshev nodes on `[0, width]`.
fn taylor_fit(g: impl Fn(f64) -> f64, deg: usize, width: f64) -> Result<Vec<f64>> {
    let k = deg + 1;
    let xs: Vec<f64> = (0..k).map(|i| 0.5 * (1.0 - ((2 * i + 1) as f64 * PI / (2 * k) as f64).cos())).collect();
    let mut a: Vec<Vec<f64>> = xs.iter().map(|x| (0..k).map(|j| x.powi(j as i32)).collect()).collect();
    let mut b: Vec<f64> = xs.iter().map(|x| g(x * width)).collect();
    // Gaussian elimination with partial pivoting
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
            .expect("non-empty");
        if a[piv][col].abs() < 1e-300 {
            return Err(Error::Resolution("singular Taylor fit".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..k {
            let factor = a[row][col] / a[col][col];
            for j in col..k {
                a[row][j] -= factor * a[col][j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut c = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|j| a[row][j] * c[j]).sum();
        c[row] = (b[row] - s) / a[row][row];
    }
    Ok(c.iter().enumerate().map(|(j, v)| v / width.powi(j as i32)).collect())
}
