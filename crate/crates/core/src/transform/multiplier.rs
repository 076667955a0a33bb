use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::spherical::{sphere_area, RadialProfile};
use crate::error::{Error, Result};
use crate::kernels::{spectral_measure, Phase, SymbolicRadialKernel};
use crate::quad::{adaptive, GaussLegendre};

/// `exp(1 - 1/(1-τ²))` on `(-1, 1)`, equal to 1 at the origin.
pub fn smooth_bump(tau: f64) -> f64 {
    let q = 1.0 - tau * tau;
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

/// Even test multipliers supported in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Multiplier {
    Zero,
    /// `e^{-tτ²}`, cut off at `|τ| = 1`.
    Gaussian { t: f64 },
    /// `(1-τ²)^p`, which is `C^{p-1}`.
    Poly { p: u32 },
    Smooth,
    /// 1 on `|τ| ≤ flat`, then `ψ((|τ|-flat)/(1-flat))`.
    Plateau { flat: f64 },
    /// `ψ((|τ|-c)/w)` with `ψ` the smooth bump.
    Window { center: f64, width: f64 },
    /// `(1-τ²)^{s'-1/2}·(1 + Σ_k (2^kπ)^{-s'} g_k cos(2^k πτ))`, `k = 1..=coeffs.len()`.
    /// The envelope and the series are both exactly `H^{s'-}`, so the
    /// roughness shows at every frequency scale.
    Lacunary { s_prime: f64, coeffs: Vec<f64>, seed: u64 },
}

impl Multiplier {
    /// Lacunary series with `g_k = 1 + ξ_k/2`, `ξ_k` standard normal
    /// clipped to `[-1, 1]`, so that `|g_k| ∈ [1/2, 3/2]`.
    pub fn lacunary(s_prime: f64, terms: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (1..=terms)
            .map(|k| {
                let xi: f64 = StandardNormal.sample(&mut rng);
                (2f64.powi(k as i32) * PI).powf(-s_prime) * (1.0 + 0.5 * xi.clamp(-1.0, 1.0))
            })
            .collect();
        Multiplier::Lacunary { s_prime, coeffs, seed }
    }

    pub fn eval(&self, tau: f64) -> f64 {
        let a = tau.abs();
        if a >= 1.0 {
            return 0.0;
        }
        match self {
            Multiplier::Zero => 0.0,
            Multiplier::Gaussian { t } => (-t * a * a).exp(),
            Multiplier::Poly { p } => (1.0 - a * a).powi(*p as i32),
            Multiplier::Smooth => smooth_bump(a),
            Multiplier::Plateau { flat } => {
                if a <= *flat {
                    1.0
                } else {
                    smooth_bump((a - flat) / (1.0 - flat))
                }
            }
            Multiplier::Window { center, width } => smooth_bump((a - center) / width),
            Multiplier::Lacunary { s_prime, coeffs, .. } => {
                let mut acc = 1.0;
                let mut freq = 2.0 * PI;
                for c in coeffs {
                    acc += c * (freq * a).cos();
                    freq *= 2.0;
                }
                (1.0 - a * a).powf(s_prime - 0.5) * acc
            }
        }
    }

    /// Sobolev order the multiplier is claimed to have (`∞` when smooth
    /// apart from a negligible cutoff).
    pub fn sobolev_order(&self) -> f64 {
        match self {
            Multiplier::Poly { p } => *p as f64 + 0.5,
            Multiplier::Lacunary { s_prime, .. } => *s_prime,
            _ => f64::INFINITY,
        }
    }

    /// Largest angular frequency in `τ` worth resolving.
    fn bandwidth(&self) -> f64 {
        match self {
            Multiplier::Window { width, .. } => 20.0 / width,
            Multiplier::Lacunary { coeffs, .. } => 2f64.powi(coeffs.len() as i32) * PI + 40.0,
            Multiplier::Gaussian { t } => 40.0 + 4.0 * t.sqrt(),
            _ => 40.0,
        }
    }
}

impl fmt::Display for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplier::Zero => write!(f, "zero"),
            Multiplier::Gaussian { t } => write!(f, "gauss:t={t}"),
            Multiplier::Poly { p } => write!(f, "poly:p={p}"),
            Multiplier::Smooth => write!(f, "smooth"),
            Multiplier::Plateau { flat } => write!(f, "plateau:flat={flat}"),
            Multiplier::Window { center, width } => write!(f, "window:c={center},w={width}"),
            Multiplier::Lacunary { s_prime, coeffs, seed } => {
                write!(f, "bump:s={s_prime},terms={},seed={seed}", coeffs.len())
            }
        }
    }
}

impl FromStr for Multiplier {
    type Err = Error;

    /// `zero`, `smooth`, `gauss:t=36`, `poly:p=3`, `plateau:flat=0.5`, `window:c=0.5,w=0.05`,
    /// `bump:s=1.6[,terms=14][,seed=0]`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = std::collections::BTreeMap::new();
        for part in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value in multiplier spec, got '{part}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad number '{v}' in multiplier spec")))?;
            kv.insert(k.trim().to_string(), v);
        }
        let get = |k: &str, default: Option<f64>| {
            kv.get(k)
                .copied()
                .or(default)
                .ok_or_else(|| Error::Config(format!("multiplier '{name}' needs '{k}='")))
        };
        let m = match name.trim() {
            "zero" => Multiplier::Zero,
            "smooth" => Multiplier::Smooth,
            "gauss" => Multiplier::Gaussian { t: get("t", Some(36.0))? },
            "poly" => Multiplier::Poly { p: get("p", Some(3.0))? as u32 },
            "plateau" => Multiplier::Plateau { flat: get("flat", Some(0.5))? },
            "window" => Multiplier::Window { center: get("c", Some(0.5))?, width: get("w", Some(0.05))? },
            "bump" => {
                Multiplier::lacunary(get("s", None)?, get("terms", Some(14.0))? as usize, get("seed", Some(0.0))? as u64)
            }
            other => return Err(Error::Config(format!("unknown multiplier '{other}'"))),
        };
        Ok(m)
    }
}

/// `F`, its scaling `α` and the sample count `M` on `τ ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSpec {
    pub f: Multiplier,
    pub s: f64,
    pub alpha: f64,
    pub samples: usize,
}

pub const DEFAULT_SAMPLES: usize = 1 << 17;

impl MultiplierSpec {
    pub fn new(f: Multiplier, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        let s = f.sobolev_order();
        Ok(MultiplierSpec { f, s, alpha, samples: DEFAULT_SAMPLES })
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn step(&self) -> f64 {
        1.0 / self.samples as f64
    }

    /// `F(i/M)` for `i = 0..=M`.
    pub fn sample_values(&self) -> Vec<f64> {
        let h = self.step();
        (0..=self.samples).map(|i| self.f.eval(i as f64 * h)).collect()
    }

    /// `‖F‖_{H^s}² = (1/2π)∫(1+ξ²)^s|F̂(ξ)|² dξ` from the discrete transform.
    pub fn sobolev_norm_sq(&self, s: f64) -> f64 {
        let spec = moment_spectrum(&self.sample_values(), 0, 2);
        let dxi = PI / 2.0;
        let l = spec.len();
        let mut acc = 0.0;
        for (m, v) in spec.iter().enumerate() {
            let k = if m <= l / 2 { m as f64 } else { m as f64 - l as f64 };
            let xi = k * dxi;
            acc += (1.0 + xi * xi).powf(s) * v.norm_sqr();
        }
        acc * dxi / (2.0 * PI)
    }

    /// `|Σ|F|²Δτ - (1/2π)Σ|F̂|²Δξ| / ‖F‖²`, with the trapezoid weights
    /// folded into the samples on both sides.
    pub fn parseval_defect(&self) -> f64 {
        let vals = self.sample_values();
        let direct: f64 = symmetric_samples(&vals).iter().map(|(_, w, f)| (w * f).powi(2)).sum::<f64>() * self.step();
        let spectral = self.sobolev_norm_sq(0.0);
        (direct - spectral).abs() / direct.max(f64::MIN_POSITIVE)
    }
}

/// `(index, trapezoid weight, value)` for `τ_i = i/M`, `i = -M..=M`.
fn symmetric_samples(vals: &[f64]) -> Vec<(i64, f64, f64)> {
    let m = (vals.len() - 1) as i64;
    (-m..=m)
        .map(|i| {
            let w = if i.abs() == m { 0.5 } else { 1.0 };
            (i, w, vals[i.unsigned_abs() as usize])
        })
        .collect()
}

/// `H_j(ρ_m) = ∫_{-1}^{1} F(τ)τ^j e^{iτρ_m} dτ` by the trapezoid rule, for
/// `ρ_m = mπ/P` on an FFT of length `2MP` (`m` taken modulo the length).
fn moment_spectrum(vals: &[f64], j: usize, pad: usize) -> Vec<Complex64> {
    let m = vals.len() - 1;
    let len = 2 * m * pad;
    let h = 1.0 / m as f64;
    let mut buf = vec![Complex64::from(0.0); len];
    for (i, w, f) in symmetric_samples(vals) {
        let tau = i as f64 * h;
        let idx = i.rem_euclid(len as i64) as usize;
        buf[idx] += Complex64::from(w * f * tau.powi(j as i32) * h);
    }
    // inverse DFT carries e^{+2πi·im/L}, i.e. e^{iτ_i ρ_m}
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
    buf
}

/// `G_j(ρ) = ∫₀¹ F(τ)τ^j cos(τρ + jπ/2) dτ` for `j = 0..=order`, by the
/// trapezoid rule on the samples.
fn moments_at(vals: &[f64], order: usize, rho: f64) -> Vec<f64> {
    let m = vals.len() - 1;
    let h = 1.0 / m as f64;
    let step = Complex64::from_polar(1.0, rho * h);
    let mut acc = vec![Complex64::from(0.0); order + 1];
    let mut e = Complex64::from(1.0);
    for (i, &f) in vals.iter().enumerate() {
        if i % 512 == 0 {
            e = Complex64::from_polar(1.0, rho * i as f64 * h);
        }
        let w = if i == 0 || i == m { 0.5 } else { 1.0 };
        if f != 0.0 {
            let tau = i as f64 * h;
            let mut p = w * f;
            for a in acc.iter_mut() {
                *a += e * p;
                p *= tau;
            }
        }
        e *= step;
    }
    let mut ij = Complex64::from(1.0);
    acc.iter()
        .map(|a| {
            let v = (ij * a).re * h;
            ij *= Complex64::i();
            v
        })
        .collect()
}

fn d_kernel(n: usize) -> Result<SymbolicRadialKernel> {
    crate::kernels::check_n(n)?;
    Ok(SymbolicRadialKernel::d_power(n, Phase::Plus))
}

/// Sample count needed so that `Δσ·R_max < π/4`.
pub fn required_samples(alpha: f64, r_max: f64) -> usize {
    (4.0 * r_max / (PI * alpha)).floor() as usize + 1
}

/// `K_α(r) = ∫₀^∞ F(ασ) dE(σ)(r) dσ`, computed as `(1/π)·D^k C` with
/// `C(r) = ∫₀^∞ F(ασ)cos(σr) dσ` and its derivatives taken from the
/// samples of `F`.
pub fn multiplier_kernel(n: usize, spec: &MultiplierSpec, grid: &[f64]) -> Result<RadialProfile> {
    let kern = d_kernel(n)?;
    let r_max = grid.iter().fold(0.0f64, |m, r| m.max(*r));
    let need = required_samples(spec.alpha, r_max);
    if spec.samples < need {
        return Err(Error::Resolution(format!(
            "Nyquist check Δσ·R_max < π/4 fails for α = {}, R_max = {r_max}: need at least {need} samples, have {}",
            spec.alpha, spec.samples
        )));
    }
    let vals = spec.sample_values();
    let order = kern.max_order();
    let alpha = spec.alpha;
    let values = grid
        .iter()
        .map(|&r| {
            let g = moments_at(&vals, order, r / alpha);
            let base: Vec<f64> = g.iter().enumerate().map(|(j, v)| v * alpha.powi(-1 - j as i32)).collect();
            kern.eval_on_base(r, &base) / PI
        })
        .collect();
    RadialProfile::new(n, grid.to_vec(), values)
}

/// The same kernel as an adaptive Gauss–Kronrod integral of
/// `F(ασ)·dE(σ)(r)` over `σ ∈ [0, 1/α]`, split into panels shorter than the
/// oscillation period.
pub fn multiplier_kernel_direct(n: usize, f: &Multiplier, alpha: f64, r: f64) -> Result<f64> {
    crate::kernels::check_n(n)?;
    let top = 1.0 / alpha;
    let panels = ((r * top + f.bandwidth()) / PI).ceil() as usize + 8;
    let h = top / panels as f64;
    let integrand = |s: f64| f.eval(alpha * s) * spectral_measure(n, s, r).unwrap_or(0.0);
    let gl = GaussLegendre::new(8);
    let scale: f64 = (0..panels)
        .map(|p| gl.integrate(p as f64 * h, (p + 1) as f64 * h, |s| integrand(s).abs()))
        .sum();
    let tol = 1e-14 * scale / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let (v, _) = adaptive(p as f64 * h, (p + 1) as f64 * h, tol, 1e-13, 64, integrand);
        acc += v;
    }
    Ok(acc)
}

/// `‖K_α‖` in `L²({r ≥ 1}, area·(sinh r)^n dr)` for each `α`.
///
/// The moments `G_j` do not depend on `α`, so they are computed once on a
/// uniform `ρ`-grid by FFT and rescaled with `r = αρ`.
pub fn far_diagonal_norms(n: usize, f: &Multiplier, alphas: &[f64], samples: usize) -> Result<Vec<f64>> {
    let kern = d_kernel(n)?;
    let order = kern.max_order();
    let spec = MultiplierSpec { f: f.clone(), s: f.sobolev_order(), alpha: 1.0, samples };
    let vals = spec.sample_values();
    let pad = 8;
    let drho = PI / pad as f64;
    let spectra: Vec<Vec<Complex64>> = (0..=order).map(|j| moment_spectrum(&vals, j, pad)).collect();
    let usable = spectra[0].len() / 2;
    let mut ij = vec![Complex64::from(1.0); order + 1];
    for j in 1..=order {
        ij[j] = ij[j - 1] * Complex64::i();
    }
    let g_at = |m: usize| -> Vec<f64> { (0..=order).map(|j| 0.5 * (ij[j] * spectra[j][m]).re).collect() };
    let area = sphere_area(n);
    let gl = GaussLegendre::new(6);
    alphas
        .iter()
        .map(|&alpha| {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
            }
            let density = |r: f64, g: &[f64]| {
                let base: Vec<f64> = g.iter().enumerate().map(|(j, v)| v * alpha.powi(-1 - j as i32)).collect();
                let k = kern.eval_on_base(r, &base) / PI;
                k * k * r.sinh().powi(n as i32)
            };
            // stop where sinh^n overflows or the spectrum runs out
            let r_cap = (600.0 / n as f64).min(alpha * drho * (usable - 1) as f64);
            let m0 = (1.0 / (alpha * drho)).ceil() as usize;
            let m1 = ((r_cap / (alpha * drho)).floor() as usize).max(m0);
            // trapezoid with Gregory end weights at the left end
            const GREGORY: [f64; 3] = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];
            let mut acc = 0.0;
            for m in m0..=m1 {
                let w = GREGORY.get(m - m0).copied().unwrap_or(1.0);
                acc += w * density(alpha * drho * m as f64, &g_at(m));
            }
            acc *= alpha * drho;
            // sliver between r = 1 and the first grid point
            let r0 = alpha * drho * m0 as f64;
            if r0 > 1.0 {
                acc += gl.integrate(1.0, r0, |r: f64| density(r, &moments_at(&vals, order, r / alpha)));
            }
            Ok((area * acc).sqrt())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::kernels::heat_kernel_h3;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["zero", "smooth", "gauss:t=36", "poly:p=3", "plateau:flat=0.5", "window:c=0.5,w=0.05", "bump:s=1.6,terms=14,seed=3"] {
            let m: Multiplier = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
            assert_eq!(m.to_string().parse::<Multiplier>().unwrap(), m);
        }
        assert!("bump".parse::<Multiplier>().is_err());
        assert!("nope".parse::<Multiplier>().is_err());
    }

    #[test]
    fn support_and_evenness() {
        let fs = [Multiplier::Poly { p: 3 }, Multiplier::Smooth, Multiplier::lacunary(1.6, 14, 1)];
        for f in &fs {
            assert_eq!(f.eval(1.0), 0.0);
            assert_eq!(f.eval(-1.3), 0.0);
            for i in 0..50 {
                let t = i as f64 / 50.0;
                assert_eq!(f.eval(t), f.eval(-t));
            }
        }
    }

    #[test]
    fn lacunary_coefficients_are_seeded() {
        assert_eq!(Multiplier::lacunary(1.6, 14, 9), Multiplier::lacunary(1.6, 14, 9));
        assert_ne!(Multiplier::lacunary(1.6, 14, 9), Multiplier::lacunary(1.6, 14, 10));
        if let Multiplier::Lacunary { coeffs, .. } = Multiplier::lacunary(1.6, 14, 9) {
            for (k, c) in coeffs.iter().enumerate() {
                let g = c * (2f64.powi(k as i32 + 1) * PI).powf(1.6);
                assert!((0.5 - 1e-12..=1.5 + 1e-12).contains(&g));
            }
        }
    }

    #[test]
    fn parseval_on_the_line() {
        for f in [Multiplier::Poly { p: 3 }, Multiplier::lacunary(1.6, 10, 2)] {
            let spec = MultiplierSpec::new(f, 1.0).unwrap().with_samples(1 << 12);
            assert!(spec.parseval_defect() < 1e-8);
        }
    }

    #[test]
    fn sobolev_norm_of_poly_bump() {
        // ∫(1-τ²)⁶ over [-1, 1]
        let spec = MultiplierSpec::new(Multiplier::Poly { p: 3 }, 1.0).unwrap().with_samples(1 << 12);
        assert!((spec.sobolev_norm_sq(0.0) - 2048.0 / 3003.0).abs() < 1e-8);
        assert!(spec.sobolev_norm_sq(1.5) > spec.sobolev_norm_sq(1.0));
        assert!(spec.sobolev_norm_sq(3.0).is_finite());
    }

    #[test]
    fn gaussian_multiplier_reproduces_heat_kernel() {
        // F(τ) = e^{-36τ²} at α = 1/6 is e^{-σ²}
        let spec = MultiplierSpec::new(Multiplier::Gaussian { t: 36.0 }, 1.0 / 6.0).unwrap().with_samples(1 << 12);
        let grid = vec![0.1, 0.5, 1.0, 2.0, 5.0];
        let k = multiplier_kernel(2, &spec, &grid).unwrap();
        for (r, v) in grid.iter().zip(&k.values) {
            let exact = heat_kernel_h3(1.0, *r);
            assert!((v - exact).abs() < 1e-10 * heat_kernel_h3(1.0, 0.0), "r={r}: {v} vs {exact}");
        }
    }

    #[test]
    fn routes_agree() {
        for f in [Multiplier::Gaussian { t: 36.0 }, Multiplier::Poly { p: 3 }, Multiplier::lacunary(1.6, 8, 0)] {
            for alpha in [1.0, 0.25] {
                let spec = MultiplierSpec::new(f.clone(), alpha).unwrap().with_samples(1 << 14);
                let rs = [0.3, 1.7, 4.0];
                let k = multiplier_kernel(2, &spec, &rs).unwrap();
                let direct: Vec<f64> = rs.iter().map(|&r| multiplier_kernel_direct(2, &f, alpha, r).unwrap()).collect();
                let scale = direct.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                for (a, b) in k.values.iter().zip(&direct) {
                    assert!((a - b).abs() < 1e-6 * scale, "{f} α={alpha}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn rough_bump_norms_stay_bounded() {
        let alphas: Vec<f64> = (0..=6).map(|k| 2f64.powi(-k)).collect();
        let norms = far_diagonal_norms(2, &Multiplier::lacunary(1.7, 10, 0), &alphas, 1 << 14).unwrap();
        let (lo, hi) = norms.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        assert!(hi / lo < 10.0, "{norms:?}");
        let smooth = far_diagonal_norms(2, &Multiplier::Poly { p: 3 }, &alphas, 1 << 14).unwrap();
        assert!(smooth[6] < smooth[2]);
    }

    #[test]
    fn nyquist_violation_names_sample_count() {
        let spec = MultiplierSpec::new(Multiplier::Smooth, 1.0 / 1024.0).unwrap().with_samples(1024);
        match multiplier_kernel(2, &spec, &[1.0, 40.0]) {
            Err(Error::Resolution(msg)) => assert!(msg.contains(&required_samples(1.0 / 1024.0, 40.0).to_string())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn envelope_decays_like_e_to_minus_r() {
        let spec = MultiplierSpec::new(Multiplier::Window { center: 0.95, width: 0.005 }, 1.0).unwrap().with_samples(1 << 12);
        let grid = GridSpec::lin(4.0, 60.0, 20001).points();
        let k = multiplier_kernel(2, &spec, &grid).unwrap();
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for i in 1..k.values.len() - 1 {
            let (a, b, c) = (k.values[i - 1].abs(), k.values[i].abs(), k.values[i + 1].abs());
            if b > a && b >= c {
                xs.push(k.grid[i]);
                ys.push(b.ln());
            }
        }
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let slope = sxy / sxx;
        assert!(xs.len() > 10 && (slope + 1.0).abs() < 0.05, "slope {slope} from {} peaks", xs.len());
    }

    #[test]
    fn far_diagonal_norm_matches_direct_quadrature() {
        let f = Multiplier::Poly { p: 3 };
        let alpha = 0.5;
        let norms = far_diagonal_norms(2, &f, &[alpha], 1 << 12).unwrap();
        let spec = MultiplierSpec::new(f, alpha).unwrap().with_samples(1 << 12);
        let grid = GridSpec::lin(1.0, 30.0, 6001).points();
        let k = multiplier_kernel(2, &spec, &grid).unwrap();
        let mut acc = 0.0;
        for i in 1..grid.len() {
            let d = |j: usize| k.values[j].powi(2) * grid[j].sinh().powi(2);
            acc += 0.5 * (grid[i] - grid[i - 1]) * (d(i) + d(i - 1));
        }
        let direct = (4.0 * PI * acc).sqrt();
        assert!((norms[0] - direct).abs() < 1e-4 * direct, "{} vs {direct}", norms[0]);
    }
}
