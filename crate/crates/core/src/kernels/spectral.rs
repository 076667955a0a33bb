use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::symbolic::{Phase, SymbolicRadialKernel};
use crate::error::{Error, Result};
use crate::special::{gaussian_derivatives, r_over_sinh, sinc};

pub const MAX_SIGMA_DERIVATIVE: usize = 6;
const SERIES_TERMS: usize = 40;

/// Which boundary value of the resolvent is meant for real `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `R(σ + i0)`, continued from `Im σ > 0`.
    Outgoing,
    /// `R(σ - i0)`, continued from `Im σ < 0`.
    Incoming,
}

pub(crate) fn check_n(n: usize) -> Result<usize> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::Unsupported(format!(
            "closed-form kernels need even boundary dimension n >= 2, got {n}"
        )));
    }
    Ok(n / 2)
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("radius must be positive and finite, got {r}")));
    }
    Ok(())
}

/// Resolvent kernel `(Δ - n²/4 - σ²)⁻¹` on `H^{n+1}` at geodesic distance `r`.
///
/// Outgoing: `-(1/(2iσ))·D^k e^{iσr}`; incoming: `(1/(2iσ))·D^k e^{-iσr}`,
/// i.e. the outgoing formula at `-σ`.
pub fn resolvent_kernel(n: usize, sigma: Complex64, side: Side, r: f64) -> Result<Complex64> {
    check_n(n)?;
    check_r(r)?;
    if sigma.norm() == 0.0 {
        return Err(Error::domain("sigma = 0 is the bottom of the continuous spectrum"));
    }
    let conflict = match side {
        Side::Outgoing => sigma.im < 0.0,
        Side::Incoming => sigma.im > 0.0,
    };
    if conflict {
        return Err(Error::domain(format!("Im sigma = {} is on the wrong side for {side:?}", sigma.im)));
    }
    let two_i_sigma = Complex64::i() * sigma * 2.0;
    Ok(match side {
        Side::Outgoing => -SymbolicRadialKernel::d_power(n, Phase::Plus).eval(sigma, r) / two_i_sigma,
        Side::Incoming => SymbolicRadialKernel::d_power(n, Phase::Minus).eval(sigma, r) / two_i_sigma,
    })
}

/// `(σ/(πi))·(R(σ+i0) - R(σ-i0))` from the two resolvent boundary values.
pub fn stone_formula(n: usize, sigma: f64, r: f64) -> Result<f64> {
    let s = Complex64::new(sigma, 0.0);
    let jump = resolvent_kernel(n, s, Side::Outgoing, r)? - resolvent_kernel(n, s, Side::Incoming, r)?;
    Ok((jump * sigma / (Complex64::i() * PI)).re)
}

/// Spectral measure kernel `dE(σ)(r) = (1/π)·D^k cos(σr)`.
pub fn spectral_measure(n: usize, sigma: f64, r: f64) -> Result<f64> {
    spectral_measure_deriv(n, 0, sigma, r)
}

/// `(d/dσ)^j dE(σ)(r)` for `j ≤ 6`.
pub fn spectral_measure_deriv(n: usize, j: usize, sigma: f64, r: f64) -> Result<f64> {
    let k = check_n(n)?;
    if j > MAX_SIGMA_DERIVATIVE {
        return Err(Error::Unsupported(format!(
            "sigma-derivative order {j} exceeds the cap {MAX_SIGMA_DERIVATIVE}"
        )));
    }
    if !(sigma > 0.0) {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    check_r(r)?;
    if r < 1e-12 || (k >= 2 && r < 0.5 && sigma * r < 4.0) {
        return Ok(series_at_origin(k, j, sigma, r));
    }
    if k == 1 && j == 0 {
        return Ok(sigma * sigma * sinc(sigma * r) * r_over_sinh(r) / (2.0 * PI * PI));
    }
    Ok(symbolic_deriv(k, j, sigma, r) / PI)
}

/// `dE(σ)(0)`, the `r → 0` limit of [`spectral_measure`].
pub(crate) fn spectral_measure_at_origin(n: usize, sigma: f64) -> Result<f64> {
    let k = check_n(n)?;
    Ok(series_at_origin(k, 0, sigma, 0.0))
}

/// `Re (d/dσ)^j D^k e^{iσr}`.
fn symbolic_deriv(k: usize, j: usize, sigma: f64, r: f64) -> f64 {
    let kern = SymbolicRadialKernel::d_power(2 * k, Phase::Plus);
    let (u, v) = (1.0 / r.tanh(), 1.0 / r.sinh());
    let ir = Complex64::new(0.0, r);
    let wave = Complex64::new(0.0, sigma * r).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    for (&l, p) in &kern.terms {
        // d^j/dσ^j (iσ)^l e^{iσr} = i^l Σ_q C(j,q) l!/(l-q)! σ^{l-q} (ir)^{j-q} e^{iσr}
        let mut s = Complex64::new(0.0, 0.0);
        for q in 0..=j.min(l) {
            let falling: f64 = ((l - q + 1)..=l).map(|m| m as f64).product();
            s += ir.powu((j - q) as u32) * binomial(j, q) * falling * sigma.powi((l - q) as i32);
        }
        acc += Complex64::i().powu(l as u32) * s * p.eval(u, v);
    }
    (acc * wave * kern.prefactor()).re
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Power series of `(1/π)(d/dσ)^j D^k cos(σr)` in `r²`.
fn series_at_origin(k: usize, j: usize, sigma: f64, r: f64) -> f64 {
    let m_max = SERIES_TERMS + k;
    // (d/dσ)^j cos(σr) = Σ_m (-1)^m σ^{2m-j} r^{2m} / (2m-j)!
    let mut a: Vec<f64> = (0..=m_max)
        .map(|m| {
            if 2 * m < j {
                0.0
            } else {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * sigma.powi((2 * m - j) as i32) / factorial(2 * m - j)
            }
        })
        .collect();
    // sinh r / r = Σ_p r^{2p}/(2p+1)!
    let s: Vec<f64> = (0..=m_max).map(|p| 1.0 / factorial(2 * p + 1)).collect();
    for _ in 0..k {
        // (1/sinh r)∂_r on Σ a_m r^{2m}: first f'/r, then divide by sinh r / r
        let b: Vec<f64> = (0..a.len() - 1).map(|m| 2.0 * (m + 1) as f64 * a[m + 1]).collect();
        let mut c = vec![0.0; b.len()];
        for m in 0..b.len() {
            let conv: f64 = (1..=m).map(|p| s[p] * c[m - p]).sum();
            c[m] = b[m] - conv;
        }
        a = c.into_iter().map(|v| -v / (2.0 * PI)).collect();
    }
    let t = r * r;
    a.iter().rev().fold(0.0, |acc, c| acc * t + c) / PI
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|m| m as f64).product()
}

/// `(4πt)^{-3/2}·(r/sinh r)·e^{-r²/4t}`, the heat kernel of `H³` after the
/// spectral shift.
pub fn heat_kernel_h3(t: f64, r: f64) -> f64 {
    (4.0 * PI * t).powf(-1.5) * r_over_sinh(r) * (-r * r / (4.0 * t)).exp()
}

/// `∫₀^∞ e^{-tσ²} dE(σ)(r) dσ` evaluated on the contour `Im σ = r/2t`, where
/// the integrand is a Gaussian without oscillation.
pub fn heat_spectral_integral(n: usize, t: f64, r: f64) -> Result<f64> {
    check_n(n)?;
    check_r(r)?;
    if !(t > 0.0) {
        return Err(Error::domain("t must be positive"));
    }
    let kern = SymbolicRadialKernel::d_power(n, Phase::Plus);
    let y = r / (2.0 * t);
    let gauss = (-r * r / (4.0 * t)).exp();
    let width = (40.0 / t).sqrt();
    let (val, _) = crate::quad::adaptive(-width, width, 0.0, 1e-14, 4000, |x| {
        let sigma = Complex64::new(x, y);
        let amp = kern.eval_amplitude(Complex64::i() * sigma, r);
        (amp * (-t * x * x).exp() * gauss).re
    });
    // dE = (1/π) Re D^k e^{iσr} is even in σ: half line = (1/2π)·full line.
    Ok(val / (2.0 * PI))
}

/// `(1/√(2π))·D^k ĝ` with `ĝ(r) = e^{-r²/4t}/√(2t)`.
pub fn heat_recursion(n: usize, t: f64, r: f64) -> Result<f64> {
    check_n(n)?;
    check_r(r)?;
    if !(t > 0.0) {
        return Err(Error::domain("t must be positive"));
    }
    let kern = SymbolicRadialKernel::d_power(n, Phase::Plus);
    let base: Vec<f64> = gaussian_derivatives(1.0 / (4.0 * t), r, kern.max_order())
        .into_iter()
        .map(|d| d / (2.0 * t).sqrt())
        .collect();
    Ok(kern.eval_on_base(r, &base) / (2.0 * PI).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn resolvent_examples() {
        let r = 1.0;
        let v = resolvent_kernel(2, Complex64::new(0.0, 1.0), Side::Outgoing, r).unwrap();
        let expect = (-r).exp() / (4.0 * PI * r.sinh());
        assert!((v - expect).norm() < 1e-16 && v.im.abs() < 1e-17);
        assert!((expect - 0.024906).abs() < 1e-4);
        // the same point reached from below
        let w = resolvent_kernel(2, Complex64::new(0.0, -1.0), Side::Incoming, r).unwrap();
        assert!((w - expect).norm() < 1e-16);
        assert!(resolvent_kernel(2, Complex64::new(1.0, 0.0), Side::Outgoing, 0.0).is_err());
        assert!(resolvent_kernel(2, Complex64::new(1.0, 1.0), Side::Incoming, 1.0).is_err());
        assert!(resolvent_kernel(3, Complex64::new(1.0, 1.0), Side::Outgoing, 1.0).is_err());
    }

    #[test]
    fn resolvent_schwarz_reflection() {
        for n in [2, 4, 6] {
            for s in [Complex64::new(1.5, 0.3), Complex64::new(0.2, 2.0), Complex64::new(3.0, 0.0)] {
                let a = resolvent_kernel(n, s, Side::Outgoing, 0.8).unwrap();
                let b = resolvent_kernel(n, s.conj(), Side::Incoming, 0.8).unwrap();
                assert!((a.conj() - b).norm() <= 1e-14 * a.norm());
            }
        }
    }

    #[test]
    fn resolvent_decay_order() {
        // |R(1 + i0)| ~ e^{-r}/(2π) on H³
        let s = Complex64::new(1.0, 0.0);
        for r in [20.0, 30.0] {
            let v = resolvent_kernel(2, s, Side::Outgoing, r).unwrap().norm();
            assert!((v * r.exp() * 2.0 * PI - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn spectral_measure_examples() {
        let v = spectral_measure(2, 2.0, 1.0).unwrap();
        let expect = 2.0 * 2f64.sin() / (2.0 * PI * PI * 1f64.sinh());
        assert!(rel(v, expect) < 1e-15);
        assert!((v - 0.078424).abs() < 1e-4);
        let s: f64 = 3.0;
        assert!(rel(spectral_measure(2, s, 1e-13).unwrap(), s * s / (2.0 * PI * PI)) < 1e-12);
        assert!(spectral_measure(2, 1.0, -1.0).is_err());
    }

    #[test]
    fn stone_matches_closed_form() {
        for sigma in GridSpec::log(0.1, 10.0, 7).points() {
            for r in GridSpec::log(1e-3, 30.0, 9).points() {
                let a = stone_formula(2, sigma, r).unwrap();
                let b = spectral_measure(2, sigma, r).unwrap();
                assert!(rel(a, b) < 1e-12, "sigma={sigma} r={r}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn series_and_closed_form_agree_across_switch() {
        for n in [4, 6] {
            for sigma in [0.3, 2.0, 7.0] {
                let r = 0.5;
                let k = n / 2;
                let a = series_at_origin(k, 0, sigma, r);
                let b = symbolic_deriv(k, 0, sigma, r) / PI;
                assert!(rel(a, b) < 1e-10, "n={n} sigma={sigma}: {a} vs {b}");
                for j in 1..=3 {
                    let a = series_at_origin(k, j, sigma, r);
                    let b = symbolic_deriv(k, j, sigma, r) / PI;
                    assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()), "j={j}");
                }
            }
        }
    }

    #[test]
    fn series_limit_for_n4() {
        // D² cos(σr) at r = 0: σ²(σ² + 1)/(12π²)
        let s: f64 = 1.7;
        let v = spectral_measure(4, s, 1e-13).unwrap();
        let expect = s * s * (s * s + 1.0) / (12.0 * PI * PI) / PI;
        assert!(rel(v, expect) < 1e-12, "{v} vs {expect}");
    }

    #[test]
    fn derivative_examples() {
        let v = spectral_measure_deriv(2, 1, 1.0, 1.0).unwrap();
        let expect = (1f64.sin() + 1f64.cos()) / (2.0 * PI * PI * 1f64.sinh());
        assert!(rel(v, expect) < 1e-14);
        assert!((v - 0.059561).abs() < 1e-4);
        let s = 2.5;
        assert!(rel(spectral_measure_deriv(2, 1, s, 1e-13).unwrap(), s / (PI * PI)) < 1e-10);
        for n in [2, 4] {
            for r in [0.01, 1.0, 3.0] {
                let a = spectral_measure_deriv(n, 0, 1.3, r).unwrap();
                assert!(rel(a, spectral_measure(n, 1.3, r).unwrap()) < 1e-15);
            }
        }
        assert!(matches!(spectral_measure_deriv(2, 7, 1.0, 1.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for n in [2, 4] {
            for j in 1..=4 {
                for (sigma, r) in [(1.0, 1.0), (5.0, 0.3), (2.0, 4.0)] {
                    let h = 1e-4;
                    let f = |s: f64| spectral_measure_deriv(n, j - 1, s, r).unwrap();
                    let fd = (f(sigma - 2.0 * h) - 8.0 * f(sigma - h) + 8.0 * f(sigma + h) - f(sigma + 2.0 * h))
                        / (12.0 * h);
                    let v = spectral_measure_deriv(n, j, sigma, r).unwrap();
                    assert!((v - fd).abs() < 1e-7 * (1.0 + v.abs()), "n={n} j={j} ({sigma},{r}): {v} vs {fd}");
                }
            }
        }
    }

    #[test]
    fn heat_anchor_h3_closed_form() {
        let (t, r) = (1.0, 1.0);
        let exact = heat_kernel_h3(t, r);
        assert!(rel(heat_spectral_integral(2, t, r).unwrap(), exact) < 1e-10);
        assert!(rel(heat_recursion(2, t, r).unwrap(), exact) < 1e-10);
        // and directly on the real axis, with no contour shift
        let (direct, _) = crate::quad::adaptive(0.0, 12.0, 0.0, 1e-13, 4000, |s| {
            (-t * s * s).exp() * spectral_measure(2, s, r).unwrap()
        });
        assert!(rel(direct, exact) < 1e-10);
    }

    #[test]
    fn heat_anchor_routes_agree() {
        for n in [2, 4, 6] {
            for t in [0.1, 1.0] {
                for r in [0.5, 1.0, 5.0] {
                    let a = heat_spectral_integral(n, t, r).unwrap();
                    let b = heat_recursion(n, t, r).unwrap();
                    assert!(rel(a, b) < 1e-8, "n={n} t={t} r={r}: {a} vs {b}");
                }
            }
        }
    }
}
