//! Special functions that the standard library does not provide.

use std::f64::consts::PI;

use num_complex::Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Principal branch of `log Γ(z)` for complex `z` away from the poles.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z)Γ(1-z) = π / sin(πz)
        let s = (Complex64::from(PI) * z).sin();
        Complex64::from(PI.ln()) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z)
    } else {
        let z = z - 1.0;
        let mut x = Complex64::from(LANCZOS_COEF[0]);
        for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
            x += *c / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        Complex64::from(0.5 * (2.0 * PI).ln()) + (z + 0.5) * t.ln() - t + x.ln()
    }
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// `1/Γ(z)`, entire; exactly zero at the nonpositive integers.
pub fn rgamma(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re.fract() == 0.0 {
        if z.re <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if z.re <= 30.0 {
            let fact: f64 = (1..z.re as u64).map(|m| m as f64).product();
            return Complex64::new(1.0 / fact, 0.0);
        }
    }
    (-ln_gamma(z)).exp()
}

/// `arccosh(1 + delta)` for `delta >= 0`, accurate for small `delta`.
pub fn acosh1p(delta: f64) -> f64 {
    (delta + (delta * (delta + 2.0)).sqrt()).ln_1p()
}

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `r / sinh(r)`, equal to 1 at r = 0.
pub fn r_over_sinh(r: f64) -> f64 {
    if r.abs() < 1e-4 {
        let r2 = r * r;
        1.0 - r2 / 6.0 + 7.0 * r2 * r2 / 360.0
    } else {
        r / r.sinh()
    }
}

/// Derivatives `d^j/dr^j exp(-a r^2)` for `j = 0..=order`, via the Hermite
/// recurrence `H_{j+1}(s) = 2 s H_j(s) - 2 j H_{j-1}(s)` with `s = sqrt(a) r`.
pub fn gaussian_derivatives(a: f64, r: f64, order: usize) -> Vec<f64> {
    let sa = a.sqrt();
    let s = sa * r;
    let g = (-a * r * r).exp();
    let mut h = Vec::with_capacity(order + 1);
    h.push(1.0);
    if order >= 1 {
        h.push(2.0 * s);
    }
    for j in 1..order {
        let next = 2.0 * s * h[j] - 2.0 * j as f64 * h[j - 1];
        h.push(next);
    }
    h.iter()
        .enumerate()
        .map(|(j, hj)| (-sa).powi(j as i32) * hj * g)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_at_known_points() {
        assert!((gamma(Complex64::new(5.0, 0.0)).re - 24.0).abs() < 1e-10);
        assert!((gamma(Complex64::new(0.5, 0.0)).re - PI.sqrt()).abs() < 1e-13);
        assert!((gamma(Complex64::new(-0.5, 0.0)).re + 2.0 * PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gamma_modulus_on_imaginary_line() {
        // |Γ(1+iy)|² = πy / sinh(πy)
        for y in [0.3, 1.0, 4.0, 10.0, 30.0] {
            let g = gamma(Complex64::new(1.0, y)).norm();
            let exact = (PI * y / (PI * y).sinh()).sqrt();
            assert!((g - exact).abs() / exact < 1e-12, "y={y}: {g} vs {exact}");
        }
    }

    #[test]
    fn rgamma_vanishes_at_poles() {
        assert_eq!(rgamma(Complex64::new(0.0, 0.0)).norm(), 0.0);
        assert_eq!(rgamma(Complex64::new(-3.0, 0.0)).norm(), 0.0);
        assert!((rgamma(Complex64::new(1.0, 0.0)).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn acosh1p_matches_std() {
        for d in [1e-3, 0.5, 10.0, 1e8] {
            let a = acosh1p(d);
            let b = (1.0 + d).acosh();
            assert!((a - b).abs() <= 1e-12 * b, "{d}");
        }
        // acosh(1+d) = sqrt(2d)(1 - d/12 + 3d²/160 - ...)
        for d in [1e-12f64, 1e-8, 1e-5] {
            let series = (2.0 * d).sqrt() * (1.0 - d / 12.0 + 3.0 * d * d / 160.0);
            assert!((acosh1p(d) - series).abs() <= 1e-14 * series, "{d}");
        }
        // small-argument accuracy: acosh(1+d) ~ sqrt(2d)
        let d = 1e-20;
        assert!((acosh1p(d) - (2.0 * d).sqrt()).abs() / (2.0 * d).sqrt() < 1e-12);
    }

    #[test]
    fn gaussian_derivatives_by_finite_differences() {
        let a = 0.7;
        let r = 0.9;
        let d = gaussian_derivatives(a, r, 3);
        let h = 1e-5;
        let f = |x: f64| (-a * x * x).exp();
        let d1 = (f(r + h) - f(r - h)) / (2.0 * h);
        let d2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
        assert!((d[1] - d1).abs() < 1e-9);
        assert!((d[2] - d2).abs() < 1e-5);
    }
}
