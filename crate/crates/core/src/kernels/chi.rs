use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{gaussian_derivatives, rgamma};

/// A test function with derivative evaluators up to a fixed order.
pub trait TestFunction: Sync {
    /// `f^{(k)}(x)`; callers never ask beyond `max_order`.
    fn deriv(&self, k: usize, x: f64) -> Complex64;

    /// Closed interval outside of which every derivative vanishes. The right
    /// end may be `+∞`.
    fn support(&self) -> (f64, f64);

    fn max_order(&self) -> usize;
}

/// `e^{-(x-c)²/w²}`, treated as supported where it exceeds `1e-300`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianTest {
    pub center: f64,
    pub width: f64,
}

impl Default for GaussianTest {
    fn default() -> Self {
        GaussianTest { center: 0.0, width: 1.0 }
    }
}

impl TestFunction for GaussianTest {
    fn deriv(&self, k: usize, x: f64) -> Complex64 {
        let a = 1.0 / (self.width * self.width);
        Complex64::from(gaussian_derivatives(a, x - self.center, k)[k])
    }

    fn support(&self) -> (f64, f64) {
        let half = 26.3 * self.width;
        (self.center - half, self.center + half)
    }

    fn max_order(&self) -> usize {
        16
    }
}

/// `(1 - x²)^m` on `[-1, 1]`, which is `C^{m-1}`.
#[derive(Debug, Clone, Copy)]
pub struct PolyBumpTest {
    pub m: u32,
}

impl TestFunction for PolyBumpTest {
    fn deriv(&self, k: usize, x: f64) -> Complex64 {
        if x.abs() >= 1.0 {
            return Complex64::from(0.0);
        }
        // expand (1 - x²)^m = Σ_i C(m,i)(-1)^i x^{2i} and differentiate
        let m = self.m as usize;
        let mut acc = 0.0;
        let mut binom = 1.0;
        for i in 0..=m {
            let p = 2 * i;
            if p >= k {
                let falling: f64 = ((p - k + 1)..=p).map(|q| q as f64).product();
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * binom * falling * x.powi((p - k) as i32);
            }
            binom = binom * (m - i) as f64 / (i + 1) as f64;
        }
        Complex64::from(acc)
    }

    fn support(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }

    fn max_order(&self) -> usize {
        self.m.saturating_sub(1) as usize
    }
}

/// `χ₊^ν ∗ f`, itself a test function supported on `[lo, ∞)`.
pub struct Convolved<'a> {
    pub nu: Complex64,
    pub inner: &'a dyn TestFunction,
}

impl TestFunction for Convolved<'_> {
    fn deriv(&self, k: usize, x: f64) -> Complex64 {
        pair_with_shift(self.nu, self.inner, k, x).expect("derivative order checked by max_order")
    }

    fn support(&self) -> (f64, f64) {
        (self.inner.support().0, f64::INFINITY)
    }

    fn max_order(&self) -> usize {
        let k = regularization_order(self.nu);
        self.inner.max_order().saturating_sub(k)
    }
}

/// The family `χ₊^a = x₊^a/Γ(a+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiPlusFamily {
    pub a: Complex64,
}

impl ChiPlusFamily {
    pub fn new(a: Complex64) -> Self {
        ChiPlusFamily { a }
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        chi_plus_eval(self.a, x)
    }

    pub fn pair(&self, f: &dyn TestFunction, x: f64) -> Result<Complex64> {
        chi_plus_pair(self.a, f, x)
    }
}

/// `x₊^a/Γ(a+1)` for `Re a > -1`.
pub fn chi_plus_eval(a: Complex64, x: f64) -> Result<Complex64> {
    if a.re <= -1.0 {
        return Err(Error::domain(format!(
            "chi_plus_eval needs Re a > -1 (got {a}); use chi_plus_pair for lower orders"
        )));
    }
    if x < 0.0 {
        return Ok(Complex64::from(0.0));
    }
    if x == 0.0 {
        return Ok(if a == Complex64::from(0.0) { Complex64::from(1.0) } else { Complex64::from(0.0) });
    }
    Ok((a * x.ln()).exp() * rgamma(a + 1.0))
}

fn regularization_order(a: Complex64) -> usize {
    if a.re >= 0.0 {
        0
    } else {
        (-a.re).ceil() as usize
    }
}

/// `(χ₊^a ∗ f)(x)`, moving `k = max(0, ⌈-Re a⌉)` derivatives onto `f`.
pub fn chi_plus_pair(a: Complex64, f: &dyn TestFunction, x: f64) -> Result<Complex64> {
    pair_with_shift(a, f, 0, x)
}

/// `(χ₊^a ∗ f^{(extra)})(x)`.
fn pair_with_shift(a: Complex64, f: &dyn TestFunction, extra: usize, x: f64) -> Result<Complex64> {
    let k = regularization_order(a);
    if k + extra > f.max_order() {
        return Err(Error::contract(format!(
            "order {a} needs {} derivatives of the test function, only {} available",
            k + extra,
            f.max_order()
        )));
    }
    let b = a + k as f64;
    let (lo, hi) = f.support();
    // t ranges over [0, ∞) with x - t ∈ [lo, hi]
    let t_hi = x - lo;
    if t_hi <= 0.0 {
        return Ok(Complex64::from(0.0));
    }
    let t_lo = if hi.is_finite() { (x - hi).max(0.0) } else { 0.0 };
    let g = rgamma(b + 1.0);
    let order = k + extra;
    let value = if t_lo == 0.0 {
        // t = u² removes the endpoint singularity of t^b.
        let (v, _) = crate::quad::adaptive(0.0, t_hi.sqrt(), 1e-15, 1e-13, 4000, |u: f64| {
            if u == 0.0 {
                return Complex64::from(0.0);
            }
            let t = u * u;
            (b * t.ln()).exp() * f.deriv(order, x - t) * (2.0 * u)
        });
        v
    } else {
        let (v, _) = crate::quad::adaptive(t_lo, t_hi, 1e-15, 1e-13, 4000, |t: f64| {
            (b * t.ln()).exp() * f.deriv(order, x - t)
        });
        v
    };
    Ok(value * g)
}

/// `(|1/Γ(1+is)|, e^{π|s|/2})`.
pub fn gamma_multiplier_bound(s: f64) -> (f64, f64) {
    (rgamma(Complex64::new(1.0, s)).norm(), (PI * s.abs() / 2.0).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(chi_plus_eval(c(0.0), 2.0).unwrap(), c(1.0));
        assert_eq!(chi_plus_eval(c(0.0), 0.0).unwrap(), c(1.0));
        assert_eq!(chi_plus_eval(c(0.0), -1.0).unwrap(), c(0.0));
        assert!((chi_plus_eval(c(1.0), 2.0).unwrap() - c(2.0)).norm() < 1e-13);
        let v = chi_plus_eval(c(-0.5), 4.0).unwrap();
        assert!((v.re - 0.5 / PI.sqrt()).abs() < 1e-14);
        assert!((v.re - 0.282095).abs() < 5e-7);
        assert!(chi_plus_eval(c(-1.0), 1.0).is_err());
    }

    #[test]
    fn delta_and_heaviside() {
        let f = GaussianTest::default();
        for x in [0.0, 0.7, -1.2] {
            let v = chi_plus_pair(c(-1.0), &f, x).unwrap();
            assert!((v - f.deriv(0, x)).norm() < 1e-8);
        }
        let total = chi_plus_pair(c(0.0), &f, 30.0).unwrap();
        assert!((total.re - PI.sqrt()).abs() < 1e-8);
        // χ₊^{-2} = δ'
        let v = chi_plus_pair(c(-2.0), &f, 0.4).unwrap();
        assert!((v - f.deriv(1, 0.4)).norm() < 1e-8);
    }

    #[test]
    fn pairing_a_half_against_closed_form() {
        // (χ₊^1 ∗ 1_{[-1,1]}·(1-x²)) at x=2 is ∫(2-s)(1-s²) ds over [-1,1]
        let f = PolyBumpTest { m: 1 };
        let v = chi_plus_pair(c(1.0), &f, 2.0).unwrap();
        assert!((v.re - 8.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn semigroup_identity() {
        let f = GaussianTest::default();
        for (mu, nu) in [(0.0, 0.0), (0.5, 0.25), (-0.5, 1.0)] {
            let g = Convolved { nu: c(nu), inner: &f };
            let lhs = chi_plus_pair(c(mu), &g, 1.0).unwrap();
            let rhs = chi_plus_pair(c(mu + nu + 1.0), &f, 1.0).unwrap();
            assert!((lhs - rhs).norm() < 1e-6, "({mu},{nu}): {lhs} vs {rhs}");
        }
    }

    #[test]
    fn complex_orders() {
        let f = GaussianTest::default();
        let a = Complex64::new(-0.5, 2.0);
        let g = Convolved { nu: Complex64::new(0.0, -2.0), inner: &f };
        let lhs = chi_plus_pair(a, &g, 0.5).unwrap();
        let rhs = chi_plus_pair(Complex64::new(0.5, 0.0), &f, 0.5).unwrap();
        assert!((lhs - rhs).norm() < 1e-6, "{lhs} vs {rhs}");
    }

    #[test]
    fn insufficient_smoothness_is_a_contract_error() {
        let f = PolyBumpTest { m: 2 };
        assert!(chi_plus_pair(c(-1.0), &f, 0.0).is_ok());
        assert!(matches!(chi_plus_pair(c(-2.5), &f, 0.0), Err(Error::Contract(_))));
    }

    #[test]
    fn gamma_bound_examples() {
        assert_eq!(gamma_multiplier_bound(0.0), (1.0, 1.0));
        let (l, r) = gamma_multiplier_bound(10.0);
        let exact = ((10.0 * PI).sinh() / (10.0 * PI)).sqrt();
        assert!((l - exact).abs() / exact < 1e-10);
        assert!((l / r - 0.126).abs() < 1e-3);
        assert_eq!(gamma_multiplier_bound(-10.0).0, l);
        for i in -40..=40 {
            let (l, r) = gamma_multiplier_bound(i as f64 * 0.5);
            assert!(l <= r);
        }
    }
}
