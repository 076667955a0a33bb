use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

/// Polynomial in `u = coth r`, `v = csch r`, reduced with `u² = 1 + v²`,
/// so every monomial is `u^a v^b` with `a ∈ {0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UvPoly {
    terms: BTreeMap<(u8, u32), Rational64>,
}

impl UvPoly {
    pub fn one() -> Self {
        Self::monomial(0, 0, Rational64::from_integer(1))
    }

    pub fn monomial(a: u8, b: u32, c: Rational64) -> Self {
        let mut p = UvPoly::default();
        p.add_term(a, b, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `u^a v^b` in canonical form.
    pub fn coeff(&self, a: u8, b: u32) -> Rational64 {
        self.terms.get(&(a, b)).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u8, u32, Rational64)> + '_ {
        self.terms.iter().map(|(&(a, b), &c)| (a, b, c))
    }

    fn add_term(&mut self, a: u8, b: u32, c: Rational64) {
        if c == Rational64::from_integer(0) {
            return;
        }
        if a >= 2 {
            // u^a v^b = u^{a-2} (1 + v²) v^b
            self.add_term(a - 2, b, c);
            self.add_term(a - 2, b + 2, c);
            return;
        }
        let e = self.terms.entry((a, b)).or_default();
        *e += c;
        if *e == Rational64::from_integer(0) {
            self.terms.remove(&(a, b));
        }
    }

    fn add(&mut self, other: &UvPoly) {
        for (a, b, c) in other.terms() {
            self.add_term(a, b, c);
        }
    }

    fn scaled(&self, s: Rational64) -> UvPoly {
        let mut p = UvPoly::default();
        for (a, b, c) in self.terms() {
            p.add_term(a, b, c * s);
        }
        p
    }

    /// `∂_r`, using `∂u = -v²` and `∂v = -uv`.
    pub fn derivative(&self) -> UvPoly {
        let mut p = UvPoly::default();
        for (a, b, c) in self.terms() {
            if a == 1 {
                p.add_term(0, b + 2, -c);
            }
            if b > 0 {
                p.add_term(a + 1, b, -c * Rational64::from_integer(b as i64));
            }
        }
        p
    }

    /// Multiply by `v`.
    pub fn times_v(&self) -> UvPoly {
        UvPoly { terms: self.terms.iter().map(|(&(a, b), &c)| ((a, b + 1), c)).collect() }
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        self.terms()
            .map(|(a, b, c)| {
                let c = *c.numer() as f64 / *c.denom() as f64;
                c * if a == 1 { u } else { 1.0 } * v.powi(b as i32)
            })
            .sum()
    }
}

impl fmt::Display for UvPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (a, b, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if a == 1 {
                write!(f, "·u")?;
            }
            if b > 0 {
                write!(f, "·v^{b}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Plus,
    Minus,
}

impl Phase {
    pub fn sign(self) -> f64 {
        match self {
            Phase::Plus => 1.0,
            Phase::Minus => -1.0,
        }
    }
}

/// `scale·π^{pi_power}·e^{s·iσr}·Σ_j poly_j(coth r, csch r)·(iσ)^j`.
///
/// With `Phase::Plus` the index `j` doubles as the derivative order of a
/// generic radial base function, which is how the same recursion is applied
/// to Gaussians.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicRadialKernel {
    pub n: usize,
    pub phase: Phase,
    pub terms: BTreeMap<usize, UvPoly>,
    pub scale: Rational64,
    pub pi_power: i32,
}

impl SymbolicRadialKernel {
    /// `e^{s·iσr}`.
    pub fn plane_wave(phase: Phase) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(0, UvPoly::one());
        SymbolicRadialKernel { n: 0, phase, terms, scale: Rational64::from_integer(1), pi_power: 0 }
    }

    /// `D^k e^{s·iσr}` with `k = n/2`.
    pub fn d_power(n: usize, phase: Phase) -> Self {
        let mut kern = Self::plane_wave(phase);
        for _ in 0..n / 2 {
            kern = apply_d(&kern);
        }
        kern
    }

    pub fn coefficient(&self, j: usize) -> UvPoly {
        self.terms.get(&j).cloned().unwrap_or_default()
    }

    pub fn max_order(&self) -> usize {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    pub fn term_count(&self) -> usize {
        self.terms.values().map(|p| p.terms.len()).sum()
    }

    pub fn prefactor(&self) -> f64 {
        let s = *self.scale.numer() as f64 / *self.scale.denom() as f64;
        s * std::f64::consts::PI.powi(self.pi_power)
    }

    /// `Σ_j poly_j(u, v)·w^j` times the prefactor, without the phase.
    pub fn eval_amplitude(&self, w: Complex64, r: f64) -> Complex64 {
        let (u, v) = (1.0 / r.tanh(), 1.0 / r.sinh());
        let mut acc = Complex64::new(0.0, 0.0);
        for (&j, p) in &self.terms {
            acc += w.powu(j as u32) * p.eval(u, v);
        }
        acc * self.prefactor()
    }

    pub fn eval(&self, sigma: Complex64, r: f64) -> Complex64 {
        let w = Complex64::i() * sigma;
        let phase = (w * r * self.phase.sign()).exp();
        self.eval_amplitude(w, r) * phase
    }

    /// Apply the expansion to a real base function with derivatives
    /// `base[j] = b^{(j)}(r)`.
    pub fn eval_on_base(&self, r: f64, base: &[f64]) -> f64 {
        let (u, v) = (1.0 / r.tanh(), 1.0 / r.sinh());
        self.terms.iter().map(|(&j, p)| p.eval(u, v) * base[j]).sum::<f64>() * self.prefactor()
    }
}

/// `D = -(1/2π)(1/sinh r)∂_r`, applied exactly.
pub fn apply_d(kernel: &SymbolicRadialKernel) -> SymbolicRadialKernel {
    let s = Rational64::from_integer(match kernel.phase {
        Phase::Plus => 1,
        Phase::Minus => -1,
    });
    let mut terms: BTreeMap<usize, UvPoly> = BTreeMap::new();
    for (&j, p) in &kernel.terms {
        let dp = p.derivative();
        if !dp.is_zero() {
            terms.entry(j).or_default().add(&dp);
        }
        terms.entry(j + 1).or_default().add(&p.scaled(s));
    }
    let terms = terms
        .into_iter()
        .map(|(j, p)| (j, p.times_v()))
        .filter(|(_, p)| !p.is_zero())
        .collect();
    SymbolicRadialKernel {
        n: kernel.n + 2,
        phase: kernel.phase,
        terms,
        scale: kernel.scale * Rational64::new(-1, 2),
        pi_power: kernel.pi_power - 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn q(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    #[test]
    fn single_application() {
        let k = apply_d(&SymbolicRadialKernel::plane_wave(Phase::Plus));
        assert_eq!(k.terms.len(), 1);
        assert_eq!(k.coefficient(1), UvPoly::monomial(0, 1, q(1, 1)));
        assert_eq!((k.scale, k.pi_power), (q(-1, 2), -1));
    }

    #[test]
    fn second_application_coefficients() {
        let k = SymbolicRadialKernel::d_power(4, Phase::Plus);
        // (1/2π)²·(-u v² (iσ) + v² (iσ)²)
        assert_eq!((k.scale, k.pi_power), (q(1, 4), -2));
        assert_eq!(k.coefficient(1), UvPoly::monomial(1, 2, q(-1, 1)));
        assert_eq!(k.coefficient(2), UvPoly::monomial(0, 2, q(1, 1)));
        assert!(k.coefficient(0).is_zero());
    }

    #[test]
    fn zero_stays_zero() {
        let mut k = SymbolicRadialKernel::plane_wave(Phase::Plus);
        k.terms.clear();
        assert!(apply_d(&k).terms.is_empty());
    }

    #[test]
    fn canonical_reduction() {
        let mut p = UvPoly::default();
        p.add_term(2, 0, q(1, 1));
        p.add_term(0, 2, q(-1, 1));
        assert_eq!(p, UvPoly::one());
    }

    #[test]
    fn term_growth_is_bounded() {
        let mut k = SymbolicRadialKernel::plane_wave(Phase::Minus);
        for _ in 0..5 {
            let next = apply_d(&k);
            assert!(next.term_count() <= 3 * k.term_count().max(1));
            k = next;
        }
    }

    /// `f'` by complex step, `g = -(1/2π)(1/sinh)·f'`, then `g'` by a
    /// 5-point stencil on the complex-step values.
    #[test]
    fn d_squared_matches_complex_step_oracle() {
        let (sigma, r) = (2.0, 1.0);
        // cos(σr) and sin(σr) are real-analytic in r; complex-step each.
        let step = 1e-30;
        let d1 = |x: f64| {
            let z = Complex64::new(x, step);
            Complex64::new((z * sigma).cos().im / step, (z * sigma).sin().im / step)
        };
        let g = |x: f64| d1(x) * (-1.0 / (2.0 * PI * x.sinh()));
        let h = 1e-3;
        let dg = (g(r - 2.0 * h) - g(r - h) * 8.0 + g(r + h) * 8.0 - g(r + 2.0 * h)) / (12.0 * h);
        let oracle = dg * (-1.0 / (2.0 * PI * r.sinh()));
        let exact = SymbolicRadialKernel::d_power(4, Phase::Plus).eval(Complex64::new(sigma, 0.0), r);
        assert!((oracle - exact).norm() < 1e-10, "{oracle} vs {exact}");
    }

    #[test]
    fn display_is_readable() {
        let k = SymbolicRadialKernel::d_power(4, Phase::Plus);
        assert_eq!(k.coefficient(1).to_string(), "(-1)·u·v^2");
    }
}
