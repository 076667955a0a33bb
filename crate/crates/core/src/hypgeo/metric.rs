use crate::error::{Error, Result};

/// `g0(x, y)` together with its first derivatives, all `n × n` row-major.
#[derive(Debug, Clone)]
pub struct G0Sample {
    pub g0: Vec<f64>,
    pub d_x: Vec<f64>,
    pub d_y: Vec<Vec<f64>>,
}

/// The inverse `h = g0⁻¹` and its first derivatives.
#[derive(Debug, Clone)]
pub struct InverseSample {
    pub h: Vec<f64>,
    pub d_x: Vec<f64>,
    pub d_y: Vec<Vec<f64>>,
}

/// Smooth compactly supported bump `exp(1 - 1/(1 - s))`, `s = |z - c|²/R²`,
/// on the full coordinate vector `z = (x, y)`. Equal to 1 at the center.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub amplitude: f64,
    /// `(x_c, y_c1, ..., y_cn)`.
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Bump {
    /// Value and gradient with respect to `(x, y)`.
    fn eval(&self, x: f64, y: &[f64]) -> (f64, Vec<f64>) {
        let dim = y.len() + 1;
        let mut diff = Vec::with_capacity(dim);
        diff.push(x - self.center[0]);
        diff.extend(y.iter().zip(&self.center[1..]).map(|(a, c)| a - c));
        let r2 = self.radius * self.radius;
        let s: f64 = diff.iter().map(|d| d * d).sum::<f64>() / r2;
        if s >= 1.0 {
            return (0.0, vec![0.0; dim]);
        }
        let one_minus = 1.0 - s;
        let b = (1.0 - 1.0 / one_minus).exp();
        let ds = -b / (one_minus * one_minus);
        let grad = diff.iter().map(|d| ds * 2.0 * d / r2).collect();
        (b, grad)
    }
}

/// Asymptotically hyperbolic metric `(dx² + g0(x, y; dy))/x²` on the
/// half-space. `g0 = (1 + a·bump)·Id`, which is the exact hyperbolic metric
/// when no bump is present.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpaceMetric {
    n: usize,
    bump: Option<Bump>,
}

impl HalfSpaceMetric {
    pub fn hyperbolic(n: usize) -> Self {
        assert!(n >= 1, "boundary dimension must be positive");
        HalfSpaceMetric { n, bump: None }
    }

    pub fn perturbed(n: usize, bump: Bump) -> Result<Self> {
        if n == 0 {
            return Err(Error::contract("boundary dimension must be positive"));
        }
        if bump.center.len() != n + 1 {
            return Err(Error::contract(format!(
                "bump center needs {} coordinates, got {}",
                n + 1,
                bump.center.len()
            )));
        }
        if bump.amplitude <= -1.0 {
            return Err(Error::contract("bump amplitude must exceed -1 to keep g0 positive"));
        }
        if bump.radius <= 0.0 {
            return Err(Error::contract("bump radius must be positive"));
        }
        Ok(HalfSpaceMetric { n, bump: Some(bump) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bump(&self) -> Option<&Bump> {
        self.bump.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.bump.as_ref().map_or(true, |b| b.amplitude == 0.0)
    }

    /// Outside this Euclidean radius of the origin, `g0` is the identity.
    pub fn support_radius(&self) -> f64 {
        match &self.bump {
            None => 0.0,
            Some(b) => b.center.iter().map(|c| c * c).sum::<f64>().sqrt() + b.radius,
        }
    }

    fn conformal_factor(&self, x: f64, y: &[f64]) -> (f64, Vec<f64>) {
        match &self.bump {
            None => (1.0, vec![0.0; self.n + 1]),
            Some(b) => {
                let (v, g) = b.eval(x, y);
                (1.0 + b.amplitude * v, g.into_iter().map(|d| b.amplitude * d).collect())
            }
        }
    }

    pub fn g0(&self, x: f64, y: &[f64]) -> G0Sample {
        let n = self.n;
        let (c, grad) = self.conformal_factor(x, y);
        let diag = |v: f64| {
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                m[i * n + i] = v;
            }
            m
        };
        G0Sample {
            g0: diag(c),
            d_x: diag(grad[0]),
            d_y: (0..n).map(|i| diag(grad[i + 1])).collect(),
        }
    }

    /// `h = g0⁻¹` and its derivatives, using `∂h = -h (∂g0) h`.
    pub fn inverse(&self, x: f64, y: &[f64]) -> InverseSample {
        let n = self.n;
        let s = self.g0(x, y);
        let h = invert_spd(&s.g0, n);
        let conj = |d: &[f64]| {
            let t = matmul(&h, d, n);
            let mut out = matmul(&t, &h, n);
            out.iter_mut().for_each(|v| *v = -*v);
            out
        };
        InverseSample {
            d_x: conj(&s.d_x),
            d_y: s.d_y.iter().map(|d| conj(d)).collect(),
            h,
        }
    }
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// Gauss–Jordan inverse; `g0` is SPD so no pivoting is needed.
fn invert_spd(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let p = m[col * n + col];
        for j in 0..n {
            m[col * n + j] /= p;
            inv[col * n + j] /= p;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = m[row * n + col];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                m[row * n + j] -= f * m[col * n + j];
                inv[row * n + j] -= f * inv[col * n + j];
            }
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bumped(n: usize) -> HalfSpaceMetric {
        let mut center = vec![0.5];
        center.extend(std::iter::repeat(0.1).take(n));
        HalfSpaceMetric::perturbed(n, Bump { amplitude: 0.3, center, radius: 0.4 }).unwrap()
    }

    #[test]
    fn identity_outside_support() {
        let m = bumped(2);
        let r = m.support_radius();
        let s = m.g0(r + 0.01, &[0.0, 0.0]);
        assert_eq!(s.g0, vec![1.0, 0.0, 0.0, 1.0]);
        assert!(s.d_x.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn g0_is_positive_definite_on_probes() {
        let m = HalfSpaceMetric::perturbed(
            2,
            Bump { amplitude: -0.9, center: vec![0.5, 0.0, 0.0], radius: 0.4 },
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let x = rng.gen_range(0.0..1.0);
            let y = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let s = m.g0(x, &y);
            assert!(s.g0[0] > 0.0 && s.g0[3] > 0.0);
            assert_eq!(s.g0[1], s.g0[2]);
        }
    }

    #[test]
    fn derivatives_match_central_differences() {
        let m = bumped(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 1e-6;
        let mut checked = 0;
        while checked < 50 {
            let x = rng.gen_range(0.2..0.8);
            let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.2..0.4)).collect();
            let s = m.g0(x, &y);
            if s.g0[0] == 1.0 {
                continue;
            }
            checked += 1;
            let scale = s.d_x.iter().chain(s.d_y.iter().flatten()).fold(1e-3f64, |a, v| a.max(v.abs()));
            let fd_x: Vec<f64> = m
                .g0(x + h, &y)
                .g0
                .iter()
                .zip(&m.g0(x - h, &y).g0)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect();
            for (a, b) in s.d_x.iter().zip(&fd_x) {
                assert!((a - b).abs() <= 1e-6 * scale, "{a} vs {b}");
            }
            for i in 0..3 {
                let mut yp = y.clone();
                let mut ym = y.clone();
                yp[i] += h;
                ym[i] -= h;
                let (gp, gm) = (m.g0(x, &yp).g0, m.g0(x, &ym).g0);
                for k in 0..9 {
                    let fd = (gp[k] - gm[k]) / (2.0 * h);
                    assert!((s.d_y[i][k] - fd).abs() <= 1e-6 * scale);
                }
            }
        }
    }

    #[test]
    fn inverse_derivative_matches_finite_difference() {
        let m = bumped(2);
        let (x, y) = (0.55, [0.05, 0.2]);
        let inv = m.inverse(x, &y);
        let s = m.g0(x, &y);
        assert!((inv.h[0] * s.g0[0] - 1.0).abs() < 1e-15);
        let h = 1e-6;
        let fd = (m.inverse(x + h, &y).h[0] - m.inverse(x - h, &y).h[0]) / (2.0 * h);
        assert!((inv.d_x[0] - fd).abs() < 1e-7);
    }

    #[test]
    fn rejects_bad_bumps() {
        assert!(HalfSpaceMetric::perturbed(2, Bump { amplitude: 0.1, center: vec![0.5], radius: 0.1 }).is_err());
        assert!(HalfSpaceMetric::perturbed(1, Bump { amplitude: -1.5, center: vec![0.5, 0.0], radius: 0.1 }).is_err());
    }

    #[test]
    fn invert_general_spd() {
        let a = vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];
        let inv = invert_spd(&a, 3);
        let p = matmul(&a, &inv, 3);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((p[i * 3 + j] - e).abs() < 1e-14);
            }
        }
    }
}
