use super::geodesic::{log_rhs, quad_form, ZeroPhasePoint};
use super::ode::{dopri5, OdeOptions};
use crate::error::{Error, Result};
use crate::hypgeo::{hyperbolic_distance, HalfSpaceMetric, PointPair};

/// Covector at `p` of the exact hyperbolic geodesic reaching `q` at time 1.
fn hyperbolic_seed(pair: &PointPair) -> Result<Vec<f64>> {
    let (x0, x1) = (pair.p.x, pair.q.x);
    let n = pair.p.y.len();
    let dy: Vec<f64> = pair.q.y.iter().zip(&pair.p.y).map(|(a, b)| a - b).collect();
    let dist = dy.iter().map(|v| v * v).sum::<f64>().sqrt();
    let len = hyperbolic_distance(pair)?;
    let mut w = vec![0.0; n + 1];
    if dist == 0.0 {
        w[0] = if x1 >= x0 { len } else { -len };
        return Ok(w);
    }
    let sc = (dist * dist + x1 * x1 - x0 * x0) / (2.0 * dist);
    let radius = (sc * sc + x0 * x0).sqrt();
    w[0] = len * sc / radius;
    for i in 0..n {
        w[i + 1] = len * (x0 / radius) * dy[i] / dist;
    }
    Ok(w)
}

/// Endpoint mismatch `(ln x(1) - ln x', y(1) - y')` for initial covector `w`.
fn mismatch(metric: &HalfSpaceMetric, pair: &PointPair, w: &[f64], tol: f64) -> Result<Vec<f64>> {
    let start = ZeroPhasePoint::new(pair.p.x, pair.p.y.clone(), w[0], w[1..].to_vec());
    let sol = dopri5(
        |_, v| log_rhs(metric, v),
        0.0,
        &start.to_log_state(),
        1.0,
        &OdeOptions::with_tol(tol),
        |_, _| false,
    )?;
    let end = sol.last().1;
    let n = pair.p.y.len();
    let mut r = Vec::with_capacity(n + 1);
    r.push(end[0] - pair.q.x.ln());
    r.extend((0..n).map(|i| end[1 + i] - pair.q.y[i]));
    Ok(r)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Dense solve with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Geodesic distance by shooting on the time-1 flow from `p` to `q`.
pub fn shoot_distance(metric: &HalfSpaceMetric, pair: &PointPair, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::contract("tolerance must be positive"));
    }
    hyperbolic_distance(pair)?;
    if pair.p == pair.q {
        return Ok(0.0);
    }
    if pair.p.y.len() != metric.n() {
        return Err(Error::contract("point dimension does not match the metric"));
    }
    let inner_tol = (tol * 1e-4).max(1e-13);
    let mut w = hyperbolic_seed(pair)?;
    let mut r = mismatch(metric, pair, &w, inner_tol)?;
    let mut res = norm(&r);
    let target = tol * 1e-3;
    let dim = w.len();
    for _ in 0..60 {
        if res <= target {
            break;
        }
        let scale = norm(&w).max(1.0);
        let step = 1e-7 * scale;
        let mut jac = vec![vec![0.0; dim]; dim];
        for k in 0..dim {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[k] += step;
            wm[k] -= step;
            let (rp, rm) = (mismatch(metric, pair, &wp, inner_tol)?, mismatch(metric, pair, &wm, inner_tol)?);
            for i in 0..dim {
                jac[i][k] = (rp[i] - rm[i]) / (2.0 * step);
            }
        }
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let dw = solve(jac, neg).ok_or(Error::Convergence { residual: res })?;
        let mut damp = 1.0;
        loop {
            let trial: Vec<f64> = w.iter().zip(&dw).map(|(a, b)| a + damp * b).collect();
            match mismatch(metric, pair, &trial, inner_tol) {
                Ok(rt) if norm(&rt) < res => {
                    w = trial;
                    r = rt;
                    res = norm(&r);
                    break;
                }
                _ => {
                    damp *= 0.5;
                    if damp < 1e-6 {
                        return Err(Error::Convergence { residual: res });
                    }
                }
            }
        }
    }
    if res > target.max(1e-10) {
        return Err(Error::Convergence { residual: res });
    }
    let h = metric.inverse(pair.p.x, &pair.p.y).h;
    Ok((w[0] * w[0] + quad_form(&h, &w[1..])).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypgeo::{Bump, Point};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair(p: (f64, Vec<f64>), q: (f64, Vec<f64>)) -> PointPair {
        PointPair::new(Point::new(p.0, p.1), Point::new(q.0, q.1))
    }

    #[test]
    fn vertical_and_horizontal() {
        let m = HalfSpaceMetric::hyperbolic(1);
        let d = shoot_distance(&m, &pair((1.0, vec![0.0]), (std::f64::consts::E, vec![0.0])), 1e-9).unwrap();
        assert!((d - 1.0).abs() < 1e-8);
        let m = HalfSpaceMetric::hyperbolic(2);
        let d = shoot_distance(&m, &pair((1.0, vec![0.0, 0.0]), (1.0, vec![1.0, 0.0])), 1e-9).unwrap();
        assert!((d - 1.5f64.acosh()).abs() < 1e-6);
    }

    #[test]
    fn coincident_points() {
        let m = HalfSpaceMetric::hyperbolic(2);
        let p = (0.3, vec![0.1, 0.2]);
        assert_eq!(shoot_distance(&m, &pair(p.clone(), p), 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn zero_amplitude_bump_is_exact() {
        let m = HalfSpaceMetric::perturbed(2, Bump { amplitude: 0.0, center: vec![0.5, 0.0, 0.0], radius: 0.4 })
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let mut pt = || (rng.gen_range(0.2..1.5), vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            let pq = pair(pt(), pt());
            let d = shoot_distance(&m, &pq, 1e-9).unwrap();
            let exact = hyperbolic_distance(&pq).unwrap();
            assert!((d - exact).abs() <= 1e-6 * exact.max(1e-3));
        }
    }

    #[test]
    fn perturbed_distance_is_symmetric() {
        let m = HalfSpaceMetric::perturbed(2, Bump { amplitude: 0.2, center: vec![0.6, 0.0, 0.0], radius: 0.4 })
            .unwrap();
        let pq = pair((0.4, vec![-0.5, 0.1]), (0.8, vec![0.4, -0.1]));
        let a = shoot_distance(&m, &pq, 1e-9).unwrap();
        let b = shoot_distance(&m, &pq.swapped(), 1e-9).unwrap();
        assert!((a - b).abs() < 1e-6);
        assert!(a > hyperbolic_distance(&pq).unwrap());
    }
}
