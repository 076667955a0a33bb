//! Dormand–Prince 5(4) with the standard continuous extension.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        OdeOptions { rtol: tol, atol: tol * 1e-3, h_init: 1e-3, h_min: 1e-14, max_steps: 2_000_000 }
    }
}

/// One accepted step with its interpolation coefficients.
#[derive(Debug, Clone)]
pub struct Segment {
    pub t0: f64,
    pub h: f64,
    rcont: [Vec<f64>; 5],
}

impl Segment {
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        (0..r1.len())
            .map(|i| r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i]))))
            .collect()
    }

    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }
}

#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub ts: Vec<f64>,
    pub ys: Vec<Vec<f64>>,
    pub segments: Vec<Segment>,
    /// True when the stop predicate fired before the end of the span.
    pub stopped: bool,
}

impl OdeSolution {
    pub fn last(&self) -> (f64, &[f64]) {
        (*self.ts.last().unwrap(), self.ys.last().unwrap())
    }

    /// Dense output at `t` inside the integrated span.
    pub fn at(&self, t: f64) -> Option<Vec<f64>> {
        let fwd = self.segments.first().map_or(true, |s| s.h > 0.0);
        let idx = self.segments.partition_point(|s| if fwd { s.t1() < t } else { s.t1() > t });
        let seg = self.segments.get(idx)?;
        let (lo, hi) = if fwd { (seg.t0, seg.t1()) } else { (seg.t1(), seg.t0) };
        let slack = 1e-12 * (1.0 + t.abs());
        (t >= lo - slack && t <= hi + slack).then(|| seg.eval(t))
    }
}

/// Integrate `y' = f(t, y)` from `t0` to `t1` (either direction). The stop
/// predicate is checked after each accepted step.
pub fn dopri5<F, S>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t1: f64,
    opts: &OdeOptions,
    mut stop: S,
) -> Result<OdeSolution>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
    S: FnMut(f64, &[f64]) -> bool,
{
    let dim = y0.len();
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut sol = OdeSolution { ts: vec![t0], ys: vec![y0.to_vec()], segments: Vec::new(), stopped: false };
    if t1 == t0 {
        return Ok(sol);
    }
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = f(t, &y)?;
    let mut h = opts.h_init.min((t1 - t0).abs()) * dir;
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    let mut ytmp = vec![0.0; dim];
    let fail = |t: f64, y: &[f64], reason: String| Error::Integration { t, reason, last_state: y.to_vec() };

    for _ in 0..opts.max_steps {
        if (t1 - t) * dir <= 0.0 {
            return Ok(sol);
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        k[0].clone_from(&k1);
        let mut stage_err = None;
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                ytmp[i] = y[i] + h * acc;
            }
            match f(t + C[s] * h, &ytmp) {
                Ok(v) => k[s] = v,
                Err(e) => {
                    stage_err = Some(e);
                    break;
                }
            }
        }
        // ytmp now holds the 5th-order solution (stage 7 is FSAL).
        let err = if stage_err.is_some() {
            f64::INFINITY
        } else {
            let mut acc = 0.0;
            for i in 0..dim {
                let mut e = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    e += E[j] * kj[i];
                }
                let sc = opts.atol + opts.rtol * y[i].abs().max(ytmp[i].abs());
                acc += (h * e / sc).powi(2);
            }
            (acc / dim as f64).sqrt()
        };
        if err.is_finite() && err <= 1.0 {
            let y_new = ytmp.clone();
            let r2: Vec<f64> = (0..dim).map(|i| y_new[i] - y[i]).collect();
            let r3: Vec<f64> = (0..dim).map(|i| h * k[0][i] - r2[i]).collect();
            let r4: Vec<f64> = (0..dim).map(|i| r2[i] - h * k[6][i] - r3[i]).collect();
            let r5: Vec<f64> = (0..dim)
                .map(|i| h * D.iter().zip(&k).map(|(d, kj)| d * kj[i]).sum::<f64>())
                .collect();
            sol.segments.push(Segment { t0: t, h, rcont: [y.clone(), r2, r3, r4, r5] });
            t += h;
            y = y_new;
            k1.clone_from(&k[6]);
            sol.ts.push(t);
            sol.ys.push(y.clone());
            if stop(t, &y) {
                sol.stopped = true;
                return Ok(sol);
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h *= fac;
            if h.abs() < opts.h_min {
                let reason = match stage_err {
                    Some(e) => format!("step size underflow after stage failure: {e}"),
                    None => "step size underflow".to_string(),
                };
                return Err(fail(t, &y, reason));
            }
        }
    }
    Err(fail(t, &y, format!("exceeded {} steps", opts.max_steps)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let sol = dopri5(|_, y| Ok(vec![y[0]]), 0.0, &[1.0], 5.0, &OdeOptions::with_tol(1e-12), |_, _| false)
            .unwrap();
        let (t, y) = sol.last();
        assert_eq!(t, 5.0);
        assert!((y[0] / 5f64.exp() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dense_output_is_accurate() {
        let sol = dopri5(
            |_, y| Ok(vec![y[1], -y[0]]),
            0.0,
            &[0.0, 1.0],
            10.0,
            &OdeOptions::with_tol(1e-10),
            |_, _| false,
        )
        .unwrap();
        for t in [0.37, 2.0, 7.77, 10.0] {
            let y = sol.at(t).unwrap();
            assert!((y[0] - t.sin()).abs() < 1e-8, "t={t}");
        }
        assert!(sol.at(10.5).is_none());
    }

    #[test]
    fn backward_integration_and_stop() {
        let sol = dopri5(|_, y| Ok(vec![-y[0]]), 0.0, &[1.0], -10.0, &OdeOptions::with_tol(1e-11), |_, y| {
            y[0] > 100.0
        })
        .unwrap();
        assert!(sol.stopped);
        let (t, y) = sol.last();
        assert!(y[0] > 100.0 && t > -10.0);
        let mid = sol.at(-2.0).unwrap();
        assert!((mid[0] - 2f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn failing_rhs_reports_last_state() {
        let res = dopri5(
            |t, y| if t > 1.0 { Err(Error::domain("off chart")) } else { Ok(vec![y[0]]) },
            0.0,
            &[1.0],
            3.0,
            &OdeOptions::with_tol(1e-8),
            |_, _| false,
        );
        match res {
            Err(Error::Integration { last_state, t, .. }) => {
                assert_eq!(last_state.len(), 1);
                assert!(t <= 1.0 + 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }
}
