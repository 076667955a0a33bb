use serde::{Deserialize, Serialize};

use super::ode::{dopri5, OdeOptions, OdeSolution};
use crate::error::{Error, Result};
use crate::hypgeo::HalfSpaceMetric;

/// A point `(x, y, λ, μ)` of the 0-cotangent bundle; the covector is
/// `λ dx/x + μ·dy/x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroPhasePoint {
    pub x: f64,
    pub y: Vec<f64>,
    pub lam: f64,
    pub mu: Vec<f64>,
}

/// `(ẋ, ẏ, λ̇, μ̇)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    pub dx: f64,
    pub dy: Vec<f64>,
    pub dlam: f64,
    pub dmu: Vec<f64>,
}

impl ZeroPhasePoint {
    pub fn new(x: f64, y: Vec<f64>, lam: f64, mu: Vec<f64>) -> Self {
        ZeroPhasePoint { x, y, lam, mu }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// `λ² + h^{ij} μ_i μ_j`, twice the Hamiltonian.
    pub fn energy(&self, metric: &HalfSpaceMetric) -> f64 {
        let h = metric.inverse(self.x, &self.y).h;
        self.lam * self.lam + quad_form(&h, &self.mu)
    }

    /// Rescale the fiber onto the unit cosphere.
    pub fn normalized(&self, metric: &HalfSpaceMetric) -> Result<Self> {
        let e = self.energy(metric);
        if !(e > 0.0) || !e.is_finite() {
            return Err(Error::domain("zero covector cannot be normalized"));
        }
        let s = e.sqrt().recip();
        Ok(ZeroPhasePoint {
            x: self.x,
            y: self.y.clone(),
            lam: self.lam * s,
            mu: self.mu.iter().map(|m| m * s).collect(),
        })
    }

    /// Packed `(ln x, y, λ, μ)`, the integrator's state vector.
    pub(crate) fn to_log_state(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.n() + 2);
        v.push(self.x.ln());
        v.extend_from_slice(&self.y);
        v.push(self.lam);
        v.extend_from_slice(&self.mu);
        v
    }

    pub(crate) fn from_log_state(v: &[f64]) -> Self {
        let n = (v.len() - 2) / 2;
        ZeroPhasePoint {
            x: v[0].exp(),
            y: v[1..=n].to_vec(),
            lam: v[n + 1],
            mu: v[n + 2..].to_vec(),
        }
    }
}

pub(crate) fn quad_form(m: &[f64], v: &[f64]) -> f64 {
    let n = v.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += m[i * n + j] * v[i] * v[j];
        }
    }
    acc
}

/// Right-hand side of the geodesic equations in 0-coordinates.
pub fn geodesic_rhs(metric: &HalfSpaceMetric, state: &ZeroPhasePoint) -> Result<Tangent> {
    if !(state.x > 0.0) {
        return Err(Error::domain(format!("x = {} has left the chart", state.x)));
    }
    if state.y.len() != metric.n() || state.mu.len() != metric.n() {
        return Err(Error::contract("state dimension does not match the metric"));
    }
    Ok(rhs_unchecked(metric, state))
}

/// Same formulas without the chart check; valid at `x = 0` too.
pub(crate) fn rhs_unchecked(metric: &HalfSpaceMetric, s: &ZeroPhasePoint) -> Tangent {
    let n = metric.n();
    let inv = metric.inverse(s.x.max(0.0), &s.y);
    let hmu: Vec<f64> = (0..n).map(|i| (0..n).map(|j| inv.h[i * n + j] * s.mu[j]).sum()).collect();
    let hmm = quad_form(&inv.h, &s.mu);
    let dxh = quad_form(&inv.d_x, &s.mu);
    Tangent {
        dx: s.x * s.lam,
        dy: hmu.iter().map(|v| s.x * v).collect(),
        dlam: -(hmm + 0.5 * s.x * dxh),
        dmu: (0..n).map(|i| s.lam * s.mu[i] - 0.5 * s.x * quad_form(&inv.d_y[i], &s.mu)).collect(),
    }
}

/// The flow in `(ln x, y, λ, μ)`, used by every integration.
pub(crate) fn log_rhs(metric: &HalfSpaceMetric, v: &[f64]) -> Result<Vec<f64>> {
    if !v.iter().all(|c| c.is_finite()) {
        return Err(Error::domain("non-finite state"));
    }
    let s = ZeroPhasePoint::from_log_state(v);
    let t = rhs_unchecked(metric, &s);
    let mut out = Vec::with_capacity(v.len());
    out.push(s.lam);
    out.extend(t.dy);
    out.push(t.dlam);
    out.extend(t.dmu);
    Ok(out)
}

/// Ball-model boundary defining function `4x/((1+x)² + |y|²)`, small near
/// every point at infinity including `x → ∞`.
pub fn ball_bdf(x: f64, y: &[f64]) -> f64 {
    let y2: f64 = y.iter().map(|v| v * v).sum();
    4.0 * x / ((1.0 + x) * (1.0 + x) + y2)
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<(f64, ZeroPhasePoint)>,
    pub exit_forward: bool,
    pub exit_backward: bool,
    pub max_constraint_drift: f64,
    solution: OdeSolution,
}

impl Trajectory {
    /// Dense output at any `t` inside the integrated span.
    pub fn at(&self, t: f64) -> Option<ZeroPhasePoint> {
        self.solution.at(t).map(|v| ZeroPhasePoint::from_log_state(&v))
    }

    pub fn end(&self) -> &ZeroPhasePoint {
        &self.samples.last().expect("trajectory has a start").1
    }

    pub fn t_end(&self) -> f64 {
        self.samples.last().expect("trajectory has a start").0
    }
}

#[derive(Debug, Clone)]
pub struct FlowOptions {
    pub tol: f64,
    /// Stop once the ball-model bdf drops below this value.
    pub escape: Option<f64>,
    /// If set, samples are taken at these times instead of at every step.
    pub sample_times: Option<Vec<f64>>,
    /// Renormalize the start onto the unit cosphere.
    pub normalize: bool,
}

impl FlowOptions {
    pub fn new(tol: f64) -> Self {
        FlowOptions { tol, escape: None, sample_times: None, normalize: true }
    }
}

pub fn integrate(
    metric: &HalfSpaceMetric,
    start: &ZeroPhasePoint,
    t_span: (f64, f64),
    tol: f64,
) -> Result<Trajectory> {
    integrate_with(metric, start, t_span, &FlowOptions::new(tol))
}

pub fn integrate_with(
    metric: &HalfSpaceMetric,
    start: &ZeroPhasePoint,
    t_span: (f64, f64),
    opts: &FlowOptions,
) -> Result<Trajectory> {
    if !(opts.tol > 0.0) {
        return Err(Error::contract("tolerance must be positive"));
    }
    geodesic_rhs(metric, start)?;
    let start = if opts.normalize { start.normalized(metric)? } else { start.clone() };
    let e0 = start.energy(metric);
    let (t0, t1) = t_span;
    let escape = opts.escape;
    let sol = dopri5(
        |_, v| log_rhs(metric, v),
        t0,
        &start.to_log_state(),
        t1,
        &OdeOptions::with_tol(opts.tol),
        |_, v| escape.map_or(false, |e| ball_bdf(v[0].exp(), &v[1..=metric.n()]) < e),
    )?;
    let mut drift = 0.0f64;
    for v in &sol.ys {
        let p = ZeroPhasePoint::from_log_state(v);
        drift = drift.max((p.energy(metric) - e0).abs());
    }
    let samples = match &opts.sample_times {
        None => sol.ts.iter().zip(&sol.ys).map(|(t, v)| (*t, ZeroPhasePoint::from_log_state(v))).collect(),
        Some(times) => times
            .iter()
            .filter_map(|&t| sol.at(t).map(|v| (t, ZeroPhasePoint::from_log_state(&v))))
            .collect(),
    };
    let exited = sol.stopped;
    let forward = t1 >= t0;
    Ok(Trajectory {
        samples,
        exit_forward: exited && forward,
        exit_backward: exited && !forward,
        max_constraint_drift: drift,
        solution: sol,
    })
}

/// Closed-form boundary bicharacteristic `(0, y*, cos τ, sin τ·μ*)`.
pub fn boundary_bicharacteristic(tau: f64, y_star: &[f64], mu_star: &[f64]) -> Result<ZeroPhasePoint> {
    if !(tau > 0.0 && tau < std::f64::consts::PI) {
        return Err(Error::domain(format!("tau = {tau} outside (0, pi)")));
    }
    let norm: f64 = mu_star.iter().map(|m| m * m).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 || y_star.len() != mu_star.len() {
        return Err(Error::contract("mu_star must be a unit vector of the boundary dimension"));
    }
    Ok(ZeroPhasePoint {
        x: 0.0,
        y: y_star.to_vec(),
        lam: tau.cos(),
        mu: mu_star.iter().map(|m| tau.sin() * m).collect(),
    })
}

/// Solution of `dτ/dt = sin τ` with `τ(0) = tau0`.
pub fn bicharacteristic_angle(tau0: f64, t: f64) -> f64 {
    2.0 * ((tau0 / 2.0).tan() * t.exp()).atan()
}

/// Largest violation of `λ(t) ≤ -tanh t + 1e-6` for `t ∈ [0, t_end]` from a
/// start with `λ(0) = 0`.
pub fn lambda_witness(metric: &HalfSpaceMetric, start: &ZeroPhasePoint, t_end: f64, tol: f64) -> Result<f64> {
    if start.lam != 0.0 {
        return Err(Error::contract("lambda witness needs lam(0) = 0"));
    }
    let times: Vec<f64> = (0..=500).map(|i| t_end * i as f64 / 500.0).collect();
    let opts = FlowOptions { sample_times: Some(times), ..FlowOptions::new(tol) };
    let traj = integrate_with(metric, start, (0.0, t_end), &opts)?;
    Ok(traj
        .samples
        .iter()
        .map(|(t, p)| p.lam + t.tanh())
        .fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YTravel {
    pub max_displacement: f64,
    pub ratio: f64,
    pub max_x: f64,
    pub stayed_in_collar: bool,
}

/// Launch geodesics tangent to `{x = x_max}` and measure how far `y` moves
/// before they reach the boundary.
pub fn y_travel_check(metric: &HalfSpaceMetric, epsilon: f64, x_max: f64) -> Result<YTravel> {
    if !(x_max > 0.0 && x_max <= epsilon && epsilon <= 0.1) {
        return Err(Error::contract("need 0 < x_max <= epsilon <= 0.1"));
    }
    let n = metric.n();
    let x_stop = x_max * 1e-6;
    let mut apexes = vec![vec![0.0; n]];
    if let Some(b) = metric.bump() {
        apexes.push(b.center[1..].to_vec());
    }
    let mut worst = YTravel { max_displacement: 0.0, ratio: 0.0, max_x: x_max, stayed_in_collar: true };
    for y0 in &apexes {
        for i in 0..n {
            for sign in [1.0, -1.0] {
                let mut mu = vec![0.0; n];
                mu[i] = sign;
                let start = ZeroPhasePoint::new(x_max, y0.clone(), 0.0, mu);
                let mut ends = Vec::new();
                for t1 in [200.0, -200.0] {
                    let opts = FlowOptions { escape: None, ..FlowOptions::new(1e-11) };
                    let sol = dopri5(
                        |_, v| log_rhs(metric, v),
                        0.0,
                        &start.normalized(metric)?.to_log_state(),
                        t1,
                        &OdeOptions::with_tol(opts.tol),
                        |_, v| v[0].exp() < x_stop,
                    )?;
                    if !sol.stopped {
                        return Err(Error::Integration {
                            t: t1,
                            reason: "geodesic did not reach the boundary".into(),
                            last_state: sol.last().1.to_vec(),
                        });
                    }
                    let top = sol.ys.iter().map(|v| v[0].exp()).fold(0.0f64, f64::max);
                    worst.max_x = worst.max_x.max(top);
                    if top > epsilon {
                        worst.stayed_in_collar = false;
                    }
                    ends.push(sol.last().1[1..=n].to_vec());
                }
                // h(0) is the identity: perturbations vanish on the boundary.
                let disp: f64 = ends[0].iter().zip(&ends[1]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                if disp > worst.max_displacement {
                    worst.max_displacement = disp;
                }
            }
        }
    }
    worst.ratio = worst.max_displacement / (2.0 * x_max);
    Ok(worst)
}

/// `∫₀^∞ (2e^{αt}/(1+e^{2αt}))^{1+1/α} dt`, i.e. `∫ sech(αt)^{1+1/α} dt`.
pub fn y_travel_integral(alpha: f64) -> f64 {
    let p = 1.0 + 1.0 / alpha;
    let upper = 80.0 / (alpha * p);
    let (v, _) = crate::quad::adaptive(0.0, upper, 1e-15, 1e-14, 2000, |t| (alpha * t).cosh().recip().powf(p));
    v
}
