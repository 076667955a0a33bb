use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::acosh1p;

/// A point `(x, y)` of the half-space chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: Vec<f64>,
}

impl Point {
    pub fn new(x: f64, y: Vec<f64>) -> Self {
        Point { x, y }
    }

    /// Origin of the boundary directions, `(x, 0)`.
    pub fn on_axis(x: f64, n: usize) -> Self {
        Point { x, y: vec![0.0; n] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointPair {
    pub p: Point,
    pub q: Point,
}

impl PointPair {
    pub fn new(p: Point, q: Point) -> Self {
        PointPair { p, q }
    }

    pub fn swapped(&self) -> Self {
        PointPair { p: self.q.clone(), q: self.p.clone() }
    }

    fn check(&self) -> Result<()> {
        if !(self.p.x > 0.0 && self.q.x > 0.0) {
            return Err(Error::domain(format!(
                "x-coordinates must be positive (got {}, {})",
                self.p.x, self.q.x
            )));
        }
        if self.p.y.len() != self.q.y.len() {
            return Err(Error::contract("points have different boundary dimensions"));
        }
        Ok(())
    }

    fn dy2(&self) -> f64 {
        self.p.y.iter().zip(&self.q.y).map(|(a, b)| (a - b) * (a - b)).sum()
    }
}

/// `arccosh(1 + (|x - x'|² + |y - y'|²)/(2 x x'))`.
pub fn hyperbolic_distance(pair: &PointPair) -> Result<f64> {
    pair.check()?;
    let dx = pair.p.x - pair.q.x;
    let delta = (dx * dx + pair.dy2()) / (2.0 * pair.p.x * pair.q.x);
    Ok(acosh1p(delta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BdfValues {
    pub rho_l: f64,
    pub rho_r: f64,
    pub rho_f: f64,
}

/// The blow-up realization `rho_F = sqrt(x² + x'² + |y - y'|²)`,
/// `rho_L = x/rho_F`, `rho_R = x'/rho_F`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BoundaryDefiningTriple;

impl BoundaryDefiningTriple {
    pub fn rho_f(&self, pair: &PointPair) -> Result<f64> {
        pair.check()?;
        Ok((pair.p.x * pair.p.x + pair.q.x * pair.q.x + pair.dy2()).sqrt())
    }

    pub fn rho_l(&self, pair: &PointPair) -> Result<f64> {
        Ok(pair.p.x / self.rho_f(pair)?)
    }

    pub fn rho_r(&self, pair: &PointPair) -> Result<f64> {
        Ok(pair.q.x / self.rho_f(pair)?)
    }
}

pub fn bdf_eval(pair: &PointPair) -> Result<BdfValues> {
    let t = BoundaryDefiningTriple;
    let rho_f = t.rho_f(pair)?;
    Ok(BdfValues { rho_l: pair.p.x / rho_f, rho_r: pair.q.x / rho_f, rho_f })
}

/// `b(z, z') = d(z, z') + log(rho_L rho_R)`.
pub fn distance_defect(pair: &PointPair) -> Result<f64> {
    let d = hyperbolic_distance(pair)?;
    let b = bdf_eval(pair)?;
    Ok(d + b.rho_l.ln() + b.rho_r.ln())
}
