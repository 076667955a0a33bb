use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geodesic::{integrate_with, FlowOptions, ZeroPhasePoint};
use crate::error::{Error, Result};
use crate::hypgeo::HalfSpaceMetric;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EscapeStatus {
    Escaped,
    Trapped,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub index: usize,
    pub start: ZeroPhasePoint,
    pub status: EscapeStatus,
    pub forward_time: Option<f64>,
    pub backward_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NontrapCertificate {
    pub passed: bool,
    pub trapped_count: usize,
    pub inconclusive_count: usize,
    pub worst_escape_time: f64,
    pub seed: u64,
    pub samples: Vec<SampleOutcome>,
}

#[derive(Debug, Clone, Copy)]
pub struct NontrapOptions {
    pub sample_count: usize,
    pub escape_x: f64,
    pub t_max: f64,
    pub y_box: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for NontrapOptions {
    fn default() -> Self {
        NontrapOptions { sample_count: 1000, escape_x: 1e-3, t_max: 100.0, y_box: 1.0, tol: 1e-9, seed: 0 }
    }
}

fn random_start(metric: &HalfSpaceMetric, opts: &NontrapOptions, index: usize) -> Result<ZeroPhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(index as u64));
    let n = metric.n();
    let x = rng.gen_range(opts.escape_x..=1.0);
    let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-opts.y_box..=opts.y_box)).collect();
    loop {
        let lam: f64 = rng.gen_range(-1.0..=1.0);
        let mu: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let r2 = lam * lam + mu.iter().map(|m| m * m).sum::<f64>();
        if r2 > 1e-4 && r2 <= 1.0 {
            return ZeroPhasePoint::new(x, y, lam, mu).normalized(metric);
        }
    }
}

fn escape_time(metric: &HalfSpaceMetric, start: &ZeroPhasePoint, opts: &NontrapOptions, dir: f64) -> Result<Option<f64>> {
    let fo = FlowOptions { escape: Some(opts.escape_x), ..FlowOptions::new(opts.tol) };
    let tr = integrate_with(metric, start, (0.0, dir * opts.t_max), &fo)?;
    Ok((tr.exit_forward || tr.exit_backward).then(|| tr.t_end().abs()))
}

/// Sample the cosphere bundle over a compact box and check that each
/// geodesic reaches infinity in both directions within `t_max`.
pub fn certify_nontrapping(metric: &HalfSpaceMetric, opts: &NontrapOptions) -> Result<NontrapCertificate> {
    if !(opts.escape_x > 0.0 && opts.escape_x < 1.0 && opts.t_max > 0.0) {
        return Err(Error::contract("need 0 < escape_x < 1 and t_max > 0"));
    }
    let samples: Vec<SampleOutcome> = (0..opts.sample_count)
        .into_par_iter()
        .map(|index| {
            let start = random_start(metric, opts, index)?;
            let fwd = escape_time(metric, &start, opts, 1.0);
            let bwd = escape_time(metric, &start, opts, -1.0);
            let (status, forward_time, backward_time) = match (fwd, bwd) {
                (Ok(f), Ok(b)) => {
                    let s = if f.is_some() && b.is_some() { EscapeStatus::Escaped } else { EscapeStatus::Trapped };
                    (s, f, b)
                }
                _ => (EscapeStatus::Inconclusive, None, None),
            };
            Ok(SampleOutcome { index, start, status, forward_time, backward_time })
        })
        .collect::<Result<_>>()?;
    let trapped_count = samples.iter().filter(|s| s.status == EscapeStatus::Trapped).count();
    let inconclusive_count = samples.iter().filter(|s| s.status == EscapeStatus::Inconclusive).count();
    let worst_escape_time = samples
        .iter()
        .flat_map(|s| [s.forward_time, s.backward_time])
        .flatten()
        .fold(0.0, f64::max);
    Ok(NontrapCertificate {
        passed: trapped_count == 0 && inconclusive_count == 0,
        trapped_count,
        inconclusive_count,
        worst_escape_time,
        seed: opts.seed,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypgeo::Bump;

    #[test]
    fn hyperbolic_space_is_nontrapping() {
        let opts = NontrapOptions { sample_count: 64, ..Default::default() };
        let c = certify_nontrapping(&HalfSpaceMetric::hyperbolic(2), &opts).unwrap();
        assert!(c.passed);
        assert_eq!(c.samples.len(), 64);
        assert!(c.worst_escape_time < 20.0);
    }

    #[test]
    fn deterministic_given_seed() {
        let m = HalfSpaceMetric::perturbed(1, Bump { amplitude: 0.05, center: vec![0.5, 0.0], radius: 0.3 }).unwrap();
        let opts = NontrapOptions { sample_count: 16, seed: 11, ..Default::default() };
        let a = certify_nontrapping(&m, &opts).unwrap();
        let b = certify_nontrapping(&m, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.passed);
    }

    #[test]
    fn short_horizon_reports_trapped() {
        let opts = NontrapOptions { sample_count: 8, t_max: 1e-3, ..Default::default() };
        let c = certify_nontrapping(&HalfSpaceMetric::hyperbolic(2), &opts).unwrap();
        assert!(!c.passed && c.trapped_count > 0);
    }
}
