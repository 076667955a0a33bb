//! `key=value` metric configuration files.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Bump, HalfSpaceMetric, Warp, WarpedMetric};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Hyperbolic,
    Perturbed,
    Warped,
}

pub type WarpKind = Warp;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub kind: MetricKind,
    pub n: usize,
    pub bump_amplitude: f64,
    /// `(x, y1, ..., yn)`; shorter vectors are padded with zeros.
    pub bump_center: Vec<f64>,
    pub bump_radius: f64,
    pub warp: Warp,
    /// Width of the collar `{x ≤ epsilon}` used by the y-travel check.
    pub epsilon: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            kind: MetricKind::Hyperbolic,
            n: 2,
            bump_amplitude: 0.05,
            bump_center: vec![0.5],
            bump_radius: 0.3,
            warp: Warp::Sinh,
            epsilon: 0.05,
        }
    }
}

impl MetricConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        text.parse()
    }

    /// Raw `key=value` pairs; `#` starts a comment.
    pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
        let mut out = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            out.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(out)
    }

    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self> {
        let mut cfg = MetricConfig::default();
        let num = |k: &str, v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| Error::Config(format!("{k}: bad number `{v}`")))
        };
        for (k, v) in pairs {
            match k.as_str() {
                "metric.kind" => {
                    cfg.kind = match v.as_str() {
                        "hyperbolic" => MetricKind::Hyperbolic,
                        "perturbed" => MetricKind::Perturbed,
                        "warped" => MetricKind::Warped,
                        other => return Err(Error::Config(format!("unknown metric.kind `{other}`"))),
                    }
                }
                "metric.n" => {
                    cfg.n = v
                        .parse()
                        .ok()
                        .filter(|n: &usize| *n >= 1)
                        .ok_or_else(|| Error::Config(format!("metric.n: bad value `{v}`")))?
                }
                "metric.bump.amplitude" => cfg.bump_amplitude = num(k, v)?,
                "metric.bump.radius" => cfg.bump_radius = num(k, v)?,
                "metric.bump.center" => cfg.bump_center = crate::grid::parse_list(v)?,
                "metric.warp" => {
                    cfg.warp = match v.as_str() {
                        "sinh" => Warp::Sinh,
                        "sinh_plus_gaussian" => Warp::SinhPlusGaussian,
                        other => return Err(Error::Config(format!("unknown metric.warp `{other}`"))),
                    }
                }
                "metric.epsilon" | "flow.epsilon" => cfg.epsilon = num(k, v)?,
                // Run-level keys live in the same file and are handled by the CLI.
                k if !k.starts_with("metric.") => {}
                other => return Err(Error::Config(format!("unknown key `{other}`"))),
            }
        }
        if !(cfg.epsilon > 0.0 && cfg.epsilon <= 0.1) {
            return Err(Error::Config("epsilon must lie in (0, 0.1]".into()));
        }
        Ok(cfg)
    }

    pub fn half_space(&self) -> Result<HalfSpaceMetric> {
        match self.kind {
            MetricKind::Hyperbolic => Ok(HalfSpaceMetric::hyperbolic(self.n)),
            MetricKind::Perturbed => {
                let mut center = self.bump_center.clone();
                if center.is_empty() || center.len() > self.n + 1 {
                    return Err(Error::Config(format!(
                        "metric.bump.center needs 1..={} coordinates",
                        self.n + 1
                    )));
                }
                center.resize(self.n + 1, 0.0);
                HalfSpaceMetric::perturbed(
                    self.n,
                    Bump { amplitude: self.bump_amplitude, center, radius: self.bump_radius },
                )
            }
            MetricKind::Warped => Err(Error::Config(
                "a warped metric has no half-space chart; use metric.kind=hyperbolic or perturbed".into(),
            )),
        }
    }

    pub fn warped(&self) -> WarpedMetric {
        WarpedMetric::new(self.n, self.warp)
    }
}

impl FromStr for MetricConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricConfig::from_pairs(&MetricConfig::parse_pairs(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_perturbed_config() {
        let text = "# test\nmetric.kind = perturbed\nmetric.n=3\nmetric.bump.amplitude=0.1\n\
                    metric.bump.center=0.4,0.1\nmetric.bump.radius=0.2\nseed=9\n";
        let cfg: MetricConfig = text.parse().unwrap();
        assert_eq!(cfg.kind, MetricKind::Perturbed);
        let m = cfg.half_space().unwrap();
        assert_eq!(m.n(), 3);
        assert_eq!(m.bump().unwrap().center, vec![0.4, 0.1, 0.0, 0.0]);
    }

    #[test]
    fn parses_warp() {
        let cfg: MetricConfig = "metric.kind=warped\nmetric.warp=sinh_plus_gaussian\nmetric.n=4".parse().unwrap();
        assert_eq!(cfg.warped(), WarpedMetric::new(4, Warp::SinhPlusGaussian));
        assert!(cfg.half_space().is_err());
    }

    #[test]
    fn rejects_unknown_metric_keys() {
        assert!("metric.colour=red".parse::<MetricConfig>().is_err());
        assert!("metric.kind=flat".parse::<MetricConfig>().is_err());
        assert!("metric.n".parse::<MetricConfig>().is_err());
        assert!("metric.epsilon=0.5".parse::<MetricConfig>().is_err());
    }
}
