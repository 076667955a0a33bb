//! The `lo:hi:{lin,log}:count` grid syntax shared by every subcommand.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Lin,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub spacing: Spacing,
    pub count: usize,
}

impl GridSpec {
    pub fn lin(lo: f64, hi: f64, count: usize) -> Self {
        GridSpec { lo, hi, spacing: Spacing::Lin, count }
    }

    pub fn log(lo: f64, hi: f64, count: usize) -> Self {
        GridSpec { lo, hi, spacing: Spacing::Log, count }
    }

    /// Same range with the point count doubled (minus one, so that the old
    /// nodes stay nodes of the refined grid).
    pub fn refined(&self) -> Self {
        GridSpec { count: 2 * self.count - 1, ..*self }
    }

    pub fn points(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.lo],
            n => {
                let last = (n - 1) as f64;
                match self.spacing {
                    Spacing::Lin => (0..n)
                        .map(|i| self.lo + (self.hi - self.lo) * i as f64 / last)
                        .collect(),
                    Spacing::Log => {
                        let (a, b) = (self.lo.ln(), self.hi.ln());
                        (0..n).map(|i| (a + (b - a) * i as f64 / last).exp()).collect()
                    }
                }
            }
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 4 {
            return Err(Error::Config(format!("grid `{s}`: expected lo:hi:lin|log:count")));
        }
        let num = |p: &str| -> Result<f64> {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("grid `{s}`: bad number `{p}`")))
        };
        let lo = num(parts[0])?;
        let hi = num(parts[1])?;
        let spacing = match parts[2].trim() {
            "lin" => Spacing::Lin,
            "log" => Spacing::Log,
            other => return Err(Error::Config(format!("grid `{s}`: unknown spacing `{other}`"))),
        };
        let count: usize = parts[3]
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("grid `{s}`: bad count")))?;
        if count == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(Error::Config(format!("grid `{s}`: empty or reversed range")));
        }
        if spacing == Spacing::Log && lo <= 0.0 {
            return Err(Error::Config(format!("grid `{s}`: log spacing needs lo > 0")));
        }
        Ok(GridSpec { lo, hi, spacing, count })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sp = match self.spacing {
            Spacing::Lin => "lin",
            Spacing::Log => "log",
        };
        write!(f, "{}:{}:{}:{}", self.lo, self.hi, sp, self.count)
    }
}

/// Comma separated list of reals, e.g. `"4,8,16"`.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number `{p}` in list `{s}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_log_grid() {
        let g: GridSpec = "1e-3:30:log:200".parse().unwrap();
        let p = g.points();
        assert_eq!(p.len(), 200);
        assert!((p[0] - 1e-3).abs() < 1e-15);
        assert!((p[199] - 30.0).abs() < 1e-12);
    }

    #[test]
    fn single_point_grid() {
        let g: GridSpec = "1:1:lin:1".parse().unwrap();
        assert_eq!(g.points(), vec![1.0]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!("1:2:cubic:4".parse::<GridSpec>().is_err());
        assert!("0:2:log:4".parse::<GridSpec>().is_err());
        assert!("3:2:lin:4".parse::<GridSpec>().is_err());
        assert!("1:2:lin".parse::<GridSpec>().is_err());
    }

    #[test]
    fn refinement_keeps_nodes() {
        let g = GridSpec::lin(0.0, 1.0, 5);
        let r = g.refined();
        let (a, b) = (g.points(), r.points());
        for (i, x) in a.iter().enumerate() {
            assert!((b[2 * i] - x).abs() < 1e-15);
        }
    }

    #[test]
    fn display_round_trips() {
        let g: GridSpec = "0.1:10:log:50".parse().unwrap();
        assert_eq!(g.to_string().parse::<GridSpec>().unwrap(), g);
    }
}
