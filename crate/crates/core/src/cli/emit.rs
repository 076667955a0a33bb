use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ReportEnvelope {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub seed: u64,
    /// Seconds since the epoch, from `SOURCE_DATE_EPOCH` (0 when unset).
    pub timestamp: u64,
    pub results: Value,
}

impl ReportEnvelope {
    pub fn new(command: &str, config: Value, seed: u64, results: Value) -> Self {
        ReportEnvelope {
            schema: SCHEMA,
            tool: "hypspec".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            seed,
            timestamp: std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()).unwrap_or(0),
            results,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// A table with a fixed header; the seed goes into a leading comment line.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self, seed: u64) -> String {
        let mut s = format!("# hypspec {} seed={seed}\n", env!("CARGO_PKG_VERSION"));
        s.push_str(&self.header.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| cell(v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// Shortest round-trip text, in exponent form away from `[1e-4, 1e16)`.
fn cell(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e16).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// One polyline per series, in data coordinates mapped onto a 640×400
/// canvas. With `log_axes` both coordinates are plotted as `ln`.
pub fn svg(title: &str, series: &[Series], log_axes: bool) -> String {
    let map = |p: (f64, f64)| if log_axes { (p.0.ln(), p.1.ln()) } else { p };
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| s.points.iter().map(|&p| map(p)).filter(|p| p.0.is_finite() && p.1.is_finite()).collect())
        .collect();
    let all = pts.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    let (w, h, pad) = (640.0, 400.0, 40.0);
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    for (i, (ser, p)) in series.iter().zip(&pts).enumerate() {
        let coords: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
            colors[i % colors.len()],
            coords.join(" "),
            escape(&ser.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn envelope_round_trips() {
        let e = ReportEnvelope::new("kernel", json!({"n": 2}), 7, json!({"x": [0.1, 1e-300, 3.0]}));
        let text = e.to_json().unwrap();
        let back: ReportEnvelope = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e);
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn csv_uses_round_trip_precision() {
        let mut t = Table::new(&["r", "value"]);
        t.rows.push(vec![0.1, 1.0 / 3.0]);
        let csv = t.to_csv(3);
        let line = csv.lines().nth(2).unwrap();
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, 1.0 / 3.0);
        assert!(csv.starts_with("# hypspec") && csv.contains("seed=3"));
    }

    #[test]
    fn tiny_cells_use_exponents() {
        for v in [4.96e-11, -1.5e20, 0.0, 12.5] {
            assert_eq!(cell(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(cell(4.96e-11), "4.96e-11");
    }

    #[test]
    fn svg_has_one_polyline_per_series() {
        let a = Series { name: "norm".into(), points: vec![(1.0, 1.0), (10.0, 100.0)] };
        let b = Series { name: "fit".into(), points: vec![(1.0, 1.1), (10.0, 90.0)] };
        let s = svg("t", &[a, b], true);
        assert_eq!(s.matches("<polyline").count(), 2);
    }
}
