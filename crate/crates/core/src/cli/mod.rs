//! The `hypspec` command line.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails,
//! 2 on usage or configuration errors, 3 on numerical or I/O failures.

mod emit;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

pub use emit::{svg, ReportEnvelope, Series, Table, SCHEMA};

use crate::error::{Error, Result};
use crate::flow::{certify_nontrapping, integrate_with, shoot_distance, FlowOptions, NontrapOptions, ZeroPhasePoint};
use crate::grid::{parse_list, GridSpec};
use crate::hypgeo::{hyperbolic_distance, HalfSpaceMetric, MetricConfig, MetricKind, Point, PointPair};
use crate::kernels::{
    chi_plus_pair, heat_recursion, resolvent_kernel, spectral_measure_deriv, stone_formula, GaussianTest,
    PolyBumpTest, Side, TestFunction,
};
use crate::transform::{fg_tails, multiplier_kernel, FgTailConfig, Multiplier, MultiplierSpec, DEFAULT_SAMPLES};
use crate::verify::{
    check_pointwise_bounds, deriv_bound_check, dyadic_alphas, fit_loglog, multiplier_uniformity, restriction_scan,
    run_criterion, Regime, CRITERIA,
};

#[derive(Debug, Parser)]
#[command(name = "hypspec", version, about = "Spectral kernels and geodesic checks on hyperbolic space")]
pub struct Cli {
    /// key=value file with `metric.*` keys and `run.seed`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random draw (overrides `run.seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the 0-geodesic flow; CSV of sampled states.
    Geodesic(GeodesicArgs),
    /// Distance by shooting, compared with the closed form when exact.
    Distance(DistanceArgs),
    /// Sample the cosphere bundle and certify escape in both directions.
    Nontrap(NontrapArgs),
    /// Resolvent, spectral-measure and heat kernels on a radial grid.
    Kernel(KernelArgs),
    /// Pair `χ₊^a` with a test function.
    Chi(ChiArgs),
    /// Pointwise envelope checks with grid refinement.
    Bounds(BoundsArgs),
    /// Log-log slope of the L¹ → L^∞ norm of dE(σ).
    Restriction(RestrictionArgs),
    /// Multiplier kernels K_α and far-diagonal uniformity.
    Multiplier(MultiplierArgs),
    /// Fourier tail integrals of F̂ ∗ Ĝ.
    Fgtail(FgTailArgs),
    /// Run numbered acceptance checks.
    Report(ReportArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct Output {
    /// Output file; JSON for `.json`, CSV for `.csv`. Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional SVG plot of the main series.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GeodesicArgs {
    /// Metric configuration file.
    #[arg(long)]
    pub metric: Option<PathBuf>,
    /// `x,y1..yn,lam,mu1..mun`.
    #[arg(long, allow_hyphen_values = true)]
    pub start: String,
    #[arg(long, default_value_t = 40.0, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Number of equally spaced output times.
    #[arg(long, default_value_t = 401)]
    pub samples: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct DistanceArgs {
    #[arg(long)]
    pub metric: Option<PathBuf>,
    /// `x,y1..yn`.
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct NontrapArgs {
    #[arg(long)]
    pub metric: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 100.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub escape_x: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct KernelArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// `spectral`, `stone`, `resolvent`, `deriv:j` or `heat:t`.
    #[arg(long, default_value = "spectral")]
    pub what: String,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: f64,
    /// Imaginary part of σ, for the resolvent.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub sigma_im: f64,
    /// `outgoing` or `incoming`.
    #[arg(long, default_value = "outgoing")]
    pub side: String,
    #[arg(long, default_value = "1e-3:30:log:200")]
    pub r_grid: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct ChiArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a_im: f64,
    /// `gaussian` or `bump:m`.
    #[arg(long, default_value = "gaussian")]
    pub test: String,
    /// Comma separated evaluation points.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub x: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value = "high")]
    pub regime: String,
    #[arg(long, default_value = "0,1,2")]
    pub j: String,
    /// Check `|(d/dσ)^j dE| ≤ Cσ` on H³ instead of the pointwise envelopes.
    #[arg(long)]
    pub derivative: bool,
    #[arg(long, default_value = "1:100:lin:397")]
    pub sigma: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct RestrictionArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value = "10:1000:log:24")]
    pub sigma: String,
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct MultiplierArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// e.g. `bump:s=1.6`, `poly:p=3`, `gauss:t=36`.
    #[arg(long = "F", default_value = "bump:s=1.6")]
    pub f: String,
    #[arg(long, default_value_t = 0.25)]
    pub alpha: f64,
    #[arg(long, default_value = "0.05:20:log:200")]
    pub r_grid: String,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Report far-diagonal norms over α = 2^0 … 2^{-levels} instead.
    #[arg(long)]
    pub uniformity: bool,
    #[arg(long, default_value_t = 10)]
    pub levels: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct FgTailArgs {
    #[arg(long)]
    pub m: f64,
    #[arg(long = "R", default_value = "4,8,16,32,64")]
    pub r: String,
    #[arg(long = "F", default_value = "poly:p=3")]
    pub f: String,
    /// Fail unless the fitted slope is within this distance of -(2m+1).
    #[arg(long)]
    pub check: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// Criterion number; all when omitted.
    #[arg(long)]
    pub criterion: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

/// What a subcommand produced.
struct Product {
    passed: bool,
    results: Value,
    table: Option<Table>,
    plot: Option<(String, Vec<Series>, bool)>,
}

impl Product {
    fn json(passed: bool, results: Value) -> Self {
        Product { passed, results, table: None, plot: None }
    }
}

/// Parse `argv`, run the command, write outputs and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    init_threads();
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("hypspec: {e}");
            match e {
                Error::Config(_) | Error::Contract(_) | Error::Domain(_) | Error::Unsupported(_) => 2,
                _ => 3,
            }
        }
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("HYPSPEC_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let run_keys = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            MetricConfig::parse_pairs(&text)?
        }
        None => Default::default(),
    };
    let seed = match cli.seed {
        Some(s) => s,
        None => match run_keys.get("run.seed") {
            Some(v) => v.parse().map_err(|_| Error::Config(format!("run.seed: bad value `{v}`")))?,
            None => 0,
        },
    };
    let config_metric = || -> Result<Option<MetricConfig>> {
        if run_keys.keys().any(|k| k.starts_with("metric.")) {
            Ok(Some(MetricConfig::from_pairs(&run_keys)?))
        } else {
            Ok(None)
        }
    };
    let metric = |path: &Option<PathBuf>, required: bool| -> Result<MetricConfig> {
        match path {
            Some(p) => MetricConfig::load(p),
            None => match config_metric()? {
                Some(m) => Ok(m),
                None if required => Err(Error::Config("--metric is required for this command".into())),
                None => Ok(MetricConfig::default()),
            },
        }
    };
    let (name, config, output, product) = match &cli.command {
        Command::Geodesic(a) => {
            let m = metric(&a.metric, true)?;
            ("geodesic", echo(a, Some(&m))?, &a.output, geodesic(a, &m)?)
        }
        Command::Distance(a) => {
            let m = metric(&a.metric, true)?;
            ("distance", echo(a, Some(&m))?, &a.output, distance(a, &m)?)
        }
        Command::Nontrap(a) => {
            let m = metric(&a.metric, false)?;
            ("nontrap", echo(a, Some(&m))?, &a.output, nontrap(a, &m, seed)?)
        }
        Command::Kernel(a) => ("kernel", echo(a, None)?, &a.output, kernel(a)?),
        Command::Chi(a) => ("chi", echo(a, None)?, &a.output, chi(a)?),
        Command::Bounds(a) => ("bounds", echo(a, None)?, &a.output, bounds(a)?),
        Command::Restriction(a) => ("restriction", echo(a, None)?, &a.output, restriction(a)?),
        Command::Multiplier(a) => ("multiplier", echo(a, None)?, &a.output, multiplier(a)?),
        Command::Fgtail(a) => ("fgtail", echo(a, None)?, &a.output, fgtail(a)?),
        Command::Report(a) => ("report", echo(a, None)?, &a.output, report(a)?),
    };
    emit(name, config, seed, output, &product)?;
    Ok(product.passed)
}

fn echo<A: Serialize>(args: &A, metric: Option<&MetricConfig>) -> Result<Value> {
    let mut v = serde_json::to_value(args)?;
    if let (Some(m), Some(obj)) = (metric, v.as_object_mut()) {
        obj.insert("metric_config".into(), serde_json::to_value(m)?);
    }
    Ok(v)
}

fn emit(name: &str, config: Value, seed: u64, output: &Output, p: &Product) -> Result<()> {
    let envelope = ReportEnvelope::new(name, config, seed, p.results.clone());
    let is_csv = |path: &Path| path.extension().is_some_and(|e| e == "csv");
    match (&output.out, &p.table) {
        (Some(path), Some(t)) if is_csv(path) => emit::write(path, &t.to_csv(seed))?,
        (Some(path), _) => emit::write(path, &envelope.to_json()?)?,
        (None, Some(t)) => print!("{}", t.to_csv(seed)),
        (None, None) => print!("{}", envelope.to_json()?),
    }
    if let Some(path) = &output.svg {
        let (title, series, log) = p.plot.clone().unwrap_or_else(|| (name.to_string(), Vec::new(), false));
        emit::write(path, &svg(&title, &series, log))?;
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

fn half_space(m: &MetricConfig) -> Result<HalfSpaceMetric> {
    if m.kind == MetricKind::Warped {
        return Err(Error::Config("this command needs a half-space metric".into()));
    }
    m.half_space()
}

fn geodesic(a: &GeodesicArgs, m: &MetricConfig) -> Result<Product> {
    positive("--tol", a.tol)?;
    let metric = half_space(m)?;
    let n = metric.n();
    let v = parse_list(&a.start)?;
    if v.len() != 2 * n + 2 {
        return Err(Error::Config(format!("--start needs {} numbers (x, y, lam, mu) for n = {n}", 2 * n + 2)));
    }
    let start = ZeroPhasePoint::new(v[0], v[1..=n].to_vec(), v[n + 1], v[n + 2..].to_vec());
    let count = a.samples.max(2);
    let times: Vec<f64> = (0..count).map(|i| a.t * i as f64 / (count - 1) as f64).collect();
    let opts = FlowOptions { sample_times: Some(times), ..FlowOptions::new(a.tol) };
    let tr = integrate_with(&metric, &start, (0.0, a.t), &opts)?;
    let mut header = vec!["t".to_string(), "x".to_string()];
    header.extend((1..=n).map(|i| format!("y{i}")));
    header.push("lam".into());
    header.extend((1..=n).map(|i| format!("mu{i}")));
    header.push("constraint_drift".into());
    let mut table = Table { header, rows: Vec::new() };
    for (t, p) in &tr.samples {
        let mut row = vec![*t, p.x];
        row.extend(&p.y);
        row.push(p.lam);
        row.extend(&p.mu);
        row.push((p.energy(&metric) - 1.0).abs());
        table.rows.push(row);
    }
    let path: Vec<(f64, f64)> = tr.samples.iter().map(|(_, p)| (p.y[0], p.x)).collect();
    let passed = tr.max_constraint_drift <= 100.0 * a.tol;
    Ok(Product {
        passed,
        results: json!({
            "samples": table.rows.len(),
            "max_constraint_drift": tr.max_constraint_drift,
            "drift_limit": 100.0 * a.tol,
            "end": tr.end(),
        }),
        table: Some(table),
        plot: Some(("geodesic (y1, x)".into(), vec![Series { name: "trajectory".into(), points: path }], false)),
    })
}

fn parse_point(s: &str, n: usize) -> Result<Point> {
    let v = parse_list(s)?;
    if v.len() != n + 1 {
        return Err(Error::Config(format!("point `{s}` needs {} numbers for n = {n}", n + 1)));
    }
    Ok(Point::new(v[0], v[1..].to_vec()))
}

fn distance(a: &DistanceArgs, m: &MetricConfig) -> Result<Product> {
    positive("--tol", a.tol)?;
    let metric = half_space(m)?;
    let pair = PointPair::new(parse_point(&a.p, metric.n())?, parse_point(&a.q, metric.n())?);
    let d = shoot_distance(&metric, &pair, a.tol)?;
    let exact = hyperbolic_distance(&pair)?;
    let (passed, rel) = if metric.is_exact() {
        let rel = if exact > 0.0 { (d - exact).abs() / exact } else { d };
        (rel <= 1e-6, Some(rel))
    } else {
        (true, None)
    };
    Ok(Product::json(passed, json!({ "distance": d, "hyperbolic_distance": exact, "relative_error": rel })))
}

fn nontrap(a: &NontrapArgs, m: &MetricConfig, seed: u64) -> Result<Product> {
    positive("--tol", a.tol)?;
    positive("--tmax", a.tmax)?;
    let metric = half_space(m)?;
    let opts = NontrapOptions {
        sample_count: a.samples,
        escape_x: a.escape_x,
        t_max: a.tmax,
        tol: a.tol,
        seed,
        ..Default::default()
    };
    let c = certify_nontrapping(&metric, &opts)?;
    Ok(Product::json(
        c.passed,
        json!({
            "passed": c.passed,
            "trapped_count": c.trapped_count,
            "inconclusive_count": c.inconclusive_count,
            "worst_escape_time": c.worst_escape_time,
            "seed": c.seed,
            "samples": c.samples.len(),
        }),
    ))
}

fn kernel(a: &KernelArgs) -> Result<Product> {
    let grid: GridSpec = a.r_grid.parse()?;
    let side = match a.side.as_str() {
        "outgoing" => Side::Outgoing,
        "incoming" => Side::Incoming,
        other => return Err(Error::Config(format!("unknown --side `{other}`"))),
    };
    let (kind, param) = a.what.split_once(':').unwrap_or((a.what.as_str(), ""));
    let eval = |r: f64| -> Result<Complex64> {
        Ok(match kind {
            "spectral" => spectral_measure_deriv(a.n, 0, a.sigma, r)?.into(),
            "stone" => stone_formula(a.n, a.sigma, r)?.into(),
            "resolvent" => resolvent_kernel(a.n, Complex64::new(a.sigma, a.sigma_im), side, r)?,
            "deriv" => {
                let j = param.parse().map_err(|_| Error::Config(format!("--what deriv:j needs an integer, got `{param}`")))?;
                spectral_measure_deriv(a.n, j, a.sigma, r)?.into()
            }
            "heat" => {
                let t: f64 = param.parse().map_err(|_| Error::Config(format!("--what heat:t needs a number, got `{param}`")))?;
                heat_recursion(a.n, t, r)?.into()
            }
            other => return Err(Error::Config(format!("unknown --what `{other}`"))),
        })
    };
    let mut table = Table::new(&["r", "value_re", "value_im"]);
    for r in grid.points() {
        let v = eval(r)?;
        table.rows.push(vec![r, v.re, v.im]);
    }
    let series = Series { name: a.what.clone(), points: table.rows.iter().map(|r| (r[0], r[1])).collect() };
    Ok(Product {
        passed: true,
        results: json!({ "r": table.rows.iter().map(|r| r[0]).collect::<Vec<_>>(),
                         "value_re": table.rows.iter().map(|r| r[1]).collect::<Vec<_>>(),
                         "value_im": table.rows.iter().map(|r| r[2]).collect::<Vec<_>>() }),
        table: Some(table),
        plot: Some((format!("{} kernel", a.what), vec![series], false)),
    })
}

fn chi(a: &ChiArgs) -> Result<Product> {
    let order = Complex64::new(a.a, a.a_im);
    let gauss = GaussianTest::default();
    let bump;
    let f: &dyn TestFunction = match a.test.split_once(':') {
        None if a.test == "gaussian" => &gauss,
        Some(("bump", m)) => {
            let m = m.parse().map_err(|_| Error::Config(format!("bad bump order `{m}`")))?;
            bump = PolyBumpTest { m };
            &bump
        }
        _ => return Err(Error::Config(format!("unknown --test `{}` (gaussian|bump:m)", a.test))),
    };
    let mut table = Table::new(&["x", "value_re", "value_im"]);
    for x in parse_list(&a.x)? {
        let v = chi_plus_pair(order, f, x)?;
        table.rows.push(vec![x, v.re, v.im]);
    }
    let rows: Vec<Value> = table.rows.iter().map(|r| json!({ "x": r[0], "re": r[1], "im": r[2] })).collect();
    Ok(Product { passed: true, results: json!({ "a": [a.a, a.a_im], "values": rows }), table: Some(table), plot: None })
}

fn bounds(a: &BoundsArgs) -> Result<Product> {
    let js: Vec<usize> = parse_list(&a.j)?.into_iter().map(|v| v as usize).collect();
    let reports = if a.derivative {
        let sigma: GridSpec = a.sigma.parse()?;
        js.iter().map(|&j| deriv_bound_check(j, sigma)).collect()
    } else {
        let regime: Regime = a.regime.parse()?;
        check_pointwise_bounds(a.n, regime, &js)?
    };
    let passed = reports.iter().all(|r| r.passed);
    Ok(Product::json(passed, json!({ "checks": reports, "passed": passed })))
}

fn restriction(a: &RestrictionArgs) -> Result<Product> {
    let grid: GridSpec = a.sigma.parse()?;
    let rep = restriction_scan(a.n, &grid, a.tolerance)?;
    let norms = Series { name: "norm".into(), points: rep.sigma_grid.iter().cloned().zip(rep.norms.iter().cloned()).collect() };
    let fit = Series {
        name: "fit".into(),
        points: rep.sigma_grid.iter().map(|&s| (s, (rep.fit.intercept + rep.fit.slope * s.ln()).exp())).collect(),
    };
    Ok(Product {
        passed: rep.pass,
        results: json!({
            "sigma_grid": rep.sigma_grid,
            "norms": rep.norms,
            "slope": rep.slope,
            "slope_ci": rep.fit.confidence_halfwidth,
            "target_exponent": rep.target_exponent,
            "pass": rep.pass,
        }),
        table: None,
        plot: Some(("L1 -> Linf norm of dE".into(), vec![norms, fit], true)),
    })
}

fn multiplier(a: &MultiplierArgs) -> Result<Product> {
    let f: Multiplier = a.f.parse()?;
    if a.uniformity {
        let rep = multiplier_uniformity(a.n, &f, &dyadic_alphas(a.levels), a.samples)?;
        let series = Series {
            name: "far-diagonal norm".into(),
            points: rep.alphas.iter().zip(&rep.norms).map(|(al, v)| (1.0 / al, *v)).collect(),
        };
        return Ok(Product {
            passed: rep.bounded,
            results: serde_json::to_value(&rep)?,
            table: None,
            plot: Some(("far-diagonal norm vs 1/alpha".into(), vec![series], true)),
        });
    }
    let grid: GridSpec = a.r_grid.parse()?;
    let spec = MultiplierSpec::new(f, a.alpha)?.with_samples(a.samples);
    let k = multiplier_kernel(a.n, &spec, &grid.points())?;
    let mut table = Table::new(&["r", "value"]);
    table.rows = k.grid.iter().zip(&k.values).map(|(r, v)| vec![*r, *v]).collect();
    let series = Series { name: "K_alpha".into(), points: k.grid.iter().cloned().zip(k.values.iter().cloned()).collect() };
    Ok(Product {
        passed: true,
        results: json!({ "alpha": a.alpha, "r": k.grid, "values": k.values }),
        table: Some(table),
        plot: Some(("multiplier kernel".into(), vec![series], false)),
    })
}

fn fgtail(a: &FgTailArgs) -> Result<Product> {
    let f: Multiplier = a.f.parse()?;
    let radii = parse_list(&a.r)?;
    let tails = fg_tails(&f, a.m, &radii, &FgTailConfig::default())?;
    let fit = if radii.len() >= crate::verify::MIN_FIT_POINTS { Some(fit_loglog(&radii, &tails)?) } else { None };
    let target = -(2.0 * a.m + 1.0);
    let passed = match (a.check, &fit) {
        (Some(tol), Some(f)) => (f.slope - target).abs() <= tol,
        (Some(_), None) => {
            return Err(Error::Config(format!("--check needs at least {} radii", crate::verify::MIN_FIT_POINTS)))
        }
        (None, _) => true,
    };
    let series = Series { name: "tail".into(), points: radii.iter().cloned().zip(tails.iter().cloned()).collect() };
    Ok(Product {
        passed,
        results: json!({
            "m": a.m,
            "R_list": radii,
            "tails": tails,
            "fitted_slope": fit.as_ref().map(|f| f.slope),
            "slope_ci": fit.as_ref().map(|f| f.confidence_halfwidth),
            "target_slope": target,
        }),
        table: None,
        plot: Some(("FG tail".into(), vec![series], true)),
    })
}

fn report(a: &ReportArgs) -> Result<Product> {
    let ids: Vec<usize> = match a.criterion {
        Some(id) if (1..=CRITERIA).contains(&id) => vec![id],
        Some(id) => return Err(Error::Config(format!("--criterion must be 1..={CRITERIA}, got {id}"))),
        None => (1..=CRITERIA).collect(),
    };
    let mut results = Vec::new();
    for id in ids {
        let r = run_criterion(id)?;
        eprintln!("{}", r.line());
        results.push(r);
    }
    let passed = results.iter().all(|r| r.passed);
    Ok(Product::json(passed, json!({ "criteria": results, "passed": passed })))
}
