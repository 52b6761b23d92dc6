//! Command-line front end. [`run`] does all the work and returns the exit
//! code with the text for standard output and standard error, so the
//! binary is a thin wrapper and the behaviour is testable in-process.
//!
//! Exit codes: 0 success or bound holds, 1 usage/config/numeric error,
//! 2 bound violated, 3 hypothesis not met.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{
    check_remark_sec2, check_riemannian, check_thm01_future, check_thm01_past, check_thm12, subset_label, BoundReport,
    CheckOptions, RiemannCase, Verdict,
};
use crate::catalog::{entries, CatalogEntry, ParamValue, Quantity};
use crate::config::{LadderSpec, MetricSource, OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::geometry::MetricSpec;
use crate::numerics::{Grid, SpatialDomain};
use crate::volume::{
    cylinder_ladder, effective_grid, slice_volume_with_error, subset_points, volume_sweep, SpatialSubset, TimeRule,
};

#[derive(Debug, Parser)]
#[command(
    name = "lorvol",
    version,
    about = "Slice geometry, volumes and volume bounds for foliated spacetimes"
)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct GlobalOpts {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Catalog entry to use (see `catalog list`).
    #[arg(long, global = true)]
    pub catalog: Option<String>,
    /// Catalog parameter, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE", global = true)]
    pub params: Vec<String>,
    /// Nodes per axis: `32` or `64,1,1`.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Gauss–Legendre panels of the time rule.
    #[arg(long, global = true)]
    pub panels: Option<usize>,
    /// Start time of cylinders and checks.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t1: Option<f64>,
    /// End times: `0.5,0.9,0.99` or `geom:START,END,COUNT`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub ladder: Option<String>,
    /// Box subset `a1:b1,a2:b2,...` or `all`.
    #[arg(long, global = true)]
    pub subset: Option<String>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// `csv` or `kv`.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Time window override `MINUS,PLUS` (`inf` allowed).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Slice time for single-slice commands.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Times for `sweep`, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub times: Option<String>,
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    #[arg(long, global = true)]
    pub tau2: Option<f64>,
    /// Original-time range `A,B` for the mean-curvature time change.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub trange: Option<String>,
    /// Interpolation samples for the mean-curvature time change.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Describe the metric and its start slice.
    Info,
    /// Volume of one slice.
    SliceVolume,
    /// Slice volumes and their rates at several times.
    Sweep,
    /// Cylinder volumes from t1 to each ladder time.
    Cylinder,
    /// Extremes of the slice mean curvature over the grid.
    Curvature,
    /// Check a volume bound.
    Check {
        #[arg(value_enum)]
        which: CheckKind,
    },
    /// Catalog commands.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogCommand {
    /// List entries and parameters.
    List,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    #[value(name = "thm01-future")]
    Thm01Future,
    #[value(name = "thm01-past")]
    Thm01Past,
    #[value(name = "thm12")]
    Thm12,
    #[value(name = "remark2")]
    Remark2,
    #[value(name = "riemann-i")]
    RiemannI,
    #[value(name = "riemann-ii")]
    RiemannII,
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse arguments (program name first) and run.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match execute(&cli) {
        Ok((code, stdout, notes)) => Outcome {
            code,
            stdout,
            stderr: notes,
        },
        Err(e) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn parse_list(key: &str, raw: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|s| {
            let s = s.trim();
            match s {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => s
                    .parse::<f64>()
                    .map_err(|_| Error::config(key, format!("`{s}` is not a number"))),
            }
        })
        .collect()
}

fn parse_pair(key: &str, raw: &str) -> Result<(f64, f64)> {
    match parse_list(key, raw)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::config(key, "expected two comma-separated numbers")),
    }
}

fn parse_ladder_flag(raw: &str) -> Result<LadderSpec> {
    if let Some(rest) = raw.strip_prefix("geom:") {
        let v = parse_list("ladder", rest)?;
        match v.as_slice() {
            [start, endpoint, count] if *count >= 1.0 && count.fract() == 0.0 => Ok(LadderSpec::Geometric {
                start: *start,
                endpoint: *endpoint,
                count: *count as usize,
            }),
            _ => Err(Error::config("ladder", "expected geom:START,END,COUNT")),
        }
    } else {
        Ok(LadderSpec::List(parse_list("ladder", raw)?))
    }
}

fn parse_subset_flag(raw: &str) -> Result<SpatialSubset> {
    if raw.trim() == "all" {
        return Ok(SpatialSubset::All);
    }
    let ivs = raw
        .split(',')
        .map(|part| {
            let (a, b) = part
                .split_once(':')
                .ok_or_else(|| Error::config("subset", format!("`{part}` is not of the form a:b")))?;
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::config("subset", format!("`{s}` is not a number")))
            };
            Ok((num(a)?, num(b)?))
        })
        .collect::<Result<_>>()?;
    Ok(SpatialSubset::Box(ivs))
}

/// File values first, then flags.
fn merged_config(opts: &GlobalOpts) -> Result<RunConfig> {
    let mut cfg = match &opts.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(name) = &opts.catalog {
        let params = match &cfg.metric {
            Some(MetricSource::Catalog { name: old, params }) if old == name => params.clone(),
            _ => Default::default(),
        };
        cfg.metric = Some(MetricSource::Catalog {
            name: name.clone(),
            params,
        });
    }
    if !opts.params.is_empty() {
        match &mut cfg.metric {
            Some(MetricSource::Catalog { params, .. }) => {
                for kv in &opts.params {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| Error::config("param", format!("`{kv}` is not KEY=VALUE")))?;
                    params.insert(k.trim().to_string(), ParamValue::parse(v));
                }
            }
            _ => return Err(Error::config("param", "parameters need a catalog metric")),
        }
    }
    if let Some(g) = &opts.grid {
        cfg.grid = g
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::config("grid", format!("`{s}` is not a node count")))
            })
            .collect::<Result<_>>()?;
    }
    if let Some(p) = opts.panels {
        if p == 0 {
            return Err(Error::config("panels", "need at least one panel"));
        }
        cfg.panels = p;
    }
    if let Some(t1) = opts.t1 {
        cfg.t1 = Some(t1);
    }
    if let Some(l) = &opts.ladder {
        cfg.ladder = Some(parse_ladder_flag(l)?);
    }
    if let Some(s) = &opts.subset {
        cfg.subset = parse_subset_flag(s)?;
    }
    if let Some(tol) = opts.tol {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Error::config(
                "tol",
                format!("must be finite and non-negative, got {tol}"),
            ));
        }
        cfg.tol = tol;
    }
    if let Some(f) = &opts.format {
        cfg.format = OutputFormat::parse(f)?;
    }
    if let Some(w) = &opts.window {
        let (a, b) = parse_pair("window", w)?;
        cfg.window = Some(crate::geometry::TimeWindow::new(a, b).map_err(|e| Error::config("window", e.to_string()))?);
    }
    if let Some(t) = opts.t {
        cfg.t = Some(t);
    }
    if let Some(ts) = &opts.times {
        cfg.times = Some(parse_list("times", ts)?);
    }
    if let Some(t) = opts.tau {
        cfg.tau = Some(t);
    }
    if let Some(t) = opts.tau2 {
        cfg.tau2 = Some(t);
    }
    if let Some(r) = &opts.trange {
        cfg.trange = Some(parse_pair("trange", r)?);
    }
    if let Some(s) = opts.samples {
        cfg.samples = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Everything a command needs, resolved from the configuration.
struct Context {
    cfg: RunConfig,
    metric: MetricSpec,
    entry: Option<CatalogEntry>,
    grid: Grid,
    t1: f64,
}

impl Context {
    fn new(cfg: RunConfig) -> Result<Context> {
        let source = cfg.metric.clone().ok_or_else(|| {
            Error::config(
                "catalog",
                "no metric given; use --catalog, a config `catalog` or `[metric]`",
            )
        })?;
        let (mut metric, entry) = source.build()?;
        if let Some(w) = cfg.window {
            metric = metric.with_window(w);
        }
        let grid = cfg.grid_for(metric.dim())?;
        let w = metric.window();
        let t1 = match (cfg.t1, &entry) {
            (Some(t), _) => t,
            (None, Some(e)) => e.default_t1(),
            (None, None) => {
                if w.contains(0.0) {
                    0.0
                } else {
                    w.minus
                }
            }
        };
        if !w.contains(t1) {
            return Err(Error::config(
                "t1",
                format!("t1 = {t1} lies outside the window [{}, {}]", w.minus, w.plus),
            ));
        }
        Ok(Context {
            cfg,
            metric,
            entry,
            grid,
            t1,
        })
    }

    fn options(&self) -> CheckOptions {
        CheckOptions {
            grid: self.grid.clone(),
            rule: TimeRule {
                panels: self.cfg.panels,
            },
            tol: self.cfg.tol,
            hypothesis_samples: self.cfg.hypothesis_samples,
        }
    }

    /// Ladder moving away from `start`: forward (future) or backward (past).
    fn ladder(&self, start: f64, forward: bool) -> Result<Vec<f64>> {
        let w = self.metric.window();
        let edge = if forward { w.plus } else { w.minus };
        let dir = if forward { 1.0 } else { -1.0 };
        let spec = match &self.cfg.ladder {
            Some(l) => l.clone(),
            None if edge.is_finite() => {
                let span = (edge - start).abs();
                LadderSpec::Geometric {
                    start: start + dir * 0.5 * span,
                    endpoint: edge - dir * 1e-6 * span,
                    count: 6,
                }
            }
            None => LadderSpec::List((0..4).map(|k| start + dir * 2f64.powi(k)).collect()),
        };
        let ladder = match spec {
            LadderSpec::List(v) => v,
            LadderSpec::Geometric {
                start: a,
                endpoint: b,
                count,
            } => geometric_ladder(start, edge, a, b, count)?,
        };
        for &t in &ladder {
            if !((t - start) * dir > 0.0) {
                return Err(Error::config(
                    "ladder",
                    format!(
                        "ladder time {t} does not lie {} t1 = {start}",
                        if forward { "after" } else { "before" }
                    ),
                ));
            }
            if !w.contains(t) {
                return Err(Error::config(
                    "ladder",
                    format!("ladder time {t} lies outside the window [{}, {}]", w.minus, w.plus),
                ));
            }
        }
        if ladder.windows(2).any(|p| !((p[1] - p[0]) * dir > 0.0)) {
            return Err(Error::config("ladder", "ladder must move strictly away from t1"));
        }
        Ok(ladder)
    }

    fn reference(&self, q: Quantity) -> Option<f64> {
        if !self.cfg.subset.is_all() {
            return None;
        }
        self.entry.as_ref().and_then(|e| e.reference(&q).ok())
    }
}

/// `count` times from `a` to `b`. Distances to a finite `edge` shrink
/// geometrically; with an infinite edge, distances from `t1` grow
/// geometrically.
fn geometric_ladder(t1: f64, edge: f64, a: f64, b: f64, count: usize) -> Result<Vec<f64>> {
    if count == 1 {
        return Ok(vec![b]);
    }
    let (anchor, d0, d1) = if edge.is_finite() {
        (edge, edge - a, edge - b)
    } else {
        (t1, a - t1, b - t1)
    };
    if !(d0 != 0.0 && d1 != 0.0 && d0.signum() == d1.signum()) {
        return Err(Error::config(
            "ladder",
            format!("geometric ladder from {a} to {b} must stay on one side of {anchor}"),
        ));
    }
    let ratio = d1 / d0;
    let sign = if edge.is_finite() { -1.0 } else { 1.0 };
    Ok((0..count)
        .map(|k| match k {
            0 => a,
            k if k + 1 == count => b,
            k => anchor + sign * d0 * ratio.powf(k as f64 / (count - 1) as f64),
        })
        .collect())
}

/// Column-oriented table printed as CSV or as `column = v1,v2,...` lines.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn render(&self, format: OutputFormat) -> String {
        let mut out = String::new();
        match format {
            OutputFormat::Csv => {
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for r in &self.rows {
                    out.push_str(&r.join(","));
                    out.push('\n');
                }
            }
            OutputFormat::Kv => {
                for (i, c) in self.columns.iter().enumerate() {
                    let vals: Vec<&str> = self.rows.iter().map(|r| r[i].as_str()).collect();
                    let _ = writeln!(out, "{c} = {}", vals.join(","));
                }
            }
        }
        out
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "unavailable".to_string(), |x| x.to_string())
}

fn execute(cli: &Cli) -> Result<(i32, String, String)> {
    if let Command::Catalog {
        command: CatalogCommand::List,
    } = cli.command
    {
        return Ok((0, catalog_listing(), String::new()));
    }
    let cfg = merged_config(&cli.opts)?;
    let ctx = Context::new(cfg)?;
    let format = ctx.cfg.format;
    let e = &ctx.cfg.subset;
    let m = &ctx.metric;
    match &cli.command {
        Command::Catalog { .. } => unreachable!("handled above"),
        Command::Info => Ok((0, info(&ctx)?, String::new())),
        Command::SliceVolume => {
            let t = ctx.cfg.t.unwrap_or(ctx.t1);
            let v = slice_volume_with_error(m, t, e, &ctx.grid)?;
            let mut table = Table::new(vec!["t", "slice_volume", "error_estimate", "reference"]);
            table.push(vec![
                t.to_string(),
                v.value.to_string(),
                v.error_estimate.to_string(),
                opt(ctx.reference(Quantity::SliceVolume { t })),
            ]);
            Ok((0, table.render(format), String::new()))
        }
        Command::Sweep => {
            let times = match &ctx.cfg.times {
                Some(ts) => ts.clone(),
                None => std::iter::once(ctx.t1).chain(ctx.ladder(ctx.t1, true)?).collect(),
            };
            let s = volume_sweep(m, &times, e, &ctx.grid)?;
            let mut table = Table::new(vec!["t", "slice_volume", "rate", "reference_volume"]);
            for k in 0..s.times.len() {
                table.push(vec![
                    s.times[k].to_string(),
                    s.volumes[k].to_string(),
                    s.rates[k].to_string(),
                    opt(ctx.reference(Quantity::SliceVolume { t: s.times[k] })),
                ]);
            }
            Ok((0, table.render(format), String::new()))
        }
        Command::Cylinder => {
            let ladder = ctx.ladder(ctx.t1, true)?;
            let q = cylinder_ladder(m, ctx.t1, &ladder, e, &ctx.grid, TimeRule { panels: ctx.cfg.panels })?;
            let mut table = Table::new(vec!["t1", "T", "cylinder_volume", "error_estimate", "reference"]);
            for (t, r) in ladder.iter().zip(&q) {
                table.push(vec![
                    ctx.t1.to_string(),
                    t.to_string(),
                    r.value.to_string(),
                    r.error_estimate.to_string(),
                    opt(ctx.reference(Quantity::CylinderVolume { t1: ctx.t1, t2: *t })),
                ]);
            }
            Ok((0, table.render(format), String::new()))
        }
        Command::Curvature => {
            let times = match (&ctx.cfg.times, ctx.cfg.t) {
                (Some(ts), _) => ts.clone(),
                (None, Some(t)) => vec![t],
                (None, None) => vec![ctx.t1],
            };
            let points = subset_points(m, e, &ctx.grid)?;
            let homogeneous = ctx.entry.as_ref().is_some_and(|en| en.is_homogeneous());
            let mut table = Table::new(vec!["t", "min_H", "max_H", "reference_H"]);
            for t in times {
                m.check_time(t)?;
                let (lo, hi) = m.mean_curvature_extrema_at(t, &points)?;
                let reference = if homogeneous {
                    ctx.entry
                        .as_ref()
                        .and_then(|en| en.reference(&Quantity::MeanCurvature { t, x: m.origin() }).ok())
                } else {
                    None
                };
                table.push(vec![t.to_string(), lo.to_string(), hi.to_string(), opt(reference)]);
            }
            Ok((0, table.render(format), String::new()))
        }
        Command::Check { which } => {
            let report = run_check(&ctx, *which)?;
            let code = match report.verdict {
                Verdict::Holds => 0,
                Verdict::Violated => 2,
                Verdict::HypothesisNotMet => 3,
            };
            let out = match format {
                OutputFormat::Csv => report.to_csv(),
                OutputFormat::Kv => report.to_kv(),
            };
            let mut notes = String::new();
            for n in &report.notes {
                let _ = writeln!(notes, "note: {n}");
            }
            Ok((code, out, notes))
        }
    }
}

fn run_check(ctx: &Context, which: CheckKind) -> Result<BoundReport> {
    let m = &ctx.metric;
    let e = &ctx.cfg.subset;
    let opts = ctx.options();
    match which {
        CheckKind::Thm01Future => check_thm01_future(m, ctx.t1, &ctx.ladder(ctx.t1, true)?, e, &opts),
        CheckKind::Thm01Past => check_thm01_past(m, ctx.t1, &ctx.ladder(ctx.t1, false)?, e, &opts),
        CheckKind::Thm12 => check_thm12(m, ctx.t1, &ctx.ladder(ctx.t1, true)?, e, &opts),
        CheckKind::RiemannI => check_riemannian(m, ctx.t1, &ctx.ladder(ctx.t1, true)?, e, &opts, RiemannCase::I),
        CheckKind::RiemannII => check_riemannian(m, ctx.t1, &ctx.ladder(ctx.t1, true)?, e, &opts, RiemannCase::II),
        CheckKind::Remark2 => {
            if !e.is_all() {
                return Err(Error::config(
                    "subset",
                    "the mean-curvature time check uses whole slices",
                ));
            }
            let w = m.window();
            let (a, b) = match ctx.cfg.trange {
                Some(r) => r,
                None if w.plus.is_finite() => (ctx.t1, ctx.t1 + 0.9 * (w.plus - ctx.t1)),
                None => return Err(Error::config("trange", "needed when the window has no finite end")),
            };
            let cmc = m.reparameterize_by_mean_curvature((a, b), ctx.cfg.samples)?;
            let cw = cmc.window();
            let (tau, tau2) = match (ctx.cfg.tau, ctx.cfg.tau2) {
                (Some(x), Some(y)) => (x, y),
                (Some(x), None) => (x, (2.0 * x).min(cw.plus)),
                (None, Some(y)) => (cw.minus.max(0.5 * y), y),
                (None, None) if cw.minus > 0.0 && 4.0 * cw.minus <= cw.plus => (2.0 * cw.minus, 4.0 * cw.minus),
                (None, None) => {
                    let span = cw.plus - cw.minus;
                    (cw.minus + span / 3.0, cw.minus + 2.0 * span / 3.0)
                }
            };
            check_remark_sec2(&cmc, tau, tau2, &opts)
        }
    }
}

fn info(ctx: &Context) -> Result<String> {
    let m = &ctx.metric;
    let mut out = String::new();
    match &ctx.entry {
        Some(e) => {
            let _ = writeln!(out, "catalog = {}", e.name);
            for (k, v) in &e.params {
                let _ = writeln!(out, "params.{k} = {v}");
            }
        }
        None => {
            let _ = writeln!(out, "catalog = inline");
        }
    }
    let _ = writeln!(out, "n = {}", m.dim());
    let _ = writeln!(out, "signature = {}", m.signature());
    match m.domain() {
        SpatialDomain::Torus { lengths } => {
            let l: Vec<String> = lengths.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "domain = torus {}", l.join("x"));
        }
        SpatialDomain::Homogeneous { sigma_volume } => {
            let _ = writeln!(out, "domain = homogeneous, sigma volume {sigma_volume}");
        }
    }
    let w = m.window();
    let _ = writeln!(out, "window = [{}, {}]", w.minus, w.plus);
    let _ = writeln!(out, "analytic_derivatives = {}", m.has_analytic_derivatives());
    let varying: Vec<String> = m
        .varying_axes()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v)
        .map(|(k, _)| format!("x{}", k + 1))
        .collect();
    let _ = writeln!(
        out,
        "depends_on = {}",
        if varying.is_empty() {
            "t only".to_string()
        } else {
            varying.join(",")
        }
    );
    let e = &ctx.cfg.subset;
    let g = effective_grid(m, e, &ctx.grid)?;
    let counts: Vec<String> = g.counts().iter().map(|c| c.to_string()).collect();
    let _ = writeln!(out, "grid = {}", counts.join("x"));
    let _ = writeln!(out, "subset = {}", subset_label(e));
    let _ = writeln!(out, "t1 = {}", ctx.t1);
    let points = subset_points(m, e, &ctx.grid)?;
    let (lo, hi) = m.mean_curvature_extrema_at(ctx.t1, &points)?;
    let _ = writeln!(out, "min_H = {lo}");
    let _ = writeln!(out, "max_H = {hi}");
    let v = slice_volume_with_error(m, ctx.t1, e, &ctx.grid)?;
    let _ = writeln!(out, "slice_volume = {}", v.value);
    if let Some(r) = ctx.reference(Quantity::SliceVolume { t: ctx.t1 }) {
        let _ = writeln!(out, "reference_slice_volume = {r}");
    }
    Ok(out)
}

fn catalog_listing() -> String {
    let mut out = String::new();
    for e in entries() {
        let _ = writeln!(out, "{}", e.name);
        let _ = writeln!(out, "    {}", e.summary);
        for p in e.params {
            let _ = writeln!(out, "    {:<8} default {:<20} {}", p.name, p.default, p.meaning);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_ladders() {
        let l = geometric_ladder(0.0, 1.0, 0.5, 1.0 - 1e-6, 6).unwrap();
        assert_eq!(l.len(), 6);
        assert_eq!(l[0], 0.5);
        assert_eq!(l[5], 1.0 - 1e-6);
        let gaps: Vec<f64> = l.iter().map(|t| 1.0 - t).collect();
        for w in gaps.windows(3) {
            assert!(((w[1] / w[0]) / (w[2] / w[1]) - 1.0).abs() < 1e-9);
        }
        let l = geometric_ladder(0.0, f64::INFINITY, 1.0, 8.0, 4).unwrap();
        for (got, want) in l.iter().zip([1.0, 2.0, 4.0, 8.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(geometric_ladder(0.0, 1.0, 0.5, 1.5, 3).is_err());
    }

    #[test]
    fn flags_parse() {
        assert_eq!(
            parse_subset_flag("0:0.5,0:1").unwrap(),
            SpatialSubset::Box(vec![(0.0, 0.5), (0.0, 1.0)])
        );
        assert!(parse_subset_flag("0-0.5").is_err());
        assert_eq!(
            parse_ladder_flag("geom:0.5,0.9,3").unwrap(),
            LadderSpec::Geometric {
                start: 0.5,
                endpoint: 0.9,
                count: 3
            }
        );
        assert_eq!(parse_pair("window", "-inf,1").unwrap(), (f64::NEG_INFINITY, 1.0));
    }
}
