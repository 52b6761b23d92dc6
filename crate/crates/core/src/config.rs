//! Run configuration: TOML files and their validation.
//!
//! ```toml
//! catalog = "flrw-crunch"
//! grid = 32            # or [64, 1, 1]
//! panels = 20
//! t1 = 0.0
//! ladder = { start = 0.5, endpoint = 0.9999, count = 6 }   # or [0.5, 0.9]
//! subset = [[0.0, 0.5], [0.0, 1.0], [0.0, 1.0]]
//! tol = 1e-9
//! format = "csv"
//!
//! [params]
//! q = 0.5
//! ```
//!
//! An inline metric replaces `catalog`:
//!
//! ```toml
//! [metric]
//! n = 2
//! signature = "lorentzian"
//! psi = "0"
//! sigma = ["(1-t)^2", "0", "0", "(1-t)^2"]
//! lengths = [1.0, 1.0]      # or volume = 2.0 for a homogeneous slice
//! window = [-inf, 1.0]
//! ```

use std::path::Path;

use toml::{Table, Value};

use crate::catalog::{make, ParamValue, Params};
use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::geometry::{MetricSpec, ScalarField2, Signature, TimeWindow};
use crate::numerics::{Grid, SpatialDomain};
use crate::volume::SpatialSubset;

#[derive(Debug, Clone, PartialEq)]
pub struct InlineMetric {
    pub n: usize,
    pub signature: Signature,
    pub psi: String,
    /// Row-major `n × n` expression strings.
    pub sigma: Vec<String>,
    pub domain: SpatialDomain,
    pub window: TimeWindow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricSource {
    Catalog { name: String, params: Params },
    Inline(InlineMetric),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LadderSpec {
    List(Vec<f64>),
    /// `count` times from `start` to `endpoint`, closing in geometrically
    /// on the window edge (or spreading geometrically from `t1` when the
    /// edge is infinite).
    Geometric {
        start: f64,
        endpoint: f64,
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Kv,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "kv" => Ok(OutputFormat::Kv),
            other => Err(Error::config(
                "format",
                format!("expected `csv` or `kv`, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub metric: Option<MetricSource>,
    /// Nodes per axis; a single value applies to every axis.
    pub grid: Vec<usize>,
    pub panels: usize,
    pub t1: Option<f64>,
    pub ladder: Option<LadderSpec>,
    pub subset: SpatialSubset,
    pub tol: f64,
    pub format: OutputFormat,
    /// Time for single-slice commands.
    pub t: Option<f64>,
    /// Times for `sweep`.
    pub times: Option<Vec<f64>>,
    pub window: Option<TimeWindow>,
    pub tau: Option<f64>,
    pub tau2: Option<f64>,
    /// Original-time range for the mean-curvature reparameterisation.
    pub trange: Option<(f64, f64)>,
    pub samples: usize,
    pub hypothesis_samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            metric: None,
            grid: vec![32],
            panels: 20,
            t1: None,
            ladder: None,
            subset: SpatialSubset::All,
            tol: 1e-9,
            format: OutputFormat::Csv,
            t: None,
            times: None,
            window: None,
            tau: None,
            tau2: None,
            trange: None,
            samples: 24,
            hypothesis_samples: 16,
        }
    }
}

fn type_error(key: &str, expected: &str, got: &Value) -> Error {
    Error::config(key, format!("expected {expected}, got {}", got.type_str()))
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        Value::String(s) => match s.as_str() {
            "inf" | "+inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            _ => Err(type_error(key, "a number", v)),
        },
        other => Err(type_error(key, "a number", other)),
    }
}

fn as_finite(key: &str, v: &Value) -> Result<f64> {
    let x = as_f64(key, v)?;
    if !x.is_finite() {
        return Err(Error::config(key, format!("must be finite, got {x}")));
    }
    Ok(x)
}

fn as_count(key: &str, v: &Value) -> Result<usize> {
    match v {
        Value::Integer(i) if *i >= 1 => Ok(*i as usize),
        Value::Integer(i) => Err(Error::config(key, format!("must be at least 1, got {i}"))),
        other => Err(type_error(key, "a positive integer", other)),
    }
}

fn as_str<'a>(key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| type_error(key, "a string", v))
}

fn as_array<'a>(key: &str, v: &'a Value) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| type_error(key, "an array", v))
}

fn as_pair(key: &str, v: &Value) -> Result<(f64, f64)> {
    let a = as_array(key, v)?;
    if a.len() != 2 {
        return Err(Error::config(key, format!("expected two numbers, got {}", a.len())));
    }
    Ok((
        as_f64(&format!("{key}[0]"), &a[0])?,
        as_f64(&format!("{key}[1]"), &a[1])?,
    ))
}

fn as_window(key: &str, v: &Value) -> Result<TimeWindow> {
    let (a, b) = match v {
        Value::Table(t) => {
            let get = |k: &str| t.get(k).ok_or_else(|| Error::config(format!("{key}.{k}"), "missing"));
            (
                as_f64(&format!("{key}.minus"), get("minus")?)?,
                as_f64(&format!("{key}.plus"), get("plus")?)?,
            )
        }
        _ => as_pair(key, v)?,
    };
    TimeWindow::new(a, b).map_err(|e| Error::config(key, e.to_string()))
}

fn parse_grid(key: &str, v: &Value) -> Result<Vec<usize>> {
    match v {
        Value::Array(items) => {
            if items.is_empty() {
                return Err(Error::config(key, "empty grid"));
            }
            items
                .iter()
                .enumerate()
                .map(|(i, x)| as_count(&format!("{key}[{i}]"), x))
                .collect()
        }
        other => Ok(vec![as_count(key, other)?]),
    }
}

fn parse_ladder(key: &str, v: &Value) -> Result<LadderSpec> {
    match v {
        Value::Array(items) => Ok(LadderSpec::List(
            items
                .iter()
                .enumerate()
                .map(|(i, x)| as_finite(&format!("{key}[{i}]"), x))
                .collect::<Result<_>>()?,
        )),
        Value::Table(t) => {
            let get = |k: &str| t.get(k).ok_or_else(|| Error::config(format!("{key}.{k}"), "missing"));
            for k in t.keys() {
                if !["start", "endpoint", "count"].contains(&k.as_str()) {
                    return Err(Error::config(format!("{key}.{k}"), "unknown key"));
                }
            }
            let count = as_count(&format!("{key}.count"), get("count")?)?;
            Ok(LadderSpec::Geometric {
                start: as_finite(&format!("{key}.start"), get("start")?)?,
                endpoint: as_finite(&format!("{key}.endpoint"), get("endpoint")?)?,
                count,
            })
        }
        other => Err(type_error(key, "an array or a {start, endpoint, count} table", other)),
    }
}

fn parse_subset(key: &str, v: &Value) -> Result<SpatialSubset> {
    match v {
        Value::String(s) if s == "all" => Ok(SpatialSubset::All),
        Value::Array(items) => Ok(SpatialSubset::Box(
            items
                .iter()
                .enumerate()
                .map(|(i, x)| as_pair(&format!("{key}[{i}]"), x))
                .collect::<Result<_>>()?,
        )),
        other => Err(type_error(key, "\"all\" or an array of [a, b] intervals", other)),
    }
}

fn parse_params(key: &str, v: &Value) -> Result<Params> {
    let t = v.as_table().ok_or_else(|| type_error(key, "a table", v))?;
    t.iter()
        .map(|(k, x)| {
            let value = match x {
                Value::String(s) => ParamValue::Text(s.clone()),
                other => ParamValue::Number(as_f64(&format!("{key}.{k}"), other)?),
            };
            Ok((k.clone(), value))
        })
        .collect()
}

fn parse_inline(key: &str, v: &Value) -> Result<InlineMetric> {
    let t = v.as_table().ok_or_else(|| type_error(key, "a table", v))?;
    let path = |k: &str| format!("{key}.{k}");
    for k in t.keys() {
        if !["n", "signature", "psi", "sigma", "lengths", "volume", "window"].contains(&k.as_str()) {
            return Err(Error::config(path(k), "unknown key"));
        }
    }
    let need = |k: &str| t.get(k).ok_or_else(|| Error::config(path(k), "missing"));
    let n = as_count(&path("n"), need("n")?)?;
    let signature = match t.get("signature") {
        None => Signature::Lorentzian,
        Some(s) => match as_str(&path("signature"), s)? {
            "lorentzian" => Signature::Lorentzian,
            "riemannian" => Signature::Riemannian,
            other => {
                return Err(Error::config(
                    path("signature"),
                    format!("expected `lorentzian` or `riemannian`, got `{other}`"),
                ))
            }
        },
    };
    let psi = as_str(&path("psi"), need("psi")?)?.to_string();
    let sigma: Vec<String> = as_array(&path("sigma"), need("sigma")?)?
        .iter()
        .enumerate()
        .map(|(i, x)| as_str(&format!("{}[{i}]", path("sigma")), x).map(str::to_string))
        .collect::<Result<_>>()?;
    if sigma.len() != n * n {
        return Err(Error::config(
            path("sigma"),
            format!("expected {} entries (row-major {n}x{n}), got {}", n * n, sigma.len()),
        ));
    }
    let domain = match (t.get("lengths"), t.get("volume")) {
        (Some(_), Some(_)) => return Err(Error::config(path("volume"), "give either `lengths` or `volume`")),
        (_, Some(v)) => SpatialDomain::homogeneous(as_f64(&path("volume"), v)?)
            .map_err(|e| Error::config(path("volume"), e.to_string()))?,
        (Some(l), None) => {
            let lengths: Vec<f64> = as_array(&path("lengths"), l)?
                .iter()
                .enumerate()
                .map(|(i, x)| as_f64(&format!("{}[{i}]", path("lengths")), x))
                .collect::<Result<_>>()?;
            if lengths.len() != n {
                return Err(Error::config(path("lengths"), format!("expected {n} lengths")));
            }
            SpatialDomain::torus(lengths).map_err(|e| Error::config(path("lengths"), e.to_string()))?
        }
        (None, None) => SpatialDomain::torus(vec![1.0; n])?,
    };
    let window = match t.get("window") {
        Some(w) => as_window(&path("window"), w)?,
        None => TimeWindow::unbounded(),
    };
    Ok(InlineMetric {
        n,
        signature,
        psi,
        sigma,
        domain,
        window,
    })
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<RunConfig> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("<file>", e.message().to_string()))?;
        let mut cfg = RunConfig::default();
        for (key, v) in &table {
            let k = key.as_str();
            match k {
                "catalog" | "params" | "metric" => {}
                "grid" => cfg.grid = parse_grid(k, v)?,
                "panels" => cfg.panels = as_count(k, v)?,
                "t1" => cfg.t1 = Some(as_finite(k, v)?),
                "ladder" => cfg.ladder = Some(parse_ladder(k, v)?),
                "subset" => cfg.subset = parse_subset(k, v)?,
                "tol" => {
                    let tol = as_f64(k, v)?;
                    if !(tol >= 0.0 && tol.is_finite()) {
                        return Err(Error::config(k, format!("must be finite and non-negative, got {tol}")));
                    }
                    cfg.tol = tol;
                }
                "format" => cfg.format = OutputFormat::parse(as_str(k, v)?)?,
                "t" => cfg.t = Some(as_finite(k, v)?),
                "times" => {
                    cfg.times = Some(
                        as_array(k, v)?
                            .iter()
                            .enumerate()
                            .map(|(i, x)| as_finite(&format!("times[{i}]"), x))
                            .collect::<Result<_>>()?,
                    )
                }
                "window" => cfg.window = Some(as_window(k, v)?),
                "tau" => cfg.tau = Some(as_finite(k, v)?),
                "tau2" => cfg.tau2 = Some(as_finite(k, v)?),
                "trange" => cfg.trange = Some(as_pair(k, v)?),
                "samples" => cfg.samples = as_count(k, v)?,
                "hypothesis_samples" => cfg.hypothesis_samples = as_count(k, v)?,
                other => return Err(Error::config(other, "unknown key")),
            }
        }
        cfg.metric = match (table.get("catalog"), table.get("metric")) {
            (Some(_), Some(_)) => {
                return Err(Error::config("metric", "give either `catalog` or `[metric]`, not both"));
            }
            (Some(c), None) => Some(MetricSource::Catalog {
                name: as_str("catalog", c)?.to_string(),
                params: match table.get("params") {
                    Some(p) => parse_params("params", p)?,
                    None => Params::new(),
                },
            }),
            (None, Some(m)) => {
                if table.contains_key("params") {
                    return Err(Error::config("params", "only valid together with `catalog`"));
                }
                Some(MetricSource::Inline(parse_inline("metric", m)?))
            }
            (None, None) => {
                if table.contains_key("params") {
                    return Err(Error::config("params", "only valid together with `catalog`"));
                }
                None
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        RunConfig::from_toml_str(&text)
    }

    /// Checks that need no metric: window against `t1`, ladder order.
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() || self.grid.contains(&0) {
            return Err(Error::config("grid", "every axis needs at least one node"));
        }
        if let (Some(w), Some(t1)) = (self.window, self.t1) {
            if !(w.plus > t1) || w.minus > t1 {
                return Err(Error::config(
                    "window",
                    format!(
                        "window [{}, {}] must contain t1 = {t1} with room after it",
                        w.minus, w.plus
                    ),
                ));
            }
        }
        if let Some(MetricSource::Inline(m)) = &self.metric {
            if let Some(t1) = self.t1 {
                if !(m.window.plus > t1) || m.window.minus > t1 {
                    return Err(Error::config(
                        "metric.window",
                        format!(
                            "window [{}, {}] must contain t1 = {t1} with room after it",
                            m.window.minus, m.window.plus
                        ),
                    ));
                }
            }
        }
        match &self.ladder {
            Some(LadderSpec::List(v)) if v.is_empty() => return Err(Error::config("ladder", "empty ladder")),
            Some(LadderSpec::Geometric { start, endpoint, .. }) if start == endpoint => {
                return Err(Error::config("ladder", "start and endpoint coincide"))
            }
            _ => {}
        }
        Ok(())
    }

    /// Per-axis node counts for an `n`-dimensional slice.
    pub fn grid_for(&self, n: usize) -> Result<Grid> {
        match self.grid.as_slice() {
            [m] => Grid::uniform(n, *m),
            counts if counts.len() == n => Grid::new(counts.to_vec()),
            counts => Err(Error::config(
                "grid",
                format!("{} counts given for a {n}-dimensional slice", counts.len()),
            )),
        }
    }
}

/// Points used to check that an inline sigma is symmetric.
const SYMMETRY_PROBES: [f64; 3] = [0.137, 0.419, 0.853];

impl InlineMetric {
    /// Parse the expressions, validate symmetry of sigma and build the metric.
    pub fn build(&self) -> Result<MetricSpec> {
        let n = self.n;
        let parse = |key: String, src: &str| -> Result<Expr> {
            Expr::parse(src, n).map_err(|e| {
                Error::config(
                    key,
                    format!(
                        "{e}; near `{}`",
                        src.get(e.offset..).unwrap_or("").chars().take(12).collect::<String>()
                    ),
                )
            })
        };
        let psi = parse("metric.psi".into(), &self.psi)?;
        let exprs: Vec<Expr> = self
            .sigma
            .iter()
            .enumerate()
            .map(|(k, s)| parse(format!("metric.sigma[{k}]"), s))
            .collect::<Result<_>>()?;
        let probe_times: Vec<f64> = self.window.probe_times();
        let lengths: Vec<f64> = match &self.domain {
            SpatialDomain::Torus { lengths } => lengths.clone(),
            SpatialDomain::Homogeneous { .. } => vec![1.0; n],
        };
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (&exprs[i * n + j], &exprs[j * n + i]);
                if a == b {
                    continue;
                }
                for &t in &probe_times {
                    for p in SYMMETRY_PROBES {
                        let x: Vec<f64> = lengths
                            .iter()
                            .enumerate()
                            .map(|(k, l)| l * ((p + 0.31 * k as f64) % 1.0))
                            .collect();
                        let (va, vb) = (a.eval(t, &x), b.eval(t, &x));
                        let same = match (va, vb) {
                            (Ok(u), Ok(v)) => (u - v).abs() <= 1e-12 * (1.0 + u.abs().max(v.abs())),
                            (Err(_), Err(_)) => true,
                            _ => false,
                        };
                        if !same {
                            return Err(Error::config(
                                format!("metric.sigma[{}]", j * n + i),
                                format!(
                                    "sigma is not symmetric: entry ({},{}) differs from ({},{})",
                                    j + 1,
                                    i + 1,
                                    i + 1,
                                    j + 1
                                ),
                            ));
                        }
                    }
                }
            }
        }
        let mut packed = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                packed.push(ScalarField2::from_expr(exprs[i * n + j].clone(), n));
            }
        }
        if self.domain.is_homogeneous() && (0..n).any(|k| psi.depends_on(Var::Space(k))) {
            return Err(Error::config(
                "metric.psi",
                "a homogeneous slice needs an x-independent psi",
            ));
        }
        MetricSpec::new(
            n,
            self.signature,
            ScalarField2::from_expr(psi, n),
            packed,
            self.domain.clone(),
            self.window,
        )
    }
}

impl MetricSource {
    /// Build the metric and, for catalog entries, the entry with its closed forms.
    pub fn build(&self) -> Result<(MetricSpec, Option<crate::catalog::CatalogEntry>)> {
        match self {
            MetricSource::Catalog { name, params } => {
                let (m, e) = make(name, params)?;
                Ok((m, Some(e)))
            }
            MetricSource::Inline(inline) => Ok((inline.build()?, None)),
        }
    }
}
