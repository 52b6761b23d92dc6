//! Built-in metrics with closed-form geometry, used as oracles.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::geometry::{MetricSpec, ScalarField2, Signature, TimeWindow};
use crate::numerics::SpatialDomain;

/// A catalog parameter value.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

impl ParamValue {
    /// Numbers where they parse, text otherwise.
    pub fn parse(raw: &str) -> Self {
        match raw.trim().parse::<f64>() {
            Ok(v) => ParamValue::Number(v),
            Err(_) => ParamValue::Text(raw.trim().to_string()),
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Number(v) => write!(f, "{v}"),
            ParamValue::Text(s) => write!(f, "{s}"),
        }
    }
}

pub type Params = BTreeMap<String, ParamValue>;

/// Quantities with possible closed forms.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    /// Mean curvature of the slice at `t`, point `x` (ignored when homogeneous).
    MeanCurvature {
        t: f64,
        x: Vec<f64>,
    },
    SliceVolume {
        t: f64,
    },
    CylinderVolume {
        t1: f64,
        t2: f64,
    },
    /// Supremum of coordinate time-line lengths over `[t1, t2]`.
    Gamma1 {
        t1: f64,
        t2: f64,
    },
}

impl Quantity {
    fn name(&self) -> &'static str {
        match self {
            Quantity::MeanCurvature { .. } => "H",
            Quantity::SliceVolume { .. } => "slice volume",
            Quantity::CylinderVolume { .. } => "cylinder volume",
            Quantity::Gamma1 { .. } => "gamma1",
        }
    }
}

/// Parameter description for `catalog list`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamInfo {
    pub name: &'static str,
    pub default: &'static str,
    pub meaning: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntryInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: Vec<ParamInfo>,
}

const fn p(name: &'static str, default: &'static str, meaning: &'static str) -> ParamInfo {
    ParamInfo { name, default, meaning }
}

/// Every entry with its parameter schema.
pub fn entries() -> Vec<EntryInfo> {
    let size = [
        p("length", "1", "torus side length L"),
        p(
            "volume",
            "none",
            "total sigma-volume; replaces the torus by a homogeneous closed slice",
        ),
    ];
    let power = [
        p("n", "3", "spatial dimension"),
        p("q", "0.6666666666666666", "scale factor exponent, a = (T+ - t)^q"),
        p("tplus", "1", "crunch time T+"),
    ];
    vec![
        EntryInfo {
            name: "flrw-crunch",
            summary: "Lorentzian, psi = 0, sigma = (T+ - t)^(2q) delta; H = nq/(T+ - t)",
            params: power.iter().chain(&size).cloned().collect(),
        },
        EntryInfo {
            name: "minkowski-strip",
            summary: "Lorentzian, psi = 0, sigma = delta on [tminus, tplus]; H = 0",
            params: [
                p("n", "2", "spatial dimension"),
                p("tminus", "0", "window start"),
                p("tplus", "3", "window end"),
            ]
            .into_iter()
            .chain(size.iter().cloned())
            .collect(),
        },
        EntryInfo {
            name: "conformal-homogeneous",
            summary: "Lorentzian, psi = psi0(t), sigma = delta; H = -n psi0' e^(-psi0)",
            params: [
                p("n", "2", "spatial dimension"),
                p("psi", "-t", "expression in t"),
                p("tminus", "-inf", "window start"),
                p("tplus", "inf", "window end"),
            ]
            .into_iter()
            .chain(size.iter().cloned())
            .collect(),
        },
        EntryInfo {
            name: "perturbed-flrw",
            summary: "flrw-crunch with sigma scaled by (1 + eps sin(2 pi x1/L))^(2/n)",
            params: power
                .iter()
                .cloned()
                .chain([
                    p("length", "1", "torus side length L"),
                    p("epsilon", "0.1", "perturbation, 0 <= eps < 1"),
                ])
                .collect(),
        },
        EntryInfo {
            name: "perturbed-lapse",
            summary: "flrw-crunch with psi = delta sin(2 pi x1/L); H = e^(-psi) nq/(T+ - t)",
            params: power
                .iter()
                .cloned()
                .chain([
                    p("length", "1", "torus side length L"),
                    p("delta", "0.1", "lapse perturbation amplitude"),
                ])
                .collect(),
        },
        EntryInfo {
            name: "riemannian-cusp",
            summary: "Riemannian, psi = 0, sigma = e^(-2t) delta; H = -n",
            params: [p("n", "2", "spatial dimension")]
                .into_iter()
                .chain(size.iter().cloned())
                .collect(),
        },
        EntryInfo {
            name: "riemannian-expanding",
            summary: "Riemannian, psi = 0, sigma = e^(2t) delta; H = n",
            params: [p("n", "2", "spatial dimension")]
                .into_iter()
                .chain(size.iter().cloned())
                .collect(),
        },
    ]
}

pub fn names() -> Vec<&'static str> {
    entries().into_iter().map(|e| e.name).collect()
}

#[derive(Debug, Clone)]
enum Formula {
    Crunch {
        n: usize,
        q: f64,
        tplus: f64,
        volume: f64,
    },
    Minkowski {
        volume: f64,
    },
    Conformal {
        n: usize,
        psi: Expr,
        dpsi: Expr,
        volume: f64,
    },
    PerturbedFlrw {
        n: usize,
        q: f64,
        tplus: f64,
        volume: f64,
        epsilon: f64,
    },
    PerturbedLapse {
        n: usize,
        q: f64,
        tplus: f64,
        length: f64,
        delta: f64,
    },
    Cusp {
        n: usize,
        volume: f64,
    },
    Expanding {
        n: usize,
        volume: f64,
    },
}

/// A constructed catalog metric together with its closed forms.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    /// All parameters after defaults were applied.
    pub params: Params,
    formula: Formula,
}

struct Reader<'a> {
    entry: &'a str,
    given: &'a Params,
    used: Params,
}

impl<'a> Reader<'a> {
    fn number(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = match self.given.get(key) {
            None => default,
            Some(ParamValue::Number(v)) => *v,
            Some(ParamValue::Text(s)) => match s.as_str() {
                "inf" | "+inf" => f64::INFINITY,
                "-inf" => f64::NEG_INFINITY,
                _ => return Err(self.bad(key, format!("expected a number, got `{s}`"))),
            },
        };
        if v.is_nan() {
            return Err(self.bad(key, "NaN is not a valid value"));
        }
        self.used.insert(key.to_string(), ParamValue::Number(v));
        Ok(v)
    }

    fn optional_number(&mut self, key: &str) -> Result<Option<f64>> {
        if self.given.contains_key(key) {
            self.number(key, 0.0).map(Some)
        } else {
            Ok(None)
        }
    }

    fn positive(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = self.number(key, default)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(self.bad(key, format!("must be positive and finite, got {v}")));
        }
        Ok(v)
    }

    fn finite(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = self.number(key, default)?;
        if !v.is_finite() {
            return Err(self.bad(key, format!("must be finite, got {v}")));
        }
        Ok(v)
    }

    fn dimension(&mut self, default: usize) -> Result<usize> {
        let v = self.number("n", default as f64)?;
        if !((1.0..=8.0).contains(&v) && v.fract() == 0.0) {
            return Err(self.bad("n", format!("must be an integer between 1 and 8, got {v}")));
        }
        Ok(v as usize)
    }

    fn text(&mut self, key: &str, default: &str) -> Result<String> {
        let v = match self.given.get(key) {
            None => default.to_string(),
            Some(ParamValue::Text(s)) => s.clone(),
            Some(ParamValue::Number(v)) => format!("{v:?}"),
        };
        self.used.insert(key.to_string(), ParamValue::Text(v.clone()));
        Ok(v)
    }

    fn bad(&self, key: &str, message: impl Into<String>) -> Error {
        Error::config(format!("params.{key}"), format!("{}: {}", self.entry, message.into()))
    }

    /// Torus side length, or a homogeneous domain when `volume` is given.
    fn domain(&mut self, n: usize, allow_volume: bool) -> Result<(SpatialDomain, f64)> {
        let volume = if allow_volume {
            self.optional_number("volume")?
        } else {
            None
        };
        match volume {
            Some(v) => {
                if self.given.contains_key("length") {
                    return Err(self.bad("volume", "give either `length` or `volume`, not both"));
                }
                if !(v > 0.0 && v.is_finite()) {
                    return Err(self.bad("volume", format!("must be positive and finite, got {v}")));
                }
                Ok((SpatialDomain::homogeneous(v)?, v))
            }
            None => {
                let l = self.positive("length", 1.0)?;
                Ok((SpatialDomain::torus(vec![l; n])?, l.powi(n as i32)))
            }
        }
    }

    fn finish(self) -> Result<Params> {
        for key in self.given.keys() {
            if !self.used.contains_key(key) {
                return Err(self.bad(key, "unknown parameter"));
            }
        }
        Ok(self.used)
    }
}

/// `I₀(z)` by its power series (fine for the moderate arguments used here).
fn bessel_i0(z: f64) -> f64 {
    let y = 0.25 * z * z;
    let (mut term, mut sum) = (1.0f64, 1.0f64);
    for k in 1..200 {
        term *= y / (k * k) as f64;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

fn power_field(q: f64, tplus: f64) -> ScalarField2 {
    ScalarField2::of_time(
        format!("({tplus:?}-t)^{:?}", 2.0 * q),
        move |t| (tplus - t).powf(2.0 * q),
        move |t| -2.0 * q * (tplus - t).powf(2.0 * q - 1.0),
    )
}

fn exp_field(rate: f64) -> ScalarField2 {
    ScalarField2::of_time(
        format!("exp({rate:?}*t)"),
        move |t| (rate * t).exp(),
        move |t| rate * (rate * t).exp(),
    )
}

/// Build a catalog metric.
pub fn make(name: &str, params: &Params) -> Result<(MetricSpec, CatalogEntry)> {
    let mut r = Reader {
        entry: name,
        given: params,
        used: Params::new(),
    };
    let (spec, formula) = match name {
        "flrw-crunch" => {
            let n = r.dimension(3)?;
            let q = r.positive("q", 2.0 / 3.0)?;
            let tplus = r.finite("tplus", 1.0)?;
            let (domain, volume) = r.domain(n, true)?;
            let spec = MetricSpec::conformally_flat(
                n,
                Signature::Lorentzian,
                ScalarField2::constant(0.0),
                power_field(q, tplus),
                domain,
                TimeWindow::new(f64::NEG_INFINITY, tplus)?,
            )?;
            (spec, Formula::Crunch { n, q, tplus, volume })
        }
        "minkowski-strip" => {
            let n = r.dimension(2)?;
            let tminus = r.number("tminus", 0.0)?;
            let tplus = r.number("tplus", 3.0)?;
            let window = TimeWindow::new(tminus, tplus).map_err(|e| r.bad("tplus", e.to_string()))?;
            let (domain, volume) = r.domain(n, true)?;
            let spec = MetricSpec::conformally_flat(
                n,
                Signature::Lorentzian,
                ScalarField2::constant(0.0),
                ScalarField2::constant(1.0),
                domain,
                window,
            )?;
            (spec, Formula::Minkowski { volume })
        }
        "conformal-homogeneous" => {
            let n = r.dimension(2)?;
            let src = r.text("psi", "-t")?;
            let psi = Expr::parse(&src, n)?;
            if (0..n).any(|k| psi.depends_on(Var::Space(k))) {
                return Err(r.bad("psi", "must depend on t only"));
            }
            let tminus = r.number("tminus", f64::NEG_INFINITY)?;
            let tplus = r.number("tplus", f64::INFINITY)?;
            let window = TimeWindow::new(tminus, tplus).map_err(|e| r.bad("tplus", e.to_string()))?;
            let (domain, volume) = r.domain(n, true)?;
            let dpsi = psi.differentiate(Var::Time);
            let spec = MetricSpec::conformally_flat(
                n,
                Signature::Lorentzian,
                ScalarField2::from_expr(psi.clone(), n),
                ScalarField2::constant(1.0),
                domain,
                window,
            )?;
            (spec, Formula::Conformal { n, psi, dpsi, volume })
        }
        "perturbed-flrw" => {
            let n = r.dimension(3)?;
            let q = r.positive("q", 2.0 / 3.0)?;
            let tplus = r.finite("tplus", 1.0)?;
            let length = r.positive("length", 1.0)?;
            let epsilon = r.number("epsilon", 0.1)?;
            if !(0.0..1.0).contains(&epsilon) {
                return Err(r.bad("epsilon", format!("must satisfy 0 <= epsilon < 1, got {epsilon}")));
            }
            let k = 2.0 * PI / length;
            let e = 2.0 / n as f64;
            let value = move |t: f64, x: &[f64]| (tplus - t).powf(2.0 * q) * (1.0 + epsilon * (k * x[0]).sin()).powf(e);
            let sigma = ScalarField2::new(
                format!("({tplus:?}-t)^{:?}*(1+{epsilon:?}*sin({k:?}*x1))^{e:?}", 2.0 * q),
                value,
            )
            .with_time_derivative(move |t, x| {
                -2.0 * q * (tplus - t).powf(2.0 * q - 1.0) * (1.0 + epsilon * (k * x[0]).sin()).powf(e)
            })
            .with_space_derivatives(move |axis, t, x| {
                if axis != 0 {
                    return 0.0;
                }
                let s = 1.0 + epsilon * (k * x[0]).sin();
                (tplus - t).powf(2.0 * q) * e * s.powf(e - 1.0) * epsilon * k * (k * x[0]).cos()
            })
            .with_space_dependence(vec![0]);
            let spec = MetricSpec::conformally_flat(
                n,
                Signature::Lorentzian,
                ScalarField2::constant(0.0),
                sigma,
                SpatialDomain::torus(vec![length; n])?,
                TimeWindow::new(f64::NEG_INFINITY, tplus)?,
            )?;
            let volume = length.powi(n as i32);
            (
                spec,
                Formula::PerturbedFlrw {
                    n,
                    q,
                    tplus,
                    volume,
                    epsilon,
                },
            )
        }
        "perturbed-lapse" => {
            let n = r.dimension(3)?;
            let q = r.positive("q", 2.0 / 3.0)?;
            let tplus = r.finite("tplus", 1.0)?;
            let length = r.positive("length", 1.0)?;
            let delta = r.finite("delta", 0.1)?;
            let k = 2.0 * PI / length;
            let psi = ScalarField2::new(format!("{delta:?}*sin({k:?}*x1)"), move |_, x| delta * (k * x[0]).sin())
                .with_time_derivative(|_, _| 0.0)
                .with_space_derivatives(move |axis, _, x| if axis == 0 { delta * k * (k * x[0]).cos() } else { 0.0 })
                .with_space_dependence(vec![0]);
            let spec = MetricSpec::conformally_flat(
                n,
                Signature::Lorentzian,
                psi,
                power_field(q, tplus),
                SpatialDomain::torus(vec![length; n])?,
                TimeWindow::new(f64::NEG_INFINITY, tplus)?,
            )?;
            (
                spec,
                Formula::PerturbedLapse {
                    n,
                    q,
                    tplus,
                    length,
                    delta,
                },
            )
        }
        "riemannian-cusp" | "riemannian-expanding" => {
            let n = r.dimension(2)?;
            let (domain, volume) = r.domain(n, true)?;
            let cusp = name == "riemannian-cusp";
            let sigma = exp_field(if cusp { -2.0 } else { 2.0 });
            let spec = MetricSpec::conformally_flat(
                n,
                Signature::Riemannian,
                ScalarField2::constant(0.0),
                sigma,
                domain,
                TimeWindow::unbounded(),
            )?;
            let formula = if cusp {
                Formula::Cusp { n, volume }
            } else {
                Formula::Expanding { n, volume }
            };
            (spec, formula)
        }
        other => {
            return Err(Error::invalid(format!(
                "unknown catalog entry `{other}`; known entries: {}",
                names().join(", ")
            )))
        }
    };
    let params = r.finish()?;
    Ok((
        spec,
        CatalogEntry {
            name: name.to_string(),
            params,
            formula,
        },
    ))
}

fn power_cylinder(volume: f64, nq: f64, tplus: f64, t1: f64, t2: f64) -> f64 {
    volume * ((tplus - t1).powf(nq + 1.0) - (tplus - t2).powf(nq + 1.0)) / (nq + 1.0)
}

impl CatalogEntry {
    /// Closed-form value of `quantity`, or [`Error::Unavailable`].
    pub fn reference(&self, quantity: &Quantity) -> Result<f64> {
        use Formula::*;
        use Quantity::*;
        let unavailable = || Error::Unavailable {
            entry: self.name.clone(),
            quantity: quantity.name().to_string(),
        };
        let v = match (&self.formula, quantity) {
            (Crunch { n, q, tplus, .. }, MeanCurvature { t, .. })
            | (PerturbedFlrw { n, q, tplus, .. }, MeanCurvature { t, .. }) => *n as f64 * q / (tplus - t),
            (Crunch { n, q, tplus, volume }, SliceVolume { t })
            | (
                PerturbedFlrw {
                    n, q, tplus, volume, ..
                },
                SliceVolume { t },
            ) => volume * (tplus - t).powf(*n as f64 * q),
            (Crunch { n, q, tplus, volume }, CylinderVolume { t1, t2 }) => {
                power_cylinder(*volume, *n as f64 * q, *tplus, *t1, *t2)
            }
            (
                PerturbedFlrw {
                    n,
                    q,
                    tplus,
                    volume,
                    epsilon,
                },
                CylinderVolume { t1, t2 },
            ) => {
                if *epsilon != 0.0 {
                    return Err(unavailable());
                }
                power_cylinder(*volume, *n as f64 * q, *tplus, *t1, *t2)
            }
            (
                Crunch { .. } | PerturbedFlrw { .. } | Minkowski { .. } | Cusp { .. } | Expanding { .. },
                Gamma1 { t1, t2 },
            ) => t2 - t1,
            (Minkowski { .. }, MeanCurvature { .. }) => 0.0,
            (Minkowski { volume }, SliceVolume { .. }) => *volume,
            (Minkowski { volume }, CylinderVolume { t1, t2 }) => volume * (t2 - t1),
            (Conformal { n, psi, dpsi, .. }, MeanCurvature { t, .. }) => {
                let p = psi.eval(*t, &[])?;
                -(-p).exp() * *n as f64 * dpsi.eval(*t, &[])?
            }
            (Conformal { n, psi, volume, .. }, SliceVolume { t }) => volume * (*n as f64 * psi.eval(*t, &[])?).exp(),
            (Conformal { .. }, CylinderVolume { .. } | Gamma1 { .. }) => return Err(unavailable()),
            (
                PerturbedLapse {
                    n,
                    q,
                    tplus,
                    length,
                    delta,
                },
                MeanCurvature { t, x },
            ) => {
                let x1 = x
                    .first()
                    .copied()
                    .ok_or_else(|| Error::invalid("perturbed-lapse H needs a point"))?;
                let psi = delta * (2.0 * PI * x1 / length).sin();
                (-psi).exp() * *n as f64 * q / (tplus - t)
            }
            (
                PerturbedLapse {
                    n,
                    q,
                    tplus,
                    length,
                    delta,
                },
                SliceVolume { t },
            ) => {
                let nf = *n as f64;
                length.powi(*n as i32) * bessel_i0(nf * delta) * (tplus - t).powf(nf * q)
            }
            (
                PerturbedLapse {
                    n,
                    q,
                    tplus,
                    length,
                    delta,
                },
                CylinderVolume { t1, t2 },
            ) => {
                let nf = *n as f64;
                let v = length.powi(*n as i32) * bessel_i0((nf + 1.0) * delta);
                power_cylinder(v, nf * q, *tplus, *t1, *t2)
            }
            (PerturbedLapse { delta, .. }, Gamma1 { t1, t2 }) => delta.abs().exp() * (t2 - t1),
            (Cusp { n, .. }, MeanCurvature { .. }) => -(*n as f64),
            (Cusp { n, volume }, SliceVolume { t }) => volume * (-(*n as f64) * t).exp(),
            (Cusp { n, volume }, CylinderVolume { t1, t2 }) => {
                let nf = *n as f64;
                volume * ((-nf * t1).exp() - (-nf * t2).exp()) / nf
            }
            (Expanding { n, .. }, MeanCurvature { .. }) => *n as f64,
            (Expanding { n, volume }, SliceVolume { t }) => volume * (*n as f64 * t).exp(),
            (Expanding { n, volume }, CylinderVolume { t1, t2 }) => {
                let nf = *n as f64;
                volume * ((nf * t2).exp() - (nf * t1).exp()) / nf
            }
        };
        Ok(v)
    }

    /// Whether every slice is x-independent.
    pub fn is_homogeneous(&self) -> bool {
        match &self.formula {
            Formula::PerturbedFlrw { epsilon, .. } => *epsilon == 0.0,
            Formula::PerturbedLapse { delta, .. } => *delta == 0.0,
            _ => true,
        }
    }

    /// Start time used when none is given.
    pub fn default_t1(&self) -> f64 {
        match &self.formula {
            Formula::Minkowski { .. } => self.number_param("tminus").unwrap_or(0.0),
            Formula::Conformal { .. } => {
                let lo = self.number_param("tminus").unwrap_or(f64::NEG_INFINITY);
                if lo.is_finite() {
                    lo
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    }

    fn number_param(&self, key: &str) -> Option<f64> {
        match self.params.get(key) {
            Some(ParamValue::Number(v)) => Some(*v),
            _ => None,
        }
    }
}
