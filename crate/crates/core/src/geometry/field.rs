use std::fmt;
use std::sync::Arc;

use crate::expr::{EvalError, Expr, Var};

/// Pointwise function of `(t, x)`.
pub type FieldFn = Arc<dyn Fn(f64, &[f64]) -> Result<f64, EvalError> + Send + Sync>;
/// Spatial partial derivative: `(axis, t, x)`.
pub type AxisFieldFn = Arc<dyn Fn(usize, f64, &[f64]) -> Result<f64, EvalError> + Send + Sync>;

/// Which spatial coordinates a field may depend on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpaceDependence {
    /// Nothing is known; treat every axis as relevant.
    Unknown,
    /// Only these (0-based) axes; empty means x-independent.
    Only(Vec<usize>),
}

impl SpaceDependence {
    pub fn involves(&self, axis: usize) -> bool {
        match self {
            SpaceDependence::Unknown => true,
            SpaceDependence::Only(axes) => axes.contains(&axis),
        }
    }
}

/// Scalar field on spacetime with optional analytic partial derivatives.
/// Missing derivatives are filled in by finite differences where needed.
#[derive(Clone)]
pub struct ScalarField2 {
    label: String,
    value: FieldFn,
    dt: Option<FieldFn>,
    dx: Option<AxisFieldFn>,
    space: SpaceDependence,
}

impl fmt::Debug for ScalarField2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField2")
            .field("label", &self.label)
            .field("dt", &self.dt.is_some())
            .field("dx", &self.dx.is_some())
            .field("space", &self.space)
            .finish()
    }
}

impl ScalarField2 {
    pub fn new<F>(label: impl Into<String>, value: F) -> Self
    where
        F: Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
    {
        ScalarField2 {
            label: label.into(),
            value: Arc::new(move |t, x| Ok(value(t, x))),
            dt: None,
            dx: None,
            space: SpaceDependence::Unknown,
        }
    }

    /// Declare that the field depends on the given spatial axes only.
    pub fn with_space_dependence(mut self, axes: Vec<usize>) -> Self {
        self.space = SpaceDependence::Only(axes);
        self
    }

    pub fn with_time_derivative<F>(mut self, dt: F) -> Self
    where
        F: Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
    {
        self.dt = Some(Arc::new(move |t, x| Ok(dt(t, x))));
        self
    }

    pub fn with_space_derivatives<F>(mut self, dx: F) -> Self
    where
        F: Fn(usize, f64, &[f64]) -> f64 + Send + Sync + 'static,
    {
        self.dx = Some(Arc::new(move |i, t, x| Ok(dx(i, t, x))));
        self
    }

    /// Field depending on `t` only, with its time derivative.
    pub fn of_time<F, D>(label: impl Into<String>, value: F, dt: D) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ScalarField2::new(label, move |t, _| value(t))
            .with_time_derivative(move |t, _| dt(t))
            .with_space_derivatives(|_, _, _| 0.0)
            .with_space_dependence(Vec::new())
    }

    pub fn constant(c: f64) -> Self {
        ScalarField2::new(format!("{c:?}"), move |_, _| c)
            .with_time_derivative(|_, _| 0.0)
            .with_space_derivatives(|_, _, _| 0.0)
            .with_space_dependence(Vec::new())
    }

    /// Field backed by a parsed expression; derivatives are symbolic.
    pub fn from_expr(expr: Expr, n: usize) -> Self {
        let dt = expr.differentiate(Var::Time);
        let dx: Vec<Expr> = (0..n).map(|k| expr.differentiate(Var::Space(k))).collect();
        let label = expr.to_string();
        let space = SpaceDependence::Only((0..n).filter(|&k| expr.depends_on(Var::Space(k))).collect());
        let expr = Arc::new(expr);
        let dx = Arc::new(dx);
        ScalarField2 {
            label,
            value: Arc::new(move |t, x| expr.eval(t, x)),
            dt: Some(Arc::new(move |t, x| dt.eval(t, x))),
            dx: Some(Arc::new(move |i, t, x| match dx.get(i) {
                Some(d) => d.eval(t, x),
                None => Ok(0.0),
            })),
            space,
        }
    }

    pub(crate) fn from_parts(label: String, value: FieldFn, space: SpaceDependence) -> Self {
        ScalarField2 {
            label,
            value,
            dt: None,
            dx: None,
            space,
        }
    }

    pub fn space_dependence(&self) -> &SpaceDependence {
        &self.space
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, t: f64, x: &[f64]) -> Result<f64, EvalError> {
        (self.value)(t, x)
    }

    pub fn time_derivative(&self, t: f64, x: &[f64]) -> Option<Result<f64, EvalError>> {
        self.dt.as_ref().map(|d| d(t, x))
    }

    pub fn space_derivative(&self, axis: usize, t: f64, x: &[f64]) -> Option<Result<f64, EvalError>> {
        self.dx.as_ref().map(|d| d(axis, t, x))
    }

    pub fn has_time_derivative(&self) -> bool {
        self.dt.is_some()
    }

    pub fn has_space_derivatives(&self) -> bool {
        self.dx.is_some()
    }

    /// Same values, no analytic derivatives.
    pub fn without_derivatives(&self) -> Self {
        ScalarField2 {
            label: self.label.clone(),
            value: self.value.clone(),
            dt: None,
            dx: None,
            space: self.space.clone(),
        }
    }

    /// `f̃(t, x) = f(-t, x)`.
    pub fn time_reversed(&self) -> Self {
        let value = self.value.clone();
        ScalarField2 {
            label: format!("({})[t -> -t]", self.label),
            value: Arc::new(move |t, x| value(-t, x)),
            dt: self
                .dt
                .clone()
                .map(|d| -> FieldFn { Arc::new(move |t, x| d(-t, x).map(|v| -v)) }),
            dx: self
                .dx
                .clone()
                .map(|d| -> AxisFieldFn { Arc::new(move |i, t, x| d(i, -t, x)) }),
            space: self.space.clone(),
        }
    }

    /// `f + c`; derivatives are unchanged.
    pub fn shifted(&self, c: f64) -> Self {
        let value = self.value.clone();
        ScalarField2 {
            label: format!("({}) + {c:?}", self.label),
            value: Arc::new(move |t, x| value(t, x).map(|v| v + c)),
            dt: self.dt.clone(),
            dx: self.dx.clone(),
            space: self.space.clone(),
        }
    }
}
