use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{difference_stencil, Grid, SpatialDomain};

use super::field::ScalarField2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    /// `e^{2ψ}(-dt² + σ)`, slices oriented by the past-directed normal.
    Lorentzian,
    /// `e^{2ψ}(dt² + σ)`, slices oriented by the outward normal.
    Riemannian,
}

impl Signature {
    /// Sign in `h_ij = sign · ½ e^{-ψ} ∂_t g_ij`.
    pub fn evolution_sign(self) -> f64 {
        match self {
            Signature::Lorentzian => -1.0,
            Signature::Riemannian => 1.0,
        }
    }

    /// `ḡ_00 / e^{2ψ}`.
    pub fn time_metric_sign(self) -> f64 {
        match self {
            Signature::Lorentzian => -1.0,
            Signature::Riemannian => 1.0,
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Signature::Lorentzian => "lorentzian",
            Signature::Riemannian => "riemannian",
        })
    }
}

/// Interval `[minus, plus]` of admissible times; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow {
    pub minus: f64,
    pub plus: f64,
}

impl TimeWindow {
    pub fn new(minus: f64, plus: f64) -> Result<Self> {
        if minus.is_nan() || plus.is_nan() || minus >= plus || minus == f64::INFINITY || plus == f64::NEG_INFINITY {
            return Err(Error::invalid(format!("time window ({minus}, {plus}) is empty")));
        }
        Ok(TimeWindow { minus, plus })
    }

    pub fn unbounded() -> Self {
        TimeWindow {
            minus: f64::NEG_INFINITY,
            plus: f64::INFINITY,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        t.is_finite() && self.minus <= t && t <= self.plus
    }

    pub fn reversed(&self) -> Self {
        TimeWindow {
            minus: -self.plus,
            plus: -self.minus,
        }
    }

    /// A handful of interior times used to probe field properties.
    pub fn probe_times(&self) -> Vec<f64> {
        match (self.minus.is_finite(), self.plus.is_finite()) {
            (true, true) => (1..=5)
                .map(|k| self.minus + (self.plus - self.minus) * k as f64 / 6.0)
                .collect(),
            (false, true) => [2.0, 1.0, 0.5, 0.25].iter().map(|d| self.plus - d).collect(),
            (true, false) => [0.25, 0.5, 1.0, 2.0].iter().map(|d| self.minus + d).collect(),
            (false, false) => vec![-1.0, -0.5, 0.0, 0.5, 1.0],
        }
    }
}

/// A manifold in conformal Gaussian form `e^{2ψ}(∓dt² + σ_ij dx^i dx^j)`.
#[derive(Debug, Clone)]
pub struct MetricSpec {
    n: usize,
    signature: Signature,
    psi: ScalarField2,
    /// Upper triangle of σ, row by row.
    sigma: Vec<ScalarField2>,
    domain: SpatialDomain,
    window: TimeWindow,
}

pub(crate) fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl MetricSpec {
    /// `sigma_upper` lists `σ_ij` for `i ≤ j`, row by row.
    pub fn new(
        n: usize,
        signature: Signature,
        psi: ScalarField2,
        sigma_upper: Vec<ScalarField2>,
        domain: SpatialDomain,
        window: TimeWindow,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("spatial dimension must be at least 1"));
        }
        if sigma_upper.len() != n * (n + 1) / 2 {
            return Err(Error::invalid(format!(
                "sigma needs {} upper-triangle components for n = {n}, got {}",
                n * (n + 1) / 2,
                sigma_upper.len()
            )));
        }
        if let SpatialDomain::Torus { lengths } = &domain {
            if lengths.len() != n {
                return Err(Error::invalid(format!(
                    "torus has {} axes but the metric has dimension {n}",
                    lengths.len()
                )));
            }
        }
        let spec = MetricSpec {
            n,
            signature,
            psi,
            sigma: sigma_upper,
            domain,
            window,
        };
        if spec.domain.is_homogeneous() && !spec.is_spatially_homogeneous() {
            return Err(Error::invalid("homogeneous domain requires fields independent of x"));
        }
        Ok(spec)
    }

    /// Diagonal `σ_ij = f δ_ij` with one shared field.
    pub fn conformally_flat(
        n: usize,
        signature: Signature,
        psi: ScalarField2,
        diagonal: ScalarField2,
        domain: SpatialDomain,
        window: TimeWindow,
    ) -> Result<Self> {
        let mut sigma = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                sigma.push(if i == j {
                    diagonal.clone()
                } else {
                    ScalarField2::constant(0.0)
                });
            }
        }
        MetricSpec::new(n, signature, psi, sigma, domain, window)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn psi(&self) -> &ScalarField2 {
        &self.psi
    }

    pub fn sigma(&self, i: usize, j: usize) -> &ScalarField2 {
        &self.sigma[packed_index(self.n, i, j)]
    }

    pub fn domain(&self) -> &SpatialDomain {
        &self.domain
    }

    pub fn window(&self) -> TimeWindow {
        self.window
    }

    pub fn with_window(&self, window: TimeWindow) -> Self {
        MetricSpec { window, ..self.clone() }
    }

    /// Per axis, whether any field may depend on that coordinate.
    pub fn varying_axes(&self) -> Vec<bool> {
        (0..self.n)
            .map(|k| {
                std::iter::once(&self.psi)
                    .chain(self.sigma.iter())
                    .any(|f| f.space_dependence().involves(k))
            })
            .collect()
    }

    /// True when every field carries analytic time and space derivatives.
    pub fn has_analytic_derivatives(&self) -> bool {
        std::iter::once(&self.psi)
            .chain(self.sigma.iter())
            .all(|f| f.has_time_derivative() && f.has_space_derivatives())
    }

    fn has_analytic_time_derivatives(&self) -> bool {
        std::iter::once(&self.psi)
            .chain(self.sigma.iter())
            .all(|f| f.has_time_derivative())
    }

    fn has_analytic_space_derivatives(&self) -> bool {
        std::iter::once(&self.psi)
            .chain(self.sigma.iter())
            .all(|f| f.has_space_derivatives())
    }

    /// Same metric with every analytic derivative removed, forcing the
    /// finite-difference fallback.
    pub fn without_analytic_derivatives(&self) -> Self {
        MetricSpec {
            psi: self.psi.without_derivatives(),
            sigma: self.sigma.iter().map(|f| f.without_derivatives()).collect(),
            ..self.clone()
        }
    }

    /// `ψ̃(t, x) = ψ(-t, x)`, `σ̃(t, x) = σ(-t, x)` on the negated window.
    pub fn time_reversal(&self) -> Self {
        MetricSpec {
            psi: self.psi.time_reversed(),
            sigma: self.sigma.iter().map(|f| f.time_reversed()).collect(),
            window: self.window.reversed(),
            ..self.clone()
        }
    }

    /// Replace `ψ` by `ψ + c`.
    pub fn conformal_shift(&self, c: f64) -> Self {
        MetricSpec {
            psi: self.psi.shifted(c),
            ..self.clone()
        }
    }

    /// Representative point for homogeneous domains.
    pub fn origin(&self) -> Vec<f64> {
        vec![0.0; self.n]
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        if !self.window.contains(t) {
            return Err(Error::invalid(format!(
                "time {t} outside the window [{}, {}]",
                self.window.minus, self.window.plus
            )));
        }
        Ok(())
    }

    pub(crate) fn eval_field(f: &ScalarField2, t: f64, x: &[f64]) -> Result<f64> {
        let v = f.eval(t, x)?;
        if !v.is_finite() {
            return Err(Error::NonFinite {
                location: format!("{} at t = {t}, x = {x:?}", f.label()),
                value: v,
            });
        }
        Ok(v)
    }

    /// Fill `g` (row-major n×n) with `e^{2ψ} σ_ij`; returns `ψ`.
    pub(crate) fn fill_spatial_metric(&self, t: f64, x: &[f64], g: &mut [f64]) -> Result<f64> {
        let n = self.n;
        let psi = Self::eval_field(&self.psi, t, x)?;
        let scale = (2.0 * psi).exp();
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                let v = scale * Self::eval_field(&self.sigma[k], t, x)?;
                g[i * n + j] = v;
                g[j * n + i] = v;
                k += 1;
            }
        }
        Ok(psi)
    }

    /// `∂_t g_ij`, analytic when every field has a time derivative, otherwise
    /// a window-aware difference of the assembled matrix.
    pub(crate) fn fill_spatial_metric_dt(&self, t: f64, x: &[f64], dg: &mut [f64]) -> Result<()> {
        let n = self.n;
        if self.has_analytic_time_derivatives() {
            let psi = Self::eval_field(&self.psi, t, x)?;
            let psi_t = self.psi.time_derivative(t, x).expect("checked")?;
            let scale = (2.0 * psi).exp();
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    let s = Self::eval_field(&self.sigma[k], t, x)?;
                    let s_t = self.sigma[k].time_derivative(t, x).expect("checked")?;
                    let v = scale * (2.0 * psi_t * s + s_t);
                    dg[i * n + j] = v;
                    dg[j * n + i] = v;
                    k += 1;
                }
            }
            return Ok(());
        }
        dg.iter_mut().for_each(|v| *v = 0.0);
        let mut g = vec![0.0; n * n];
        for (p, c) in difference_stencil(t, self.window.minus, self.window.plus) {
            self.fill_spatial_metric(p, x, &mut g)?;
            for (d, v) in dg.iter_mut().zip(&g) {
                *d += c * v;
            }
        }
        Ok(())
    }

    /// Ambient metric ḡ_αβ at (t, x), row-major (n+1)×(n+1), index 0 = time.
    pub(crate) fn fill_ambient_metric(&self, t: f64, x: &[f64], gbar: &mut [f64]) -> Result<()> {
        let n = self.n;
        let m = n + 1;
        let mut g = vec![0.0; n * n];
        let psi = self.fill_spatial_metric(t, x, &mut g)?;
        gbar.iter_mut().for_each(|v| *v = 0.0);
        gbar[0] = self.signature.time_metric_sign() * (2.0 * psi).exp();
        for i in 0..n {
            for j in 0..n {
                gbar[(i + 1) * m + (j + 1)] = g[i * n + j];
            }
        }
        Ok(())
    }

    /// `∂_γ ḡ_αβ` for γ = 0..=n, each a row-major (n+1)×(n+1) block.
    pub(crate) fn ambient_metric_derivatives(&self, t: f64, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        let n = self.n;
        let m = n + 1;
        let mut out = vec![vec![0.0; m * m]; m];
        let analytic_t = self.has_analytic_time_derivatives();
        let analytic_x = self.has_analytic_space_derivatives();

        let psi = Self::eval_field(&self.psi, t, x)?;
        let e2 = (2.0 * psi).exp();
        let sign0 = self.signature.time_metric_sign();

        for (gamma, block) in out.iter_mut().enumerate() {
            let analytic = if gamma == 0 { analytic_t } else { analytic_x };
            if analytic {
                let d = |f: &ScalarField2| -> Result<f64> {
                    let r = if gamma == 0 {
                        f.time_derivative(t, x)
                    } else {
                        f.space_derivative(gamma - 1, t, x)
                    };
                    Ok(r.expect("checked")?)
                };
                let dpsi = d(&self.psi)?;
                block[0] = sign0 * 2.0 * dpsi * e2;
                let mut k = 0;
                for i in 0..n {
                    for j in i..n {
                        let s = Self::eval_field(&self.sigma[k], t, x)?;
                        let v = e2 * (2.0 * dpsi * s + d(&self.sigma[k])?);
                        block[(i + 1) * m + (j + 1)] = v;
                        block[(j + 1) * m + (i + 1)] = v;
                        k += 1;
                    }
                }
            } else {
                let mut gbar = vec![0.0; m * m];
                let stencil = if gamma == 0 {
                    difference_stencil(t, self.window.minus, self.window.plus)
                } else {
                    // Periodic in space: no boundary to respect.
                    difference_stencil(x[gamma - 1], f64::NEG_INFINITY, f64::INFINITY)
                };
                let mut xs = x.to_vec();
                for (p, c) in stencil {
                    if gamma == 0 {
                        self.fill_ambient_metric(p, x, &mut gbar)?;
                    } else {
                        xs[gamma - 1] = p;
                        self.fill_ambient_metric(t, &xs, &mut gbar)?;
                    }
                    for (b, v) in block.iter_mut().zip(&gbar) {
                        *b += c * v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Points at which spatial properties are sampled: grid nodes on a torus,
    /// the single representative point on a homogeneous domain.
    pub fn sample_points(&self, grid: &Grid) -> Result<Vec<Vec<f64>>> {
        match &self.domain {
            SpatialDomain::Homogeneous { .. } => Ok(vec![self.origin()]),
            SpatialDomain::Torus { lengths } => {
                if grid.dim() != self.n {
                    return Err(Error::invalid(format!(
                        "grid has {} axes, metric has dimension {}",
                        grid.dim(),
                        self.n
                    )));
                }
                Ok(grid.nodes(lengths))
            }
        }
    }

    /// σ positive definite at every sampled `(t, x)`.
    pub fn check_positive_definite(&self, times: &[f64], grid: &Grid) -> Result<()> {
        let n = self.n;
        let points = self.sample_points(grid)?;
        let mut s = vec![0.0; n * n];
        for &t in times {
            for x in &points {
                let mut k = 0;
                for i in 0..n {
                    for j in i..n {
                        let v = Self::eval_field(&self.sigma[k], t, x)?;
                        s[i * n + j] = v;
                        s[j * n + i] = v;
                        k += 1;
                    }
                }
                if cholesky_in_place(&mut s, n).is_none() {
                    return Err(Error::NotPositiveDefinite { t, x: x.clone() });
                }
            }
        }
        Ok(())
    }

    /// Probe whether ψ and σ are independent of `x` at a few times.
    pub fn is_spatially_homogeneous(&self) -> bool {
        let probes: [f64; 4] = [0.13, 0.37, 0.71, 2.9];
        let origin = self.origin();
        for t in self.window.probe_times() {
            for (k, p) in probes.iter().enumerate() {
                let x: Vec<f64> = (0..self.n).map(|i| p * (1.0 + 0.61 * (i + k) as f64)).collect();
                for f in std::iter::once(&self.psi).chain(self.sigma.iter()) {
                    let (Ok(a), Ok(b)) = (f.eval(t, &origin), f.eval(t, &x)) else {
                        continue;
                    };
                    if (a - b).abs() > 1e-12 * (1.0 + a.abs()) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Lower Cholesky factor in place (row-major); `None` if not positive definite.
pub(crate) fn cholesky_in_place(a: &mut [f64], n: usize) -> Option<()> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in (j + 1)..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / d;
        }
        for i in 0..j {
            a[i * n + j] = 0.0;
        }
    }
    Some(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_indexing() {
        let n = 3;
        let mut seen = vec![];
        for i in 0..n {
            for j in i..n {
                seen.push(packed_index(n, i, j));
            }
        }
        assert_eq!(seen, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(packed_index(3, 2, 0), packed_index(3, 0, 2));
        assert_eq!(packed_index(1, 0, 0), 0);
        assert_eq!(packed_index(2, 1, 1), 2);
    }

    #[test]
    fn cholesky_detects_indefinite() {
        let mut a = vec![4.0, 2.0, 2.0, 3.0];
        cholesky_in_place(&mut a, 2).unwrap();
        assert_eq!(a[0] * a[3], (4.0f64 * 3.0 - 4.0).sqrt());
        let mut b = vec![1.0, 2.0, 2.0, 1.0];
        assert!(cholesky_in_place(&mut b, 2).is_none());
    }

    #[test]
    fn window_validation() {
        assert!(TimeWindow::new(1.0, 1.0).is_err());
        assert!(TimeWindow::new(2.0, 1.0).is_err());
        let w = TimeWindow::new(f64::NEG_INFINITY, 1.0).unwrap();
        assert!(w.contains(1.0) && !w.contains(1.5));
        assert_eq!(w.reversed(), TimeWindow::new(-1.0, f64::INFINITY).unwrap());
        assert!(w.probe_times().iter().all(|t| *t < 1.0));
    }

    #[test]
    fn homogeneous_domain_rejects_x_dependence() {
        let dom = SpatialDomain::homogeneous(1.0).unwrap();
        let bumpy = ScalarField2::new("1+0.1 sin x1", |_, x| 1.0 + 0.1 * x[0].sin());
        let err = MetricSpec::conformally_flat(
            1,
            Signature::Lorentzian,
            ScalarField2::constant(0.0),
            bumpy,
            dom.clone(),
            TimeWindow::unbounded(),
        );
        assert!(err.is_err());
        let flat = MetricSpec::conformally_flat(
            2,
            Signature::Lorentzian,
            ScalarField2::constant(0.0),
            ScalarField2::constant(1.0),
            dom,
            TimeWindow::unbounded(),
        );
        assert!(flat.is_ok());
    }

    #[test]
    fn positive_definiteness_is_checked_on_nodes() {
        let torus = SpatialDomain::torus(vec![1.0]).unwrap();
        let m = MetricSpec::conformally_flat(
            1,
            Signature::Lorentzian,
            ScalarField2::constant(0.0),
            ScalarField2::new("x1-0.5", |_, x| x[0] - 0.5),
            torus,
            TimeWindow::unbounded(),
        )
        .unwrap();
        let err = m
            .check_positive_definite(&[0.0], &Grid::uniform(1, 4).unwrap())
            .unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
    }
}
