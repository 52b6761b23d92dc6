//! Mean curvature as a time function for homogeneous Lorentzian metrics.
//!
//! On a homogeneous metric every coordinate slice has constant mean
//! curvature `H(t)`. When `H` is strictly increasing, `τ = H(t)` is a new
//! time coordinate and the metric becomes `e^{2ψ̃}(-dτ² + σ̃)` with
//!
//! ```text
//! α̃ = e^{ψ(t(τ))} dt/dτ,   ψ̃ = ln α̃,   σ̃_ij = e^{2ψ(t(τ))} σ_ij(t(τ)) / α̃².
//! ```

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{DomainErrorKind, EvalError};
use crate::numerics::{central_difference, richardson_difference, SpatialDomain};

use super::field::{FieldFn, ScalarField2, SpaceDependence};
use super::metric::{packed_index, MetricSpec, Signature, TimeWindow};

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes).
#[derive(Debug, Clone)]
struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let k = xs.len();
        let secants: Vec<f64> = (0..k - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();
        let mut slopes = vec![0.0; k];
        slopes[0] = secants[0];
        slopes[k - 1] = secants[k - 2];
        for i in 1..k - 1 {
            let (a, b) = (secants[i - 1], secants[i]);
            slopes[i] = if a * b <= 0.0 {
                0.0
            } else {
                // Weighted harmonic mean keeps each cubic piece monotone.
                let (h0, h1) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
                let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
                (w1 + w2) / (w1 / a + w2 / b)
            };
        }
        MonotoneCubic { xs, ys, slopes }
    }

    fn eval(&self, x: f64) -> f64 {
        let k = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] + self.slopes[0] * (x - self.xs[0]);
        }
        if x >= self.xs[k - 1] {
            return self.ys[k - 1] + self.slopes[k - 1] * (x - self.xs[k - 1]);
        }
        let i = self.xs.partition_point(|&v| v <= x) - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

/// Inverse of `τ = H(t)` for a homogeneous metric.
struct MeanCurvatureClock {
    metric: MetricSpec,
    origin: Vec<f64>,
    guess: MonotoneCubic,
}

impl MeanCurvatureClock {
    fn curvature(&self, t: f64) -> Result<f64> {
        self.metric.mean_curvature(t, &self.origin)
    }

    fn clamp_inside(&self, t: f64) -> f64 {
        let w = self.metric.window();
        let pad = |edge: f64| 1e-12 * (1.0 + edge.abs());
        let lo = if w.minus.is_finite() {
            w.minus + pad(w.minus)
        } else {
            f64::MIN
        };
        let hi = if w.plus.is_finite() {
            w.plus - pad(w.plus)
        } else {
            f64::MAX
        };
        t.clamp(lo, hi)
    }

    /// `dH/dt`, fourth order, with the step kept inside the window.
    fn curvature_rate(&self, t: f64, accurate: bool) -> Result<f64> {
        let w = self.metric.window();
        let room = (t - w.minus).min(w.plus - t);
        if accurate {
            let step = (2e-4 * (1.0 + t.abs())).min(0.005 * room);
            richardson_difference(|s| self.curvature(s), t, step)
        } else {
            let step = (6e-6 * (1.0 + t.abs())).min(0.4 * room);
            central_difference(|s| self.curvature(s), t, step)
        }
    }

    /// `t(τ)`: interpolated guess polished by Newton iteration on `H(t) - τ`.
    fn time_at(&self, tau: f64) -> Result<f64> {
        let mut t = self.clamp_inside(self.guess.eval(tau));
        for _ in 0..12 {
            let residual = self.curvature(t)? - tau;
            let rate = self.curvature_rate(t, false)?;
            let next = self.clamp_inside(t - residual / rate);
            let done = (next - t).abs() <= 4.0 * f64::EPSILON * (1.0 + t.abs());
            t = next;
            if done {
                break;
            }
        }
        Ok(t)
    }

    /// `(t(τ), dH/dt at t(τ))`.
    fn solve(&self, tau: f64) -> Result<(f64, f64)> {
        let t = self.time_at(tau)?;
        Ok((t, self.curvature_rate(t, true)?))
    }
}

fn eval_error(err: Error) -> EvalError {
    match err {
        Error::Eval(e) => e,
        other => EvalError {
            kind: DomainErrorKind::NonFinite,
            subexpression: other.to_string(),
        },
    }
}

impl MetricSpec {
    /// Re-express a homogeneous Lorentzian metric with its slice mean
    /// curvature as the time coordinate, over `t ∈ [t_range.0, t_range.1]`.
    ///
    /// The inverse `t(τ)` is interpolated through `samples` points and then
    /// polished per query. The result lives on a homogeneous domain with the
    /// same coordinate volume and has no analytic derivatives.
    pub fn reparameterize_by_mean_curvature(&self, t_range: (f64, f64), samples: usize) -> Result<MetricSpec> {
        if self.signature() != Signature::Lorentzian {
            return Err(Error::invalid(
                "mean-curvature time is only defined for Lorentzian metrics",
            ));
        }
        let (a, b) = t_range;
        if !(a < b) {
            return Err(Error::invalid(format!("empty time range [{a}, {b}]")));
        }
        self.check_time(a)?;
        self.check_time(b)?;
        if samples < 4 {
            return Err(Error::invalid("need at least 4 samples for the inverse interpolation"));
        }
        let homogeneous = match self.domain() {
            SpatialDomain::Homogeneous { .. } => true,
            SpatialDomain::Torus { .. } => self.is_spatially_homogeneous(),
        };
        if !homogeneous {
            return Err(Error::invalid("mean-curvature time requires an x-independent metric"));
        }

        let origin = self.origin();
        let ts: Vec<f64> = (0..samples)
            .map(|k| a + (b - a) * k as f64 / (samples - 1) as f64)
            .collect();
        let hs: Vec<f64> = ts
            .iter()
            .map(|&t| self.mean_curvature(t, &origin))
            .collect::<Result<_>>()?;
        for k in 1..samples {
            if !(hs[k] > hs[k - 1]) {
                return Err(Error::invalid(format!(
                    "mean curvature is not strictly increasing on [{a}, {b}]: H({}) = {}, H({}) = {}",
                    ts[k - 1],
                    hs[k - 1],
                    ts[k],
                    hs[k]
                )));
            }
        }

        let clock = MeanCurvatureClock {
            metric: self.clone(),
            origin,
            guess: MonotoneCubic::new(hs.clone(), ts.clone()),
        };
        for &t in &ts {
            let rate = clock.curvature_rate(t, true)?;
            if !(rate > 0.0) {
                return Err(Error::invalid(format!("dH/dt = {rate} vanishes at t = {t}")));
            }
        }
        let clock = Arc::new(clock);
        let n = self.dim();

        let c = clock.clone();
        let psi: FieldFn = Arc::new(move |tau, x| {
            let (t, rate) = c.solve(tau).map_err(eval_error)?;
            let psi = c.metric.psi().eval(t, x)?;
            // α̃ = e^ψ / (dH/dt)
            Ok(psi - rate.ln())
        });
        let mut sigma = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                let c = clock.clone();
                let k = packed_index(n, i, j);
                let f: FieldFn = Arc::new(move |tau, x| {
                    let (t, rate) = c.solve(tau).map_err(eval_error)?;
                    let s = c.metric.sigma(i, j).eval(t, x)?;
                    // e^{2ψ} σ / α̃² = σ (dH/dt)²
                    Ok(s * rate * rate)
                });
                sigma.push(ScalarField2::from_parts(
                    format!("sigma~[{k}]"),
                    f,
                    SpaceDependence::Only(Vec::new()),
                ));
            }
        }
        let window = TimeWindow::new(hs[0], hs[samples - 1])?;
        let domain = SpatialDomain::homogeneous(self.domain().coordinate_volume())?;
        let spec = MetricSpec::new(
            n,
            Signature::Lorentzian,
            ScalarField2::from_parts("psi~".into(), psi, SpaceDependence::Only(Vec::new())),
            sigma,
            domain,
            window,
        )?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_cubic_reproduces_nodes_and_stays_monotone() {
        let xs: Vec<f64> = (0..8).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| (x * 0.7).exp() + if *x > 3.0 { 5.0 } else { 0.0 })
            .collect();
        let p = MonotoneCubic::new(xs.clone(), ys.clone());
        for (x, y) in xs.iter().zip(&ys) {
            assert!((p.eval(*x) - y).abs() < 1e-12);
        }
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=700 {
            let v = p.eval(k as f64 * 0.01);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }
}
