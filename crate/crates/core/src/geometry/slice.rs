use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::Grid;

use super::metric::{cholesky_in_place, MetricSpec, Signature};

/// Induced geometry of the slice `{x⁰ = t}` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceGeometry {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub sqrt_det_g: f64,
    /// Second fundamental form `h_ij`.
    pub h: DMatrix<f64>,
    /// Mean curvature `H = g^{ij} h_ij`.
    pub mean_curvature: f64,
}

/// Unit normal in coordinates `(x⁰, x¹, …, xⁿ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalVector {
    pub components: Vec<f64>,
}

fn not_pd(t: f64, x: &[f64]) -> Error {
    Error::NotPositiveDefinite { t, x: x.to_vec() }
}

impl MetricSpec {
    /// `√det g_ij(t, x)`.
    pub fn sqrt_det_g(&self, t: f64, x: &[f64]) -> Result<f64> {
        let n = self.dim();
        let mut g = vec![0.0; n * n];
        self.fill_spatial_metric(t, x, &mut g)?;
        cholesky_in_place(&mut g, n).ok_or_else(|| not_pd(t, x))?;
        Ok((0..n).map(|i| g[i * n + i]).product())
    }

    /// Lapse `e^ψ`.
    pub fn lapse(&self, t: f64, x: &[f64]) -> Result<f64> {
        Ok(Self::eval_field(self.psi(), t, x)?.exp())
    }

    /// Spacetime volume density `e^ψ √det g_ij`.
    pub fn volume_density(&self, t: f64, x: &[f64]) -> Result<f64> {
        Ok(self.lapse(t, x)? * self.sqrt_det_g(t, x)?)
    }

    /// Slice geometry with `h_ij = ∓½ e^{-ψ} ∂_t g_ij` (minus for Lorentzian,
    /// plus for Riemannian).
    pub fn slice_geometry(&self, t: f64, x: &[f64]) -> Result<SliceGeometry> {
        self.check_time(t)?;
        let n = self.dim();
        let mut g = vec![0.0; n * n];
        let psi = self.fill_spatial_metric(t, x, &mut g)?;
        let mut dg = vec![0.0; n * n];
        self.fill_spatial_metric_dt(t, x, &mut dg)?;

        let g = DMatrix::from_row_slice(n, n, &g);
        let chol = g.clone().cholesky().ok_or_else(|| not_pd(t, x))?;
        let sqrt_det_g = chol.l_dirty().diagonal().iter().product();
        let g_inv = chol.inverse();

        let factor = self.signature().evolution_sign() * 0.5 * (-psi).exp();
        let h = DMatrix::from_row_slice(n, n, &dg) * factor;
        let mean_curvature = g_inv.component_mul(&h).sum();
        if !mean_curvature.is_finite() {
            return Err(Error::NonFinite {
                location: format!("mean curvature at t = {t}, x = {x:?}"),
                value: mean_curvature,
            });
        }
        Ok(SliceGeometry {
            g,
            g_inv,
            sqrt_det_g,
            h,
            mean_curvature,
        })
    }

    pub fn mean_curvature(&self, t: f64, x: &[f64]) -> Result<f64> {
        Ok(self.slice_geometry(t, x)?.mean_curvature)
    }

    /// `ν = -e^{-ψ}(1, 0, …, 0)` (Lorentzian, past directed) or
    /// `ν = e^{-ψ}(1, 0, …, 0)` (Riemannian, outward).
    pub fn normal_vector(&self, t: f64, x: &[f64]) -> Result<NormalVector> {
        let psi = Self::eval_field(self.psi(), t, x)?;
        let sign = match self.signature() {
            Signature::Lorentzian => -1.0,
            Signature::Riemannian => 1.0,
        };
        let mut components = vec![0.0; self.dim() + 1];
        components[0] = sign * (-psi).exp();
        Ok(NormalVector { components })
    }

    /// `ḡ(v, v)` for a vector given in coordinates.
    pub fn ambient_norm_squared(&self, t: f64, x: &[f64], v: &[f64]) -> Result<f64> {
        let m = self.dim() + 1;
        let mut gbar = vec![0.0; m * m];
        self.fill_ambient_metric(t, x, &mut gbar)?;
        let mut s = 0.0;
        for a in 0..m {
            for b in 0..m {
                s += gbar[a * m + b] * v[a] * v[b];
            }
        }
        Ok(s)
    }

    /// `h_ij` from the Gauss formula: the covariant Hessian of the embedding
    /// `x(t) = (t, x^i)` built from the ambient Christoffel symbols of ḡ,
    /// contracted with ḡ and the unit normal obtained by raising `dx⁰`.
    ///
    /// This path shares no code with [`MetricSpec::slice_geometry`] beyond
    /// evaluating the fields, so agreement of the two is a sign check.
    pub fn second_fundamental_form_ambient(&self, t: f64, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_time(t)?;
        let n = self.dim();
        let m = n + 1;
        let mut gbar = vec![0.0; m * m];
        self.fill_ambient_metric(t, x, &mut gbar)?;
        let gbar = DMatrix::from_row_slice(m, m, &gbar);
        let gbar_inv = gbar
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::invalid(format!("ambient metric is degenerate at t = {t}")))?;
        let dgbar = self.ambient_metric_derivatives(t, x)?;
        let d = |gamma: usize, a: usize, b: usize| dgbar[gamma][a * m + b];

        // Ambient Christoffel symbols Γ̄^α_βγ.
        let mut gamma_bar = vec![0.0; m * m * m];
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let mut s = 0.0;
                    for e in 0..m {
                        s += gbar_inv[(a, e)] * (d(b, e, c) + d(c, e, b) - d(e, b, c));
                    }
                    gamma_bar[(a * m + b) * m + c] = 0.5 * s;
                }
            }
        }

        // Induced Christoffel symbols Γ^k_ij of g_ij = ḡ_ij (spatial block).
        let g = gbar.view((1, 1), (n, n)).into_owned();
        let g_inv = g.try_inverse().ok_or_else(|| not_pd(t, x))?;
        let mut gamma_ind = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += g_inv[(k, l)] * (d(i + 1, l + 1, j + 1) + d(j + 1, l + 1, i + 1) - d(l + 1, i + 1, j + 1));
                    }
                    gamma_ind[(k * n + i) * n + j] = 0.5 * s;
                }
            }
        }

        // Unit normal: raise dx⁰ and normalise.
        let g00 = gbar_inv[(0, 0)];
        let nu: Vec<f64> = (0..m).map(|a| gbar_inv[(a, 0)] / g00.abs().sqrt()).collect();

        // x^α_ij = ∂_ij x^α - Γ^k_ij x^α_k + Γ̄^α_βγ x^β_i x^γ_j with x^α_i = δ^α_{i+1}.
        let mut h = DMatrix::zeros(n, n);
        let mut x_ij = vec![0.0; m];
        for i in 0..n {
            for j in 0..n {
                for (a, xa) in x_ij.iter_mut().enumerate() {
                    let mut v = gamma_bar[(a * m + i + 1) * m + j + 1];
                    if a >= 1 {
                        v -= gamma_ind[((a - 1) * n + i) * n + j];
                    }
                    *xa = v;
                }
                // Both signatures: h_ij = -ḡ(x_ij, ν).
                let mut s = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        s += gbar[(a, b)] * x_ij[a] * nu[b];
                    }
                }
                h[(i, j)] = -s;
            }
        }
        Ok(h)
    }

    /// Minimum and maximum of `H` over the sample points of `grid`.
    pub fn mean_curvature_extrema(&self, t: f64, grid: &Grid) -> Result<(f64, f64)> {
        let points = self.sample_points(grid)?;
        self.mean_curvature_extrema_at(t, &points)
    }

    pub fn mean_curvature_extrema_at(&self, t: f64, points: &[Vec<f64>]) -> Result<(f64, f64)> {
        let values: Vec<f64> = points
            .par_iter()
            .map(|x| self.mean_curvature(t, x))
            .collect::<Result<_>>()?;
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok((lo, hi))
    }
}
