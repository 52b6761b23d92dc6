//! Quadrature over the spatial torus and in time, plus finite differences.
//!
//! Spatial integrals use the cell-centred periodic rule: all nodes carry the
//! same weight, which integrates trigonometric polynomials of degree below the
//! node count exactly. Time integrals use composite 5-point Gauss–Legendre
//! panels, exact for polynomials of degree ≤ 9 on each panel.
//!
//! Every reduction walks nodes in a fixed order with compensated summation,
//! so results do not depend on how node evaluation was scheduled.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Spatial part of the manifold.
#[derive(Debug, Clone, PartialEq)]
pub enum SpatialDomain {
    /// Flat torus `[0, L1) × … × [0, Ln)` with periodic identification.
    Torus { lengths: Vec<f64> },
    /// Closed manifold on which every field is independent of `x`; only the
    /// total coordinate volume enters.
    Homogeneous { sigma_volume: f64 },
}

impl SpatialDomain {
    pub fn torus(lengths: Vec<f64>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::invalid("torus needs at least one axis"));
        }
        if let Some(l) = lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::invalid(format!("torus length {l} must be positive and finite")));
        }
        Ok(SpatialDomain::Torus { lengths })
    }

    pub fn homogeneous(sigma_volume: f64) -> Result<Self> {
        if !(sigma_volume.is_finite() && sigma_volume > 0.0) {
            return Err(Error::invalid(format!(
                "homogeneous volume {sigma_volume} must be positive and finite"
            )));
        }
        Ok(SpatialDomain::Homogeneous { sigma_volume })
    }

    /// Lebesgue measure of the coordinate domain.
    pub fn coordinate_volume(&self) -> f64 {
        match self {
            SpatialDomain::Torus { lengths } => lengths.iter().product(),
            SpatialDomain::Homogeneous { sigma_volume } => *sigma_volume,
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self, SpatialDomain::Homogeneous { .. })
    }
}

/// Cell-centred periodic grid: node `k` on axis `i` sits at `(k + 1/2)·L_i/m_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    counts: Vec<usize>,
}

impl Grid {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() || counts.contains(&0) {
            return Err(Error::invalid(format!("grid counts {counts:?} must all be ≥ 1")));
        }
        Ok(Grid { counts })
    }

    pub fn uniform(n: usize, m: usize) -> Result<Self> {
        Grid::new(vec![m; n])
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn node_count(&self) -> usize {
        self.counts.iter().product()
    }

    /// Same grid with every axis resolution doubled.
    pub fn refined(&self) -> Grid {
        Grid {
            counts: self.counts.iter().map(|m| 2 * m).collect(),
        }
    }

    pub fn coordinate(&self, axis: usize, k: usize, length: f64) -> f64 {
        (k as f64 + 0.5) * length / self.counts[axis] as f64
    }

    /// Every node of the full grid, in the fixed traversal order.
    pub fn nodes(&self, lengths: &[f64]) -> Vec<Vec<f64>> {
        let region = self.full_region();
        (0..region.len())
            .map(|i| {
                let mut x = vec![0.0; self.dim()];
                region.fill(self, lengths, i, &mut x);
                x
            })
            .collect()
    }

    pub fn full_region(&self) -> NodeRegion {
        NodeRegion {
            ranges: self.counts.iter().map(|&m| 0..m).collect(),
        }
    }

    fn check_lengths(&self, lengths: &[f64]) -> Result<()> {
        if lengths.len() != self.dim() {
            return Err(Error::invalid(format!(
                "grid has {} axes but the torus has {}",
                self.dim(),
                lengths.len()
            )));
        }
        Ok(())
    }
}

/// Block of node indices, one half-open range per axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRegion {
    pub ranges: Vec<Range<usize>>,
}

impl NodeRegion {
    pub fn len(&self) -> usize {
        self.ranges.iter().map(|r| r.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates of the `flat`-th node of the region (last axis fastest).
    pub fn fill(&self, grid: &Grid, lengths: &[f64], mut flat: usize, out: &mut [f64]) {
        for axis in (0..self.ranges.len()).rev() {
            let r = &self.ranges[axis];
            let k = r.start + flat % r.len();
            flat /= r.len();
            out[axis] = grid.coordinate(axis, k, lengths[axis]);
        }
    }

    /// Weight of a node in the every-other-node subgrid rule.
    fn coarse_weight(&self, mut flat: usize) -> f64 {
        let mut w = 1.0;
        for r in self.ranges.iter().rev() {
            let len = r.len();
            let local = flat % len;
            flat /= len;
            if len >= 2 {
                w *= if local % 2 == 1 {
                    0.0
                } else if local + 1 == len {
                    1.0
                } else {
                    2.0
                };
            }
        }
        w
    }
}

/// Integral value with a non-negative error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for v in iter {
            s.add(v);
        }
        s
    }
}

fn format_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v}")).collect();
    format!("({})", parts.join(", "))
}

/// Equal-weight periodic rule over the whole torus.
pub fn integrate_torus<F>(f: F, grid: &Grid, domain: &SpatialDomain) -> Result<QuadratureResult>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    match domain {
        SpatialDomain::Torus { lengths } => integrate_region(f, grid, lengths, &grid.full_region()),
        SpatialDomain::Homogeneous { .. } => Err(Error::invalid("torus quadrature requested on a homogeneous domain")),
    }
}

/// Equal-weight periodic rule restricted to a block of nodes. The error
/// estimate compares against the every-other-node subgrid of the block.
pub fn integrate_region<F>(f: F, grid: &Grid, lengths: &[f64], region: &NodeRegion) -> Result<QuadratureResult>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    grid.check_lengths(lengths)?;
    let n = grid.dim();
    let samples: Vec<f64> = (0..region.len())
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |x, i| {
                region.fill(grid, lengths, i, x);
                let v = f(x)?;
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        location: format!("node x = {}", format_point(x)),
                        value: v,
                    });
                }
                Ok(v)
            },
        )
        .collect::<Result<_>>()?;

    let cell: f64 = lengths.iter().zip(grid.counts()).map(|(l, &m)| l / m as f64).product();
    let fine: CompensatedSum = samples.iter().copied().collect();
    let coarse: CompensatedSum = samples
        .iter()
        .enumerate()
        .map(|(i, v)| region.coarse_weight(i) * v)
        .collect();
    let value = cell * fine.value();
    Ok(QuadratureResult {
        value,
        error_estimate: (value - cell * coarse.value()).abs(),
    })
}

/// Nodes and weights of the 5-point Gauss–Legendre rule on `[-1, 1]`.
fn gauss_legendre_5() -> [(f64, f64); 5] {
    let r = (10.0f64 / 7.0).sqrt();
    let inner = (5.0 - 2.0 * r).sqrt() / 3.0;
    let outer = (5.0 + 2.0 * r).sqrt() / 3.0;
    let s70 = 70.0f64.sqrt();
    let w_inner = (322.0 + 13.0 * s70) / 900.0;
    let w_outer = (322.0 - 13.0 * s70) / 900.0;
    [
        (-outer, w_outer),
        (-inner, w_inner),
        (0.0, 128.0 / 225.0),
        (inner, w_inner),
        (outer, w_outer),
    ]
}

/// Composite Gauss–Legendre nodes `(t, weight)` on `[a, b]` with `panels` panels.
pub fn gauss_legendre_nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre_5();
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(5 * panels);
    for p in 0..panels {
        let lo = a + width * p as f64;
        let mid = lo + 0.5 * width;
        for &(x, w) in &rule {
            out.push((mid + 0.5 * width * x, 0.5 * width * w));
        }
    }
    out
}

fn coarse_panels(panels: usize) -> usize {
    if panels >= 2 {
        panels / 2
    } else {
        2
    }
}

fn check_interval(t1: f64, t2: f64, panels: usize) -> Result<()> {
    if !(t1.is_finite() && t2.is_finite() && t1 < t2) {
        return Err(Error::invalid(format!(
            "time interval [{t1}, {t2}] must be finite with t1 < T"
        )));
    }
    if panels == 0 {
        return Err(Error::invalid("time rule needs at least one panel"));
    }
    Ok(())
}

fn time_rule_sum<G>(g: &G, t1: f64, t2: f64, panels: usize) -> Result<(f64, f64)>
where
    G: Fn(f64) -> Result<QuadratureResult>,
{
    let mut value = CompensatedSum::default();
    let mut inner = CompensatedSum::default();
    for (t, w) in gauss_legendre_nodes(t1, t2, panels) {
        let r = g(t)?;
        if !r.value.is_finite() {
            return Err(Error::NonFinite {
                location: format!("t = {t}"),
                value: r.value,
            });
        }
        value.add(w * r.value);
        inner.add(w.abs() * r.error_estimate);
    }
    Ok((value.value(), inner.value()))
}

/// Composite Gauss–Legendre integral of `g` over `[t1, t2]`; the estimate is
/// the difference against half as many panels.
pub fn integrate_time<G>(g: G, t1: f64, t2: f64, panels: usize) -> Result<QuadratureResult>
where
    G: Fn(f64) -> Result<f64>,
{
    integrate_time_nested(
        |t| {
            g(t).map(|value| QuadratureResult {
                value,
                error_estimate: 0.0,
            })
        },
        t1,
        t2,
        panels,
    )
}

/// Like [`integrate_time`] for an integrand that is itself a quadrature; the
/// inner error estimates are integrated and added to the outer one.
pub fn integrate_time_nested<G>(g: G, t1: f64, t2: f64, panels: usize) -> Result<QuadratureResult>
where
    G: Fn(f64) -> Result<QuadratureResult>,
{
    check_interval(t1, t2, panels)?;
    let (fine, inner) = time_rule_sum(&g, t1, t2, panels)?;
    let (coarse, _) = time_rule_sum(&g, t1, t2, coarse_panels(panels))?;
    Ok(QuadratureResult {
        value: fine,
        error_estimate: (fine - coarse).abs() + inner,
    })
}

/// Default central-difference step, near the cube root of machine epsilon.
pub fn default_step(s: f64) -> f64 {
    6e-6 * (1.0 + s.abs())
}

fn sample<F: Fn(f64) -> Result<f64>>(f: &F, s: f64) -> Result<f64> {
    let v = f(s)?;
    if !v.is_finite() {
        return Err(Error::NonFinite {
            location: format!("difference sample at {s}"),
            value: v,
        });
    }
    Ok(v)
}

/// `(f(s + step) - f(s - step)) / (2 step)`.
pub fn central_difference<F>(f: F, s: f64, step: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let hi = sample(&f, s + step)?;
    let lo = sample(&f, s - step)?;
    Ok((hi - lo) / (2.0 * step))
}

/// Weights `(abscissa, coefficient)` of a first-derivative stencil at `s`
/// whose samples stay inside `[lo, hi]`: central when both neighbours fit
/// strictly inside, otherwise second-order one-sided, pointing away from the
/// nearer endpoint.
pub fn difference_stencil(s: f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let h = default_step(s);
    if s - h > lo && s + h < hi {
        let c = 1.0 / (2.0 * h);
        return vec![(s + h, c), (s - h, -c)];
    }
    let room_above = hi - s;
    let room_below = s - lo;
    let dir = if room_above >= room_below { 1.0 } else { -1.0 };
    let h = h.min(room_above.max(room_below) / 2.5);
    let c = dir / (2.0 * h);
    vec![(s, -3.0 * c), (s + dir * h, 4.0 * c), (s + 2.0 * dir * h, -c)]
}

/// Derivative at `s` from [`difference_stencil`] samples.
pub fn difference_within<F>(f: F, s: f64, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut acc = CompensatedSum::default();
    for (p, c) in difference_stencil(s, lo, hi) {
        acc.add(c * sample(&f, p)?);
    }
    Ok(acc.value())
}

/// Richardson-extrapolated central difference, fourth-order in `step`.
pub fn richardson_difference<F>(f: F, s: f64, step: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let coarse = central_difference(&f, s, step)?;
    let fine = central_difference(&f, s, 0.5 * step)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn torus1(l: f64) -> SpatialDomain {
        SpatialDomain::torus(vec![l]).unwrap()
    }

    #[test]
    fn torus_constant_and_trig() {
        for m in [1, 3, 16] {
            let r = integrate_torus(|_| Ok(1.0), &Grid::uniform(1, m).unwrap(), &torus1(1.0)).unwrap();
            assert!((r.value - 1.0).abs() < 1e-15);
        }
        let g16 = Grid::uniform(1, 16).unwrap();
        let r = integrate_torus(|x| Ok((2.0 * PI * x[0]).sin().powi(2)), &g16, &torus1(1.0)).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        let g32 = Grid::uniform(1, 32).unwrap();
        let r = integrate_torus(|x| Ok(1.0 + 0.3 * (2.0 * PI * x[0]).sin()), &g32, &torus1(1.0)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.error_estimate >= 0.0 && r.error_estimate < 1e-12);
    }

    #[test]
    fn torus_nodes_are_cell_centred() {
        let g = Grid::new(vec![4, 2]).unwrap();
        let nodes = g.nodes(&[2.0, 1.0]);
        assert_eq!(nodes.len(), 8);
        assert_eq!(nodes[0], vec![0.25, 0.25]);
        assert_eq!(nodes[1], vec![0.25, 0.75]);
        assert_eq!(nodes[7], vec![1.75, 0.75]);
        assert!(nodes.iter().all(|x| x[0] < 2.0 && x[1] < 1.0));
    }

    #[test]
    fn torus_rejects_non_finite_sample() {
        let g = Grid::uniform(1, 4).unwrap();
        let err = integrate_torus(|x| Ok(1.0 / (x[0] - 0.125)), &g, &torus1(1.0)).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }), "{err}");
        assert!(err.to_string().contains("0.125"));
    }

    #[test]
    fn homogeneous_domain_is_not_a_torus() {
        let g = Grid::uniform(1, 4).unwrap();
        let dom = SpatialDomain::homogeneous(2.0).unwrap();
        assert!(integrate_torus(|_| Ok(1.0), &g, &dom).is_err());
        assert!(SpatialDomain::homogeneous(0.0).is_err());
        assert!(SpatialDomain::torus(vec![1.0, -1.0]).is_err());
        assert!(Grid::new(vec![3, 0]).is_err());
    }

    #[test]
    fn error_estimate_tracks_true_error() {
        // A smooth periodic field that the coarse subgrid resolves worse.
        let f = |x: &[f64]| Ok((0.9 * (2.0 * PI * (x[0] - 0.1)).cos()).exp());
        // Mean of exp(a cos θ) over a period is the Bessel value I0(a) = Σ (a/2)^{2k} / (k!)^2.
        let exact: f64 = (0..20)
            .scan(1.0f64, |term, k| {
                let out = *term;
                *term *= (0.45f64 * 0.45) / ((k + 1) as f64).powi(2);
                Some(out)
            })
            .sum();
        let g = Grid::uniform(1, 8).unwrap();
        let r = integrate_torus(f, &g, &torus1(1.0)).unwrap();
        let rr = integrate_torus(f, &g.refined().refined(), &torus1(1.0)).unwrap();
        let true_err = (r.value - rr.value).abs();
        assert!(r.error_estimate >= true_err, "{r:?} {true_err}");
        assert!((rr.value - exact).abs() < 1e-14);
    }

    #[test]
    fn time_rule_polynomials() {
        let r = integrate_time(|t| Ok(t * t), 0.0, 1.0, 1).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-16);
        let r = integrate_time(|t| Ok((1.0 - t).powi(2)), 0.0, 0.9, 20).unwrap();
        assert!((r.value - (1.0 - 0.001) / 3.0).abs() < 1e-15);
        let r = integrate_time(|_| Ok(1.0), 2.0, 5.0, 20).unwrap();
        assert!((r.value - 3.0).abs() < 1e-14);
        let r = integrate_time(|t| Ok(t.powi(9) - 2.0 * t.powi(4)), -1.0, 2.0, 1).unwrap();
        let exact = (2f64.powi(10) - 1.0) / 10.0 - 2.0 * (32.0 + 1.0) / 5.0;
        assert!((r.value - exact).abs() < 1e-12 * exact.abs());
        assert!(r.error_estimate < 1e-11);
    }

    #[test]
    fn time_rule_errors() {
        assert!(integrate_time(Ok, 1.0, 1.0, 4).is_err());
        assert!(integrate_time(Ok, 0.0, 1.0, 0).is_err());
        let err = integrate_time(|t| Ok(1.0 / (t - 0.5)), 0.0, 1.0, 1).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }) || err.to_string().contains("t ="));
        let err = integrate_time(|t| Ok((t - 0.5).ln()), 0.0, 1.0, 2).unwrap_err();
        assert!(err.to_string().contains("t = "), "{err}");
    }

    #[test]
    fn differences() {
        let d = central_difference(|s| Ok(s.sin()), 0.0, 1e-5).unwrap();
        assert!((d - 1.0).abs() < 1e-9);
        assert_eq!(central_difference(|_| Ok(4.2), 7.0, 1e-3).unwrap(), 0.0);
        let d = central_difference(|s| Ok(s.powi(3)), 1.0, 1e-4).unwrap();
        assert!((d - 3.0).abs() < 1e-7);
        assert!(central_difference(|s| Ok(1.0 / s), 1e-7, 1e-7).is_err());
    }

    #[test]
    fn one_sided_near_window_edge() {
        // Undefined past s = 1, so a central stencil would fail there.
        let f = |s: f64| {
            if s > 1.0 {
                Ok(f64::NAN)
            } else {
                Ok((1.0 - s).powi(3) + s)
            }
        };
        let s = 1.0 - 1e-6;
        assert!(central_difference(f, s, default_step(s)).is_err());
        let d = difference_within(f, s, f64::NEG_INFINITY, 1.0).unwrap();
        let exact = 1.0 - 3.0 * (1.0 - s).powi(2);
        assert!((d - exact).abs() < 1e-8, "{d} vs {exact}");
        let d = difference_within(|s| Ok(s * s), 0.0, 0.0, 1.0).unwrap();
        assert!(d.abs() < 1e-9);
    }

    #[test]
    fn richardson_is_sharper() {
        let d = richardson_difference(|s| Ok(s.exp()), 1.0, 1e-3).unwrap();
        assert!((d - 1f64.exp()).abs() < 1e-11);
    }
}
