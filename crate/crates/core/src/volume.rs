//! Slice volumes, their evolution, cylinder volumes over time slabs, and
//! lengths of coordinate time lines.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{MetricSpec, Signature};
use crate::numerics::{
    integrate_region, integrate_time, integrate_time_nested, CompensatedSum, Grid, NodeRegion, QuadratureResult,
    SpatialDomain,
};

/// Region of a slice: the whole slice or a coordinate box.
#[derive(Debug, Clone, PartialEq)]
pub enum SpatialSubset {
    All,
    /// Per-axis half-open intervals `[a_i, b_i)` inside `[0, L_i]`.
    Box(Vec<(f64, f64)>),
}

/// A subset aligned with the cells of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSubset {
    pub region: Option<NodeRegion>,
    /// The box actually integrated over (cell boundaries).
    pub intervals: Vec<(f64, f64)>,
    /// Whether snapping moved any requested boundary.
    pub snapped: bool,
    /// Coordinate volume of the integrated region.
    pub coordinate_volume: f64,
}

impl SpatialSubset {
    /// Snap the box to cell boundaries: a cell belongs to the box when its
    /// centre does.
    pub fn resolve(&self, grid: &Grid, domain: &SpatialDomain) -> Result<ResolvedSubset> {
        match (self, domain) {
            (SpatialSubset::All, SpatialDomain::Homogeneous { sigma_volume }) => Ok(ResolvedSubset {
                region: None,
                intervals: Vec::new(),
                snapped: false,
                coordinate_volume: *sigma_volume,
            }),
            (SpatialSubset::Box(_), SpatialDomain::Homogeneous { .. }) => Err(Error::invalid(
                "box subsets need a torus domain; a homogeneous domain has no coordinates",
            )),
            (SpatialSubset::All, SpatialDomain::Torus { lengths }) => {
                check_grid(grid, lengths.len())?;
                Ok(ResolvedSubset {
                    region: Some(grid.full_region()),
                    intervals: lengths.iter().map(|&l| (0.0, l)).collect(),
                    snapped: false,
                    coordinate_volume: lengths.iter().product(),
                })
            }
            (SpatialSubset::Box(ivs), SpatialDomain::Torus { lengths }) => {
                check_grid(grid, lengths.len())?;
                if ivs.len() != lengths.len() {
                    return Err(Error::invalid(format!(
                        "box has {} intervals for a {}-dimensional torus",
                        ivs.len(),
                        lengths.len()
                    )));
                }
                let mut ranges = Vec::with_capacity(ivs.len());
                let mut intervals = Vec::with_capacity(ivs.len());
                let mut snapped = false;
                for (axis, (&(a, b), &l)) in ivs.iter().zip(lengths).enumerate() {
                    if !(a.is_finite() && b.is_finite() && 0.0 <= a && a < b && b <= l) {
                        return Err(Error::invalid(format!(
                            "box interval [{a}, {b}) on axis {} must satisfy 0 <= a < b <= {l}",
                            axis + 1
                        )));
                    }
                    let m = grid.counts()[axis];
                    let h = l / m as f64;
                    // centre (k + 1/2) h lies in [a, b)
                    let lo = ((a / h - 0.5).ceil().max(0.0) as usize).min(m);
                    let hi = ((b / h - 0.5).ceil().max(0.0) as usize).min(m);
                    if lo >= hi {
                        return Err(Error::invalid(format!(
                            "box interval [{a}, {b}) on axis {} contains no grid node",
                            axis + 1
                        )));
                    }
                    let snapped_iv = (lo as f64 * h, hi as f64 * h);
                    let tol = 1e-12 * l;
                    snapped |= (snapped_iv.0 - a).abs() > tol || (snapped_iv.1 - b).abs() > tol;
                    ranges.push(lo..hi);
                    intervals.push(snapped_iv);
                }
                let coordinate_volume = intervals.iter().map(|(a, b)| b - a).product();
                Ok(ResolvedSubset {
                    region: Some(NodeRegion { ranges }),
                    intervals,
                    snapped,
                    coordinate_volume,
                })
            }
        }
    }

    pub fn is_all(&self) -> bool {
        matches!(self, SpatialSubset::All)
    }
}

fn check_grid(grid: &Grid, n: usize) -> Result<()> {
    if grid.dim() != n {
        return Err(Error::invalid(format!(
            "grid has {} axes but the slices are {n}-dimensional",
            grid.dim()
        )));
    }
    Ok(())
}

/// Sample points of `e`: its grid nodes, or the origin on a homogeneous domain.
pub fn subset_points(m: &MetricSpec, e: &SpatialSubset, grid: &Grid) -> Result<Vec<Vec<f64>>> {
    let grid = effective_grid(m, e, grid)?;
    let subset = e.resolve(&grid, m.domain())?;
    match (&subset.region, m.domain()) {
        (Some(region), SpatialDomain::Torus { lengths }) => Ok((0..region.len())
            .map(|i| {
                let mut x = vec![0.0; m.dim()];
                region.fill(&grid, lengths, i, &mut x);
                x
            })
            .collect()),
        _ => Ok(vec![m.origin()]),
    }
}

/// Composite Gauss–Legendre time rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeRule {
    pub panels: usize,
}

impl Default for TimeRule {
    fn default() -> Self {
        TimeRule { panels: 20 }
    }
}

/// `∫_E f(t, x) dx` for a pointwise integrand.
fn spatial_integral<F>(m: &MetricSpec, t: f64, subset: &ResolvedSubset, grid: &Grid, f: F) -> Result<QuadratureResult>
where
    F: Fn(f64, &[f64]) -> Result<f64> + Sync,
{
    match (&subset.region, m.domain()) {
        (Some(region), SpatialDomain::Torus { lengths }) => integrate_region(|x| f(t, x), grid, lengths, region),
        _ => {
            // x-independent fields: one representative point.
            let v = f(t, &m.origin())?;
            Ok(QuadratureResult {
                value: v * subset.coordinate_volume,
                error_estimate: 0.0,
            })
        }
    }
}

/// The grid actually used for `e`: one node on every axis the metric does
/// not depend on and `e` does not cut, the requested count elsewhere. The
/// periodic rule is exact along collapsed axes, so nothing is lost.
pub fn effective_grid(m: &MetricSpec, e: &SpatialSubset, grid: &Grid) -> Result<Grid> {
    match m.domain() {
        SpatialDomain::Homogeneous { .. } => Grid::uniform(m.dim(), 1),
        SpatialDomain::Torus { lengths } => {
            check_grid(grid, lengths.len())?;
            let varying = m.varying_axes();
            let counts = (0..lengths.len())
                .map(|k| {
                    let cut = match e {
                        SpatialSubset::All => false,
                        SpatialSubset::Box(ivs) => ivs.get(k).is_some_and(|&(a, b)| a > 0.0 || b < lengths[k]),
                    };
                    if varying[k] || cut {
                        grid.counts()[k]
                    } else {
                        1
                    }
                })
                .collect();
            Grid::new(counts)
        }
    }
}

/// `|E(t)| = ∫_E √g` with an error estimate.
pub fn slice_volume_with_error(m: &MetricSpec, t: f64, e: &SpatialSubset, grid: &Grid) -> Result<QuadratureResult> {
    m.check_time(t)?;
    let grid = effective_grid(m, e, grid)?;
    let subset = e.resolve(&grid, m.domain())?;
    spatial_integral(m, t, &subset, &grid, |t, x| m.sqrt_det_g(t, x))
}

pub fn slice_volume(m: &MetricSpec, t: f64, e: &SpatialSubset, grid: &Grid) -> Result<f64> {
    Ok(slice_volume_with_error(m, t, e, grid)?.value)
}

/// `d|E(t)|/dt = ∓∫_E e^ψ H √g` (minus for Lorentzian, plus for Riemannian).
pub fn slice_volume_rate(m: &MetricSpec, t: f64, e: &SpatialSubset, grid: &Grid) -> Result<f64> {
    m.check_time(t)?;
    let grid = effective_grid(m, e, grid)?;
    let subset = e.resolve(&grid, m.domain())?;
    let r = spatial_integral(m, t, &subset, &grid, |t, x| {
        let s = m.slice_geometry(t, x)?;
        Ok(m.lapse(t, x)? * s.mean_curvature * s.sqrt_det_g)
    })?;
    let sign = match m.signature() {
        Signature::Lorentzian => -1.0,
        Signature::Riemannian => 1.0,
    };
    Ok(sign * r.value)
}

fn check_slab(m: &MetricSpec, t1: f64, t2: f64) -> Result<()> {
    if !(t1.is_finite() && t2.is_finite()) {
        return Err(Error::invalid(format!("cylinder [{t1}, {t2}] must have finite ends")));
    }
    if !(t1 < t2) {
        return Err(Error::invalid(format!("cylinder needs t1 < T, got [{t1}, {t2}]")));
    }
    m.check_time(t1)?;
    m.check_time(t2)
}

fn cylinder_segment(
    m: &MetricSpec,
    t1: f64,
    t2: f64,
    subset: &ResolvedSubset,
    grid: &Grid,
    rule: TimeRule,
) -> Result<QuadratureResult> {
    integrate_time_nested(
        |t| spatial_integral(m, t, subset, grid, |t, x| m.volume_density(t, x)),
        t1,
        t2,
        rule.panels,
    )
}

/// `|Q(t1, T)| = ∫_{t1}^{T} ∫_E e^ψ √g dx dt`.
pub fn cylinder_volume(
    m: &MetricSpec,
    t1: f64,
    t2: f64,
    e: &SpatialSubset,
    grid: &Grid,
    rule: TimeRule,
) -> Result<QuadratureResult> {
    check_slab(m, t1, t2)?;
    let grid = effective_grid(m, e, grid)?;
    let subset = e.resolve(&grid, m.domain())?;
    cylinder_segment(m, t1, t2, &subset, &grid, rule)
}

/// Cylinder volumes `|Q(t1, T_k)|` for an increasing ladder, accumulated
/// segment by segment; each segment gets the full time rule.
pub fn cylinder_ladder(
    m: &MetricSpec,
    t1: f64,
    ladder: &[f64],
    e: &SpatialSubset,
    grid: &Grid,
    rule: TimeRule,
) -> Result<Vec<QuadratureResult>> {
    let grid = effective_grid(m, e, grid)?;
    let subset = e.resolve(&grid, m.domain())?;
    let mut out = Vec::with_capacity(ladder.len());
    let (mut value, mut error) = (CompensatedSum::default(), 0.0);
    let mut lo = t1;
    for &t in ladder {
        check_slab(m, lo, t)?;
        let seg = cylinder_segment(m, lo, t, &subset, &grid, rule)?;
        value.add(seg.value);
        error += seg.error_estimate;
        out.push(QuadratureResult {
            value: value.value(),
            error_estimate: error,
        });
        lo = t;
    }
    Ok(out)
}

/// Length `∫_{t1}^{t} e^ψ` of the coordinate time line through `x`.
pub fn curve_length(m: &MetricSpec, x: &[f64], t1: f64, t: f64, rule: TimeRule) -> Result<f64> {
    check_slab(m, t1, t)?;
    if x.len() != m.dim() {
        return Err(Error::invalid(format!(
            "point has {} coordinates, expected {}",
            x.len(),
            m.dim()
        )));
    }
    Ok(integrate_time(|s| m.lapse(s, x), t1, t, rule.panels)?.value)
}

/// Largest coordinate time-line length over the grid nodes. This is a
/// lower estimate for the supremum over all future directed curves.
pub fn max_curve_length(m: &MetricSpec, t1: f64, t: f64, grid: &Grid, rule: TimeRule) -> Result<f64> {
    check_slab(m, t1, t)?;
    let points = subset_points(m, &SpatialSubset::All, grid)?;
    let lengths: Vec<f64> = points
        .par_iter()
        .map(|x| curve_length(m, x, t1, t, rule))
        .collect::<Result<_>>()?;
    Ok(lengths.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// `max_x (√g(t, x) − √g(t1, x))` over the grid nodes; non-positive when
/// the volume element has not grown.
pub fn volume_element_monotonicity(m: &MetricSpec, t1: f64, t: f64, grid: &Grid) -> Result<f64> {
    check_slab(m, t1, t)?;
    let points = subset_points(m, &SpatialSubset::All, grid)?;
    let diffs: Vec<f64> = points
        .par_iter()
        .map(|x| Ok(m.sqrt_det_g(t, x)? - m.sqrt_det_g(t1, x)?))
        .collect::<Result<_>>()?;
    Ok(diffs.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Slice volumes and their rates at a list of times.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeSweep {
    pub times: Vec<f64>,
    pub volumes: Vec<f64>,
    pub rates: Vec<f64>,
}

pub fn volume_sweep(m: &MetricSpec, times: &[f64], e: &SpatialSubset, grid: &Grid) -> Result<VolumeSweep> {
    if times.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("sweep times must be strictly increasing"));
    }
    let mut volumes = Vec::with_capacity(times.len());
    let mut rates = Vec::with_capacity(times.len());
    for &t in times {
        let v = slice_volume(m, t, e, grid)?;
        if !(v > 0.0) {
            return Err(Error::NonFinite {
                location: format!("slice volume at t = {t}"),
                value: v,
            });
        }
        volumes.push(v);
        rates.push(slice_volume_rate(m, t, e, grid)?);
    }
    Ok(VolumeSweep {
        times: times.to_vec(),
        volumes,
        rates,
    })
}
