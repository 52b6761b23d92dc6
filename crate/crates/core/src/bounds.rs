//! Volume bounds for future and past ends, checked on concrete metrics with
//! quantitative margins.
//!
//! Every check measures cylinder volumes along a ladder of end times and
//! compares them with the bound built from a curvature or curve-length
//! constant. A margin is `bound − measured` (for the lower bound of the
//! mean-curvature-time check it is `measured − bound`); it is accepted down
//! to `−(tol·(1 + |bound|) + quadrature error estimate)`.

use std::fmt::{self, Write as _};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{MetricSpec, Signature};
use crate::numerics::Grid;
use crate::volume::{
    cylinder_ladder, cylinder_volume, slice_volume_with_error, subset_points, volume_element_monotonicity,
    SpatialSubset, TimeRule,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    Thm01Future,
    Thm01Past,
    Thm01Local,
    Thm12Future,
    Thm12Past,
    RemarkSec2,
    RiemannI,
    RiemannII,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::Thm01Future => "thm01-future",
            Theorem::Thm01Past => "thm01-past",
            Theorem::Thm01Local => "thm01-local",
            Theorem::Thm12Future => "thm12-future",
            Theorem::Thm12Past => "thm12-past",
            Theorem::RemarkSec2 => "remark2",
            Theorem::RiemannI => "riemann-i",
            Theorem::RiemannII => "riemann-ii",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    HypothesisNotMet,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::HypothesisNotMet => "hypothesis-not-met",
        })
    }
}

/// Numerical resolution shared by all checks.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    pub grid: Grid,
    pub rule: TimeRule,
    pub tol: f64,
    /// Uniform times, besides the start and the ladder, at which the
    /// hypothesis is sampled.
    pub hypothesis_samples: usize,
}

impl CheckOptions {
    pub fn new(grid: Grid) -> Self {
        CheckOptions {
            grid,
            rule: TimeRule::default(),
            tol: 1e-9,
            hypothesis_samples: 16,
        }
    }
}

/// Outcome of one check. Per-ladder arrays are aligned with `ladder`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub theorem: Theorem,
    /// `t1` (future checks), `t2` (past checks) or `τ` (mean-curvature time).
    pub start: f64,
    pub ladder: Vec<f64>,
    pub subset: SpatialSubset,
    /// `epsilon0`, `gamma1` or `tau2`.
    pub constant_name: &'static str,
    pub constant: f64,
    pub reference_volumes: Vec<f64>,
    pub measured: Vec<f64>,
    pub bounds: Vec<f64>,
    pub margins: Vec<f64>,
    pub tolerances: Vec<f64>,
    /// `(|M(t1)| − |M(T_k)|)/ε₀` for the mean-curvature checks.
    pub sharper_bounds: Vec<f64>,
    pub verdict: Verdict,
    /// Times at which the hypothesis was sampled.
    pub hypothesis_times: Vec<f64>,
    pub diagnostics: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl BoundReport {
    /// Verdict of a single ladder row.
    pub fn row_verdict(&self, k: usize) -> Verdict {
        match self.verdict {
            Verdict::HypothesisNotMet => Verdict::HypothesisNotMet,
            _ if self.margins[k] >= -self.tolerances[k] => Verdict::Holds,
            _ => Verdict::Violated,
        }
    }

    pub fn final_margin(&self) -> Option<f64> {
        self.margins.last().copied()
    }

    pub fn csv_header() -> &'static str {
        "theorem,t1,T,epsilon0_or_gamma,reference_volume,cylinder_volume,bound,margin,verdict"
    }

    /// One row per ladder point, header included.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::csv_header());
        out.push('\n');
        for k in 0..self.ladder.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                self.theorem,
                self.start,
                self.ladder[k],
                self.constant,
                self.reference_volumes[k],
                self.measured[k],
                self.bounds[k],
                self.margins[k],
                self.row_verdict(k)
            );
        }
        out
    }

    /// Flat `key = value` lines.
    pub fn to_kv(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        let _ = writeln!(out, "theorem = {}", self.theorem);
        let _ = writeln!(out, "verdict = {}", self.verdict);
        let _ = writeln!(out, "start = {}", self.start);
        let _ = writeln!(out, "ladder = {}", list(&self.ladder));
        let _ = writeln!(out, "subset = {}", subset_label(&self.subset));
        let _ = writeln!(out, "{} = {}", self.constant_name, self.constant);
        let _ = writeln!(out, "reference_volume = {}", list(&self.reference_volumes));
        let _ = writeln!(out, "cylinder_volume = {}", list(&self.measured));
        let _ = writeln!(out, "bound = {}", list(&self.bounds));
        let _ = writeln!(out, "margin = {}", list(&self.margins));
        let _ = writeln!(out, "tolerance = {}", list(&self.tolerances));
        if !self.sharper_bounds.is_empty() {
            let _ = writeln!(out, "sharper_bound = {}", list(&self.sharper_bounds));
        }
        let _ = writeln!(out, "hypothesis_times = {}", self.hypothesis_times.len());
        for (k, v) in &self.diagnostics {
            let _ = writeln!(out, "{k} = {v}");
        }
        for (i, note) in self.notes.iter().enumerate() {
            let _ = writeln!(out, "note.{} = {note}", i + 1);
        }
        out
    }
}

pub fn subset_label(e: &SpatialSubset) -> String {
    match e {
        SpatialSubset::All => "all".into(),
        SpatialSubset::Box(ivs) => ivs
            .iter()
            .map(|(a, b)| format!("[{a},{b})"))
            .collect::<Vec<_>>()
            .join("x"),
    }
}

fn check_ladder(m: &MetricSpec, start: f64, ladder: &[f64]) -> Result<()> {
    if ladder.is_empty() {
        return Err(Error::invalid("the T ladder is empty"));
    }
    let mut prev = start;
    for &t in ladder {
        if !(t > prev) {
            return Err(Error::invalid(format!(
                "ladder must increase strictly from {start}; got {t} after {prev}"
            )));
        }
        m.check_time(t)?;
        prev = t;
    }
    m.check_time(start)
}

/// Start, ladder, and `samples` uniform interior times, sorted.
fn sampling_times(start: f64, ladder: &[f64], samples: usize) -> Vec<f64> {
    let end = *ladder.last().expect("non-empty ladder");
    let mut ts = vec![start];
    ts.extend((1..=samples).map(|k| start + (end - start) * k as f64 / (samples + 1) as f64));
    ts.extend_from_slice(ladder);
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

/// `(min H, max H)` over the sampling times and the nodes of `e`.
fn curvature_range(m: &MetricSpec, times: &[f64], points: &[Vec<f64>]) -> Result<(f64, f64)> {
    let per_time: Vec<(f64, f64)> = times
        .iter()
        .map(|&t| m.mean_curvature_extrema_at(t, points))
        .collect::<Result<_>>()?;
    Ok(per_time
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| {
            (lo.min(a), hi.max(b))
        }))
}

struct Measured {
    values: Vec<f64>,
    errors: Vec<f64>,
}

fn measure(m: &MetricSpec, start: f64, ladder: &[f64], e: &SpatialSubset, opts: &CheckOptions) -> Result<Measured> {
    let q = cylinder_ladder(m, start, ladder, e, &opts.grid, opts.rule)?;
    Ok(Measured {
        values: q.iter().map(|r| r.value).collect(),
        errors: q.iter().map(|r| r.error_estimate).collect(),
    })
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    theorem: Theorem,
    start: f64,
    ladder: &[f64],
    e: &SpatialSubset,
    constant_name: &'static str,
    constant: f64,
    reference_volumes: Vec<f64>,
    measured: Measured,
    bounds: Vec<f64>,
    extra_error: Vec<f64>,
    opts: &CheckOptions,
) -> BoundReport {
    let margins: Vec<f64> = bounds.iter().zip(&measured.values).map(|(b, q)| b - q).collect();
    let tolerances: Vec<f64> = (0..ladder.len())
        .map(|k| opts.tol * (1.0 + bounds[k].abs()) + measured.errors[k] + extra_error[k])
        .collect();
    let holds = margins.iter().zip(&tolerances).all(|(m, t)| *m >= -t);
    BoundReport {
        theorem,
        start,
        ladder: ladder.to_vec(),
        subset: e.clone(),
        constant_name,
        constant,
        reference_volumes,
        measured: measured.values,
        bounds,
        margins,
        tolerances,
        sharper_bounds: Vec::new(),
        verdict: if holds { Verdict::Holds } else { Verdict::Violated },
        hypothesis_times: Vec::new(),
        diagnostics: Vec::new(),
        notes: Vec::new(),
    }
}

#[allow(clippy::too_many_arguments)]
fn not_met(
    theorem: Theorem,
    start: f64,
    ladder: &[f64],
    e: &SpatialSubset,
    constant_name: &'static str,
    constant: f64,
    measured: Measured,
    note: String,
) -> BoundReport {
    let k = ladder.len();
    BoundReport {
        theorem,
        start,
        ladder: ladder.to_vec(),
        subset: e.clone(),
        constant_name,
        constant,
        reference_volumes: vec![f64::NAN; k],
        measured: measured.values,
        bounds: vec![f64::NAN; k],
        margins: vec![f64::NAN; k],
        tolerances: vec![f64::NAN; k],
        sharper_bounds: Vec::new(),
        verdict: Verdict::HypothesisNotMet,
        hypothesis_times: Vec::new(),
        diagnostics: Vec::new(),
        notes: vec![note],
    }
}

fn resolution_note(opts: &CheckOptions, times: usize) -> String {
    let counts: Vec<String> = opts.grid.counts().iter().map(|c| c.to_string()).collect();
    format!(
        "constant estimated on a {} grid at {times} times; rerun denser before trusting a violation",
        counts.join("x")
    )
}

fn snap_note(m: &MetricSpec, e: &SpatialSubset, opts: &CheckOptions, report: &mut BoundReport) -> Result<()> {
    if let SpatialSubset::Box(_) = e {
        let r = e.resolve(&opts.grid, m.domain())?;
        if r.snapped {
            let ivs: Vec<String> = r.intervals.iter().map(|(a, b)| format!("[{a},{b})")).collect();
            report
                .notes
                .push(format!("box snapped to grid cells: {}", ivs.join("x")));
        }
    }
    Ok(())
}

/// Future end, positive mean curvature: `|Q(t1, T)| ≤ |M(t1)|/ε₀` whenever
/// `H ≥ ε₀ > 0` on the cylinder. A box `e` gives the local form.
pub fn check_thm01_future(
    m: &MetricSpec,
    t1: f64,
    ladder: &[f64],
    e: &SpatialSubset,
    opts: &CheckOptions,
) -> Result<BoundReport> {
    let theorem = if e.is_all() {
        Theorem::Thm01Future
    } else {
        Theorem::Thm01Local
    };
    if m.signature() != Signature::Lorentzian {
        return Err(Error::invalid("this check needs a Lorentzian metric"));
    }
    check_ladder(m, t1, ladder)?;
    let points = subset_points(m, e, &opts.grid)?;
    let times = sampling_times(t1, ladder, opts.hypothesis_samples);
    let (eps0, _) = curvature_range(m, &times, &points)?;
    let measured = measure(m, t1, ladder, e, opts)?;
    if !(eps0 > opts.tol) {
        let mut r = not_met(
            theorem,
            t1,
            ladder,
            e,
            "epsilon0",
            eps0,
            measured,
            format!("inf H = {eps0} is not positive on the cylinder"),
        );
        r.hypothesis_times = times;
        return Ok(r);
    }
    let start_volume = slice_volume_with_error(m, t1, e, &opts.grid)?;
    let bound = start_volume.value / eps0;
    let k = ladder.len();
    let mut report = assemble(
        theorem,
        t1,
        ladder,
        e,
        "epsilon0",
        eps0,
        vec![start_volume.value; k],
        measured,
        vec![bound; k],
        vec![start_volume.error_estimate / eps0; k],
        opts,
    );
    report.sharper_bounds = ladder
        .iter()
        .map(|&t| Ok((start_volume.value - slice_volume_with_error(m, t, e, &opts.grid)?.value) / eps0))
        .collect::<Result<_>>()?;
    report.diagnostics.push(("min_H".into(), eps0));
    report.notes.push(resolution_note(opts, times.len()));
    report.hypothesis_times = times;
    snap_note(m, e, opts, &mut report)?;
    Ok(report)
}

fn reversed_ladder(ladder: &[f64]) -> Vec<f64> {
    ladder.iter().map(|t| -t).collect()
}

/// Relabel a report computed on the time-reversed metric.
fn unreverse(mut r: BoundReport, theorem: Theorem, start: f64, ladder: &[f64]) -> BoundReport {
    r.theorem = theorem;
    r.start = start;
    r.ladder = ladder.to_vec();
    r.hypothesis_times = r.hypothesis_times.iter().map(|t| -t).rev().collect();
    r
}

/// Past end, negative mean curvature: `|Q(T, t2)| ≤ |M(t2)|/ε₀` when
/// `H ≤ −ε₀`. The ladder decreases from `t2`; the check runs the future
/// check on the time-reversed metric.
pub fn check_thm01_past(
    m: &MetricSpec,
    t2: f64,
    ladder: &[f64],
    e: &SpatialSubset,
    opts: &CheckOptions,
) -> Result<BoundReport> {
    let r = check_thm01_future(&m.time_reversal(), -t2, &reversed_ladder(ladder), e, opts)?;
    Ok(unreverse(r, Theorem::Thm01Past, t2, ladder))
}

/// Future end with shrinking volume element: `|Q(t1, T)| ≤ γ₁ |M(t1)|`,
/// `γ₁` the longest coordinate time line over `[t1, T_max]`.
pub fn check_thm12(
    m: &MetricSpec,
    t1: f64,
    ladder: &[f64],
    e: &SpatialSubset,
    opts: &CheckOptions,
) -> Result<BoundReport> {
    let theorem = Theorem::Thm12Future;
    if m.signature() != Signature::Lorentzian {
        return Err(Error::invalid("this check needs a Lorentzian metric"));
    }
    check_ladder(m, t1, ladder)?;
    let times = sampling_times(t1, ladder, opts.hypothesis_samples);
    let points = subset_points(m, e, &opts.grid)?;
    let mut worst = f64::NEG_INFINITY;
    for &t in times.iter().filter(|&&t| t > t1) {
        let w = if e.is_all() {
            volume_element_monotonicity(m, t1, t, &opts.grid)?
        } else {
            points
                .iter()
                .map(|x| Ok(m.sqrt_det_g(t, x)? - m.sqrt_det_g(t1, x)?))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max)
        };
        worst = worst.max(w);
    }
    let measured = measure(m, t1, ladder, e, opts)?;
    let t_max = *ladder.last().expect("checked");
    let lengths: Vec<f64> = points
        .par_iter()
        .map(|x| crate::volume::curve_length(m, x, t1, t_max, opts.rule))
        .collect::<Result<_>>()?;
    let gamma1 = lengths.into_iter().fold(f64::NEG_INFINITY, f64::max);
    if worst > opts.tol {
        let mut r = not_met(
            theorem,
            t1,
            ladder,
            e,
            "gamma1",
            gamma1,
            measured,
            format!("volume element grows: max sqrt(g)(t) - sqrt(g)(t1) = {worst}"),
        );
        r.diagnostics.push(("monotonicity_worst".into(), worst));
        r.hypothesis_times = times;
        return Ok(r);
    }
    let start_volume = slice_volume_with_error(m, t1, e, &opts.grid)?;
    let k = ladder.len();
    let mut report = assemble(
        theorem,
        t1,
        ladder,
        e,
        "gamma1",
        gamma1,
        vec![start_volume.value; k],
        measured,
        vec![gamma1 * start_volume.value; k],
        vec![gamma1 * start_volume.error_estimate; k],
        opts,
    );
    report.diagnostics.push(("monotonicity_worst".into(), worst));
    report.notes.push(
        "gamma1 is the longest coordinate time line on the grid, a lower estimate for the supremum over all future directed curves"
            .into(),
    );
    report.notes.push(resolution_note(opts, times.len()));
    report.hypothesis_times = times;
    snap_note(m, e, opts, &mut report)?;
    Ok(report)
}

/// Past version of [`check_thm12`] via time reversal; the ladder decreases.
pub fn check_thm12_past(
    m: &MetricSpec,
    t2: f64,
    ladder: &[f64],
    e: &SpatialSubset,
    opts: &CheckOptions,
) -> Result<BoundReport> {
    let r = check_thm12(&m.time_reversal(), -t2, &reversed_ladder(ladder), e, opts)?;
    Ok(unreverse(r, Theorem::Thm12Past, t2, ladder))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiemannCase {
    /// `H ≥ ε₀ > 0`: `|Q(t1, T)| ≤ |M(T)|/ε₀`.
    I,
    /// `H ≤ −ε₀ < 0`: `|Q(t1, T)| ≤ |M(t1)|/ε₀`.
    II,
}

/// Riemannian foliations. Case I's limit `lim |M(t)|` is never
/// extrapolated: each ladder row uses `|M(T_k)|`.
pub fn check_riemannian(
    m: &MetricSpec,
    t1: f64,
    ladder: &[f64],
    e: &SpatialSubset,
    opts: &CheckOptions,
    case: RiemannCase,
) -> Result<BoundReport> {
    if m.signature() != Signature::Riemannian {
        return Err(Error::invalid("this check needs a Riemannian metric"));
    }
    let theorem = match case {
        RiemannCase::I => Theorem::RiemannI,
        RiemannCase::II => Theorem::RiemannII,
    };
    check_ladder(m, t1, ladder)?;
    let points = subset_points(m, e, &opts.grid)?;
    let times = sampling_times(t1, ladder, opts.hypothesis_samples);
    let (lo, hi) = curvature_range(m, &times, &points)?;
    let eps0 = match case {
        RiemannCase::I => lo,
        RiemannCase::II => -hi,
    };
    let measured = measure(m, t1, ladder, e, opts)?;
    if !(eps0 > opts.tol) {
        let sign = if case == RiemannCase::I { "inf H" } else { "inf(-H)" };
        let mut r = not_met(
            theorem,
            t1,
            ladder,
            e,
            "epsilon0",
            eps0,
            measured,
            format!("{sign} = {eps0} is not positive on the cylinder"),
        );
        r.hypothesis_times = times;
        return Ok(r);
    }
    let (refs, errs): (Vec<f64>, Vec<f64>) = match case {
        RiemannCase::I => ladder
            .iter()
            .map(|&t| slice_volume_with_error(m, t, e, &opts.grid).map(|r| (r.value, r.error_estimate)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip(),
        RiemannCase::II => {
            let r = slice_volume_with_error(m, t1, e, &opts.grid)?;
            (vec![r.value; ladder.len()], vec![r.error_estimate; ladder.len()])
        }
    };
    let bounds: Vec<f64> = refs.iter().map(|v| v / eps0).collect();
    let extra: Vec<f64> = errs.iter().map(|v| v / eps0).collect();
    let mut report = assemble(
        theorem, t1, ladder, e, "epsilon0", eps0, refs, measured, bounds, extra, opts,
    );
    if case == RiemannCase::I {
        let trend = if report.reference_volumes.windows(2).all(|w| w[1] >= w[0]) {
            "non-decreasing"
        } else {
            "not monotone"
        };
        report.notes.push(format!(
            "limit slice volume reported as the ladder |M(T_k)|, trend {trend}, not extrapolated"
        ));
    }
    report.diagnostics.push(("min_H".into(), lo));
    report.diagnostics.push(("max_H".into(), hi));
    report.notes.push(resolution_note(opts, times.len()));
    report.hypothesis_times = times;
    snap_note(m, e, opts, &mut report)?;
    Ok(report)
}

/// Mean-curvature time: `(|M(τ)| − |M(τ₂)|)/τ₂ ≤ |Q(τ, τ₂)|` for
/// `0 < τ < τ₂`, on a metric whose slice at time `τ` has mean curvature `τ`.
/// The margin is `|Q| − lower bound`.
pub fn check_remark_sec2(m: &MetricSpec, tau: f64, tau2: f64, opts: &CheckOptions) -> Result<BoundReport> {
    if !(tau > 0.0 && tau < tau2) {
        return Err(Error::invalid(format!(
            "need 0 < tau < tau2, got tau = {tau}, tau2 = {tau2}"
        )));
    }
    if m.signature() != Signature::Lorentzian {
        return Err(Error::invalid("this check needs a Lorentzian metric"));
    }
    m.check_time(tau)?;
    m.check_time(tau2)?;
    let e = SpatialSubset::All;
    let points = subset_points(m, &e, &opts.grid)?;
    let samples: Vec<f64> = (0..10).map(|k| tau + (tau2 - tau) * k as f64 / 9.0).collect();
    let mut deviation: f64 = 0.0;
    for &s in &samples {
        let (lo, hi) = m.mean_curvature_extrema_at(s, &points)?;
        deviation = deviation.max((lo - s).abs()).max((hi - s).abs());
    }
    let cmc_tol = 1e-8 * (1.0 + tau2.abs());
    if !(deviation <= cmc_tol) {
        return Err(Error::CmcVerification(format!(
            "slice mean curvature differs from the time label by {deviation} (allowed {cmc_tol})"
        )));
    }
    let m_tau = slice_volume_with_error(m, tau, &e, &opts.grid)?;
    let m_tau2 = slice_volume_with_error(m, tau2, &e, &opts.grid)?;
    let q = cylinder_volume(m, tau, tau2, &e, &opts.grid, opts.rule)?;
    let lower = (m_tau.value - m_tau2.value) / tau2;
    let margin = q.value - lower;
    let tolerance =
        opts.tol * (1.0 + lower.abs()) + q.error_estimate + (m_tau.error_estimate + m_tau2.error_estimate) / tau2;
    let mut report = BoundReport {
        theorem: Theorem::RemarkSec2,
        start: tau,
        ladder: vec![tau2],
        subset: e.clone(),
        constant_name: "tau2",
        constant: tau2,
        reference_volumes: vec![m_tau.value],
        measured: vec![q.value],
        bounds: vec![lower],
        margins: vec![margin],
        tolerances: vec![tolerance],
        sharper_bounds: Vec::new(),
        verdict: if margin >= -tolerance {
            Verdict::Holds
        } else {
            Verdict::Violated
        },
        hypothesis_times: samples,
        diagnostics: vec![
            ("cmc_max_deviation".into(), deviation),
            ("slice_volume_tau2".into(), m_tau2.value),
        ],
        notes: Vec::new(),
    };
    report.notes.push(past_volume_diagnostic(m, tau, &e, opts)?);
    Ok(report)
}

/// Finite-sample look at `|M(τ)|` as `τ` decreases towards zero. An
/// unbounded growth would point to an infinite past cylinder; this is a
/// diagnostic only.
fn past_volume_diagnostic(m: &MetricSpec, tau: f64, e: &SpatialSubset, opts: &CheckOptions) -> Result<String> {
    let lo = m.window().minus.max(0.0);
    if lo > 0.0 {
        return Ok(format!(
            "tau does not reach 0 inside the window (starts at {}); no statement about the past cylinder",
            m.window().minus
        ));
    }
    let mut vols = Vec::new();
    for k in 0..6 {
        let s = tau * 0.5f64.powi(k);
        match slice_volume_with_error(m, s, e, &opts.grid) {
            Ok(v) => vols.push(v.value),
            Err(_) => break,
        }
    }
    let growing = vols.windows(2).all(|w| w[1] > w[0]);
    if growing && vols.len() >= 2 && vols[vols.len() - 1] > 1e3 * vols[0] {
        Ok("|M(tau)| grows without visible bound as tau decreases to 0; an infinite past cylinder is expected".into())
    } else {
        Ok("|M(tau)| shows no unbounded growth along the sampled tau towards 0".into())
    }
}
