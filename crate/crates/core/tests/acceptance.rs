//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Tolerances are pinned in the constants of each check.

use std::time::Instant;

use lorentz_volume::bounds::{
    check_remark_sec2, check_riemannian, check_thm01_future, check_thm01_past, check_thm12, BoundReport, CheckOptions,
    RiemannCase, Verdict,
};
use lorentz_volume::catalog::{self, make, ParamValue, Params};
use lorentz_volume::expr::Expr;
use lorentz_volume::geometry::{MetricSpec, ScalarField2, Signature, TimeWindow};
use lorentz_volume::numerics::{richardson_difference, Grid, SpatialDomain};
use lorentz_volume::volume::{
    cylinder_ladder, slice_volume, slice_volume_rate, slice_volume_with_error, SpatialSubset, TimeRule,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: lorentz_volume::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn params(kv: &[(&str, f64)]) -> Params {
    kv.iter()
        .map(|(k, v)| (k.to_string(), ParamValue::Number(*v)))
        .collect()
}

fn defaults(name: &str) -> (MetricSpec, catalog::CatalogEntry) {
    make(name, &Params::new()).expect("catalog defaults build")
}

fn opts(m: &MetricSpec, per_axis: usize, panels: usize) -> CheckOptions {
    CheckOptions {
        rule: TimeRule { panels },
        ..CheckOptions::new(Grid::uniform(m.dim(), per_axis).unwrap())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Interior sample times: inside finite window edges, or around `t1`.
fn interior_times(m: &MetricSpec, t1: f64, count: usize) -> Vec<f64> {
    let w = m.window();
    let lo = if w.minus.is_finite() { w.minus } else { t1 - 1.0 };
    let hi = if w.plus.is_finite() { w.plus } else { t1 + 2.0 };
    (0..count)
        .map(|k| lo + (hi - lo) * (0.05 + 0.85 * k as f64 / (count - 1) as f64))
        .collect()
}

fn default_ladder(m: &MetricSpec, t1: f64) -> Vec<f64> {
    let plus = m.window().plus;
    if plus.is_finite() {
        [0.5, 0.9, 0.99, 0.999].iter().map(|f| t1 + f * (plus - t1)).collect()
    } else {
        [1.0, 2.0, 4.0, 8.0].iter().map(|d| t1 + d).collect()
    }
}

fn crunch_oracle() -> Outcome {
    const TOL_EPS0: f64 = 1e-9;
    const TOL_VOLUME: f64 = 1e-9;
    const TOL_REL_CYLINDER: f64 = 1e-6;
    const TOL_MARGIN: f64 = 1e-6;
    let (m, _) = make(
        "flrw-crunch",
        &params(&[("n", 3.0), ("q", 2.0 / 3.0), ("tplus", 1.0), ("length", 1.0)]),
    )
    .unwrap();
    let ladder = [0.5, 0.9, 0.99, 0.999, 1.0 - 1e-4];
    let r = lib(check_thm01_future(
        &m,
        0.0,
        &ladder,
        &SpatialSubset::All,
        &opts(&m, 32, 20),
    ))?;
    let q = *r.measured.last().unwrap();
    let bound = *r.bounds.last().unwrap();
    let margin = r.final_margin().unwrap();
    ensure((r.constant - 2.0).abs() <= TOL_EPS0, || {
        format!("epsilon0 = {}", r.constant)
    })?;
    ensure((r.reference_volumes[0] - 1.0).abs() <= TOL_VOLUME, || {
        format!("|M(0)| = {}", r.reference_volumes[0])
    })?;
    ensure(rel(q, 1.0 / 3.0) <= TOL_REL_CYLINDER, || {
        format!("|Q(0, 1-1e-4)| = {q}")
    })?;
    ensure((bound - 0.5).abs() <= TOL_VOLUME, || format!("bound = {bound}"))?;
    ensure((margin - 1.0 / 6.0).abs() <= TOL_MARGIN, || {
        format!("margin = {margin}")
    })?;
    ensure(r.verdict == Verdict::Holds, || format!("verdict {}", r.verdict))?;
    Ok(format!(
        "eps0 = {}, |M(0)| = {}, |Q| = {q:.12}, bound = {bound}, margin = {margin:.12}",
        r.constant, r.reference_volumes[0]
    ))
}

fn sharpness_witness() -> Outcome {
    const TOL_REL: f64 = 1e-4;
    const MARGIN_LO: f64 = -1e-9;
    const MARGIN_HI: f64 = 1e-4;
    let (m, _) = make("riemannian-cusp", &params(&[("n", 2.0)])).unwrap();
    let ladder = [1.0, 2.0, 4.0, 8.0];
    let r = lib(check_riemannian(
        &m,
        0.0,
        &ladder,
        &SpatialSubset::All,
        &opts(&m, 32, 20),
        RiemannCase::II,
    ))?;
    let measured = *r.measured.last().unwrap();
    let bound = *r.bounds.last().unwrap();
    let margin = r.final_margin().unwrap();
    ensure(rel(measured, bound) <= TOL_REL, || {
        format!("measured {measured} vs bound {bound}")
    })?;
    ensure((bound - 0.5).abs() <= 1e-9, || format!("bound = {bound}"))?;
    ensure((MARGIN_LO..=MARGIN_HI).contains(&margin), || {
        format!("margin = {margin:e}")
    })?;
    Ok(format!(
        "|N+| at T = 8: {measured:.12}, bound = {bound}, margin = {margin:.3e}"
    ))
}

fn evolution_identity() -> Outcome {
    const TOL_REL: f64 = 1e-6;
    let mut worst = (0.0f64, String::new());
    let mut entries = 0;
    for name in catalog::names() {
        let (m, entry) = defaults(name);
        if !m.has_analytic_derivatives() {
            continue;
        }
        entries += 1;
        let grid = Grid::uniform(m.dim(), 32).unwrap();
        let e = SpatialSubset::All;
        for t in interior_times(&m, entry.default_t1(), 10) {
            let rate = lib(slice_volume_rate(&m, t, &e, &grid))?;
            let step = 1e-3 * (1.0 + t.abs());
            let fd = lib(richardson_difference(|s| slice_volume(&m, s, &e, &grid), t, step))?;
            let err = (rate - fd).abs() / rate.abs().max(fd.abs()).max(1e-12);
            // a vanishing rate (static strip) is compared absolutely
            let err = if rate.abs() < 1e-12 && fd.abs() < 1e-12 {
                0.0
            } else {
                err
            };
            if err > worst.0 {
                worst = (err, format!("{name} at t = {t}"));
            }
        }
    }
    ensure(worst.0 < TOL_REL, || {
        format!("relative error {:.3e} ({})", worst.0, worst.1)
    })?;
    Ok(format!(
        "{entries} entries x 10 times, worst relative error {:.2e}",
        worst.0
    ))
}

fn two_path_curvature() -> Outcome {
    const TOL_ANALYTIC: f64 = 1e-8;
    const TOL_DIFFERENCE: f64 = 1e-5;
    let mut worst = [0.0f64; 2];
    let mut analytic_entries = 0;
    for name in catalog::names() {
        let (m, entry) = defaults(name);
        let grid = Grid::uniform(m.dim(), 8).unwrap();
        let points = lib(m.sample_points(&grid))?;
        let times = interior_times(&m, entry.default_t1(), 5);
        let modes: Vec<(usize, MetricSpec)> = if m.has_analytic_derivatives() {
            analytic_entries += 1;
            vec![(0, m.clone()), (1, m.without_analytic_derivatives())]
        } else {
            vec![(1, m.clone())]
        };
        for (mode, spec) in modes {
            for &t in &times {
                for x in &points {
                    let evolution = lib(spec.slice_geometry(t, x))?.h;
                    let ambient = lib(spec.second_fundamental_form_ambient(t, x))?;
                    let scale = 1.0f64.max(evolution.amax());
                    let d = (&evolution - &ambient).amax() / scale;
                    worst[mode] = worst[mode].max(d);
                }
            }
        }
    }
    ensure(worst[0] < TOL_ANALYTIC, || {
        format!("analytic discrepancy {:.3e}", worst[0])
    })?;
    ensure(worst[1] < TOL_DIFFERENCE, || {
        format!("finite-difference discrepancy {:.3e}", worst[1])
    })?;
    Ok(format!(
        "{} entries ({analytic_entries} analytic), max discrepancy {:.2e} analytic, {:.2e} finite-difference",
        catalog::names().len(),
        worst[0],
        worst[1]
    ))
}

fn shrinking_element_suite() -> Outcome {
    const TOL_MARGIN: f64 = 1e-6;
    const TOL_EQUALITY: f64 = 1e-9;
    let (crunch, _) = defaults("flrw-crunch");
    let ladder = [0.5, 0.9, 0.99, 0.9999, 1.0 - 1e-8];
    let r = lib(check_thm12(
        &crunch,
        0.0,
        &ladder,
        &SpatialSubset::All,
        &opts(&crunch, 32, 20),
    ))?;
    let margin = r.final_margin().unwrap();
    ensure((r.constant - 1.0).abs() <= TOL_MARGIN, || {
        format!("gamma1 = {}", r.constant)
    })?;
    ensure((margin - 2.0 / 3.0).abs() <= TOL_MARGIN, || {
        format!("crunch margin {margin}")
    })?;

    let (strip, _) = make("minkowski-strip", &params(&[("tminus", 0.0), ("tplus", 3.0)])).unwrap();
    let s = lib(check_thm12(
        &strip,
        0.0,
        &[1.0, 2.0, 3.0],
        &SpatialSubset::All,
        &opts(&strip, 32, 20),
    ))?;
    let flat_margin = s.final_margin().unwrap();
    ensure(flat_margin.abs() <= TOL_EQUALITY, || {
        format!("strip margin {flat_margin:e}")
    })?;
    ensure(s.verdict == Verdict::Holds, || format!("strip verdict {}", s.verdict))?;

    let expanding = MetricSpec::conformally_flat(
        2,
        Signature::Lorentzian,
        ScalarField2::constant(0.0),
        ScalarField2::from_expr(Expr::parse("exp(2*t)", 2).unwrap(), 2),
        SpatialDomain::torus(vec![1.0, 1.0]).unwrap(),
        TimeWindow::new(0.0, 2.0).unwrap(),
    )
    .unwrap();
    let x = lib(check_thm12(
        &expanding,
        0.0,
        &[1.0, 2.0],
        &SpatialSubset::All,
        &opts(&expanding, 32, 20),
    ))?;
    ensure(x.verdict == Verdict::HypothesisNotMet, || {
        format!("expanding verdict {}", x.verdict)
    })?;
    Ok(format!(
        "crunch gamma1 = {:.9}, margin = {margin:.9}; strip margin = {flat_margin:.1e}; expanding: {}",
        r.constant, x.verdict
    ))
}

fn mean_curvature_time() -> Outcome {
    const TOL_H: f64 = 1e-8;
    const TOL_MARGIN: f64 = 1e-9;
    let (crunch, _) = defaults("flrw-crunch");
    let cmc = lib(crunch.reparameterize_by_mean_curvature((0.0, 0.95), 24))?;
    let x = cmc.origin();
    let mut worst_h = 0.0f64;
    for k in 0..10 {
        let tau = 2.5 + 16.0 * k as f64 / 9.0;
        let h = lib(cmc.mean_curvature(tau, &x))?;
        worst_h = worst_h.max((h - tau).abs());
    }
    ensure(worst_h <= TOL_H, || format!("|H - tau| = {worst_h:e}"))?;
    let mut margins = Vec::new();
    for (tau, tau2) in [(3.0, 6.0), (4.0, 8.0), (2.5, 10.0)] {
        let r = lib(check_remark_sec2(&cmc, tau, tau2, &opts(&cmc, 32, 20)))?;
        let m = r.margins.iter().copied().fold(f64::INFINITY, f64::min);
        ensure(m >= -TOL_MARGIN, || format!("margin {m:e} at ({tau}, {tau2})"))?;
        margins.push(format!("({tau},{tau2}): {m:.6}"));
    }
    Ok(format!("max |H - tau| = {worst_h:.1e}; margins {}", margins.join(", ")))
}

fn randomized_soundness() -> Outcome {
    const TOL: f64 = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);
    let (mut checked, mut skipped) = (0, 0);
    let mut worst = f64::INFINITY;
    for draw in 0..100 {
        let q = rng.gen_range(0.4..=1.5);
        let epsilon = rng.gen_range(0.0..=0.3);
        let n = rng.gen_range(1..=3) as f64;
        let (m, _) =
            make("perturbed-flrw", &params(&[("n", n), ("q", q), ("epsilon", epsilon)])).map_err(|e| e.to_string())?;
        let o = CheckOptions {
            hypothesis_samples: 8,
            ..opts(&m, 32, 20)
        };
        let ladder = [0.5, 0.9, 0.99, 0.999];
        let reports: [BoundReport; 2] = [
            lib(check_thm01_future(&m, 0.0, &ladder, &SpatialSubset::All, &o))?,
            lib(check_thm12(&m, 0.0, &ladder, &SpatialSubset::All, &o))?,
        ];
        for r in reports {
            if r.verdict == Verdict::HypothesisNotMet {
                skipped += 1;
                continue;
            }
            checked += 1;
            for k in 0..r.ladder.len() {
                // the error-estimate part of the row tolerance
                let estimate = r.tolerances[k] - o.tol * (1.0 + r.bounds[k].abs());
                let slack = r.margins[k] + TOL + estimate;
                worst = worst.min(r.margins[k]);
                ensure(slack >= 0.0, || {
                    format!(
                        "draw {draw} (n = {n}, q = {q}, epsilon = {epsilon}) {}: margin {:e} at T = {}",
                        r.theorem, r.margins[k], r.ladder[k]
                    )
                })?;
            }
        }
    }
    Ok(format!(
        "{checked} checks with hypothesis met, {skipped} skipped, smallest margin {worst:.3e}"
    ))
}

fn duality_and_covariance() -> Outcome {
    const TOL_FIELD: f64 = 1e-12;
    let mut worst = 0.0f64;
    for name in ["flrw-crunch", "perturbed-flrw", "perturbed-lapse"] {
        let (m, _) = defaults(name);
        let bang = m.time_reversal();
        let grid = Grid::uniform(m.dim(), 6).unwrap();
        for x in lib(m.sample_points(&grid))? {
            for t in [-1.0, 0.0, 0.5, 0.9] {
                let f = lib(m.slice_geometry(t, &x))?;
                let p = lib(bang.slice_geometry(-t, &x))?;
                let scale = 1.0 + f.h.amax() + f.g.amax();
                let d = [
                    (&f.g - &p.g).amax(),
                    (&f.h + &p.h).amax(),
                    (f.mean_curvature + p.mean_curvature).abs(),
                    (f.sqrt_det_g - p.sqrt_det_g).abs(),
                ]
                .into_iter()
                .fold(0.0, f64::max);
                worst = worst.max(d / scale);
            }
        }
        let ladder = [0.5, 0.9, 0.99];
        let back: Vec<f64> = ladder.iter().map(|t| -t).collect();
        let o = opts(&m, 32, 20);
        let fut = lib(check_thm01_future(&m, 0.0, &ladder, &SpatialSubset::All, &o))?;
        let past = lib(check_thm01_past(&bang, 0.0, &back, &SpatialSubset::All, &o))?;
        ensure(fut.verdict == past.verdict, || format!("{name}: verdicts differ"))?;
        for (a, b) in fut
            .margins
            .iter()
            .zip(&past.margins)
            .chain(fut.measured.iter().zip(&past.measured))
        {
            worst = worst.max((a - b).abs() / (1.0 + a.abs()));
        }
    }
    ensure(worst <= TOL_FIELD, || format!("past/future discrepancy {worst:e}"))?;

    let mut cases = 0;
    for c in [-1.0, 0.3, 2.0] {
        for (name, kind) in [
            ("flrw-crunch", 0),
            ("flrw-crunch", 1),
            ("perturbed-lapse", 0),
            ("riemannian-cusp", 2),
        ] {
            let (m, _) = defaults(name);
            let s = m.conformal_shift(c);
            let run = |spec: &MetricSpec| -> Result<BoundReport, String> {
                let o = opts(spec, 32, 20);
                let e = SpatialSubset::All;
                lib(match kind {
                    0 => check_thm01_future(spec, 0.0, &[0.5, 0.9, 0.99], &e, &o),
                    1 => check_thm12(spec, 0.0, &[0.5, 0.9, 0.99], &e, &o),
                    _ => check_riemannian(spec, 0.0, &[1.0, 2.0, 4.0], &e, &o, RiemannCase::II),
                })
            };
            let (a, b) = (run(&m)?, run(&s)?);
            ensure(a.verdict == b.verdict, || format!("{name} c = {c}: verdict changed"))?;
            for (x, y) in a.margins.iter().zip(&b.margins) {
                // sign of a margin that is zero up to rounding is not meaningful
                let tiny = 1e-12 * (1.0 + x.abs());
                ensure(x.abs() <= tiny || x.signum() == y.signum(), || {
                    format!("{name} c = {c}: margin sign changed ({x:e} -> {y:e})")
                })?;
            }
            cases += 1;
        }
    }
    Ok(format!(
        "duality discrepancy {worst:.1e}; {cases} shifted checks keep verdict and margin signs"
    ))
}

fn quadrature_convergence() -> Outcome {
    const TOL_REL: f64 = 1e-9;
    let mut worst = (0.0f64, String::new());
    let mut count = 0;
    for name in catalog::names() {
        let (m, entry) = defaults(name);
        let t1 = entry.default_t1();
        let ladder = default_ladder(&m, t1);
        let e = SpatialSubset::All;
        let coarse = Grid::uniform(m.dim(), 32).unwrap();
        let fine = Grid::uniform(m.dim(), 64).unwrap();
        let mut compare = |a: f64, b: f64, what: String| {
            let r = (a - b).abs() / a.abs().max(1e-300);
            count += 1;
            if r > worst.0 {
                worst = (r, what);
            }
        };
        for &t in std::iter::once(&t1).chain(&ladder) {
            let a = lib(slice_volume_with_error(&m, t, &e, &coarse))?.value;
            let b = lib(slice_volume_with_error(&m, t, &e, &fine))?.value;
            compare(a, b, format!("{name} |M({t})|"));
        }
        let qa = lib(cylinder_ladder(&m, t1, &ladder, &e, &coarse, TimeRule { panels: 20 }))?;
        let qb = lib(cylinder_ladder(&m, t1, &ladder, &e, &fine, TimeRule { panels: 40 }))?;
        for ((a, b), t) in qa.iter().zip(&qb).zip(&ladder) {
            compare(a.value, b.value, format!("{name} |Q({t1}, {t})|"));
        }
    }
    ensure(worst.0 < TOL_REL, || {
        format!("relative change {:.3e} in {}", worst.0, worst.1)
    })?;
    Ok(format!("{count} volumes, largest relative change {:.2e}", worst.0))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("crunch oracle", crunch_oracle),
        ("sharpness witness", sharpness_witness),
        ("evolution identity", evolution_identity),
        ("two-path curvature", two_path_curvature),
        ("shrinking volume element suite", shrinking_element_suite),
        ("mean-curvature time inequality", mean_curvature_time),
        ("randomized soundness", randomized_soundness),
        ("duality and covariance", duality_and_covariance),
        ("quadrature convergence", quadrature_convergence),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name} ({secs:.2} s): {detail}", k + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {} {name} ({secs:.2} s): {detail}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
