use std::io::Write as _;
use std::process::Command;

use lorentz_volume::cli::{run, Outcome};

fn lorvol(args: &[&str]) -> Outcome {
    run(std::iter::once("lorvol").chain(args.iter().copied()))
}

fn last_row_field(csv: &str, column: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|c| *c == column).unwrap();
    let last = lines.last().unwrap();
    last.split(',').nth(idx).unwrap().to_string()
}

#[test]
fn crunch_future_check_holds_with_margin_one_sixth() {
    let out = lorvol(&["check", "thm01-future", "--catalog", "flrw-crunch"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out
        .stdout
        .starts_with("theorem,t1,T,epsilon0_or_gamma,reference_volume,cylinder_volume,bound,margin,verdict\n"));
    let margin: f64 = last_row_field(&out.stdout, "margin").parse().unwrap();
    assert!((margin - 1.0 / 6.0).abs() < 1e-4, "{margin}");
    assert_eq!(last_row_field(&out.stdout, "verdict"), "holds");
}

#[test]
fn flat_strip_fails_the_hypothesis() {
    let out = lorvol(&["check", "thm01-future", "--catalog", "minkowski-strip"]);
    assert_eq!(out.code, 3, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.contains("hypothesis-not-met"));
}

#[test]
fn expanding_metric_fails_the_shrinking_hypothesis() {
    let out = lorvol(&[
        "check",
        "thm12",
        "--config",
        write_config(
            r#"
[metric]
n = 1
signature = "lorentzian"
psi = "0"
sigma = ["exp(2*t)"]
window = [0, 2]
"#,
        )
        .path()
        .to_str()
        .unwrap(),
    ]);
    assert_eq!(out.code, 3, "{}{}", out.stdout, out.stderr);
}

fn write_config(body: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
    f.write_all(body.as_bytes()).unwrap();
    f
}

#[test]
fn malformed_sigma_reports_the_offset() {
    let cfg = write_config(
        r#"
[metric]
n = 2
psi = "0"
sigma = ["1", "0", "0", "(1 + * t)"]
window = [0, 1]
"#,
    );
    let out = lorvol(&["info", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("metric.sigma[3]"), "{}", out.stderr);
    assert!(out.stderr.contains("offset 5"), "{}", out.stderr);
}

#[test]
fn usage_and_config_errors_exit_one() {
    assert_eq!(lorvol(&["check", "thm99"]).code, 1);
    assert_eq!(lorvol(&["info"]).code, 1);
    assert_eq!(lorvol(&["info", "--catalog", "no-such-entry"]).code, 1);
    let out = lorvol(&["info", "--catalog", "flrw-crunch", "--param", "bogus=1"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("params.bogus"), "{}", out.stderr);
    let out = lorvol(&["cylinder", "--catalog", "flrw-crunch", "--ladder", "0.5,2"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("ladder"), "{}", out.stderr);
    let cfg = write_config("catalog = \"flrw-crunch\"\nt1 = 0.5\nwindow = [-1, 0.5]\n");
    let out = lorvol(&["info", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("window"), "{}", out.stderr);
}

#[test]
fn help_and_catalog_listing_succeed() {
    let out = lorvol(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("check"));
    let out = lorvol(&["catalog", "list"]);
    assert_eq!(out.code, 0);
    for name in lorentz_volume::catalog::names() {
        assert!(out.stdout.contains(name), "{name}");
    }
}

#[test]
fn flags_override_the_config_file() {
    let cfg = write_config("catalog = \"flrw-crunch\"\ngrid = [8]\nformat = \"kv\"\n[params]\ntplus = 2\n");
    let path = cfg.path().to_str().unwrap();
    let kv = lorvol(&["slice-volume", "--config", path, "--t", "1"]);
    assert_eq!(kv.code, 0, "{}", kv.stderr);
    // |M(1)| = (2 - 1)^2 = 1
    assert!(kv.stdout.contains("slice_volume = 1\n"), "{}", kv.stdout);
    let csv = lorvol(&[
        "slice-volume",
        "--config",
        path,
        "--t",
        "1",
        "--format",
        "csv",
        "--param",
        "tplus=3",
    ]);
    assert_eq!(csv.code, 0, "{}", csv.stderr);
    let v: f64 = last_row_field(&csv.stdout, "slice_volume").parse().unwrap();
    assert!((v - 4.0).abs() < 1e-12);
}

#[test]
fn cylinder_and_sweep_report_references() {
    let out = lorvol(&["cylinder", "--catalog", "flrw-crunch", "--ladder", "0.5,0.9"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v: f64 = last_row_field(&out.stdout, "cylinder_volume").parse().unwrap();
    let r: f64 = last_row_field(&out.stdout, "reference").parse().unwrap();
    assert!((v - r).abs() < 1e-12 * r);
    let out = lorvol(&["sweep", "--catalog", "riemannian-cusp", "--times", "0,1,2"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout.lines().count(), 4);
    let out = lorvol(&["curvature", "--catalog", "perturbed-lapse", "--t", "0.5"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let lo: f64 = last_row_field(&out.stdout, "min_H").parse().unwrap();
    let hi: f64 = last_row_field(&out.stdout, "max_H").parse().unwrap();
    assert!(lo < 4.0 && 4.0 < hi, "{lo} {hi}");
}

#[test]
fn local_check_tags_the_subset() {
    let out = lorvol(&[
        "check",
        "thm01-future",
        "--catalog",
        "flrw-crunch",
        "--subset",
        "0:0.5,0:1,0:1",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("thm01-local"));
    let margin: f64 = last_row_field(&out.stdout, "margin").parse().unwrap();
    assert!((margin - 1.0 / 12.0).abs() < 1e-4, "{margin}");
}

#[test]
fn remaining_checks_run() {
    let out = lorvol(&[
        "check",
        "remark2",
        "--catalog",
        "flrw-crunch",
        "--tau",
        "4",
        "--tau2",
        "8",
    ]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    let out = lorvol(&[
        "check",
        "riemann-ii",
        "--catalog",
        "riemannian-cusp",
        "--ladder",
        "geom:1,8,4",
    ]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    let out = lorvol(&["check", "riemann-i", "--catalog", "riemannian-expanding"]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    let out = lorvol(&[
        "check",
        "thm01-past",
        "--catalog",
        "conformal-homogeneous",
        "--param",
        "psi=t",
        "--param",
        "tplus=0",
        "--t1",
        "-1",
        "--ladder",
        "-2,-3",
    ]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    // e^{3t} integrated over [-3, -1]
    let q: f64 = last_row_field(&out.stdout, "cylinder_volume").parse().unwrap();
    assert!((q - ((-3.0f64).exp() - (-9.0f64).exp()) / 3.0).abs() < 1e-12, "{q}");
}

#[test]
fn output_is_identical_across_thread_counts() {
    let bin = env!("CARGO_BIN_EXE_lorvol");
    let args = ["check", "thm01-future", "--catalog", "perturbed-flrw", "--grid", "24"];
    let outputs: Vec<Vec<u8>> = ["1", "4"]
        .iter()
        .map(|threads| {
            let out = Command::new(bin)
                .args(args)
                .env("RAYON_NUM_THREADS", threads)
                .output()
                .unwrap();
            assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
            out.stdout
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert!(!outputs[0].is_empty());
}
