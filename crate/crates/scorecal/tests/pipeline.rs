//! End-to-end pipeline through the CLI binary: synth -> train -> apply
//! -> eval, checked against an analytic quadrature oracle for the
//! two-Gaussian model.

use std::path::Path;
use std::process::Command;

use scorecal::math::{integrate, softplus};

fn scorecal(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_scorecal"))
        .args(args)
        .output()
        .expect("binary should run")
}

fn run_ok(args: &[&str]) -> String {
    let out = scorecal(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn csv_metric(csv: &str, name: &str) -> f64 {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{name},")))
        .unwrap_or_else(|| panic!("metric {name} missing from:\n{csv}"))
        .parse()
        .unwrap()
}

#[test]
fn pipeline_c_llr_matches_two_gaussian_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let (n_tar, n_non) = (50_000usize, 50_000usize);

    run_ok(&[
        "synth",
        "--mu", "2.0",
        "--n-tar", "50000",
        "--n-non", "50000",
        "--warp-scale", "1.0",
        "--warp-offset", "0.0",
        "--seed", "4242",
        "--out", &p("scores.csv"),
        "--truth", &p("truth.txt"),
    ]);
    let train_out = run_ok(&[
        "train",
        "--trials", &p("scores.csv"),
        "--alpha", "1", "--beta", "1", "--tau", "0",
        "--out", &p("model.txt"),
    ]);
    assert!(train_out.contains("converged      : true"), "{train_out}");

    run_ok(&[
        "apply",
        "--trials", &p("scores.csv"),
        "--model", &p("model.txt"),
        "--out", &p("llrs.csv"),
    ]);
    let csv = run_ok(&["eval", "--trials", &p("llrs.csv"), "--csv"]);
    let c_llr = csv_metric(&csv, "c_llr");

    // With an identity warp the trained model should be near identity.
    let (model, _) = scorecal::io::read_affine_model(Path::new(&p("model.txt"))).unwrap();
    assert!((model.scale - 1.0).abs() < 0.05, "scale {}", model.scale);
    assert!(model.offset.abs() < 0.05, "offset {}", model.offset);

    // Analytic oracle: for llr ~ N(mu, 2mu) per class, the expected
    // target cost is the Gaussian integral of softplus(-x); by symmetry
    // the non-target term is identical, so c_llr = E[softplus(-x)]/ln 2.
    let (mu, var) = (2.0f64, 4.0f64);
    let sigma = var.sqrt();
    let phi = |x: f64| {
        (-(x - mu) * (x - mu) / (2.0 * var)).exp()
            / (sigma * (2.0 * std::f64::consts::PI).sqrt())
    };
    let lo = mu - 14.0 * sigma;
    let hi = mu + 14.0 * sigma;
    let mean = integrate(|x| softplus(-x) * phi(x), lo, hi, 1e-11).unwrap();
    let second = integrate(|x| softplus(-x) * softplus(-x) * phi(x), lo, hi, 1e-11).unwrap();
    let variance = second - mean * mean;

    let ln2 = std::f64::consts::LN_2;
    let analytic = mean / ln2;
    let se = (0.5 / ln2)
        * (variance / n_tar as f64 + variance / n_non as f64).sqrt();
    assert!(
        (c_llr - analytic).abs() <= 3.0 * se,
        "pipeline c_llr {c_llr} vs analytic {analytic} (se {se})"
    );
}
