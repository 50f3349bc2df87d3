//! The acceptance run: one PASS/FAIL line per criterion, nonzero exit if
//! any fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use serde_json::Value;
use visicone::suites::{self, SuiteReport};

const SEED: u64 = 0;

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

struct Outcome {
    passed: bool,
    summary: String,
}

fn from_reports(reports: &[SuiteReport], elapsed: Duration, limit: Option<Duration>) -> Outcome {
    let mut passed = reports.iter().all(SuiteReport::passed);
    let mut parts: Vec<String> = reports.iter().map(ToString::to_string).collect();
    if let Some(limit) = limit {
        passed &= elapsed < limit;
        parts.push(format!(
            "{:.3} s (limit {} s)",
            elapsed.as_secs_f64(),
            limit.as_secs()
        ));
    }
    Outcome {
        passed,
        summary: parts.join("; "),
    }
}

fn timed(limit: Option<Duration>, run: impl FnOnce() -> Vec<SuiteReport>) -> Outcome {
    let start = Instant::now();
    let reports = run();
    from_reports(&reports, start.elapsed(), limit)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_visicone"))
}

fn golden() -> Result<String, String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");

    let status = bin()
        .arg("check-example24")
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.code() != Some(0) {
        return Err(format!("check-example24 exited {:?}", status.status.code()));
    }

    let out = bin()
        .args(["project", "--input"])
        .arg(dir.join("triangle_project.json"))
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.code() != Some(0) {
        return Err(format!("project exited {:?}", out.status.code()));
    }
    let got: Value =
        serde_json::from_slice(&out.stdout).map_err(|e| format!("project output: {e}"))?;
    let text = std::fs::read_to_string(dir.join("triangle_project.expected.json"))
        .map_err(|e| e.to_string())?;
    let want: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let worst =
        max_numeric_diff(&got, &want).ok_or("project output does not have the golden shape")?;
    if worst > 1e-8 {
        return Err(format!("golden mismatch {worst:e}"));
    }

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim": 2, "body": {"type": "simplex", "vertices": [[0, 0], [1, 0]]}, "query": {"visible": {"from": [1, 1], "candidate": [0.5]}}}"#)
        .map_err(|e| e.to_string())?;
    let code = bin()
        .args(["visible", "--input"])
        .arg(&bad)
        .output()
        .map_err(|e| e.to_string())?
        .status
        .code();
    if code != Some(1) {
        return Err(format!("malformed input exited {code:?}"));
    }
    Ok(format!(
        "check-example24 exit 0, triangle golden within {worst:e}, malformed input exit 1"
    ))
}

/// Largest absolute difference between matching numbers, `None` if the
/// documents differ in anything but numeric values.
fn max_numeric_diff(a: &Value, b: &Value) -> Option<f64> {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => Some((x.as_f64()? - y.as_f64()?).abs()),
        (Value::Array(xs), Value::Array(ys)) if xs.len() == ys.len() => xs
            .iter()
            .zip(ys)
            .try_fold(0.0f64, |m, (x, y)| Some(m.max(max_numeric_diff(x, y)?))),
        (Value::Object(xs), Value::Object(ys)) if xs.len() == ys.len() => {
            xs.iter().try_fold(0.0f64, |m, (k, x)| {
                Some(m.max(max_numeric_diff(x, ys.get(k)?)?))
            })
        }
        _ => (a == b).then_some(0.0),
    }
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (
            "1 disk cone reproduction",
            Box::new(|| timed(Some(Duration::from_secs(1)), suites::disk_cone_checks)),
        ),
        (
            "2 projection vs oracles",
            Box::new(|| {
                timed(Some(Duration::from_secs(30)), || {
                    vec![
                        suites::oracle_min_norm(500, SEED),
                        suites::oracle_grid(500, SEED, 300),
                    ]
                })
            }),
        ),
        (
            "3 variational inequality",
            Box::new(|| timed(None, || vec![suites::variational_inequality(500, SEED)])),
        ),
        (
            "4 reduction identity",
            Box::new(|| timed(None, || vec![suites::pythagorean_identity(500, SEED)])),
        ),
        (
            "5 projection point visible",
            Box::new(|| timed(None, || vec![suites::projection_visible(500, SEED)])),
        ),
        (
            "6 lambda scan vs translated cone",
            Box::new(|| timed(None, || vec![suites::cone_agreement(1000, SEED)])),
        ),
        (
            "7 cone intersection membership",
            Box::new(|| {
                timed(None, || {
                    vec![suites::cone_intersection_membership(50, 20, SEED)]
                })
            }),
        ),
        (
            "8 translation invariance",
            Box::new(|| timed(None, || vec![suites::translation_invariance(100, SEED)])),
        ),
        (
            "9 segment separation",
            Box::new(|| timed(None, || vec![suites::separation_argmax(200, SEED)])),
        ),
        (
            "10 carrying vertices visible",
            Box::new(|| {
                timed(None, || {
                    vec![
                        suites::carrying_vertices_visible(500, SEED),
                        suites::face_decomposition(500, SEED),
                    ]
                })
            }),
        ),
        (
            "11 flat points visible",
            Box::new(|| timed(None, || vec![suites::flat_fully_visible(100, 20, SEED)])),
        ),
        (
            "12 cli golden",
            Box::new(|| match golden() {
                Ok(summary) => Outcome {
                    passed: true,
                    summary,
                },
                Err(summary) => Outcome {
                    passed: false,
                    summary,
                },
            }),
        ),
    ];

    let mut failed = 0;
    for (name, run) in &criteria {
        let o = run();
        failed += usize::from(!o.passed);
        println!(
            "{} criterion {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.summary
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
