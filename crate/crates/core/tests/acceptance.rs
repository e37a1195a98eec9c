//! Acceptance suite: one pass/fail line per criterion, with the numbers
//! behind each verdict. Exits non-zero when any criterion fails.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::Instant;

use pointer_core::reproduction::{self, CheckResult};

const PAPER_CHECK_BUDGET_SECS: f64 = 120.0;

const SWEEP_CONFIG: &str = r#"
family = "squeezed"
seed = 42
sigma0.start = 0.5
sigma0.stop = 1.5
sigma0.count = 3
g.start = 0.5
g.stop = 2.0
g.count = 4
c.start = -2.0
c.stop = 2.0
c.count = 3
sampling.n = 5000
qubit.alpha_re = 0.6
qubit.beta_re = 0.8
"#;

fn pointer(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_pointer"))
        .args(args)
        .output()
        .expect("pointer binary runs")
}

/// Library determinism check plus the CLI: byte-identical sweeps across
/// repeated runs and worker counts, and `paper-check` exiting 0.
fn determinism_and_schema() -> (bool, Vec<String>) {
    let mut details = Vec::new();
    let library = reproduction::determinism();
    let mut ok = library.passed;
    details.push(format!("library: {}", if library.passed { "identical" } else { "differs" }));

    let dir = tempfile::tempdir().expect("temp dir");
    let config = dir.path().join("sweep.toml");
    fs::write(&config, SWEEP_CONFIG).expect("write config");
    let config = config.to_str().expect("utf-8 path");
    let runs: Vec<Vec<u8>> = [("1", "csv"), ("1", "csv"), ("4", "csv"), ("1", "json"), ("3", "json")]
        .iter()
        .map(|(w, f)| pointer(&["sweep", "--config", config, "--workers", w, "--format", f]).stdout)
        .collect();
    let csv_same = runs[0] == runs[1] && runs[0] == runs[2] && !runs[0].is_empty();
    let json_same = runs[3] == runs[4] && !runs[3].is_empty();
    ok &= csv_same && json_same;
    details.push(format!(
        "CLI sweep of 36 points: CSV {} across runs and 1/4 workers, JSON {} across 1/3 workers",
        if csv_same { "identical" } else { "DIFFERS" },
        if json_same { "identical" } else { "DIFFERS" },
    ));
    let header = String::from_utf8_lossy(&runs[0]).lines().next().unwrap_or_default().to_string();
    let header_ok = header == pointer_core::sweep::CSV_HEADER.join(",");
    ok &= header_ok;
    details.push(format!("CSV header {}", if header_ok { "exact" } else { "WRONG" }));

    let start = Instant::now();
    let out = pointer(&["paper-check"]);
    let secs = start.elapsed().as_secs_f64();
    let code = out.status.code();
    let pc_ok = code == Some(0) && secs <= PAPER_CHECK_BUDGET_SECS;
    ok &= pc_ok;
    details.push(format!("`pointer paper-check` exit code {code:?} after {secs:.2} s (expected 0)"));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let failing: Vec<&str> = stdout.lines().filter(|l| l.starts_with("[FAIL]")).collect();
    if !failing.is_empty() {
        details.push(format!("paper-check failing checks: {}", failing.join(" | ")));
    }
    (ok, details)
}

fn print(result: &CheckResult) {
    println!("{result}");
}

fn main() -> ExitCode {
    let mut all = true;
    for result in [
        reproduction::squeezed_example(),
        reproduction::gaussian_closed_forms_grid(),
        reproduction::global_inequality(),
        reproduction::faithful_family(),
        reproduction::stationarity_and_objective(),
        reproduction::measurement_statistics(),
    ] {
        all &= result.passed;
        print(&result);
    }
    let (ok, details) = determinism_and_schema();
    all &= ok;
    println!("[{}] 7. determinism and schema", if ok { "PASS" } else { "FAIL" });
    for d in details {
        println!("       {d}");
    }
    println!("acceptance: {}", if all { "all criteria pass" } else { "SOME CRITERIA FAIL" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
