//! Acceptance checks for the command-line contract: byte-identical JSON
//! round trips, deterministic reports under a fixed seed, and the exit-code
//! contract 0/1/2 with every code exercised.

use std::path::Path;
use std::process::{Command, Output};

fn ballkit(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ballkit"))
        .args(args)
        .current_dir(dir)
        .env_remove("BALLKIT_TOL")
        .output()
        .expect("binary runs")
}

fn ballkit_with_tol_env(args: &[&str], dir: &Path, tol: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ballkit"))
        .args(args)
        .current_dir(dir)
        .env("BALLKIT_TOL", tol)
        .output()
        .expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

/// Frame JSON for the span of the given monomial-basis positions.
fn positions_subspace_json(dim: usize, positions: &[usize]) -> String {
    let mut re = vec![vec![0.0f64; positions.len()]; dim];
    for (col, &pos) in positions.iter().enumerate() {
        re[pos][col] = 1.0;
    }
    let im = vec![vec![0.0f64; positions.len()]; dim];
    serde_json::to_string(&serde_json::json!({
        "ambient_dim": dim,
        "frame": {"rows": dim, "cols": positions.len(), "re": re, "im": im}
    }))
    .unwrap()
}

#[test]
fn criterion_7_cli_contract() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let mut failures: Vec<String> = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            failures.push(name.to_string());
        }
    };

    // --- JSON round trips are byte-identical ---------------------------
    let out = ballkit(
        &["space", "--n", "2", "--lambda", "2", "--degree", "4", "--out", "space.json", "--shift-tuple", "shifts.json"],
        dir,
    );
    check("space exit 0", code(&out) == 0);
    // Typed round trip: space descriptor.
    let text = std::fs::read_to_string(dir.join("space.json")).unwrap();
    let parsed: ballkit::serialize::SpaceJson = serde_json::from_str(&text).unwrap();
    let again = ballkit::serialize::to_pretty_string(&parsed);
    check("typed space round trip byte-identical", text == again);
    // Typed round trip: tuple descriptor.
    let text = std::fs::read_to_string(dir.join("shifts.json")).unwrap();
    let parsed: ballkit::serialize::TupleJson = serde_json::from_str(&text).unwrap();
    let again = ballkit::serialize::to_pretty_string(&parsed);
    check("typed tuple round trip byte-identical", text == again);

    // --- deterministic reports under a fixed seed ----------------------
    let run1 = ballkit(&["verify", "--suite", "spaces", "--seed", "7"], dir);
    let run2 = ballkit(&["verify", "--suite", "spaces", "--seed", "7"], dir);
    check("verify exit 0", code(&run1) == 0);
    check(
        "verify deterministic bytes",
        !run1.stdout.is_empty() && run1.stdout == run2.stdout,
    );

    // --- exit code 0: successful factorization -------------------------
    let space_json: ballkit::serialize::SpaceJson =
        serde_json::from_str(&std::fs::read_to_string(dir.join("space.json")).unwrap()).unwrap();
    let dim = space_json.basis.len();
    let ideal: Vec<usize> = space_json
        .basis
        .iter()
        .enumerate()
        .filter(|(_, k)| k[0] >= 1)
        .map(|(i, _)| i)
        .collect();
    std::fs::write(dir.join("ideal.json"), positions_subspace_json(dim, &ideal)).unwrap();
    let out = ballkit(
        &["factor", "--tuple", "shifts.json", "--subspace", "ideal.json", "--degree", "4", "--out", "factor.json"],
        dir,
    );
    check("factor exit 0", code(&out) == 0);
    let out = ballkit(
        &["mfactor", "--space", "space.json", "--subspace", "ideal.json", "--out", "mfactor.json"],
        dir,
    );
    check("mfactor exit 0", code(&out) == 0);
    let out = ballkit(&["symbol", "--factor", "mfactor.json", "--point", "0.3,0.2"], dir);
    check("symbol exit 0", code(&out) == 0);

    // Typed round trip of the multiplier factor report.
    let text = std::fs::read_to_string(dir.join("mfactor.json")).unwrap();
    let parsed: ballkit::serialize::MultiplierFactorJson = serde_json::from_str(&text).unwrap();
    let again = ballkit::serialize::to_pretty_string(&parsed);
    check("typed factor round trip byte-identical", text == again);

    // --- exit code 1: certificate failure -------------------------------
    // A kernel with an inflated first norm is not contractive, so the
    // analyticity certificate fails.
    let out = ballkit(
        &["space", "--n", "2", "--coeffs", "1,0.4,0.16,0.064,0.0256", "--degree", "4", "--out", "bad_space.json"],
        dir,
    );
    check("custom-kernel space exit 0", code(&out) == 0);
    let out = ballkit(
        &["mfactor", "--space", "bad_space.json", "--subspace", "ideal.json", "--out", "bad_factor.json"],
        dir,
    );
    check("non-analytic mfactor exit 1", code(&out) == 1);
    check(
        "analyticity report embedded",
        String::from_utf8_lossy(&out.stdout).contains("min_defect_eigenvalue"),
    );

    // --- exit code 2: usage and precondition errors ---------------------
    let out = ballkit(&["space", "--n", "2", "--lambda", "0.5", "--degree", "2", "--out", "x.json"], dir);
    check("lambda below one exit 2", code(&out) == 2);
    check(
        "lambda message",
        String::from_utf8_lossy(&out.stderr).contains("lambda must be >= 1"),
    );
    let out = ballkit(&["verify", "--suite", "bogus"], dir);
    check("unknown suite exit 2", code(&out) == 2);
    let out = ballkit(&["symbol", "--factor", "mfactor.json", "--point", "1.0,0"], dir);
    check("boundary point exit 2", code(&out) == 2);
    std::fs::write(dir.join("empty.json"), positions_subspace_json(dim, &[])).unwrap();
    let out = ballkit(
        &["factor", "--tuple", "shifts.json", "--subspace", "empty.json", "--out", "f.json"],
        dir,
    );
    check("zero subspace exit 2", code(&out) == 2);
    std::fs::write(dir.join("constants.json"), positions_subspace_json(dim, &[0])).unwrap();
    let out = ballkit(
        &["factor", "--tuple", "shifts.json", "--subspace", "constants.json", "--out", "f.json"],
        dir,
    );
    check("non-invariant subspace exit 2", code(&out) == 2);
    check(
        "non-invariant residual message",
        String::from_utf8_lossy(&out.stderr).contains("residual"),
    );
    let out = ballkit(&["factor", "--tuple", "missing.json", "--subspace", "ideal.json", "--out", "f.json"], dir);
    check("missing input exit 2", code(&out) == 2);

    // --- tolerance precedence: flag beats BALLKIT_TOL beats default ------
    // An absurdly tight env tolerance makes the residual checks fail...
    let out = ballkit_with_tol_env(&["verify", "--suite", "invariant"], dir, "1e-30");
    check("env tolerance applies (exit 1)", code(&out) == 1);
    // ...unless the flag overrides it.
    let out = ballkit_with_tol_env(
        &["verify", "--suite", "invariant", "--tol", "1e-9"],
        dir,
        "1e-30",
    );
    check("flag overrides env tolerance (exit 0)", code(&out) == 0);

    if failures.is_empty() {
        println!("ACCEPTANCE 7 cli-contract: PASS");
    } else {
        println!("ACCEPTANCE 7 cli-contract: FAIL ({failures:?})");
    }
    assert!(failures.is_empty(), "failed checks: {failures:?}");
}
