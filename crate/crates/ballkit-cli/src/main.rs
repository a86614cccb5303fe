//! Command-line surface: build space descriptors, factor invariant
//! subspaces, extract and evaluate multiplier symbols, and run the
//! verification suites.
//!
//! Exit codes: 0 success, 1 certificate failure, 2 input or usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ballkit::serialize::{
    to_pretty_string, InvariantFactorJson, MatrixJson, MultiplierFactorJson, SpaceJson,
    SubspaceJson, TupleJson,
};
use ballkit::verify::{run_suite, Suite};
use ballkit::{
    extract_symbol, factor_invariant_subspace, factor_to_multiplier, make_space,
    make_space_from_coefficients, multiplier::symbol_power_sum, verify_analytic, BallPoint, Error,
    TruncatedSpace, C64,
};

const EXIT_OK: u8 = 0;
const EXIT_CERTIFICATE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "ballkit",
    about = "Truncated kernel spaces over the unit ball: dilations, invariant-subspace factorizations, multiplier symbols",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a truncated space descriptor.
    Space {
        /// Ball dimension (number of variables).
        #[arg(long)]
        n: usize,
        /// Kernel weight; at least 1. Mutually exclusive with --coeffs.
        #[arg(long, conflicts_with = "coeffs")]
        lambda: Option<f64>,
        /// Explicit kernel coefficients c_0,c_1,... (c_0 = 1, all positive).
        #[arg(long)]
        coeffs: Option<String>,
        /// Degree cap of the truncation.
        #[arg(long)]
        degree: u32,
        /// Dimension of the coefficient space.
        #[arg(long, default_value_t = 1)]
        coeff_dim: usize,
        /// Output path for the descriptor.
        #[arg(long)]
        out: PathBuf,
        /// Also write the compressed shift tuple of the space here.
        #[arg(long)]
        shift_tuple: Option<PathBuf>,
    },
    /// Factor a joint invariant subspace of a tuple as Pi Pi* = P_S.
    Factor {
        /// Path to an operator-tuple descriptor.
        #[arg(long)]
        tuple: PathBuf,
        /// Path to a subspace descriptor.
        #[arg(long)]
        subspace: PathBuf,
        /// Source truncation degree; defaults to the detected nilpotency
        /// order minus one.
        #[arg(long)]
        degree: Option<u32>,
        /// Output path for the factor report.
        #[arg(long)]
        out: PathBuf,
        /// Certificate tolerance (overrides BALLKIT_TOL, default 1e-9).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Factor a shift-invariant subspace of a space as a multiplier range.
    Mfactor {
        /// Path to a space descriptor (the target).
        #[arg(long)]
        space: PathBuf,
        /// Path to a subspace descriptor.
        #[arg(long)]
        subspace: PathBuf,
        /// Source truncation degree; defaults to the detected nilpotency
        /// order minus one.
        #[arg(long)]
        degree: Option<u32>,
        /// Output path for the multiplier report.
        #[arg(long)]
        out: PathBuf,
        /// Certificate tolerance (overrides BALLKIT_TOL, default 1e-9).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Evaluate the symbol of a multiplier factor at a point of the ball.
    Symbol {
        /// Path to a multiplier factor report.
        #[arg(long)]
        factor: PathBuf,
        /// Comma-separated coordinates, e.g. "0.3,0.2" or "0.1+0.2i,-0.4i".
        #[arg(long)]
        point: String,
        /// Cross-check tolerance (overrides BALLKIT_TOL, default 1e-9).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run a verification suite and print the report.
    Verify {
        /// One of: dilation, invariant, multiplier, spaces, all.
        #[arg(long)]
        suite: String,
        /// Tightens check thresholds when stricter than the pinned ones
        /// (overrides BALLKIT_TOL, default 1e-9).
        #[arg(long)]
        tol: Option<f64>,
        /// Seed for the randomized instances and probes.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Space {
            n,
            lambda,
            coeffs,
            degree,
            coeff_dim,
            out,
            shift_tuple,
        } => cmd_space(
            n,
            lambda,
            coeffs.as_deref(),
            degree,
            coeff_dim,
            &out,
            shift_tuple.as_deref(),
        ),
        Command::Factor {
            tuple,
            subspace,
            degree,
            out,
            tol,
        } => cmd_factor(&tuple, &subspace, degree, &out, resolve_tol(tol)),
        Command::Mfactor {
            space,
            subspace,
            degree,
            out,
            tol,
        } => cmd_mfactor(&space, &subspace, degree, &out, resolve_tol(tol)),
        Command::Symbol { factor, point, tol } => cmd_symbol(&factor, &point, resolve_tol(tol)),
        Command::Verify {
            suite,
            tol,
            seed,
            out,
        } => cmd_verify(&suite, resolve_tol(tol), seed, out.as_deref()),
    };
    ExitCode::from(code)
}

/// Tolerance precedence: flag, then BALLKIT_TOL, then 1e-9.
fn resolve_tol(flag: Option<f64>) -> f64 {
    flag.or_else(|| {
        std::env::var("BALLKIT_TOL")
            .ok()
            .and_then(|s| s.parse::<f64>().ok())
    })
    .unwrap_or(1e-9)
}

fn usage_error(message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {message}");
    EXIT_USAGE
}

fn write_file(path: &Path, contents: &str) -> Result<(), u8> {
    std::fs::write(path, contents).map_err(|e| usage_error(format!("cannot write {}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, u8> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage_error(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| usage_error(format!("cannot parse {}: {e}", path.display())))
}

fn cmd_space(
    n: usize,
    lambda: Option<f64>,
    coeffs: Option<&str>,
    degree: u32,
    coeff_dim: usize,
    out: &Path,
    shift_tuple_out: Option<&Path>,
) -> u8 {
    if n < 1 {
        return usage_error("n must be >= 1");
    }
    let space = match (lambda, coeffs) {
        (Some(lambda), None) => {
            if lambda.is_nan() || lambda < 1.0 {
                return usage_error("lambda must be >= 1");
            }
            make_space(n, lambda, degree, coeff_dim)
        }
        (None, Some(list)) => match parse_coefficients(list) {
            Ok(c) => make_space_from_coefficients(n, c, degree, coeff_dim),
            Err(message) => return usage_error(message),
        },
        (None, None) => return usage_error("one of --lambda or --coeffs is required"),
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };
    let space = match space {
        Ok(space) => space,
        Err(e) => return usage_error(e),
    };
    let json = SpaceJson::from_space(&space);
    if write_file(out, &to_pretty_string(&json)).is_err() {
        return EXIT_USAGE;
    }
    if let Some(path) = shift_tuple_out {
        let tuple = TupleJson::from_tuple(&ballkit::shift_tuple(&space));
        if write_file(path, &to_pretty_string(&tuple)).is_err() {
            return EXIT_USAGE;
        }
    }
    EXIT_OK
}

fn parse_coefficients(list: &str) -> Result<Vec<f64>, String> {
    list.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad kernel coefficient '{tok}'"))
        })
        .collect()
}

fn cmd_factor(
    tuple_path: &Path,
    subspace_path: &Path,
    degree: Option<u32>,
    out: &Path,
    tol: f64,
) -> u8 {
    let tuple_json: TupleJson = match read_json(tuple_path) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let subspace_json: SubspaceJson = match read_json(subspace_path) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let tuple = match tuple_json.to_tuple() {
        Ok(t) => t,
        Err(e) => return usage_error(e),
    };
    let subspace = match subspace_json.to_subspace() {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    let factor = match factor_invariant_subspace(&tuple, &subspace, degree) {
        Ok(f) => f,
        Err(e) => return usage_error(e),
    };
    let json = InvariantFactorJson::from_factor(&factor);
    if write_file(out, &to_pretty_string(&json)).is_err() {
        return EXIT_USAGE;
    }
    let certified = factor.diagnostics.projection_residual <= tol
        && factor.diagnostics.singular_value_gap <= tol
        && factor.diagnostics.rank == subspace.dim();
    if certified {
        EXIT_OK
    } else {
        eprintln!(
            "certificates exceed tolerance {tol:.3e}: projection {:.3e}, partial isometry {:.3e}, rank {} for subspace dimension {}",
            factor.diagnostics.projection_residual,
            factor.diagnostics.singular_value_gap,
            factor.diagnostics.rank,
            subspace.dim()
        );
        EXIT_CERTIFICATE
    }
}

/// Serializable summary of an analyticity report, embedded when a target
/// space fails the check.
#[derive(serde::Serialize)]
struct AnalyticReportJson {
    operator_norms: Vec<f64>,
    max_commutator_norm: f64,
    min_defect_eigenvalue: f64,
    purity_verdict: String,
    purity_residual_norms: Vec<f64>,
    passes: bool,
}

fn analytic_report_json(space: &TruncatedSpace) -> AnalyticReportJson {
    let report = verify_analytic(space, 1e-10);
    AnalyticReportJson {
        operator_norms: report.operator_norms.clone(),
        max_commutator_norm: report.validation.max_commutator_norm,
        min_defect_eigenvalue: report.validation.min_defect_eigenvalue,
        purity_verdict: format!("{:?}", report.purity.verdict),
        purity_residual_norms: report.purity.residual_norms.clone(),
        passes: report.passes,
    }
}

fn cmd_mfactor(
    space_path: &Path,
    subspace_path: &Path,
    degree: Option<u32>,
    out: &Path,
    tol: f64,
) -> u8 {
    let space_json: SpaceJson = match read_json(space_path) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let subspace_json: SubspaceJson = match read_json(subspace_path) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let target = match space_json.to_space() {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    let subspace = match subspace_json.to_subspace() {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    let factor = match factor_to_multiplier(&target, &subspace, degree) {
        Ok(f) => f,
        Err(Error::NotAnalytic(reason)) => {
            eprintln!("target space is not analytic: {reason}");
            println!("{}", to_pretty_string(&analytic_report_json(&target)));
            return EXIT_CERTIFICATE;
        }
        Err(e) => return usage_error(e),
    };
    let json = MultiplierFactorJson::from_factor(&factor);
    if write_file(out, &to_pretty_string(&json)).is_err() {
        return EXIT_USAGE;
    }
    let certified = factor.diagnostics.projection_residual <= tol
        && factor.diagnostics.singular_value_gap <= tol
        && factor.diagnostics.symbol_consistency_residual <= tol;
    if certified {
        EXIT_OK
    } else {
        eprintln!(
            "certificates exceed tolerance {tol:.3e}: projection {:.3e}, partial isometry {:.3e}, symbol consistency {:.3e}",
            factor.diagnostics.projection_residual,
            factor.diagnostics.singular_value_gap,
            factor.diagnostics.symbol_consistency_residual
        );
        EXIT_CERTIFICATE
    }
}

/// Parse "a", "a+bi", "a-bi", "bi", "-bi" into a complex number.
fn parse_complex(token: &str) -> Result<C64, String> {
    let s: String = token.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty coordinate".into());
    }
    if let Ok(re) = s.parse::<f64>() {
        return Ok(C64::new(re, 0.0));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Err(format!("bad coordinate '{token}'"));
    };
    // Split at the last sign that is not leading and not part of an exponent.
    let split = body
        .char_indices()
        .skip(1)
        .filter(|(idx, ch)| {
            (*ch == '+' || *ch == '-')
                && !matches!(body.as_bytes()[idx - 1], b'e' | b'E')
        })
        .map(|(idx, _)| idx)
        .last();
    let (re_part, im_part) = match split {
        Some(idx) => (&body[..idx], &body[idx..]),
        None => ("0", body),
    };
    let re = re_part
        .parse::<f64>()
        .map_err(|_| format!("bad coordinate '{token}'"))?;
    let im = match im_part {
        "+" | "" => 1.0,
        "-" => -1.0,
        other => other
            .parse::<f64>()
            .map_err(|_| format!("bad coordinate '{token}'"))?,
    };
    Ok(C64::new(re, im))
}

fn parse_point(text: &str) -> Result<Vec<C64>, String> {
    text.split(',').map(parse_complex).collect()
}

fn cmd_symbol(factor_path: &Path, point: &str, tol: f64) -> u8 {
    let factor_json: MultiplierFactorJson = match read_json(factor_path) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let coords = match parse_point(point) {
        Ok(c) => c,
        Err(message) => return usage_error(message),
    };
    let w = match BallPoint::new(coords) {
        Ok(w) => w,
        Err(e) => return usage_error(e),
    };
    let source = match factor_json.source.to_space() {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    let target = match factor_json.target.to_space() {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    if w.dim() != target.ball_dim() {
        return usage_error(format!(
            "point has {} coordinates, the factor lives over a {}-ball",
            w.dim(),
            target.ball_dim()
        ));
    }
    let blocks: Result<Vec<_>, u8> = factor_json
        .symbol
        .iter()
        .map(|b| b.block.to_matrix().map_err(usage_error))
        .collect();
    let blocks = match blocks {
        Ok(b) => b,
        Err(code) => return code,
    };
    let m_theta = match factor_json.m_theta.to_matrix() {
        Ok(m) => m,
        Err(e) => return usage_error(e),
    };

    let from_blocks = match symbol_power_sum(&blocks, &target, &w) {
        Ok(m) => m,
        Err(e) => return usage_error(e),
    };
    let from_kernel = match extract_symbol(&m_theta, &source, &target, &w) {
        Ok(m) => m,
        Err(e) => return usage_error(e),
    };
    let disagreement = ballkit::linalg::spectral_norm(&(&from_blocks - &from_kernel));
    println!("{}", to_pretty_string(&MatrixJson::from_matrix(&from_blocks)));
    if disagreement > tol {
        eprintln!(
            "power-sum evaluation disagrees with kernel extraction by {disagreement:.3e} (tolerance {tol:.3e})"
        );
        return EXIT_CERTIFICATE;
    }
    EXIT_OK
}

fn cmd_verify(suite: &str, tol: f64, seed: u64, out: Option<&Path>) -> u8 {
    let Some(suite) = Suite::parse(suite) else {
        return usage_error(format!(
            "unknown suite '{suite}' (expected dilation, invariant, multiplier, spaces, or all)"
        ));
    };
    let report = match run_suite(suite, tol, seed) {
        Ok(r) => r,
        Err(e) => return usage_error(e),
    };
    let rendered = to_pretty_string(&report);
    match out {
        Some(path) => {
            if write_file(path, &rendered).is_err() {
                return EXIT_USAGE;
            }
        }
        None => print!("{rendered}"),
    }
    if report.overall_pass {
        EXIT_OK
    } else {
        EXIT_CERTIFICATE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("0.3").unwrap(), C64::new(0.3, 0.0));
        assert_eq!(parse_complex("-0.25").unwrap(), C64::new(-0.25, 0.0));
        assert_eq!(parse_complex("0.1+0.4i").unwrap(), C64::new(0.1, 0.4));
        assert_eq!(parse_complex("0.1-0.4i").unwrap(), C64::new(0.1, -0.4));
        assert_eq!(parse_complex("0.5i").unwrap(), C64::new(0.0, 0.5));
        assert_eq!(parse_complex("-0.5i").unwrap(), C64::new(0.0, -0.5));
        assert_eq!(parse_complex("1e-2+2e-3i").unwrap(), C64::new(0.01, 0.002));
        assert!(parse_complex("nope").is_err());
        assert_eq!(
            parse_point(" 0.3 , 0.2 ").unwrap(),
            vec![C64::new(0.3, 0.0), C64::new(0.2, 0.0)]
        );
    }

    #[test]
    fn tolerance_resolution_prefers_flag() {
        assert_eq!(resolve_tol(Some(1e-7)), 1e-7);
    }
}
