//! Demo computations behind the wasm exports, plain Rust so they can be
//! exercised natively.

use serde::Serialize;

use ballkit::multiplier::symbol_power_sum;
use ballkit::{
    factor_to_multiplier, make_space, purity_report, shift_tuple, BallPoint, Error, Result,
    Subspace, TruncatedSpace,
};

const MAX_DEMO_DEGREE: u32 = 10;

pub fn render<T: Serialize>(result: Result<T>) -> String {
    match result {
        Ok(value) => serde_json::to_string(&value).expect("demo payloads serialize"),
        Err(e) => serde_json::to_string(&serde_json::json!({ "error": e.to_string() }))
            .expect("error payload serializes"),
    }
}

fn guard(n: usize, lambda: f64, degree: u32) -> Result<()> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidParameter("n must be 1, 2 or 3".into()));
    }
    if !(1.0..=8.0).contains(&lambda) {
        return Err(Error::InvalidParameter("lambda must lie in [1, 8]".into()));
    }
    if degree > MAX_DEMO_DEGREE {
        return Err(Error::InvalidParameter(format!(
            "degree capped at {MAX_DEMO_DEGREE} for the demo"
        )));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct PurityDecay {
    pub dim: usize,
    pub residuals: Vec<f64>,
    pub pure: bool,
    pub iterations: usize,
}

/// Norms of the CP iterates of the compressed shift tuple; exact zero is
/// reached one step past the degree cap.
pub fn purity_decay(n: usize, lambda: f64, degree: u32) -> Result<PurityDecay> {
    guard(n, lambda, degree)?;
    let space = make_space(n, lambda, degree, 1)?;
    let tuple = shift_tuple(&space);
    let report = purity_report(&tuple, degree as usize + 2, 1e-14)?;
    Ok(PurityDecay {
        dim: space.dim(),
        residuals: report.residual_norms,
        pure: report.is_pure,
        iterations: report.iterations,
    })
}

#[derive(Debug, Serialize)]
pub struct SymbolHeatmap {
    /// Grid resolution per axis over [-extent, extent]^2.
    pub resolution: usize,
    pub extent: f64,
    /// Row-major |Theta| values; -1 marks points outside the domain.
    pub values: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct FactorSummary {
    pub subspace_dim: usize,
    pub source_coeff_dim: usize,
    pub singular_values: Vec<f64>,
    pub projection_residual: f64,
    pub singular_value_gap: f64,
    pub symbol_consistency_residual: f64,
    pub heatmap: SymbolHeatmap,
}

fn summarize(
    target: &TruncatedSpace,
    s: &Subspace,
    resolution: usize,
    extent: f64,
    point: impl Fn(f64, f64) -> Vec<ballkit::C64>,
) -> Result<FactorSummary> {
    let factor = factor_to_multiplier(target, s, None)?;
    let singular_values: Vec<f64> = ballkit::linalg::singular_values(&factor.m_theta)
        .iter()
        .copied()
        .collect();

    let mut values = Vec::with_capacity(resolution * resolution);
    for row in 0..resolution {
        let y = extent * (2.0 * row as f64 / (resolution - 1) as f64 - 1.0);
        for col in 0..resolution {
            let x = extent * (2.0 * col as f64 / (resolution - 1) as f64 - 1.0);
            let coords = point(x, y);
            let norm_sq: f64 = coords.iter().map(|z| z.norm_sqr()).sum();
            if norm_sq >= 0.98 {
                values.push(-1.0);
                continue;
            }
            let w = BallPoint::new(coords)?;
            let theta = symbol_power_sum(&factor.symbol, target, &w)?;
            values.push(ballkit::linalg::spectral_norm(&theta));
        }
    }

    Ok(FactorSummary {
        subspace_dim: s.dim(),
        source_coeff_dim: factor.source.coeff_dim(),
        singular_values,
        projection_residual: factor.diagnostics.projection_residual,
        singular_value_gap: factor.diagnostics.singular_value_gap,
        symbol_consistency_residual: factor.diagnostics.symbol_consistency_residual,
        heatmap: SymbolHeatmap {
            resolution,
            extent,
            values,
        },
    })
}

/// Factor S = span{z^m, ..., z^N} in a weighted disc space and sample
/// |Theta| over the disc; the heatmap shows the order-m zero at the origin.
pub fn beurling_disc(lambda: f64, degree: u32, zero_order: u32) -> Result<FactorSummary> {
    guard(1, lambda, degree)?;
    if zero_order == 0 || zero_order > degree {
        return Err(Error::InvalidParameter(
            "zero order must lie between 1 and the degree cap".into(),
        ));
    }
    let target = make_space(1, lambda, degree, 1)?;
    let positions: Vec<usize> = (zero_order as usize..=degree as usize).collect();
    let s = Subspace::from_basis_positions(&target, &positions)?;
    summarize(&target, &s, 61, 0.98, |x, y| vec![ballkit::C64::new(x, y)])
}

/// Factor a monomial-ideal subspace of a weighted two-ball space and
/// sample |Theta| over the real slice of the ball.
pub fn ball_ideal_symbol(lambda: f64, degree: u32, ideal: &str) -> Result<FactorSummary> {
    guard(2, lambda, degree)?;
    let target = make_space(2, lambda, degree, 1)?;
    let keep = |k: &[u32]| -> bool {
        match ideal {
            "z1" => k[0] >= 1,
            "z2" => k[1] >= 1,
            "z1z2" => k[0] >= 1 && k[1] >= 1,
            "deg2" => k[0] + k[1] >= 2,
            _ => false,
        }
    };
    if !["z1", "z2", "z1z2", "deg2"].contains(&ideal) {
        return Err(Error::InvalidParameter(format!(
            "unknown ideal '{ideal}' (expected z1, z2, z1z2 or deg2)"
        )));
    }
    let positions: Vec<usize> = target
        .basis()
        .indices()
        .iter()
        .enumerate()
        .filter(|(_, k)| keep(k.entries()))
        .map(|(i, _)| i)
        .collect();
    let s = Subspace::from_basis_positions(&target, &positions)?;
    summarize(&target, &s, 61, 0.69, |x, y| {
        vec![ballkit::C64::new(x, 0.0), ballkit::C64::new(y, 0.0)]
    })
}
