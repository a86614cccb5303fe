//! Multipliers between truncated kernel spaces: analyticity verification
//! for a space, the intertwiner-to-multiplier correspondence with symbol
//! extraction through kernel vectors, Taylor coefficients of the symbol
//! read off constant sections, and the multiplier form of the invariant
//! subspace factorization.

use crate::ballspace::{kernel_vector, shift_tuple, BallPoint, TruncatedSpace};
use crate::invariant::{factor_invariant_subspace, Subspace};
use crate::linalg::{singular_values, spectral_norm};
use crate::multiindex::MultiIndex;
use crate::optuple::{purity_report, validate_tuple, PurityReport, ValidationReport};
use crate::{C64, CMatrix, CVector, Error, Result, DEFAULT_PURITY_MAX_ITER, DEFAULT_PURITY_TOL};

/// Default residual tolerance for accepting an intertwining relation.
pub const DEFAULT_INTERTWINING_TOL: f64 = 1e-8;
/// Default relative singular-value threshold for joint-eigenspace counting.
pub const DEFAULT_EIGENSPACE_TOL: f64 = 1e-8;

/// Whether a truncated space behaves like an analytic Hilbert space: the
/// compressed shifts are bounded (norms reported), commuting, jointly
/// contractive, and pure.
#[derive(Debug, Clone)]
pub struct AnalyticReport {
    pub operator_norms: Vec<f64>,
    pub validation: ValidationReport,
    pub purity: PurityReport,
    pub passes: bool,
}

pub fn verify_analytic(space: &TruncatedSpace, tol: f64) -> AnalyticReport {
    let shifts = shift_tuple(space);
    let operator_norms = shifts.matrices().iter().map(spectral_norm).collect();
    let validation = validate_tuple(&shifts, tol);
    let purity = if validation.passes {
        purity_report(&shifts, DEFAULT_PURITY_MAX_ITER, DEFAULT_PURITY_TOL)
            .expect("validated tuple")
    } else {
        // Contractivity failed; run the iteration budgeted for reporting
        // only, on the truncation it still terminates by nilpotency.
        PurityReport {
            iterations: 0,
            residual_norms: Vec::new(),
            is_pure: false,
            verdict: crate::optuple::PurityVerdict::Undetermined,
            p_inf_estimate: crate::linalg::identity(space.dim()),
        }
    };
    let passes = validation.passes && purity.is_pure;
    AnalyticReport {
        operator_norms,
        validation,
        purity,
        passes,
    }
}

/// Numerical dimension of the joint adjoint eigenspace at w.
///
/// At the truncation the exact statement is degree-aware: the truncated
/// kernel vector satisfies M_{z_i}* K_w = conj(w_i) K_w only after
/// projecting the right side one degree down, because the top-degree band
/// of K_w has nowhere to go. The stacked operator therefore uses
/// M_{z_i}* - conj(w_i) P_{N-1}, whose kernel the truncated kernel vectors
/// span exactly; singular values below `tol` (relative) count as zero.
pub fn joint_eigenspace_dim(space: &TruncatedSpace, w: &BallPoint, tol: f64) -> Result<usize> {
    if w.dim() != space.ball_dim() {
        return Err(Error::DimensionMismatch(format!(
            "point dimension {} != ball dimension {}",
            w.dim(),
            space.ball_dim()
        )));
    }
    let shifts = shift_tuple(space);
    let dim = space.dim();
    let n = space.ball_dim();
    let cd = space.coeff_dim();
    let cap = space.degree_cap();

    // Projection onto degrees <= cap - 1 (zero for cap = 0).
    let mut lower = CMatrix::zeros(dim, dim);
    for (pos, k) in space.basis().indices().iter().enumerate() {
        if k.degree() < cap {
            for j in 0..cd {
                lower[(pos * cd + j, pos * cd + j)] = C64::new(1.0, 0.0);
            }
        }
    }

    let mut stacked = CMatrix::zeros(n * dim, dim);
    for (i, m) in shifts.matrices().iter().enumerate() {
        let block = m.adjoint() - (&lower * w.coords()[i].conj());
        stacked.view_mut((i * dim, 0), (dim, dim)).copy_from(&block);
    }
    let sv = singular_values(&stacked);
    let top = sv.iter().copied().fold(0.0, f64::max).max(1.0);
    Ok(sv.iter().filter(|&&s| s <= tol * top).count())
}

/// Residuals of X (M_{z_i} x I) = (M_{z_i} x I) X per coordinate.
#[derive(Debug, Clone)]
pub struct IntertwinerCheck {
    pub residuals: Vec<f64>,
    pub tol: f64,
    pub pass: bool,
}

pub fn check_intertwining(
    x: &CMatrix,
    source: &TruncatedSpace,
    target: &TruncatedSpace,
    tol: f64,
) -> Result<IntertwinerCheck> {
    if source.ball_dim() != target.ball_dim() {
        return Err(Error::DimensionMismatch(
            "source and target live over balls of different dimension".into(),
        ));
    }
    if x.nrows() != target.dim() || x.ncols() != source.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, expected {}x{}",
            x.nrows(),
            x.ncols(),
            target.dim(),
            source.dim()
        )));
    }
    let source_shifts = shift_tuple(source);
    let target_shifts = shift_tuple(target);
    let residuals: Vec<f64> = (0..source.ball_dim())
        .map(|i| {
            spectral_norm(&(x * &source_shifts.matrices()[i] - &target_shifts.matrices()[i] * x))
        })
        .collect();
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    Ok(IntertwinerCheck {
        residuals,
        tol,
        pass: worst <= tol,
    })
}

fn require_intertwining(
    x: &CMatrix,
    source: &TruncatedSpace,
    target: &TruncatedSpace,
) -> Result<()> {
    let check = check_intertwining(x, source, target, DEFAULT_INTERTWINING_TOL)?;
    if !check.pass {
        return Err(Error::NotIntertwining {
            residual: check.residuals.iter().copied().fold(0.0, f64::max),
        });
    }
    Ok(())
}

/// Pointwise symbol of an intertwiner at w, through kernel vectors: the
/// degree-0 coefficient block of X*(K_target(., w) tensor zeta) is
/// Theta(w)* zeta because the source kernel has constant term exactly one.
pub fn extract_symbol(
    x: &CMatrix,
    source: &TruncatedSpace,
    target: &TruncatedSpace,
    w: &BallPoint,
) -> Result<CMatrix> {
    require_intertwining(x, source, target)?;
    let dim_e = joint_eigenspace_dim(source, w, DEFAULT_EIGENSPACE_TOL)?;
    if dim_e != source.coeff_dim() {
        return Err(Error::InvalidParameter(format!(
            "joint eigenspace at the point has dimension {dim_e}, expected {}",
            source.coeff_dim()
        )));
    }
    extract_symbol_unchecked(x, source, target, w)
}

fn extract_symbol_unchecked(
    x: &CMatrix,
    source: &TruncatedSpace,
    target: &TruncatedSpace,
    w: &BallPoint,
) -> Result<CMatrix> {
    let cd_src = source.coeff_dim();
    let cd_tgt = target.coeff_dim();
    let x_star = x.adjoint();
    // Columns of Theta(w)* indexed by the target coefficient basis.
    let mut theta_star = CMatrix::zeros(cd_src, cd_tgt);
    for j in 0..cd_tgt {
        let mut zeta = CVector::zeros(cd_tgt);
        zeta[j] = C64::new(1.0, 0.0);
        let kv = kernel_vector(target, w, &zeta)?;
        let pulled = &x_star * target.to_orthonormal(&kv);
        let monomial = source.from_orthonormal(&pulled);
        for p in 0..cd_src {
            theta_star[(p, j)] = monomial.coeffs[p];
        }
    }
    Ok(theta_star.adjoint())
}

/// Taylor coefficient blocks of the symbol, indexed by the target basis:
/// X applied to the constant section 1 tensor eta expands in target
/// monomials as sum_k (Theta_k eta) z^k.
pub fn symbol_coefficients(
    x: &CMatrix,
    source: &TruncatedSpace,
    target: &TruncatedSpace,
) -> Result<Vec<CMatrix>> {
    require_intertwining(x, source, target)?;
    let cd_src = source.coeff_dim();
    let cd_tgt = target.coeff_dim();
    let mut blocks = vec![CMatrix::zeros(cd_tgt, cd_src); target.block_count()];
    for j in 0..cd_src {
        // 1 tensor eta_j sits in the degree-0 block with nu_0 = 1, so its
        // orthonormal coordinates are the unit vector itself.
        let mut section = CVector::zeros(source.dim());
        section[j] = C64::new(1.0, 0.0);
        let image = target.from_orthonormal(&(x * section));
        for (pos, block) in blocks.iter_mut().enumerate() {
            for p in 0..cd_tgt {
                block[(p, j)] = image.coeffs[pos * cd_tgt + p];
            }
        }
    }
    Ok(blocks)
}

/// Evaluate the coefficient blocks as a power sum at w.
pub fn symbol_power_sum(
    blocks: &[CMatrix],
    target: &TruncatedSpace,
    w: &BallPoint,
) -> Result<CMatrix> {
    if blocks.len() != target.block_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} blocks for {} basis indices",
            blocks.len(),
            target.block_count()
        )));
    }
    let mut out = CMatrix::zeros(blocks[0].nrows(), blocks[0].ncols());
    for (pos, k) in target.basis().indices().iter().enumerate() {
        out += blocks[pos].scale(1.0) * w.monomial(k);
    }
    Ok(out)
}

/// Assemble the matrix of multiplication by the symbol on orthonormal
/// coordinates, truncating products beyond the target cap.
pub fn multiplier_matrix(
    blocks: &[CMatrix],
    source: &TruncatedSpace,
    target: &TruncatedSpace,
) -> Result<CMatrix> {
    if source.ball_dim() != target.ball_dim() {
        return Err(Error::DimensionMismatch(
            "source and target live over balls of different dimension".into(),
        ));
    }
    if blocks.len() != target.block_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} blocks for {} target indices",
            blocks.len(),
            target.block_count()
        )));
    }
    let cd_src = source.coeff_dim();
    let cd_tgt = target.coeff_dim();
    let mut m = CMatrix::zeros(target.dim(), source.dim());
    for (kpos, k) in source.basis().indices().iter().enumerate() {
        let src_scale = 1.0 / source.nu(kpos).sqrt();
        for (mpos, mdx) in target.basis().indices().iter().enumerate() {
            // l = m - k entrywise, when non-negative.
            let diff: Option<Vec<u32>> = mdx
                .entries()
                .iter()
                .zip(k.entries().iter())
                .map(|(&me, &ke)| me.checked_sub(ke))
                .collect();
            let Some(entries) = diff else { continue };
            let l = MultiIndex::new(entries);
            let Some(lpos) = target.basis().position(&l) else {
                continue;
            };
            let tgt_scale = target.nu(mpos).sqrt();
            let weight = C64::new(src_scale * tgt_scale, 0.0);
            for p in 0..cd_tgt {
                for q in 0..cd_src {
                    m[(mpos * cd_tgt + p, kpos * cd_src + q)] += blocks[lpos][(p, q)] * weight;
                }
            }
        }
    }
    Ok(m)
}

/// Deterministic evaluation grid inside the ball, radius at most 0.8: five
/// real values per axis in low dimension, three from dimension three up.
pub fn symbol_grid(n: usize) -> Vec<BallPoint> {
    let scale = 0.8 / (n as f64).sqrt();
    let axis: Vec<f64> = if n <= 2 {
        vec![-scale, -0.5 * scale, 0.0, 0.5 * scale, scale]
    } else {
        vec![-scale, 0.0, scale]
    };
    let mut points = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(points.len() * axis.len());
        for p in &points {
            for &v in &axis {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        points = next;
    }
    points
        .into_iter()
        .map(|p| BallPoint::real(&p).expect("grid stays inside the ball"))
        .collect()
}

/// A partially isometric multiplier realizing an invariant subspace.
#[derive(Debug, Clone)]
pub struct MultiplierFactor {
    /// Truncated Drury-Arveson source space of the factorization.
    pub source: TruncatedSpace,
    /// Target space the subspace lives in.
    pub target: TruncatedSpace,
    /// Taylor blocks of the symbol, indexed by the target basis.
    pub symbol: Vec<CMatrix>,
    /// Matrix of multiplication by the symbol, orthonormal coordinates.
    pub m_theta: CMatrix,
    pub diagnostics: MultiplierDiagnostics,
}

#[derive(Debug, Clone)]
pub struct MultiplierDiagnostics {
    /// Spectral norm of M_Theta M_Theta* - P_S.
    pub projection_residual: f64,
    /// Largest distance of a singular value of M_Theta from {0, 1}.
    pub singular_value_gap: f64,
    /// Max grid disagreement between the power sum of the Taylor blocks
    /// and the kernel-vector extraction.
    pub symbol_consistency_residual: f64,
    /// Number of singular values above 1/2.
    pub rank: usize,
}

/// Factor a shift-invariant subspace of an analytic truncated space as the
/// range of a partially isometric multiplier from truncated Drury-Arveson
/// space: run the invariant-subspace factorization on the shift tuple,
/// read the symbol off the resulting intertwiner, and certify.
pub fn factor_to_multiplier(
    target: &TruncatedSpace,
    s: &Subspace,
    cap: Option<u32>,
) -> Result<MultiplierFactor> {
    let analytic = verify_analytic(target, crate::DEFAULT_COMMUTATOR_TOL);
    if !analytic.passes {
        return Err(Error::NotAnalytic(format!(
            "shift tuple fails (min defect eigenvalue {:.3e}, purity verdict {:?})",
            analytic.validation.min_defect_eigenvalue, analytic.purity.verdict
        )));
    }
    let shifts = shift_tuple(target);
    let factor = factor_invariant_subspace(&shifts, s, cap)?;

    let symbol = symbol_coefficients(&factor.pi, &factor.source, target)?;
    let m_theta = multiplier_matrix(&symbol, &factor.source, target)?;

    let projection_residual = spectral_norm(&(&m_theta * m_theta.adjoint() - s.projection()));
    let sv = singular_values(&m_theta);
    let singular_value_gap = sv
        .iter()
        .map(|&s| s.min((s - 1.0).abs()))
        .fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > 0.5).count();

    let mut symbol_consistency_residual = 0.0_f64;
    for w in symbol_grid(target.ball_dim()) {
        let from_blocks = symbol_power_sum(&symbol, target, &w)?;
        let from_kernel = extract_symbol_unchecked(&factor.pi, &factor.source, target, &w)?;
        symbol_consistency_residual =
            symbol_consistency_residual.max(spectral_norm(&(from_blocks - from_kernel)));
    }

    Ok(MultiplierFactor {
        source: factor.source,
        target: target.clone(),
        symbol,
        m_theta,
        diagnostics: MultiplierDiagnostics {
            projection_residual,
            singular_value_gap,
            symbol_consistency_residual,
            rank,
        },
    })
}
