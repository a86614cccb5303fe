//! Joint invariant subspaces of commuting row contractions: orthonormal
//! frames, invariance certificates, restriction of tuples, and the
//! partial-isometry factorization obtained by dilating the restricted
//! tuple and composing with the inclusion.

use crate::ballspace::{shift_tuple, TruncatedSpace};
use crate::dilation::build_dilation;
use crate::linalg::{orthonormal_range, singular_values, spectral_norm};
use crate::optuple::{cp_apply, purity_report, OperatorTuple, PurityVerdict};
use crate::{CMatrix, Error, Result, DEFAULT_COMMUTATOR_TOL, DEFAULT_PURITY_MAX_ITER, DEFAULT_PURITY_TOL};

/// Iterate norm below which a CP power counts as structurally zero when
/// probing for nilpotency.
const NILPOTENCY_DETECTION_TOL: f64 = 1e-20;

/// A closed subspace represented by an orthonormal column frame.
#[derive(Debug, Clone)]
pub struct Subspace {
    frame: CMatrix,
}

impl Subspace {
    /// Wrap a frame, verifying orthonormality (V* V = I within 1e-12) and
    /// non-triviality.
    pub fn new(frame: CMatrix) -> Result<Self> {
        if frame.ncols() == 0 {
            return Err(Error::ZeroSubspace);
        }
        if frame.nrows() < frame.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "frame of {} columns cannot be orthonormal in dimension {}",
                frame.ncols(),
                frame.nrows()
            )));
        }
        let gram = frame.adjoint() * &frame;
        let residual = spectral_norm(&(gram - crate::linalg::identity(frame.ncols())));
        if residual > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "frame columns are not orthonormal (residual {residual:.3e})"
            )));
        }
        Ok(Subspace { frame })
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &CMatrix {
        &self.frame
    }

    /// Orthogonal projection V V*.
    pub fn projection(&self) -> CMatrix {
        &self.frame * self.frame.adjoint()
    }

    /// Full ambient space.
    pub fn full(dim: usize) -> Self {
        Subspace {
            frame: crate::linalg::identity(dim),
        }
    }

    /// Span of the given monomial basis positions of a truncated space;
    /// convenient for monomial-ideal subspaces.
    pub fn from_basis_positions(space: &TruncatedSpace, positions: &[usize]) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::ZeroSubspace);
        }
        let cd = space.coeff_dim();
        let mut frame = CMatrix::zeros(space.dim(), positions.len() * cd);
        for (col_block, &pos) in positions.iter().enumerate() {
            for j in 0..cd {
                frame[(pos * cd + j, col_block * cd + j)] = crate::C64::new(1.0, 0.0);
            }
        }
        Subspace::new(frame)
    }
}

/// Orthonormal frame for the column span of `generators`; the rank is
/// decided by a relative singular-value threshold.
pub fn orthonormalize(generators: &CMatrix, rank_tol: f64) -> Result<Subspace> {
    if generators.ncols() == 0 {
        return Err(Error::ZeroSubspace);
    }
    let frame = orthonormal_range(generators, rank_tol);
    if frame.ncols() == 0 {
        return Err(Error::ZeroSubspace);
    }
    Subspace::new(frame)
}

/// Residuals of the invariance conditions (I - P_S) T_i P_S = 0.
#[derive(Debug, Clone)]
pub struct InvariantReport {
    pub residuals: Vec<f64>,
    pub tol: f64,
    pub passes: bool,
}

pub fn check_invariant(tuple: &OperatorTuple, s: &Subspace, tol: f64) -> Result<InvariantReport> {
    if s.ambient_dim() != tuple.dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspace lives in dimension {}, tuple in {}",
            s.ambient_dim(),
            tuple.dim()
        )));
    }
    let proj = s.projection();
    let complement = crate::linalg::identity(tuple.dim()) - &proj;
    let residuals: Vec<f64> = tuple
        .matrices()
        .iter()
        .map(|t| spectral_norm(&(&complement * t * &proj)))
        .collect();
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    Ok(InvariantReport {
        residuals,
        tol,
        passes: worst <= tol,
    })
}

/// Compress the tuple to an invariant subspace: matrices V* T_i V. The
/// result is re-validated as a commuting row contraction.
pub fn restrict_tuple(tuple: &OperatorTuple, s: &Subspace, tol: f64) -> Result<OperatorTuple> {
    let report = check_invariant(tuple, s, tol)?;
    if !report.passes {
        let worst = report.residuals.iter().copied().fold(0.0, f64::max);
        return Err(Error::NotInvariant {
            residual: worst,
            tol,
        });
    }
    let v = s.frame();
    let matrices = tuple
        .matrices()
        .iter()
        .map(|t| v.adjoint() * t * v)
        .collect();
    let restricted = OperatorTuple::new(matrices)?;
    let validation = crate::optuple::validate_tuple(&restricted, DEFAULT_COMMUTATOR_TOL);
    if !validation.passes {
        if validation.max_commutator_norm > DEFAULT_COMMUTATOR_TOL {
            return Err(Error::NotCommuting {
                norm: validation.max_commutator_norm,
                tol: DEFAULT_COMMUTATOR_TOL,
            });
        }
        return Err(Error::NotRowContraction {
            min_eig: validation.min_defect_eigenvalue,
        });
    }
    Ok(restricted)
}

/// The partial isometry of the factorization, with its certificates.
#[derive(Debug, Clone)]
pub struct InvariantFactor {
    /// ambient-dim x source-dim matrix, Pi = V Pi_S.
    pub pi: CMatrix,
    /// Coefficient dimension of the source (defect rank of the restriction).
    pub coeff_dim: usize,
    /// Truncated Drury-Arveson source space of the inner dilation.
    pub source: TruncatedSpace,
    pub diagnostics: FactorDiagnostics,
}

#[derive(Debug, Clone)]
pub struct FactorDiagnostics {
    /// Spectral norm of Pi Pi* - P_S.
    pub projection_residual: f64,
    /// Spectral norms of T_i Pi - Pi M_{z_i}.
    pub intertwining_residuals: Vec<f64>,
    /// Largest distance of a singular value of Pi from {0, 1}.
    pub singular_value_gap: f64,
    /// Number of singular values above 1/2.
    pub rank: usize,
}

/// Smallest m with P_T^m(I) structurally zero, if one exists within the
/// dimension bound.
fn nilpotency_order(tuple: &OperatorTuple) -> Option<u32> {
    let mut x = crate::linalg::identity(tuple.dim());
    for m in 1..=tuple.dim() as u32 {
        x = cp_apply(tuple, &x).ok()?;
        if spectral_norm(&x) <= NILPOTENCY_DETECTION_TOL {
            return Some(m);
        }
    }
    None
}

/// Factor a joint invariant subspace through the dilation of the restricted
/// tuple: Pi = V Pi_S, so ran Pi = S and T_i Pi = Pi M_{z_i}.
///
/// `cap` picks the source truncation degree; `None` detects the nilpotency
/// order of the restriction and uses order - 1, which makes every
/// certificate exact. Restrictions that are neither nilpotent nor pure
/// within the default iteration budget are rejected.
pub fn factor_invariant_subspace(
    tuple: &OperatorTuple,
    s: &Subspace,
    cap: Option<u32>,
) -> Result<InvariantFactor> {
    let restricted = restrict_tuple(tuple, s, DEFAULT_COMMUTATOR_TOL)?;
    let detected = nilpotency_order(&restricted);
    let cap = match (cap, detected) {
        (Some(cap), _) => cap,
        (None, Some(order)) => order.saturating_sub(1),
        (None, None) => {
            return Err(Error::InvalidParameter(
                "degree cap required for a non-nilpotent restriction".into(),
            ))
        }
    };
    if detected.is_none() {
        // Not nilpotent: insist on a pure restriction before promising a
        // partial isometry.
        let purity = purity_report(&restricted, DEFAULT_PURITY_MAX_ITER, DEFAULT_PURITY_TOL)?;
        if purity.verdict != PurityVerdict::Pure {
            let residual = purity.residual_norms.last().copied().unwrap_or(1.0);
            return Err(Error::NotPure {
                residual,
                iterations: purity.iterations,
            });
        }
    }

    let inner = build_dilation(&restricted, cap)?;
    let pi = s.frame() * &inner.pi;

    let projection_residual = spectral_norm(&(&pi * pi.adjoint() - s.projection()));
    let source_shifts = shift_tuple(&inner.source);
    let intertwining_residuals: Vec<f64> = (0..tuple.arity())
        .map(|i| spectral_norm(&(&tuple.matrices()[i] * &pi - &pi * &source_shifts.matrices()[i])))
        .collect();
    let sv = singular_values(&pi);
    let singular_value_gap = sv
        .iter()
        .map(|&s| s.min((s - 1.0).abs()))
        .fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > 0.5).count();

    Ok(InvariantFactor {
        pi,
        coeff_dim: inner.defect.rank,
        source: inner.source,
        diagnostics: FactorDiagnostics {
            projection_residual,
            intertwining_residuals,
            singular_value_gap,
            rank,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ballspace::make_space;
    use crate::linalg::max_abs_entry;
    use crate::multiindex::MultiIndex;
    use crate::C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Positions of the monomials divisible by z^divisor.
    fn ideal_positions(space: &TruncatedSpace, divisor: &[u32]) -> Vec<usize> {
        space
            .basis()
            .indices()
            .iter()
            .enumerate()
            .filter(|(_, k)| {
                k.entries()
                    .iter()
                    .zip(divisor.iter())
                    .all(|(&e, &d)| e >= d)
            })
            .map(|(i, _)| i)
            .collect()
    }

    #[test]
    fn orthonormalize_hand_cases() {
        // Single generator e_1.
        let mut gens = CMatrix::zeros(3, 1);
        gens[(0, 0)] = c(1.0, 0.0);
        let s = orthonormalize(&gens, 1e-10).unwrap();
        assert_eq!(s.dim(), 1);
        assert!((s.frame()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);

        // Duplicate columns collapse to rank 1.
        let mut gens = CMatrix::zeros(3, 2);
        gens[(0, 0)] = c(1.0, 0.0);
        gens[(0, 1)] = c(1.0, 0.0);
        assert_eq!(orthonormalize(&gens, 1e-10).unwrap().dim(), 1);

        // e_1 + e_2 and e_1 - e_2 span the first two coordinates of C^3.
        let gens = CMatrix::from_row_slice(
            3,
            2,
            &[
                c(1.0, 0.0),
                c(1.0, 0.0),
                c(1.0, 0.0),
                c(-1.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
            ],
        );
        let s = orthonormalize(&gens, 1e-10).unwrap();
        assert_eq!(s.dim(), 2);
        let gram = s.frame().adjoint() * s.frame();
        assert!(max_abs_entry(&(gram - crate::linalg::identity(2))) < 1e-12);
        let mut expect = CMatrix::zeros(3, 3);
        expect[(0, 0)] = c(1.0, 0.0);
        expect[(1, 1)] = c(1.0, 0.0);
        assert!(max_abs_entry(&(s.projection() - expect)) < 1e-12);

        // Zero span is rejected.
        assert!(matches!(
            orthonormalize(&CMatrix::zeros(3, 2), 1e-10),
            Err(Error::ZeroSubspace)
        ));
    }

    #[test]
    fn invariance_of_monomial_ideal() {
        let space = make_space(2, 1.0, 3, 1).unwrap();
        let t = shift_tuple(&space);

        // Full space is trivially invariant.
        let full = Subspace::full(space.dim());
        let report = check_invariant(&t, &full, 1e-12).unwrap();
        assert!(report.passes);
        assert!(report.residuals.iter().all(|&r| r == 0.0));

        // The ideal generated by z_1 is invariant under both shifts.
        let ideal = Subspace::from_basis_positions(&space, &ideal_positions(&space, &[1, 0])).unwrap();
        assert!(check_invariant(&t, &ideal, 1e-12).unwrap().passes);

        // Constants are not invariant: shifts push them to degree one.
        let constants = Subspace::from_basis_positions(&space, &[0]).unwrap();
        let report = check_invariant(&t, &constants, 1e-10).unwrap();
        assert!(!report.passes);
        assert!(restrict_tuple(&t, &constants, 1e-10).is_err());
    }

    #[test]
    fn restriction_keeps_nilpotency_and_purity_domination() {
        let space = make_space(2, 1.0, 4, 1).unwrap();
        let t = shift_tuple(&space);
        let ideal = Subspace::from_basis_positions(&space, &ideal_positions(&space, &[1, 0])).unwrap();
        let restricted = restrict_tuple(&t, &ideal, 1e-10).unwrap();
        assert_eq!(restricted.dim(), ideal.dim());

        // Nilpotent of order at most the ambient order.
        let order = nilpotency_order(&restricted).unwrap();
        assert!(order <= 5);

        // Probe domination: <P^m_{T|S}(I) h, h> <= <P^m_T(I) Vh, Vh>.
        let v = ideal.frame();
        let mut inner_power = crate::linalg::identity(restricted.dim());
        let mut outer_power = crate::linalg::identity(t.dim());
        for _ in 0..8 {
            inner_power = cp_apply(&restricted, &inner_power).unwrap();
            outer_power = cp_apply(&t, &outer_power).unwrap();
            for probe in 0..restricted.dim() {
                let mut h = crate::CVector::zeros(restricted.dim());
                h[probe] = c(1.0, 0.0);
                let lhs = h.dotc(&(&inner_power * &h)).re;
                let vh = v * &h;
                let rhs = vh.dotc(&(&outer_power * &vh)).re;
                assert!(lhs <= rhs + 1e-12, "domination failed: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn full_space_factor_recovers_co_isometry() {
        let space = make_space(2, 1.0, 3, 1).unwrap();
        let t = shift_tuple(&space);
        let full = Subspace::full(space.dim());
        let factor = factor_invariant_subspace(&t, &full, None).unwrap();
        assert!(factor.diagnostics.projection_residual < 1e-11);
        assert!(factor.diagnostics.singular_value_gap < 1e-11);
        assert_eq!(factor.diagnostics.rank, space.dim());
    }

    #[test]
    fn ideal_factor_is_partial_isometry() {
        let space = make_space(2, 1.0, 4, 1).unwrap();
        let t = shift_tuple(&space);
        let ideal = Subspace::from_basis_positions(&space, &ideal_positions(&space, &[1, 0])).unwrap();
        let factor = factor_invariant_subspace(&t, &ideal, Some(4)).unwrap();
        assert!(factor.diagnostics.projection_residual <= 1e-10);
        assert!(factor.diagnostics.singular_value_gap <= 1e-10);
        assert_eq!(factor.diagnostics.rank, ideal.dim());
        for r in &factor.diagnostics.intertwining_residuals {
            assert!(*r <= 1e-10);
        }
        // The range of Pi is S: P_S reconstructed from the factor matches
        // the frame projection.
        let range = &factor.pi * factor.pi.adjoint();
        assert!(spectral_norm(&(range - ideal.projection())) <= 1e-10);
        // Sufficiency direction: the range of an intertwining Pi is
        // invariant, asserted on ran Pi itself.
        let ran = orthonormalize(&factor.pi, 1e-8).unwrap();
        assert!(check_invariant(&t, &ran, 1e-9).unwrap().passes);
    }

    #[test]
    fn beurling_disc_case() {
        // Hardy space of the disc truncated at degree 5, S = span{z..z^5}.
        let disc = make_space(1, 1.0, 5, 1).unwrap();
        let t = shift_tuple(&disc);
        let s = Subspace::from_basis_positions(&disc, &[1, 2, 3, 4, 5]).unwrap();
        let factor = factor_invariant_subspace(&t, &s, None).unwrap();
        assert!(factor.diagnostics.projection_residual <= 1e-10);
        assert!(factor.diagnostics.singular_value_gap <= 1e-10);
        assert_eq!(factor.diagnostics.rank, 5);
    }

    #[test]
    fn deficient_inputs_are_rejected() {
        let space = make_space(2, 1.0, 3, 1).unwrap();
        let t = shift_tuple(&space);
        // Wrong ambient dimension.
        let wrong = Subspace::full(4);
        assert!(check_invariant(&t, &wrong, 1e-10).is_err());
        // Non-orthonormal frame.
        let mut frame = CMatrix::zeros(space.dim(), 1);
        frame[(0, 0)] = c(2.0, 0.0);
        assert!(Subspace::new(frame).is_err());
        // A non-nilpotent, non-pure restriction with no cap to fall back on.
        let u = OperatorTuple::new(vec![crate::linalg::identity(2)]).unwrap();
        let full = Subspace::full(2);
        assert!(factor_invariant_subspace(&u, &full, None).is_err());
    }

    #[test]
    fn monomial_sub_ideal_positions_shape() {
        // <z_1^2, z_1 z_2, z_2^2> truncated: all monomials of degree >= 2.
        let space = make_space(2, 1.0, 4, 1).unwrap();
        let positions: Vec<usize> = space
            .basis()
            .indices()
            .iter()
            .enumerate()
            .filter(|(_, k)| k.degree() >= 2)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(positions.len(), space.block_count() - 3);
        let s = Subspace::from_basis_positions(&space, &positions).unwrap();
        let t = shift_tuple(&space);
        assert!(check_invariant(&t, &s, 1e-12).unwrap().passes);
        let inv = MultiIndex::new(vec![1, 1]);
        assert!(space.basis().position(&inv).is_some());
    }
}
