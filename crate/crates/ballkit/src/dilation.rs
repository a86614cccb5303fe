//! The canonical co-isometric dilation of a commuting row contraction into
//! truncated vector-valued Drury-Arveson space, with diagnostics for every
//! identity the construction promises: co-isometry, shift intertwining, the
//! telescoping norm law, the constant-coefficient identity, and span
//! minimality of the adjoint orbit.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ballspace::{make_space, shift_tuple, TruncatedSpace};
use crate::linalg::{identity, rank_via_gram, spectral_norm};
use crate::multiindex::gamma;
use crate::optuple::{cp_apply, defect, DefectData, OperatorTuple};
use crate::{C64, CMatrix, CVector, Error, Result, DEFAULT_RANK_TOL};

/// Relative singular-value threshold for the minimality rank decision.
const MINIMALITY_RANK_TOL: f64 = 1e-6;

/// The assembled dilation: a map from the truncated Drury-Arveson space
/// over the defect space (realized as C^rank through the defect frame)
/// into the tuple's space.
#[derive(Debug, Clone)]
pub struct DilationMap {
    /// Truncated source space H^2_n(C^rank) at the chosen degree cap.
    pub source: TruncatedSpace,
    /// dim x source-dim matrix of the dilation, orthonormal source
    /// coordinates. The block of the adjoint at basis index k is
    /// sqrt(gamma_k) F* D T*^k.
    pub pi: CMatrix,
    /// Defect data of the dilated tuple.
    pub defect: DefectData,
}

impl DilationMap {
    /// Adjoint of the dilation; always the conjugate transpose.
    pub fn pi_star(&self) -> CMatrix {
        self.pi.adjoint()
    }
}

/// Residuals of the dilation identities.
#[derive(Debug, Clone)]
pub struct DilationDiagnostics {
    /// Spectral norm of Pi Pi* - I.
    pub co_isometry_residual: f64,
    /// Spectral norms of Pi M_{z_i} - T_i Pi, one per coordinate.
    pub intertwining_residuals: Vec<f64>,
    /// Max probe defect of |Pi* h|^2 + <P_T^{N+1}(I) h, h> - |h|^2.
    pub telescoping_residual: f64,
    /// False when no probes were requested, so the telescoping field is a
    /// convention rather than a measurement.
    pub telescoping_checked: bool,
    /// Norm of (degree-0 block of Pi*) - F* D.
    pub constant_block_residual: f64,
    /// Source dimension minus the rank of the monomial orbit of Pi* H.
    pub minimality_rank_gap: usize,
}

/// Assemble the dilation at degree cap `cap`: the column of Pi at basis
/// index k and defect-frame vector eta_j is sqrt(gamma_k) T^k D eta_j.
pub fn build_dilation(tuple: &OperatorTuple, cap: u32) -> Result<DilationMap> {
    let defect_data = defect(tuple, DEFAULT_RANK_TOL)?;
    if defect_data.rank == 0 {
        return Err(Error::ZeroDefect);
    }
    let source = make_space(tuple.arity(), 1.0, cap, defect_data.rank)?;
    let d = tuple.dim();
    let rank = defect_data.rank;
    let basis = source.basis();

    // Propagate the d x rank blocks T^k (D F) in enumeration order; each
    // index of positive degree extends a previously built one.
    let seed_block = &defect_data.operator * &defect_data.frame;
    let mut blocks: Vec<CMatrix> = Vec::with_capacity(basis.len());
    for k in basis.indices() {
        if k.degree() == 0 {
            blocks.push(seed_block.clone());
            continue;
        }
        let i = k
            .entries()
            .iter()
            .position(|&e| e > 0)
            .expect("positive degree");
        let lower = k.lowered(i).expect("entry positive");
        let parent = basis.position(&lower).expect("closed under lowering");
        blocks.push(&tuple.matrices()[i] * &blocks[parent]);
    }

    let mut pi = CMatrix::zeros(d, source.dim());
    for (pos, k) in basis.indices().iter().enumerate() {
        let weight = gamma(k)?.sqrt();
        for j in 0..rank {
            let col = blocks[pos].column(j) * C64::new(weight, 0.0);
            pi.set_column(pos * rank + j, &col);
        }
    }
    Ok(DilationMap {
        source,
        pi,
        defect: defect_data,
    })
}

/// Deterministic complex unit probe vectors.
fn probe_vectors(dim: usize, count: usize, seed: u64) -> Vec<CVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut v = CVector::from_fn(dim, |_, _| {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let norm = v.norm();
            if norm > 0.0 {
                v /= C64::new(norm, 0.0);
            }
            v
        })
        .collect()
}

/// Measure every identity of the dilation. The telescoping law is checked
/// on `probes` seeded unit vectors; zero probes records 0 by convention and
/// marks the field unchecked.
pub fn dilation_diagnostics(
    tuple: &OperatorTuple,
    dm: &DilationMap,
    probes: usize,
    seed: u64,
) -> Result<DilationDiagnostics> {
    let d = tuple.dim();
    if dm.pi.nrows() != d {
        return Err(Error::DimensionMismatch(format!(
            "dilation acts into dimension {}, tuple lives on {d}",
            dm.pi.nrows()
        )));
    }
    let pi_star = dm.pi_star();

    let co_isometry_residual = spectral_norm(&(&dm.pi * &pi_star - identity(d)));

    let source_shifts = shift_tuple(&dm.source);
    let intertwining_residuals: Vec<f64> = (0..tuple.arity())
        .map(|i| {
            spectral_norm(&(&dm.pi * &source_shifts.matrices()[i] - &tuple.matrices()[i] * &dm.pi))
        })
        .collect();

    // Truncation law: |Pi* h|^2 = |h|^2 - <P_T^{N+1}(I) h, h>.
    let mut tail = identity(d);
    for _ in 0..=dm.source.degree_cap() {
        tail = cp_apply(tuple, &tail)?;
    }
    let mut telescoping_residual = 0.0_f64;
    for h in probe_vectors(d, probes, seed) {
        let lhs = (&pi_star * &h).norm_squared();
        let tail_term = h.dotc(&(&tail * &h)).re;
        let rhs = h.norm_squared() - tail_term;
        telescoping_residual = telescoping_residual.max((lhs - rhs).abs());
    }

    // Degree-0 block of Pi* against F* D.
    let rank = dm.defect.rank;
    let constant_block = pi_star.rows(0, rank).clone_owned();
    let expected = dm.defect.frame.adjoint() * &dm.defect.operator;
    let constant_block_residual = spectral_norm(&(constant_block - expected));

    // Rank of { z^k (Pi* e_j) : k in the basis, j < d } inside the source.
    let src_dim = dm.source.dim();
    let mut orbit = CMatrix::zeros(src_dim, dm.source.block_count() * d);
    let mut col = 0;
    for j in 0..d {
        let base = pi_star.column(j).clone_owned();
        for k in dm.source.basis().indices() {
            let shifted = dm.source.shift_by_monomial(k, &base);
            orbit.set_column(col, &shifted);
            col += 1;
        }
    }
    let orbit_rank = rank_via_gram(&orbit, MINIMALITY_RANK_TOL);
    let minimality_rank_gap = src_dim - orbit_rank;

    Ok(DilationDiagnostics {
        co_isometry_residual,
        intertwining_residuals,
        telescoping_residual,
        telescoping_checked: probes > 0,
        constant_block_residual,
        minimality_rank_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ballspace::make_space;
    use crate::linalg::max_abs_entry;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_tuple_dilates_to_exact_co_isometry() {
        let t = OperatorTuple::new(vec![CMatrix::zeros(3, 3), CMatrix::zeros(3, 3)]).unwrap();
        let dm = build_dilation(&t, 2).unwrap();
        assert_eq!(dm.defect.rank, 3);
        // Pi* places h in the constant block, untouched.
        let diag = dilation_diagnostics(&t, &dm, 5, 7).unwrap();
        assert!(diag.co_isometry_residual < 1e-14);
        assert!(diag.constant_block_residual < 1e-14);
        let pi_star = dm.pi_star();
        let constant_rows = pi_star.rows(0, 3).clone_owned();
        assert!(max_abs_entry(&(constant_rows - identity(3))) < 1e-14);
    }

    #[test]
    fn jordan_block_dilation_closed_form() {
        // T = [[0,1],[0,0]] has D = diag(0,1), frame e_2; the dilation
        // columns are e_2 (degree 0) and T e_2 = e_1 (degree 1).
        let t = OperatorTuple::new(vec![CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )])
        .unwrap();
        let dm = build_dilation(&t, 1).unwrap();
        let expect = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        );
        assert!(max_abs_entry(&(&dm.pi - expect)) < 1e-12);
        let diag = dilation_diagnostics(&t, &dm, 10, 3).unwrap();
        assert!(diag.co_isometry_residual < 1e-12);
        assert!(diag.telescoping_residual < 1e-12);
        assert_eq!(diag.minimality_rank_gap, 0);
    }

    #[test]
    fn shift_tuple_dilates_to_itself() {
        // The truncated Drury-Arveson shifts are already in dilated form;
        // Pi comes out unitary and exactly intertwining.
        let space = make_space(2, 1.0, 3, 1).unwrap();
        let t = shift_tuple(&space);
        let dm = build_dilation(&t, 3).unwrap();
        let diag = dilation_diagnostics(&t, &dm, 20, 5).unwrap();
        assert!(diag.co_isometry_residual < 1e-12);
        for r in &diag.intertwining_residuals {
            assert!(*r < 1e-12);
        }
        assert!(diag.constant_block_residual < 1e-12);
        assert_eq!(diag.minimality_rank_gap, 0);
    }

    #[test]
    fn geometric_tail_of_a_strict_contraction() {
        // One-dimensional T = 0.9: the co-isometry defect at cap N is the
        // scalar tail 0.81^{N+1}.
        let t = OperatorTuple::new(vec![CMatrix::from_element(1, 1, c(0.9, 0.0))]).unwrap();
        let cap = 10u32;
        let dm = build_dilation(&t, cap).unwrap();
        let diag = dilation_diagnostics(&t, &dm, 10, 11).unwrap();
        let expect = 0.81f64.powi(cap as i32 + 1);
        assert!(
            (diag.co_isometry_residual - expect).abs() < 1e-12,
            "defect {} vs {}",
            diag.co_isometry_residual,
            expect
        );
        assert!(diag.telescoping_residual < 1e-12);
    }

    #[test]
    fn zero_probes_flagged_unchecked() {
        let t = OperatorTuple::new(vec![CMatrix::zeros(2, 2)]).unwrap();
        let dm = build_dilation(&t, 1).unwrap();
        let diag = dilation_diagnostics(&t, &dm, 0, 0).unwrap();
        assert_eq!(diag.telescoping_residual, 0.0);
        assert!(!diag.telescoping_checked);
    }

    #[test]
    fn row_coisometry_has_no_defect_to_dilate() {
        let t = OperatorTuple::new(vec![identity(2)]).unwrap();
        assert!(matches!(build_dilation(&t, 3), Err(Error::ZeroDefect)));
    }
}
