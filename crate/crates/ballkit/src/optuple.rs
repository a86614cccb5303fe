//! Commuting operator tuples on a finite-dimensional space: row-contraction
//! validation, the defect operator and its range frame, the completely
//! positive map X -> sum T_i X T_i*, and purity diagnostics driven by its
//! powers at the identity.

use std::collections::HashMap;

use serde::Serialize;

use crate::linalg::{hermitian_eigen, identity, psd_sqrt, spectral_norm};
use crate::multiindex::{enumerate_degree, gamma, MultiIndex};
use crate::{C64, CMatrix, Error, Result, DEFAULT_COMMUTATOR_TOL};

/// n commuting matrices sharing one square shape. Construction only checks
/// shapes; commutativity and contractivity are certified by
/// [`validate_tuple`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTuple {
    matrices: Vec<CMatrix>,
}

impl OperatorTuple {
    pub fn new(matrices: Vec<CMatrix>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::InvalidParameter("tuple needs at least one operator".into()));
        }
        let dim = matrices[0].nrows();
        for m in &matrices {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "expected {dim}x{dim} matrices, found {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(OperatorTuple { matrices })
    }

    pub fn arity(&self) -> usize {
        self.matrices.len()
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    /// T^k = prod_i T_i^{k_i}; order is immaterial for validated tuples.
    pub fn power(&self, k: &MultiIndex) -> CMatrix {
        assert_eq!(k.arity(), self.arity(), "index arity mismatch");
        let mut out = identity(self.dim());
        for (i, &e) in k.entries().iter().enumerate() {
            for _ in 0..e {
                out = &out * &self.matrices[i];
            }
        }
        out
    }

    /// I - sum T_i T_i*.
    pub fn defect_gram(&self) -> CMatrix {
        let mut out = identity(self.dim());
        for m in &self.matrices {
            out -= m * m.adjoint();
        }
        out
    }
}

/// Outcome of the commutativity and row-contraction checks.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub max_commutator_norm: f64,
    pub min_defect_eigenvalue: f64,
    pub tol: f64,
    pub passes: bool,
}

/// Measure how far the tuple is from a commuting row contraction: the
/// largest commutator norm and the smallest eigenvalue of I - sum T_i T_i*.
pub fn validate_tuple(tuple: &OperatorTuple, tol: f64) -> ValidationReport {
    let mut max_comm: f64 = 0.0;
    for i in 0..tuple.arity() {
        for j in (i + 1)..tuple.arity() {
            let comm = &tuple.matrices[i] * &tuple.matrices[j]
                - &tuple.matrices[j] * &tuple.matrices[i];
            max_comm = max_comm.max(spectral_norm(&comm));
        }
    }
    let (eigs, _) = hermitian_eigen(&tuple.defect_gram());
    let min_eig = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    ValidationReport {
        max_commutator_norm: max_comm,
        min_defect_eigenvalue: min_eig,
        tol,
        passes: max_comm <= tol && min_eig >= -tol,
    }
}

fn require_valid(tuple: &OperatorTuple, tol: f64) -> Result<ValidationReport> {
    let report = validate_tuple(tuple, tol);
    if report.max_commutator_norm > tol {
        return Err(Error::NotCommuting {
            norm: report.max_commutator_norm,
            tol,
        });
    }
    if report.min_defect_eigenvalue < -tol {
        return Err(Error::NotRowContraction {
            min_eig: report.min_defect_eigenvalue,
        });
    }
    Ok(report)
}

/// Defect operator D = (I - sum T_i T_i*)^{1/2}, its numerical rank, and an
/// orthonormal frame for its range.
#[derive(Debug, Clone)]
pub struct DefectData {
    /// The positive square root D.
    pub operator: CMatrix,
    /// Numerical rank of D (eigenvalues above rank_tol times the largest).
    pub rank: usize,
    /// dim x rank orthonormal columns spanning ran D, eigenvalue-descending,
    /// phases fixed.
    pub frame: CMatrix,
}

/// Compute the defect data. Eigenvalues of the defect Gram matrix in
/// [-tol, 0) are clamped to zero; anything lower rejects the tuple.
pub fn defect(tuple: &OperatorTuple, rank_tol: f64) -> Result<DefectData> {
    require_valid(tuple, DEFAULT_COMMUTATOR_TOL)?;
    let gram = tuple.defect_gram();
    let (root, eigs, frame_full) = psd_sqrt(&gram, DEFAULT_COMMUTATOR_TOL)
        .map_err(|min_eig| Error::NotRowContraction { min_eig })?;
    let top = eigs.iter().copied().fold(0.0, f64::max);
    let rank = eigs.iter().filter(|&&v| v > rank_tol * top).count();
    let frame = frame_full.columns(0, rank).clone_owned();
    Ok(DefectData {
        operator: root,
        rank,
        frame,
    })
}

/// One application of the completely positive map, sum_i T_i X T_i*.
pub fn cp_apply(tuple: &OperatorTuple, x: &CMatrix) -> Result<CMatrix> {
    let d = tuple.dim();
    if x.nrows() != d || x.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "argument is {}x{}, tuple acts on dimension {d}",
            x.nrows(),
            x.ncols()
        )));
    }
    let mut out = CMatrix::zeros(d, d);
    for m in &tuple.matrices {
        out += m * x * m.adjoint();
    }
    Ok(out)
}

/// The m-th CP power of the identity in multinomial-expanded form,
/// sum_{|k| = m} gamma_k T^k T*^k. Agrees with iterating [`cp_apply`] on
/// commuting tuples.
pub fn cp_power_multinomial(tuple: &OperatorTuple, m: u32) -> Result<CMatrix> {
    let d = tuple.dim();
    let n = tuple.arity();
    // Memoized monomial powers, grown degree by degree.
    let mut powers: HashMap<Vec<u32>, CMatrix> = HashMap::new();
    powers.insert(vec![0; n], identity(d));
    for degree in 1..=m {
        for k in enumerate_degree(n, degree) {
            let i = k
                .entries()
                .iter()
                .position(|&e| e > 0)
                .expect("positive degree");
            let lower = k.lowered(i).expect("entry is positive");
            let parent = powers.get(lower.entries()).expect("built in degree order");
            let grown = &tuple.matrices[i] * parent;
            powers.insert(k.entries().to_vec(), grown);
        }
    }
    let mut out = CMatrix::zeros(d, d);
    for k in enumerate_degree(n, m) {
        let weight = C64::new(gamma(&k)?, 0.0);
        let tk = powers.get(k.entries()).expect("memoized");
        out += (tk * tk.adjoint()).scale(weight.re);
    }
    Ok(out)
}

/// How the purity iteration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PurityVerdict {
    /// Residuals fell below tolerance: the tuple is pure at this precision.
    Pure,
    /// The iterates became stationary at a nonzero operator: a genuine
    /// nonzero fixed point, the tuple is not pure.
    NotPure,
    /// The budget ran out while the iterates were still moving; no verdict.
    Undetermined,
}

/// Trace of the CP iteration X -> P_T(X) started at the identity.
#[derive(Debug, Clone)]
pub struct PurityReport {
    /// Number of CP applications performed.
    pub iterations: usize,
    /// Spectral norms of the iterates, one per application.
    pub residual_norms: Vec<f64>,
    pub is_pure: bool,
    pub verdict: PurityVerdict,
    /// Final iterate; approximates the limit when the verdict is NotPure.
    pub p_inf_estimate: CMatrix,
}

/// Iterate the CP map on the identity until the iterate norm drops below
/// `tol`, the iterates go stationary, or `max_iter` is reached.
pub fn purity_report(tuple: &OperatorTuple, max_iter: usize, tol: f64) -> Result<PurityReport> {
    require_valid(tuple, DEFAULT_COMMUTATOR_TOL)?;
    let mut x = identity(tuple.dim());
    let mut residual_norms = Vec::new();
    let mut iterations = 0;
    let mut verdict = PurityVerdict::Undetermined;
    while iterations < max_iter {
        let next = cp_apply(tuple, &x)?;
        iterations += 1;
        let norm = spectral_norm(&next);
        residual_norms.push(norm);
        let step = spectral_norm(&(&next - &x));
        x = next;
        if norm <= tol {
            verdict = PurityVerdict::Pure;
            break;
        }
        if step <= tol {
            verdict = PurityVerdict::NotPure;
            break;
        }
    }
    Ok(PurityReport {
        iterations,
        is_pure: verdict == PurityVerdict::Pure,
        verdict,
        residual_norms,
        p_inf_estimate: x,
    })
}
