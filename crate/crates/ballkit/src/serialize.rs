//! JSON descriptors for every artifact the command-line tools exchange:
//! complex matrices as separated real and imaginary row-major arrays,
//! operator tuples, subspace frames, space descriptors, and the two factor
//! reports. Loading validates; serializing a loaded descriptor reproduces
//! the bytes.

use serde::{Deserialize, Serialize};

use crate::ballspace::{make_space, make_space_from_coefficients, TruncatedSpace};
use crate::invariant::{InvariantFactor, Subspace};
use crate::multiplier::MultiplierFactor;
use crate::optuple::OperatorTuple;
use crate::{C64, CMatrix, Error, Result};

/// Dense complex matrix: row-major separated parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let grab = |part: fn(&C64) -> f64| {
            (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| part(&m[(r, c)])).collect())
                .collect()
        };
        MatrixJson {
            rows: m.nrows(),
            cols: m.ncols(),
            re: grab(|z| z.re),
            im: grab(|z| z.im),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let check = |name: &str, part: &Vec<Vec<f64>>| -> Result<()> {
            if part.len() != self.rows || part.iter().any(|row| row.len() != self.cols) {
                return Err(Error::DimensionMismatch(format!(
                    "matrix {name} part does not match {}x{}",
                    self.rows, self.cols
                )));
            }
            Ok(())
        };
        check("re", &self.re)?;
        check("im", &self.im)?;
        Ok(CMatrix::from_fn(self.rows, self.cols, |r, c| {
            C64::new(self.re[r][c], self.im[r][c])
        }))
    }
}

/// Commuting tuple: `{"n": ..., "dim": ..., "matrices": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleJson {
    pub n: usize,
    pub dim: usize,
    pub matrices: Vec<MatrixJson>,
}

impl TupleJson {
    pub fn from_tuple(t: &OperatorTuple) -> Self {
        TupleJson {
            n: t.arity(),
            dim: t.dim(),
            matrices: t.matrices().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_tuple(&self) -> Result<OperatorTuple> {
        if self.matrices.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "descriptor lists {} matrices for arity {}",
                self.matrices.len(),
                self.n
            )));
        }
        let matrices: Result<Vec<CMatrix>> = self.matrices.iter().map(|m| m.to_matrix()).collect();
        let tuple = OperatorTuple::new(matrices?)?;
        if tuple.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "descriptor claims dimension {}, matrices have {}",
                self.dim,
                tuple.dim()
            )));
        }
        Ok(tuple)
    }
}

/// Subspace frame: `{"ambient_dim": ..., "frame": matrix}`; orthonormality
/// is re-validated on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub ambient_dim: usize,
    pub frame: MatrixJson,
}

impl SubspaceJson {
    pub fn from_subspace(s: &Subspace) -> Self {
        SubspaceJson {
            ambient_dim: s.ambient_dim(),
            frame: MatrixJson::from_matrix(s.frame()),
        }
    }

    pub fn to_subspace(&self) -> Result<Subspace> {
        let frame = self.frame.to_matrix()?;
        if frame.nrows() != self.ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "frame has {} rows in ambient dimension {}",
                frame.nrows(),
                self.ambient_dim
            )));
        }
        Subspace::new(frame)
    }
}

/// Space descriptor. `lambda` is null for spaces built from explicit
/// coefficients; basis and norms are recomputed and cross-checked on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceJson {
    pub n: usize,
    pub lambda: Option<f64>,
    pub degree_cap: u32,
    pub coeff_dim: usize,
    pub kernel_coeffs: Vec<f64>,
    pub basis: Vec<Vec<u32>>,
    pub monomial_sq_norms: Vec<f64>,
}

impl SpaceJson {
    pub fn from_space(space: &TruncatedSpace) -> Self {
        SpaceJson {
            n: space.ball_dim(),
            lambda: space.kernel().lambda(),
            degree_cap: space.degree_cap(),
            coeff_dim: space.coeff_dim(),
            kernel_coeffs: space.kernel().coefficients().to_vec(),
            basis: space
                .basis()
                .indices()
                .iter()
                .map(|k| k.entries().to_vec())
                .collect(),
            monomial_sq_norms: space.monomial_sq_norms().to_vec(),
        }
    }

    pub fn to_space(&self) -> Result<TruncatedSpace> {
        let space = match self.lambda {
            Some(lambda) => make_space(self.n, lambda, self.degree_cap, self.coeff_dim)?,
            None => make_space_from_coefficients(
                self.n,
                self.kernel_coeffs.clone(),
                self.degree_cap,
                self.coeff_dim,
            )?,
        };
        let rebuilt: Vec<Vec<u32>> = space
            .basis()
            .indices()
            .iter()
            .map(|k| k.entries().to_vec())
            .collect();
        if rebuilt != self.basis {
            return Err(Error::InvalidParameter(
                "space descriptor basis does not match its parameters".into(),
            ));
        }
        let norms = space.monomial_sq_norms();
        if norms.len() != self.monomial_sq_norms.len()
            || norms
                .iter()
                .zip(self.monomial_sq_norms.iter())
                .any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
        {
            return Err(Error::InvalidParameter(
                "space descriptor norms do not match its parameters".into(),
            ));
        }
        Ok(space)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorDiagnosticsJson {
    pub projection_residual: f64,
    pub intertwining_residuals: Vec<f64>,
    pub singular_value_gap: f64,
    pub rank: usize,
}

/// Output of the invariant-subspace factorization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantFactorJson {
    pub ambient_dim: usize,
    pub coeff_dim: usize,
    pub source: SpaceJson,
    pub pi: MatrixJson,
    pub diagnostics: FactorDiagnosticsJson,
}

impl InvariantFactorJson {
    pub fn from_factor(f: &InvariantFactor) -> Self {
        InvariantFactorJson {
            ambient_dim: f.pi.nrows(),
            coeff_dim: f.coeff_dim,
            source: SpaceJson::from_space(&f.source),
            pi: MatrixJson::from_matrix(&f.pi),
            diagnostics: FactorDiagnosticsJson {
                projection_residual: f.diagnostics.projection_residual,
                intertwining_residuals: f.diagnostics.intertwining_residuals.clone(),
                singular_value_gap: f.diagnostics.singular_value_gap,
                rank: f.diagnostics.rank,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierDiagnosticsJson {
    pub projection_residual: f64,
    pub singular_value_gap: f64,
    pub symbol_consistency_residual: f64,
    pub rank: usize,
}

/// One Taylor block of the symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolBlockJson {
    pub index: Vec<u32>,
    pub block: MatrixJson,
}

/// Output of the multiplier factorization; carries everything needed to
/// evaluate and re-extract the symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierFactorJson {
    pub source: SpaceJson,
    pub target: SpaceJson,
    pub symbol: Vec<SymbolBlockJson>,
    pub m_theta: MatrixJson,
    pub diagnostics: MultiplierDiagnosticsJson,
}

impl MultiplierFactorJson {
    pub fn from_factor(f: &MultiplierFactor) -> Self {
        let symbol = f
            .target
            .basis()
            .indices()
            .iter()
            .zip(f.symbol.iter())
            .map(|(k, block)| SymbolBlockJson {
                index: k.entries().to_vec(),
                block: MatrixJson::from_matrix(block),
            })
            .collect();
        MultiplierFactorJson {
            source: SpaceJson::from_space(&f.source),
            target: SpaceJson::from_space(&f.target),
            symbol,
            m_theta: MatrixJson::from_matrix(&f.m_theta),
            diagnostics: MultiplierDiagnosticsJson {
                projection_residual: f.diagnostics.projection_residual,
                singular_value_gap: f.diagnostics.singular_value_gap,
                symbol_consistency_residual: f.diagnostics.symbol_consistency_residual,
                rank: f.diagnostics.rank,
            },
        }
    }
}

/// Canonical file rendering: pretty JSON with a trailing newline.
pub fn to_pretty_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact types serialize");
    s.push('\n');
    s
}
