//! Degree-truncated models of the weighted kernel spaces over the unit
//! ball: kernel coefficient sequences, monomial norms, kernel vectors,
//! inner products, and the compressed coordinate-shift tuple.
//!
//! The truncation keeps polynomials of degree at most N. That subspace is
//! invariant under every adjoint shift, so compressing the shifts there
//! gives a commuting, nilpotent row contraction whose adjoints act exactly
//! as in the full space.

use crate::multiindex::{Basis, MultiIndex};
use crate::optuple::OperatorTuple;
use crate::{C64, CMatrix, CVector, Error, Result};

/// Scalar kernel data: dimension of the ball and the positive Taylor
/// coefficients c_m of the radial expansion sum c_m (z.w)^m.
///
/// `lambda` is Some for the weighted family (1 - z.w)^(-lambda) and None
/// for a user-supplied coefficient sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelFamily {
    n: usize,
    lambda: Option<f64>,
    coeffs: Vec<f64>,
}

impl KernelFamily {
    /// Weighted family member with coefficients up to degree `cap`.
    /// Requires lambda >= 1.
    pub fn weighted(n: usize, lambda: f64, cap: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("ball dimension must be >= 1".into()));
        }
        let coeffs = kernel_coefficients(lambda, cap as usize)?;
        Ok(KernelFamily {
            n,
            lambda: Some(lambda),
            coeffs,
        })
    }

    /// Kernel from explicit coefficients. Only c_0 = 1 and positivity are
    /// enforced; nothing else about such a kernel is certified here.
    pub fn from_coefficients(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("ball dimension must be >= 1".into()));
        }
        if coeffs.is_empty() || coeffs[0] != 1.0 {
            return Err(Error::InvalidParameter(
                "kernel coefficients must start with c_0 = 1".into(),
            ));
        }
        if coeffs.iter().any(|&c| !(c.is_finite() && c > 0.0)) {
            return Err(Error::InvalidParameter(
                "kernel coefficients must be positive and finite".into(),
            ));
        }
        Ok(KernelFamily {
            n,
            lambda: None,
            coeffs,
        })
    }

    pub fn ball_dim(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coefficient(&self, m: usize) -> f64 {
        self.coeffs[m]
    }
}

/// Taylor coefficients of (1 - t)^(-lambda) up to degree `cap`, via the
/// recurrence c_0 = 1, c_m = c_{m-1} (lambda + m - 1) / m.
pub fn kernel_coefficients(lambda: f64, cap: usize) -> Result<Vec<f64>> {
    if lambda.is_nan() || lambda < 1.0 {
        return Err(Error::InvalidParameter("lambda must be >= 1".into()));
    }
    let mut coeffs = Vec::with_capacity(cap + 1);
    coeffs.push(1.0);
    for m in 1..=cap {
        let prev = coeffs[m - 1];
        coeffs.push(prev * (lambda + (m as f64) - 1.0) / m as f64);
    }
    Ok(coeffs)
}

/// A degree-capped model of the kernel space tensored with a coefficient
/// space of dimension `coeff_dim`. Vectors are stored in monomial
/// coordinates: one coefficient block per basis index, in enumeration
/// order; operator matrices use the orthonormalized monomial basis.
#[derive(Debug, Clone)]
pub struct TruncatedSpace {
    kernel: KernelFamily,
    degree_cap: u32,
    coeff_dim: usize,
    basis: Basis,
    monomial_sq_norms: Vec<f64>,
}

impl TruncatedSpace {
    pub fn kernel(&self) -> &KernelFamily {
        &self.kernel
    }

    pub fn ball_dim(&self) -> usize {
        self.kernel.n
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn coeff_dim(&self) -> usize {
        self.coeff_dim
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// Number of monomial blocks, C(N + n, n).
    pub fn block_count(&self) -> usize {
        self.basis.len()
    }

    /// Total dimension, block_count * coeff_dim.
    pub fn dim(&self) -> usize {
        self.basis.len() * self.coeff_dim
    }

    /// Squared monomial norm at a basis position.
    pub fn nu(&self, position: usize) -> f64 {
        self.monomial_sq_norms[position]
    }

    pub fn monomial_sq_norms(&self) -> &[f64] {
        &self.monomial_sq_norms
    }

    /// Monomial coordinates -> orthonormal coordinates (scale each block
    /// by sqrt(nu_k)).
    pub fn to_orthonormal(&self, f: &SpaceVector) -> CVector {
        let mut out = f.coeffs.clone();
        for (pos, _) in self.basis.indices().iter().enumerate() {
            let scale = self.monomial_sq_norms[pos].sqrt();
            for j in 0..self.coeff_dim {
                out[pos * self.coeff_dim + j] *= C64::new(scale, 0.0);
            }
        }
        out
    }

    /// Orthonormal coordinates -> monomial coordinates.
    pub fn from_orthonormal(&self, v: &CVector) -> SpaceVector {
        let mut out = v.clone();
        for (pos, _) in self.basis.indices().iter().enumerate() {
            let scale = 1.0 / self.monomial_sq_norms[pos].sqrt();
            for j in 0..self.coeff_dim {
                out[pos * self.coeff_dim + j] *= C64::new(scale, 0.0);
            }
        }
        SpaceVector { coeffs: out }
    }

    /// Action of multiplication by the monomial z^k on orthonormal
    /// coordinates, with products beyond the cap truncated away.
    pub fn shift_by_monomial(&self, k: &MultiIndex, v: &CVector) -> CVector {
        assert_eq!(v.len(), self.dim(), "coordinate length mismatch");
        let cd = self.coeff_dim;
        let mut out = CVector::zeros(self.dim());
        for (pos, l) in self.basis.indices().iter().enumerate() {
            let target = l.plus(k);
            if let Some(tpos) = self.basis.position(&target) {
                let scale = (self.monomial_sq_norms[tpos] / self.monomial_sq_norms[pos]).sqrt();
                for j in 0..cd {
                    out[tpos * cd + j] += v[pos * cd + j] * C64::new(scale, 0.0);
                }
            }
        }
        out
    }
}

/// A point strictly inside the unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    w: Vec<C64>,
}

impl BallPoint {
    pub fn new(w: Vec<C64>) -> Result<Self> {
        let norm_sq: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq.is_nan() || norm_sq >= 1.0 {
            return Err(Error::PointOutsideBall {
                norm: norm_sq.sqrt(),
            });
        }
        Ok(BallPoint { w })
    }

    pub fn real(coords: &[f64]) -> Result<Self> {
        BallPoint::new(coords.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn coords(&self) -> &[C64] {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// w^k = prod_i w_i^{k_i}.
    pub fn monomial(&self, k: &MultiIndex) -> C64 {
        k.entries()
            .iter()
            .zip(self.w.iter())
            .map(|(&e, z)| z.powu(e))
            .product()
    }
}

/// Element of a truncated space in monomial coordinates: the coefficient
/// block a_k of z^k occupies entries [pos(k)*coeff_dim, (pos(k)+1)*coeff_dim).
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceVector {
    pub coeffs: CVector,
}

impl SpaceVector {
    pub fn zero(space: &TruncatedSpace) -> Self {
        SpaceVector {
            coeffs: CVector::zeros(space.dim()),
        }
    }

    pub fn from_coeffs(space: &TruncatedSpace, coeffs: CVector) -> Result<Self> {
        if coeffs.len() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} != space dimension {}",
                coeffs.len(),
                space.dim()
            )));
        }
        Ok(SpaceVector { coeffs })
    }

    /// The monomial z^k tensored with a coefficient vector.
    pub fn monomial(space: &TruncatedSpace, k: &MultiIndex, eta: &CVector) -> Result<Self> {
        let pos = space.basis.position(k).ok_or_else(|| {
            Error::InvalidParameter(format!("index {k} exceeds the degree cap"))
        })?;
        if eta.len() != space.coeff_dim {
            return Err(Error::DimensionMismatch(format!(
                "coefficient length {} != coeff_dim {}",
                eta.len(),
                space.coeff_dim
            )));
        }
        let mut v = SpaceVector::zero(space);
        for j in 0..space.coeff_dim {
            v.coeffs[pos * space.coeff_dim + j] = eta[j];
        }
        Ok(v)
    }

    pub fn block(&self, space: &TruncatedSpace, position: usize) -> CVector {
        let cd = space.coeff_dim;
        CVector::from_iterator(cd, (0..cd).map(|j| self.coeffs[position * cd + j]))
    }
}

/// Build the truncated weighted space: monomial squared norms are
/// nu_k = 1 / (c_{|k|} gamma_k), read off the diagonal kernel expansion.
pub fn make_space(n: usize, lambda: f64, cap: u32, coeff_dim: usize) -> Result<TruncatedSpace> {
    let kernel = KernelFamily::weighted(n, lambda, cap)?;
    finish_space(kernel, cap, coeff_dim)
}

/// Same, from explicit kernel coefficients (must cover degrees 0..=cap).
pub fn make_space_from_coefficients(
    n: usize,
    coeffs: Vec<f64>,
    cap: u32,
    coeff_dim: usize,
) -> Result<TruncatedSpace> {
    if coeffs.len() < cap as usize + 1 {
        return Err(Error::InvalidParameter(format!(
            "need {} kernel coefficients for degree cap {}, got {}",
            cap + 1,
            cap,
            coeffs.len()
        )));
    }
    let kernel = KernelFamily::from_coefficients(n, coeffs)?;
    finish_space(kernel, cap, coeff_dim)
}

fn finish_space(kernel: KernelFamily, cap: u32, coeff_dim: usize) -> Result<TruncatedSpace> {
    if coeff_dim < 1 {
        return Err(Error::InvalidParameter(
            "coefficient dimension must be >= 1".into(),
        ));
    }
    let basis = Basis::new(kernel.n, cap);
    if basis.len() * coeff_dim > 500_000 {
        return Err(Error::InvalidParameter(format!(
            "requested space dimension {} is beyond desk scale",
            basis.len() * coeff_dim
        )));
    }
    let mut norms = Vec::with_capacity(basis.len());
    for k in basis.indices() {
        let g = crate::multiindex::gamma(k)?;
        let c = kernel.coefficient(k.degree() as usize);
        norms.push(1.0 / (c * g));
    }
    Ok(TruncatedSpace {
        kernel,
        degree_cap: cap,
        coeff_dim,
        basis,
        monomial_sq_norms: norms,
    })
}

/// Truncation of K(., w) zeta to the cap: coefficient block at k is
/// c_{|k|} gamma_k conj(w)^k zeta.
pub fn kernel_vector(space: &TruncatedSpace, w: &BallPoint, zeta: &CVector) -> Result<SpaceVector> {
    if w.dim() != space.ball_dim() {
        return Err(Error::DimensionMismatch(format!(
            "point dimension {} != ball dimension {}",
            w.dim(),
            space.ball_dim()
        )));
    }
    if zeta.len() != space.coeff_dim {
        return Err(Error::DimensionMismatch(format!(
            "coefficient length {} != coeff_dim {}",
            zeta.len(),
            space.coeff_dim
        )));
    }
    let cd = space.coeff_dim;
    let mut v = SpaceVector::zero(space);
    for (pos, k) in space.basis.indices().iter().enumerate() {
        // c_{|k|} gamma_k = 1/nu_k.
        let weight = 1.0 / space.monomial_sq_norms[pos];
        let scalar = w.monomial(k).conj() * C64::new(weight, 0.0);
        for j in 0..cd {
            v.coeffs[pos * cd + j] = scalar * zeta[j];
        }
    }
    Ok(v)
}

/// Weighted monomial-coordinate inner product, linear in the first slot:
/// sum_k <a_k, b_k> nu_k.
pub fn inner_product(space: &TruncatedSpace, f: &SpaceVector, g: &SpaceVector) -> Result<C64> {
    if f.coeffs.len() != space.dim() || g.coeffs.len() != space.dim() {
        return Err(Error::DimensionMismatch(
            "vector length does not match the space".into(),
        ));
    }
    let cd = space.coeff_dim;
    let mut acc = C64::new(0.0, 0.0);
    for pos in 0..space.block_count() {
        let nu = space.monomial_sq_norms[pos];
        let mut block = C64::new(0.0, 0.0);
        for j in 0..cd {
            block += f.coeffs[pos * cd + j] * g.coeffs[pos * cd + j].conj();
        }
        acc += block * C64::new(nu, 0.0);
    }
    Ok(acc)
}

/// Pointwise evaluation f(w) = sum_k a_k w^k.
pub fn evaluate(space: &TruncatedSpace, f: &SpaceVector, w: &BallPoint) -> Result<CVector> {
    if w.dim() != space.ball_dim() {
        return Err(Error::DimensionMismatch(format!(
            "point dimension {} != ball dimension {}",
            w.dim(),
            space.ball_dim()
        )));
    }
    if f.coeffs.len() != space.dim() {
        return Err(Error::DimensionMismatch(
            "vector length does not match the space".into(),
        ));
    }
    let cd = space.coeff_dim;
    let mut out = CVector::zeros(cd);
    for (pos, k) in space.basis.indices().iter().enumerate() {
        let scalar = w.monomial(k);
        for j in 0..cd {
            out[j] += f.coeffs[pos * cd + j] * scalar;
        }
    }
    Ok(out)
}

/// Matrices of the compressed coordinate shifts on the orthonormalized
/// monomial basis e_k = z^k / sqrt(nu_k): the (i-th) shift maps e_k to
/// sqrt(nu_{k+e_i} / nu_k) e_{k+e_i} and kills the top degree.
pub fn shift_tuple(space: &TruncatedSpace) -> OperatorTuple {
    let n = space.ball_dim();
    let cd = space.coeff_dim;
    let dim = space.dim();
    let mut matrices = Vec::with_capacity(n);
    for i in 0..n {
        let mut m = CMatrix::zeros(dim, dim);
        for (pos, k) in space.basis.indices().iter().enumerate() {
            let raised = k.raised(i);
            if let Some(tpos) = space.basis.position(&raised) {
                let entry = (space.monomial_sq_norms[tpos] / space.monomial_sq_norms[pos]).sqrt();
                for j in 0..cd {
                    m[(tpos * cd + j, pos * cd + j)] = C64::new(entry, 0.0);
                }
            }
        }
        matrices.push(m);
    }
    OperatorTuple::new(matrices).expect("shift matrices share a square shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_entry;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kernel_coefficients_match_series_oracles() {
        // Geometric series for lambda = 1.
        let c1 = kernel_coefficients(1.0, 6).unwrap();
        assert!(c1.iter().all(|&x| x == 1.0));
        // (1-t)^(-2) = sum (m+1) t^m, frozen from the symbolic expansion.
        assert_eq!(kernel_coefficients(2.0, 3).unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        // c_0 = 1 for every lambda.
        for lambda in [1.0, 1.5, 2.0, 3.25] {
            assert_eq!(kernel_coefficients(lambda, 0).unwrap()[0], 1.0);
        }
        assert!(kernel_coefficients(0.5, 3).is_err());
    }

    /// Independent Gram oracle: expand sum_m c_m (z.w)^m by repeated
    /// convolution in the variables x_i = z_i conj(w_i); the coefficient of
    /// x^k is the reciprocal of the squared monomial norm.
    fn gram_diagonal_oracle(n: usize, coeffs: &[f64], cap: u32) -> HashMap<Vec<u32>, f64> {
        let mut power: HashMap<Vec<u32>, f64> = HashMap::new();
        power.insert(vec![0; n], 1.0);
        let mut out: HashMap<Vec<u32>, f64> = HashMap::new();
        out.insert(vec![0; n], coeffs[0]);
        for &cm in coeffs.iter().take(cap as usize + 1).skip(1) {
            let mut next: HashMap<Vec<u32>, f64> = HashMap::new();
            for (k, v) in &power {
                for i in 0..n {
                    let mut k2 = k.clone();
                    k2[i] += 1;
                    *next.entry(k2).or_insert(0.0) += v;
                }
            }
            power = next;
            for (k, v) in &power {
                out.insert(k.clone(), cm * v);
            }
        }
        out
    }

    #[test]
    fn monomial_norms_match_gram_oracle() {
        for (n, lambda, cap) in [(2usize, 1.0f64, 4u32), (2, 2.0, 4), (2, 3.0, 3), (1, 2.5, 5), (3, 1.0, 3)] {
            let space = make_space(n, lambda, cap, 1).unwrap();
            let oracle = gram_diagonal_oracle(n, space.kernel().coefficients(), cap);
            for (pos, k) in space.basis().indices().iter().enumerate() {
                let expect = 1.0 / oracle[k.entries()];
                let got = space.nu(pos);
                assert!(
                    (got - expect).abs() <= 1e-12 * expect,
                    "nu mismatch at {k} for lambda={lambda}: {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn frozen_norm_values() {
        // Drury-Arveson on the 2-ball.
        let da = make_space(2, 1.0, 2, 1).unwrap();
        let pos = da.basis().position(&MultiIndex::new(vec![1, 1])).unwrap();
        assert_eq!(da.nu(pos), 0.5);
        // One variable, lambda = 2: nu_2 = 1/(c_2 gamma_2) = 1/3.
        let b = make_space(1, 2.0, 2, 1).unwrap();
        assert!((b.nu(2) - 1.0 / 3.0).abs() < 1e-15);
        // Degree-0 space is one dimensional with nu = 1.
        let tiny = make_space(2, 1.0, 0, 1).unwrap();
        assert_eq!(tiny.dim(), 1);
        assert_eq!(tiny.nu(0), 1.0);
        // Hardy and Bergman on the 2-ball against the classical factorials.
        let hardy = make_space(2, 2.0, 3, 1).unwrap();
        let p11 = hardy.basis().position(&MultiIndex::new(vec![1, 1])).unwrap();
        assert!((hardy.nu(p11) - 1.0 / 6.0).abs() < 1e-15);
        let bergman = make_space(2, 3.0, 3, 1).unwrap();
        assert!((bergman.nu(p11) - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn kernel_vector_examples() {
        // w = 0 keeps only the constant block.
        let space = make_space(2, 1.0, 3, 1).unwrap();
        let zeta = CVector::from_vec(vec![c(1.0, 0.0)]);
        let kv = kernel_vector(&space, &BallPoint::real(&[0.0, 0.0]).unwrap(), &zeta).unwrap();
        assert_eq!(kv.coeffs[0], c(1.0, 0.0));
        assert!(kv.coeffs.iter().skip(1).all(|z| z.norm() == 0.0));

        // Geometric expansion in one variable.
        let disc = make_space(1, 1.0, 2, 1).unwrap();
        let kv = kernel_vector(&disc, &BallPoint::real(&[0.5]).unwrap(), &zeta).unwrap();
        for (i, expect) in [1.0, 0.5, 0.25].iter().enumerate() {
            assert!((kv.coeffs[i] - c(*expect, 0.0)).norm() < 1e-15);
        }

        // Mixed block on the 2-ball: gamma_{(1,1)} conj(0.3 * 0.4) = 0.24.
        let kv = kernel_vector(&space, &BallPoint::real(&[0.3, 0.4]).unwrap(), &zeta).unwrap();
        let pos = space.basis().position(&MultiIndex::new(vec![1, 1])).unwrap();
        assert!((kv.coeffs[pos] - c(0.24, 0.0)).norm() < 1e-15);

        // Boundary points are rejected.
        assert!(BallPoint::real(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let space = make_space(2, 1.0, 3, 1).unwrap();
        let one = CVector::from_vec(vec![c(1.0, 0.0)]);
        let z11 = SpaceVector::monomial(&space, &MultiIndex::new(vec![1, 1]), &one).unwrap();
        let z20 = SpaceVector::monomial(&space, &MultiIndex::new(vec![2, 0]), &one).unwrap();
        // Distinct monomials are orthogonal, exactly.
        assert_eq!(inner_product(&space, &z11, &z20).unwrap(), c(0.0, 0.0));
        // Squared norm of z1 z2 in the Drury-Arveson 2-ball model.
        assert_eq!(inner_product(&space, &z11, &z11).unwrap(), c(0.5, 0.0));

        // Reproducing check: f = z1^2 at w = (0.5, 0) gives 0.25.
        let f = SpaceVector::monomial(&space, &MultiIndex::new(vec![2, 0]), &one).unwrap();
        let w = BallPoint::real(&[0.5, 0.0]).unwrap();
        let kv = kernel_vector(&space, &w, &one).unwrap();
        let lhs = inner_product(&space, &f, &kv).unwrap();
        assert!((lhs - c(0.25, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn shift_tuple_is_truncated_unilateral_shift() {
        let disc = make_space(1, 1.0, 3, 1).unwrap();
        let t = shift_tuple(&disc);
        let m = &t.matrices()[0];
        for r in 0..4 {
            for cidx in 0..4 {
                let expect = if r == cidx + 1 { 1.0 } else { 0.0 };
                assert!((m[(r, cidx)] - c(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn shift_tuple_commutes() {
        // Both orders act identically on monomials; in floats the two
        // square-root paths can differ in the last ulp.
        let space = make_space(2, 2.0, 4, 2).unwrap();
        let t = shift_tuple(&space);
        let a = &t.matrices()[0];
        let b = &t.matrices()[1];
        assert!(max_abs_entry(&(a * b - b * a)) <= 1e-15);
    }

    #[test]
    fn drury_arveson_defect_is_constant_projection() {
        let space = make_space(2, 1.0, 4, 2).unwrap();
        let t = shift_tuple(&space);
        let dim = space.dim();
        let mut sum = CMatrix::zeros(dim, dim);
        for m in t.matrices() {
            sum += m * m.adjoint();
        }
        let mut constants = CMatrix::zeros(dim, dim);
        for j in 0..space.coeff_dim() {
            constants[(j, j)] = c(1.0, 0.0);
        }
        assert!(max_abs_entry(&(crate::linalg::identity(dim) - sum - constants)) <= 1e-14);
    }

    #[test]
    fn shifts_are_nilpotent_of_order_cap_plus_one() {
        let space = make_space(2, 3.0, 3, 1).unwrap();
        let t = shift_tuple(&space);
        let m0 = &t.matrices()[0];
        let m1 = &t.matrices()[1];
        let prod = m0 * m1 * m0 * m1; // degree 4 > cap 3
        assert_eq!(max_abs_entry(&prod), 0.0);
    }

    #[test]
    fn orthonormal_round_trip() {
        let space = make_space(2, 2.0, 3, 2).unwrap();
        let mut f = SpaceVector::zero(&space);
        for (i, z) in f.coeffs.iter_mut().enumerate() {
            *z = c(0.1 * i as f64, 0.05 * i as f64);
        }
        let on = space.to_orthonormal(&f);
        let back = space.from_orthonormal(&on);
        assert!((&back.coeffs - &f.coeffs).norm() < 1e-13);
        // Orthonormal coordinates carry the inner product to the plain dot.
        let ip = inner_product(&space, &f, &f).unwrap();
        assert!((ip.re - on.norm_squared()).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn reproducing_property(
            seedling in proptest::collection::vec(-1.0f64..1.0, 8),
            wx in -0.6f64..0.6,
            wy in -0.35f64..0.35,
            lambda_idx in 0usize..3,
        ) {
            let lambda = [1.0, 2.0, 3.0][lambda_idx];
            let space = make_space(2, lambda, 3, 1).unwrap();
            let mut f = SpaceVector::zero(&space);
            for (i, z) in f.coeffs.iter_mut().enumerate() {
                let a = seedling[i % seedling.len()];
                let b = seedling[(i + 3) % seedling.len()];
                *z = c(a, b);
            }
            let w = BallPoint::new(vec![c(wx, 0.1), c(wy, -0.2)]).unwrap();
            let zeta = CVector::from_vec(vec![c(1.0, 0.0)]);
            let kv = kernel_vector(&space, &w, &zeta).unwrap();
            let lhs = inner_product(&space, &f, &kv).unwrap();
            // Independent evaluation: explicit monomial sum.
            let mut rhs = c(0.0, 0.0);
            for (pos, k) in space.basis().indices().iter().enumerate() {
                rhs += f.coeffs[pos] * w.monomial(k);
            }
            prop_assert!((lhs - rhs).norm() <= 1e-10);
        }

        #[test]
        fn inner_product_is_conjugate_symmetric(vals in proptest::collection::vec(-2.0f64..2.0, 12)) {
            let space = make_space(2, 2.0, 1, 2).unwrap();
            let f = SpaceVector::from_coeffs(&space, CVector::from_iterator(6, (0..6).map(|i| c(vals[i], vals[(i + 1) % 12])))).unwrap();
            let g = SpaceVector::from_coeffs(&space, CVector::from_iterator(6, (0..6).map(|i| c(vals[i + 6], vals[(i + 7) % 12])))).unwrap();
            let fg = inner_product(&space, &f, &g).unwrap();
            let gf = inner_product(&space, &g, &f).unwrap();
            prop_assert!((fg - gf.conj()).norm() < 1e-12);
            let ff = inner_product(&space, &f, &f).unwrap();
            prop_assert!(ff.im.abs() < 1e-14 && ff.re >= 0.0);
        }
    }
}
