//! Multi-index combinatorics: enumeration of exponent tuples up to a degree
//! cap and the multinomial weights attached to them.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigUint;

use crate::{Error, Result};

/// Largest total degree for which multinomial weights are computed exactly.
pub const MAX_GAMMA_DEGREE: u32 = 40;

/// Exponent tuple k in N^n.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    entries: Vec<u32>,
}

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(!entries.is_empty(), "multi-index needs at least one entry");
        MultiIndex { entries }
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex::new(vec![0; n])
    }

    /// Standard unit index e_i.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut entries = vec![0; n];
        entries[i] = 1;
        MultiIndex::new(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn arity(&self) -> usize {
        self.entries.len()
    }

    pub fn degree(&self) -> u32 {
        self.entries.iter().sum()
    }

    /// k + e_i.
    pub fn raised(&self, i: usize) -> Self {
        let mut entries = self.entries.clone();
        entries[i] += 1;
        MultiIndex::new(entries)
    }

    /// k - e_i, or None when k_i = 0.
    pub fn lowered(&self, i: usize) -> Option<Self> {
        if self.entries[i] == 0 {
            return None;
        }
        let mut entries = self.entries.clone();
        entries[i] -= 1;
        Some(MultiIndex::new(entries))
    }

    /// Entrywise sum; panics on arity mismatch.
    pub fn plus(&self, other: &MultiIndex) -> Self {
        assert_eq!(self.arity(), other.arity(), "arity mismatch");
        MultiIndex::new(
            self.entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

/// Enumeration order: graded by total degree, and within a degree
/// lexicographic with k_1 most significant and larger k_1 first.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.arity(), other.arity(), "arity mismatch");
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.entries.cmp(&self.entries))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Multinomial weight |k|! / (k_1! ... k_n!) in exact integer arithmetic.
pub fn gamma_exact(k: &MultiIndex) -> Result<BigUint> {
    let degree = k.degree();
    if degree > MAX_GAMMA_DEGREE {
        return Err(Error::DegreeLimit {
            degree,
            max: MAX_GAMMA_DEGREE,
        });
    }
    // Product of binomials over the partial sums; stays integral at every step.
    let mut value = BigUint::from(1u32);
    let mut total = 0u32;
    for &part in k.entries() {
        for j in 1..=part {
            total += 1;
            value = value * BigUint::from(total) / BigUint::from(j);
        }
    }
    Ok(value)
}

/// Multinomial weight as a float. Exact up to degree 25 or so where the
/// integer still fits the mantissa; correctly rounded beyond.
pub fn gamma(k: &MultiIndex) -> Result<f64> {
    let exact = gamma_exact(k)?;
    let digits = exact.to_string();
    Ok(digits.parse::<f64>().expect("decimal digits parse"))
}

/// All multi-indices with |k| <= cap, in enumeration order.
pub fn enumerate_upto(n: usize, cap: u32) -> Vec<MultiIndex> {
    assert!(n >= 1, "need at least one variable");
    let mut out = Vec::new();
    for degree in 0..=cap {
        enumerate_degree_into(n, degree, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

/// All multi-indices with |k| = degree, in the within-degree order.
pub fn enumerate_degree(n: usize, degree: u32) -> Vec<MultiIndex> {
    assert!(n >= 1, "need at least one variable");
    let mut out = Vec::new();
    enumerate_degree_into(n, degree, &mut Vec::with_capacity(n), &mut out);
    out
}

fn enumerate_degree_into(
    n: usize,
    degree: u32,
    prefix: &mut Vec<u32>,
    out: &mut Vec<MultiIndex>,
) {
    if n == 1 {
        prefix.push(degree);
        out.push(MultiIndex::new(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in (0..=degree).rev() {
        prefix.push(first);
        enumerate_degree_into(n - 1, degree - first, prefix, out);
        prefix.pop();
    }
}

/// An enumerated index set with O(1) position lookup.
#[derive(Debug, Clone)]
pub struct Basis {
    n: usize,
    cap: u32,
    indices: Vec<MultiIndex>,
    positions: HashMap<Vec<u32>, usize>,
}

impl Basis {
    pub fn new(n: usize, cap: u32) -> Self {
        let indices = enumerate_upto(n, cap);
        let positions = indices
            .iter()
            .enumerate()
            .map(|(i, k)| (k.entries().to_vec(), i))
            .collect();
        Basis {
            n,
            cap,
            indices,
            positions,
        }
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn degree_cap(&self) -> u32 {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index_at(&self, position: usize) -> &MultiIndex {
        &self.indices[position]
    }

    /// Position of k in enumeration order; None when |k| exceeds the cap.
    pub fn position(&self, k: &MultiIndex) -> Option<usize> {
        self.positions.get(k.entries()).copied()
    }
}
