//! Hardy–Littlewood exponents and plain / mixed coefficient norms.

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

use crate::forms::CoeffTensor;
use crate::lp::pairwise_sum;
use crate::{Error, Result};

/// Tolerance for the exponent-sum identity in [`validate_exponents`].
pub const EXPONENT_SUM_TOL: f64 = 1e-12;

/// The optimal summability exponent for m-linear forms on ℓ_p:
/// `p/(p−m)` for `m < p ≤ 2m`, `2mp/(mp+p−2m)` for `p ≥ 2m` (`2m/(m+1)` at `p = ∞`).
pub fn hl_exponent(m: usize, p: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidDegree { degree: m, reason: "exponent defined for m ≥ 2" });
    }
    let mf = m as f64;
    if p.is_nan() || p <= mf {
        return Err(Error::InvalidExponent { value: p, reason: "requires p > m" });
    }
    if p.is_infinite() {
        return Ok(2.0 * mf / (mf + 1.0));
    }
    if p <= 2.0 * mf {
        Ok(p / (p - mf))
    } else {
        Ok(2.0 * mf * p / (mf * p + p - 2.0 * mf))
    }
}

/// `(Σ|c|^q)^{1/q}` over all coefficients; `max|c|` for `q = ∞`.
pub fn coeff_lq(t: &CoeffTensor, q: f64) -> Result<f64> {
    crate::lp::check_p(q)?;
    Ok(lq_of(t.values(), q))
}

fn lq_of(values: &[f64], q: f64) -> f64 {
    let max = values.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if q.is_infinite() || max == 0.0 {
        return max;
    }
    let powered: Vec<f64> = values.iter().map(|c| (c.abs() / max).powf(q)).collect();
    max * pairwise_sum(&powered).powf(1.0 / q)
}

/// A multiple exponent `q = (q_1, …, q_m)`, entries in `(0, ∞]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentVector(Vec<f64>);

impl ExponentVector {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::InvalidParameter("exponent vector is empty"));
        }
        if let Some(&bad) = q.iter().find(|v| v.is_nan() || **v <= 0.0) {
            return Err(Error::InvalidExponent { value: bad, reason: "exponents must be positive" });
        }
        Ok(Self(q))
    }

    /// `β_m = (2αm − 2α)/(αm − 2 + α)`, the companion of `α` in the
    /// generalized Bohnenblust–Hille exponent vectors.
    pub fn beta(m: usize, alpha: f64) -> f64 {
        let mf = m as f64;
        (2.0 * alpha * mf - 2.0 * alpha) / (alpha * mf - 2.0 + alpha)
    }

    /// `(α, β_m, …, β_m)`.
    pub fn alpha_leading(m: usize, alpha: f64) -> Result<Self> {
        check_alpha(m, alpha)?;
        let mut q = alloc::vec![Self::beta(m, alpha); m];
        q[0] = alpha;
        Self::new(q)
    }

    /// `(β_m, …, β_m, α)`.
    pub fn alpha_trailing(m: usize, alpha: f64) -> Result<Self> {
        check_alpha(m, alpha)?;
        let mut q = alloc::vec![Self::beta(m, alpha); m];
        q[m - 1] = alpha;
        Self::new(q)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `Σ 1/q_i`.
    pub fn reciprocal_sum(&self) -> f64 {
        self.0.iter().map(|q| 1.0 / q).sum()
    }
}

pub(crate) fn check_alpha(m: usize, alpha: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidDegree { degree: m, reason: "requires m ≥ 2" });
    }
    if !(1.0..=2.0).contains(&alpha) {
        return Err(Error::InvalidExponent { value: alpha, reason: "α must lie in [1, 2]" });
    }
    Ok(())
}

/// Nested norm `(Σ_{j_1}(Σ_{j_2}(⋯(Σ_{j_m}|c_j|^{q_m})^{q_{m−1}/q_m}⋯)^{q_1/q_2})^{1/q_1}`,
/// `j_m` innermost. Entries `q_i = ∞` take the maximum over that index.
pub fn mixed_norm(t: &CoeffTensor, q: &ExponentVector) -> Result<f64> {
    let m = t.degree();
    if q.len() != m {
        return Err(Error::ArityMismatch { expected: m, found: q.len() });
    }
    for &qi in q.as_slice() {
        crate::lp::check_p(qi)?;
    }

    // Entries are sorted lexicographically, so entries sharing a prefix are
    // contiguous. Collapse one axis at a time from the innermost outwards.
    let mut keys: Vec<&[usize]> = Vec::with_capacity(t.nnz());
    let mut values: Vec<f64> = Vec::with_capacity(t.nnz());
    for (idx, c) in t.raw_iter() {
        keys.push(idx);
        values.push(c.abs());
    }
    for depth in (0..m).rev() {
        let mut next_keys = Vec::new();
        let mut next_values = Vec::new();
        let mut start = 0;
        while start < values.len() {
            let prefix = &keys[start][..depth];
            let mut end = start + 1;
            while end < values.len() && &keys[end][..depth] == prefix {
                end += 1;
            }
            next_keys.push(keys[start]);
            next_values.push(lq_of(&values[start..end], q.as_slice()[depth]));
            start = end;
        }
        keys = next_keys;
        values = next_values;
    }
    Ok(values.first().copied().unwrap_or(0.0))
}

/// Why an exponent vector fails the admissibility conditions.
#[derive(Debug, Clone, PartialEq)]
pub enum ExponentIssue {
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    /// `p` outside `(m, ∞]`, or an empty admissible range (`p < 2m`).
    BadP {
        p: f64,
    },
    OutOfRange {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
    SumMismatch {
        sum: f64,
        expected: f64,
    },
}

impl fmt::Display for ExponentIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LengthMismatch { expected, found } => write!(f, "expected {expected} exponents, found {found}"),
            Self::BadP { p } => write!(f, "p = {p} leaves no admissible exponents"),
            Self::OutOfRange { index, value, lo, hi } => {
                write!(f, "q_{} = {value} outside [{lo}, {hi}]", index + 1)
            }
            Self::SumMismatch { sum, expected } => write!(f, "Σ1/q_i = {sum}, expected {expected}"),
        }
    }
}

/// Outcome of [`validate_exponents`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentCheck {
    pub issues: Vec<ExponentIssue>,
}

impl ExponentCheck {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks `q ∈ [p/(p−m), 2]^m` and `Σ 1/q_i = (mp+p−2m)/(2p)` (to
/// [`EXPONENT_SUM_TOL`]). At `p = ∞` the range is `[1, 2]` and the sum `(m+1)/2`.
pub fn validate_exponents(q: &ExponentVector, m: usize, p: f64) -> ExponentCheck {
    let mut issues = Vec::new();
    if q.len() != m {
        issues.push(ExponentIssue::LengthMismatch { expected: m, found: q.len() });
    }
    let mf = m as f64;
    if p.is_nan() || p <= mf {
        issues.push(ExponentIssue::BadP { p });
        return ExponentCheck { issues };
    }
    let (lo, hi) = if p.is_infinite() { (1.0, 2.0) } else { (p / (p - mf), 2.0) };
    if lo > hi {
        issues.push(ExponentIssue::BadP { p });
    }
    for (index, &value) in q.as_slice().iter().enumerate() {
        if !(lo..=hi).contains(&value) {
            issues.push(ExponentIssue::OutOfRange { index, value, lo, hi });
        }
    }
    let expected = (mf + 1.0) / 2.0 - if p.is_infinite() { 0.0 } else { mf / p };
    let sum = q.reciprocal_sum();
    if (sum - expected).abs() > EXPONENT_SUM_TOL {
        issues.push(ExponentIssue::SumMismatch { sum, expected });
    }
    ExponentCheck { issues }
}
