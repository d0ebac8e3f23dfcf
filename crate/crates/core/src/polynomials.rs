//! Homogeneous polynomials with integer coefficients, the `Q_{2^m}` family
//! and exact checks of `|Q_{2^m}^n|_∞ ≥ (2^n/(n+1))^{2^m−1}`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

use crate::lp::pairwise_sum;
use crate::{Error, Result};

/// Default cap on the number of terms produced by [`poly_pow`].
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// `P(x) = Σ_{|α| = degree} a_α x^α` over `nvars` variables. Multi-indices
/// are exponent arrays, ordered lexicographically; zero coefficients are
/// never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Vec<u32>, i64>,
}

impl Polynomial {
    /// Builds a polynomial, summing repeated multi-indices. Every multi-index
    /// must have length `nvars` and total degree `degree`.
    pub fn new<I>(nvars: usize, degree: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, i64)>,
    {
        let mut p = Polynomial { nvars, degree, terms: BTreeMap::new() };
        for (alpha, c) in terms {
            if alpha.len() != nvars {
                return Err(Error::ArityMismatch { expected: nvars, found: alpha.len() });
            }
            if alpha.iter().sum::<u32>() != degree {
                return Err(Error::InvalidParameter("multi-index degree differs from the polynomial degree"));
            }
            p.add_term(alpha, c)?;
        }
        Ok(p)
    }

    fn add_term(&mut self, alpha: Vec<u32>, c: i64) -> Result<()> {
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(alpha) {
            Entry::Vacant(v) => {
                if c != 0 {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().checked_add(c).ok_or(Error::Overflow)?;
                if sum == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
        Ok(())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, alpha: &[u32]) -> i64 {
        self.terms.get(alpha).copied().unwrap_or(0)
    }

    /// Terms in lexicographic multi-index order.
    pub fn iter(&self) -> impl Iterator<Item = (&[u32], i64)> + '_ {
        self.terms.iter().map(|(a, &c)| (a.as_slice(), c))
    }

    /// `|P|_∞ = max |a_α|`, exact.
    pub fn max_abs_coefficient(&self) -> u64 {
        self.terms.values().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch { slot: 0, expected: self.nvars, found: x.len() });
        }
        let terms: Vec<f64> = self.iter().map(|(alpha, c)| monomial(alpha, x, c as f64)).collect();
        Ok(pairwise_sum(&terms))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch { slot: 0, expected: self.nvars, found: x.len() });
        }
        let mut g = vec![0.0; self.nvars];
        let mut reduced = Vec::with_capacity(self.nvars);
        for (alpha, c) in self.iter() {
            for (i, &a) in alpha.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                reduced.clear();
                reduced.extend_from_slice(alpha);
                reduced[i] -= 1;
                g[i] += monomial(&reduced, x, c as f64 * a as f64);
            }
        }
        Ok(g)
    }

    /// The same polynomial in `nvars` variables, variable `i` renamed `i + offset`.
    pub fn embedded(&self, nvars: usize, offset: usize) -> Result<Self> {
        if offset + self.nvars > nvars {
            return Err(Error::InvalidParameter("embedding does not fit"));
        }
        let terms = self.iter().map(|(alpha, c)| {
            let mut wide = vec![0; nvars];
            wide[offset..offset + self.nvars].copy_from_slice(alpha);
            (wide, c)
        });
        Self::new(nvars, self.degree, terms)
    }

    /// Exact product; fails once the result has more than `cap` terms.
    pub fn mul(&self, other: &Self, cap: usize) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::ArityMismatch { expected: self.nvars, found: other.nvars });
        }
        let mut out: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
        for (a, ca) in self.iter() {
            for (b, cb) in other.iter() {
                let key: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                let prod = ca.checked_mul(cb).ok_or(Error::Overflow)?;
                let slot = out.entry(key).or_insert(0);
                *slot = slot.checked_add(prod).ok_or(Error::Overflow)?;
                if out.len() > cap {
                    return Err(Error::TooLarge { count: out.len() as u128, limit: cap as u128 });
                }
            }
        }
        out.retain(|_, c| *c != 0);
        Ok(Polynomial { nvars: self.nvars, degree: self.degree + other.degree, terms: out })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars || self.degree != other.degree {
            return Err(Error::InvalidParameter("subtraction needs equal variables and degree"));
        }
        let mut out = self.clone();
        for (alpha, c) in other.iter() {
            out.add_term(alpha.to_vec(), c.checked_neg().ok_or(Error::Overflow)?)?;
        }
        Ok(out)
    }
}

fn monomial(alpha: &[u32], x: &[f64], c: f64) -> f64 {
    alpha.iter().zip(x).fold(c, |acc, (&a, &xi)| if a == 0 { acc } else { acc * xi.powi(a as i32) })
}

/// `Q_2 = x_1² − x_2²`, `Q_{2d}(x) = Q_d(x_1..x_d)² − Q_d(x_{d+1}..x_{2d})²`:
/// a degree-`d` polynomial in `d` variables, `d` a power of two.
pub fn make_q(d: usize) -> Result<Polynomial> {
    if d < 2 || !d.is_power_of_two() {
        return Err(Error::InvalidDegree { degree: d, reason: "Q_d needs d a power of two ≥ 2" });
    }
    let mut q = Polynomial::new(2, 2, vec![(vec![2, 0], 1), (vec![0, 2], -1)])?;
    let mut n = 2;
    while n < d {
        let front = q.embedded(2 * n, 0)?;
        let back = q.embedded(2 * n, n)?;
        q = front.mul(&front, DEFAULT_TERM_CAP)?.sub(&back.mul(&back, DEFAULT_TERM_CAP)?)?;
        n *= 2;
    }
    Ok(q)
}

/// `P^n` by exact convolution, `n ≥ 1`.
pub fn poly_pow(p: &Polynomial, n: u32, cap: usize) -> Result<Polynomial> {
    if n == 0 {
        return Err(Error::InvalidParameter("power must be at least 1"));
    }
    let mut result: Option<Polynomial> = None;
    let mut base = p.clone();
    let mut e = n;
    loop {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => r.mul(&base, cap)?,
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = base.mul(&base, cap)?;
    }
    Ok(result.expect("n ≥ 1"))
}

/// `|P|_q = (Σ|a_α|^q)^{1/q}`, `max|a_α|` at `q = ∞`.
pub fn poly_coeff_norm(p: &Polynomial, q: f64) -> Result<f64> {
    crate::lp::check_p(q)?;
    let values: Vec<f64> = p.terms.values().map(|&c| c as f64).collect();
    Ok(crate::lp::lp_norm(&values, q))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EqMReport {
    pub m: u32,
    pub n: u32,
    /// `|Q_{2^m}^n|_∞`, exact.
    pub lhs: u64,
    /// `(2^n/(n+1))^{2^m−1}`.
    pub rhs: f64,
}

impl EqMReport {
    pub fn holds(&self) -> bool {
        self.lhs as f64 >= self.rhs
    }
}

/// Expands `Q_{2^m}^n` and compares its largest coefficient with
/// `(2^n/(n+1))^{2^m−1}`.
pub fn check_eq_m(m: u32, n: u32, cap: usize) -> Result<EqMReport> {
    if m == 0 || m > 20 {
        return Err(Error::InvalidParameter("m must be in 1..=20"));
    }
    let q = make_q(1 << m)?;
    let lhs = poly_pow(&q, n, cap)?.max_abs_coefficient();
    let rhs = crate::bounds::poly_lower_bound(m, n)?;
    Ok(EqMReport { m, n, lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2() -> Polynomial {
        make_q(2).unwrap()
    }

    #[test]
    fn q_family() {
        assert_eq!(q2().iter().collect::<Vec<_>>(), vec![(&[0, 2][..], -1), (&[2, 0][..], 1)]);
        let q4 = make_q(4).unwrap();
        let expected = Polynomial::new(
            4,
            4,
            vec![
                (vec![4, 0, 0, 0], 1),
                (vec![2, 2, 0, 0], -2),
                (vec![0, 4, 0, 0], 1),
                (vec![0, 0, 4, 0], -1),
                (vec![0, 0, 2, 2], 2),
                (vec![0, 0, 0, 4], -1),
            ],
        )
        .unwrap();
        assert_eq!(q4, expected);
        // the two squares live on disjoint variables, so no terms cancel
        let q8 = make_q(8).unwrap();
        let half = poly_pow(&q4, 2, DEFAULT_TERM_CAP).unwrap();
        assert_eq!(q8.len(), 2 * half.len());
        assert!(make_q(6).is_err());
        assert!(make_q(1).is_err());
    }

    #[test]
    fn powers() {
        let sq = poly_pow(&q2(), 2, DEFAULT_TERM_CAP).unwrap();
        let expected = Polynomial::new(2, 4, vec![(vec![4, 0], 1), (vec![2, 2], -2), (vec![0, 4], 1)]).unwrap();
        assert_eq!(sq, expected);
        assert_eq!(sq.max_abs_coefficient(), 2);
        assert_eq!(poly_pow(&q2(), 1, DEFAULT_TERM_CAP).unwrap(), q2());
        assert!(poly_pow(&q2(), 0, DEFAULT_TERM_CAP).is_err());
        assert!(matches!(poly_pow(&make_q(8).unwrap(), 4, 10), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn norms() {
        assert_eq!(poly_coeff_norm(&q2(), f64::INFINITY).unwrap(), 1.0);
        let sq = poly_pow(&q2(), 2, DEFAULT_TERM_CAP).unwrap();
        assert_eq!(poly_coeff_norm(&sq, f64::INFINITY).unwrap(), 2.0);
        assert!((poly_coeff_norm(&sq, 2.0).unwrap() - 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn eq_m_small_cases() {
        let r = check_eq_m(1, 2, DEFAULT_TERM_CAP).unwrap();
        assert_eq!(r.lhs, 2);
        assert!((r.rhs - 4.0 / 3.0).abs() < 1e-15 && r.holds());
        let r = check_eq_m(2, 1, DEFAULT_TERM_CAP).unwrap();
        assert_eq!((r.lhs, r.rhs), (2, 1.0));
        let r = check_eq_m(2, 2, DEFAULT_TERM_CAP).unwrap();
        assert!(r.holds() && r.rhs > 2.37);
    }

    #[test]
    fn construction_errors() {
        assert!(Polynomial::new(2, 2, vec![(vec![1, 0], 1)]).is_err());
        assert!(Polynomial::new(2, 2, vec![(vec![2], 1)]).is_err());
        assert!(Polynomial::new(2, 2, vec![(vec![2, 0], i64::MAX), (vec![2, 0], 1)]).is_err());
        let p = Polynomial::new(2, 2, vec![(vec![2, 0], 3), (vec![2, 0], -3)]).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn gradient_of_q2() {
        let g = q2().gradient(&[1.5, -2.0]).unwrap();
        assert_eq!(g, vec![3.0, 4.0]);
    }
}
