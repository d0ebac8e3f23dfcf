//! Scalar helpers for ℓ_p norms on finite sequences.

#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

/// Conjugate exponent `p*` with `1/p + 1/p* = 1`; `1 ↔ ∞`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Pairwise (tree) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// `(Σ|x_i|^p)^{1/p}`, `max|x_i|` at `p = ∞`. Terms are rescaled by the
/// largest magnitude before powering.
pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    let max = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if p.is_infinite() || max == 0.0 {
        return max;
    }
    if p == 1.0 {
        let abs: alloc::vec::Vec<f64> = x.iter().map(|v| v.abs()).collect();
        return pairwise_sum(&abs);
    }
    let scaled: alloc::vec::Vec<f64> = x.iter().map(|v| (v.abs() / max).powf(p)).collect();
    max * pairwise_sum(&scaled).powf(1.0 / p)
}

/// Checks `p ≥ 1` (or `p = ∞`).
pub(crate) fn check_p(p: f64) -> crate::Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(crate::Error::InvalidExponent { value: p, reason: "ℓ_p exponent must satisfy p ≥ 1" });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugates() {
        assert_eq!(conjugate(2.0), 2.0);
        assert_eq!(conjugate(1.0), f64::INFINITY);
        assert_eq!(conjugate(f64::INFINITY), 1.0);
        assert!((conjugate(4.0) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn norms_of_small_vectors() {
        assert!((lp_norm(&[3.0, -4.0], 2.0) - 5.0).abs() < 1e-15);
        assert_eq!(lp_norm(&[3.0, -4.0], 1.0), 7.0);
        assert_eq!(lp_norm(&[3.0, -4.0], f64::INFINITY), 4.0);
        assert_eq!(lp_norm(&[0.0, 0.0], 3.0), 0.0);
        assert!((lp_norm(&[1.0; 4], 4.0 / 3.0) - 4f64.powf(0.75)).abs() < 1e-14);
    }

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let v: alloc::vec::Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500500.0);
    }
}
