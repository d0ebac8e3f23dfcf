use alloc::vec;
use alloc::vec::Vec;

use super::{CoeffTensor, FormExpr, Sign, SlotId};
use crate::{Error, Result};

// x_1y_1 + x_1y_2 + x_2y_1 − x_2y_2 on slots (a, b)
fn hadamard_pair(a: SlotId, b: SlotId) -> Result<FormExpr> {
    let coeffs = CoeffTensor::new(
        vec![2, 2],
        vec![(vec![1, 1], 1.0), (vec![1, 2], 1.0), (vec![2, 1], 1.0), (vec![2, 2], -1.0)],
    )?;
    FormExpr::leaf(vec![a, b], coeffs)
}

fn linear_pair(slot: SlotId, sign: Sign) -> Result<FormExpr> {
    let coeffs = CoeffTensor::new(vec![2], vec![(vec![1], 1.0), (vec![2], sign.value())])?;
    FormExpr::leaf(vec![slot], coeffs)
}

// Doubles the dimension of every slot; the old coordinates land at the
// front (`shifted = false`) or are read through B^{old dim} (`shifted = true`).
fn doubled(form: &FormExpr, shifted: bool) -> Result<FormExpr> {
    let sig: Vec<(SlotId, usize)> = form.signature().to_vec();
    sig.into_iter().try_fold(form.clone(), |acc, (slot, n)| {
        let offset = if shifted { n } else { 0 };
        FormExpr::shift(acc, slot, offset, 2 * n)
    })
}

/// The m-linear forms `T_m` built from
///
/// ```text
/// T_2(x, y) = x_1y_1 + x_1y_2 + x_2y_1 − x_2y_2
/// T_m(x^(1), …, x^(m)) = (x^(m)_1 + x^(m)_2) T_{m−1}(x^(1), …, x^(m−1))
///                      + (x^(m)_1 − x^(m)_2) T_{m−1}(B^{n_1} x^(1), …, B^{n_{m−1}} x^(m−1))
/// ```
///
/// where `n_k` is the dimension of slot `k` of `T_{m−1}`. Slots 0 and 1 have
/// dimension `2^{m−1}`, slot `k ≥ 1` has `2^{m−k}` and the last slot has 2.
/// `T_m` has `4^{m−1}` coefficients, all ±1.
pub fn make_littlewood(m: usize) -> Result<FormExpr> {
    if m < 2 {
        return Err(Error::InvalidDegree { degree: m, reason: "littlewood forms need m ≥ 2" });
    }
    let mut form = hadamard_pair(0, 1)?;
    for k in 3..=m {
        let last = k - 1;
        let plus = FormExpr::product(linear_pair(last, Sign::Plus)?, doubled(&form, false)?)?;
        let minus = FormExpr::product(linear_pair(last, Sign::Minus)?, doubled(&form, true)?)?;
        form = FormExpr::sum(vec![(Sign::Plus, plus), (Sign::Plus, minus)])?;
    }
    Ok(form)
}

/// The forms `T̃_m` for `m = 2, 4, 8, …`:
///
/// ```text
/// T̃_2 = T_2
/// T̃_2k(u, v) = T̃_k(u) T̃_k(v) + T̃_k(u) T̃_k(Bv) + T̃_k(Bu) T̃_k(v) − T̃_k(Bu) T̃_k(Bv)
/// ```
///
/// with `u` the first `k` arguments, `v` the last `k`, and `B` the backward
/// shift by the old slot dimension applied to every argument of the group.
/// All slots of `T̃_m` have dimension `m`. Like `T_m` it has `4^{m−1}`
/// coefficients, all ±1 (2^30 for m = 16), but a different support.
pub fn make_tilde(m: usize) -> Result<FormExpr> {
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::InvalidDegree { degree: m, reason: "tilde forms need m a power of two ≥ 2" });
    }
    let mut form = hadamard_pair(0, 1)?;
    let mut k = 2;
    while k < m {
        let right = form.relabel(&|s| s + k)?;
        let (u, bu) = (doubled(&form, false)?, doubled(&form, true)?);
        let (v, bv) = (doubled(&right, false)?, doubled(&right, true)?);
        form = FormExpr::sum(vec![
            (Sign::Plus, FormExpr::product(u.clone(), v.clone())?),
            (Sign::Plus, FormExpr::product(u, bv.clone())?),
            (Sign::Plus, FormExpr::product(bu.clone(), v)?),
            (Sign::Minus, FormExpr::product(bu, bv)?),
        ])?;
        k *= 2;
    }
    Ok(form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::DEFAULT_EXPAND_LIMIT;

    // Coefficient of T_m at a 1-based index tuple, straight from the recursion.
    fn littlewood_coeff(m: usize, idx: &[usize]) -> f64 {
        if m == 2 {
            return if idx == [2, 2] { -1.0 } else { 1.0 };
        }
        let (head, last) = idx.split_at(m - 1);
        let dims = littlewood_dims(m - 1);
        let sign = if last[0] == 1 { 1.0 } else { -1.0 };
        if head.iter().zip(&dims).all(|(&i, &n)| i <= n) {
            littlewood_coeff(m - 1, head)
        } else if head.iter().zip(&dims).all(|(&i, &n)| i > n) {
            let shifted: Vec<usize> = head.iter().zip(&dims).map(|(&i, &n)| i - n).collect();
            sign * littlewood_coeff(m - 1, &shifted)
        } else {
            0.0
        }
    }

    fn littlewood_dims(m: usize) -> Vec<usize> {
        let mut dims = vec![1usize << (m - 1)];
        dims.extend((1..m).map(|k| 1usize << (m - k)));
        dims
    }

    #[test]
    fn t2_is_the_hadamard_matrix() {
        let t = make_littlewood(2).unwrap().expand_coeffs(DEFAULT_EXPAND_LIMIT).unwrap();
        assert_eq!(t.dims(), &[2, 2]);
        assert_eq!(t.get(&[1, 1]), 1.0);
        assert_eq!(t.get(&[1, 2]), 1.0);
        assert_eq!(t.get(&[2, 1]), 1.0);
        assert_eq!(t.get(&[2, 2]), -1.0);
    }

    #[test]
    fn littlewood_shapes_and_counts() {
        for m in 2..=7 {
            let form = make_littlewood(m).unwrap();
            assert_eq!(form.degree(), m);
            assert_eq!(form.dims(), littlewood_dims(m));
            assert_eq!(form.analytic_count(), Some(1u128 << (2 * (m - 1))));
            assert!(form.has_unit_coefficients());
        }
        assert_eq!(make_littlewood(3).unwrap().dims().iter().sum::<usize>(), 10);
        assert_eq!(make_littlewood(4).unwrap().dims().iter().sum::<usize>(), 22);
        assert!(make_littlewood(1).is_err());
    }

    #[test]
    fn littlewood_matches_recursion_oracle() {
        for m in 2..=5 {
            let t = make_littlewood(m).unwrap().expand_coeffs(DEFAULT_EXPAND_LIMIT).unwrap();
            assert_eq!(t.nnz(), 1 << (2 * (m - 1)));
            for (idx, c) in t.iter() {
                assert_eq!(c, littlewood_coeff(m, &idx), "m={m} idx={idx:?}");
            }
        }
    }

    #[test]
    fn t3_examples() {
        let t3 = make_littlewood(3).unwrap();
        let e3 = [0.0, 0.0, 1.0, 0.0];
        // only B-shifted branch sees e_3: T_2(e_1, e_1) (x_1 − x_2) with x = (1, −1)
        assert_eq!(t3.evaluate(&[&e3[..], &e3[..], &[1.0, -1.0][..]]).unwrap(), 2.0);
        let t2 = make_littlewood(2).unwrap();
        let c = t2.slot_coefficients(&[&[1.0, 0.0][..], &[0.0, 0.0][..]], 1).unwrap();
        assert_eq!(c, vec![1.0, 1.0]);
        let c = t2.slot_coefficients(&[&[1.0, 1.0][..], &[0.0, 0.0][..]], 1).unwrap();
        assert_eq!(c, vec![2.0, 0.0]);
    }

    #[test]
    fn tilde_shapes_and_counts() {
        let t2 = make_littlewood(2).unwrap().expand_coeffs(DEFAULT_EXPAND_LIMIT).unwrap();
        let tt2 = make_tilde(2).unwrap().expand_coeffs(DEFAULT_EXPAND_LIMIT).unwrap();
        assert_eq!(t2, tt2);
        for (m, count) in [(4usize, 64u128), (8, 1 << 14), (16, 1 << 30)] {
            let form = make_tilde(m).unwrap();
            assert_eq!(form.dims(), vec![m; m]);
            assert_eq!(form.analytic_count(), Some(count));
            assert!(form.has_unit_coefficients());
        }
        let t4 = make_tilde(4).unwrap().expand_coeffs(DEFAULT_EXPAND_LIMIT).unwrap();
        assert_eq!(t4.nnz(), 64);
        assert!(t4.values().iter().all(|&c| c == 1.0 || c == -1.0));
        assert_ne!(t4, make_littlewood(4).unwrap().expand_coeffs(DEFAULT_EXPAND_LIMIT).unwrap());
        assert!(matches!(make_tilde(16).unwrap().expand_coeffs(DEFAULT_EXPAND_LIMIT), Err(Error::TooLarge { .. })));
        assert!(make_tilde(6).is_err());
        assert!(make_tilde(1).is_err());
    }
}
