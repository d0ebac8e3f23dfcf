use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::{Error, Result};

/// Sparse coefficient tensor `(j_1, …, j_m) ↦ T(e_{j_1}, …, e_{j_m})`.
///
/// Index tuples are 1-based at the public surface. Entries are kept sorted
/// lexicographically by index tuple, without duplicates and without zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTensor {
    dims: Vec<usize>,
    // flat, 0-based, row-major by entry: entry e owns indices[e*m..(e+1)*m]
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CoeffTensor {
    /// Builds a tensor from 1-based index tuples. Repeated tuples are summed
    /// and resulting zeros dropped.
    pub fn new<I>(dims: Vec<usize>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let m = dims.len();
        if m == 0 {
            return Err(Error::InvalidDegree { degree: 0, reason: "tensor degree must be at least 1" });
        }
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for (idx, c) in entries {
            if idx.len() != m {
                return Err(Error::ArityMismatch { expected: m, found: idx.len() });
            }
            for (slot, (&j, &n)) in idx.iter().zip(&dims).enumerate() {
                if j == 0 || j > n {
                    return Err(Error::IndexOutOfRange { slot, index: j, dim: n });
                }
                indices.push(j - 1);
            }
            values.push(c);
        }
        Ok(Self::from_raw(dims, indices, values))
    }

    /// Same as [`CoeffTensor::new`] with 0-based flat indices; no bounds checks.
    pub(crate) fn from_raw(dims: Vec<usize>, indices: Vec<usize>, values: Vec<f64>) -> Self {
        let m = dims.len();
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_unstable_by(|&a, &b| indices[a * m..(a + 1) * m].cmp(&indices[b * m..(b + 1) * m]));

        let mut out_idx: Vec<usize> = Vec::with_capacity(indices.len());
        let mut out_val: Vec<f64> = Vec::with_capacity(values.len());
        for e in order {
            let key = &indices[e * m..(e + 1) * m];
            let n = out_val.len();
            if n > 0 && &out_idx[(n - 1) * m..n * m] == key {
                out_val[n - 1] += values[e];
            } else {
                out_idx.extend_from_slice(key);
                out_val.push(values[e]);
            }
        }

        let mut tensor =
            Self { dims, indices: Vec::with_capacity(out_idx.len()), values: Vec::with_capacity(out_val.len()) };
        for (e, &c) in out_val.iter().enumerate() {
            if c != 0.0 {
                tensor.indices.extend_from_slice(&out_idx[e * m..(e + 1) * m]);
                tensor.values.push(c);
            }
        }
        tensor
    }

    pub fn degree(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of stored (nonzero) coefficients.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Coefficient at a 1-based index tuple (zero when absent).
    pub fn get(&self, idx: &[usize]) -> f64 {
        if idx.len() != self.degree() || idx.contains(&0) {
            return 0.0;
        }
        let key: Vec<usize> = idx.iter().map(|j| j - 1).collect();
        let m = self.degree();
        let pos = self.binary_search(&key, m);
        pos.map_or(0.0, |e| self.values[e])
    }

    fn binary_search(&self, key: &[usize], m: usize) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.values.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.indices[mid * m..(mid + 1) * m].cmp(key) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Entries with 1-based index tuples, in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.raw_iter().map(|(idx, c)| (idx.iter().map(|j| j + 1).collect(), c))
    }

    /// Entries with 0-based index slices, in lexicographic order.
    pub(crate) fn raw_iter(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        let m = self.degree();
        self.indices.chunks_exact(m).zip(self.values.iter().copied())
    }

    /// `Σ c_j Π_k x^{(k)}_{j_k}`.
    pub fn evaluate<V: AsRef<[f64]>>(&self, args: &[V]) -> Result<f64> {
        if args.len() != self.degree() {
            return Err(Error::ArityMismatch { expected: self.degree(), found: args.len() });
        }
        for (slot, (a, &n)) in args.iter().zip(&self.dims).enumerate() {
            if a.as_ref().len() != n {
                return Err(Error::DimensionMismatch { slot, expected: n, found: a.as_ref().len() });
            }
        }
        let terms: Vec<f64> = self
            .raw_iter()
            .map(|(idx, c)| idx.iter().enumerate().fold(c, |acc, (k, &j)| acc * args[k].as_ref()[j]))
            .collect();
        Ok(crate::lp::pairwise_sum(&terms))
    }

    /// Reorders axes: axis `k` of the result is axis `order[k]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let m = self.degree();
        let mut seen = alloc::vec![false; m];
        if order.len() != m {
            return Err(Error::ArityMismatch { expected: m, found: order.len() });
        }
        for &k in order {
            if k >= m || core::mem::replace(&mut seen[k], true) {
                return Err(Error::InvalidParameter("axis order must be a permutation"));
            }
        }
        let dims = order.iter().map(|&k| self.dims[k]).collect();
        let mut indices = Vec::with_capacity(self.indices.len());
        for (idx, _) in self.raw_iter() {
            indices.extend(order.iter().map(|&k| idx[k]));
        }
        Ok(Self::from_raw(dims, indices, self.values.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn t2() -> CoeffTensor {
        CoeffTensor::new(vec![2, 2], vec![(vec![2, 2], -1.0), (vec![1, 1], 1.0), (vec![2, 1], 1.0), (vec![1, 2], 1.0)])
            .unwrap()
    }

    #[test]
    fn entries_are_sorted_and_one_based() {
        let t = t2();
        let idx: Vec<Vec<usize>> = t.iter().map(|(i, _)| i).collect();
        assert_eq!(idx, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
        assert_eq!(t.get(&[2, 2]), -1.0);
        assert_eq!(t.get(&[0, 1]), 0.0);
    }

    #[test]
    fn duplicates_merge_and_zeros_drop() {
        let t =
            CoeffTensor::new(vec![3], vec![(vec![1], 1.0), (vec![1], -1.0), (vec![3], 2.0), (vec![3], 0.5)]).unwrap();
        assert_eq!(t.nnz(), 1);
        assert_eq!(t.get(&[3]), 2.5);
    }

    #[test]
    fn rejects_bad_indices() {
        assert!(matches!(
            CoeffTensor::new(vec![2, 2], vec![(vec![3, 1], 1.0)]),
            Err(Error::IndexOutOfRange { slot: 0, index: 3, dim: 2 })
        ));
        assert!(matches!(CoeffTensor::new(vec![2, 2], vec![(vec![0, 1], 1.0)]), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(CoeffTensor::new(vec![2], vec![(vec![1, 1], 1.0)]), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn evaluation_and_transpose() {
        let t = t2();
        assert_eq!(t.evaluate(&[vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap(), 2.0);
        let tt = t.permuted(&[1, 0]).unwrap();
        // T_2's matrix is symmetric
        assert_eq!(tt, t);
        assert!(t.evaluate(&[vec![1.0], vec![1.0, 0.0]]).is_err());
        assert!(t.permuted(&[0, 0]).is_err());
    }
}
