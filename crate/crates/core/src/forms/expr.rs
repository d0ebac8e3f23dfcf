use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::CoeffTensor;
use crate::{Error, Result};

/// Identifies an argument position. Top-level forms of degree `m` use slots
/// `0..m`.
pub type SlotId = usize;

/// Default cap on the number of coefficients [`FormExpr::expand_coeffs`]
/// will materialize.
pub const DEFAULT_EXPAND_LIMIT: u128 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// The structure of one node of a [`FormExpr`].
#[derive(Debug)]
pub enum FormNode {
    /// Explicit coefficients; axis `k` of `coeffs` belongs to `slots[k]`.
    Leaf {
        slots: Vec<SlotId>,
        coeffs: CoeffTensor,
    },
    Sum(Vec<(Sign, FormExpr)>),
    Product(FormExpr, FormExpr),
    /// The argument at `slot` (of dimension `dim`) is replaced by `B^offset x`,
    /// `(B^d x)_i = x_{i+d}`, zero past the end, before it reaches `inner`.
    Shift {
        inner: FormExpr,
        slot: SlotId,
        offset: usize,
        dim: usize,
    },
}

/// An immutable multilinear form. Cloning is cheap (shared tree).
#[derive(Debug, Clone)]
pub struct FormExpr(Arc<Inner>);

#[derive(Debug)]
struct Inner {
    node: FormNode,
    // (slot, dimension), sorted by slot
    signature: Vec<(SlotId, usize)>,
    support: Support,
}

#[derive(Debug, Clone)]
struct Support {
    // upper bound on the number of nonzero coefficients
    bound: u128,
    // exact count when sum terms are provably disjoint
    exact: Option<u128>,
    // every coefficient is ±1 (only meaningful with `exact`)
    unit: bool,
    // per signature slot, inclusive 0-based index range touched; None if empty
    boxes: Option<Vec<(usize, usize)>>,
}

impl FormExpr {
    fn from_parts(node: FormNode, signature: Vec<(SlotId, usize)>, support: Support) -> Self {
        FormExpr(Arc::new(Inner { node, signature, support }))
    }

    /// A leaf with explicit coefficients. Slot ids must be distinct.
    pub fn leaf(slots: Vec<SlotId>, coeffs: CoeffTensor) -> Result<Self> {
        if slots.len() != coeffs.degree() {
            return Err(Error::ArityMismatch { expected: coeffs.degree(), found: slots.len() });
        }
        let mut signature: Vec<(SlotId, usize)> = slots.iter().copied().zip(coeffs.dims().iter().copied()).collect();
        signature.sort_unstable();
        if let Some(w) = signature.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::OverlappingSlots(w[0].0));
        }
        if let Some(&(slot, _)) = signature.iter().find(|(_, n)| *n == 0) {
            return Err(Error::DimensionMismatch { slot, expected: 1, found: 0 });
        }

        // boxes in leaf axis order, then permuted to signature order
        let mut axis_boxes: Option<Vec<(usize, usize)>> = None;
        for (idx, _) in coeffs.raw_iter() {
            let b = axis_boxes.get_or_insert_with(|| idx.iter().map(|&j| (j, j)).collect());
            for (bk, &j) in b.iter_mut().zip(idx) {
                bk.0 = bk.0.min(j);
                bk.1 = bk.1.max(j);
            }
        }
        let boxes = axis_boxes.map(|b| {
            signature.iter().map(|(s, _)| b[slots.iter().position(|x| x == s).expect("slot present")]).collect()
        });
        let nnz = coeffs.nnz() as u128;
        let support =
            Support { bound: nnz, exact: Some(nnz), unit: coeffs.values().iter().all(|c| c.abs() == 1.0), boxes };
        Ok(Self::from_parts(FormNode::Leaf { slots, coeffs }, signature, support))
    }

    /// Signed sum; every term must have the same slot signature.
    pub fn sum(terms: Vec<(Sign, FormExpr)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::InvalidParameter("sum needs at least one term"));
        };
        let signature = first.0.signature.clone();
        if terms.iter().any(|(_, t)| t.0.signature != signature) {
            return Err(Error::SignatureMismatch);
        }

        let bound = terms.iter().fold(0u128, |acc, (_, t)| acc.saturating_add(t.0.support.bound));
        let disjoint = terms.iter().enumerate().all(|(a, (_, ta))| {
            terms[a + 1..].iter().all(|(_, tb)| boxes_disjoint(&ta.0.support.boxes, &tb.0.support.boxes))
        });
        let exact = if disjoint {
            terms.iter().try_fold(0u128, |acc, (_, t)| t.0.support.exact.and_then(|c| acc.checked_add(c)))
        } else {
            None
        };
        let unit = exact.is_some() && terms.iter().all(|(_, t)| t.0.support.unit);
        let mut boxes: Option<Vec<(usize, usize)>> = None;
        for (_, t) in &terms {
            if let Some(tb) = &t.0.support.boxes {
                match &mut boxes {
                    None => boxes = Some(tb.clone()),
                    Some(b) => {
                        for (x, y) in b.iter_mut().zip(tb) {
                            x.0 = x.0.min(y.0);
                            x.1 = x.1.max(y.1);
                        }
                    }
                }
            }
        }
        let support = Support { bound, exact, unit, boxes };
        Ok(Self::from_parts(FormNode::Sum(terms), signature, support))
    }

    /// Product of two forms acting on disjoint slot sets.
    pub fn product(left: FormExpr, right: FormExpr) -> Result<Self> {
        if let Some(&(s, _)) = left.0.signature.iter().find(|(s, _)| right.has_slot(*s)) {
            return Err(Error::OverlappingSlots(s));
        }
        let mut signature: Vec<(SlotId, usize)> = left.0.signature.iter().chain(&right.0.signature).copied().collect();
        signature.sort_unstable();

        let (ls, rs) = (&left.0.support, &right.0.support);
        let boxes = match (&ls.boxes, &rs.boxes) {
            (Some(lb), Some(rb)) => Some(
                signature
                    .iter()
                    .map(|(s, _)| match left.slot_position(*s) {
                        Some(k) => lb[k],
                        None => rb[right.slot_position(*s).expect("slot present")],
                    })
                    .collect(),
            ),
            _ => None,
        };
        let support = Support {
            bound: ls.bound.saturating_mul(rs.bound),
            exact: ls.exact.zip(rs.exact).and_then(|(a, b)| a.checked_mul(b)),
            unit: ls.unit && rs.unit,
            boxes,
        };
        Ok(Self::from_parts(FormNode::Product(left, right), signature, support))
    }

    /// Applies the backward shift `B^offset` to the argument at `slot`, which
    /// becomes a vector of dimension `dim`. With `offset = 0` this embeds the
    /// slot into a larger space (extra coordinates are ignored).
    pub fn shift(inner: FormExpr, slot: SlotId, offset: usize, dim: usize) -> Result<Self> {
        let k = inner.slot_position(slot).ok_or(Error::InvalidSlot(slot))?;
        if offset >= dim {
            return Err(Error::InvalidShift { offset, dim });
        }
        let mut signature = inner.0.signature.clone();
        signature[k].1 = dim;

        let mut support = inner.0.support.clone();
        if let Some(b) = &mut support.boxes {
            let (lo, hi) = b[k];
            if hi + offset >= dim {
                // coefficients fall off the end
                support.exact = None;
                support.unit = false;
            }
            b[k] = ((lo + offset).min(dim - 1), (hi + offset).min(dim - 1));
        }
        Ok(Self::from_parts(FormNode::Shift { inner, slot, offset, dim }, signature, support))
    }

    /// [`FormExpr::shift`] with `offset = 0`.
    pub fn embed(inner: FormExpr, slot: SlotId, dim: usize) -> Result<Self> {
        Self::shift(inner, slot, 0, dim)
    }

    /// Same tree with every slot id `s` replaced by `map(s)`.
    pub fn relabel(&self, map: &dyn Fn(SlotId) -> SlotId) -> Result<Self> {
        match self.node() {
            FormNode::Leaf { slots, coeffs } => Self::leaf(slots.iter().map(|&s| map(s)).collect(), coeffs.clone()),
            FormNode::Sum(terms) => {
                let terms = terms.iter().map(|(sg, t)| Ok((*sg, t.relabel(map)?))).collect::<Result<Vec<_>>>()?;
                Self::sum(terms)
            }
            FormNode::Product(a, b) => Self::product(a.relabel(map)?, b.relabel(map)?),
            FormNode::Shift { inner, slot, offset, dim } => Self::shift(inner.relabel(map)?, map(*slot), *offset, *dim),
        }
    }

    pub fn node(&self) -> &FormNode {
        &self.0.node
    }

    /// `(slot, dimension)` pairs sorted by slot.
    pub fn signature(&self) -> &[(SlotId, usize)] {
        &self.0.signature
    }

    /// Number of argument slots.
    pub fn degree(&self) -> usize {
        self.0.signature.len()
    }

    /// Ambient dimensions in slot order.
    pub fn dims(&self) -> Vec<usize> {
        self.0.signature.iter().map(|&(_, n)| n).collect()
    }

    pub fn slot_dim(&self, slot: SlotId) -> Option<usize> {
        self.slot_position(slot).map(|k| self.0.signature[k].1)
    }

    pub fn has_slot(&self, slot: SlotId) -> bool {
        self.slot_position(slot).is_some()
    }

    fn slot_position(&self, slot: SlotId) -> Option<usize> {
        self.0.signature.binary_search_by_key(&slot, |&(s, _)| s).ok()
    }

    /// Exact nonzero coefficient count, known without expansion when the
    /// terms of every sum have provably disjoint supports.
    pub fn analytic_count(&self) -> Option<u128> {
        self.0.support.exact
    }

    /// Upper bound on the number of nonzero coefficients.
    pub fn count_bound(&self) -> u128 {
        self.0.support.bound
    }

    /// True when [`FormExpr::analytic_count`] is known and every coefficient
    /// is ±1.
    pub fn has_unit_coefficients(&self) -> bool {
        self.0.support.exact.is_some() && self.0.support.unit
    }

    fn max_slot(&self) -> Option<SlotId> {
        self.0.signature.last().map(|&(s, _)| s)
    }

    fn check_args<V: AsRef<[f64]>>(&self, args: &[V], skip: Option<SlotId>) -> Result<()> {
        let expected = self.max_slot().map_or(0, |s| s + 1);
        if args.len() != expected {
            return Err(Error::ArityMismatch { expected, found: args.len() });
        }
        for &(slot, n) in &self.0.signature {
            if Some(slot) == skip {
                continue;
            }
            let found = args[slot].as_ref().len();
            if found != n {
                return Err(Error::DimensionMismatch { slot, expected: n, found });
            }
        }
        Ok(())
    }

    /// `T(x^{(1)}, …, x^{(m)})`; `args` is indexed by slot id.
    pub fn evaluate<V: AsRef<[f64]>>(&self, args: &[V]) -> Result<f64> {
        self.check_args(args, None)?;
        let mut views: Vec<View<'_>> = args.iter().map(|a| View::full(a.as_ref())).collect();
        Ok(self.eval_views(&mut views))
    }

    /// The partial linear form at `slot`: `c_i = T(…, e_i at slot, …)`.
    /// The entry of `args` at `slot` is ignored.
    pub fn slot_coefficients<V: AsRef<[f64]>>(&self, args: &[V], slot: SlotId) -> Result<Vec<f64>> {
        let n = self.slot_dim(slot).ok_or(Error::InvalidSlot(slot))?;
        self.check_args(args, Some(slot))?;
        let mut views: Vec<View<'_>> = args.iter().map(|a| View::full(a.as_ref())).collect();
        views[slot] = View::empty();
        let mut out = vec![0.0; n];
        self.accumulate(&mut views, slot, &mut out, 0, n, 1.0);
        Ok(out)
    }

    fn eval_views(&self, views: &mut [View<'_>]) -> f64 {
        match &self.0.node {
            FormNode::Leaf { slots, coeffs } => coeffs
                .raw_iter()
                .map(|(idx, c)| slots.iter().zip(idx).fold(c, |acc, (&s, &j)| acc * views[s].get(j)))
                .sum(),
            FormNode::Sum(terms) => terms.iter().map(|(sg, t)| sg.value() * t.eval_views(views)).sum(),
            FormNode::Product(a, b) => {
                let va = a.eval_views(views);
                if va == 0.0 {
                    0.0
                } else {
                    va * b.eval_views(views)
                }
            }
            FormNode::Shift { inner, slot, offset, .. } => {
                let saved = views[*slot];
                views[*slot] = saved.shifted(*offset);
                let v = inner.eval_views(views);
                views[*slot] = saved;
                v
            }
        }
    }

    // out[start + i] += scale * c_i for i < limit
    fn accumulate(
        &self,
        views: &mut [View<'_>],
        slot: SlotId,
        out: &mut [f64],
        start: usize,
        limit: usize,
        scale: f64,
    ) {
        if limit == 0 || scale == 0.0 {
            return;
        }
        match &self.0.node {
            FormNode::Leaf { slots, coeffs } => {
                let Some(k) = slots.iter().position(|&s| s == slot) else { return };
                for (idx, c) in coeffs.raw_iter() {
                    let j = idx[k];
                    if j >= limit {
                        continue;
                    }
                    let mut prod = scale * c;
                    for (a, (&s, &i)) in slots.iter().zip(idx).enumerate() {
                        if a != k {
                            prod *= views[s].get(i);
                        }
                    }
                    out[start + j] += prod;
                }
            }
            FormNode::Sum(terms) => {
                for (sg, t) in terms {
                    t.accumulate(views, slot, out, start, limit, scale * sg.value());
                }
            }
            FormNode::Product(a, b) => {
                let (with, without) = if a.has_slot(slot) { (a, b) } else { (b, a) };
                let s = without.eval_views(views);
                with.accumulate(views, slot, out, start, limit, scale * s);
            }
            FormNode::Shift { inner, slot: s, offset, .. } => {
                if *s == slot {
                    inner.accumulate(views, slot, out, start + offset, limit.saturating_sub(*offset), scale);
                } else {
                    let saved = views[*s];
                    views[*s] = saved.shifted(*offset);
                    inner.accumulate(views, slot, out, start, limit, scale);
                    views[*s] = saved;
                }
            }
        }
    }

    /// Materializes the coefficient tensor (axes in slot order).
    ///
    /// Fails with [`Error::TooLarge`] when the coefficient count bound
    /// exceeds `limit`.
    pub fn expand_coeffs(&self, limit: u128) -> Result<CoeffTensor> {
        let count = self.count_bound();
        if count > limit {
            return Err(Error::TooLarge { count, limit });
        }
        let raw = self.expand_raw();
        Ok(CoeffTensor::from_raw(self.dims(), raw.indices, raw.values))
    }

    fn expand_raw(&self) -> Raw {
        let m = self.degree();
        match &self.0.node {
            FormNode::Leaf { slots, coeffs } => {
                // leaf axis feeding each signature position
                let axis: Vec<usize> = self
                    .0
                    .signature
                    .iter()
                    .map(|(s, _)| slots.iter().position(|x| x == s).expect("slot present"))
                    .collect();
                let mut raw = Raw::with_capacity(m, coeffs.nnz());
                for (idx, c) in coeffs.raw_iter() {
                    raw.indices.extend(axis.iter().map(|&a| idx[a]));
                    raw.values.push(c);
                }
                raw
            }
            FormNode::Sum(terms) => {
                let mut raw = Raw::with_capacity(m, 0);
                for (sg, t) in terms {
                    let part = t.expand_raw();
                    raw.indices.extend_from_slice(&part.indices);
                    raw.values.extend(part.values.iter().map(|c| sg.value() * c));
                }
                raw
            }
            FormNode::Product(a, b) => {
                let (ra, rb) = (a.expand_raw(), b.expand_raw());
                let (ma, mb) = (a.degree(), b.degree());
                // (from left?, position within factor) per signature slot
                let source: Vec<(bool, usize)> = self
                    .0
                    .signature
                    .iter()
                    .map(|(s, _)| match a.slot_position(*s) {
                        Some(k) => (true, k),
                        None => (false, b.slot_position(*s).expect("slot present")),
                    })
                    .collect();
                let mut raw = Raw::with_capacity(m, ra.values.len() * rb.values.len());
                for (ia, &ca) in ra.indices.chunks_exact(ma.max(1)).zip(&ra.values) {
                    for (ib, &cb) in rb.indices.chunks_exact(mb.max(1)).zip(&rb.values) {
                        raw.indices.extend(source.iter().map(|&(left, k)| if left { ia[k] } else { ib[k] }));
                        raw.values.push(ca * cb);
                    }
                }
                raw
            }
            FormNode::Shift { inner, slot, offset, dim } => {
                let part = inner.expand_raw();
                let k = self.slot_position(*slot).expect("slot present");
                let mut raw = Raw::with_capacity(m, part.values.len());
                for (idx, &c) in part.indices.chunks_exact(m).zip(&part.values) {
                    if idx[k] + offset < *dim {
                        raw.indices.extend(idx.iter().enumerate().map(|(a, &j)| if a == k { j + offset } else { j }));
                        raw.values.push(c);
                    }
                }
                raw
            }
        }
    }
}

fn boxes_disjoint(a: &Option<Vec<(usize, usize)>>, b: &Option<Vec<(usize, usize)>>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => a.iter().zip(b).any(|(x, y)| x.1 < y.0 || y.1 < x.0),
        _ => true,
    }
}

struct Raw {
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl Raw {
    fn with_capacity(m: usize, n: usize) -> Self {
        Raw { indices: Vec::with_capacity(m * n), values: Vec::with_capacity(n) }
    }
}

// Window onto an argument vector: get(i) = data[start + i] for i < limit, else 0.
#[derive(Clone, Copy)]
struct View<'a> {
    data: &'a [f64],
    start: usize,
    limit: usize,
}

impl<'a> View<'a> {
    fn full(data: &'a [f64]) -> Self {
        View { data, start: 0, limit: data.len() }
    }

    fn empty() -> Self {
        View { data: &[], start: 0, limit: 0 }
    }

    #[inline]
    fn get(&self, i: usize) -> f64 {
        if i < self.limit {
            self.data[self.start + i]
        } else {
            0.0
        }
    }

    fn shifted(self, d: usize) -> Self {
        View { data: self.data, start: self.start + d, limit: self.limit.saturating_sub(d) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vector_leaf(slot: SlotId, coeffs: &[f64]) -> FormExpr {
        let entries = coeffs.iter().enumerate().map(|(i, &c)| (vec![i + 1], c));
        FormExpr::leaf(vec![slot], CoeffTensor::new(vec![coeffs.len()], entries).unwrap()).unwrap()
    }

    #[test]
    fn product_rejects_shared_slots() {
        let a = vector_leaf(0, &[1.0, 2.0]);
        let b = vector_leaf(0, &[1.0]);
        assert!(matches!(FormExpr::product(a, b), Err(Error::OverlappingSlots(0))));
    }

    #[test]
    fn sum_rejects_mismatched_signatures() {
        let a = vector_leaf(0, &[1.0, 2.0]);
        let b = vector_leaf(0, &[1.0, 2.0, 3.0]);
        let c = vector_leaf(1, &[1.0, 2.0]);
        assert_eq!(
            FormExpr::sum(vec![(Sign::Plus, a.clone()), (Sign::Minus, b)]).unwrap_err(),
            Error::SignatureMismatch
        );
        assert_eq!(FormExpr::sum(vec![(Sign::Plus, a), (Sign::Minus, c)]).unwrap_err(), Error::SignatureMismatch);
    }

    #[test]
    fn shift_validation() {
        let a = vector_leaf(0, &[1.0, 2.0]);
        assert!(matches!(FormExpr::shift(a.clone(), 0, 4, 4), Err(Error::InvalidShift { .. })));
        assert!(matches!(FormExpr::shift(a, 3, 0, 4), Err(Error::InvalidSlot(3))));
    }

    #[test]
    fn shift_reads_shifted_coordinates_with_zero_padding() {
        // f(x) = x_1 + 10 x_2 + 100 x_3
        let f = vector_leaf(0, &[1.0, 10.0, 100.0]);
        let g = FormExpr::shift(f.clone(), 0, 2, 4).unwrap();
        // B^2 (a,b,c,d) = (c,d,0)
        assert_eq!(g.evaluate(&[[1.0, 2.0, 3.0, 4.0]]).unwrap(), 3.0 + 40.0);
        assert_eq!(g.slot_coefficients(&[[0.0; 0]], 0).unwrap(), vec![0.0, 0.0, 1.0, 10.0]);
        // the third coefficient is pushed past the end
        assert_eq!(g.analytic_count(), None);
        assert_eq!(g.expand_coeffs(DEFAULT_EXPAND_LIMIT).unwrap().nnz(), 2);
        let e = FormExpr::embed(f, 0, 5).unwrap();
        assert_eq!(e.evaluate(&[[1.0, 1.0, 1.0, 7.0, 7.0]]).unwrap(), 111.0);
        assert_eq!(e.analytic_count(), Some(3));
    }

    #[test]
    fn arity_and_dimension_errors() {
        let f = vector_leaf(0, &[1.0, 1.0]);
        assert!(matches!(f.evaluate(&[[1.0]]), Err(Error::DimensionMismatch { slot: 0, expected: 2, found: 1 })));
        assert!(matches!(f.evaluate::<[f64; 2]>(&[]), Err(Error::ArityMismatch { .. })));
        assert!(matches!(f.slot_coefficients(&[[1.0, 1.0]], 1), Err(Error::InvalidSlot(1))));
    }

    #[test]
    fn overlapping_sum_has_no_exact_count() {
        let a = vector_leaf(0, &[1.0, 1.0]);
        let s = FormExpr::sum(vec![(Sign::Plus, a.clone()), (Sign::Plus, a)]).unwrap();
        assert_eq!(s.analytic_count(), None);
        assert_eq!(s.count_bound(), 4);
        assert_eq!(s.expand_coeffs(10).unwrap().values(), &[2.0, 2.0]);
        assert!(matches!(s.expand_coeffs(3), Err(Error::TooLarge { count: 4, limit: 3 })));
    }
}
