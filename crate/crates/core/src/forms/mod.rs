//! Multilinear forms as expression trees.
//!
//! A [`FormExpr`] is built from sparse leaves, signed sums, products over
//! disjoint slot sets and backward shifts of single arguments. Evaluation
//! and partial contraction recurse over the tree and never expand the
//! coefficient tensor, so forms with ~2^30 coefficients stay cheap.

mod coeff;
mod expr;
mod families;

pub use coeff::CoeffTensor;
pub use expr::{FormExpr, FormNode, Sign, SlotId, DEFAULT_EXPAND_LIMIT};
pub use families::{make_littlewood, make_tilde};
