//! Explicit multilinear form families, coefficient norms, and lower bounds
//! for Hardy–Littlewood and Bohnenblust–Hille constants.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, caching and
//! the command-line harness live in the `hlb` crate.
//!
//! Exponents `p` are plain `f64` values; `f64::INFINITY` stands for `p = ∞`.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod bounds;
mod error;
pub mod forms;
pub mod lp;
pub mod norms;
pub mod optimizer;
pub mod polynomials;

pub use error::{Error, Result};
pub use forms::{CoeffTensor, FormExpr, Sign, SlotId};
pub use norms::ExponentVector;
pub use optimizer::{OptimizeConfig, OptimizeResult};
