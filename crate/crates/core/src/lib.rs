//! Numerical toolkit for complex symmetric operators.
//!
//! The core is the antilinear eigenproblem `(T - z) u = λ C u`, whose positive
//! solutions are the singular values of `T - z` and give resolvent norms as
//! `1 / min λ`. On top of it sit two applications: exponential decay bounds
//! for gapped one-dimensional Schrödinger operators (with the Kronig-Penney
//! comb as the worked example) and resolvent norms near resonances uncovered
//! by complex scaling.
//!
//! The guide in `book/` walks through each part with runnable snippets.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod antilinear;
pub mod cli;
pub mod decay;
pub mod error;
pub mod kronig_penney;
pub mod linalg;
pub mod random;
pub mod scaling;
pub mod schrodinger;

pub use error::{Error, Result};
pub use linalg::c64;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/antilinear.md")]
    mod antilinear {}
    #[doc = include_str!("../../../book/src/schrodinger.md")]
    mod schrodinger {}
    #[doc = include_str!("../../../book/src/decay.md")]
    mod decay {}
    #[doc = include_str!("../../../book/src/kronig_penney.md")]
    mod kronig_penney {}
    #[doc = include_str!("../../../book/src/complex_scaling.md")]
    mod complex_scaling {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
