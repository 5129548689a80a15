//! Exact decompositions of products of commuting polynomial operators.
//!
//! Given a factored operator `P = P_0 P_1 ... P_l`, where each factor is a
//! polynomial in commuting endomorphisms `D_1, ..., D_k`, this crate finds
//! and certifies identities of the form
//!
//! ```text
//! 1 = Σ_{J ∈ α} Q_J · Π_{i ∉ J} P_i        (α-decomposition)
//! 1 = Σ_{j ∈ J} Q_{J,j} · P_j,  J ∈ β      (dual β-decomposition)
//! ```
//!
//! and uses them to split `P u = f` into lower-order subproblems. Every
//! identity is an exact polynomial identity over the rationals; the
//! [`backend`] module realizes the operators as exact rational matrices so the
//! consequences can be checked by brute force.
//!
//! Module map:
//!
//! - [`poly`]: sparse polynomials, monomial orders, division, parsing.
//! - [`groebner`]: Buchberger's algorithm with cofactor tracking.
//! - [`planner`]: set systems on `2^L`, factor regrouping, optimal `β` and `α`.
//! - [`certify`]: certificate construction, conversion and verification.
//! - [`backend`]: matrices, kernels, affine solves, operator instances.
//! - [`reducer`]: the split/recombine maps and the constrained-system variant.
//! - [`symmetry`]: formal and generalized symmetries on matrix instances.

pub mod backend;
pub mod certify;
pub mod error;
pub mod groebner;
pub mod planner;
pub mod poly;
pub mod reducer;
pub mod symmetry;

pub use error::{Error, ErrorKind, Result};
pub use poly::{Monomial, MonomialOrder, Polynomial, Rational, Variables};

/// Default per-polynomial term cap for Gröbner and certificate expansion work.
pub const DEFAULT_TERM_CAP: usize = 100_000;
