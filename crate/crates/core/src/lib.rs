//! Higher-order dual numbers (jets) with the umbral truncation rule.
//!
//! A jet of order `k` is a truncated power series `c_0 + c_1 ε + … + c_k ε^k`
//! in a nilpotent unit with `ε^{k+1} = 0`. Evaluating an analytic function on
//! `x + ε` yields every Taylor coefficient up to order `k` at once, and
//! projecting a jet with [`Jet::dneq`] (drop powers above `k`, then set
//! `ε = 1`) turns closed forms in a dual parameter `a + εb` into finite sums.
//!
//! The crate is organized as:
//!
//! * [`jet`] – coefficient-vector arithmetic, analytic lifting, projection.
//! * [`matrix`] – shift-matrix realization of `ε` and the evaluation bracket.
//! * [`specfun`] – truncated exponentials, two-variable Hermite polynomials,
//!   Gaussian-derivative identities, the Gamma function.
//! * [`umbral`] – closed forms of dual-parameter Gaussian and rational integrals.
//! * [`evolution`] – heat, Schrödinger and advection-type closed-form solutions.
//! * [`oracles`] – finite differences, adaptive Simpson quadrature, heat-kernel
//!   convolution; independent ground truth for everything above.
//! * [`expr`] – a small expression language evaluable over scalars and jets.
//! * [`verify`] – the invariant suite behind `dualjet verify`.
//! * [`cli`] – the command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
mod error;
pub mod evolution;
pub mod expr;
pub mod jet;
pub mod matrix;
pub mod oracles;
pub mod scalar;
pub mod specfun;
pub mod umbral;
pub mod verify;

pub use error::{Error, Result};
pub use jet::{DerivativeSource, Elementary, Jet};
pub use scalar::{Ring, Scalar, ScalarKind};
