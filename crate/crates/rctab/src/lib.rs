//! Contingency tables with fixed margins: exact counting, uniform sampling,
//! and distributional analysis at desk scale.
//!
//! A contingency table is a non-negative integer matrix whose row and column
//! sums match prescribed margin vectors. This crate provides:
//!
//! - exact enumeration and arbitrary-precision counting of table classes
//!   ([`counting`]), including generating-function coefficients for bounded
//!   compositions and closed-form asymptotic estimates;
//! - the maximum-entropy "typical table" of a margin pair, solved as a
//!   strictly concave program over the transportation polytope ([`entropy`]),
//!   together with the entropy upper bound on the count and the matrix of
//!   independent geometric laws it induces;
//! - two uniform samplers over the table class: exact rejection sampling from
//!   the geometric model, and a margin-preserving swap-move Markov chain for
//!   instances where rejection is hopeless ([`sampling`]);
//! - statistics connecting uniform random tables to their independent-entry
//!   limits: marginal and block laws in total variation, mixed moments,
//!   the maximum entry against iid extreme-value bounds, and the empirical
//!   singular spectrum against its semicircle-type limit ([`stats`]);
//! - a reproducible experiment runner ([`cli`]) behind the `rctab` binary.
//!
//! Everything downstream of a [`Seed`] is deterministic: the same seed and
//! the same call produce bit-identical results.
//!
//! The `examples/` directory has one runnable program per capability; start
//! with `cargo run --example count_and_bounds`.

pub mod cli;
pub mod counting;
pub mod entropy;
mod error;
pub mod sampling;
mod seed;
pub mod stats;
pub mod table;

pub use error::{Error, Result};
pub use seed::Seed;
pub use table::{Margins, SwapMove, Table, UniformMargins};
