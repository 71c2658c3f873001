//! Revenue-optimal single-item auctions and their sample complexity.
//!
//! The crate provides:
//!
//! - [`distributions`]: closed-form valuation distributions (the α-strongly
//!   regular base family and its truncations) with exact quantile-space
//!   accessors and virtual valuations.
//! - [`myerson`]: revenue curves, ironing via least concave upper bounds,
//!   the optimal auction for known distributions, and deterministic Monte
//!   Carlo estimators for revenue and virtual welfare.
//! - [`empirical`]: the m-sample empirical Myerson auction learned from
//!   per-bidder valuation samples, plus the quantile-sandwich verifier.
//! - [`adversarial`]: randomized truncated instances, event-E detection,
//!   the Bayes guessing bound, and closed-form revenue-gap formulas.
//! - [`experiments`]: reproducible sweep and verification harnesses with
//!   CSV/JSON reporting.
//!
//! All Monte Carlo entry points take an explicit `u64` seed and produce
//! bit-identical results for a fixed seed, independent of the worker count
//! configured through [`parallel::set_threads`].

pub mod adversarial;
pub mod distributions;
pub mod empirical;
mod error;
pub mod experiments;
pub mod myerson;
pub mod parallel;
pub mod rng;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
