//! Computational laboratory for orbit equidistribution statistics.
//!
//! The crate implements exact ball averages for free-group and lattice
//! actions on concrete metric measure spaces, together with the limit
//! operators those averages converge to, empirical error series, uniform
//! rate predictors, coarse-monotonicity audits, ratio statistics and
//! empirical limit densities for infinite-measure actions.
//!
//! Group averages are always exact enumerations (no sampling of the
//! group); only integrals over the space are computed by deterministic
//! low-discrepancy quadrature. Brute-force reference implementations for
//! the enumeration-heavy paths live in [`oracle`] and are run by tests
//! and the `oracle` CLI subcommand, never by experiments.

pub mod error;
pub mod ergodic;
pub mod freegroup;
pub mod holder;
pub mod matgroup;
pub mod oracle;
pub mod sampler;
pub mod spaces;

pub use error::{Error, Result};
