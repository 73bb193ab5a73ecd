//! Best-choice problems on the planar homogeneous Poisson process.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: exponential integrals `J`, `I`, `I₂` and Stirling tables.
//! * [`recordlaw`]: record-count laws for the box-area (P) and vertical-cut
//!   (Q) chains, threshold-policy counts, and marginal laws of the reversed
//!   box-area sequences.
//! * [`optstop`]: optimal thresholds and value functions for the
//!   full-information, vertical-cut, horizontal-cut and duration problems.
//! * [`simulate`]: Monte Carlo samplers, policy simulators and goodness-of-fit
//!   tests used as independent oracles.
//! * [`verify`]: named checks covering the distributional identities.

// Guards written as `!(x > 0.0)` also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod optstop;
pub mod quad;
pub mod recordlaw;
pub mod roots;
pub mod simulate;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
