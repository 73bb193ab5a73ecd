//! Monte Carlo samplers, policy simulators and goodness-of-fit tests.
//!
//! Everything here is built from the point process itself or from the
//! elementary exponential and uniform variables of the chain kernels, so it
//! serves as an oracle that is independent of the closed forms.

pub mod chains;
pub mod policy;
pub mod ppp;
pub mod runner;
pub mod stats;

pub use chains::{
    corange_step, p_step, q_step, sample_corange_chain, sample_eu, sample_eu_path, sample_p_chain,
    sample_q_chain, split_exponential_sample, ChainKind, ChainPath,
};
pub use policy::{
    decompose_p1, estimate_policy, run_horver_square, run_policy, Decomposition, HorVerOutcome,
    PolicyOutcome, Problem,
};
pub use ppp::{
    extract_records, extract_records_cut, sample_ppp, sample_ppp_rect, Atom, RecordSequence, Rect,
};
pub use runner::{trial_rng, MCEstimate, Moments, MonteCarlo, TrialRng, BLOCK};
pub use stats::{chi2_gof, ks_one_sample, ks_two_sample, Chi2Result, KsResult};
