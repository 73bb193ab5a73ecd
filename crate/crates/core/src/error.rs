use thiserror::Error;

/// Errors raised by the numerical routines and samplers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("overflow in {op}: |{arg}| exceeds magnitude cap {cap}")]
    Overflow {
        op: &'static str,
        arg: f64,
        cap: f64,
    },

    #[error("precision failure in {op}: error bound {bound:e} above tolerance {tolerance:e}")]
    Precision {
        op: &'static str,
        bound: f64,
        tolerance: f64,
    },

    #[error("index ({k}, {j}) outside table bound {max}")]
    Index { k: usize, j: usize, max: usize },

    #[error("root bracket [{lo}, {hi}] has no sign change")]
    Bracket { lo: f64, hi: f64 },

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        op,
        detail: detail.into(),
    }
}
