//! Box-area Markov chains and their exponential–uniform representations.

use rand::Rng;
use rand_distr::{Exp1, Open01};

use crate::error::{domain, Result};
use crate::recordlaw::{EuKind, ProcessKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainKind {
    P,
    Q,
    Corange,
}

impl From<ProcessKind> for ChainKind {
    fn from(k: ProcessKind) -> Self {
        match k {
            ProcessKind::P => ChainKind::P,
            ProcessKind::Q => ChainKind::Q,
        }
    }
}

/// States visited after `start`, strictly decreasing, ending at the
/// absorbing state 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainPath {
    pub kind: ChainKind,
    pub start: f64,
    pub states: Vec<f64>,
}

impl ChainPath {
    /// Number of positive states in `]0, s]`.
    pub fn visits_below(&self, s: f64) -> usize {
        self.states.iter().filter(|&&x| x > 0.0 && x <= s).count()
    }

    /// First state after the start (0 on immediate absorption).
    pub fn first(&self) -> f64 {
        self.states[0]
    }
}

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Exp1)
}

fn unif<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

/// One P-chain step `t → (t − E)₊ U`.
pub fn p_step<R: Rng + ?Sized>(t: f64, rng: &mut R) -> f64 {
    let rest = t - exp1(rng);
    if rest <= 0.0 {
        0.0
    } else {
        rest * unif(rng)
    }
}

/// One Q-chain step `t → (t − E) U₁ 1{E < t U₂}`.
pub fn q_step<R: Rng + ?Sized>(t: f64, rng: &mut R) -> f64 {
    let e = exp1(rng);
    let u1 = unif(rng);
    let u2 = unif(rng);
    if e < t * u2 {
        (t - e) * u1
    } else {
        0.0
    }
}

/// One recorded corange step: lower-record decrements `c → (c − E)₊ max(U₁, U₂)`
/// repeat until an upper record (probability 1/2 per step) or absorption.
pub fn corange_step<R: Rng + ?Sized>(t: f64, rng: &mut R) -> f64 {
    let mut c = t;
    loop {
        let rest = c - exp1(rng);
        if rest <= 0.0 {
            return 0.0;
        }
        c = rest * unif(rng).max(unif(rng));
        if rng.random::<bool>() {
            return c;
        }
    }
}

fn sample_chain<R: Rng + ?Sized>(kind: ChainKind, t: f64, rng: &mut R) -> Result<ChainPath> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain(
            "sample_chain",
            format!("start must be positive and finite, got {t}"),
        ));
    }
    let step = match kind {
        ChainKind::P => p_step::<R>,
        ChainKind::Q => q_step::<R>,
        ChainKind::Corange => corange_step::<R>,
    };
    let mut states = Vec::new();
    let mut x = t;
    while x > 0.0 {
        x = step(x, rng);
        states.push(x);
    }
    Ok(ChainPath {
        kind,
        start: t,
        states,
    })
}

pub fn sample_p_chain<R: Rng + ?Sized>(t: f64, rng: &mut R) -> Result<ChainPath> {
    sample_chain(ChainKind::P, t, rng)
}

pub fn sample_q_chain<R: Rng + ?Sized>(t: f64, rng: &mut R) -> Result<ChainPath> {
    sample_chain(ChainKind::Q, t, rng)
}

/// Corange-box areas recorded at upper records only.
pub fn sample_corange_chain<R: Rng + ?Sized>(t: f64, rng: &mut R) -> Result<ChainPath> {
    sample_chain(ChainKind::Corange, t, rng)
}

/// Joint draw of the first `k` members of a reversed box-area sequence.
///
/// * `A_k = (E₁ + E₂/U₁ + … + E_k/(U₁⋯U_{k−1}))(1 − U₁⋯U_k)`
/// * `B_k = (E₁/U + E₂/(U U₁) + … )(1 − U U₁⋯U_k)`
/// * `C_k = (E₁ + E₂/U₁ + … + E_{k+1}/(U₁⋯U_k))(1 − U₁⋯U_k)`
pub fn sample_eu_path<R: Rng + ?Sized>(kind: EuKind, k: usize, rng: &mut R) -> Result<Vec<f64>> {
    if k < 1 {
        return Err(domain("sample_eu", "index k must be at least 1"));
    }
    let mut out = Vec::with_capacity(k);
    let mut walker = EuWalker::new(kind, rng);
    for _ in 0..k {
        out.push(walker.next_area(rng));
    }
    Ok(out)
}

/// A single `X_k` from [`sample_eu_path`].
pub fn sample_eu<R: Rng + ?Sized>(kind: EuKind, k: usize, rng: &mut R) -> Result<f64> {
    Ok(*sample_eu_path(kind, k, rng)?.last().expect("k ≥ 1"))
}

/// Generates a reversed box-area sequence one member at a time. For `A` and
/// `B` the walker also tracks the record itself: depth `|y_k|` below the top
/// and horizontal position `x_k`.
pub(crate) struct EuWalker {
    kind: EuKind,
    depth: f64,
    /// Product of the uniforms so far.
    prod: f64,
    started: bool,
}

impl EuWalker {
    pub(crate) fn new<R: Rng + ?Sized>(kind: EuKind, rng: &mut R) -> Self {
        let prod = match kind {
            EuKind::B => unif(rng),
            EuKind::A | EuKind::C => 1.0,
        };
        Self {
            kind,
            depth: 0.0,
            prod,
            started: false,
        }
    }

    /// Advances to the next member and returns it.
    pub(crate) fn next_area<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        match self.kind {
            EuKind::A | EuKind::B => {
                self.depth += exp1(rng) / self.prod;
                self.prod *= unif(rng);
            }
            EuKind::C => {
                if !self.started {
                    self.depth += exp1(rng);
                }
                self.prod *= unif(rng);
                self.depth += exp1(rng) / self.prod;
            }
        }
        self.started = true;
        self.depth * (1.0 - self.prod)
    }

    /// Horizontal position of the current record.
    pub(crate) fn x(&self) -> f64 {
        self.prod
    }
}

/// `E₁/u₁ + E₂/(u₁u₂) 1{V > u₂}`, equal in law to `E/(u₁u₂)`.
pub fn split_exponential_sample<R: Rng + ?Sized>(u1: f64, u2: f64, rng: &mut R) -> f64 {
    let e1 = exp1(rng);
    let e2 = exp1(rng);
    let v: f64 = rng.random();
    e1 / u1 + if v > u2 { e2 / (u1 * u2) } else { 0.0 }
}
