//! Record-count distributions and transition laws of the box-area chains.
//!
//! Two chains live here. The P-chain is the sequence of box areas of
//! successive records in a rectangle of area `t`, with one-step kernel
//! `t → (t − E)₊ U`. The Q-chain keeps only records to the left of a uniform
//! vertical cut, with kernel `t → (t − E) U₁ 1{E < t U₂}`.
//!
//! Counts:
//!
//! * `p_j(t) = e^{−t} Σ_{k≥j} (t^k/k!) σ₁(k,j)/k!`: exactly `j` records.
//! * `q_j(t) = e^{−t} Σ_{k≥0} t^k/(k+1)! Σ_{i≤k} σ₁(i,j)/i!`: exactly `j`
//!   records left of the cut.
//!
//! Both are `e^{−t}` times a power series with nonnegative coefficients, so
//! every integral of the form `∫₀ˢ e^ξ ξ^m p_j(ξ) dξ` is evaluated term by term.
//! Truncation at the table bound is certified by the Poisson tail of the atom
//! count, since a rectangle never holds more records than atoms.

use std::sync::OnceLock;

use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Error, Result};
use crate::specfun::{
    self, e1_scaled, i2_integral, i_integral, i_integral_scaled, j_integral, j_scaled,
    stirling_table, StirlingKind, StirlingTable, EULER_GAMMA,
};

/// Truncation tolerance for every count series.
pub const SERIES_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcessKind {
    /// Box areas of all records (full-information scan).
    P,
    /// Box areas of records left of a uniform vertical cut.
    Q,
}

/// Reversed box-area sequences with an explicit exponential–uniform
/// construction. `C` (corange-box areas) has the same law as `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EuKind {
    A,
    B,
    C,
}

/// `probs[j]` for `j ≤ J`; `tail_bound` bounds the mass beyond `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountDistribution {
    pub kind: ProcessKind,
    pub area: f64,
    pub probs: Vec<f64>,
    pub tail_bound: f64,
}

impl CountDistribution {
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// One-step law of a chain started at `state`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionLaw {
    pub kind: ProcessKind,
    pub state: f64,
}

impl TransitionLaw {
    pub fn new(kind: ProcessKind, state: f64) -> Result<Self> {
        if !(state > 0.0) || !state.is_finite() {
            return Err(domain(
                "TransitionLaw",
                format!("state must be positive and finite, got {state}"),
            ));
        }
        Ok(Self { kind, state })
    }

    /// Mass at the absorbing state 0.
    pub fn absorption(&self) -> f64 {
        match self.kind {
            ProcessKind::P => (-self.state).exp(),
            ProcessKind::Q => q0(self.state),
        }
    }

    /// Mass of `[s, t]`.
    pub fn mass_above(&self, s: f64) -> Result<f64> {
        match self.kind {
            ProcessKind::P => p_transition(self.state, s),
            ProcessKind::Q => q_transition_upper(self.state, s),
        }
    }

    /// Mass of `]0, s]`.
    pub fn mass_below(&self, s: f64) -> Result<f64> {
        match self.kind {
            ProcessKind::P => p_transition_lower(self.state, s),
            ProcessKind::Q => q_transition(self.state, s),
        }
    }
}

// ---------------------------------------------------------------------------
// Series tables
// ---------------------------------------------------------------------------

/// Number of terms kept in every count series.
pub const SERIES_TERMS: usize = 160;

/// Bounded coefficients against the weights `w_i = t^i / i!`:
/// `e^t p_j(t) = Σ_i r[i][j] w_i` with `r = σ₁(i,j)/i!`, and
/// `e^t q_j(t) = Σ_k c[k][j] w_k` with `c = (Σ_{i≤k} σ₁(i,j)/i!)/(k+1)`.
struct SeriesTables {
    r: Vec<Vec<f64>>,
    c: Vec<Vec<f64>>,
}

fn tables() -> &'static SeriesTables {
    static TABLES: OnceLock<SeriesTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let n = SERIES_TERMS;
        let first = StirlingTable::new(StirlingKind::FirstSignless, n);
        let mut r = vec![vec![0.0; n + 1]; n + 1];
        let mut c = vec![vec![0.0; n + 1]; n + 1];
        let mut cumulative = vec![0.0; n + 1];
        for i in 0..=n {
            for j in 0..=i {
                r[i][j] = first.scaled(i, j).expect("within table");
                cumulative[j] += r[i][j];
            }
            for j in 0..=n {
                c[i][j] = cumulative[j] / (i + 1) as f64;
            }
        }
        SeriesTables { r, c }
    })
}

/// Upper bound on `P(N > k)` for `N ~ Poisson(t)`; infinite when the
/// geometric bound does not apply.
pub fn poisson_tail(t: f64, k: usize) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let m = (k + 1) as f64;
    if t >= m + 1.0 {
        return f64::INFINITY;
    }
    let log_term = -t + m * t.ln() - ln_gamma(m + 1.0);
    log_term.exp() / (1.0 - t / (m + 1.0))
}

/// Bound on `Σ_{n > SERIES_TERMS + shift} |t|^n / n!`.
fn exp_tail(t: f64, shift: usize) -> f64 {
    t.abs().exp() * poisson_tail(t.abs(), SERIES_TERMS + shift)
}

fn check_tail(op: &'static str, tail: f64) -> Result<()> {
    if tail <= SERIES_TOLERANCE {
        Ok(())
    } else {
        Err(Error::Precision {
            op,
            bound: tail,
            tolerance: SERIES_TOLERANCE,
        })
    }
}

fn check_index(j: usize) -> Result<()> {
    if j > SERIES_TERMS {
        Err(Error::Index {
            k: j,
            j,
            max: SERIES_TERMS,
        })
    } else {
        Ok(())
    }
}

/// `Σ_{i=start}^{SERIES_TERMS} coef(i) · t^{i+offset}/(i+offset)!`.
fn weighted_sum(coef: impl Fn(usize) -> f64, t: f64, start: usize, offset: usize) -> f64 {
    let mut w = 1.0;
    for n in 1..=start + offset {
        w *= t / n as f64;
    }
    let mut sum = 0.0;
    for i in start..=SERIES_TERMS {
        sum += coef(i) * w;
        w *= t / (i + offset + 1) as f64;
    }
    sum
}

fn exp_p_series(t: f64, j: usize) -> f64 {
    let r = &tables().r;
    weighted_sum(|i| r[i][j], t, j, 0)
}

fn exp_q_series(t: f64, j: usize) -> f64 {
    let c = &tables().c;
    weighted_sum(|i| c[i][j], t, j, 0)
}

/// `∫₀ˢ e^ξ p_j(ξ) dξ` by series.
fn p_integral_series(s: f64, j: usize) -> f64 {
    let r = &tables().r;
    weighted_sum(|i| r[i][j], s, j, 1)
}

/// `∫₀ˢ ξ e^ξ q_j(ξ) dξ` by series.
fn q_integral_series(s: f64, j: usize) -> f64 {
    let c = &tables().c;
    weighted_sum(|i| c[i][j] * (i + 1) as f64, s, j, 2)
}

// ---------------------------------------------------------------------------
// Counts
// ---------------------------------------------------------------------------

fn q0(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        -(-t).exp_m1() / t
    }
}

/// `−J(−t)` for `t ≥ 0`, without the magnitude cap on `J`.
fn neg_j_neg(t: f64) -> Result<f64> {
    if t <= 1.0 {
        Ok(-j_integral(-t)?.value)
    } else {
        Ok(specfun::e1(t)?.value + EULER_GAMMA + t.ln())
    }
}

fn check_area(op: &'static str, t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain(
            op,
            format!("area must be finite and nonnegative, got {t}"),
        ))
    }
}

/// `p_j(t)` straight from the Stirling series (any `j`, moderate `t`).
pub fn p_count_series(t: f64, j: usize) -> Result<f64> {
    check_area("p_count", t)?;
    check_index(j)?;
    check_tail("p_count", poisson_tail(t, SERIES_TERMS))?;
    Ok((-t).exp() * exp_p_series(t, j))
}

/// Probability of exactly `j` records in a rectangle of area `t`.
pub fn p_count(t: f64, j: usize) -> Result<f64> {
    check_area("p_count", t)?;
    if t == 0.0 {
        return Ok(if j == 0 { 1.0 } else { 0.0 });
    }
    match j {
        0 => Ok((-t).exp()),
        1 => Ok(j_scaled(t)),
        _ => p_count_series(t, j),
    }
}

/// The entire function `p_j` at any real argument (negative values included),
/// from the power series of `e^t p_j(t)`.
pub fn p_count_entire(t: f64, j: usize) -> Result<f64> {
    check_index(j)?;
    check_tail("p_count_entire", exp_tail(t, 0) * (-t).exp())?;
    Ok((-t).exp() * exp_p_series(t, j))
}

/// `q_j(t)` straight from its series.
pub fn q_count_series(t: f64, j: usize) -> Result<f64> {
    check_area("q_count", t)?;
    check_index(j)?;
    check_tail("q_count", poisson_tail(t, SERIES_TERMS))?;
    if t == 0.0 {
        return Ok(if j == 0 { 1.0 } else { 0.0 });
    }
    Ok((-t).exp() * exp_q_series(t, j))
}

/// Probability of exactly `j` records left of a uniform vertical cut.
pub fn q_count(t: f64, j: usize) -> Result<f64> {
    check_area("q_count", t)?;
    if t == 0.0 {
        return Ok(if j == 0 { 1.0 } else { 0.0 });
    }
    match j {
        0 => Ok(q0(t)),
        1 if t < 1e-3 => q_count_series(t, 1),
        1 => Ok((neg_j_neg(t)? - j_scaled(t)) / t),
        _ => q_count_series(t, j),
    }
}

fn distribution(kind: ProcessKind, t: f64) -> Result<CountDistribution> {
    check_area("distribution", t)?;
    let mut last = 0;
    while last < SERIES_TERMS && poisson_tail(t, last) > 1e-14 {
        last += 1;
    }
    let tail_bound = poisson_tail(t, last);
    check_tail("distribution", tail_bound)?;
    let probs = (0..=last)
        .map(|j| match kind {
            ProcessKind::P => p_count(t, j),
            ProcessKind::Q => q_count(t, j),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CountDistribution {
        kind,
        area: t,
        probs,
        tail_bound,
    })
}

/// `{p_j(t)}` truncated where the remaining mass is below `1e-14`.
pub fn p_distribution(t: f64) -> Result<CountDistribution> {
    distribution(ProcessKind::P, t)
}

/// `{q_j(t)}` truncated where the remaining mass is below `1e-14`.
pub fn q_distribution(t: f64) -> Result<CountDistribution> {
    distribution(ProcessKind::Q, t)
}

// ---------------------------------------------------------------------------
// Integrals and derivatives
// ---------------------------------------------------------------------------

/// `∫₀ˢ e^ξ p_j(ξ) dξ`. Series truncation is controlled relative to `e^s`.
pub fn exp_weighted_p_integral(s: f64, j: usize) -> Result<f64> {
    check_area("exp_weighted_p_integral", s)?;
    check_index(j)?;
    match j {
        0 => Ok(s),
        // ∫ J = sJ(s) − (e^s − 1 − s)
        1 if s < 30.0 => Ok(s * j_integral(s)?.value - (s.exp_m1() - s)),
        _ => {
            check_tail("exp_weighted_p_integral", poisson_tail(s, SERIES_TERMS + 1))?;
            Ok(p_integral_series(s, j))
        }
    }
}

/// `∫₀ˢ ξ e^ξ q_j(ξ) dξ`.
pub fn exp_weighted_q_integral(s: f64, j: usize) -> Result<f64> {
    check_area("exp_weighted_q_integral", s)?;
    check_index(j)?;
    if j == 0 {
        // ∫ (e^ξ − 1) = e^s − 1 − s
        return Ok(s.exp_m1() - s);
    }
    check_tail(
        "exp_weighted_q_integral",
        s * s * poisson_tail(s, SERIES_TERMS),
    )?;
    Ok(q_integral_series(s, j))
}

/// `s e^s p_j'(s) = ∫₀ˢ e^ξ (p_{j−1}(ξ) − p_j(ξ)) dξ`, with `p_{−1} ≡ 0`.
pub fn p_kernel(s: f64, j: usize) -> Result<f64> {
    check_area("p_kernel", s)?;
    match j {
        0 => Ok(-s),
        1 => Ok(s.exp_m1() - s * j_integral(s)?.value),
        _ => {
            check_index(j)?;
            check_tail("p_kernel", poisson_tail(s, SERIES_TERMS + 1))?;
            let r = &tables().r;
            let sum = weighted_sum(|i| r[i][j - 1] - r[i][j], s, j - 1, 1);
            Ok(sum)
        }
    }
}

/// `p_j'(t)`.
pub fn p_deriv(t: f64, j: usize) -> Result<f64> {
    check_area("p_deriv", t)?;
    if t == 0.0 {
        let r = &tables().r;
        check_index(j + 1)?;
        return Ok(r[1][j] - r[0][j]);
    }
    Ok((-t).exp() / t * p_kernel(t, j)?)
}

/// `s² e^s q_j'(s) = s e^s (p_j(s) − q_j(s))`, which also equals
/// `∫₀ˢ ξ e^ξ (q_{j−1}(ξ) − q_j(ξ)) dξ`.
pub fn q_kernel(s: f64, j: usize) -> Result<f64> {
    check_area("q_kernel", s)?;
    match j {
        0 => Ok(-(s.exp_m1() - s)),
        1 if s >= 1e-2 => {
            let js = j_integral(s)?.value;
            Ok(s * js + s.exp() * j_integral(-s)?.value + js)
        }
        _ => {
            check_index(j)?;
            check_tail("q_kernel", poisson_tail(s, SERIES_TERMS) * s)?;
            let t = tables();
            let sum = s * weighted_sum(|i| t.r[i][j] - t.c[i][j], s, j, 0);
            Ok(sum)
        }
    }
}

/// `q_j'(t)`.
pub fn q_deriv(t: f64, j: usize) -> Result<f64> {
    check_area("q_deriv", t)?;
    if t == 0.0 {
        let t = tables();
        check_index(j + 1)?;
        return Ok(t.c[1][j] - t.c[0][j]);
    }
    Ok(q_kernel(t, j)? / (t * t * t.exp()))
}

// ---------------------------------------------------------------------------
// Threshold-policy counts
// ---------------------------------------------------------------------------

fn check_threshold(op: &'static str, t: f64, s: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain(
            op,
            format!("threshold must be positive and finite, got s={s}"),
        ));
    }
    if !(t >= 0.0) {
        return Err(domain(op, format!("area must be nonnegative, got t={t}")));
    }
    Ok(())
}

/// `p_j(t, s)`: probability that the P-chain started at `t` makes exactly
/// `j` visits to `]0, s]`. `t` may be infinite.
pub fn p_threshold_count(t: f64, s: f64, j: usize) -> Result<f64> {
    check_threshold("p_threshold_count", t, s)?;
    if t < s {
        return p_count(t, j);
    }
    let i = i_integral(t, s)?.value;
    Ok(i * p_kernel(s, j)? + p_count(s, j)?)
}

/// `q_j(t, s)`: the Q-chain analogue of [`p_threshold_count`].
pub fn q_threshold_count(t: f64, s: f64, j: usize) -> Result<f64> {
    check_threshold("q_threshold_count", t, s)?;
    if t < s {
        return q_count(t, j);
    }
    let i2 = i2_integral(t, s)?.value;
    Ok(i2 * q_kernel(s, j)? + q_count(s, j)?)
}

// ---------------------------------------------------------------------------
// Transition functions
// ---------------------------------------------------------------------------

fn check_transition(op: &'static str, t: f64, s: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite() && s > 0.0 && s <= t) {
        return Err(domain(op, format!("need 0 < s ≤ t < ∞, got t={t}, s={s}")));
    }
    Ok(())
}

/// `e^{−s} ∫ₓˢ e^y/y dy` for `0 < x ≤ s`.
fn ei_between_scaled(x: f64, s: f64) -> f64 {
    j_scaled(s) - (x - s).exp() * j_scaled(x) + (-s).exp() * (s / x).ln()
}

/// `P(t, [s, t])`, the P-chain one-step probability of landing in `[s, t]`.
pub fn p_transition(t: f64, s: f64) -> Result<f64> {
    check_transition("p_transition", t, s)?;
    if s == t {
        return Ok(0.0);
    }
    Ok(1.0 - (s - t).exp() - s * ei_between_scaled(s, t))
}

/// `P(t, ]0, s]) = 1 − e^{−t} − P(t, [s, t])`.
pub fn p_transition_lower(t: f64, s: f64) -> Result<f64> {
    Ok(1.0 - (-t).exp() - p_transition(t, s)?)
}

/// `Q(t, ]0, s]) = (e^{−t} − e^{s−t} + s)/t`.
pub fn q_transition(t: f64, s: f64) -> Result<f64> {
    check_transition("q_transition", t, s)?;
    Ok(((-t).exp() - (s - t).exp() + s) / t)
}

/// `Q(t, [s, t]) = (e^{s−t} + t − 1 − s)/t`.
pub fn q_transition_upper(t: f64, s: f64) -> Result<f64> {
    check_transition("q_transition_upper", t, s)?;
    Ok(((s - t).exp_m1() + (t - s)) / t)
}

// ---------------------------------------------------------------------------
// First visit below the threshold
// ---------------------------------------------------------------------------

fn check_visit(op: &'static str, t: f64, s: f64, x: f64) -> Result<()> {
    if !(x > 0.0 && x <= s && s <= t) {
        return Err(domain(
            op,
            format!("need 0 < x ≤ s ≤ t, got t={t}, s={s}, x={x}"),
        ));
    }
    Ok(())
}

/// `φ(t, s, x)`: probability that the P-chain from `t` first enters `]0, s]`
/// inside `[x, s]`.
pub fn first_visit_cdf_p(t: f64, s: f64, x: f64) -> Result<f64> {
    check_visit("first_visit_cdf_p", t, s, x)?;
    let scaled_i = i_integral_scaled(t, s); // e^s I(t, s)
    let weight = 1.0 - s * scaled_i; // e^s (e^{−s} − s I)
    let bracket = 1.0 - (x - s).exp() - x * ei_between_scaled(x, s);
    Ok((s - x) * scaled_i + weight * bracket)
}

/// Density of the box area of the record selected by the threshold rule
/// `π_s` (the derivative `−∂ₓ φ(t, s, x)`).
pub fn first_visit_density_p(t: f64, s: f64, x: f64) -> Result<f64> {
    check_visit("first_visit_density_p", t, s, x)?;
    let scaled_i = i_integral_scaled(t, s);
    Ok(scaled_i + (1.0 - s * scaled_i) * ei_between_scaled(x, s))
}

// ---------------------------------------------------------------------------
// Reversed sequences
// ---------------------------------------------------------------------------

/// `P(X_k > s)` for the `k`-th entry of the reversed box-area sequence
/// `X = A` (all records) or `X = B` (records left of a vertical cut; `C`
/// shares this law).
///
/// `P(A_k > s) = Σ_{j<k} p_j(s) − I(s) ∫₀ˢ e^ξ p_{k−1}(ξ) dξ` and
/// `P(B_k > s) = Σ_{j<k} q_j(s) − I₂(s) ∫₀ˢ ξ e^ξ q_{k−1}(ξ) dξ`.
/// For `k ≤ 2` closed forms in scaled functions cover every `s > 0`.
pub fn eu_marginal_survival(kind: EuKind, k: usize, s: f64) -> Result<f64> {
    if k < 1 {
        return Err(domain("eu_marginal_survival", "index k must be at least 1"));
    }
    if !(s > 0.0) {
        return Err(domain(
            "eu_marginal_survival",
            format!("s must be positive, got {s}"),
        ));
    }
    if s.is_infinite() {
        return Ok(0.0);
    }
    let em = (-s).exp();
    let ei = e1_scaled(s); // e^s I(s)
    let i = ei * em;
    match (kind, k) {
        (EuKind::A, 1) => Ok(em - s * i),
        (EuKind::A, 2) => {
            let js = j_scaled(s);
            Ok(-s * ei * js + ei - i - s * i + em + js)
        }
        (EuKind::B | EuKind::C, 1) => Ok(em + ei - (1.0 + s) * i),
        (EuKind::B | EuKind::C, 2) => {
            let js = j_scaled(s);
            let jneg = -neg_j_neg(s)?;
            Ok(em + js - i * (1.0 + s) + ei - ei * jneg - (1.0 + s) * ei * js)
        }
        (EuKind::A, _) => {
            let head: f64 = (0..k).map(|j| p_count(s, j)).sum::<Result<f64>>()?;
            Ok(head - i * exp_weighted_p_integral(s, k - 1)?)
        }
        (EuKind::B | EuKind::C, _) => {
            let head: f64 = (0..k).map(|j| q_count(s, j)).sum::<Result<f64>>()?;
            let i2 = i2_integral(f64::INFINITY, s)?.value;
            Ok(head - i2 * exp_weighted_q_integral(s, k - 1)?)
        }
    }
}

/// General-`k` series form of [`eu_marginal_survival`], without the closed
/// forms; used to cross-check them.
pub fn eu_marginal_survival_series(kind: EuKind, k: usize, s: f64) -> Result<f64> {
    if k < 1 || !(s > 0.0) {
        return Err(domain(
            "eu_marginal_survival_series",
            "need k ≥ 1 and s > 0",
        ));
    }
    match kind {
        EuKind::A => {
            let head: f64 = (0..k).map(|j| p_count_series(s, j)).sum::<Result<f64>>()?;
            check_tail(
                "eu_marginal_survival_series",
                poisson_tail(s, SERIES_TERMS + 1),
            )?;
            let integral = p_integral_series(s, k - 1);
            Ok(head - specfun::e1(s)?.value * integral)
        }
        EuKind::B | EuKind::C => {
            let head: f64 = (0..k).map(|j| q_count_series(s, j)).sum::<Result<f64>>()?;
            check_tail(
                "eu_marginal_survival_series",
                s * s * poisson_tail(s, SERIES_TERMS),
            )?;
            let integral = q_integral_series(s, k - 1);
            Ok(head - i2_integral(f64::INFINITY, s)?.value * integral)
        }
    }
}

// ---------------------------------------------------------------------------
// Inversion
// ---------------------------------------------------------------------------

/// `Σ_{k=j}^{m} σ₂(k,j) j! (−1)^{k−j} p_k(t)`, which converges to
/// `e^{−t} t^j / j!` as `m` grows.
pub fn inversion_partial_sum(j: usize, t: f64, m: usize) -> Result<f64> {
    inversion_sum(j, t, m, p_count)
}

/// `Σ_{i=k}^{m} σ₂(i,k) k! (−1)^{i−k} q_i(t)`, which converges to
/// `t^{−1} ∫₀ᵗ e^{−s} s^k/k! ds`.
pub fn inversion_partial_sum_q(k: usize, t: f64, m: usize) -> Result<f64> {
    inversion_sum(k, t, m, q_count)
}

fn inversion_sum(j: usize, t: f64, m: usize, count: fn(f64, usize) -> Result<f64>) -> Result<f64> {
    if j > m {
        return Err(domain(
            "inversion_partial_sum",
            format!("need j ≤ m, got j={j}, m={m}"),
        ));
    }
    let second = stirling_table(StirlingKind::Second);
    let mut sum = 0.0;
    for k in j..=m {
        let coef = second.scaled(k, j)?;
        let sign = if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 };
        sum += sign * coef * count(t, k)?;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn counts_sum_to_one() {
        for &t in &[0.0, 0.3, 2.0, 12.0, 30.0, 80.0] {
            let p = p_distribution(t).unwrap();
            let q = q_distribution(t).unwrap();
            assert!(close(p.total(), 1.0, 1e-12), "p at {t}: {}", p.total());
            assert!(close(q.total(), 1.0, 1e-12), "q at {t}: {}", q.total());
        }
    }

    #[test]
    fn closed_forms_match_series() {
        for &t in &[1e-4, 0.5, 1.0, 4.0, 20.0] {
            for j in 0..2 {
                assert!(close(
                    p_count(t, j).unwrap(),
                    p_count_series(t, j).unwrap(),
                    1e-13
                ));
                assert!(
                    close(q_count(t, j).unwrap(), q_count_series(t, j).unwrap(), 1e-12),
                    "q{j}({t})"
                );
            }
        }
    }

    #[test]
    fn large_area_counts_stay_finite() {
        let p1 = p_count(1e5, 1).unwrap();
        assert!(close(p1 * 1e5, 1.0, 1e-4));
        let q1 = q_count(1e5, 1).unwrap();
        assert!(q1 > 0.0 && q1 < 1e-3);
        assert!(p_count_series(400.0, 3).is_err());
    }

    #[test]
    fn q_recovered_from_negative_argument() {
        // q_{j−1}(t) = e^{−t}/t ((−1)^{j−1} p_{j−1}(−t) − e^t p_{j−1}(t))
        for &t in &[0.4f64, 2.5, 7.0] {
            for j in 1..5 {
                let sign = if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
                let rhs = (-t).exp() / t
                    * (sign * p_count_entire(-t, j - 1).unwrap()
                        - t.exp() * p_count(t, j - 1).unwrap());
                assert!(close(q_count(t, j - 1).unwrap(), rhs, 1e-10), "j={j} t={t}");
            }
        }
    }

    #[test]
    fn kernels_match_their_integrals() {
        for &s in &[0.2, 1.5, 6.0] {
            for j in 1..5 {
                let direct = integrate(
                    |x| x.exp() * (p_count(x, j - 1).unwrap() - p_count(x, j).unwrap()),
                    0.0,
                    s,
                    1e-14,
                    1e-12,
                )
                .unwrap()
                .value;
                assert!(
                    close(p_kernel(s, j).unwrap(), direct, 1e-10),
                    "p j={j} s={s}"
                );
                let direct_q = integrate(
                    |x| x * x.exp() * (q_count(x, j - 1).unwrap() - q_count(x, j).unwrap()),
                    0.0,
                    s,
                    1e-14,
                    1e-12,
                )
                .unwrap()
                .value;
                assert!(
                    close(q_kernel(s, j).unwrap(), direct_q, 1e-10),
                    "q j={j} s={s}"
                );
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for &t in &[0.5, 3.0] {
            for j in 0..4 {
                let fd = (p_count(t + h, j).unwrap() - p_count(t - h, j).unwrap()) / (2.0 * h);
                assert!(close(p_deriv(t, j).unwrap(), fd, 1e-8));
                let fd = (q_count(t + h, j).unwrap() - q_count(t - h, j).unwrap()) / (2.0 * h);
                assert!(close(q_deriv(t, j).unwrap(), fd, 1e-8));
            }
        }
    }

    #[test]
    fn threshold_counts_form_distributions() {
        for &(t, s) in &[(f64::INFINITY, 0.8), (5.0, 2.0), (3.0, 4.0)] {
            let p: f64 = (0..40).map(|j| p_threshold_count(t, s, j).unwrap()).sum();
            let q: f64 = (0..40).map(|j| q_threshold_count(t, s, j).unwrap()).sum();
            assert!(close(p, 1.0, 1e-10), "{t} {s} {p}");
            assert!(close(q, 1.0, 1e-10), "{t} {s} {q}");
        }
    }

    #[test]
    fn p_transition_matches_kernel_density() {
        // (t − E)U given E < t has density ∫₀^{t−y} e^{−e}/(t − e) de at y
        let (t, s): (f64, f64) = (2.7, 1.1);
        let mass = integrate(
            |y| {
                integrate(|e| (-e).exp() / (t - e), 0.0, t - y, 1e-15, 1e-13)
                    .unwrap()
                    .value
            },
            s,
            t,
            1e-13,
            1e-11,
        )
        .unwrap()
        .value;
        assert!(close(p_transition(t, s).unwrap(), mass, 1e-9));
        assert_eq!(p_transition(t, t).unwrap(), 0.0);
    }

    #[test]
    fn q_transition_total_mass() {
        let law = TransitionLaw::new(ProcessKind::Q, 3.0).unwrap();
        let total = law.absorption() + law.mass_below(1.2).unwrap() + law.mass_above(1.2).unwrap();
        assert!(close(total, 1.0, 1e-14));
    }

    #[test]
    fn first_visit_boundaries() {
        let (t, s) = (4.0, 1.3);
        assert!(first_visit_cdf_p(t, s, s).unwrap().abs() < 1e-14);
        let near_zero = first_visit_cdf_p(t, s, 1e-12).unwrap();
        assert!(close(
            near_zero,
            1.0 - p_threshold_count(t, s, 0).unwrap(),
            1e-10
        ));
        let start = first_visit_cdf_p(s, s, 0.4).unwrap();
        assert!(close(start, p_transition(s, 0.4).unwrap(), 1e-12));
    }

    #[test]
    fn eu_closed_forms_match_series() {
        for kind in [EuKind::A, EuKind::B] {
            for k in 1..=2 {
                for &s in &[0.1, 0.9, 4.0, 15.0] {
                    let a = eu_marginal_survival(kind, k, s).unwrap();
                    let b = eu_marginal_survival_series(kind, k, s).unwrap();
                    assert!(close(a, b, 1e-9), "{kind:?} k={k} s={s}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn eu_survival_is_monotone_in_k() {
        for kind in [EuKind::A, EuKind::B] {
            for &s in &[0.5, 2.0] {
                let v: Vec<f64> = (1..6)
                    .map(|k| eu_marginal_survival(kind, k, s).unwrap())
                    .collect();
                assert!(v.windows(2).all(|w| w[0] <= w[1] + 1e-14), "{kind:?} {v:?}");
                assert!(v.iter().all(|&x| (0.0..=1.0).contains(&x)));
            }
        }
    }

    #[test]
    fn eu_heavy_tails() {
        let a2 = eu_marginal_survival(EuKind::A, 2, 1e6).unwrap();
        let b1 = eu_marginal_survival(EuKind::B, 1, 1e6).unwrap();
        assert!(a2 > 0.0 && a2 < 1e-5);
        assert!(b1 > 0.0 && b1 < 1e-5);
    }

    #[test]
    fn inversion_converges() {
        let t = 1.7f64;
        let target = (-t).exp() * t * t / 2.0;
        let err = |m| (inversion_partial_sum(2, t, m).unwrap() - target).abs();
        assert!(err(30) < 1e-10, "{}", err(30));
    }
}
