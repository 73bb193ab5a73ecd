//! Exponential-integral functions and exact combinatorial tables.
//!
//! Conventions used throughout the crate:
//!
//! * `J(t) = ∫₀ᵗ (e^ξ − 1)/ξ dξ`, an entire function (negative `t` allowed).
//! * `I(t, s) = ∫ₛᵗ e^{−ξ}/ξ dξ` for `0 < s ≤ t ≤ ∞`, and `I(t, s) = 0` when
//!   `t < s`. The one-argument form is `I(s) = I(∞, s) = E₁(s)`.
//! * `I₂(t, s) = ∫ₛᵗ e^{−ξ}/ξ² dξ = e^{−s}/s − e^{−t}/t − I(t, s)`.
//!
//! An infinite upper bound is passed as `f64::INFINITY`.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this argument `E₁` uses its power series, above it a continued fraction.
const E1_SPLIT: f64 = 1.0;
/// Above this argument `J` switches from its power series to the asymptotic
/// expansion of `Ei`.
const J_ASYMPTOTIC: f64 = 40.0;

/// Tolerances shared by the series evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    /// Target error, relative to `max(1, |value|)`.
    pub tolerance: f64,
    pub max_terms: usize,
    /// Largest `|t|` accepted by [`j_integral_with`].
    pub magnitude_cap: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_terms: 500,
            magnitude_cap: 700.0,
        }
    }
}

/// A special-function value with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpIntegralValue {
    pub value: f64,
    pub abs_error_bound: f64,
}

impl ExpIntegralValue {
    fn checked(self, op: &'static str, cfg: &Config) -> Result<Self> {
        let tolerance = cfg.tolerance * self.value.abs().max(1.0);
        if self.abs_error_bound <= tolerance && self.value.is_finite() {
            Ok(self)
        } else {
            Err(Error::Precision {
                op,
                bound: self.abs_error_bound,
                tolerance,
            })
        }
    }
}

/// Sums `Σ_{k≥1} t^k / (k · k!)`. The stopping rule requires the next term to
/// be small both relative to the partial sum and in absolute terms.
fn j_series(t: f64, cfg: &Config) -> Result<ExpIntegralValue> {
    let mut power = 1.0; // t^k / k!
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for k in 1..=cfg.max_terms {
        power *= t / k as f64;
        let term = power / k as f64;
        sum += term;
        abs_sum += term.abs();
        let next = (power * t / (k + 1) as f64 / (k + 1) as f64).abs();
        // four orders of headroom below the requested tolerance
        if (next < 1e-4 * cfg.tolerance * sum.abs() && next < 1e-15) || next == 0.0 {
            return Ok(ExpIntegralValue {
                value: sum,
                abs_error_bound: 2.0 * next + 4.0 * f64::EPSILON * abs_sum,
            });
        }
    }
    Err(Error::Precision {
        op: "J series",
        bound: f64::INFINITY,
        tolerance: cfg.tolerance,
    })
}

/// `(e^t / t) Σ_k k!/t^k`, truncated at the smallest term. Returns the sum
/// without the `e^t/t` prefactor and the size of the smallest term.
fn ei_asymptotic_sum(t: f64) -> (f64, f64) {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        let next = term * k / t;
        if next >= term || next < f64::EPSILON * 1e-3 {
            return (sum, next);
        }
        term = next;
        sum += term;
        k += 1.0;
    }
}

/// `e^x E₁(x)` for `x > 1` via the modified Lentz continued fraction.
fn e1_scaled_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// `J(t)` with the default configuration.
pub fn j_integral(t: f64) -> Result<ExpIntegralValue> {
    j_integral_with(&Config::default(), t)
}

pub fn j_integral_with(cfg: &Config, t: f64) -> Result<ExpIntegralValue> {
    if !t.is_finite() || t.abs() > cfg.magnitude_cap {
        return Err(Error::Overflow {
            op: "J",
            arg: t,
            cap: cfg.magnitude_cap,
        });
    }
    if t == 0.0 {
        return Ok(ExpIntegralValue {
            value: 0.0,
            abs_error_bound: 0.0,
        });
    }
    let v = if t > J_ASYMPTOTIC {
        let (sum, smallest) = ei_asymptotic_sum(t);
        let prefactor = t.exp() / t;
        let value = prefactor * sum - EULER_GAMMA - t.ln();
        ExpIntegralValue {
            value,
            abs_error_bound: prefactor * smallest + 4.0 * f64::EPSILON * value.abs(),
        }
    } else if t >= -E1_SPLIT {
        j_series(t, cfg)?
    } else {
        // J(−x) = −(E₁(x) + γ + ln x)
        let x = -t;
        let e1 = e1_scaled_cf(x) * (-x).exp();
        let value = -(e1 + EULER_GAMMA + x.ln());
        ExpIntegralValue {
            value,
            abs_error_bound: 4.0 * f64::EPSILON * (e1 + EULER_GAMMA + x.ln().abs()),
        }
    };
    v.checked("J", cfg)
}

/// `e^{−t} J(t)` for `t ≥ 0`, finite for every `t` (behaves like `1/t`).
pub fn j_scaled(t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    if t == 0.0 {
        0.0
    } else if t > J_ASYMPTOTIC {
        let (sum, _) = ei_asymptotic_sum(t);
        sum / t - (-t).exp() * (EULER_GAMMA + t.ln())
    } else {
        let j = j_series(t, &Config::default())
            .map(|v| v.value)
            .unwrap_or(f64::NAN);
        (-t).exp() * j
    }
}

/// `E₁(x) = I(∞, x)` for `x > 0`.
pub fn e1(x: f64) -> Result<ExpIntegralValue> {
    if !(x > 0.0) {
        return Err(domain("E1", format!("argument must be positive, got {x}")));
    }
    if x.is_infinite() {
        return Ok(ExpIntegralValue {
            value: 0.0,
            abs_error_bound: 0.0,
        });
    }
    if x <= E1_SPLIT {
        let series = j_series(-x, &Config::default())?;
        let value = -EULER_GAMMA - x.ln() - series.value;
        Ok(ExpIntegralValue {
            value,
            abs_error_bound: series.abs_error_bound
                + 4.0 * f64::EPSILON * (EULER_GAMMA + x.ln().abs()),
        })
    } else {
        let value = e1_scaled_cf(x) * (-x).exp();
        Ok(ExpIntegralValue {
            value,
            abs_error_bound: 8.0 * f64::EPSILON * value,
        })
    }
}

/// `e^x E₁(x)`, finite for all `x > 0`.
pub fn e1_scaled(x: f64) -> f64 {
    if x <= E1_SPLIT {
        e1(x).map(|v| v.value).unwrap_or(f64::NAN) * x.exp()
    } else if x.is_infinite() {
        0.0
    } else {
        e1_scaled_cf(x)
    }
}

/// `I(t, s) = ∫ₛᵗ e^{−ξ}/ξ dξ`, zero for `t ≤ s`.
pub fn i_integral(t: f64, s: f64) -> Result<ExpIntegralValue> {
    if !(s > 0.0) {
        return Err(domain(
            "I",
            format!("lower bound must be positive, got s={s}"),
        ));
    }
    if t <= s {
        return Ok(ExpIntegralValue {
            value: 0.0,
            abs_error_bound: 0.0,
        });
    }
    let lower = e1(s)?;
    if t.is_infinite() {
        return Ok(lower);
    }
    let upper = e1(t)?;
    Ok(ExpIntegralValue {
        value: (lower.value - upper.value).max(0.0),
        abs_error_bound: lower.abs_error_bound + upper.abs_error_bound,
    })
}

/// `e^s I(t, s)`; stays finite when `s` is large.
pub fn i_integral_scaled(t: f64, s: f64) -> f64 {
    if t <= s {
        return 0.0;
    }
    let head = e1_scaled(s);
    if t.is_infinite() {
        head
    } else {
        (head - (s - t).exp() * e1_scaled(t)).max(0.0)
    }
}

/// `I₂(t, s) = ∫ₛᵗ e^{−ξ}/ξ² dξ`, evaluated through its reduction to `I(t, s)`.
pub fn i2_integral(t: f64, s: f64) -> Result<ExpIntegralValue> {
    if !(s > 0.0) {
        return Err(domain(
            "I2",
            format!("lower bound must be positive, got s={s}"),
        ));
    }
    if t < s {
        return Err(domain(
            "I2",
            format!("upper bound t={t} below lower bound s={s}"),
        ));
    }
    if t == s {
        return Ok(ExpIntegralValue {
            value: 0.0,
            abs_error_bound: 0.0,
        });
    }
    let i = i_integral(t, s)?;
    let head = (-s).exp() / s;
    let tail = if t.is_infinite() { 0.0 } else { (-t).exp() / t };
    let value = head - tail - i.value;
    Ok(ExpIntegralValue {
        value: value.max(0.0),
        abs_error_bound: i.abs_error_bound + 4.0 * f64::EPSILON * head,
    })
}

/// Harmonic number `h(k) = 1 + 1/2 + … + 1/k`, with `h(0) = 0`.
pub fn harmonic(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}

// ---------------------------------------------------------------------------
// Stirling numbers
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StirlingKind {
    /// Signless first kind: permutations of `k` elements with `j` cycles.
    FirstSignless,
    /// Second kind: partitions of a `k`-set into `j` blocks.
    Second,
}

/// Default table bound.
pub const STIRLING_MAX: usize = 64;

/// Exact triangular table of Stirling numbers up to row `max_k`.
///
/// Alongside the integers it stores `σ₁(k,j)/k!` (first kind) or
/// `σ₂(k,j)·j!` (second kind) as reals for use in series.
#[derive(Debug, Clone)]
pub struct StirlingTable {
    kind: StirlingKind,
    max_k: usize,
    exact: Vec<Vec<BigUint>>,
    scaled: Vec<Vec<f64>>,
}

impl StirlingTable {
    pub fn new(kind: StirlingKind, max_k: usize) -> Self {
        let mut exact: Vec<Vec<BigUint>> = Vec::with_capacity(max_k + 1);
        exact.push(vec![BigUint::one()]);
        for k in 0..max_k {
            let prev = &exact[k];
            let mut row = vec![BigUint::zero(); k + 2];
            for j in 1..=k + 1 {
                let carry = prev[j - 1].clone();
                let stay = if j <= k {
                    let mult = match kind {
                        StirlingKind::FirstSignless => k,
                        StirlingKind::Second => j,
                    };
                    &prev[j] * BigUint::from(mult)
                } else {
                    BigUint::zero()
                };
                row[j] = stay + carry;
            }
            exact.push(row);
        }

        let mut factorial = BigUint::one();
        let mut factorials = vec![BigUint::one()];
        for k in 1..=max_k {
            factorial *= BigUint::from(k);
            factorials.push(factorial.clone());
        }
        let scaled = exact
            .iter()
            .enumerate()
            .map(|(k, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, v)| match kind {
                        StirlingKind::FirstSignless => ratio(v, &factorials[k]),
                        StirlingKind::Second => {
                            (v * &factorials[j]).to_f64().unwrap_or(f64::INFINITY)
                        }
                    })
                    .collect()
            })
            .collect();

        Self {
            kind,
            max_k,
            exact,
            scaled,
        }
    }

    pub fn kind(&self) -> StirlingKind {
        self.kind
    }

    pub fn max_k(&self) -> usize {
        self.max_k
    }

    pub fn get(&self, k: usize, j: usize) -> Result<&BigUint> {
        static ZERO: OnceLock<BigUint> = OnceLock::new();
        if k > self.max_k || j > self.max_k {
            return Err(Error::Index {
                k,
                j,
                max: self.max_k,
            });
        }
        Ok(self.exact[k]
            .get(j)
            .unwrap_or_else(|| ZERO.get_or_init(BigUint::zero)))
    }

    /// `σ₁(k,j)/k!` or `σ₂(k,j)·j!` depending on the kind; zero for `j > k`.
    pub fn scaled(&self, k: usize, j: usize) -> Result<f64> {
        if k > self.max_k || j > self.max_k {
            return Err(Error::Index {
                k,
                j,
                max: self.max_k,
            });
        }
        Ok(self.scaled[k].get(j).copied().unwrap_or(0.0))
    }
}

/// `num / den` for big integers where both may exceed the `f64` range.
fn ratio(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits().saturating_sub(1000);
    let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

/// Shared default table for the given kind (`K = 64`).
pub fn stirling_table(kind: StirlingKind) -> &'static StirlingTable {
    static FIRST: OnceLock<StirlingTable> = OnceLock::new();
    static SECOND: OnceLock<StirlingTable> = OnceLock::new();
    match kind {
        StirlingKind::FirstSignless => FIRST.get_or_init(|| StirlingTable::new(kind, STIRLING_MAX)),
        StirlingKind::Second => SECOND.get_or_init(|| StirlingTable::new(kind, STIRLING_MAX)),
    }
}

/// Exact Stirling number from the default table.
pub fn stirling(kind: StirlingKind, k: usize, j: usize) -> Result<BigUint> {
    stirling_table(kind).get(k, j).cloned()
}
