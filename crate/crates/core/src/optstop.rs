//! Optimal thresholds and value functions.
//!
//! The full-information problem (FI) is solved by the threshold rule
//! `π_{t_F}`: stop at the first record whose box area is below `t_F`, the
//! positive root of `J(t) = 1`. The vertical-cut (VC) and horizontal-cut (HC)
//! problems share the threshold `t_P`, the positive root of `q₀ = q₁`, and
//! share their value function.

use std::sync::OnceLock;

use crate::error::{domain, Result};
use crate::recordlaw::{p_count, p_threshold_count, q_count, q_threshold_count};
use crate::roots::bisect_newton;
use crate::specfun::{i_integral, j_integral, j_scaled};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdName {
    TF,
    TP,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSolution {
    pub name: ThresholdName,
    pub root: f64,
    pub defining_residual: f64,
    pub bracket: (f64, f64),
}

const COARSE: f64 = 1e-6;
const POLISH: f64 = 1e-14;

/// Root of `J(t) = 1` on `[0.5, 1.5]`.
pub fn solve_tf() -> Result<ThresholdSolution> {
    let f = |t: f64| j_integral(t).map(|v| v.value - 1.0).unwrap_or(f64::NAN);
    let df = |t: f64| t.exp_m1() / t;
    let root = bisect_newton(f, df, 0.5, 1.5, COARSE, POLISH)?;
    Ok(ThresholdSolution {
        name: ThresholdName::TF,
        root: root.x,
        defining_residual: root.residual,
        bracket: root.bracket,
    })
}

/// Root of `−J(−t) − e^{−t} J(t) = 1 − e^{−t}` (equivalently `q₀ = q₁`) on `[1.5, 3]`.
pub fn solve_tp() -> Result<ThresholdSolution> {
    let f = |t: f64| tp_exponential_residual(t).unwrap_or(f64::NAN);
    let df = |t: f64| (-t).exp() * (j_integral(t).map(|v| v.value).unwrap_or(f64::NAN) - 1.0);
    let root = bisect_newton(f, df, 1.5, 3.0, COARSE, POLISH)?;
    Ok(ThresholdSolution {
        name: ThresholdName::TP,
        root: root.x,
        defining_residual: root.residual,
        bracket: root.bracket,
    })
}

/// Memoized `t_F ≈ 0.804352`.
pub fn t_f() -> f64 {
    static ROOT: OnceLock<f64> = OnceLock::new();
    *ROOT.get_or_init(|| {
        solve_tf()
            .expect("J(t) = 1 is bracketed on [0.5, 1.5]")
            .root
    })
}

/// Memoized `t_P ≈ 2.11982`.
pub fn t_p() -> f64 {
    static ROOT: OnceLock<f64> = OnceLock::new();
    *ROOT.get_or_init(|| solve_tp().expect("q₀ = q₁ is bracketed on [1.5, 3]").root)
}

fn tp_exponential_residual(t: f64) -> Result<f64> {
    Ok(-j_integral(-t)?.value - j_scaled(t) - 1.0 + (-t).exp())
}

/// Residuals of the four equivalent characterizations of `t_P` at `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TpResiduals {
    /// `q₀(t) − q₁(t)`.
    pub q_equality: f64,
    /// `−J(−t) − e^{−t}J(t) − (1 − e^{−t})`.
    pub exponential_form: f64,
    /// `p₁(t) − p₀(t) − (−1 − J(−t))`.
    pub count_form: f64,
    /// `Σ_{j≥2} j⁻¹ Σ_{k>j} t^{k−1}/k! − 1`.
    pub double_series: f64,
}

pub fn tp_residuals(t: f64) -> Result<TpResiduals> {
    let jneg = j_integral(-t)?.value;
    Ok(TpResiduals {
        q_equality: q_count(t, 0)? - q_count(t, 1)?,
        exponential_form: tp_exponential_residual(t)?,
        count_form: p_count(t, 1)? - p_count(t, 0)? + 1.0 + jneg,
        double_series: tp_double_series(t) - 1.0,
    })
}

/// `Σ_{k≥3} t^{k−1}/k! (h(k−1) − 1)`, the double series with the sums swapped.
fn tp_double_series(t: f64) -> f64 {
    let mut sum = 0.0;
    let mut w = t * t / 6.0; // t^{k−1}/k! at k = 3
    let mut h = 1.5; // h(k−1) at k = 3
    for k in 3..400 {
        let term = w * (h - 1.0);
        sum += term;
        if term < 1e-17 * sum && k > 10 {
            break;
        }
        w *= t / (k + 1) as f64;
        h += 1.0 / k as f64;
    }
    sum
}

fn check_area(op: &'static str, t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(domain(op, format!("area must be nonnegative, got {t}")))
    }
}

/// Optimal FI best-choice probability `v(t)` in a rectangle of area `t`.
pub fn value_fi(t: f64) -> Result<f64> {
    check_area("value_fi", t)?;
    let s = t_f();
    if t <= s {
        return p_count(t, 1);
    }
    Ok((s.exp_m1() - s) * i_integral(t, s)?.value + (-s).exp())
}

/// Optimal VC best-choice probability `u(t) = q₁(t, t_P)`.
pub fn value_vc(t: f64) -> Result<f64> {
    check_area("value_vc", t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    q_threshold_count(t, t_p(), 1)
}

/// Optimal HC best-choice probability; it coincides with the VC value.
pub fn value_hc(t: f64) -> Result<f64> {
    value_vc(t)
}

/// `I(t_P)(e^{t_P} − t_P J(t_P) − 1) + e^{−t_P} J(t_P)`, the VC value at `t = ∞`.
pub fn v_p() -> Result<f64> {
    let s = t_p();
    let j = j_integral(s)?.value;
    Ok(i_integral(f64::INFINITY, s)?.value * (s.exp() - s * j - 1.0) + (-s).exp() * j)
}

/// Maximum over `t` of `p₁(t)`, the win probability of the rule `π_∞` that
/// stops at the first atom (it wins exactly when there is a single record).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyOptimum {
    pub area: f64,
    pub value: f64,
    /// `e^t − 1 − tJ(t)` at `area`, proportional to `p₁'`.
    pub residual: f64,
}

pub fn greedy_optimum() -> Result<GreedyOptimum> {
    let f = |t: f64| t.exp_m1() - t * j_integral(t).map(|v| v.value).unwrap_or(f64::NAN);
    let df = |t: f64| 1.0 - j_integral(t).map(|v| v.value).unwrap_or(f64::NAN);
    let root = bisect_newton(f, df, 1.0, 2.0, COARSE, POLISH)?;
    Ok(GreedyOptimum {
        area: root.x,
        value: p_count(root.x, 1)?,
        residual: root.residual,
    })
}

/// Expected duration of holding a record under `π_s`: `t · q₁(t, s)`.
pub fn duration_value(t: f64, s: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain(
            "duration_value",
            format!("area must be positive and finite, got {t}"),
        ));
    }
    Ok(t * q_threshold_count(t, s, 1)?)
}

/// The four coinciding probabilities for the ordinary Poisson process on the
/// half-axis, all equal to `e^{−j} j^j / j!`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Digression {
    /// `p_j(∞, j)`.
    pub p_j: f64,
    /// `p_{j−1}(∞, j)`.
    pub p_prev: f64,
    /// `q_{j−1}(∞, j)`.
    pub q_prev: f64,
    /// `q_{j−2}(∞, j)`, defined for `j ≥ 2`.
    pub q_prev2: Option<f64>,
}

/// Half-axis counts: `p_k(∞, s) = e^{−s} s^k/k!` and
/// `q_k(∞, s) = e^{−s} s^{k+1}/(k+1)!`.
pub fn poisson_digression(j: usize) -> Result<Digression> {
    if j < 1 {
        return Err(domain("poisson_digression", "j must be at least 1"));
    }
    let s = j as f64;
    let poisson = |k: usize| {
        let ln = -s + k as f64 * s.ln() - statrs::function::gamma::ln_gamma(k as f64 + 1.0);
        ln.exp()
    };
    let q = |k: usize| poisson(k + 1);
    Ok(Digression {
        p_j: poisson(j),
        p_prev: poisson(j - 1),
        q_prev: q(j - 1),
        q_prev2: (j >= 2).then(|| q(j - 2)),
    })
}

/// `f(t, ξ, s)`: probability that `π_s` in `[0,1] × [−t, 0]` selects an atom
/// with horizontal coordinate below `ξ`.
pub fn stop_time_cdf(t: f64, xi: f64, s: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&xi) {
        return Err(domain(
            "stop_time_cdf",
            format!("ξ must lie in [0, 1), got {xi}"),
        ));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain(
            "stop_time_cdf",
            format!("threshold must be positive, got {s}"),
        ));
    }
    check_area("stop_time_cdf", t)?;
    if xi == 0.0 {
        return Ok(0.0);
    }
    if t < s {
        return Ok(-(-t * xi).exp_m1());
    }
    let top = t.min(s / (1.0 - xi));
    let head = -(-s * xi).exp_m1();
    let drift = (xi - 1.0) / xi * ((-xi * s).exp() - (-xi * top).exp());
    Ok(head + drift + s * i_integral(xi * top, xi * s)?.value)
}

/// Within this distance of `ξ ∈ {0, 1}` the density is interpolated to its
/// analytic endpoint value.
const EDGE: f64 = 1e-7;

/// `∂_ξ g(∞, ξ, s)`: rate at which `π_s` wins at horizontal position `ξ` in
/// the semi-infinite problem. Endpoint values are `1 − e^{−s}` and `e^{−s}`.
pub fn win_rate_density(xi: f64, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(domain(
            "win_rate_density",
            format!("ξ must lie in [0, 1], got {xi}"),
        ));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain(
            "win_rate_density",
            format!("threshold must be positive, got {s}"),
        ));
    }
    let left = -(-s).exp_m1();
    let right = (-s).exp();
    if xi < EDGE {
        let inner = win_rate_interior(EDGE, s)?;
        return Ok(left + (inner - left) * xi / EDGE);
    }
    if xi > 1.0 - EDGE {
        let inner = win_rate_interior(1.0 - EDGE, s)?;
        return Ok(right + (inner - right) * (1.0 - xi) / EDGE);
    }
    win_rate_interior(xi, s)
}

fn win_rate_interior(xi: f64, s: f64) -> Result<f64> {
    let c = 1.0 - xi;
    let e_s = (-s).exp();
    let e_sx = (-s * xi).exp();
    let e_far = (-s * xi / c).exp();
    let inner = i_integral(s * xi / c, s * xi)?.value - i_integral(s / c, s)?.value;
    Ok(-e_s + (e_sx - xi * e_s) / c + (e_sx - e_far) / xi - s / c * inner)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueProblem {
    FI,
    VC,
    HC,
    /// Expected duration `t · u(t)` of holding a record.
    Duration,
    /// Greedy rule `π_∞`, value `p₁(t)`.
    Greedy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueCurve {
    pub problem: ValueProblem,
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl ValueCurve {
    pub fn compute(problem: ValueProblem, t_grid: &[f64]) -> Result<Self> {
        let values = t_grid
            .iter()
            .map(|&t| match problem {
                ValueProblem::FI => value_fi(t),
                ValueProblem::VC => value_vc(t),
                ValueProblem::HC => value_hc(t),
                ValueProblem::Duration => duration_value(t, t_p()),
                ValueProblem::Greedy => p_count(t, 1),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            problem,
            t_grid: t_grid.to_vec(),
            values,
        })
    }
}

/// `p₁(t, s)`: best-choice probability of `π_s` in the FI problem.
pub fn fi_policy_value(t: f64, s: f64) -> Result<f64> {
    p_threshold_count(t, s, 1)
}

/// `q₁(t, s)`: best-choice probability of `π_s` in the VC problem.
pub fn vc_policy_value(t: f64, s: f64) -> Result<f64> {
    q_threshold_count(t, s, 1)
}
