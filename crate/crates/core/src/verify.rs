//! Named self-checks: analytic identities and Monte Carlo agreement.

use rand::Rng;
use rand_distr::{Exp1, Open01};

use crate::error::Result;
use crate::optstop::{self, t_f, t_p};
use crate::quad::integrate;
use crate::recordlaw::{self, EuKind};
use crate::roots::bisect_newton;
use crate::simulate::{self, MonteCarlo, Problem, Rect};
use crate::specfun::{e1, i2_integral, i_integral, j_integral};

const INF: f64 = f64::INFINITY;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Mc,
}

/// What the measured value of a check is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Largest absolute deviation; smaller is better.
    Residual,
    /// Largest standardized deviation of an estimate.
    ZScore,
    /// Smallest p-value of a goodness-of-fit test.
    PValue,
    /// Smallest strict margin of an ordering; must stay positive.
    Margin,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Residual => "residual",
            Metric::ZScore => "z",
            Metric::PValue => "p",
            Metric::Margin => "margin",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub metric: Metric,
    pub measured: f64,
    pub detail: String,
}

impl Outcome {
    fn residual(detail: String, worst: f64, tol: f64) -> Self {
        Self {
            passed: worst <= tol,
            metric: Metric::Residual,
            measured: worst,
            detail: format!("{detail} (tol {tol:e})"),
        }
    }

    fn z(detail: String, z: f64) -> Self {
        Self {
            passed: z <= 4.0,
            metric: Metric::ZScore,
            measured: z,
            detail,
        }
    }

    fn p(detail: String, p: f64, floor: f64) -> Self {
        Self {
            passed: p > floor,
            metric: Metric::PValue,
            measured: p,
            detail: format!("{detail} (floor {floor})"),
        }
    }

    /// Joins outcomes of the same metric, keeping the least favourable value.
    fn join(parts: Vec<Outcome>) -> Self {
        let metric = parts[0].metric;
        let worse = |a: f64, b: f64| match metric {
            Metric::Residual | Metric::ZScore => a.max(b),
            Metric::PValue | Metric::Margin => a.min(b),
        };
        Self {
            passed: parts.iter().all(|o| o.passed),
            metric,
            measured: parts
                .iter()
                .map(|o| o.measured)
                .reduce(worse)
                .unwrap_or(f64::NAN),
            detail: parts
                .iter()
                .map(|o| o.detail.as_str())
                .collect::<Vec<_>>()
                .join("; "),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub suite: Suite,
    pub passed: bool,
    pub metric: Metric,
    pub measured: f64,
    pub detail: String,
}

/// Parameters of the Monte Carlo checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub workers: usize,
    pub trials: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            workers: 0,
            trials: 1_000_000,
        }
    }
}

impl VerifyConfig {
    /// Runner on the stream family `seed + offset`, so checks do not share draws.
    fn mc(&self, offset: u64) -> MonteCarlo {
        MonteCarlo::new(self.seed.wrapping_add(offset)).with_workers(self.workers)
    }

    fn ks_trials(&self) -> u64 {
        self.trials.min(100_000)
    }
}

type CheckFn = fn(&VerifyConfig) -> Result<Outcome>;

pub struct Check {
    pub name: &'static str,
    pub suite: Suite,
    run: CheckFn,
}

impl Check {
    pub fn run(&self, cfg: &VerifyConfig) -> CheckResult {
        let o = (self.run)(cfg).unwrap_or_else(|e| Outcome {
            passed: false,
            metric: Metric::Residual,
            measured: f64::NAN,
            detail: format!("error: {e}"),
        });
        CheckResult {
            name: self.name,
            suite: self.suite,
            passed: o.passed,
            metric: o.metric,
            measured: o.measured,
            detail: o.detail,
        }
    }
}

fn close(name: &str, got: f64, want: f64, tol: f64) -> Outcome {
    Outcome::residual(
        format!("{name}: {got:.12} vs {want:.12}"),
        (got - want).abs(),
        tol,
    )
}

fn sigma(name: &str, est: &simulate::MCEstimate, want: f64) -> Outcome {
    let z = est.z_score(want);
    Outcome::z(
        format!(
            "{name}: {:.6} ± {:.6} vs {want:.6} (z = {z:.2})",
            est.mean, est.std_error
        ),
        z,
    )
}

/// Binomial z-score of `hits` out of `n` against probability `p`.
fn freq_z(hits: u64, n: u64, p: f64) -> f64 {
    let se = (p * (1.0 - p) / n as f64).sqrt();
    let diff = (hits as f64 / n as f64 - p).abs();
    if se == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            INF
        }
    } else {
        diff / se
    }
}

fn ks(name: &str, r: simulate::KsResult) -> Outcome {
    Outcome::p(
        format!("{name}: D = {:.5}, p = {:.4}", r.statistic, r.p_value),
        r.p_value,
        0.01,
    )
}

/// Pools the tail into the last cell and runs a χ² test.
fn chi2(name: &str, counts: &[u64], probs: &[f64], floor: f64) -> Result<Outcome> {
    let n: u64 = counts.iter().sum();
    let mut expected: Vec<f64> = probs.iter().map(|p| p * n as f64).collect();
    let tail = n as f64 - expected.iter().sum::<f64>();
    if let Some(last) = expected.last_mut() {
        *last += tail.max(0.0);
    }
    let r = simulate::chi2_gof(counts, &expected)?;
    Ok(Outcome::p(
        format!(
            "{name}: χ² = {:.2}, dof {}, p = {:.4}",
            r.statistic, r.dof, r.p_value
        ),
        r.p_value,
        floor,
    ))
}

fn central_diff(f: impl Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    Ok(integrate(f, a, b, 1e-14, 1e-13)?.value)
}

// Special functions.

fn check_i_additivity(_: &VerifyConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for s in [0.1, 0.5, 1.0, 3.0] {
        for (dm, dt) in [(0.2, 0.5), (1.0, 4.0), (5.0, 20.0)] {
            let (m, t) = (s + dm, s + dm + dt);
            let whole = i_integral(t, s)?.value;
            let parts = i_integral(m, s)?.value + i_integral(t, m)?.value;
            worst = worst.max((whole - parts).abs());
        }
    }
    Ok(Outcome::residual(
        format!("I(t,s) − I(m,s) − I(t,m): {worst:e}"),
        worst,
        1e-12,
    ))
}

fn check_i2_reduction(_: &VerifyConfig) -> Result<Outcome> {
    let (mut worst, mut by_quad): (f64, f64) = (0.0, 0.0);
    for k in 1..=10 {
        let s = 0.5 * k as f64 - 0.4;
        for t in [s, s + 0.5, 2.0 * s, 10.0, 50.0, INF] {
            if t < s {
                continue;
            }
            let tail = if t.is_finite() { (-t).exp() / t } else { 0.0 };
            let want = (-s).exp() / s - tail - i_integral(t, s)?.value;
            let i2 = i2_integral(t, s)?.value;
            worst = worst.max((i2 - want).abs());
            let q = quad(|x| (-x).exp() / (x * x), s, t)?;
            by_quad = by_quad.max((i2 - q).abs() / q.abs().max(1.0));
        }
    }
    Ok(Outcome::join(vec![
        Outcome::residual(format!("I2 reduction: {worst:e}"), worst, 1e-12),
        Outcome::residual(format!("I2 vs quadrature: {by_quad:e}"), by_quad, 1e-10),
    ]))
}

fn check_j_quadrature(_: &VerifyConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for k in -5..=5 {
        let t = k as f64;
        let q = quad(|x| if x == 0.0 { 1.0 } else { x.exp_m1() / x }, 0.0, t)?;
        worst = worst.max((j_integral(t)?.value - q).abs());
    }
    Ok(Outcome::residual(
        format!("J series vs quadrature: {worst:e}"),
        worst,
        1e-10,
    ))
}

fn check_nested_identity(_: &VerifyConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for s in [0.5, 1.0, 2.0] {
        // ∫_x^s e^y/y dy = ln(s/x) + ∫_x^s (e^y − 1)/y dy.
        let inner = |x: f64| (s / x).ln() + quad(|y| y.exp_m1() / y, x, s).unwrap_or(f64::NAN);
        let outer = quad(|x| (-x).exp() * inner(x), 0.0, s)?;
        worst = worst.max((outer - j_integral(s)?.value).abs());
    }
    Ok(Outcome::residual(
        format!("nested integral vs J: {worst:e}"),
        worst,
        1e-8,
    ))
}

// Thresholds and values.

fn check_tf(_: &VerifyConfig) -> Result<Outcome> {
    let s = optstop::solve_tf()?;
    Ok(close("t_F", s.root, 0.804352, 1e-5))
}

fn check_tp(_: &VerifyConfig) -> Result<Outcome> {
    let s = optstop::solve_tp()?;
    let r = optstop::tp_residuals(s.root)?;
    let worst = [
        r.q_equality,
        r.exponential_form,
        r.count_form,
        r.double_series,
    ]
    .iter()
    .fold(0f64, |m, x| m.max(x.abs()));
    Ok(Outcome::join(vec![
        close("t_P", s.root, 2.11982, 1e-5),
        Outcome::residual(format!("characterizations: {worst:e}"), worst, 1e-8),
    ]))
}

fn check_vf(_: &VerifyConfig) -> Result<Outcome> {
    Ok(close("v_F", optstop::value_fi(INF)?, 0.580164, 1e-5))
}

fn check_greedy(_: &VerifyConfig) -> Result<Outcome> {
    let g = optstop::greedy_optimum()?;
    Ok(Outcome::join(vec![
        close("t*", g.area, 1.50286, 1e-4),
        close("p1(t*)", g.value, 0.51735, 1e-4),
    ]))
}

fn check_vp(_: &VerifyConfig) -> Result<Outcome> {
    Ok(close(
        "q1(∞,t_P) vs v_P",
        recordlaw::q_threshold_count(INF, t_p(), 1)?,
        optstop::v_p()?,
        1e-10,
    ))
}

// Count laws.

fn check_normalization(_: &VerifyConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for t in [0.25, 0.5, 1.0, 2.0, 5.0, 10.0] {
        worst = worst.max((recordlaw::p_distribution(t)?.total() - 1.0).abs());
        worst = worst.max((recordlaw::q_distribution(t)?.total() - 1.0).abs());
    }
    Ok(Outcome::residual(
        format!("Σp − 1, Σq − 1: {worst:e}"),
        worst,
        1e-10,
    ))
}

const GRID: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
const H: f64 = 1e-4;

fn check_p_recursion(_: &VerifyConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for t in GRID {
        for j in 1..=3 {
            let lhs = central_diff(|x| recordlaw::p_count(x, j), t, H)?;
            let avg = quad(|x| recordlaw::p_count(x, j - 1).unwrap_or(f64::NAN), 0.0, t)? / t;
            worst = worst.max((lhs + recordlaw::p_count(t, j)? - avg).abs());
        }
    }
    Ok(Outcome::residual(
        format!("p-recursion residual: {worst:e}"),
        worst,
        1e-6,
    ))
}

fn check_q_recursion(_: &VerifyConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for t in GRID {
        for j in 1..=3 {
            let lhs = central_diff(|x| recordlaw::q_count(x, j), t, H)?;
            let avg = quad(|x| recordlaw::q_count(x, j - 1).unwrap_or(f64::NAN), 0.0, t)? / t;
            let rhs = -(1.0 + 1.0 / t) * recordlaw::q_count(t, j)? + avg;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(Outcome::residual(
        format!("q-recursion residual: {worst:e}"),
        worst,
        1e-6,
    ))
}

fn check_cesaro(_: &VerifyConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for t in GRID {
        for j in 0..=2 {
            let avg = quad(|x| recordlaw::p_count(x, j).unwrap_or(f64::NAN), 0.0, t)? / t;
            worst = worst.max((recordlaw::q_count(t, j)? - avg).abs());
        }
    }
    Ok(Outcome::residual(
        format!("q_j − average of p_j: {worst:e}"),
        worst,
        1e-8,
    ))
}

fn check_pq_relation(_: &VerifyConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for t in GRID {
        for j in 1..=3 {
            let lhs = central_diff(|x| recordlaw::p_count(x, j), t, H)?;
            let rhs = recordlaw::q_count(t, j - 1)? - recordlaw::p_count(t, j)?;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(Outcome::residual(
        format!("p_j' + p_j − q_(j−1): {worst:e}"),
        worst,
        1e-8,
    ))
}

fn check_duality(_: &VerifyConfig) -> Result<Outcome> {
    let a =
        recordlaw::q_threshold_count(INF, t_p(), 1)? - recordlaw::p_threshold_count(INF, t_p(), 1)?;
    let cross = bisect_newton(
        |x| {
            recordlaw::p_count(x, 1).unwrap_or(f64::NAN)
                - recordlaw::p_count(x, 2).unwrap_or(f64::NAN)
        },
        |x| {
            recordlaw::p_deriv(x, 1).unwrap_or(f64::NAN)
                - recordlaw::p_deriv(x, 2).unwrap_or(f64::NAN)
        },
        1.5,
        6.0,
        1e-6,
        1e-14,
    )?
    .x;
    let b =
        recordlaw::q_threshold_count(INF, cross, 1)? - recordlaw::p_threshold_count(INF, cross, 2)?;
    Ok(Outcome::residual(
        format!("q1−p1 at t_P: {a:e}; q1−p2 at {cross:.6}: {b:e}"),
        a.abs().max(b.abs()),
        1e-10,
    ))
}

fn check_coincidence(_: &VerifyConfig) -> Result<Outcome> {
    let d =
        recordlaw::q_threshold_count(INF, t_f(), 0)? - recordlaw::p_threshold_count(INF, t_f(), 1)?;
    Ok(Outcome::residual(
        format!("q0(∞,t_F) − p1(∞,t_F): {d:e}"),
        d.abs(),
        1e-10,
    ))
}

fn check_interlacing(_: &VerifyConfig) -> Result<Outcome> {
    let mut margin = INF;
    for k in 1..=16 {
        let s = 0.25 * k as f64;
        let v = [
            recordlaw::eu_marginal_survival(EuKind::A, 1, s)?,
            recordlaw::eu_marginal_survival(EuKind::B, 1, s)?,
            recordlaw::eu_marginal_survival(EuKind::A, 2, s)?,
            recordlaw::eu_marginal_survival(EuKind::B, 2, s)?,
        ];
        for w in v.windows(2) {
            margin = margin.min(w[1] - w[0]);
        }
    }
    Ok(Outcome {
        passed: margin > 0.0,
        metric: Metric::Margin,
        measured: margin,
        detail: format!("smallest gap in A1 < B1 < A2 < B2: {margin:e}"),
    })
}

fn check_digression(_: &VerifyConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for j in 1..=4 {
        let d = optstop::poisson_digression(j)?;
        let jf = j as f64;
        let target = (-jf + jf * jf.ln() - statrs::function::gamma::ln_gamma(jf + 1.0)).exp();
        for v in [Some(d.p_j), Some(d.p_prev), Some(d.q_prev), d.q_prev2]
            .into_iter()
            .flatten()
        {
            worst = worst.max((v - target).abs());
        }
    }
    Ok(Outcome::residual(
        format!("largest deviation from e^(−j) j^j/j!: {worst:e}"),
        worst,
        1e-12,
    ))
}

fn check_inversion(_: &VerifyConfig) -> Result<Outcome> {
    let got = recordlaw::inversion_partial_sum(1, 1.0, 30)?;
    Ok(close("Σ(−1)^(k−1) p_k(1)", got, (-1f64).exp(), 1e-8))
}

fn check_eu_marginals(_: &VerifyConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for s in [0.5, t_f(), 1.0, 2.0] {
        let a = recordlaw::eu_marginal_survival(EuKind::A, 2, s)?
            - recordlaw::eu_marginal_survival(EuKind::A, 1, s)?;
        worst = worst.max((a - recordlaw::p_threshold_count(INF, s, 1)?).abs());
    }
    Ok(Outcome::residual(
        format!("P(A2>s) − P(A1>s) vs p1(∞,s): {worst:e}"),
        worst,
        1e-10,
    ))
}

// Policies.

fn check_fi_monotone(_: &VerifyConfig) -> Result<Outcome> {
    let grid = [0.1, 0.5, t_f(), 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, INF];
    let (mut decrease, mut gap, mut off_curve): (f64, f64, f64) = (0.0, INF, 0.0);
    let mut prev = 0.0;
    for t in grid {
        let v = optstop::value_fi(t)?;
        decrease = decrease.max(prev - v);
        prev = v;
        if t <= t_f() {
            off_curve = off_curve.max((v - recordlaw::p_count(t, 1)?).abs());
        } else if t.is_finite() {
            gap = gap.min(v - recordlaw::p_count(t, 0)?);
        }
    }
    Ok(Outcome {
        passed: decrease <= 0.0 && off_curve < 1e-12 && gap > 0.0,
        metric: Metric::Margin,
        measured: gap,
        detail: format!(
            "largest decrease {decrease:e}; |v − p_1| up to t_F {off_curve:e}; \
             smallest v − p_0 beyond t_F {gap:e}"
        ),
    })
}

fn check_fi_optimal(_: &VerifyConfig) -> Result<Outcome> {
    let best = optstop::value_fi(INF)?;
    let mut margin = INF;
    for s in [0.5, 0.7, 0.9, 1.1, 1.5] {
        margin = margin.min(best - optstop::fi_policy_value(INF, s)?);
    }
    Ok(Outcome {
        passed: margin > 0.0,
        metric: Metric::Margin,
        measured: margin,
        detail: format!("v_F − p1(∞,s) over s off t_F, smallest {margin:e}"),
    })
}

fn check_vc_optimal(_: &VerifyConfig) -> Result<Outcome> {
    let best = optstop::value_vc(INF)?;
    let mut margin = INF;
    for s in [1.5, 1.9, 2.3, 2.7, 3.5] {
        margin = margin.min(best - optstop::vc_policy_value(INF, s)?);
    }
    Ok(Outcome {
        passed: margin > 0.0,
        metric: Metric::Margin,
        measured: margin,
        detail: format!("v_P − q1(∞,s) over s off t_P, smallest {margin:e}"),
    })
}

fn check_stop_time_flat(_: &VerifyConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for s in [0.5, t_f(), 2.0] {
        for xi in [0.2, 0.5, 0.8] {
            let t = 2.0 * s / (1.0 - xi);
            let d = central_diff(|x| optstop::stop_time_cdf(x, xi, s), t, 1e-3)?;
            worst = worst.max(d.abs());
        }
    }
    Ok(Outcome::residual(
        format!("∂f/∂t beyond s/(1−ξ): {worst:e}"),
        worst,
        1e-12,
    ))
}

fn check_winrate(_: &VerifyConfig) -> Result<Outcome> {
    let s = t_f();
    let density = |x: f64| optstop::win_rate_density(x, s);
    let total = quad(|x| density(x).unwrap_or(f64::NAN), 0.0, 1.0)?;
    let mut parts = vec![close("∫ win rate", total, optstop::value_fi(INF)?, 1e-6)];
    let mut worst: f64 = 0.0;
    // Linear extrapolation from interior points against the endpoint value.
    let h = 1e-4;
    for (edge, dir) in [(0.0, 1.0), (1.0, -1.0)] {
        let extrapolated = 2.0 * density(edge + dir * h)? - density(edge + dir * 2.0 * h)?;
        worst = worst.max((extrapolated - density(edge)?).abs());
    }
    parts.push(Outcome::residual(
        format!("endpoint limits: {worst:e}"),
        worst,
        1e-6,
    ));
    parts.push(close("ξ → 1", density(1.0 - 1e-6)?, (-s).exp(), 1e-6));
    Ok(Outcome::join(parts))
}

// Monte Carlo.

fn check_mc_record_counts(cfg: &VerifyConfig) -> Result<Outcome> {
    let cells = 12;
    let mut parts = Vec::new();
    for (i, t) in [0.5, 1.0, 2.0, 5.0].into_iter().enumerate() {
        let rect = Rect::with_area(t, 1.5)?;
        let counts = cfg.mc(100 + i as u64).histogram(cfg.trials, cells, |rng| {
            let atoms = simulate::sample_ppp(rect, rng);
            simulate::extract_records(&atoms, rect).len()
        })?;
        let probs = (0..cells)
            .map(|j| recordlaw::p_count(t, j))
            .collect::<Result<Vec<_>>>()?;
        parts.push(chi2(&format!("t={t}"), &counts, &probs, 0.001)?);
    }
    Ok(Outcome::join(parts))
}

fn check_mc_cut_counts(cfg: &VerifyConfig) -> Result<Outcome> {
    let cells = 10;
    let mut parts = Vec::new();
    for (i, t) in [1.0, 3.0].into_iter().enumerate() {
        let rect = Rect::with_area(t, 1.0)?;
        let counts = cfg.mc(110 + i as u64).histogram(cfg.trials, cells, |rng| {
            let atoms = simulate::sample_ppp(rect, rng);
            let v = rng.random::<f64>() * rect.width;
            let left = &atoms[..atoms.partition_point(|a| a.x < v)];
            simulate::extract_records(left, rect).len()
        })?;
        let probs = (0..cells)
            .map(|j| recordlaw::q_count(t, j))
            .collect::<Result<Vec<_>>>()?;
        parts.push(chi2(&format!("t={t}"), &counts, &probs, 0.001)?);
    }
    Ok(Outcome::join(parts))
}

fn check_mc_first_box(cfg: &VerifyConfig) -> Result<Outcome> {
    let t = 3.0;
    let rect = Rect::with_area(t, 1.0)?;
    let n = cfg.ks_trials();
    let geo = cfg.mc(120).collect(n, |rng| {
        let atoms = simulate::sample_ppp(rect, rng);
        simulate::extract_records(&atoms, rect)
            .box_areas
            .first()
            .copied()
            .unwrap_or(0.0)
    })?;
    let chain = cfg.mc(121).collect(n, |rng| simulate::p_step(t, rng))?;
    Ok(ks(
        "first box area vs P step",
        simulate::ks_two_sample(&geo, &chain)?,
    ))
}

fn check_mc_count_cdf(cfg: &VerifyConfig) -> Result<Outcome> {
    let (t, s) = (4.0, 1.0);
    let cells = 6;
    let rect = Rect::with_area(t, 0.7)?;
    let counts = cfg.mc(130).histogram(cfg.trials, cells, |rng| {
        let atoms = simulate::sample_ppp(rect, rng);
        let r = simulate::extract_records(&atoms, rect);
        r.box_areas.iter().filter(|&&a| a < s).count()
    })?;
    let mut parts = Vec::new();
    for k in 1..=3 {
        let hits: u64 = counts[..k].iter().sum();
        let want: f64 = (0..k)
            .map(|j| recordlaw::p_threshold_count(t, s, j))
            .sum::<Result<f64>>()?;
        let z = freq_z(hits, cfg.trials, want);
        parts.push(Outcome::z(
            format!(
                "k={k}: {:.5} vs {want:.5} (z = {z:.2})",
                hits as f64 / cfg.trials as f64
            ),
            z,
        ));
    }
    Ok(Outcome::join(parts))
}

/// Strip records from the exponential–uniform recursion: depth and box area.
fn eu_depth_area<R: Rng + ?Sized>(k: usize, rng: &mut R) -> (f64, f64) {
    let (mut depth, mut prod) = (0.0, 1.0);
    for _ in 0..k {
        depth += rng.sample::<f64, _>(Exp1) / prod;
        prod *= rng.sample::<f64, _>(Open01);
    }
    (depth, depth * (1.0 - prod))
}

fn check_mc_eu_truncation(cfg: &VerifyConfig) -> Result<Outcome> {
    let t = 5.0;
    let n = cfg.ks_trials() as usize;
    let rect = Rect::new(1.0, t)?;
    let mut parts = Vec::new();
    for k in 1..=2 {
        let eu: Vec<f64> = cfg
            .mc(140 + k as u64)
            .collect(4 * n as u64, |rng| eu_depth_area(k, rng))?
            .into_iter()
            .filter(|&(depth, _)| depth < t)
            .map(|(_, area)| area)
            .take(n)
            .collect();
        let geo: Vec<f64> = cfg
            .mc(150 + k as u64)
            .collect(4 * n as u64, |rng| {
                let atoms = simulate::sample_ppp(rect, rng);
                let r = simulate::extract_records(&atoms, rect);
                (r.len() >= k).then(|| r.box_areas[r.len() - k])
            })?
            .into_iter()
            .flatten()
            .take(n)
            .collect();
        parts.push(ks(&format!("A{k}"), simulate::ks_two_sample(&eu, &geo)?));
    }
    Ok(Outcome::join(parts))
}

fn check_mc_eu_marginals(cfg: &VerifyConfig) -> Result<Outcome> {
    let n = cfg.ks_trials();
    let mut parts = Vec::new();
    for (i, (kind, k)) in [
        (EuKind::A, 1),
        (EuKind::A, 2),
        (EuKind::B, 1),
        (EuKind::B, 2),
    ]
    .into_iter()
    .enumerate()
    {
        let xs = cfg
            .mc(160 + i as u64)
            .collect(n, |rng| simulate::sample_eu(kind, k, rng).expect("k ≥ 1"))?;
        let r = simulate::ks_one_sample(&xs, |s| {
            if s <= 0.0 {
                0.0
            } else {
                1.0 - recordlaw::eu_marginal_survival(kind, k, s).unwrap_or(f64::NAN)
            }
        })?;
        parts.push(ks(&format!("{kind:?}{k}"), r));
    }
    Ok(Outcome::join(parts))
}

fn check_mc_b_vs_c(cfg: &VerifyConfig) -> Result<Outcome> {
    let n = cfg.ks_trials();
    let mut parts = Vec::new();
    for k in 1..=2 {
        let b = cfg.mc(170 + k as u64).collect(n, |rng| {
            simulate::sample_eu(EuKind::B, k, rng).expect("k ≥ 1")
        })?;
        let c = cfg.mc(180 + k as u64).collect(n, |rng| {
            simulate::sample_eu(EuKind::C, k, rng).expect("k ≥ 1")
        })?;
        parts.push(ks(
            &format!("B{k} vs C{k}"),
            simulate::ks_two_sample(&b, &c)?,
        ));
    }
    Ok(Outcome::join(parts))
}

fn check_mc_corange(cfg: &VerifyConfig) -> Result<Outcome> {
    let n = cfg.ks_trials();
    let co = cfg
        .mc(190)
        .collect(n, |rng| simulate::corange_step(2.0, rng))?;
    let q = cfg.mc(191).collect(n, |rng| simulate::q_step(2.0, rng))?;
    Ok(ks(
        "corange step vs Q step",
        simulate::ks_two_sample(&co, &q)?,
    ))
}

fn check_mc_fi(cfg: &VerifyConfig) -> Result<Outcome> {
    let est = simulate::estimate_policy(Problem::FI, INF, t_f(), cfg.trials, &cfg.mc(200))?;
    Ok(sigma("FI(∞)", &est, optstop::value_fi(INF)?))
}

fn check_mc_vc_hc(cfg: &VerifyConfig) -> Result<Outcome> {
    let want = optstop::value_vc(10.0)?;
    let vc = simulate::estimate_policy(Problem::VC, 10.0, t_p(), cfg.trials, &cfg.mc(210))?;
    let hc = simulate::estimate_policy(Problem::HC, 10.0, t_p(), cfg.trials, &cfg.mc(211))?;
    let diff = (vc.mean - hc.mean).abs() / vc.std_error.hypot(hc.std_error);
    Ok(Outcome::join(vec![
        sigma("VC", &vc, want),
        sigma("HC", &hc, want),
        Outcome::z(format!("VC − HC (z = {diff:.2})"), diff),
    ]))
}

fn check_mc_duration(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut parts = Vec::new();
    for (i, (t, s)) in [(5.0, 1.0), (10.0, t_p())].into_iter().enumerate() {
        let est = simulate::estimate_policy(
            Problem::Duration,
            t,
            s,
            cfg.trials,
            &cfg.mc(220 + i as u64),
        )?;
        parts.push(sigma(
            &format!("duration({t},{s:.4})"),
            &est,
            t * recordlaw::q_threshold_count(t, s, 1)?,
        ));
    }
    Ok(Outcome::join(parts))
}

fn check_mc_binpack(cfg: &VerifyConfig) -> Result<Outcome> {
    let est = simulate::estimate_policy(Problem::Binpack, 30.0, t_f(), cfg.trials, &cfg.mc(230))?;
    Ok(sigma("binpack", &est, optstop::value_fi(30.0)?))
}

fn check_mc_stop_coordinate(cfg: &VerifyConfig) -> Result<Outcome> {
    let s = t_f();
    let counts = cfg.mc(240).histogram(cfg.trials, 11, |rng| {
        match simulate::run_policy(Problem::FI, INF, s, rng)
            .expect("valid policy")
            .stop_x
        {
            Some(x) => ((x * 10.0) as usize).min(9),
            None => 10,
        }
    })?;
    let mut below = 0;
    let mut worst: f64 = 0.0;
    for (i, &c) in counts.iter().take(9).enumerate() {
        below += c;
        let xi = (i + 1) as f64 / 10.0;
        worst = worst.max(freq_z(
            below,
            cfg.trials,
            optstop::stop_time_cdf(INF, xi, s)?,
        ));
    }
    Ok(Outcome::z(
        format!("9 quantile points, largest z = {worst:.2}"),
        worst,
    ))
}

fn check_mc_decomposition(cfg: &VerifyConfig) -> Result<Outcome> {
    let s = t_f();
    let d = simulate::decompose_p1(s, cfg.trials, &cfg.mc(250))?;
    let i = e1(s)?.value;
    Ok(Outcome::join(vec![
        sigma("part 1", &d.part1, s.exp_m1() * i),
        sigma(
            "part 2",
            &d.part2,
            ((-s).exp() - s * i) * j_integral(s)?.value,
        ),
        sigma("sum", &d.total, optstop::value_fi(INF)?),
    ]))
}

fn check_mc_determinism(cfg: &VerifyConfig) -> Result<Outcome> {
    let n = cfg.trials.min(20_000);
    let f = |rng: &mut simulate::TrialRng| {
        simulate::run_policy(Problem::HC, 8.0, t_p(), rng)
            .expect("valid policy")
            .win()
    };
    let base = MonteCarlo::sequential(cfg.seed).estimate(n, f)?;
    let mut mismatches = 0;
    for workers in [0, 2, 5] {
        let other = MonteCarlo::new(cfg.seed)
            .with_workers(workers)
            .estimate(n, f)?;
        mismatches += (other != base) as u32;
    }
    Ok(Outcome::residual(
        format!("{mismatches} of 3 worker counts differ from the sequential run"),
        mismatches as f64,
        0.0,
    ))
}

macro_rules! checks {
    ($($suite:ident $name:literal => $f:ident),* $(,)?) => {
        vec![$(Check { name: $name, suite: Suite::$suite, run: $f }),*]
    };
}

pub fn registry() -> Vec<Check> {
    checks![
        Identities "i-additivity" => check_i_additivity,
        Identities "i2-reduction" => check_i2_reduction,
        Identities "j-quadrature" => check_j_quadrature,
        Identities "nested-identity" => check_nested_identity,
        Identities "threshold-tF" => check_tf,
        Identities "threshold-tP" => check_tp,
        Identities "value-vF" => check_vf,
        Identities "greedy-optimum" => check_greedy,
        Identities "value-vP" => check_vp,
        Identities "normalization" => check_normalization,
        Identities "p-recursion" => check_p_recursion,
        Identities "q-recursion" => check_q_recursion,
        Identities "cesaro" => check_cesaro,
        Identities "p-q-relation" => check_pq_relation,
        Identities "duality" => check_duality,
        Identities "no-selection-coincidence" => check_coincidence,
        Identities "interlacing" => check_interlacing,
        Identities "poisson-digression" => check_digression,
        Identities "inversion" => check_inversion,
        Identities "eu-marginals" => check_eu_marginals,
        Identities "fi-monotone" => check_fi_monotone,
        Identities "fi-threshold-optimal" => check_fi_optimal,
        Identities "vc-threshold-optimal" => check_vc_optimal,
        Identities "stop-time-flat" => check_stop_time_flat,
        Identities "win-rate" => check_winrate,
        Mc "mc-record-counts" => check_mc_record_counts,
        Mc "mc-cut-counts" => check_mc_cut_counts,
        Mc "mc-first-box-area" => check_mc_first_box,
        Mc "mc-count-cdf" => check_mc_count_cdf,
        Mc "mc-eu-truncation" => check_mc_eu_truncation,
        Mc "mc-eu-marginals" => check_mc_eu_marginals,
        Mc "mc-b-vs-c" => check_mc_b_vs_c,
        Mc "mc-corange" => check_mc_corange,
        Mc "mc-fi-infinite" => check_mc_fi,
        Mc "mc-vc-hc" => check_mc_vc_hc,
        Mc "mc-duration" => check_mc_duration,
        Mc "mc-binpack" => check_mc_binpack,
        Mc "mc-stop-coordinate" => check_mc_stop_coordinate,
        Mc "mc-decomposition" => check_mc_decomposition,
        Mc "mc-determinism" => check_mc_determinism,
    ]
}

/// Runs every check in the selected suites (`None` runs all).
pub fn run(suite: Option<Suite>, cfg: &VerifyConfig) -> Vec<CheckResult> {
    registry()
        .iter()
        .filter(|c| suite.is_none_or(|s| s == c.suite))
        .map(|c| c.run(cfg))
        .collect()
}
