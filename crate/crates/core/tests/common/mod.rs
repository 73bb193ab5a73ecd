//! Reference implementations used only by the integration tests. None of
//! them share code with the library: integrals use adaptive Simpson, counts
//! use the permutation-record recurrence instead of Stirling numbers.

#![allow(dead_code)]

use std::f64::consts::E;

/// Adaptive Simpson quadrature on a finite interval.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol.max(1e-15 * whole.abs()) {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Plain bisection on a sign change.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `E₁(x) = ∫_x^∞ e^{−y}/y dy = e^{−x} ∫₀¹ dv/(x − ln v)`.
pub fn e1(x: f64) -> f64 {
    let f = |v: f64| if v == 0.0 { 0.0 } else { 1.0 / (x - v.ln()) };
    (-x).exp() * simpson(&f, 0.0, 1.0, 1e-14 / (1.0 + x))
}

/// `J(t) = ∫₀^t (e^y − 1)/y dy`, valid for negative `t` as well.
pub fn j(t: f64) -> f64 {
    let f = |y: f64| if y == 0.0 { 1.0 } else { y.exp_m1() / y };
    simpson(&f, 0.0, t, 1e-14)
}

/// `I(t, s) = ∫_s^t e^{−y}/y dy`; `t` may be infinite.
pub fn i(t: f64, s: f64) -> f64 {
    if t.is_infinite() {
        e1(s)
    } else {
        simpson(&|y: f64| (-y).exp() / y, s, t, 1e-15)
    }
}

/// `I₂(t, s) = ∫_s^t e^{−y}/y² dy`; `t` may be infinite.
pub fn i2(t: f64, s: f64) -> f64 {
    let upper = if t.is_infinite() { s + 60.0 } else { t };
    simpson(&|y: f64| (-y).exp() / (y * y), s, upper, 1e-15)
}

/// `law[m][j]`: probability that `m` exchangeable values have exactly `j`
/// left-to-right maxima, from `P_m(j) = P_{m−1}(j−1)/m + P_{m−1}(j)(m−1)/m`.
pub fn record_law(max_m: usize) -> Vec<Vec<f64>> {
    let mut law = vec![vec![1.0]];
    for m in 1..=max_m {
        let prev = &law[m - 1];
        let mf = m as f64;
        let mut row = vec![0.0; m + 1];
        for (jj, &p) in prev.iter().enumerate() {
            row[jj] += p * (mf - 1.0) / mf;
            row[jj + 1] += p / mf;
        }
        law.push(row);
    }
    law
}

fn poisson_weights(t: f64) -> Vec<f64> {
    let n_max = (t + 12.0 * t.sqrt() + 60.0) as usize;
    let mut w = Vec::with_capacity(n_max + 1);
    let mut cur = (-t).exp();
    for n in 0..=n_max {
        if n > 0 {
            cur *= t / n as f64;
        }
        w.push(cur);
    }
    w
}

fn law_at(law: &[Vec<f64>], m: usize, jj: usize) -> f64 {
    law[m].get(jj).copied().unwrap_or(0.0)
}

/// Probability of exactly `j` records among Poisson(`t`) atoms.
pub fn p_count(t: f64, jj: usize) -> f64 {
    let w = poisson_weights(t);
    let law = record_law(w.len());
    w.iter()
        .enumerate()
        .map(|(n, wn)| wn * law_at(&law, n, jj))
        .sum()
}

/// Records left of a uniform cut: given `n` atoms, the number to the left of
/// the cut is uniform on `0..=n`.
pub fn q_count(t: f64, jj: usize) -> f64 {
    let w = poisson_weights(t);
    let law = record_law(w.len());
    let mut total = 0.0;
    let mut running = 0.0;
    for (n, wn) in w.iter().enumerate() {
        running += law_at(&law, n, jj);
        total += wn * running / (n as f64 + 1.0);
    }
    total
}

/// `e^{−t} tʲ / j!`.
pub fn poisson_pmf(t: f64, jj: usize) -> f64 {
    (0..jj).fold((-t).exp(), |acc, k| acc * t / (k + 1) as f64)
}

pub fn inv_e() -> f64 {
    1.0 / E
}

/// Central difference with step `h`.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// `|a − b| ≤ tol` with a readable failure message.
#[track_caller]
pub fn assert_close(label: &str, got: f64, want: f64, tol: f64) {
    assert!(
        (got - want).abs() <= tol,
        "{label}: got {got:.15e}, want {want:.15e}, diff {:.3e} > {tol:e}",
        (got - want).abs()
    );
}

/// Frequency check at `k` binomial standard errors.
#[track_caller]
pub fn assert_freq(label: &str, hits: u64, n: u64, p: f64, k: f64) {
    let freq = hits as f64 / n as f64;
    let se = (p * (1.0 - p) / n as f64).sqrt();
    assert!(
        (freq - p).abs() <= k * se,
        "{label}: frequency {freq:.6} vs {p:.6} (se {se:.2e}, z {:.2})",
        (freq - p).abs() / se
    );
}
