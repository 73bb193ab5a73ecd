//! Goodness-of-fit statistics: Kolmogorov–Smirnov and Pearson χ².

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi2Result {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Kolmogorov limiting tail `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²λ²}`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value with the small-sample correction of Stephens.
fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let root = n_eff.sqrt();
    kolmogorov_q((root + 0.12 + 0.11 / root) * d)
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(Error::Degenerate("KS test needs a nonempty sample".into()));
    }
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::Degenerate("KS test sample contains NaN".into()));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Two-sample KS test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    let a = sorted(a)?;
    let b = sorted(b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(KsResult {
        statistic: d,
        p_value: ks_p_value(d, na * nb / (na + nb)),
    })
}

/// One-sample KS test against a continuous CDF.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    let v = sorted(xs)?;
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(KsResult {
        statistic: d,
        p_value: ks_p_value(d, n),
    })
}

/// Pearson χ² goodness of fit. Adjacent cells are pooled from the left until
/// each expected count is at least 5; a short remainder joins the last pooled
/// cell. `expected` is rescaled to the observed total.
pub fn chi2_gof(observed: &[u64], expected: &[f64]) -> Result<Chi2Result> {
    if observed.len() != expected.len() || observed.is_empty() {
        return Err(Error::Degenerate(
            "χ² needs equal-length nonempty cell vectors".into(),
        ));
    }
    if expected.iter().any(|&e| !(e >= 0.0)) {
        return Err(Error::Degenerate(
            "χ² expected counts must be nonnegative".into(),
        ));
    }
    let total_obs: u64 = observed.iter().sum();
    let total_exp: f64 = expected.iter().sum();
    if total_obs == 0 || total_exp <= 0.0 {
        return Err(Error::Degenerate("χ² needs positive totals".into()));
    }
    let scale = total_obs as f64 / total_exp;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&obs, &exp) in observed.iter().zip(expected) {
        o += obs as f64;
        e += exp * scale;
        if e >= 5.0 {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => cells.push((o, e)),
        }
    }
    if cells.len() < 2 {
        return Err(Error::Degenerate(
            "χ² needs at least two cells after pooling".into(),
        ));
    }
    let statistic: f64 = cells.iter().map(|&(o, e)| (o - e).powi(2) / e).sum();
    let dof = cells.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Degenerate(e.to_string()))?;
    Ok(Chi2Result {
        statistic,
        dof,
        p_value: dist.sf(statistic),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples() {
        let x: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let r = ks_two_sample(&x, &x).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn empty_is_degenerate() {
        assert!(ks_two_sample(&[], &[1.0]).is_err());
        assert!(chi2_gof(&[], &[]).is_err());
    }

    #[test]
    fn kolmogorov_tail_values() {
        // Q(1.36) ≈ 0.049, Q(1.63) ≈ 0.0098
        assert!((kolmogorov_q(1.36) - 0.0494).abs() < 1e-3);
        assert!((kolmogorov_q(1.63) - 0.0098).abs() < 5e-4);
    }

    #[test]
    fn chi2_exact_fit() {
        let r = chi2_gof(&[10, 20, 30], &[10.0, 20.0, 30.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }
}
