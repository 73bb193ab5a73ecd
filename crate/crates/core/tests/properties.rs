use proptest::prelude::*;
use reccalc::optstop;
use reccalc::recordlaw;
use reccalc::simulate::{self, MonteCarlo, Problem};
use reccalc::specfun;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn i_additive(s in 0.01f64..5.0, d1 in 0.0f64..5.0, d2 in 0.0f64..20.0) {
        let (m, t) = (s + d1, s + d1 + d2);
        let whole = specfun::i_integral(t, s).unwrap().value;
        let parts = specfun::i_integral(m, s).unwrap().value + specfun::i_integral(t, m).unwrap().value;
        prop_assert!((whole - parts).abs() < 1e-12);
        prop_assert!(whole >= 0.0);
    }

    #[test]
    fn counts_are_distributions(t in 0.0f64..25.0) {
        let p = recordlaw::p_distribution(t).unwrap();
        let q = recordlaw::q_distribution(t.max(1e-9)).unwrap();
        for d in [&p, &q] {
            prop_assert!((d.total() - 1.0).abs() < 1e-10);
            prop_assert!(d.probs.iter().all(|&x| (-1e-15..=1.0 + 1e-15).contains(&x)));
        }
    }

    #[test]
    fn threshold_counts_sum_to_one(s in 0.05f64..4.0, extra in 0.0f64..10.0, infinite in any::<bool>()) {
        let t = if infinite { f64::INFINITY } else { s + extra };
        let p: f64 = (0..60).map(|j| recordlaw::p_threshold_count(t, s, j).unwrap()).sum();
        let q: f64 = (0..60).map(|j| recordlaw::q_threshold_count(t, s, j).unwrap()).sum();
        prop_assert!((p - 1.0).abs() < 1e-9, "p total {p}");
        prop_assert!((q - 1.0).abs() < 1e-9, "q total {q}");
    }

    #[test]
    fn transitions_partition(t in 0.01f64..30.0, frac in 0.001f64..1.0) {
        let s = t * frac;
        let q0 = recordlaw::q_count(t, 0).unwrap();
        let q = recordlaw::q_transition(t, s).unwrap() + recordlaw::q_transition_upper(t, s).unwrap();
        prop_assert!((q - (1.0 - q0)).abs() < 1e-12);
        let p = recordlaw::p_transition(t, s).unwrap();
        prop_assert!((0.0..=1.0 - (-t).exp() + 1e-12).contains(&p));
    }

    #[test]
    fn first_visit_decreasing(s in 0.1f64..3.0, extra in 0.0f64..5.0, a in 0.01f64..1.0, b in 0.01f64..1.0) {
        let t = s + extra;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let f_lo = recordlaw::first_visit_cdf_p(t, s, lo * s).unwrap();
        let f_hi = recordlaw::first_visit_cdf_p(t, s, hi * s).unwrap();
        prop_assert!(f_lo >= f_hi - 1e-14);
    }

    #[test]
    fn stop_time_monotone_in_xi(s in 0.1f64..4.0, a in 0.0f64..0.999, b in 0.0f64..0.999) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let f_lo = optstop::stop_time_cdf(f64::INFINITY, lo, s).unwrap();
        let f_hi = optstop::stop_time_cdf(f64::INFINITY, hi, s).unwrap();
        prop_assert!(f_lo <= f_hi + 1e-14);
        prop_assert!((0.0..=1.0).contains(&f_hi));
    }

    #[test]
    fn win_rate_nonnegative(s in 0.1f64..4.0, xi in 0.0f64..=1.0) {
        let d = optstop::win_rate_density(xi, s).unwrap();
        prop_assert!(d >= 0.0 && d.is_finite());
    }

    #[test]
    fn eu_survival_monotone(k in 1usize..4, a in 0.05f64..5.0, b in 0.05f64..5.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        for kind in [recordlaw::EuKind::A, recordlaw::EuKind::B] {
            let s_lo = recordlaw::eu_marginal_survival(kind, k, lo).unwrap();
            let s_hi = recordlaw::eu_marginal_survival(kind, k, hi).unwrap();
            prop_assert!(s_lo >= s_hi - 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&s_lo));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn estimates_reproducible(seed in any::<u64>(), workers in 2usize..6) {
        let f = |rng: &mut simulate::TrialRng| simulate::run_policy(Problem::FI, 6.0, 1.0, rng).unwrap().win();
        let a = MonteCarlo::sequential(seed).estimate(9_000, f).unwrap();
        let b = MonteCarlo::new(seed).with_workers(workers).estimate(9_000, f).unwrap();
        prop_assert_eq!(a, b);
    }
}
