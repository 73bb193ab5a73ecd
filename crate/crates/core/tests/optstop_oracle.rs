mod common;

use common::{assert_close, bisect};
use reccalc::optstop::{self, t_f, t_p, ValueCurve, ValueProblem};
use reccalc::recordlaw;

const INF: f64 = f64::INFINITY;

fn second_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

#[test]
fn t_f_root() {
    let sol = optstop::solve_tf().unwrap();
    assert_close("t_F", sol.root, 0.804352, 1e-5);
    assert!(sol.bracket.0 >= 0.5 && sol.bracket.1 <= 1.5);
    assert!(sol.defining_residual.abs() < 1e-12);
    let oracle = bisect(|t| common::j(t) - 1.0, 0.5, 1.5);
    assert_close("t_F oracle", sol.root, oracle, 1e-10);
    let (p0, p1) = (
        recordlaw::p_count(sol.root, 0).unwrap(),
        recordlaw::p_count(sol.root, 1).unwrap(),
    );
    assert_close("p_0 = p_1", p0, p1, 1e-10);
    let p1 = |t: f64| recordlaw::p_count(t, 1).unwrap();
    let t = sol.root;
    let h = 1e-3;
    let tangency = t * second_diff(p1, t, h) + (t + 1.0) * common::central_diff(p1, t, h);
    assert!(tangency.abs() < 1e-6, "tangency residual {tangency:e}");
}

#[test]
fn t_p_root() {
    let sol = optstop::solve_tp().unwrap();
    assert_close("t_P", sol.root, 2.11982, 1e-5);
    assert!(sol.bracket.0 >= 1.5 && sol.bracket.1 <= 3.0);
    assert!(sol.defining_residual.abs() < 1e-12);
    let oracle = bisect(|t| common::q_count(t, 0) - common::q_count(t, 1), 1.5, 3.0);
    assert_close("t_P oracle", sol.root, oracle, 1e-9);
    let t = sol.root;
    let r = optstop::tp_residuals(t).unwrap();
    assert!(r.q_equality.abs() < 1e-12);
    for v in [r.exponential_form, r.count_form, r.double_series] {
        assert!(v.abs() < 1e-8, "{r:?}");
    }
    let q1 = |x: f64| recordlaw::q_count(x, 1).unwrap();
    let h = 1e-3;
    let lhs = t * second_diff(q1, t, h) + (t + 2.0) * common::central_diff(q1, t, h);
    let rhs = recordlaw::q_count(t, 0).unwrap() - q1(t);
    assert!(
        (lhs - rhs).abs() < 1e-6,
        "no-corner residual {:e}",
        lhs - rhs
    );
}

#[test]
fn fi_value() {
    assert_close("v_F", optstop::value_fi(INF).unwrap(), 0.580164, 1e-5);
    assert_eq!(optstop::value_fi(0.0).unwrap(), 0.0);
    assert_close(
        "v(0.5)",
        optstop::value_fi(0.5).unwrap(),
        (-0.5f64).exp() * common::j(0.5),
        1e-12,
    );
    let grid = [0.1, 0.5, t_f(), 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, INF];
    let curve = ValueCurve::compute(ValueProblem::FI, &grid).unwrap();
    for w in curve.values.windows(2) {
        assert!(w[1] >= w[0] - 1e-15, "{w:?}");
    }
    for (&t, &v) in grid.iter().zip(&curve.values) {
        assert_close(
            "v = p_1(t, t_F)",
            v,
            recordlaw::p_threshold_count(t, t_f(), 1).unwrap(),
            1e-12,
        );
        if t <= t_f() {
            assert_close("v = p_1", v, recordlaw::p_count(t, 1).unwrap(), 1e-12);
        } else if t.is_finite() {
            assert!(v > recordlaw::p_count(t, 0).unwrap());
        }
    }
}

#[test]
fn fi_threshold_is_optimal() {
    let best = optstop::value_fi(INF).unwrap();
    for s in [0.5, 0.7, 0.9, 1.1, 1.5] {
        let v = optstop::fi_policy_value(INF, s).unwrap();
        assert!(v <= best + 1e-15);
        assert!(best - v > 1e-5, "π_{s} too close to the optimum");
    }
}

#[test]
fn vc_value() {
    let s = t_p();
    let formula =
        common::i(INF, s) * (s.exp() - s * common::j(s) - 1.0) + (-s).exp() * common::j(s);
    assert_close("v_P", optstop::value_vc(INF).unwrap(), formula, 1e-10);
    assert_close("v_P fn", optstop::v_p().unwrap(), formula, 1e-10);
    for t in [0.5, 1.0, 2.0, t_p()] {
        assert_close(
            "u = q_1",
            optstop::value_vc(t).unwrap(),
            recordlaw::q_count(t, 1).unwrap(),
            1e-12,
        );
    }
    for t in [0.5, 3.0, 10.0, INF] {
        assert_eq!(optstop::value_hc(t).unwrap(), optstop::value_vc(t).unwrap());
    }
    let best = optstop::value_vc(INF).unwrap();
    for s in [1.5, 1.9, 2.3, 2.7, 3.5] {
        assert!(optstop::vc_policy_value(INF, s).unwrap() <= best + 1e-15);
    }
}

#[test]
fn greedy() {
    let g = optstop::greedy_optimum().unwrap();
    assert_close("t*", g.area, 1.50286, 1e-4);
    assert_close("p_1(t*)", g.value, 0.51735, 1e-4);
    let oracle = bisect(|t: f64| t.exp_m1() / t - common::j(t), 1.0, 2.0);
    assert_close("t* oracle", g.area, oracle, 1e-9);
    let slope = common::central_diff(|t| recordlaw::p_count(t, 1).unwrap(), g.area, 1e-4);
    assert!(slope.abs() < 1e-8, "p_1'(t*) = {slope:e}");
}

#[test]
fn duration() {
    let t = 10.0;
    let best = optstop::duration_value(t, t_p()).unwrap();
    for s in [0.5 * t_p(), 2.0 * t_p()] {
        assert!(optstop::duration_value(t, s).unwrap() <= best);
    }
    for s in [1.0, 1.5] {
        assert_close(
            "t ≤ s",
            optstop::duration_value(1.0, s).unwrap(),
            recordlaw::q_count(1.0, 1).unwrap(),
            1e-15,
        );
    }
    assert!(optstop::duration_value(0.0, 1.0).is_err());
}

#[test]
fn four_fold_coincidence() {
    let d = optstop::poisson_digression(1).unwrap();
    for v in [d.p_j, d.p_prev, d.q_prev] {
        assert_close("e^{−1}", v, common::inv_e(), 1e-12);
    }
    assert!(d.q_prev2.is_none());
    let d = optstop::poisson_digression(2).unwrap();
    for v in [d.p_j, d.p_prev, d.q_prev, d.q_prev2.unwrap()] {
        assert_close("2e^{−2}", v, 0.270671, 1e-6);
        assert_close("2e^{−2}", v, 2.0 * (-2f64).exp(), 1e-12);
    }
    let d = optstop::poisson_digression(3).unwrap();
    for v in [d.p_j, d.p_prev, d.q_prev, d.q_prev2.unwrap()] {
        assert_close("e^{−3}·27/6", v, (-3f64).exp() * 27.0 / 6.0, 1e-12);
    }
    assert!(optstop::poisson_digression(0).is_err());
}

#[test]
fn stop_time_distribution() {
    assert_close(
        "t < s",
        optstop::stop_time_cdf(0.5, 0.3, 1.0).unwrap(),
        1.0 - (-0.15f64).exp(),
        1e-15,
    );
    for s in [0.5, t_f(), 2.0] {
        let limit = 1.0 - (-s).exp() + s * common::i(INF, s);
        let near = optstop::stop_time_cdf(INF, 1.0 - 1e-9, s).unwrap();
        assert_close("f(∞, 1−, s)", near, limit, 1e-7);
        for xi in [0.2, 0.5, 0.8] {
            let flat = s / (1.0 - xi);
            let a = optstop::stop_time_cdf(flat * 1.5, xi, s).unwrap();
            let b = optstop::stop_time_cdf(flat * 3.0, xi, s).unwrap();
            let c = optstop::stop_time_cdf(INF, xi, s).unwrap();
            assert!((a - b).abs() < 1e-14 && (b - c).abs() < 1e-14);
            let d = common::central_diff(
                |t| optstop::stop_time_cdf(t, xi, s).unwrap(),
                flat * 2.0,
                1e-3,
            );
            assert!(d.abs() < 1e-12);
        }
        let mut prev = 0.0;
        for k in 0..20 {
            let v = optstop::stop_time_cdf(INF, k as f64 / 20.0, s).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        let mut prev = 0.0;
        for t in [0.1, 0.5, 1.0, 3.0, 10.0, 100.0] {
            let v = optstop::stop_time_cdf(t, 0.4, s).unwrap();
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }
    assert!(optstop::stop_time_cdf(1.0, 1.0, 1.0).is_err());
    assert!(optstop::stop_time_cdf(1.0, 0.5, 0.0).is_err());
}

#[test]
fn win_rate() {
    for s in [0.5, t_f(), 1.5, 3.0] {
        let density = |x: f64| optstop::win_rate_density(x, s).unwrap();
        let total = common::simpson(&density, 0.0, 1.0, 1e-12);
        assert_close(
            "∫ density",
            total,
            recordlaw::p_threshold_count(INF, s, 1).unwrap(),
            1e-6,
        );
        assert_close("ξ → 1", density(1.0 - 1e-6), (-s).exp(), 1e-5);
        assert_close("ξ → 0", density(1e-6), 1.0 - (-s).exp(), 1e-5);
    }
    let total = common::simpson(
        &|x| optstop::win_rate_density(x, t_f()).unwrap(),
        0.0,
        1.0,
        1e-12,
    );
    assert_close("∫ density at t_F", total, 0.580164, 1e-5);
    assert!(optstop::win_rate_density(1.5, 1.0).is_err());
}
