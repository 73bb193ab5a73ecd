//! Threshold policies simulated on explicit configurations.

use rand::Rng;
use rand_distr::{Exp1, Open01};

use super::chains::EuWalker;
use super::ppp::{poisson_count, sample_ppp, Atom, Rect};
use super::runner::{MCEstimate, MonteCarlo};
use crate::error::{domain, Error, Result};
use crate::recordlaw::EuKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    /// Full information: stop on a record, win if it is the last record.
    FI,
    /// Vertical cut: only records left of a hidden uniform vertical cut count.
    VC,
    /// Horizontal cut: upper records are below a hidden uniform horizontal cut.
    HC,
    /// Reward is the time the selected record stays the current maximum.
    Duration,
    /// Recognise the last item packed greedily into a unit bin.
    Binpack,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyOutcome {
    pub stopped: bool,
    pub success: bool,
    /// Horizontal coordinate of the selected atom.
    pub stop_x: Option<f64>,
    /// Holding time for the duration problem; otherwise 0.
    pub reward: f64,
}

impl PolicyOutcome {
    const NO_STOP: PolicyOutcome = PolicyOutcome {
        stopped: false,
        success: false,
        stop_x: None,
        reward: 0.0,
    };

    fn stop(x: f64, success: bool) -> Self {
        Self {
            stopped: true,
            success,
            stop_x: Some(x),
            reward: 0.0,
        }
    }

    pub fn win(&self) -> f64 {
        if self.success {
            1.0
        } else {
            0.0
        }
    }
}

/// Simulates the threshold rule `π_s` once. The rectangle is
/// `[0, t] × [0, 1]`, or the strip `[0, 1] × [−∞, 0]` for `t = ∞`
/// (FI and VC only), where the stop coordinate lies in `[0, 1]`.
pub fn run_policy<R: Rng + ?Sized>(
    problem: Problem,
    t: f64,
    s: f64,
    rng: &mut R,
) -> Result<PolicyOutcome> {
    validate(problem, t, s)?;
    Ok(simulate(problem, t, s, rng))
}

fn validate(problem: Problem, t: f64, s: f64) -> Result<()> {
    if !(s > 0.0) {
        return Err(domain(
            "run_policy",
            format!("threshold must be positive, got {s}"),
        ));
    }
    if !(t >= 0.0) {
        return Err(domain(
            "run_policy",
            format!("area must be nonnegative, got {t}"),
        ));
    }
    if t.is_infinite() && !matches!(problem, Problem::FI | Problem::VC) {
        return Err(Error::Unsupported(format!(
            "{problem:?} has no semi-infinite simulation"
        )));
    }
    Ok(())
}

fn simulate<R: Rng + ?Sized>(problem: Problem, t: f64, s: f64, rng: &mut R) -> PolicyOutcome {
    match (problem, t.is_infinite()) {
        (Problem::FI, true) => run_strip(EuKind::A, s, rng),
        (Problem::VC, true) => run_strip(EuKind::B, s, rng),
        (Problem::FI, _) => run_fi(t, s, rng),
        (Problem::VC, _) => run_vc(t, s, rng),
        (Problem::HC, _) => run_hc(t, s, rng),
        (Problem::Duration, _) => run_duration(t, s, rng),
        (Problem::Binpack, _) => run_binpack(t, s, rng),
    }
}

/// Best-choice frequency of `π_s` over `n` trials (mean reward for the
/// duration problem).
pub fn estimate_policy(
    problem: Problem,
    t: f64,
    s: f64,
    n: u64,
    mc: &MonteCarlo,
) -> Result<MCEstimate> {
    validate(problem, t, s)?;
    mc.estimate(n, |rng| {
        let out = simulate(problem, t, s, rng);
        match problem {
            Problem::Duration => out.reward,
            _ => out.win(),
        }
    })
}

/// Reversed records of the semi-infinite strip from the EU construction;
/// `π_s` selects the deepest record with box area below `s`.
fn run_strip<R: Rng + ?Sized>(kind: EuKind, s: f64, rng: &mut R) -> PolicyOutcome {
    let mut walker = EuWalker::new(kind, rng);
    let mut selected: Option<(usize, f64)> = None;
    let mut k = 0;
    loop {
        let area = walker.next_area(rng);
        k += 1;
        if !(area < s) {
            break;
        }
        selected = Some((k, walker.x()));
    }
    match selected {
        None => PolicyOutcome::NO_STOP,
        Some((k, x)) => PolicyOutcome::stop(x, k == 1),
    }
}

/// Index of the first upper record with box area `(t − x)(1 − y) < s`
/// among `atoms`, and whether any later atom beats it.
fn select_fi(atoms: &[Atom], t: f64, s: f64) -> Option<(usize, bool)> {
    let mut top = f64::NEG_INFINITY;
    for (i, a) in atoms.iter().enumerate() {
        if a.y > top {
            top = a.y;
            if (t - a.x) * (1.0 - a.y) < s {
                let beaten = atoms[i + 1..].iter().any(|b| b.y > a.y);
                return Some((i, !beaten));
            }
        }
    }
    None
}

fn run_fi<R: Rng + ?Sized>(t: f64, s: f64, rng: &mut R) -> PolicyOutcome {
    let atoms = sample_ppp(
        Rect {
            width: t,
            height: 1.0,
        },
        rng,
    );
    match select_fi(&atoms, t, s) {
        None => PolicyOutcome::NO_STOP,
        Some((i, last)) => PolicyOutcome::stop(atoms[i].x, last),
    }
}

fn run_vc<R: Rng + ?Sized>(t: f64, s: f64, rng: &mut R) -> PolicyOutcome {
    let atoms = sample_ppp(
        Rect {
            width: t,
            height: 1.0,
        },
        rng,
    );
    let v = rng.random::<f64>() * t;
    let visible = atoms.partition_point(|a| a.x < v);
    match select_fi(&atoms[..visible], t, s) {
        None => PolicyOutcome::NO_STOP,
        Some((i, last)) => PolicyOutcome::stop(atoms[i].x, last),
    }
}

fn run_duration<R: Rng + ?Sized>(t: f64, s: f64, rng: &mut R) -> PolicyOutcome {
    let atoms = sample_ppp(
        Rect {
            width: t,
            height: 1.0,
        },
        rng,
    );
    match select_fi(&atoms, t, s) {
        None => PolicyOutcome::NO_STOP,
        Some((i, last)) => {
            let a = atoms[i];
            let next = atoms[i + 1..].iter().find(|b| b.y > a.y).map_or(t, |b| b.x);
            PolicyOutcome {
                reward: next - a.x,
                ..PolicyOutcome::stop(a.x, last)
            }
        }
    }
}

/// Horizontal-cut problem on `rect` with cut at `h`: stop at the first upper
/// record whose corange-box area `(above − y)(width − x)` is below `s`, where
/// `above` is the lowest atom seen above the cut (the top side if none).
/// Returns the selected atom index and whether it is the highest atom below
/// the cut.
fn select_hc(atoms: &[Atom], rect: Rect, h: f64, s: f64) -> Option<(usize, bool)> {
    let mut below = f64::NEG_INFINITY;
    let mut above = rect.height;
    for (i, a) in atoms.iter().enumerate() {
        if a.y < h {
            if a.y > below {
                below = a.y;
                if (above - a.y) * (rect.width - a.x) < s {
                    let beaten = atoms[i + 1..].iter().any(|b| b.y < h && b.y > a.y);
                    return Some((i, !beaten));
                }
            }
        } else if a.y < above {
            above = a.y;
        }
    }
    None
}

fn run_hc<R: Rng + ?Sized>(t: f64, s: f64, rng: &mut R) -> PolicyOutcome {
    let rect = Rect {
        width: t,
        height: 1.0,
    };
    let atoms = sample_ppp(rect, rng);
    let h: f64 = rng.random();
    match select_hc(&atoms, rect, h, s) {
        None => PolicyOutcome::NO_STOP,
        Some((i, last)) => PolicyOutcome::stop(atoms[i].x, last),
    }
}

/// Items of uniform size arrive at unit rate on `[0, t]` and are packed
/// greedily into a unit bin. The state after packing at time `τ` is
/// `capacity × (t − τ)`; stop at the first packing whose state is below `s`
/// and win if no later item is packed.
fn run_binpack<R: Rng + ?Sized>(t: f64, s: f64, rng: &mut R) -> PolicyOutcome {
    let n = poisson_count(t, rng);
    let mut arrivals: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>() * t, rng.random::<f64>()))
        .collect();
    arrivals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut capacity = 1.0;
    let mut stop: Option<f64> = None;
    for &(tau, size) in &arrivals {
        if size <= capacity {
            if let Some(x) = stop {
                return PolicyOutcome::stop(x, false);
            }
            capacity -= size;
            if capacity * (t - tau) < s {
                stop = Some(tau);
            }
        }
    }
    match stop {
        None => PolicyOutcome::NO_STOP,
        Some(x) => PolicyOutcome::stop(x, true),
    }
}

/// Outcomes of the two observers in the square with both cuts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorVerOutcome {
    pub hor: PolicyOutcome,
    pub ver: PolicyOutcome,
}

impl HorVerOutcome {
    /// Whether the two observers selected different atoms (or only one stopped).
    pub fn disagree(&self) -> bool {
        self.hor.stop_x != self.ver.stop_x
    }
}

/// Square of area `t` with uniform cuts `H`, `V` meeting at `O`; both
/// observers target the highest atom south-west of `O` using threshold `s`.
///
/// Hor knows `V`, ignores atoms to its right and plays the horizontal-cut
/// problem on `[0, V] × [0, side]`. Ver knows `H`, ignores atoms above it and,
/// not knowing `V`, plays the vertical-cut problem on `[0, side] × [0, H]`
/// with box areas to the right side.
pub fn run_horver_square<R: Rng + ?Sized>(t: f64, s: f64, rng: &mut R) -> Result<HorVerOutcome> {
    if !(t > 0.0 && t.is_finite()) || !(s > 0.0) {
        return Err(domain(
            "run_horver_square",
            format!("need t > 0 finite and s > 0, got t={t}, s={s}"),
        ));
    }
    let side = t.sqrt();
    let square = Rect {
        width: side,
        height: side,
    };
    let atoms = sample_ppp(square, rng);
    let h = rng.random::<f64>() * side;
    let v = rng.random::<f64>() * side;
    let left = &atoms[..atoms.partition_point(|a| a.x < v)];

    let hor = match select_hc(
        left,
        Rect {
            width: v,
            height: side,
        },
        h,
        s,
    ) {
        None => PolicyOutcome::NO_STOP,
        Some((i, last)) => PolicyOutcome::stop(left[i].x, last),
    };

    let below: Vec<Atom> = atoms.iter().copied().filter(|a| a.y < h).collect();
    let mut ver = PolicyOutcome::NO_STOP;
    let mut top = f64::NEG_INFINITY;
    for (i, a) in below.iter().enumerate() {
        if a.y > top {
            top = a.y;
            if (side - a.x) * (h - a.y) < s {
                let last = a.x < v && !below[i + 1..].iter().any(|b| b.x < v && b.y > a.y);
                ver = PolicyOutcome::stop(a.x, last);
                break;
            }
        }
    }
    Ok(HorVerOutcome { hor, ver })
}

/// Monte Carlo frequencies of the two parts of `P(A₁ < s < A₂)` split on
/// whether `A₂` exceeds `s` already before the second uniform break:
/// part 1 is `E₁(1−U₁) < s < (E₁ + E₂/U₁)(1−U₁)`, part 2 is
/// `(E₁ + E₂/U₁)(1−U₁) < s < (E₁ + E₂/U₁)(1−U₁U₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub part1: MCEstimate,
    pub part2: MCEstimate,
    pub total: MCEstimate,
}

pub fn decompose_p1(s: f64, n: u64, mc: &MonteCarlo) -> Result<Decomposition> {
    if !(s > 0.0) {
        return Err(domain(
            "decompose_p1",
            format!("threshold must be positive, got {s}"),
        ));
    }
    let [part1, part2, total] = mc.estimate_many(n, |rng| {
        let e1: f64 = rng.sample(Exp1);
        let e2: f64 = rng.sample(Exp1);
        let u1: f64 = rng.sample(Open01);
        let u2: f64 = rng.sample(Open01);
        let a1 = e1 * (1.0 - u1);
        let depth = e1 + e2 / u1;
        let mid = depth * (1.0 - u1);
        let a2 = depth * (1.0 - u1 * u2);
        let p1 = a1 < s && s < mid;
        let p2 = mid < s && s < a2;
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        [ind(p1), ind(p2), ind(p1 || p2)]
    })?;
    Ok(Decomposition {
        part1,
        part2,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::runner::trial_rng;

    #[test]
    fn success_implies_stop() {
        let mut rng = trial_rng(3, 0);
        for problem in [
            Problem::FI,
            Problem::VC,
            Problem::HC,
            Problem::Duration,
            Problem::Binpack,
        ] {
            for _ in 0..200 {
                let out = run_policy(problem, 6.0, 1.5, &mut rng).unwrap();
                assert!(!out.success || out.stopped);
                assert_eq!(out.stopped, out.stop_x.is_some());
            }
        }
    }

    #[test]
    fn unsupported_strip_problems() {
        let mut rng = trial_rng(3, 1);
        assert!(matches!(
            run_policy(Problem::HC, f64::INFINITY, 1.0, &mut rng),
            Err(Error::Unsupported(_))
        ));
        assert!(run_policy(Problem::FI, f64::INFINITY, 1.0, &mut rng).is_ok());
    }

    #[test]
    fn tiny_threshold_never_stops() {
        let mut rng = trial_rng(3, 2);
        for _ in 0..500 {
            let out = run_policy(Problem::FI, 5.0, 1e-300, &mut rng).unwrap();
            assert!(!out.stopped);
        }
    }

    #[test]
    fn hc_selection_on_a_fixed_configuration() {
        let rect = Rect {
            width: 4.0,
            height: 1.0,
        };
        let atoms = [
            Atom { x: 0.5, y: 0.2 },
            Atom { x: 1.0, y: 0.9 },
            Atom { x: 3.5, y: 0.4 },
        ];
        // cut at 0.6: upper records 0.2 and 0.4, lower record 0.9
        let sel = select_hc(&atoms, rect, 0.6, 1.0).unwrap();
        assert_eq!(sel, (2, true));
    }
}
