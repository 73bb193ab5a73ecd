//! Deterministic Monte Carlo driver.
//!
//! Trial `i` draws from its own ChaCha8 stream `i` under the master seed, so
//! every trial sees the same numbers however the work is scheduled. Trials are
//! grouped into fixed-size blocks; each block is folded sequentially and the
//! block results are merged in index order. The output is therefore
//! bit-identical for any number of workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type TrialRng = ChaCha8Rng;

/// Trials per block.
pub const BLOCK: u64 = 4096;

/// The generator for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Mean and standard error of a Monte Carlo average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    pub seed: u64,
}

impl MCEstimate {
    /// `|mean − target|` in units of the standard error, with a floor on the
    /// error so that a zero-variance estimate is compared sensibly.
    pub fn z_score(&self, target: f64) -> f64 {
        let se = self.std_error.max(1.0 / self.n as f64);
        (self.mean - target).abs() / se
    }

    /// Whether `target` lies within `k` standard errors.
    pub fn within(&self, target: f64, k: f64) -> bool {
        self.z_score(target) <= k
    }
}

/// Running count, mean and centred second moment, mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * self.n as f64 * other.n as f64 / n as f64;
        self.n = n;
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn estimate(&self, seed: u64) -> MCEstimate {
        MCEstimate {
            mean: self.mean,
            std_error: (self.variance() / self.n as f64).sqrt(),
            n: self.n,
            seed,
        }
    }
}

/// Monte Carlo configuration: master seed and worker count.
///
/// `workers == 1` always runs sequentially. Otherwise, with the `parallel`
/// feature, blocks run on rayon: `0` uses the global pool, any other value a
/// dedicated pool of that size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarlo {
    pub seed: u64,
    pub workers: usize,
}

impl MonteCarlo {
    pub fn new(seed: u64) -> Self {
        Self { seed, workers: 0 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn sequential(seed: u64) -> Self {
        Self { seed, workers: 1 }
    }

    /// Runs `n` trials. `trial` folds trial `i` into a block accumulator
    /// created by `init`; `merge` combines block accumulators in order.
    pub fn map_reduce<T, I, F, M>(&self, n: u64, init: I, trial: F, merge: M) -> Result<T>
    where
        T: Send,
        I: Fn() -> T + Sync + Send,
        F: Fn(&mut TrialRng, u64, &mut T) + Sync + Send,
        M: Fn(&mut T, T),
    {
        if n == 0 {
            return Err(Error::Degenerate(
                "Monte Carlo run needs at least one trial".into(),
            ));
        }
        let blocks = n.div_ceil(BLOCK);
        let seed = self.seed;
        let run_block = |b: u64| {
            let mut acc = init();
            let end = ((b + 1) * BLOCK).min(n);
            for i in b * BLOCK..end {
                let mut rng = trial_rng(seed, i);
                trial(&mut rng, i, &mut acc);
            }
            acc
        };
        let parts = self.run_blocks(blocks, run_block)?;
        let mut iter = parts.into_iter();
        let mut total = iter.next().expect("at least one block");
        for part in iter {
            merge(&mut total, part);
        }
        Ok(total)
    }

    #[cfg(feature = "parallel")]
    fn run_blocks<T, B>(&self, blocks: u64, run_block: B) -> Result<Vec<T>>
    where
        T: Send,
        B: Fn(u64) -> T + Sync + Send,
    {
        use rayon::prelude::*;
        match self.workers {
            1 => Ok((0..blocks).map(run_block).collect()),
            0 => Ok((0..blocks).into_par_iter().map(run_block).collect()),
            w => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(w)
                    .build()
                    .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
                Ok(pool.install(|| (0..blocks).into_par_iter().map(run_block).collect()))
            }
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn run_blocks<T, B>(&self, blocks: u64, run_block: B) -> Result<Vec<T>>
    where
        T: Send,
        B: Fn(u64) -> T + Sync + Send,
    {
        Ok((0..blocks).map(run_block).collect())
    }

    /// Mean and standard error of `f` over `n` trials.
    pub fn estimate<F>(&self, n: u64, f: F) -> Result<MCEstimate>
    where
        F: Fn(&mut TrialRng) -> f64 + Sync + Send,
    {
        let m = self.map_reduce(
            n,
            Moments::default,
            |rng, _, acc| acc.push(f(rng)),
            |a, b| a.merge(b),
        )?;
        Ok(m.estimate(self.seed))
    }

    /// Estimates of several statistics computed from the same trials.
    pub fn estimate_many<const K: usize, F>(&self, n: u64, f: F) -> Result<[MCEstimate; K]>
    where
        F: Fn(&mut TrialRng) -> [f64; K] + Sync + Send,
    {
        let m = self.map_reduce(
            n,
            || [Moments::default(); K],
            |rng, _, acc| {
                for (slot, x) in acc.iter_mut().zip(f(rng)) {
                    slot.push(x);
                }
            },
            |a, b| {
                for (slot, other) in a.iter_mut().zip(b) {
                    slot.merge(other);
                }
            },
        )?;
        Ok(m.map(|x| x.estimate(self.seed)))
    }

    /// All `n` trial outputs, in trial order.
    pub fn collect<T, F>(&self, n: u64, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&mut TrialRng) -> T + Sync + Send,
    {
        self.map_reduce(
            n,
            Vec::new,
            |rng, _, acc: &mut Vec<T>| acc.push(f(rng)),
            |a, b| a.extend(b),
        )
    }

    /// Histogram of `f` over cells `0..cells`; values at or beyond the last
    /// cell are pooled into it.
    pub fn histogram<F>(&self, n: u64, cells: usize, f: F) -> Result<Vec<u64>>
    where
        F: Fn(&mut TrialRng) -> usize + Sync + Send,
    {
        if cells == 0 {
            return Err(Error::Degenerate(
                "histogram needs at least one cell".into(),
            ));
        }
        self.map_reduce(
            n,
            || vec![0u64; cells],
            |rng, _, acc| acc[f(rng).min(cells - 1)] += 1,
            |a, b| a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn moments_merge_matches_direct() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64).sin()).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..37].iter().for_each(|&x| a.push(x));
        xs[37..].iter().for_each(|&x| b.push(x));
        a.merge(b);
        assert!((a.mean - whole.mean).abs() < 1e-14);
        assert!((a.variance() - whole.variance()).abs() < 1e-13);
    }

    #[test]
    fn independent_of_worker_count() {
        let f = |rng: &mut TrialRng| rng.random::<f64>();
        let a = MonteCarlo::sequential(9).estimate(10_000, f).unwrap();
        let b = MonteCarlo::new(9)
            .with_workers(3)
            .estimate(10_000, f)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn streams_differ_by_index() {
        let x: u64 = trial_rng(1, 0).random();
        let y: u64 = trial_rng(1, 1).random();
        assert_ne!(x, y);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(MonteCarlo::new(1).estimate(0, |_| 0.0).is_err());
    }
}
