//! Sharded jobs with additive tallies, work and wall-clock budgets, and
//! resumption from a set of completed shards.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A computation split into independent shards whose results add up.
pub trait ShardedJob: Sync {
    fn shard_count(&self) -> usize;
    /// Estimated work units of a shard, charged against the work budget.
    fn shard_cost(&self, shard: usize) -> u64;
    fn tally_width(&self) -> usize;
    fn run_shard(&self, shard: usize) -> Vec<u64>;

    fn total_cost(&self) -> u128 {
        (0..self.shard_count()).map(|s| self.shard_cost(s) as u128).sum()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    pub max_work: Option<u64>,
    pub max_seconds: Option<f64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }
}

/// Completed shards and the running sum of their tallies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    pub shards_total: usize,
    pub completed: Vec<bool>,
    pub tally: Vec<u64>,
}

impl Progress {
    pub fn new(shards: usize, width: usize) -> Self {
        Progress { shards_total: shards, completed: vec![false; shards], tally: vec![0; width] }
    }

    pub fn done_count(&self) -> usize {
        self.completed.iter().filter(|&&d| d).count()
    }

    pub fn is_complete(&self) -> bool {
        self.completed.iter().all(|&d| d)
    }

    fn absorb(&mut self, shard: usize, t: &[u64]) {
        debug_assert!(!self.completed[shard]);
        self.completed[shard] = true;
        for (a, b) in self.tally.iter_mut().zip(t) {
            *a += b;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Complete(Vec<u64>),
    /// Stopped by a budget; resumable from this progress.
    Partial(Progress),
}

pub struct Runner {
    pub jobs: usize,
    pub budget: Budget,
}

impl Runner {
    pub fn new(jobs: usize) -> Self {
        Runner { jobs: jobs.max(1), budget: Budget::unlimited() }
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    /// Runs pending shards in waves; `checkpoint` sees the progress after each wave.
    pub fn run<J: ShardedJob + ?Sized>(
        &self,
        job: &J,
        prior: Option<Progress>,
        mut checkpoint: impl FnMut(&Progress),
    ) -> Outcome {
        let n = job.shard_count();
        let mut progress = match prior {
            Some(p) if p.shards_total == n && p.tally.len() == job.tally_width() => p,
            _ => Progress::new(n, job.tally_width()),
        };
        let pool = rayon::ThreadPoolBuilder::new().num_threads(self.jobs).build().expect("thread pool");
        let start = Instant::now();
        let mut spent: u64 = 0;
        let mut pending: Vec<usize> = (0..n).filter(|&s| !progress.completed[s]).collect();
        pending.reverse();
        let wave = self.jobs * 2;
        while !pending.is_empty() {
            if let Some(limit) = self.budget.max_seconds {
                if start.elapsed().as_secs_f64() >= limit {
                    return Outcome::Partial(progress);
                }
            }
            let mut batch = Vec::new();
            while batch.len() < wave {
                let Some(&s) = pending.last() else { break };
                let cost = job.shard_cost(s);
                if let Some(max) = self.budget.max_work {
                    if spent.saturating_add(cost) > max {
                        break;
                    }
                }
                spent = spent.saturating_add(cost);
                batch.push(s);
                pending.pop();
            }
            if batch.is_empty() {
                return Outcome::Partial(progress);
            }
            let results: Vec<(usize, Vec<u64>)> =
                pool.install(|| batch.par_iter().map(|&s| (s, job.run_shard(s))).collect());
            for (s, t) in results {
                progress.absorb(s, &t);
            }
            checkpoint(&progress);
        }
        Outcome::Complete(progress.tally)
    }
}

/// Runs a job to completion without budgets.
pub fn run_to_end<J: ShardedJob + ?Sized>(job: &J, jobs: usize) -> Vec<u64> {
    match Runner::new(jobs).run(job, None, |_| {}) {
        Outcome::Complete(t) => t,
        Outcome::Partial(_) => unreachable!("no budget set"),
    }
}
