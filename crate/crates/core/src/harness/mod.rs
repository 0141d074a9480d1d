//! Command orchestration: cached, budgeted and resumable runs of the census
//! jobs, and the reports they emit.

pub mod cache;
pub mod output;

use std::io;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::arcs::delta::DeltaJob;
use crate::arcs::space::binomial;
use crate::arcs::{base_exponent, default_jobs, ArcCountJob, ArcError};
use crate::fano::{fano_bijection_check, FanoCensusJob, FanoError};
use crate::field::{FieldError, DEFAULT_MAX_DEGREE};
use crate::formulas::{glynn_b7e, pgl3_order, registry_json, table1_value};
use crate::jobs::{Budget, Outcome, Runner, ShardedJob};
use crate::orbits::{stratum_size_formula, CycleType};
use crate::report::{sort_reports, CountReport, Rational};

pub use cache::{Cache, CacheEntry, CacheKey, Status};
pub use output::{render_reports, render_table, Format, TableRow};

/// Default cap on estimated work per job.
pub const DEFAULT_BUDGET_CANDIDATES: u64 = 100_000_000;

/// Minimum spacing of partial-progress writes.
const CHECKPOINT_EVERY: Duration = Duration::from_secs(2);

/// The five rows of the table, in row order.
pub const TABLE_TYPES: [&str; 5] = ["e", "2+2+1+1+1", "3+3+1", "4+2+1", "7"];

/// Types with a Δ-census.
pub const DELTA_TYPES: [&str; 4] = ["2+2+1+1+1", "3+3+1", "4+2+1", "7"];

/// Types whose Fano planes correspond to generating 4-arcs.
const BIJECTION_TYPES: [&str; 3] = ["2+2+1+1+1", "3+3+1", "4+2+1"];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    BadArgument(String),
    #[error(transparent)]
    Arc(#[from] ArcError),
    #[error(transparent)]
    Fano(#[from] FanoError),
    #[error("cache: {0}")]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug)]
pub struct Options {
    pub jobs: usize,
    /// Work cap per job; `None` for no cap.
    pub max_work: Option<u64>,
    /// Wall-clock cap for the whole command.
    pub max_seconds: Option<f64>,
    /// Continue from partial cache entries instead of starting over.
    pub resume: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { jobs: default_jobs(), max_work: Some(DEFAULT_BUDGET_CANDIDATES), max_seconds: None, resume: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Arcs,
    Fano,
    Delta,
}

impl Op {
    pub fn key(&self) -> &'static str {
        match self {
            Op::Arcs => "count_arcs",
            Op::Fano => "fano_census",
            Op::Delta => "delta_census",
        }
    }
}

/// Work estimate in the units the shard costs use. `setup` is the size of
/// the planes swept to build the orbit-class lists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WorkEstimate {
    pub setup: u128,
    pub search: u128,
}

impl WorkEstimate {
    pub fn total(&self) -> u128 {
        self.setup.saturating_add(self.search)
    }
}

fn to_u128(v: &num_bigint::BigUint) -> u128 {
    u128::try_from(v).unwrap_or(u128::MAX)
}

pub fn work_estimate(q: u64, lambda: &CycleType, op: Op) -> WorkEstimate {
    let q = q as u128;
    let plane_size = |s: u32| q.saturating_pow(2 * s).saturating_add(q.saturating_pow(s)).saturating_add(1);
    if lambda.parts() == [7] {
        let big = q.saturating_pow(7);
        return WorkEstimate { setup: 0, search: big.saturating_add(1).saturating_mul(big) };
    }
    if lambda.is_identity() && op == Op::Arcs {
        return WorkEstimate { setup: 0, search: to_u128(pgl3_order(q as u64).magnitude()) };
    }
    let mut setup: u128 = 0;
    let mut search: u128 = 1;
    for (m, s) in lambda.groups() {
        if s > 1 {
            setup = setup.saturating_add(plane_size(s));
        }
        let classes = to_u128(&(stratum_size_formula(q as u64, s) / s));
        let classes = u64::try_from(classes).unwrap_or(u64::MAX);
        search = search.saturating_mul(to_u128(&binomial(classes, m as u64)));
    }
    if op == Op::Delta && lambda.parts() == [3, 3, 1] {
        search = search.saturating_mul(2);
    }
    WorkEstimate { setup, search }
}

/// Checks q and λ without building anything.
pub fn validate(q: u64, lambda: &CycleType) -> Result<(), HarnessError> {
    let s = base_exponent(q)?;
    if lambda.n() != 7 {
        return Err(HarnessError::BadArgument(format!("cycle type {lambda} is not a partition of 7")));
    }
    let degree = s * lambda.lcm();
    if degree > DEFAULT_MAX_DEGREE {
        return Err(ArcError::Field(FieldError::TooLarge { p: 2, degree }).into());
    }
    Ok(())
}

/// A job stopped by a budget before finishing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Incomplete {
    pub key: CacheKey,
    pub shards_done: usize,
    pub shards_total: usize,
    pub estimated_work: u128,
}

impl std::fmt::Display for Incomplete {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "q={} lambda={} {}: {}/{} shards done, estimated work {}",
            self.key.q, self.key.lambda, self.key.operation, self.shards_done, self.shards_total, self.estimated_work
        )
    }
}

enum JobOutcome {
    Done(Vec<CountReport>),
    Stopped(Incomplete),
}

/// Reports of a command plus the jobs its budget cut short.
#[derive(Debug, Default)]
pub struct Run {
    pub reports: Vec<CountReport>,
    pub incomplete: Vec<Incomplete>,
}

impl Run {
    pub fn mismatches(&self) -> usize {
        self.reports.iter().filter(|r| r.matches == Some(false)).count()
    }

    /// 3 on a formula mismatch when `strict`, 2 if a budget ran out, else 0.
    pub fn exit_code(&self, strict: bool) -> i32 {
        if strict && self.mismatches() > 0 {
            3
        } else if !self.incomplete.is_empty() {
            2
        } else {
            0
        }
    }
}

#[derive(Debug, Default)]
pub struct TableRun {
    pub rows: Vec<TableRow>,
    pub incomplete: Vec<Incomplete>,
}

impl TableRun {
    pub fn exit_code(&self) -> i32 {
        let bad = self.rows.iter().filter_map(|r| r.enumeration.as_ref()).any(|r| r.matches == Some(false));
        if bad {
            3
        } else {
            0
        }
    }
}

pub struct Harness {
    cache: Cache,
    opts: Options,
    started: Instant,
}

fn sorted(mut v: Vec<CycleType>) -> Vec<CycleType> {
    v.sort();
    v.dedup();
    v
}

fn sorted_qs(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_unstable();
    v.dedup();
    v
}

pub fn parse_types(names: &[&str]) -> Vec<CycleType> {
    names.iter().map(|s| s.parse().expect("built-in partitions are valid")).collect()
}

impl Harness {
    pub fn new(cache: Cache, opts: Options) -> Self {
        Harness { cache, opts, started: Instant::now() }
    }

    pub fn cache(&self) -> &Cache {
        &self.cache
    }

    fn remaining_seconds(&self) -> Option<f64> {
        self.opts.max_seconds.map(|m| (m - self.started.elapsed().as_secs_f64()).max(0.0))
    }

    /// Serves a completed entry from the cache, or runs (or resumes) the job
    /// under the budget, writing partial progress as it goes.
    fn run_job<J: ShardedJob>(
        &mut self,
        key: CacheKey,
        estimate: WorkEstimate,
        build: impl FnOnce() -> Result<J, HarnessError>,
        finish: impl FnOnce(&J, &[u64]) -> Result<Vec<CountReport>, HarnessError>,
    ) -> Result<JobOutcome, HarnessError> {
        let prior = self.cache.get(&key).cloned();
        if let Some(e) = prior.as_ref().filter(|e| e.is_complete()) {
            return Ok(JobOutcome::Done(e.reports.clone()));
        }
        let (progress, prior_ms) = match prior {
            Some(e) if self.opts.resume => (e.progress, e.elapsed_ms),
            _ => (None, 0),
        };
        let stopped = |done: usize, total: usize| {
            JobOutcome::Stopped(Incomplete {
                key: key.clone(),
                shards_done: done,
                shards_total: total,
                estimated_work: estimate.total(),
            })
        };
        if self.opts.max_work.is_some_and(|m| estimate.setup > m as u128) {
            return Ok(stopped(0, 0));
        }
        let job = build()?;
        let runner = Runner::new(self.opts.jobs)
            .with_budget(Budget { max_work: self.opts.max_work, max_seconds: self.remaining_seconds() });
        let start = Instant::now();
        let mut last_write = Instant::now();
        let mut write_error = None;
        let cache = &mut self.cache;
        let outcome = runner.run(&job, progress, |p| {
            if last_write.elapsed() >= CHECKPOINT_EVERY {
                let ms = prior_ms + start.elapsed().as_millis() as u64;
                if let Err(e) = cache.put(CacheEntry::partial(key.clone(), p.clone(), ms)) {
                    write_error.get_or_insert(e);
                }
                last_write = Instant::now();
            }
        });
        if let Some(e) = write_error {
            return Err(e.into());
        }
        let elapsed_ms = prior_ms + start.elapsed().as_millis() as u64;
        match outcome {
            Outcome::Complete(tally) => {
                let mut reports = finish(&job, &tally)?;
                for r in &mut reports {
                    r.elapsed_ms = elapsed_ms;
                }
                self.cache.put(CacheEntry::complete(key, reports.clone(), elapsed_ms))?;
                Ok(JobOutcome::Done(reports))
            }
            Outcome::Partial(p) => {
                let (done, total) = (p.done_count(), p.shards_total);
                self.cache.put(CacheEntry::partial(key.clone(), p, elapsed_ms))?;
                Ok(stopped(done, total))
            }
        }
    }

    fn collect(&mut self, run: &mut Run, outcome: JobOutcome) {
        match outcome {
            JobOutcome::Done(r) => run.reports.extend(r),
            JobOutcome::Stopped(i) => run.incomplete.push(i),
        }
    }

    fn census_one(&mut self, q: u64, lambda: &CycleType) -> Result<JobOutcome, HarnessError> {
        validate(q, lambda)?;
        let key = CacheKey::new(q, &lambda.to_string(), Op::Arcs.key());
        let est = work_estimate(q, lambda, Op::Arcs);
        self.run_job(
            key,
            est,
            || Ok(ArcCountJob::new(q, lambda.clone())?),
            |job, tally| Ok(vec![job.finish(tally)]),
        )
    }

    /// 7-arc counts for every (q, λ), each compared with its formula.
    pub fn census(&mut self, qs: Vec<u64>, lambdas: Vec<CycleType>) -> Result<Run, HarnessError> {
        let mut run = Run::default();
        for q in sorted_qs(qs) {
            for lambda in sorted(lambdas.clone()) {
                let o = self.census_one(q, &lambda)?;
                self.collect(&mut run, o);
            }
        }
        sort_reports(&mut run.reports);
        Ok(run)
    }

    /// Same as `census`; callers treat any mismatch as failure.
    pub fn verify(&mut self, qs: Vec<u64>, lambdas: Vec<CycleType>) -> Result<Run, HarnessError> {
        self.census(qs, lambdas)
    }

    /// Fano planes per cycle type, with the 4-arc correspondence checked
    /// where one exists.
    pub fn fano_census(&mut self, qs: Vec<u64>, lambdas: Vec<CycleType>) -> Result<Run, HarnessError> {
        let bijective = parse_types(&BIJECTION_TYPES);
        let mut run = Run::default();
        for q in sorted_qs(qs) {
            for lambda in sorted(lambdas.clone()) {
                validate(q, &lambda)?;
                let key = CacheKey::new(q, &lambda.to_string(), Op::Fano.key());
                let est = work_estimate(q, &lambda, Op::Fano);
                let with_bijection = bijective.contains(&lambda);
                let o = self.run_job(
                    key,
                    est,
                    || Ok(FanoCensusJob::new(q, lambda.clone())?),
                    |job, tally| {
                        let mut r = job.finish(tally);
                        if lambda.is_identity() {
                            let thirty = Rational::integer(30).to_string();
                            let holds = r.details.get("ordered_per_pgl") == Some(&thirty);
                            r = r.detail("ordered_per_pgl_is_30", holds);
                        }
                        if with_bijection {
                            let b = fano_bijection_check(q, &lambda)?;
                            r = r
                                .detail("bijection_four_arcs", b.four_arcs)
                                .detail("bijection_distinct_images", b.distinct_images)
                                .detail("bijection_wrong_type", b.wrong_type)
                                .detail("bijection_injective", b.injective)
                                .detail("bijection_surjective", b.surjective)
                                .detail("bijection_holds", b.holds());
                        }
                        Ok(vec![r])
                    },
                )?;
                self.collect(&mut run, o);
            }
        }
        sort_reports(&mut run.reports);
        Ok(run)
    }

    /// Δ-census reports: U, Delta, B and every flag intersection.
    pub fn delta_census(&mut self, qs: Vec<u64>, lambdas: Vec<CycleType>) -> Result<Run, HarnessError> {
        let allowed = parse_types(&DELTA_TYPES);
        let mut run = Run::default();
        for q in sorted_qs(qs) {
            for lambda in sorted(lambdas.clone()) {
                validate(q, &lambda)?;
                if !allowed.contains(&lambda) {
                    return Err(HarnessError::BadArgument(format!(
                        "no Δ-census for cycle type {lambda} (expected one of {})",
                        DELTA_TYPES.join(", ")
                    )));
                }
                let key = CacheKey::new(q, &lambda.to_string(), Op::Delta.key());
                let est = work_estimate(q, &lambda, Op::Delta);
                let o = self.run_job(
                    key,
                    est,
                    || Ok(DeltaJob::new(q, lambda.clone())?),
                    |job, tally| {
                        let c = job.finish(tally);
                        let holds = c.lemma_holds();
                        let mut reports = c.reports();
                        for r in reports.iter_mut().filter(|r| r.operation == "delta/Delta") {
                            r.details.insert("union_identity_holds".into(), holds.to_string());
                            r.details.insert("union_identity_violations".into(), c.violations.to_string());
                        }
                        Ok(reports)
                    },
                )?;
                self.collect(&mut run, o);
            }
        }
        sort_reports(&mut run.reports);
        Ok(run)
    }

    /// The five table rows at each q: formula values, and enumerations where
    /// the budget allows.
    pub fn table(&mut self, qs: Vec<u64>) -> Result<TableRun, HarnessError> {
        let mut out = TableRun::default();
        for q in sorted_qs(qs) {
            base_exponent(q)?;
            for lambda in parse_types(&TABLE_TYPES) {
                let formula = Rational(table1_value(&lambda, q).expect("table types are registered"));
                let mut row = TableRow { q, lambda: lambda.to_string(), formula_per_pgl: formula, enumeration: None, skipped: None };
                let key = CacheKey::new(q, &lambda.to_string(), Op::Arcs.key());
                let cached = self.cache.get(&key).is_some_and(|e| e.is_complete());
                let est = work_estimate(q, &lambda, Op::Arcs);
                if let Err(e) = validate(q, &lambda) {
                    row.skipped = Some(e.to_string());
                } else if !cached && self.opts.max_work.is_some_and(|m| est.total() > m as u128) {
                    row.skipped = Some(format!("estimated work {} over budget", est.total()));
                } else {
                    match self.census_one(q, &lambda)? {
                        JobOutcome::Done(mut r) => row.enumeration = r.pop(),
                        JobOutcome::Stopped(i) => {
                            row.skipped = Some("budget ran out".into());
                            out.incomplete.push(i);
                        }
                    }
                }
                out.rows.push(row);
            }
        }
        Ok(out)
    }
}

/// The formula registry as pretty JSON.
pub fn formulas_json() -> String {
    let mut s = serde_json::to_string_pretty(&registry_json()).expect("registry serializes");
    s.push('\n');
    s
}

/// The closed-form count of ordered 7-arcs with trivial action for both
/// values of a(q), each compared with 7! times the table's e-row count.
pub fn glynn_reports(qs: Vec<u64>) -> Result<Run, HarnessError> {
    let e = CycleType::identity(7);
    let mut run = Run::default();
    for q in sorted_qs(qs) {
        base_exponent(q)?;
        let pgl = BigRational::from_integer(pgl3_order(q));
        let target = table1_value(&e, q).expect("e row is registered") * BigRational::from_integer(5040.into());
        let values: Vec<BigInt> = (0..=1).map(|a| glynn_b7e(q, a)).collect();
        let consistent: Vec<String> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| BigRational::from_integer((*v).clone()) == &target * &pgl)
            .map(|(a, _)| a.to_string())
            .collect();
        let consistent = if consistent.is_empty() { "none".to_string() } else { consistent.join(",") };
        for (a, v) in values.into_iter().enumerate() {
            let raw = u64::try_from(&v)
                .map_err(|_| HarnessError::BadArgument(format!("closed form at q={q}, a={a} is {v}, outside the count range")))?;
            let mut r = CountReport::new(q, &e, &format!("glynn/a={a}"), raw);
            r.formula_key = Some("arcs/e".into());
            r.formula_value = Some(Rational(target.clone()));
            r.convention = Some("raw/|PGL| against 5040 * table value".into());
            r.matches = Some(r.per_pgl.0 == target);
            r.details.insert("a_q".into(), a.to_string());
            r.details.insert("consistent_a_q".into(), consistent.clone());
            run.reports.push(r);
        }
    }
    sort_reports(&mut run.reports);
    Ok(run)
}
