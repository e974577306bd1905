//! Experiment engine: failure-probability estimation over many independent
//! runs, the fixed-period restart baseline, and a synthetic algorithm with an
//! analytically known failure curve for oracle checks.
//!
//! A run "fails at time t" when its best-so-far value still differs from the
//! optimum after t steps (pseudo-time steps for the adaptive procedure, so
//! all modes are compared at equal computational cost). Each outer
//! replication is reduced to its hit time, the first instant the optimum was
//! produced, which fully determines its failure indicator at every t.
//!
//! Outer replications run in parallel; their seeds derive from the
//! replication index alone, and aggregation is by index, so results are
//! byte-identical for any worker count.

use crate::algo::{
    replication_seed, spawn_replication, ObjectiveValue, Problem, Resumable, Trajectory,
};
use crate::restart::{run_rp, RestartConfig, StopRule};
use crate::theory::FailureCurve;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HarnessError {
    #[error("failure-probability estimation needs a target optimum, none was provided")]
    MissingTarget,
    #[error("experiment needs m >= 1 outer replications")]
    NoReplications,
}

/// Synthetic minimizer with a known failure curve. At spawn the instance is
/// absorbed with probability `beta` and then never succeeds; otherwise every
/// step from `warmup` on succeeds independently with probability `q`.
/// Objective values are 1 before the first success and 0 after, so the
/// optimum is 0 and the analytic failure curve is
/// `p(t) = beta + (1-beta)(1-q)^(t-warmup+1)` for `t >= warmup` (1 below).
#[derive(Debug, Clone, Copy)]
pub struct SyntheticBasinProblem {
    pub beta: f64,
    pub q: f64,
    pub warmup: u32,
}

impl SyntheticBasinProblem {
    pub fn new(beta: f64, q: f64, warmup: u32) -> Self {
        assert!(beta > 0.0 && beta < 1.0);
        assert!(q > 0.0 && q <= 1.0);
        assert!(warmup >= 1);
        SyntheticBasinProblem { beta, q, warmup }
    }

    pub fn analytic_curve(&self, t_max: u32) -> FailureCurve {
        FailureCurve::delayed_basin(self.beta, self.q, self.warmup, t_max)
    }

    pub fn optimum(&self) -> ObjectiveValue {
        ObjectiveValue::new(0.0)
    }
}

pub struct SyntheticBasinAlgo {
    rng: rand_chacha::ChaCha8Rng,
    q: f64,
    warmup: u32,
    absorbed: bool,
    step_count: u32,
    succeeded: bool,
}

impl Problem for SyntheticBasinProblem {
    type Algorithm = SyntheticBasinAlgo;

    fn spawn(&self, seed: u64) -> SyntheticBasinAlgo {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let absorbed = rng.random::<f64>() < self.beta;
        SyntheticBasinAlgo {
            rng,
            q: self.q,
            warmup: self.warmup,
            absorbed,
            step_count: 0,
            succeeded: false,
        }
    }
}

impl Resumable for SyntheticBasinAlgo {
    fn step(&mut self) -> ObjectiveValue {
        use rand::Rng;
        self.step_count += 1;
        if !self.succeeded
            && !self.absorbed
            && self.step_count >= self.warmup
            && self.rng.random::<f64>() < self.q
        {
            self.succeeded = true;
        }
        ObjectiveValue::new(if self.succeeded { 0.0 } else { 1.0 })
    }
}

/// How the underlying algorithm is driven in an experiment.
#[derive(Debug, Clone)]
pub enum Mode {
    /// One uninterrupted run.
    Plain,
    /// The adaptive restart procedure; the stop rule inside the config is
    /// replaced by the experiment's budget and target.
    Rp(RestartConfig),
    /// Re-initialization every `period` steps, best-so-far kept across
    /// periods.
    FixedRestart(u32),
}

impl Mode {
    pub fn label(&self) -> String {
        match self {
            Mode::Plain => "plain".into(),
            Mode::Rp(_) => "rp".into(),
            Mode::FixedRestart(t) => format!("fixed:{t}"),
        }
    }
}

/// Re-initializes an underlying algorithm every `period` steps; itself a
/// resumable algorithm over pseudo-time. Period `j` runs replication index
/// `j`, so no RNG or model state leaks across period boundaries.
pub struct FixedRestartAlgo<'p, P: Problem> {
    problem: &'p P,
    seed: u64,
    period: u32,
    current: P::Algorithm,
    step_in_period: u32,
    period_index: u32,
}

impl<'p, P: Problem> FixedRestartAlgo<'p, P> {
    pub fn new(problem: &'p P, period: u32, seed: u64) -> Self {
        assert!(period >= 1);
        FixedRestartAlgo {
            problem,
            seed,
            period,
            current: spawn_replication(problem, seed, 1),
            step_in_period: 0,
            period_index: 1,
        }
    }
}

impl<P: Problem> Resumable for FixedRestartAlgo<'_, P> {
    fn step(&mut self) -> ObjectiveValue {
        if self.step_in_period == self.period {
            self.period_index += 1;
            self.current = spawn_replication(self.problem, self.seed, self.period_index);
            self.step_in_period = 0;
        }
        self.step_in_period += 1;
        self.current.step()
    }
}

/// Full pseudo-time trajectory of a fixed-period restart run of `budget`
/// steps (best-so-far tracked across periods by the trajectory itself).
pub fn fixed_restart_run<P: Problem>(
    problem: &P,
    period: u32,
    budget: u64,
    seed: u64,
) -> Trajectory {
    let mut algo = FixedRestartAlgo::new(problem, period, seed);
    let mut traj = Trajectory::new();
    traj.extend_with(&mut algo, budget as u32)
        .expect("fresh trajectory extends forward");
    traj
}

/// Hit time of a fixed-period restart run, stopping early on success.
pub fn fixed_restart_hit_time<P: Problem>(
    problem: &P,
    period: u32,
    budget: u64,
    seed: u64,
    target: ObjectiveValue,
) -> Option<u64> {
    let mut algo = FixedRestartAlgo::new(problem, period, seed);
    (1..=budget).find(|_| algo.step() <= target)
}

/// Hit time of a single uninterrupted run.
pub fn plain_hit_time<P: Problem>(
    problem: &P,
    budget: u64,
    seed: u64,
    target: ObjectiveValue,
) -> Option<u64> {
    let mut algo = spawn_replication(problem, seed, 1);
    (1..=budget).find(|_| algo.step() <= target)
}

/// Estimated failure curve of one mode: the fraction of outer replications
/// whose hit time exceeds t, for any t up to the budget.
#[derive(Debug, Clone)]
pub struct CurveEstimate {
    pub mode_label: String,
    pub m: u32,
    pub budget: u64,
    /// Finite hit times, sorted ascending.
    hits_sorted: Vec<u64>,
}

const Z_99: f64 = 2.5758293035489004;

impl CurveEstimate {
    pub fn from_hits(mode_label: String, budget: u64, hits: &[Option<u64>]) -> Self {
        let mut hits_sorted: Vec<u64> = hits.iter().flatten().copied().collect();
        hits_sorted.sort_unstable();
        CurveEstimate {
            mode_label,
            m: hits.len() as u32,
            budget,
            hits_sorted,
        }
    }

    /// p̂(t): fraction of replications that had not reached the optimum
    /// within t steps.
    pub fn failure_probability_at(&self, t: u64) -> f64 {
        let hit_by_t = self.hits_sorted.partition_point(|&h| h <= t);
        (self.m as usize - hit_by_t) as f64 / f64::from(self.m)
    }

    /// 99% confidence interval around p̂(t): normal approximation, switching
    /// to the Wilson interval when fewer than 5 failures (or successes)
    /// remain, where the normal approximation is unreliable.
    pub fn confidence_interval_at(&self, t: u64) -> (f64, f64) {
        let p = self.failure_probability_at(t);
        let m = f64::from(self.m);
        let extreme = p * m < 5.0 || (1.0 - p) * m < 5.0;
        if extreme {
            let z2 = Z_99 * Z_99;
            let center = (p + z2 / (2.0 * m)) / (1.0 + z2 / m);
            let half = Z_99 * (p * (1.0 - p) / m + z2 / (4.0 * m * m)).sqrt() / (1.0 + z2 / m);
            ((center - half).max(0.0), (center + half).min(1.0))
        } else {
            let half = Z_99 * (p * (1.0 - p) / m).sqrt();
            ((p - half).max(0.0), (p + half).min(1.0))
        }
    }
}

/// Estimates the failure curve of `mode` from `m` outer replications with a
/// shared pseudo-time budget. The target optimum is required; without it
/// failure is undefined.
pub fn estimate_failure_curve<P: Problem>(
    problem: &P,
    mode: &Mode,
    m: u32,
    budget: u64,
    target: Option<ObjectiveValue>,
    master_seed: u64,
) -> Result<CurveEstimate, HarnessError> {
    let target = target.ok_or(HarnessError::MissingTarget)?;
    if m < 1 {
        return Err(HarnessError::NoReplications);
    }
    let hits: Vec<Option<u64>> = (1..=m)
        .into_par_iter()
        .map(|j| {
            let seed = replication_seed(master_seed, j);
            match mode {
                Mode::Plain => plain_hit_time(problem, budget, seed, target),
                Mode::FixedRestart(period) => {
                    fixed_restart_hit_time(problem, *period, budget, seed, target)
                }
                Mode::Rp(config) => {
                    let config = RestartConfig {
                        stop: StopRule::budget(budget).with_target(target),
                        ..config.clone()
                    };
                    let run = run_rp(problem, &config, seed);
                    run.hit_time(target).filter(|&h| h <= budget)
                }
            }
        })
        .collect();
    Ok(CurveEstimate::from_hits(mode.label(), budget, &hits))
}

/// Log-spaced integer grid over `1..=budget` for curve output; always
/// contains 1 and the budget.
pub fn log_grid(budget: u64, points: usize) -> Vec<u64> {
    let mut grid = Vec::with_capacity(points + 2);
    grid.push(1);
    if budget > 1 {
        let last = (budget as f64).ln();
        for i in 1..points {
            let t = (last * i as f64 / points as f64).exp().round() as u64;
            grid.push(t.clamp(1, budget));
        }
        grid.push(budget);
    }
    grid.dedup();
    grid
}

/// One row of the comparison table: failure probability of a mode at the
/// comparison time `t_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub instance: String,
    pub mode_label: String,
    pub t_c: u64,
    pub failure_probability: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Builds the comparison table at each curve's budget, sorted by instance
/// name then mode label.
pub fn compare(instance: &str, estimates: &[CurveEstimate]) -> Vec<ComparisonRow> {
    let mut rows: Vec<ComparisonRow> = estimates
        .iter()
        .map(|e| {
            let fp = e.failure_probability_at(e.budget);
            let (lo, hi) = e.confidence_interval_at(e.budget);
            ComparisonRow {
                instance: instance.to_string(),
                mode_label: e.mode_label.clone(),
                t_c: e.budget,
                failure_probability: fp,
                ci_low: lo,
                ci_high: hi,
            }
        })
        .collect();
    rows.sort_by(|a, b| (&a.instance, &a.mode_label).cmp(&(&b.instance, &b.mode_label)));
    rows
}

pub fn table_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("instance,mode,t_c,failure_probability,ci_low,ci_high\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.instance, row.mode_label, row.t_c, row.failure_probability, row.ci_low, row.ci_high
        ));
    }
    out
}

/// CSV of estimated curves sampled on a grid (Figs. of this kind are plotted
/// on log time axes, hence the log grid default).
pub fn curve_csv(estimates: &[CurveEstimate], grid: &[u64]) -> String {
    let mut out = String::from("mode,t,p_hat,ci_low,ci_high\n");
    for e in estimates {
        for &t in grid {
            let p = e.failure_probability_at(t);
            let (lo, hi) = e.confidence_interval_at(t);
            out.push_str(&format!("{},{},{},{},{}\n", e.mode_label, t, p, lo, hi));
        }
    }
    out
}
