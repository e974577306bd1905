//! The adaptive restart procedure.
//!
//! One iteration holds a rectangular pool of `r_k` replications, each run for
//! `T_k` steps. From the pool's best value `Ỹ_k` it builds the surrogate
//! failure curve
//!
//! ```text
//! p̂_k(t) = (1/r_k) * #{ i : Y_i(t) > Ỹ_k }
//! ```
//!
//! turns it into `g_k(t) = 1 / ((1 - p̂_k(t)^(1/t)) * p̂_k(t))`, and takes the
//! first relative minimum `σ̂_k` of that series as the running estimate of the
//! optimal restart time. If `σ̂_k < λ·T_k` the estimate looks trustworthy and
//! the procedure adds replications (sharpening the estimate); otherwise the
//! horizon looks too short and the replications are extended in time. Exactly
//! one of the two sizes grows per iteration.
//!
//! Pseudo-time serializes all executed `(replication, step)` pairs in the
//! canonical order (initial block row by row, replication growth appending
//! whole rows, horizon growth appending column segments row by row), so the
//! procedure can be compared with a single long run at equal computational
//! cost.

use crate::algo::{spawn_replication, ObjectiveValue, Problem, ReplicationPool};
use crate::theory::{g_denominator_value, g_value, FailureCurve};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RestartError {
    #[error("replication pool is empty")]
    EmptyPool,
    #[error("pseudo-time {t} outside 1..={total}")]
    PseudoTimeOutOfRange { t: u64, total: u64 },
    #[error("invalid restart configuration: {0}")]
    InvalidConfig(String),
}

/// Optional schedule raising λ along iterations:
/// `λ_k = min(max, λ_0 + delta·k)`. Off by default; tightening λ late in a
/// run makes it harder to keep growing the horizon once the estimate of the
/// restart time has settled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSchedule {
    pub delta: f64,
    pub max: f64,
}

/// When to end a run. A pseudo-time budget is always required; the target
/// value is optional and meant for experiments where the optimum is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    /// Stop at the end of the first iteration whose total pseudo-time reaches
    /// this many underlying-algorithm steps.
    pub pseudo_time_budget: u64,
    /// Stop as soon as the pool's best value reaches this target.
    pub target: Option<ObjectiveValue>,
}

impl StopRule {
    pub fn budget(pseudo_time_budget: u64) -> Self {
        StopRule {
            pseudo_time_budget,
            target: None,
        }
    }

    pub fn with_target(mut self, target: ObjectiveValue) -> Self {
        self.target = Some(target);
        self
    }
}

/// Parameters of the restart procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartConfig {
    /// Initial replication count r_0.
    pub initial_replications: u32,
    /// Initial horizon T_0.
    pub initial_horizon: u32,
    /// Replication growth factor c_1 (> 1).
    pub replication_growth: f64,
    /// Horizon growth factor c_2 (> 1).
    pub horizon_growth: f64,
    /// Decision threshold λ in (0,1).
    pub lambda: f64,
    pub lambda_schedule: Option<LambdaSchedule>,
    pub stop: StopRule,
}

impl RestartConfig {
    /// The reference parameter set: r_0=20, T_0=100, c_1=1.2, c_2=1.1,
    /// λ=0.8, no λ schedule.
    pub fn standard(stop: StopRule) -> Self {
        RestartConfig {
            initial_replications: 20,
            initial_horizon: 100,
            replication_growth: 1.2,
            horizon_growth: 1.1,
            lambda: 0.8,
            lambda_schedule: None,
            stop,
        }
    }

    pub fn validate(&self) -> Result<(), RestartError> {
        let bad = |msg: &str| Err(RestartError::InvalidConfig(msg.to_string()));
        if self.initial_replications < 1 {
            return bad("initial_replications must be >= 1");
        }
        if self.initial_horizon < 1 {
            return bad("initial_horizon must be >= 1");
        }
        if self.replication_growth <= 1.0 {
            return bad("replication_growth must be > 1");
        }
        if self.horizon_growth <= 1.0 {
            return bad("horizon_growth must be > 1");
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return bad("lambda must be in (0,1)");
        }
        if let Some(s) = &self.lambda_schedule {
            if s.delta < 0.0 || !(s.max > 0.0 && s.max < 1.0) || s.max < self.lambda {
                return bad("lambda_schedule must be nondecreasing within (0,1)");
            }
        }
        if self.stop.pseudo_time_budget < 1 {
            return bad("pseudo_time_budget must be >= 1");
        }
        Ok(())
    }

    /// λ in effect at iteration `k`.
    pub fn lambda_at(&self, k: u32) -> f64 {
        match self.lambda_schedule {
            Some(s) => (self.lambda + s.delta * f64::from(k)).min(s.max),
            None => self.lambda,
        }
    }
}

impl Default for RestartConfig {
    fn default() -> Self {
        RestartConfig::standard(StopRule::budget(1_000_000))
    }
}

/// Surrogate failure curve of a rectangular pool relative to its best value:
/// the fraction of replications whose best-so-far still exceeds `y_tilde` at
/// each step.
pub fn surrogate_failure_curve(
    pool: &ReplicationPool,
    y_tilde: ObjectiveValue,
) -> Result<FailureCurve, RestartError> {
    let r = pool.replications();
    if r == 0 {
        return Err(RestartError::EmptyPool);
    }
    let horizon = pool.common_length();
    let mut values = Vec::with_capacity(horizon as usize);
    for t in 1..=horizon {
        let exceed = pool.iter().filter(|traj| traj.best_at(t) > y_tilde).count();
        values.push(exceed as f64 / f64::from(r));
    }
    // exceedance counts of best-so-far series are nonincreasing in t, so the
    // curve constructor cannot fail
    Ok(FailureCurve::new(values).expect("surrogate curve is nonincreasing by construction"))
}

/// g_k(t) over the whole curve, with infinite sentinels where p̂ is 0 or 1.
pub fn g_series(p_hat: &FailureCurve) -> Vec<f64> {
    (1..=p_hat.len()).map(|t| g_value(p_hat.at(t), t)).collect()
}

/// Elementwise denominator of g_k; its global maximum marks the same position
/// as the minimum of g_k, which makes it the quantity to plot (it stays
/// finite).
pub fn g_denominator_series(p_hat: &FailureCurve) -> Vec<f64> {
    (1..=p_hat.len())
        .map(|t| g_denominator_value(p_hat.at(t), t))
        .collect()
}

/// First strict relative minimum of `g` (1-based): the smallest interior t
/// with `g(t-1) > g(t) < g(t+1)`. Infinite values order above every finite
/// one, so a finite entry right after an infinite stretch can open a valley.
/// Flat valleys are skipped. When no relative minimum exists the length of
/// the series is returned; that sentinel forces `σ̂ ≥ λ·T`, i.e. a horizon
/// extension, which is the sensible reaction to a g that is still decreasing
/// at the boundary.
pub fn first_relative_minimum(g: &[f64]) -> u32 {
    for idx in 1..g.len().saturating_sub(1) {
        if g[idx - 1] > g[idx] && g[idx] < g[idx + 1] {
            return (idx + 1) as u32;
        }
    }
    g.len() as u32
}

/// Which of the two pool dimensions to grow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Growth {
    Replications,
    Horizon,
}

/// The decision rule: grow replications iff `σ̂ < λ·T` (strict).
pub fn growth_decision(sigma_hat: u32, horizon: u32, lambda: f64) -> Growth {
    if f64::from(sigma_hat) < lambda * f64::from(horizon) {
        Growth::Replications
    } else {
        Growth::Horizon
    }
}

/// ⌈factor·x⌉ with a guard for factor·x landing within float error of an
/// integer (1.1 * 100 must give 110, not 111), and a floor of x+1 so growth
/// is always strict.
pub fn grown_size(x: u32, factor: f64) -> u32 {
    let y = factor * f64::from(x);
    let nearest = y.round();
    let ceiled = if (y - nearest).abs() < 1e-9 {
        nearest
    } else {
        y.ceil()
    };
    (ceiled as u32).max(x + 1)
}

/// One contiguous run of steps of a single replication, as executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LedgerSegment {
    /// 1-based replication index.
    pub replication: u32,
    /// First step of the segment (1-based, inclusive).
    pub from_step: u32,
    /// Last step of the segment (inclusive).
    pub to_step: u32,
}

impl LedgerSegment {
    pub fn step_count(&self) -> u64 {
        u64::from(self.to_step - self.from_step) + 1
    }
}

/// Execution-ordered log of every `(replication, step)` pair the procedure
/// has run, stored as contiguous segments. At the end of iteration k the
/// ledger covers the full `r_k × T_k` matrix exactly once, so its total
/// equals `r_k · T_k`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PseudoTimeLedger {
    segments: Vec<LedgerSegment>,
    /// Cumulative pseudo-time at the end of each segment.
    cumulative: Vec<u64>,
}

impl PseudoTimeLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, replication: u32, from_step: u32, to_step: u32) {
        debug_assert!(from_step <= to_step);
        let seg = LedgerSegment {
            replication,
            from_step,
            to_step,
        };
        let total = self.total_pseudo_time() + seg.step_count();
        self.segments.push(seg);
        self.cumulative.push(total);
    }

    pub fn total_pseudo_time(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    pub fn segments(&self) -> &[LedgerSegment] {
        &self.segments
    }

    /// The unique `(replication, step)` pair executed at pseudo-time instant
    /// `pseudo_t` (1-based).
    pub fn map(&self, pseudo_t: u64) -> Result<(u32, u32), RestartError> {
        let total = self.total_pseudo_time();
        if pseudo_t < 1 || pseudo_t > total {
            return Err(RestartError::PseudoTimeOutOfRange { t: pseudo_t, total });
        }
        let idx = self.cumulative.partition_point(|&c| c < pseudo_t);
        let seg = &self.segments[idx];
        let before = if idx == 0 { 0 } else { self.cumulative[idx - 1] };
        let offset = (pseudo_t - before - 1) as u32;
        Ok((seg.replication, seg.from_step + offset))
    }

    /// All executed pairs in pseudo-time order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.segments
            .iter()
            .flat_map(|s| (s.from_step..=s.to_step).map(move |t| (s.replication, t)))
    }
}

/// Snapshot of the procedure at the end of one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub k: u32,
    pub replications: u32,
    pub horizon: u32,
    pub y_tilde: ObjectiveValue,
    pub sigma_hat: u32,
    pub pseudo_time: u64,
}

/// Result of a full restart-procedure run.
#[derive(Debug)]
pub struct RpRun {
    pub trace: Vec<IterationRecord>,
    pub pool: ReplicationPool,
    pub ledger: PseudoTimeLedger,
}

impl RpRun {
    pub fn final_record(&self) -> &IterationRecord {
        self.trace.last().expect("a run has at least iteration 0")
    }

    /// Best objective value over everything executed.
    pub fn best(&self) -> ObjectiveValue {
        self.pool.min_value().expect("pool is nonempty after a run")
    }

    /// First pseudo-time instant at which a value `<= target` was produced.
    pub fn hit_time(&self, target: ObjectiveValue) -> Option<u64> {
        let mut pseudo = 0u64;
        for seg in self.ledger.segments() {
            let traj = self.pool.trajectory(seg.replication);
            for t in seg.from_step..=seg.to_step {
                pseudo += 1;
                if traj.raw_at(t) <= target {
                    return Some(pseudo);
                }
            }
        }
        None
    }

    /// Best value over the first `pseudo_t` executed steps; nonincreasing in
    /// `pseudo_t`.
    pub fn best_so_far_at(&self, pseudo_t: u64) -> Result<ObjectiveValue, RestartError> {
        let total = self.ledger.total_pseudo_time();
        if pseudo_t < 1 || pseudo_t > total {
            return Err(RestartError::PseudoTimeOutOfRange { t: pseudo_t, total });
        }
        let mut best: Option<ObjectiveValue> = None;
        let mut remaining = pseudo_t;
        for seg in self.ledger.segments() {
            let traj = self.pool.trajectory(seg.replication);
            let take = seg.step_count().min(remaining);
            let last_step = seg.from_step + (take - 1) as u32;
            // steps of one replication appear in increasing order across the
            // whole ledger, so its best-so-far value at the last step covers
            // every earlier step of this segment and all prior ones
            let candidate = traj.best_at(last_step);
            best = Some(match best {
                Some(b) => b.min(candidate),
                None => candidate,
            });
            remaining -= take;
            if remaining == 0 {
                break;
            }
        }
        Ok(best.expect("pseudo_t >= 1 guarantees at least one segment"))
    }

    /// CSV export of the per-iteration trace.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("k,replications,horizon,y_tilde,sigma_hat,pseudo_time\n");
        for rec in &self.trace {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                rec.k, rec.replications, rec.horizon, rec.y_tilde, rec.sigma_hat, rec.pseudo_time
            ));
        }
        out
    }
}

struct RpRunner<'p, P: Problem> {
    problem: &'p P,
    config: &'p RestartConfig,
    master_seed: u64,
    algos: Vec<P::Algorithm>,
    pool: ReplicationPool,
    ledger: PseudoTimeLedger,
    k: u32,
    replications: u32,
    horizon: u32,
    sigma_hat: u32,
    y_tilde: Option<ObjectiveValue>,
    trace: Vec<IterationRecord>,
}

impl<'p, P: Problem> RpRunner<'p, P> {
    fn new(problem: &'p P, config: &'p RestartConfig, master_seed: u64) -> Self {
        RpRunner {
            problem,
            config,
            master_seed,
            algos: Vec::new(),
            pool: ReplicationPool::new(),
            ledger: PseudoTimeLedger::new(),
            k: 0,
            replications: config.initial_replications,
            horizon: config.initial_horizon,
            sigma_hat: 0,
            y_tilde: None,
            trace: Vec::new(),
        }
    }

    fn spawn_and_run(&mut self, index: u32, to_step: u32) {
        let mut algo = spawn_replication(self.problem, self.master_seed, index);
        let mut traj = crate::algo::Trajectory::new();
        traj.extend_with(&mut algo, to_step)
            .expect("fresh trajectory extends forward");
        self.pool.push(traj);
        self.algos.push(algo);
        self.ledger.push(index, 1, to_step);
    }

    fn initialize(&mut self) {
        for i in 1..=self.replications {
            self.spawn_and_run(i, self.horizon);
        }
        self.evaluate();
    }

    /// Recomputes Ỹ, p̂ and σ̂ from the full matrix and appends the trace
    /// record for the just-completed iteration.
    fn evaluate(&mut self) {
        let y_tilde = self.pool.min_value().expect("pool initialized");
        let p_hat =
            surrogate_failure_curve(&self.pool, y_tilde).expect("pool is nonempty during a run");
        let g = g_series(&p_hat);
        self.sigma_hat = first_relative_minimum(&g);
        self.y_tilde = Some(y_tilde);
        self.trace.push(IterationRecord {
            k: self.k,
            replications: self.replications,
            horizon: self.horizon,
            y_tilde,
            sigma_hat: self.sigma_hat,
            pseudo_time: self.ledger.total_pseudo_time(),
        });
    }

    fn decide_and_grow(&mut self) {
        let lambda = self.config.lambda_at(self.k);
        match growth_decision(self.sigma_hat, self.horizon, lambda) {
            Growth::Replications => {
                let new_r = grown_size(self.replications, self.config.replication_growth);
                for i in self.replications + 1..=new_r {
                    self.spawn_and_run(i, self.horizon);
                }
                self.replications = new_r;
            }
            Growth::Horizon => {
                let new_t = grown_size(self.horizon, self.config.horizon_growth);
                for i in 1..=self.replications {
                    let traj = self.pool.trajectory_mut(i);
                    traj.extend_with(&mut self.algos[(i - 1) as usize], new_t)
                        .expect("horizon only grows");
                    self.ledger.push(i, self.horizon + 1, new_t);
                }
                self.horizon = new_t;
            }
        }
        self.k += 1;
        self.evaluate();
    }

    fn should_stop(&self) -> bool {
        if self.ledger.total_pseudo_time() >= self.config.stop.pseudo_time_budget {
            return true;
        }
        if let (Some(target), Some(y)) = (self.config.stop.target, self.y_tilde) {
            if y <= target {
                return true;
            }
        }
        false
    }

    fn finish(self) -> RpRun {
        RpRun {
            trace: self.trace,
            pool: self.pool,
            ledger: self.ledger,
        }
    }
}

/// Runs the restart procedure to completion: initializes the `r_0 × T_0`
/// pool, then alternates growth decisions until the stopping rule fires.
/// Deterministic for a fixed `(problem, config, master_seed)`.
pub fn run_rp<P: Problem>(problem: &P, config: &RestartConfig, master_seed: u64) -> RpRun {
    config.validate().expect("restart configuration must be valid");
    let mut runner = RpRunner::new(problem, config, master_seed);
    runner.initialize();
    while !runner.should_stop() {
        runner.decide_and_grow();
    }
    runner.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::{Resumable, Trajectory};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Coin-flip minimizer: produces 1 until a success (0), then 0 forever.
    struct CoinProblem {
        success_prob: f64,
    }

    struct CoinAlgo {
        rng: ChaCha8Rng,
        success_prob: f64,
        done: bool,
    }

    impl Problem for CoinProblem {
        type Algorithm = CoinAlgo;
        fn spawn(&self, seed: u64) -> CoinAlgo {
            CoinAlgo {
                rng: ChaCha8Rng::seed_from_u64(seed),
                success_prob: self.success_prob,
                done: false,
            }
        }
    }

    impl Resumable for CoinAlgo {
        fn step(&mut self) -> ObjectiveValue {
            if !self.done && self.rng.random::<f64>() < self.success_prob {
                self.done = true;
            }
            ObjectiveValue::new(if self.done { 0.0 } else { 1.0 })
        }
    }

    fn pool_from_columns(columns: &[Vec<f64>]) -> ReplicationPool {
        // columns[t][i] = raw value of replication i at step t+1
        let r = columns[0].len();
        let mut pool = ReplicationPool::new();
        for i in 0..r {
            let mut traj = Trajectory::new();
            let values: Vec<f64> = columns.iter().map(|col| col[i]).collect();
            struct Replay(Vec<f64>, usize);
            impl Resumable for Replay {
                fn step(&mut self) -> ObjectiveValue {
                    let v = self.0[self.1];
                    self.1 += 1;
                    ObjectiveValue::new(v)
                }
            }
            traj.extend_with(&mut Replay(values, 0), columns.len() as u32)
                .unwrap();
            pool.push(traj);
        }
        pool
    }

    #[test]
    fn surrogate_counts_strict_exceedances() {
        let pool = pool_from_columns(&[vec![12.0, 10.0, 11.0, 15.0]]);
        let p = surrogate_failure_curve(&pool, ObjectiveValue::new(10.0)).unwrap();
        assert_eq!(p.at(1), 0.75);
    }

    #[test]
    fn surrogate_is_zero_once_everyone_hits() {
        let pool = pool_from_columns(&[
            vec![3.0, 2.0, 5.0],
            vec![2.0, 2.0, 2.0], // all at the minimum by step 2
        ]);
        let p = surrogate_failure_curve(&pool, ObjectiveValue::new(2.0)).unwrap();
        assert_eq!(p.at(2), 0.0);
        // and strictly below 1 at the first column where someone attains it
        assert!(p.at(1) < 1.0);
    }

    #[test]
    fn surrogate_grows_pointwise_when_y_tilde_drops() {
        let pool = pool_from_columns(&[vec![5.0, 4.0, 7.0], vec![4.0, 3.0, 6.0]]);
        let loose = surrogate_failure_curve(&pool, ObjectiveValue::new(4.0)).unwrap();
        let tight = surrogate_failure_curve(&pool, ObjectiveValue::new(3.0)).unwrap();
        for t in 1..=2 {
            assert!(tight.at(t) >= loose.at(t));
        }
    }

    #[test]
    fn surrogate_rejects_empty_pool() {
        let pool = ReplicationPool::new();
        assert_eq!(
            surrogate_failure_curve(&pool, ObjectiveValue::new(0.0)),
            Err(RestartError::EmptyPool)
        );
    }

    #[test]
    fn g_series_spot_values() {
        let p = FailureCurve::new(vec![1.0, 0.5, 0.0]).unwrap();
        let g = g_series(&p);
        assert!(g[0].is_infinite());
        assert!((g[1] - 1.0 / ((1.0 - 0.5f64.sqrt()) * 0.5)).abs() < 1e-12);
        assert!(g[2].is_infinite());

        let p = FailureCurve::new(vec![0.5]).unwrap();
        assert_eq!(g_series(&p)[0], 4.0);
    }

    #[test]
    fn g_denominator_mirrors_g() {
        let p = FailureCurve::new(vec![1.0, 0.9, 0.5, 0.45, 0.44, 0.0]).unwrap();
        let g = g_series(&p);
        let d = g_denominator_series(&p);
        assert_eq!(d[0], 0.0);
        assert_eq!(d[5], 0.0);
        assert!((d[2] - 0.5 * (1.0 - 0.5f64.powf(1.0 / 3.0))).abs() < 1e-12);
        // argmax of the denominator = argmin of g over finite entries
        let argmin_g = g
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        let argmax_d = d
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(argmin_g, argmax_d);
    }

    #[test]
    fn first_relative_minimum_cases() {
        assert_eq!(first_relative_minimum(&[9.0, 7.0, 8.0, 6.0, 10.0]), 2);
        // strictly decreasing: no valley, sentinel = length
        assert_eq!(first_relative_minimum(&[9.0, 8.0, 7.0, 6.0]), 4);
        // infinite left flank counts as a decrease into t = 2
        assert_eq!(first_relative_minimum(&[f64::INFINITY, 4.0, 7.0, 2.0]), 2);
        // flat valleys are skipped
        assert_eq!(first_relative_minimum(&[5.0, 4.0, 4.0, 6.0]), 4);
        assert_eq!(first_relative_minimum(&[1.0]), 1);
        assert_eq!(first_relative_minimum(&[2.0, 1.0]), 2);
        // all-infinite series has no valley
        assert_eq!(first_relative_minimum(&[f64::INFINITY; 5]), 5);
    }

    #[test]
    fn growth_rule_examples() {
        // σ̂ = 60 < 0.8·100: add replications, 20 -> 24
        assert_eq!(growth_decision(60, 100, 0.8), Growth::Replications);
        assert_eq!(grown_size(20, 1.2), 24);
        // σ̂ = 95 >= 80: extend horizon, 100 -> 110
        assert_eq!(growth_decision(95, 100, 0.8), Growth::Horizon);
        assert_eq!(grown_size(100, 1.1), 110);
        // σ̂ = λ·T exactly: the rule is strict, so extend time
        assert_eq!(growth_decision(75, 100, 0.75), Growth::Horizon);
    }

    #[test]
    fn grown_size_is_strictly_increasing() {
        for x in 1..200u32 {
            for factor in [1.0001, 1.1, 1.2, 1.5, 2.0] {
                assert!(grown_size(x, factor) > x);
            }
        }
        // float representation of 1.1 * 100 must not ceil to 111
        assert_eq!(grown_size(100, 1.1), 110);
        assert_eq!(grown_size(10, 1.2), 12);
    }

    #[test]
    fn lambda_schedule_is_capped() {
        let config = RestartConfig {
            lambda_schedule: Some(LambdaSchedule {
                delta: 0.05,
                max: 0.9,
            }),
            ..RestartConfig::default()
        };
        assert_eq!(config.lambda_at(0), 0.8);
        assert!((config.lambda_at(1) - 0.85).abs() < 1e-12);
        assert_eq!(config.lambda_at(10), 0.9);
        config.validate().unwrap();
    }

    #[test]
    fn ledger_maps_initial_block_row_major() {
        let mut ledger = PseudoTimeLedger::new();
        ledger.push(1, 1, 3);
        ledger.push(2, 1, 3);
        for t in 1..=3u64 {
            assert_eq!(ledger.map(t).unwrap(), (1, t as u32));
            assert_eq!(ledger.map(3 + t).unwrap(), (2, t as u32));
        }
    }

    #[test]
    fn ledger_maps_replication_growth_as_new_rows() {
        let mut ledger = PseudoTimeLedger::new();
        ledger.push(1, 1, 3);
        ledger.push(2, 1, 3);
        ledger.push(3, 1, 3);
        assert_eq!(ledger.map(7).unwrap(), (3, 1));
        assert_eq!(ledger.map(9).unwrap(), (3, 3));
    }

    #[test]
    fn ledger_maps_horizon_growth_row_by_row() {
        let mut ledger = PseudoTimeLedger::new();
        ledger.push(1, 1, 3);
        ledger.push(2, 1, 3);
        ledger.push(1, 4, 4);
        ledger.push(2, 4, 4);
        assert_eq!(ledger.map(7).unwrap(), (1, 4));
        assert_eq!(ledger.map(8).unwrap(), (2, 4));
        assert_eq!(ledger.total_pseudo_time(), 8);
    }

    #[test]
    fn ledger_rejects_out_of_range() {
        let mut ledger = PseudoTimeLedger::new();
        ledger.push(1, 1, 2);
        assert!(matches!(
            ledger.map(0),
            Err(RestartError::PseudoTimeOutOfRange { .. })
        ));
        assert!(matches!(
            ledger.map(3),
            Err(RestartError::PseudoTimeOutOfRange { .. })
        ));
    }

    #[test]
    fn run_is_deterministic() {
        let problem = CoinProblem { success_prob: 0.01 };
        let config = RestartConfig::standard(StopRule::budget(20_000));
        let a = run_rp(&problem, &config, 99);
        let b = run_rp(&problem, &config, 99);
        assert_eq!(a.trace, b.trace);
        let c = run_rp(&problem, &config, 100);
        assert!(a.trace != c.trace || a.best() != c.best());
    }

    #[test]
    fn target_stop_fires_when_pool_contains_target() {
        struct Instant;
        struct InstantAlgo;
        impl Problem for Instant {
            type Algorithm = InstantAlgo;
            fn spawn(&self, _seed: u64) -> InstantAlgo {
                InstantAlgo
            }
        }
        impl Resumable for InstantAlgo {
            fn step(&mut self) -> ObjectiveValue {
                ObjectiveValue::new(0.0)
            }
        }
        let config = RestartConfig {
            stop: StopRule::budget(1_000_000).with_target(ObjectiveValue::new(0.0)),
            ..RestartConfig::default()
        };
        let run = run_rp(&Instant, &config, 1);
        assert_eq!(run.trace.len(), 1); // stops right after iteration 0
        assert_eq!(run.best(), ObjectiveValue::new(0.0));
        assert_eq!(run.final_record().y_tilde, ObjectiveValue::new(0.0));
    }

    #[test]
    fn exactly_one_dimension_grows_per_iteration() {
        let problem = CoinProblem { success_prob: 0.02 };
        let config = RestartConfig::standard(StopRule::budget(50_000));
        let run = run_rp(&problem, &config, 7);
        assert!(run.trace.len() > 2);
        for pair in run.trace.windows(2) {
            let r_grew = pair[1].replications > pair[0].replications;
            let t_grew = pair[1].horizon > pair[0].horizon;
            assert!(r_grew ^ t_grew);
            assert!(pair[1].y_tilde <= pair[0].y_tilde);
        }
    }

    #[test]
    fn pseudo_time_is_conserved_every_iteration() {
        let problem = CoinProblem { success_prob: 0.05 };
        for seed in 0..20u64 {
            let config = RestartConfig {
                initial_replications: 1 + (seed % 4) as u32,
                initial_horizon: 1 + (seed % 7) as u32 * 3,
                stop: StopRule::budget(500 + seed * 37),
                ..RestartConfig::default()
            };
            let run = run_rp(&problem, &config, seed);
            for rec in &run.trace {
                assert_eq!(
                    rec.pseudo_time,
                    u64::from(rec.replications) * u64::from(rec.horizon)
                );
            }
            // the ledger covers the final matrix exactly once
            let last = *run.final_record();
            let mut seen = std::collections::HashSet::new();
            for (i, t) in run.ledger.iter() {
                assert!(i <= last.replications && t <= last.horizon);
                assert!(seen.insert((i, t)), "duplicate pair ({i},{t})");
            }
            assert_eq!(
                seen.len() as u64,
                u64::from(last.replications) * u64::from(last.horizon)
            );
        }
    }

    #[test]
    fn best_so_far_at_pseudo_time_walks_the_ledger() {
        let problem = CoinProblem { success_prob: 0.03 };
        let config = RestartConfig {
            initial_replications: 3,
            initial_horizon: 10,
            stop: StopRule::budget(300),
            ..RestartConfig::default()
        };
        let run = run_rp(&problem, &config, 5);
        let total = run.ledger.total_pseudo_time();
        assert_eq!(
            run.best_so_far_at(total).unwrap(),
            run.final_record().y_tilde
        );
        assert_eq!(run.ledger.map(1).unwrap(), (1, 1));
        assert_eq!(
            run.best_so_far_at(1).unwrap(),
            run.pool.trajectory(1).raw_at(1)
        );
        // cross-check against a naive running minimum over the ledger
        let mut naive = ObjectiveValue::new(f64::INFINITY);
        for (pt, (i, t)) in run.ledger.iter().enumerate() {
            naive = naive.min(run.pool.trajectory(i).raw_at(t));
            assert_eq!(run.best_so_far_at(pt as u64 + 1).unwrap(), naive);
        }
    }

    #[test]
    fn hit_time_matches_best_so_far() {
        let problem = CoinProblem { success_prob: 0.04 };
        let config = RestartConfig {
            initial_replications: 4,
            initial_horizon: 8,
            stop: StopRule::budget(400),
            ..RestartConfig::default()
        };
        let run = run_rp(&problem, &config, 11);
        let target = ObjectiveValue::new(0.0);
        if let Some(hit) = run.hit_time(target) {
            assert_eq!(run.best_so_far_at(hit).unwrap(), target);
            if hit > 1 {
                assert!(run.best_so_far_at(hit - 1).unwrap() > target);
            }
        } else {
            assert!(run.best() > target);
        }
    }

    #[test]
    fn valley_of_g_is_peak_of_denominator() {
        // first relative minimum of g and first strict local maximum of its
        // denominator coincide; 1/x reverses every strict comparison, with
        // the infinite sentinel corresponding to a zero denominator
        use proptest::prelude::*;
        use proptest::test_runner::TestRunner;
        let mut runner = TestRunner::default();
        runner
            .run(
                &proptest::collection::vec(0..=8u32, 1..30).prop_map(|quantized| {
                    let mut v: Vec<f64> = quantized.iter().map(|&q| f64::from(q) / 8.0).collect();
                    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
                    v
                }),
                |values| {
                    let p_hat = FailureCurve::new(values).unwrap();
                    let g = g_series(&p_hat);
                    let d = g_denominator_series(&p_hat);
                    let sigma = first_relative_minimum(&g);
                    let mut first_peak = d.len() as u32;
                    for idx in 1..d.len().saturating_sub(1) {
                        if d[idx - 1] < d[idx] && d[idx] > d[idx + 1] {
                            first_peak = (idx + 1) as u32;
                            break;
                        }
                    }
                    prop_assert_eq!(sigma, first_peak);
                    Ok(())
                },
            )
            .unwrap();
    }

    #[test]
    fn config_validation_rejects_bad_values() {
        let config = RestartConfig {
            replication_growth: 1.0,
            ..RestartConfig::default()
        };
        assert!(config.validate().is_err());
        let config = RestartConfig {
            lambda: 1.0,
            ..RestartConfig::default()
        };
        assert!(config.validate().is_err());
        let config = RestartConfig {
            stop: StopRule::budget(0),
            ..RestartConfig::default()
        };
        assert!(config.validate().is_err());
    }
}
