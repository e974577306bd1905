//! The resumable-algorithm contract and the trajectory data model shared by
//! the restart machinery.
//!
//! A replication is an independent, seeded instance of the underlying
//! stochastic minimizer. Its trajectory records the raw objective value
//! produced at each step together with the running best-so-far series; the
//! restart procedure only ever looks at the latter.

use thiserror::Error;

/// Real-valued fitness of a single solution.
///
/// Comparisons are exact: the problems handled here (integer tour lengths,
/// half-integer bitstring fitness, 0/1 synthetic outcomes) all produce values
/// that are exactly representable, so no tolerance is involved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveValue(f64);

impl ObjectiveValue {
    pub fn new(value: f64) -> Self {
        debug_assert!(!value.is_nan(), "objective values must be comparable");
        ObjectiveValue(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Eq for ObjectiveValue {}

impl PartialOrd for ObjectiveValue {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ObjectiveValue {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl std::fmt::Display for ObjectiveValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<f64> for ObjectiveValue {
    fn from(v: f64) -> Self {
        ObjectiveValue::new(v)
    }
}

/// One step of a resumable stochastic minimizer.
///
/// `step` advances exactly one iteration and returns the objective value of
/// the solution produced at that step. An instance carries all of its own
/// state (including its RNG), so suspending and resuming it is
/// indistinguishable from running it without interruption, and two instances
/// built from the same seed produce identical trajectories.
pub trait Resumable {
    fn step(&mut self) -> ObjectiveValue;
}

/// A problem that can spawn seeded replications of its underlying algorithm.
pub trait Problem: Sync {
    type Algorithm: Resumable + Send;

    /// Builds a fresh algorithm instance from a fully-mixed seed.
    fn spawn(&self, seed: u64) -> Self::Algorithm;
}

/// SplitMix64 finalizer; used to derive per-replication seeds.
pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Seed for replication `index` (1-based) under `master_seed`.
///
/// The mix depends only on the pair, never on the pool size, so growing a
/// replication pool leaves the existing replications bit-identical.
pub fn replication_seed(master_seed: u64, index: u32) -> u64 {
    splitmix64(master_seed ^ splitmix64(u64::from(index)))
}

/// Spawns replication `index` (1-based) of `problem` under `master_seed`.
pub fn spawn_replication<P: Problem>(problem: &P, master_seed: u64, index: u32) -> P::Algorithm {
    assert!(index >= 1, "replication indices are 1-based");
    problem.spawn(replication_seed(master_seed, index))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrajectoryError {
    #[error("cannot extend trajectory of length {len} to earlier step {to_step}")]
    ShrinkingExtend { len: u32, to_step: u32 },
}

/// Per-replication objective series: the raw value of each step and the
/// running minimum (best-so-far).
///
/// Entries are append-only; step `t` is 1-based.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    raw: Vec<ObjectiveValue>,
    best: Vec<ObjectiveValue>,
}

impl Trajectory {
    pub fn new() -> Self {
        Trajectory {
            raw: Vec::new(),
            best: Vec::new(),
        }
    }

    /// Current step count.
    pub fn len(&self) -> u32 {
        self.raw.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// Raw objective value of step `t` (1-based).
    pub fn raw_at(&self, t: u32) -> ObjectiveValue {
        self.raw[(t - 1) as usize]
    }

    /// Best value found within the first `t` steps (1-based).
    pub fn best_at(&self, t: u32) -> ObjectiveValue {
        self.best[(t - 1) as usize]
    }

    /// Best value over the whole trajectory; None when empty.
    pub fn final_best(&self) -> Option<ObjectiveValue> {
        self.best.last().copied()
    }

    fn push(&mut self, value: ObjectiveValue) {
        let best = match self.best.last() {
            Some(&b) => b.min(value),
            None => value,
        };
        self.raw.push(value);
        self.best.push(best);
    }

    /// Runs `algo` forward until the trajectory has exactly `to_step` steps.
    ///
    /// Extending to the current length is a no-op; the existing prefix is
    /// never touched.
    pub fn extend_with<A: Resumable>(
        &mut self,
        algo: &mut A,
        to_step: u32,
    ) -> Result<(), TrajectoryError> {
        if to_step < self.len() {
            return Err(TrajectoryError::ShrinkingExtend {
                len: self.len(),
                to_step,
            });
        }
        while self.len() < to_step {
            let v = algo.step();
            self.push(v);
        }
        Ok(())
    }
}

/// Rectangular view of the replication trajectories: after each restart
/// iteration the pool holds exactly `r_k` trajectories of length `T_k`.
#[derive(Debug, Clone, Default)]
pub struct ReplicationPool {
    trajectories: Vec<Trajectory>,
}

impl ReplicationPool {
    pub fn new() -> Self {
        ReplicationPool {
            trajectories: Vec::new(),
        }
    }

    pub fn replications(&self) -> u32 {
        self.trajectories.len() as u32
    }

    /// Common length of the trajectories; 0 for an empty pool. Panics in
    /// debug builds if the pool is ragged.
    pub fn common_length(&self) -> u32 {
        let len = self.trajectories.first().map_or(0, Trajectory::len);
        debug_assert!(self.trajectories.iter().all(|t| t.len() == len));
        len
    }

    pub fn push(&mut self, trajectory: Trajectory) {
        self.trajectories.push(trajectory);
    }

    pub fn trajectory(&self, index: u32) -> &Trajectory {
        &self.trajectories[(index - 1) as usize]
    }

    pub fn trajectory_mut(&mut self, index: u32) -> &mut Trajectory {
        &mut self.trajectories[(index - 1) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Trajectory> {
        self.trajectories.iter()
    }

    /// Minimum best-so-far value over the whole pool (the matrix minimum).
    pub fn min_value(&self) -> Option<ObjectiveValue> {
        self.trajectories.iter().filter_map(Trajectory::final_best).min()
    }
}
