//! Max-Min Ant System for TSP tours and pseudo-Boolean bitstrings.
//!
//! Trails are kept inside `[tau_min, tau_max]` after every update, so every
//! feasible solution retains a positive construction probability at all
//! times: the algorithm can always escape, it just may take very long once
//! the trails have converged to a poor attractor. That slow escape is exactly
//! the failure mode restarts are for.
//!
//! The construction, update and bound conventions follow the usual MMAS
//! playbook: trails initialized optimistically at `tau_max`, evaporation by
//! `(1-rho)`, deposits from the iteration-best solution with periodic
//! best-so-far deposits, and for TSP `tau_max = 1/(rho * best_length)` with
//! `tau_min = tau_max / (2n)`. For bitstrings the bounds are the fixed
//! symmetric pair `1/n`, `1 - 1/n` and the deposit is a constant, since
//! the fitness is negative and `1/f` would be meaningless as an amount.

use crate::algo::{ObjectiveValue, Problem, Resumable};
use crate::localsearch::{three_opt, two_half_opt, two_opt, DistanceMatrix, NeighborLists};
use crate::tsplib::TspInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalSearchKind {
    None,
    TwoOpt,
    TwoHalfOpt,
    ThreeOpt,
}

impl LocalSearchKind {
    pub fn name(self) -> &'static str {
        match self {
            LocalSearchKind::None => "none",
            LocalSearchKind::TwoOpt => "2opt",
            LocalSearchKind::TwoHalfOpt => "2.5opt",
            LocalSearchKind::ThreeOpt => "3opt",
        }
    }
}

/// MMAS parameters. The defaults are reconstruction choices in the spirit of
/// the usual MMAS settings, not prescribed constants; override freely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmasConfig {
    pub ants: u32,
    /// Pheromone exponent.
    pub alpha: f64,
    /// Heuristic (inverse distance) exponent; unused for bitstrings.
    pub beta: f64,
    /// Evaporation rate in (0,1).
    pub rho: f64,
    /// Candidate-list size for tour construction and local search.
    pub candidate_list: usize,
    pub local_search: LocalSearchKind,
    /// Every this many iterations the best-so-far solution deposits instead
    /// of the iteration best; 0 keeps deposits strictly iteration-best.
    pub best_so_far_period: u32,
}

impl MmasConfig {
    pub fn tsp_default() -> Self {
        MmasConfig {
            ants: 25,
            alpha: 1.0,
            beta: 2.0,
            rho: 0.02,
            candidate_list: 20,
            local_search: LocalSearchKind::TwoOpt,
            best_so_far_period: 25,
        }
    }

    pub fn bitstring_default() -> Self {
        MmasConfig {
            ants: 10,
            alpha: 1.0,
            beta: 0.0,
            rho: 0.02,
            candidate_list: 0,
            local_search: LocalSearchKind::None,
            best_so_far_period: 25,
        }
    }
}

/// Edge-indexed symmetric trail matrix with enforced bounds.
#[derive(Debug, Clone)]
pub struct PheromoneModel {
    n: usize,
    trails: Vec<f64>,
    tau_min: f64,
    tau_max: f64,
}

impl PheromoneModel {
    pub fn new(n: usize, tau_min: f64, tau_max: f64) -> Self {
        assert!(tau_min > 0.0 && tau_min <= tau_max);
        PheromoneModel {
            n,
            trails: vec![tau_max; n * n],
            tau_min,
            tau_max,
        }
    }

    pub fn tau_min(&self) -> f64 {
        self.tau_min
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    #[inline]
    pub fn get(&self, a: u32, b: u32) -> f64 {
        self.trails[a as usize * self.n + b as usize]
    }

    fn set(&mut self, a: u32, b: u32, value: f64) {
        let v = value.clamp(self.tau_min, self.tau_max);
        self.trails[a as usize * self.n + b as usize] = v;
        self.trails[b as usize * self.n + a as usize] = v;
    }

    /// Tightens the bounds (after a new best solution) and re-clamps every
    /// trail into the new interval.
    pub fn set_bounds(&mut self, tau_min: f64, tau_max: f64) {
        assert!(tau_min > 0.0 && tau_min <= tau_max);
        self.tau_min = tau_min;
        self.tau_max = tau_max;
        for t in &mut self.trails {
            *t = t.clamp(tau_min, tau_max);
        }
    }

    pub fn evaporate(&mut self, rho: f64) {
        for t in &mut self.trails {
            *t = (*t * (1.0 - rho)).clamp(self.tau_min, self.tau_max);
        }
    }

    pub fn deposit_tour(&mut self, tour: &[u32], amount: f64) {
        for w in tour.windows(2) {
            self.set(w[0], w[1], self.get(w[0], w[1]) + amount);
        }
        let last = tour[tour.len() - 1];
        self.set(last, tour[0], self.get(last, tour[0]) + amount);
    }

    /// True when every trail lies inside the bounds.
    pub fn bounds_hold(&self) -> bool {
        self.trails
            .iter()
            .all(|&t| t >= self.tau_min && t <= self.tau_max)
    }
}

/// Builds a tour by iterated roulette selection over the candidate list of
/// the current city, weighted by `tau^alpha * eta^beta` (eta = 1/distance,
/// with the distance floored at 0.5 so zero-length edges keep a finite
/// weight). Falls back to all unvisited cities when every candidate has been
/// visited.
pub fn construct_tour(
    pheromone: &PheromoneModel,
    neighbors: &NeighborLists,
    eta_pow: &[f64],
    alpha: f64,
    n: usize,
    rng: &mut impl Rng,
) -> Vec<u32> {
    let mut tour = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    let start = rng.random_range(0..n as u32);
    tour.push(start);
    visited[start as usize] = true;

    let weight = |pher: &PheromoneModel, from: u32, to: u32| -> f64 {
        let tau = pher.get(from, to);
        let tau_pow = if alpha == 1.0 { tau } else { tau.powf(alpha) };
        tau_pow * eta_pow[from as usize * n + to as usize]
    };

    let mut current = start;
    for _ in 1..n {
        let candidates = neighbors.neighbors(current);
        let mut total = 0.0f64;
        for &c in candidates {
            if !visited[c as usize] {
                total += weight(pheromone, current, c);
            }
        }
        let next = if total > 0.0 {
            let mut pick = rng.random::<f64>() * total;
            let mut chosen = None;
            for &c in candidates {
                if !visited[c as usize] {
                    pick -= weight(pheromone, current, c);
                    if pick <= 0.0 {
                        chosen = Some(c);
                        break;
                    }
                }
            }
            // guard against accumulated rounding: fall back to the last
            // unvisited candidate
            chosen.unwrap_or_else(|| {
                *candidates
                    .iter()
                    .rev()
                    .find(|&&c| !visited[c as usize])
                    .unwrap()
            })
        } else {
            // candidate list exhausted: roulette over all unvisited cities
            let unvisited: Vec<u32> = (0..n as u32).filter(|&c| !visited[c as usize]).collect();
            let total: f64 = unvisited
                .iter()
                .map(|&c| weight(pheromone, current, c))
                .sum();
            let mut pick = rng.random::<f64>() * total;
            let mut chosen = unvisited[unvisited.len() - 1];
            for &c in &unvisited {
                pick -= weight(pheromone, current, c);
                if pick <= 0.0 {
                    chosen = c;
                    break;
                }
            }
            chosen
        };
        tour.push(next);
        visited[next as usize] = true;
        current = next;
    }
    tour
}

/// Shared, immutable description of a TSP problem for MMAS replications.
#[derive(Debug, Clone)]
pub struct TspProblem {
    instance: Arc<TspInstance>,
    dist: Arc<DistanceMatrix>,
    neighbors: Arc<NeighborLists>,
    eta_pow: Arc<Vec<f64>>,
    config: MmasConfig,
    nn_length: i64,
}

impl TspProblem {
    pub fn new(instance: TspInstance, config: MmasConfig) -> Self {
        let dist = DistanceMatrix::from_instance(&instance);
        let neighbors = NeighborLists::build(&dist, config.candidate_list);
        let n = instance.dimension;
        let mut eta_pow = vec![0.0f64; n * n];
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    let d = (dist.dist(a as u32, b as u32) as f64).max(0.5);
                    eta_pow[a * n + b] = (1.0 / d).powf(config.beta);
                }
            }
        }
        let nn_length = nearest_neighbor_length(&dist);
        TspProblem {
            instance: Arc::new(instance),
            dist: Arc::new(dist),
            neighbors: Arc::new(neighbors),
            eta_pow: Arc::new(eta_pow),
            config,
            nn_length,
        }
    }

    pub fn instance(&self) -> &TspInstance {
        &self.instance
    }

    pub fn config(&self) -> &MmasConfig {
        &self.config
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.dist
    }
}

fn nearest_neighbor_length(dist: &DistanceMatrix) -> i64 {
    let n = dist.len();
    let mut visited = vec![false; n];
    visited[0] = true;
    let mut current = 0u32;
    let mut total = 0i64;
    for _ in 1..n {
        let next = (0..n as u32)
            .filter(|&c| !visited[c as usize])
            .min_by_key(|&c| (dist.dist(current, c), c))
            .unwrap();
        total += dist.dist(current, next);
        visited[next as usize] = true;
        current = next;
    }
    total + dist.dist(current, 0)
}

impl Problem for TspProblem {
    type Algorithm = MmasTsp;

    fn spawn(&self, seed: u64) -> MmasTsp {
        let n = self.dist.len();
        let rho = self.config.rho;
        // degenerate instances (a single city, or all zero distances) would
        // otherwise produce an infinite bound
        let tau_max = 1.0 / (rho * (self.nn_length.max(1)) as f64);
        let tau_min = tau_max / (2.0 * n as f64);
        MmasTsp {
            problem: self.clone(),
            pheromone: PheromoneModel::new(n, tau_min, tau_max),
            rng: ChaCha8Rng::seed_from_u64(seed),
            best_tour: Vec::new(),
            best_length: i64::MAX,
            iteration: 0,
        }
    }
}

/// One MMAS replication on a TSP instance.
pub struct MmasTsp {
    problem: TspProblem,
    pheromone: PheromoneModel,
    rng: ChaCha8Rng,
    best_tour: Vec<u32>,
    best_length: i64,
    iteration: u64,
}

impl MmasTsp {
    pub fn pheromone(&self) -> &PheromoneModel {
        &self.pheromone
    }

    pub fn best_tour(&self) -> &[u32] {
        &self.best_tour
    }

    pub fn best_length(&self) -> i64 {
        self.best_length
    }

    fn improve(&mut self, tour: Vec<u32>) -> Vec<u32> {
        let d = &self.problem.dist;
        let nbrs = &self.problem.neighbors;
        match self.problem.config.local_search {
            LocalSearchKind::None => tour,
            LocalSearchKind::TwoOpt => two_opt(&tour, d, nbrs),
            LocalSearchKind::TwoHalfOpt => two_half_opt(&tour, d, nbrs),
            LocalSearchKind::ThreeOpt => three_opt(&tour, d, nbrs),
        }
    }
}

impl Resumable for MmasTsp {
    /// One iteration: every ant constructs a tour (plus local search), the
    /// iteration best is returned, trails evaporate and the deposit rule
    /// reinforces either the iteration best or, periodically, the best so
    /// far.
    fn step(&mut self) -> ObjectiveValue {
        let config = self.problem.config;
        let n = self.problem.dist.len();
        self.iteration += 1;

        let mut iter_best: Option<(i64, Vec<u32>)> = None;
        for _ in 0..config.ants {
            let tour = construct_tour(
                &self.pheromone,
                &self.problem.neighbors,
                &self.problem.eta_pow,
                config.alpha,
                n,
                &mut self.rng,
            );
            let tour = self.improve(tour);
            let length = self.problem.dist.tour_length(&tour);
            if iter_best.as_ref().is_none_or(|(best, _)| length < *best) {
                iter_best = Some((length, tour));
            }
        }
        let (iter_length, iter_tour) = iter_best.expect("at least one ant");

        if iter_length < self.best_length {
            self.best_length = iter_length;
            self.best_tour = iter_tour.clone();
            let tau_max = 1.0 / (config.rho * self.best_length.max(1) as f64);
            let tau_min = tau_max / (2.0 * n as f64);
            self.pheromone.set_bounds(tau_min, tau_max);
        }

        self.pheromone.evaporate(config.rho);
        let use_best_so_far = config.best_so_far_period > 0
            && self.iteration.is_multiple_of(u64::from(config.best_so_far_period));
        let (deposit_tour, deposit_length) = if use_best_so_far {
            (&self.best_tour, self.best_length)
        } else {
            (&iter_tour, iter_length)
        };
        let amount = 1.0 / deposit_length as f64;
        let tour_copy: Vec<u32> = deposit_tour.clone();
        self.pheromone.deposit_tour(&tour_copy, amount);

        ObjectiveValue::new(iter_length as f64)
    }
}

/// Fitness of a bitstring: `-(|count_of_ones - (N-1)/2|)`. Two single-flip
/// local minima exist (all zeros and all ones) and only the all-ones one is
/// global, with value `-(N+1)/2`.
pub fn bitstring_fitness(bits: &[bool]) -> ObjectiveValue {
    let ones = bits.iter().filter(|&&b| b).count() as f64;
    let n = bits.len() as f64;
    ObjectiveValue::new(-(ones - (n - 1.0) / 2.0).abs())
}

/// The global optimum of [`bitstring_fitness`] for strings of length `n`.
pub fn bitstring_optimum(n: usize) -> ObjectiveValue {
    ObjectiveValue::new(-((n as f64 + 1.0) / 2.0))
}

/// Per-bit trail pair (value for 0, value for 1) with fixed symmetric bounds.
#[derive(Debug, Clone)]
pub struct BitTrails {
    pairs: Vec<[f64; 2]>,
    tau_min: f64,
    tau_max: f64,
}

impl BitTrails {
    pub fn new(n: usize) -> Self {
        // 1/n and 1 - 1/n cross over below n = 2; cap the floor at 0.5 so
        // one- and two-bit strings degenerate to fair coins instead of an
        // inverted interval
        let tau_min = (1.0 / n as f64).min(0.5);
        let tau_max = 1.0 - tau_min;
        BitTrails {
            pairs: vec![[tau_max; 2]; n],
            tau_min,
            tau_max,
        }
    }

    pub fn tau_min(&self) -> f64 {
        self.tau_min
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn pair(&self, bit: usize) -> [f64; 2] {
        self.pairs[bit]
    }

    pub fn set_pair(&mut self, bit: usize, pair: [f64; 2]) {
        self.pairs[bit] = [
            pair[0].clamp(self.tau_min, self.tau_max),
            pair[1].clamp(self.tau_min, self.tau_max),
        ];
    }

    pub fn evaporate(&mut self, rho: f64) {
        for pair in &mut self.pairs {
            for t in pair.iter_mut() {
                *t = (*t * (1.0 - rho)).clamp(self.tau_min, self.tau_max);
            }
        }
    }

    /// Constant deposit on the components of `bits`.
    pub fn deposit(&mut self, bits: &[bool], amount: f64) {
        for (pair, &bit) in self.pairs.iter_mut().zip(bits) {
            let side = usize::from(bit);
            pair[side] = (pair[side] + amount).clamp(self.tau_min, self.tau_max);
        }
    }

    pub fn bounds_hold(&self) -> bool {
        self.pairs
            .iter()
            .flatten()
            .all(|&t| t >= self.tau_min && t <= self.tau_max)
    }
}

/// Samples a bitstring: bit i is 1 with probability `tau_1 / (tau_0 + tau_1)`.
pub fn construct_bitstring(trails: &BitTrails, rng: &mut impl Rng) -> Vec<bool> {
    trails
        .pairs
        .iter()
        .map(|pair| rng.random::<f64>() * (pair[0] + pair[1]) < pair[1])
        .collect()
}

/// Pseudo-Boolean minimization problem over bitstrings of length `n`.
#[derive(Debug, Clone)]
pub struct BitstringProblem {
    pub n: usize,
    config: MmasConfig,
}

impl BitstringProblem {
    pub fn new(n: usize, config: MmasConfig) -> Self {
        assert!(n >= 1);
        BitstringProblem { n, config }
    }

    pub fn optimum(&self) -> ObjectiveValue {
        bitstring_optimum(self.n)
    }

    pub fn config(&self) -> &MmasConfig {
        &self.config
    }
}

impl Problem for BitstringProblem {
    type Algorithm = MmasBitstring;

    fn spawn(&self, seed: u64) -> MmasBitstring {
        MmasBitstring {
            config: self.config,
            trails: BitTrails::new(self.n),
            rng: ChaCha8Rng::seed_from_u64(seed),
            best_bits: Vec::new(),
            best_value: ObjectiveValue::new(f64::INFINITY),
            iteration: 0,
        }
    }
}

/// One MMAS replication on the bitstring problem.
pub struct MmasBitstring {
    config: MmasConfig,
    trails: BitTrails,
    rng: ChaCha8Rng,
    best_bits: Vec<bool>,
    best_value: ObjectiveValue,
    iteration: u64,
}

impl MmasBitstring {
    pub fn trails(&self) -> &BitTrails {
        &self.trails
    }

    pub fn best_value(&self) -> ObjectiveValue {
        self.best_value
    }
}

impl Resumable for MmasBitstring {
    fn step(&mut self) -> ObjectiveValue {
        self.iteration += 1;
        let mut iter_best: Option<(ObjectiveValue, Vec<bool>)> = None;
        for _ in 0..self.config.ants {
            let bits = construct_bitstring(&self.trails, &mut self.rng);
            let value = bitstring_fitness(&bits);
            if iter_best.as_ref().is_none_or(|(best, _)| value < *best) {
                iter_best = Some((value, bits));
            }
        }
        let (iter_value, iter_bits) = iter_best.expect("at least one ant");

        if iter_value < self.best_value {
            self.best_value = iter_value;
            self.best_bits = iter_bits.clone();
        }

        self.trails.evaporate(self.config.rho);
        let use_best_so_far = self.config.best_so_far_period > 0
            && self.iteration.is_multiple_of(u64::from(self.config.best_so_far_period));
        let deposit_bits = if use_best_so_far {
            &self.best_bits
        } else {
            &iter_bits
        };
        let bits_copy: Vec<bool> = deposit_bits.clone();
        self.trails.deposit(&bits_copy, self.config.rho);

        iter_value
    }
}
