//! Closed-form restart mathematics.
//!
//! Everything here is a pure function of a failure curve `p(t)`: the
//! probability that the underlying algorithm has not found the optimum within
//! `t` steps. The central object is
//!
//! ```text
//! g(t) = 1 / ((1 - p(t)^(1/t)) * p(t))
//! ```
//!
//! an upper bound on the expected optimization time of the process restarted
//! every `t` steps. Its first minimizer `t_m` is the optimal restart time; the
//! brute-force scan in [`optimal_restart_time`] doubles as the oracle for the
//! adaptive procedure's convergence tests.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("curve value p({t}) = {p} outside [0,1]")]
    OutOfRange { t: u32, p: f64 },
    #[error("curve must be nonincreasing: p({t}) = {current} > p({prev_t}) = {prev}")]
    Increasing {
        t: u32,
        current: f64,
        prev_t: u32,
        prev: f64,
    },
    #[error("empty failure curve")]
    Empty,
    #[error("restart period {period} outside 1..={len}")]
    PeriodOutOfRange { period: u32, len: u32 },
    #[error("time index {k} must be >= 1")]
    TimeOutOfRange { k: u64 },
    #[error("series diverges: p({period}) = 1")]
    Divergent { period: u32 },
    #[error("g is infinite everywhere: no finite restart time exists")]
    NoOptimum,
}

/// Discrete failure probabilities p(1), p(2), ..., p(T_max), nonincreasing in
/// t and contained in [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct FailureCurve {
    values: Vec<f64>,
}

impl FailureCurve {
    pub fn new(values: Vec<f64>) -> Result<Self, TheoryError> {
        if values.is_empty() {
            return Err(TheoryError::Empty);
        }
        for (i, &p) in values.iter().enumerate() {
            let t = (i + 1) as u32;
            if !(0.0..=1.0).contains(&p) {
                return Err(TheoryError::OutOfRange { t, p });
            }
            if i > 0 && p > values[i - 1] {
                return Err(TheoryError::Increasing {
                    t,
                    current: p,
                    prev_t: t - 1,
                    prev: values[i - 1],
                });
            }
        }
        Ok(FailureCurve { values })
    }

    /// Analytic curve of an absorbing-basin process: a run is absorbed at
    /// spawn with probability `beta` and never succeeds; otherwise each step
    /// succeeds independently with probability `q`, giving
    /// `p(t) = beta + (1 - beta) * (1 - q)^t`.
    pub fn basin(beta: f64, q: f64, t_max: u32) -> Self {
        Self::delayed_basin(beta, q, 1, t_max)
    }

    /// Basin curve with a warm-up: success is impossible before step
    /// `warmup`, so `p(t) = 1` for `t < warmup` and
    /// `p(t) = beta + (1 - beta) * (1 - q)^(t - warmup + 1)` from there on.
    ///
    /// The warm-up is what gives g an interior minimum. Without it the basin
    /// process has a nonincreasing hazard rate (a mixture of a point mass and
    /// a geometric), so g is increasing and the optimal restart time
    /// degenerates to t = 1; see `basin_without_warmup_restarts_immediately`.
    pub fn delayed_basin(beta: f64, q: f64, warmup: u32, t_max: u32) -> Self {
        assert!(beta > 0.0 && beta < 1.0, "beta must be in (0,1)");
        assert!(q > 0.0 && q <= 1.0, "q must be in (0,1]");
        assert!(warmup >= 1);
        let values = (1..=t_max)
            .map(|t| {
                if t < warmup {
                    1.0
                } else {
                    beta + (1.0 - beta) * (1.0 - q).powi((t - warmup + 1) as i32)
                }
            })
            .collect();
        FailureCurve { values }
    }

    pub fn len(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// p(t), 1-based.
    pub fn at(&self, t: u32) -> f64 {
        self.values[(t - 1) as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn check_period(&self, period: u32) -> Result<(), TheoryError> {
        if period < 1 || period > self.len() {
            return Err(TheoryError::PeriodOutOfRange {
                period,
                len: self.len(),
            });
        }
        Ok(())
    }
}

/// g(t) for a single point: `1 / ((1 - p^(1/t)) * p)`, with an infinite
/// sentinel where p is 0 or 1 (the formula divides by zero there, and the
/// infinite value orders above every finite g as intended).
pub fn g_value(p: f64, t: u32) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return f64::INFINITY;
    }
    1.0 / ((1.0 - p.powf(1.0 / f64::from(t))) * p)
}

/// Denominator of g: `(1 - p^(1/t)) * p`, zero where p is 0 or 1. Its global
/// maximum sits at the same position as the minimum of g.
pub fn g_denominator_value(p: f64, t: u32) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    (1.0 - p.powf(1.0 / f64::from(t))) * p
}

/// Failure probability of the process restarted every `period` steps, at time
/// `k`:
///
/// ```text
/// P(T_R > k) = p(T)^floor((k-1)/T) * p(k - floor((k-1)/T) * T)
/// ```
///
/// i.e. the completed periods must all fail and the current partial period
/// must have failed for its residual length.
pub fn restart_tail_probability(
    curve: &FailureCurve,
    period: u32,
    k: u64,
) -> Result<f64, TheoryError> {
    curve.check_period(period)?;
    if k < 1 {
        return Err(TheoryError::TimeOutOfRange { k });
    }
    let full_periods = (k - 1) / u64::from(period);
    let residual = k - full_periods * u64::from(period);
    debug_assert!(residual >= 1 && residual <= u64::from(period));
    let p_full = curve.at(period);
    Ok(pow_u64(p_full, full_periods) * curve.at(residual as u32))
}

fn pow_u64(base: f64, mut exp: u64) -> f64 {
    // f64::powi takes i32; exponents here can exceed that
    let mut acc = 1.0f64;
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= b;
        }
        b *= b;
        exp >>= 1;
    }
    acc
}

/// g(T): the closed-form upper bound on the expected optimization time of the
/// process restarted every `period` steps. Infinite when p(T) is 0 or 1.
pub fn expected_time_bound(curve: &FailureCurve, period: u32) -> Result<f64, TheoryError> {
    curve.check_period(period)?;
    Ok(g_value(curve.at(period), period))
}

/// Truncated series for the expected optimization time under period-`period`
/// restarts, together with an upper bound on the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    /// Partial sum of P(T_R > k) for k = 1..=horizon.
    pub partial_sum: f64,
    /// Upper bound on the remaining tail of the series.
    pub tail_bound: f64,
    /// Truncation point actually used (a multiple of the period).
    pub horizon: u64,
}

impl SeriesValue {
    /// Partial sum plus tail bound: an upper bound on the series value that
    /// never exceeds [`expected_time_bound`].
    pub fn total(&self) -> f64 {
        self.partial_sum + self.tail_bound
    }
}

/// Sums the expected-optimization-time series `E = sum_k P(T_R > k)`.
///
/// When no horizon is given, the truncation point is the first period
/// boundary where the geometric tail bound drops below 1e-12. A given horizon
/// is rounded up to a period boundary so the tail bound stays in closed form.
pub fn expected_optimization_time(
    curve: &FailureCurve,
    period: u32,
    horizon: Option<u64>,
) -> Result<SeriesValue, TheoryError> {
    curve.check_period(period)?;
    let p_full = curve.at(period);
    if p_full >= 1.0 {
        return Err(TheoryError::Divergent { period });
    }

    let tail_after = |full_periods: u64| -> f64 {
        // sum over k beyond `full_periods` complete periods of
        // p(T)^floor((k-1)/T) = T * p^m / (1 - p)
        f64::from(period) * pow_u64(p_full, full_periods) / (1.0 - p_full)
    };

    let periods = match horizon {
        Some(h) => h.div_ceil(u64::from(period)).max(1),
        None => {
            let mut m = 1u64;
            while tail_after(m) >= 1e-12 && m < 1_000_000 {
                m += 1;
            }
            m
        }
    };

    let mut partial = 0.0f64;
    let mut period_factor = 1.0f64; // p(T)^m for the m-th period block
    for _ in 0..periods {
        for residual in 1..=period {
            partial += period_factor * curve.at(residual);
        }
        period_factor *= p_full;
    }

    Ok(SeriesValue {
        partial_sum: partial,
        tail_bound: tail_after(periods),
        horizon: periods * u64::from(period),
    })
}

/// Brute-force scan for the optimal restart time: the first position where g
/// attains its minimum over the curve's domain, skipping infinite values.
pub fn optimal_restart_time(curve: &FailureCurve) -> Result<(u32, f64), TheoryError> {
    let mut best: Option<(u32, f64)> = None;
    for t in 1..=curve.len() {
        let g = g_value(curve.at(t), t);
        if g.is_finite() && best.is_none_or(|(_, gb)| g < gb) {
            best = Some((t, g));
        }
    }
    best.ok_or(TheoryError::NoOptimum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Monte-Carlo oracle: samples the success step of a run with failure
    /// curve `p` by inverse transform (P(S > t) = p(t), success certain right
    /// after the curve ends), then plays the fixed-period restart process.
    struct CurveSimulator<'a> {
        curve: &'a FailureCurve,
        rng: ChaCha8Rng,
    }

    impl<'a> CurveSimulator<'a> {
        fn new(curve: &'a FailureCurve, seed: u64) -> Self {
            CurveSimulator {
                curve,
                rng: ChaCha8Rng::seed_from_u64(seed),
            }
        }

        /// Step at which a single fresh run first succeeds.
        fn sample_success_step(&mut self) -> u64 {
            let u: f64 = self.rng.random();
            // success at step t iff p(t) <= u < p(t-1); p(0) = 1
            for t in 1..=self.curve.len() {
                if u >= self.curve.at(t) {
                    return u64::from(t);
                }
            }
            u64::from(self.curve.len()) + 1
        }

        /// Total step count at which the restarted process (period T) first
        /// succeeds.
        fn sample_restart_success(&mut self, period: u32) -> u64 {
            let mut elapsed = 0u64;
            loop {
                let s = self.sample_success_step();
                if s <= u64::from(period) {
                    return elapsed + s;
                }
                elapsed += u64::from(period);
            }
        }
    }

    #[test]
    fn tail_probability_matches_hand_value() {
        let p = FailureCurve::new(vec![0.8, 0.5]).unwrap();
        // k=5, T=2: two full periods and a residual first step
        let got = restart_tail_probability(&p, 2, 5).unwrap();
        assert!((got - 0.5 * 0.5 * 0.8).abs() < 1e-15);
    }

    #[test]
    fn tail_probability_monte_carlo_agreement() {
        let p = FailureCurve::new(vec![0.8, 0.5]).unwrap();
        let mut sim = CurveSimulator::new(&p, 42);
        let n = 1_000_000u64;
        let mut exceed = [0u64; 8]; // counts of T_R > k for k = 1..=8
        for _ in 0..n {
            let s = sim.sample_restart_success(2);
            for (i, slot) in exceed.iter_mut().enumerate() {
                if s > (i + 1) as u64 {
                    *slot += 1;
                }
            }
        }
        for (i, &count) in exceed.iter().enumerate() {
            let k = (i + 1) as u64;
            let expect = restart_tail_probability(&p, 2, k).unwrap();
            let got = count as f64 / n as f64;
            let se = (expect * (1.0 - expect) / n as f64).sqrt().max(1e-9);
            assert!(
                (got - expect).abs() <= 3.0 * se,
                "k={k}: |{got} - {expect}| > 3se ({se})"
            );
        }
    }

    #[test]
    fn tail_probability_period_one_is_geometric() {
        let q = 0.37;
        let p = FailureCurve::new(vec![q]).unwrap();
        for k in [1u64, 2, 5, 20] {
            let got = restart_tail_probability(&p, 1, k).unwrap();
            assert!((got - q.powi(k as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_probability_at_k_equal_period() {
        let p = FailureCurve::new(vec![0.9, 0.6, 0.4]).unwrap();
        // k = T: zero full periods, residual T
        assert_eq!(restart_tail_probability(&p, 3, 3).unwrap(), 0.4);
    }

    #[test]
    fn tail_probability_rejects_bad_ranges() {
        let p = FailureCurve::new(vec![0.5]).unwrap();
        assert!(matches!(
            restart_tail_probability(&p, 2, 1),
            Err(TheoryError::PeriodOutOfRange { .. })
        ));
        assert!(matches!(
            restart_tail_probability(&p, 1, 0),
            Err(TheoryError::TimeOutOfRange { .. })
        ));
    }

    #[test]
    fn bound_hand_values() {
        let p = FailureCurve::new(vec![0.5]).unwrap();
        assert!((expected_time_bound(&p, 1).unwrap() - 4.0).abs() < 1e-12);

        let p = FailureCurve::new(vec![0.9, 0.25]).unwrap();
        // p(2)=0.25, sqrt = 0.5 -> 1/((1-0.5)*0.25) = 8
        assert!((expected_time_bound(&p, 2).unwrap() - 8.0).abs() < 1e-12);

        let p = FailureCurve::new(vec![0.5, 0.0]).unwrap();
        assert!(expected_time_bound(&p, 2).unwrap().is_infinite());
    }

    #[test]
    fn series_geometric_case() {
        // T=1, p=0.5: sum over k of 0.5^k = 1
        let p = FailureCurve::new(vec![0.5]).unwrap();
        let s = expected_optimization_time(&p, 1, None).unwrap();
        assert!((s.total() - 1.0).abs() < 1e-9);
        assert!(s.tail_bound < 1e-11);
    }

    #[test]
    fn series_matches_monte_carlo_mean() {
        let p = FailureCurve::new(vec![0.8, 0.5]).unwrap();
        let s = expected_optimization_time(&p, 2, None).unwrap();
        let mut sim = CurveSimulator::new(&p, 7);
        let n = 1_000_000u64;
        let mut sum = 0.0f64;
        let mut sum_sq = 0.0f64;
        for _ in 0..n {
            // the series equals E[T_R] - 1 for a success step counted from 1
            let x = (sim.sample_restart_success(2) - 1) as f64;
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        let se = (var / n as f64).sqrt();
        assert!(
            (mean - s.total()).abs() <= 3.0 * se,
            "|{mean} - {}| > 3se ({se})",
            s.total()
        );
    }

    #[test]
    fn series_diverges_at_certain_failure() {
        let p = FailureCurve::new(vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            expected_optimization_time(&p, 2, None),
            Err(TheoryError::Divergent { period: 2 })
        ));
    }

    #[test]
    fn geometric_curve_makes_restart_irrelevant() {
        // a geometric curve is memoryless: the restarted tail probability is
        // p(1)^k for every period, exactly
        let values: Vec<f64> = (1..=40).map(|t| 0.5f64.powi(t)).collect();
        let p = FailureCurve::new(values).unwrap();
        for period in [1u32, 3, 7, 40] {
            for k in [1u64, 2, 10, 35] {
                let got = restart_tail_probability(&p, period, k).unwrap();
                assert!(
                    (got - 0.5f64.powi(k as i32)).abs() < 1e-15,
                    "period {period}, k {k}"
                );
            }
        }
        // and g(t) = 2^(t+1) is increasing, so the first argmin is t = 1
        let (t_m, g_m) = optimal_restart_time(&p).unwrap();
        assert_eq!(t_m, 1);
        assert!((g_m - 4.0).abs() < 1e-12);
    }

    #[test]
    fn scan_returns_boundary_when_g_decreases_throughout() {
        // super-exponential decay keeps g falling over a short domain, so no
        // interior restart time wins and the scan lands on the last point
        let values: Vec<f64> = (1..=6).map(|t| (-0.01 * (t * t) as f64).exp()).collect();
        let p = FailureCurve::new(values).unwrap();
        let g: Vec<f64> = (1..=p.len()).map(|t| g_value(p.at(t), t)).collect();
        assert!(g.windows(2).all(|w| w[1] < w[0]));
        let (t_m, _) = optimal_restart_time(&p).unwrap();
        assert_eq!(t_m, 6);
    }

    #[test]
    fn scan_on_constant_curve_restarts_immediately() {
        let p = FailureCurve::new(vec![0.5; 60]).unwrap();
        let (t_m, g_m) = optimal_restart_time(&p).unwrap();
        assert_eq!(t_m, 1);
        assert!((g_m - 4.0).abs() < 1e-12);
    }

    #[test]
    fn basin_without_warmup_restarts_immediately() {
        // A pure absorbed-mixture curve has decreasing hazard, so g is
        // increasing and the scan degenerates to t = 1.
        let p = FailureCurve::basin(0.3, 0.05, 10_000);
        let (t_m, g_m) = optimal_restart_time(&p).unwrap();
        assert_eq!(t_m, 1);
        assert!((g_m - g_value(p.at(1), 1)).abs() < 1e-12);
        for t in 2..=p.len() {
            assert!(g_value(p.at(t), t) > g_m);
        }
    }

    #[test]
    fn delayed_basin_has_interior_minimum() {
        let p = FailureCurve::delayed_basin(0.3, 0.05, 100, 10_000);
        let (t_m, g_m) = optimal_restart_time(&p).unwrap();
        assert!(t_m > 100 && t_m < 200, "t_m = {t_m}");
        // first-argmin contract: strictly larger g before t_m
        for t in 1..t_m {
            assert!(g_value(p.at(t), t) > g_m);
        }
    }

    #[test]
    fn scan_errors_when_g_is_never_finite() {
        let p = FailureCurve::new(vec![1.0, 1.0, 0.0]).unwrap();
        assert_eq!(optimal_restart_time(&p), Err(TheoryError::NoOptimum));
    }

    #[test]
    fn basin_spot_values() {
        let p = FailureCurve::basin(0.3, 1.0, 4);
        assert!((p.at(1) - 0.3).abs() < 1e-15);
        let p = FailureCurve::basin(0.3, 0.05, 2_000);
        assert!((p.at(2_000) - 0.3).abs() < 1e-6);
    }

    #[test]
    fn curve_validation() {
        assert!(matches!(
            FailureCurve::new(vec![0.5, 0.6]),
            Err(TheoryError::Increasing { t: 2, .. })
        ));
        assert!(matches!(
            FailureCurve::new(vec![1.5]),
            Err(TheoryError::OutOfRange { t: 1, .. })
        ));
        assert!(matches!(FailureCurve::new(vec![]), Err(TheoryError::Empty)));
    }

    fn nonincreasing_curve() -> impl Strategy<Value = FailureCurve> {
        proptest::collection::vec(0.0..=1.0f64, 1..30).prop_map(|mut v| {
            v.sort_by(|a, b| b.partial_cmp(a).unwrap());
            FailureCurve::new(v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn tail_is_nonincreasing_in_k(curve in nonincreasing_curve(), period_pick in 0u32..30, k in 1u64..60) {
            let period = period_pick % curve.len() + 1;
            let a = restart_tail_probability(&curve, period, k).unwrap();
            let b = restart_tail_probability(&curve, period, k + 1).unwrap();
            prop_assert!(b <= a + 1e-15);
        }

        #[test]
        fn tail_at_period_multiples_is_power(curve in nonincreasing_curve(), period_pick in 0u32..30, m in 1u64..20) {
            let period = period_pick % curve.len() + 1;
            let got = restart_tail_probability(&curve, period, m * u64::from(period)).unwrap();
            let expect = pow_u64(curve.at(period), m);
            prop_assert!((got - expect).abs() < 1e-12);
        }

        #[test]
        fn series_never_exceeds_bound(curve in nonincreasing_curve(), period_pick in 0u32..30) {
            let period = period_pick % curve.len() + 1;
            if curve.at(period) < 1.0 {
                let series = expected_optimization_time(&curve, period, None).unwrap();
                let bound = expected_time_bound(&curve, period).unwrap();
                prop_assert!(series.total() <= bound * (1.0 + 1e-12) + 1e-12);
            }
        }

        #[test]
        fn basin_curves_are_nonincreasing(beta in 0.01..0.99f64, q in 0.01..=1.0f64, warmup in 1u32..50) {
            // constructor re-validates monotonicity
            let curve = FailureCurve::delayed_basin(beta, q, warmup, 200);
            prop_assert!(FailureCurve::new(curve.values().to_vec()).is_ok());
        }

        #[test]
        fn scan_returns_the_first_argmin(curve in nonincreasing_curve()) {
            if let Ok((t_m, g_m)) = optimal_restart_time(&curve) {
                prop_assert!(g_value(curve.at(t_m), t_m) == g_m);
                for t in 1..t_m {
                    prop_assert!(g_value(curve.at(t), t) > g_m);
                }
                for t in t_m + 1..=curve.len() {
                    prop_assert!(g_value(curve.at(t), t) >= g_m);
                }
            }
        }
    }
}
