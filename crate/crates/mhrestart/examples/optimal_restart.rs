//! Closed-form restart analysis on a synthetic failure curve.
//!
//! Builds the absorbing-basin curve, scans g(t) for the optimal restart time
//! and compares the truncated expectation series with its closed-form bound.
//!
//! ```bash
//! cargo run --release -p mhrestart --example optimal_restart
//! ```

use mhrestart::theory::{
    expected_optimization_time, expected_time_bound, g_value, optimal_restart_time, FailureCurve,
};

fn main() {
    // warm-up 100 steps, then 30% of runs are absorbed and the rest succeed
    // with probability 0.05 per step
    let curve = FailureCurve::delayed_basin(0.3, 0.05, 100, 10_000);
    let (t_m, g_min) = optimal_restart_time(&curve).unwrap();
    println!("optimal restart time t_m = {t_m}, g(t_m) = {g_min:.2}");

    println!("\n    t      p(t)        g(t)");
    for t in [100u32, 110, t_m, 150, 200, 400, 1000] {
        println!("{t:>5}  {:>8.5}  {:>10.2}", curve.at(t), g_value(curve.at(t), t));
    }

    println!("\nexpected optimization time under period-t restarts:");
    for period in [t_m / 2, t_m, 2 * t_m] {
        let series = expected_optimization_time(&curve, period, None).unwrap();
        let bound = expected_time_bound(&curve, period).unwrap();
        println!(
            "  T = {period:>4}: series = {:>9.2} (tail bound {:.2e}), g bound = {:>9.2}",
            series.total(),
            series.tail_bound,
            bound
        );
    }

    // without the warm-up the basin mixture has decreasing hazard and the
    // scan degenerates to restarting every step
    let memoryless = FailureCurve::basin(0.3, 0.05, 10_000);
    let (t_m_flat, g_flat) = optimal_restart_time(&memoryless).unwrap();
    println!("\nwithout warm-up the same basin gives t_m = {t_m_flat} (g = {g_flat:.2}):");
    println!("a pure absorbed-or-memoryless process is best restarted immediately.");
}
