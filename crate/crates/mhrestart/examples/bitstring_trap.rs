//! The two-basin pseudo-Boolean problem: minimize -|ones - (N-1)/2|.
//!
//! All-zeros is a local minimum, all-ones the global one. An MMAS run that
//! drifts toward zeros stays there for an astronomically long time, so plain
//! runs fail with noticeable probability while restarts redraw the initial
//! drift.
//!
//! ```bash
//! cargo run --release -p mhrestart --example bitstring_trap
//! ```

use mhrestart::harness::{estimate_failure_curve, Mode};
use mhrestart::mmas::{bitstring_fitness, BitstringProblem, MmasConfig};
use mhrestart::restart::RestartConfig;

fn main() {
    let n = 20;
    println!("fitness landscape by number of ones (N = {n}):");
    for ones in [0, 5, 9, 10, 15, n] {
        let bits: Vec<bool> = (0..n).map(|i| i < ones).collect();
        println!("  {ones:>2} ones -> f = {}", bitstring_fitness(&bits));
    }

    let config = MmasConfig {
        ants: 2,
        rho: 0.1,
        ..MmasConfig::bitstring_default()
    };
    let problem = BitstringProblem::new(n, config);
    let target = Some(problem.optimum());
    let budget = 20_000;
    let m = 400;

    println!("\nestimating failure probabilities from {m} runs (budget {budget})...");
    let plain = estimate_failure_curve(&problem, &Mode::Plain, m, budget, target, 11).unwrap();
    let rp = estimate_failure_curve(
        &problem,
        &Mode::Rp(RestartConfig::default()),
        m,
        budget,
        target,
        11,
    )
    .unwrap();

    println!("\n      t      plain         rp");
    for t in [200u64, 500, 1_000, 2_000, 5_000, 10_000, 20_000] {
        println!(
            "{t:>7}  {:>9.4}  {:>9.4}",
            plain.failure_probability_at(t),
            rp.failure_probability_at(t)
        );
    }
    println!(
        "\nat the horizon: plain fails {:.1}% of runs, the restart procedure {:.1}%",
        100.0 * plain.failure_probability_at(budget),
        100.0 * rp.failure_probability_at(budget)
    );
}
