//! The adaptive restart procedure on a synthetic algorithm with a known
//! failure curve: watch σ̂_k find the optimal restart time.
//!
//! ```bash
//! cargo run --release -p mhrestart --example adaptive_rp
//! ```

use mhrestart::harness::SyntheticBasinProblem;
use mhrestart::restart::{run_rp, RestartConfig, StopRule};
use mhrestart::theory::optimal_restart_time;

fn main() {
    let problem = SyntheticBasinProblem::new(0.3, 0.05, 100);
    let (t_m, _) = optimal_restart_time(&problem.analytic_curve(10_000)).unwrap();
    println!("analytic optimal restart time: t_m = {t_m}\n");

    let config = RestartConfig::standard(StopRule::budget(1_000_000));
    let run = run_rp(&problem, &config, 7);

    println!("   k      r_k    T_k   sigma_k   pseudo_time");
    for rec in &run.trace {
        // print the early iterations and then every tenth
        if rec.k <= 8 || rec.k % 10 == 0 || rec.k as usize == run.trace.len() - 1 {
            println!(
                "{:>4}  {:>7}  {:>5}  {:>8}  {:>12}",
                rec.k, rec.replications, rec.horizon, rec.sigma_hat, rec.pseudo_time
            );
        }
    }

    let last = run.final_record();
    let err = 100.0 * (f64::from(last.sigma_hat) - f64::from(t_m)).abs() / f64::from(t_m);
    println!(
        "\nfinal estimate sigma = {} vs t_m = {t_m} ({err:.1}% off) after {} iterations",
        last.sigma_hat, last.k
    );
    println!(
        "the pool grew to {} replications of {} steps ({} steps total)",
        last.replications, last.horizon, last.pseudo_time
    );
}
