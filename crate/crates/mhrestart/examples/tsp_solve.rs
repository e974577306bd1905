//! Solve the bundled TSP instance with MMAS under the restart procedure.
//!
//! The instance keeps its 50 cities in convex position, so the registry
//! optimum is exact; the clustered spacing is chosen to make a single MMAS
//! run commit to a wrong tour about half the time, which is precisely the
//! situation restarts repair.
//!
//! ```bash
//! cargo run --release -p mhrestart --example tsp_solve
//! ```

use mhrestart::algo::ObjectiveValue;
use mhrestart::mmas::{LocalSearchKind, MmasConfig, TspProblem};
use mhrestart::restart::{run_rp, RestartConfig, StopRule};
use mhrestart::tsplib;
use std::path::Path;

fn main() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let registry = tsplib::registry_from_file(&data.join("optima.txt")).unwrap();
    let mut instance = tsplib::parse_file(&data.join("ringtrap50.tsp")).unwrap();
    tsplib::attach_optimum(&mut instance, &registry);
    let optimum = instance.known_optimum.unwrap();
    println!(
        "instance {} ({} cities, {}), registry optimum {optimum}",
        instance.name,
        instance.dimension,
        instance.metric.name()
    );

    let config = MmasConfig {
        ants: 4,
        alpha: 3.0,
        beta: 3.0,
        rho: 0.4,
        candidate_list: 14,
        local_search: LocalSearchKind::None,
        best_so_far_period: 1,
    };
    let problem = TspProblem::new(instance, config);

    let rp = RestartConfig {
        stop: StopRule::budget(100_000).with_target(ObjectiveValue::new(optimum as f64)),
        ..RestartConfig::default()
    };
    for seed in 1..=5u64 {
        let run = run_rp(&problem, &rp, seed);
        let last = run.final_record();
        let hit = run.hit_time(ObjectiveValue::new(optimum as f64));
        match hit {
            Some(t) => println!(
                "seed {seed}: optimum found at pseudo-time {t} (pool ended at {} x {})",
                last.replications, last.horizon
            ),
            None => println!(
                "seed {seed}: best {} after {} pseudo-time",
                run.best(),
                last.pseudo_time
            ),
        }
    }
}
