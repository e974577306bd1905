//! Tour improvement: 2-opt, 2.5-opt and 3-opt on random instances.
//!
//! The move sets are nested, so from the same start each richer procedure
//! never ends longer than the weaker one.
//!
//! ```bash
//! cargo run --release -p mhrestart --example local_search
//! ```

use mhrestart::localsearch::{three_opt, two_half_opt, two_opt, DistanceMatrix, NeighborLists};
use mhrestart::tsplib::{Metric, TspInstance};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_instance(n: usize, seed: u64) -> TspInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n)
        .map(|_| (rng.random_range(0.0..5000.0), rng.random_range(0.0..5000.0)))
        .collect();
    TspInstance {
        name: format!("random{n}"),
        dimension: n,
        metric: Metric::Euc2d,
        coords,
        known_optimum: None,
    }
}

fn main() {
    let n = 60;
    println!("random {n}-city instances, candidate lists of 15\n");
    println!("seed     start     2-opt   2.5-opt     3-opt");
    let mut sums = [0i64; 4];
    for seed in 0..10u64 {
        let inst = random_instance(n, seed);
        let d = DistanceMatrix::from_instance(&inst);
        let nbrs = NeighborLists::build(&d, 15);
        let mut start: Vec<u32> = (0..n as u32).collect();
        start.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0xF00D));

        let l0 = d.tour_length(&start);
        let l2 = d.tour_length(&two_opt(&start, &d, &nbrs));
        let l25 = d.tour_length(&two_half_opt(&start, &d, &nbrs));
        let l3 = d.tour_length(&three_opt(&start, &d, &nbrs));
        println!("{seed:>4}  {l0:>8}  {l2:>8}  {l25:>8}  {l3:>8}");
        assert!(l3 <= l25 && l25 <= l2 && l2 <= l0);
        for (slot, value) in sums.iter_mut().zip([l0, l2, l25, l3]) {
            *slot += value;
        }
    }
    println!(
        "\naverage improvement: 2-opt {:.1}%, 2.5-opt {:.1}%, 3-opt {:.1}%",
        100.0 * (1.0 - sums[1] as f64 / sums[0] as f64),
        100.0 * (1.0 - sums[2] as f64 / sums[0] as f64),
        100.0 * (1.0 - sums[3] as f64 / sums[0] as f64),
    );
}
