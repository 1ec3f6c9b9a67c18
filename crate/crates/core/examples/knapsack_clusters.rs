//! Sizes a single cluster with the knapsack solver and checks it against brute force.
//!
//! ```text
//! cargo run --example knapsack_clusters
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use websim::knapsack::{solve_brute_force, solve_dp, KnapsackInstance};

fn main() -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 14;
    // Candidate members: residual energy as value, distance to the head as weight.
    let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..0.5)).collect();
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..25.0)).collect();
    let capacity = 37.5;

    let instance = KnapsackInstance::new(values.clone(), weights.clone(), capacity, 100);
    let q = instance.quantize()?;
    println!("capacity {capacity} m -> {} quantized units", q.capacity);
    for i in 0..n {
        println!(
            "  node {i:>2}: energy {:.3} J  distance {:>6.2} m  (q = {})",
            values[i], weights[i], q.weights[i]
        );
    }

    let dp = solve_dp(&instance)?;
    let bf = solve_brute_force(&instance)?;
    println!("\nDP picks {:?}", dp.selected);
    println!(
        "   value {:.6} J, distance {:.2} m",
        dp.total_value, dp.total_weight
    );
    println!(
        "brute force picks {:?} (value {:.6} J)",
        bf.selected, bf.total_value
    );
    anyhow::ensure!(dp.total_value == bf.total_value, "solvers disagree");
    println!("solvers agree");
    Ok(())
}
