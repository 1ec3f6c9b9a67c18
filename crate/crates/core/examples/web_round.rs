//! Runs a few WEB rounds on a small network and prints the clusters formed.
//!
//! ```text
//! cargo run --example web_round
//! ```

use websim::config::NetworkConfig;
use websim::energy::EnergyLedger;
use websim::model::{init_network, SimState};
use websim::sim::covers_alive_exactly;
use websim::web::web_round;

fn show(state: &SimState) {
    println!(
        "  alive {} / {}, residual {:.4} J",
        state.alive_count(),
        state.nodes.len(),
        state.sum_of_energy()
    );
}

fn main() -> websim::Result<()> {
    let config = NetworkConfig {
        num_nodes: 30,
        ..Default::default()
    };
    let mut state = init_network(&config, 11)?;
    let mut ledger = EnergyLedger::new();

    for round in 1..=3 {
        state.round = round;
        let alive: Vec<bool> = state.nodes.iter().map(|n| n.alive).collect();
        let (plan, tally) = web_round(&mut state, &config, &mut ledger)?;
        println!(
            "round {round}: {} clusters, {} data packets",
            tally.clusters, tally.data_packets
        );
        for c in &plan.clusters {
            let w = c.weight.as_ref().map_or(0.0, |w| w.total);
            println!(
                "  head {:>2} ({:>6.2} m to BS, capacity {w:.3} m) members {:?}",
                c.head_id, c.head_dist_to_bs, c.member_ids
            );
        }
        assert!(covers_alive_exactly(&plan.clusters, &alive));
        show(&state);
    }
    println!("energy spent: {:.6} J", ledger.total());
    Ok(())
}
