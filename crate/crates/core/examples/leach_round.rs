//! Steps LEACH through one election epoch and shows the head rotation.
//!
//! ```text
//! cargo run --example leach_round
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use websim::config::NetworkConfig;
use websim::energy::EnergyLedger;
use websim::leach::{leach_round, LeachState};
use websim::model::init_network;

fn main() -> websim::Result<()> {
    let config = NetworkConfig::default();
    let mut state = init_network(&config, 4)?;
    let mut leach = LeachState::new(config.leach_p, config.num_nodes);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    rng.set_stream(1);
    let mut ledger = EnergyLedger::new();

    println!("epoch length {} rounds", leach.epoch_length());
    for round in 0..leach.epoch_length() {
        state.round = round + 1;
        let threshold = leach.threshold(round);
        let out = leach_round(
            &mut state,
            &mut leach,
            round,
            &config,
            &mut rng,
            &mut ledger,
        )?;
        let sizes: Vec<usize> = out.clusters.iter().map(|c| c.size()).collect();
        println!(
            "round {round:>2}  T = {threshold:.4}  heads {:?}  cluster sizes {sizes:?}{}",
            out.heads,
            if out.heads.is_empty() {
                "  (headless)"
            } else {
                ""
            }
        );
    }
    let served = state.nodes.iter().filter(|n| n.rounds_as_head > 0).count();
    println!(
        "{served} of {} nodes served as head this epoch",
        state.nodes.len()
    );
    Ok(())
}
