//! Per-operation radio costs and the lost-energy constants used to size clusters.
//!
//! ```text
//! cargo run --example radio_energy
//! ```

use websim::config::NetworkConfig;
use websim::energy::{
    aggregation_cost, crossover_distance, lost_energy_head, lost_energy_member, lost_energy_ratio,
    rx_cost, tx_cost,
};

fn main() -> websim::Result<()> {
    let config = NetworkConfig::default();
    let d0 = crossover_distance(&config);
    println!("crossover distance d0 = {d0:.4} m");

    println!(
        "\n{:>8}  {:>14}  {:>14}",
        "d (m)", "ctrl tx (J)", "data tx (J)"
    );
    for d in [0.0, 10.0, 50.0, d0, 100.0, 150.0] {
        let ctrl = tx_cost(config.ctrl_packet_bits, d, &config)?;
        let data = tx_cost(config.data_packet_bits, d, &config)?;
        println!("{d:>8.2}  {ctrl:>14.6e}  {data:>14.6e}");
    }

    println!(
        "\nrx ctrl packet        {:.6e} J",
        rx_cost(config.ctrl_packet_bits, &config)?
    );
    println!(
        "aggregate data packet {:.6e} J",
        aggregation_cost(config.data_packet_bits, &config)?
    );
    println!("head loss             {:.6e} J", lost_energy_head(&config));
    println!(
        "member loss           {:.6e} J",
        lost_energy_member(&config)
    );
    println!("head / member ratio   {:.4}", lost_energy_ratio(&config)?);
    Ok(())
}
