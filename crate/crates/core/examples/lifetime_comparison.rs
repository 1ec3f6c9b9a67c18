//! Full-lifetime sweep of both protocols and the comparison report.
//!
//! ```text
//! cargo run --release --example lifetime_comparison [first_seed] [last_seed]
//! ```

use websim::report::{run_sweep, DEFAULT_CHECKPOINT};
use websim::{NetworkConfig, Protocol};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let first: u64 = args.next().map_or(Ok(1), |s| s.parse())?;
    let last: u64 = args.next().map_or(Ok(first + 4), |s| s.parse())?;
    let seeds: Vec<u64> = (first..=last).collect();

    let config = NetworkConfig::default();
    let sweep = run_sweep(
        &config,
        &[Protocol::Web, Protocol::Leach],
        &seeds,
        DEFAULT_CHECKPOINT,
    )?;
    for t in &sweep.traces {
        let m = &t.milestones;
        println!(
            "{:<5} seed {:>3}: first death {:>5?}  last death {:>5?}  conservation error {:.1e} J",
            t.protocol.as_str(),
            t.seed,
            m.first_death_round,
            m.last_death_round,
            t.conservation_error()
        );
    }
    println!();
    print!("{}", sweep.report.render());
    Ok(())
}
