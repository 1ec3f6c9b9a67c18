//! Writes a config file and a trace CSV, then reads both back.
//!
//! ```text
//! cargo run --example trace_export [out_dir]
//! ```

use std::path::PathBuf;

use websim::config::HeadScore;
use websim::report::{compare_trace_dir, emit_trace_csv, read_trace_csv, trace_file_name};
use websim::{run_simulation, NetworkConfig, Protocol};

fn main() -> anyhow::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("websim_trace_export"));
    std::fs::create_dir_all(&out)?;

    let config = NetworkConfig {
        num_nodes: 40,
        head_score: HeadScore::Intent,
        max_rounds: Some(400),
        ..Default::default()
    };
    let config_path = out.join("config.json");
    std::fs::write(&config_path, config.to_json_pretty())?;
    let config = NetworkConfig::from_json_file(&config_path)?;

    for protocol in [Protocol::Web, Protocol::Leach] {
        let trace = run_simulation(&config, protocol, 2)?;
        let path = out.join(trace_file_name(protocol, 2));
        emit_trace_csv(&trace, &path)?;
        let rows = read_trace_csv(&path)?;
        // Energy is written with nine decimals; everything else is exact.
        assert_eq!(rows.len(), trace.rounds.len());
        for (a, b) in rows.iter().zip(&trace.rounds) {
            assert_eq!(
                (a.round, a.alive_count, a.packets_to_bs_cumulative),
                (b.round, b.alive_count, b.packets_to_bs_cumulative)
            );
            assert!((a.sum_residual_energy - b.sum_residual_energy).abs() < 1e-9);
        }
        println!("{protocol}: {} rounds -> {}", rows.len(), path.display());
    }

    let report = compare_trace_dir(&out, 300)?;
    print!("\n{}", report.render());
    Ok(())
}
