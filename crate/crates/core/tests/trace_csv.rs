use std::fs;

use websim::report::{
    compare_trace_dir, emit_trace_csv, read_trace_csv, render_trace_csv, trace_file_name,
    TRACE_HEADER,
};
use websim::{run_simulation, NetworkConfig, Protocol};

fn config(rounds: u64) -> NetworkConfig {
    NetworkConfig {
        num_nodes: 25,
        max_rounds: Some(rounds),
        ..Default::default()
    }
}

#[test]
fn zero_rounds_gives_header_only() {
    let trace = run_simulation(&config(0), Protocol::Web, 1).unwrap();
    assert!(trace.rounds.is_empty());
    assert_eq!(render_trace_csv(&trace).trim_end(), TRACE_HEADER);
}

#[test]
fn rows_follow_rounds_and_reemit_identically() {
    let dir = tempfile::tempdir().unwrap();
    for protocol in [Protocol::Web, Protocol::Leach] {
        let trace = run_simulation(&config(120), protocol, 9).unwrap();
        let path = dir.path().join(trace_file_name(protocol, 9));
        emit_trace_csv(&trace, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), trace.rounds.len() + 1);

        let rows = read_trace_csv(&path).unwrap();
        assert_eq!(rows.len(), trace.rounds.len());
        for (a, b) in rows.iter().zip(&trace.rounds) {
            assert_eq!(a.round, b.round);
            assert_eq!(a.alive_count, b.alive_count);
            assert_eq!(a.packets_to_bs_cumulative, b.packets_to_bs_cumulative);
            assert_eq!(a.ctrl_packets_cumulative, b.ctrl_packets_cumulative);
            assert_eq!(a.cluster_count, b.cluster_count);
            assert_eq!(a.deaths_this_round, b.deaths_this_round);
            assert!((a.sum_residual_energy - b.sum_residual_energy).abs() < 1e-9);
        }

        let second = dir.path().join("again.csv");
        emit_trace_csv(&trace, &second).unwrap();
        assert_eq!(fs::read(&second).unwrap(), text.as_bytes());
        fs::remove_file(second).unwrap();
    }
}

#[test]
fn deaths_are_listed_per_round() {
    let config = NetworkConfig {
        num_nodes: 12,
        initial_energy: 0.01,
        ..Default::default()
    };
    let trace = run_simulation(&config, Protocol::Leach, 3).unwrap();
    let listed: usize = trace.rounds.iter().map(|r| r.deaths_this_round.len()).sum();
    assert_eq!(listed, 12);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(trace_file_name(Protocol::Leach, 3));
    emit_trace_csv(&trace, &path).unwrap();
    let rows = read_trace_csv(&path).unwrap();
    assert_eq!(rows.last().unwrap().alive_count, 0);
}

#[test]
fn compare_dir_matches_in_memory_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let seeds = [4, 5];
    let sweep =
        websim::report::run_sweep(&config(200), &[Protocol::Web, Protocol::Leach], &seeds, 150)
            .unwrap();
    for t in &sweep.traces {
        emit_trace_csv(t, dir.path().join(trace_file_name(t.protocol, t.seed))).unwrap();
    }
    fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let report = compare_trace_dir(dir.path(), 150).unwrap();
    assert_eq!(report.render(), sweep.report.render());
}

#[test]
fn compare_empty_dir_fails() {
    let dir = tempfile::tempdir().unwrap();
    assert!(compare_trace_dir(dir.path(), 700).is_err());
}
