//! Seed sweeps, CSV traces and comparison summaries.
//!
//! Trace CSV columns, one row per round:
//!
//! ```text
//! round,alive,residual_energy_j,packets_cumulative,clusters,deaths,ctrl_packets_cumulative
//! ```
//!
//! `residual_energy_j` has 9 decimal places; `deaths` lists the ids that died
//! in the round separated by `;` (empty when none).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::sim::{run_simulation, Protocol, RoundMetrics, SimTrace};

pub const DEFAULT_CHECKPOINT: u64 = 700;

pub const TRACE_HEADER: &str =
    "round,alive,residual_energy_j,packets_cumulative,clusters,deaths,ctrl_packets_cumulative";

/// Per-run numbers the comparison is built from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub protocol: Protocol,
    pub seed: u64,
    pub num_nodes: usize,
    pub rounds_total: u64,
    pub first_death_round: Option<u64>,
    pub last_death_round: Option<u64>,
    /// Round the checkpoint values were read from.
    pub checkpoint_round: u64,
    /// The requested checkpoint lay beyond the final round.
    pub checkpoint_clamped: bool,
    pub dead_at_checkpoint: usize,
    pub residual_at_checkpoint: f64,
    pub packets_at_checkpoint: u64,
}

impl TraceSummary {
    pub fn from_trace(trace: &SimTrace, checkpoint: u64) -> Self {
        Self::from_rounds(
            trace.protocol,
            trace.seed,
            trace.config.num_nodes,
            trace.initial_total_energy,
            &trace.rounds,
            checkpoint,
        )
    }

    fn from_rounds(
        protocol: Protocol,
        seed: u64,
        num_nodes: usize,
        initial_energy: f64,
        rounds: &[RoundMetrics],
        checkpoint: u64,
    ) -> Self {
        let rounds_total = rounds.last().map_or(0, |r| r.round);
        let first_death_round = rounds
            .iter()
            .find(|r| !r.deaths_this_round.is_empty())
            .map(|r| r.round);
        let last_death_round = rounds
            .last()
            .filter(|r| r.alive_count == 0)
            .map(|r| r.round);
        let clamped = checkpoint > rounds_total;
        let at = rounds.iter().rev().find(|r| r.round <= checkpoint);
        Self {
            protocol,
            seed,
            num_nodes,
            rounds_total,
            first_death_round,
            last_death_round,
            checkpoint_round: at.map_or(0, |r| r.round),
            checkpoint_clamped: clamped,
            dead_at_checkpoint: at.map_or(0, |r| num_nodes - r.alive_count),
            residual_at_checkpoint: at.map_or(initial_energy, |r| r.sum_residual_energy),
            packets_at_checkpoint: at.map_or(0, |r| r.packets_to_bs_cumulative),
        }
    }

    /// First-death round, or the run length when nobody died.
    fn first_death_or_censored(&self) -> f64 {
        self.first_death_round.unwrap_or(self.rounds_total) as f64
    }

    fn last_death_or_censored(&self) -> f64 {
        self.last_death_round.unwrap_or(self.rounds_total) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolAggregate {
    pub protocol: Protocol,
    pub runs: usize,
    pub first_death_median: f64,
    pub first_death_mean: f64,
    /// Runs that ended with no death; their run length stands in.
    pub first_death_censored: usize,
    pub dead_at_checkpoint_median: f64,
    pub residual_at_checkpoint_median: f64,
    pub packets_at_checkpoint_median: f64,
    pub last_death_median: f64,
    pub last_death_censored: usize,
}

/// WEB value divided by LEACH value for each aggregate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    pub first_death: f64,
    pub dead_at_checkpoint: f64,
    pub residual_at_checkpoint: f64,
    pub packets_at_checkpoint: f64,
    pub last_death: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub checkpoint: u64,
    pub aggregates: Vec<ProtocolAggregate>,
    pub ratios: Option<Ratios>,
    pub runs: Vec<TraceSummary>,
}

/// Median with the two middle order statistics averaged for even counts.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

impl ComparisonReport {
    pub fn from_summaries(mut runs: Vec<TraceSummary>, checkpoint: u64) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::EmptyReport("no traces to compare"));
        }
        runs.sort_by_key(|r| (r.protocol, r.seed));
        let mut protocols: Vec<Protocol> = runs.iter().map(|r| r.protocol).collect();
        protocols.dedup();

        let aggregates: Vec<ProtocolAggregate> = protocols
            .iter()
            .map(|&p| {
                let rs: Vec<&TraceSummary> = runs.iter().filter(|r| r.protocol == p).collect();
                let col =
                    |f: &dyn Fn(&TraceSummary) -> f64| rs.iter().map(|r| f(r)).collect::<Vec<_>>();
                let first = col(&|r| r.first_death_or_censored());
                ProtocolAggregate {
                    protocol: p,
                    runs: rs.len(),
                    first_death_median: median(&first),
                    first_death_mean: mean(&first),
                    first_death_censored: rs
                        .iter()
                        .filter(|r| r.first_death_round.is_none())
                        .count(),
                    dead_at_checkpoint_median: median(&col(&|r| r.dead_at_checkpoint as f64)),
                    residual_at_checkpoint_median: median(&col(&|r| r.residual_at_checkpoint)),
                    packets_at_checkpoint_median: median(&col(&|r| r.packets_at_checkpoint as f64)),
                    last_death_median: median(&col(&|r| r.last_death_or_censored())),
                    last_death_censored: rs.iter().filter(|r| r.last_death_round.is_none()).count(),
                }
            })
            .collect();

        let find = |p| aggregates.iter().find(|a| a.protocol == p);
        let ratios = match (find(Protocol::Web), find(Protocol::Leach)) {
            (Some(w), Some(l)) => Some(Ratios {
                first_death: w.first_death_median / l.first_death_median,
                dead_at_checkpoint: w.dead_at_checkpoint_median / l.dead_at_checkpoint_median,
                residual_at_checkpoint: w.residual_at_checkpoint_median
                    / l.residual_at_checkpoint_median,
                packets_at_checkpoint: w.packets_at_checkpoint_median
                    / l.packets_at_checkpoint_median,
                last_death: w.last_death_median / l.last_death_median,
            }),
            _ => None,
        };

        Ok(Self {
            checkpoint,
            aggregates,
            ratios,
            runs,
        })
    }

    pub fn aggregate(&self, protocol: Protocol) -> Option<&ProtocolAggregate> {
        self.aggregates.iter().find(|a| a.protocol == protocol)
    }

    /// Plain-text rendering, see the README for the layout.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# protocol comparison");
        let _ = writeln!(out, "checkpoint_round: {}", self.checkpoint);
        let clamped = self.runs.iter().filter(|r| r.checkpoint_clamped).count();
        if clamped > 0 {
            let _ = writeln!(
                out,
                "note: checkpoint beyond final round in {clamped} run(s); final-round values used"
            );
        }
        let _ = writeln!(out);

        let mut header = format!("{:<32}", "metric");
        for a in &self.aggregates {
            let _ = write!(header, "{:>14}", a.protocol.as_str());
        }
        if self.ratios.is_some() {
            let _ = write!(header, "{:>14}", "web/leach");
        }
        let _ = writeln!(out, "{}", header.trim_end());

        type Row = (
            &'static str,
            fn(&ProtocolAggregate) -> f64,
            Option<fn(&Ratios) -> f64>,
        );
        let rows: [Row; 9] = [
            ("runs", |a| a.runs as f64, None),
            (
                "first_death_round_median",
                |a| a.first_death_median,
                Some(|r| r.first_death),
            ),
            ("first_death_round_mean", |a| a.first_death_mean, None),
            (
                "first_death_censored",
                |a| a.first_death_censored as f64,
                None,
            ),
            (
                "dead_at_checkpoint_median",
                |a| a.dead_at_checkpoint_median,
                Some(|r| r.dead_at_checkpoint),
            ),
            (
                "residual_j_at_checkpoint_median",
                |a| a.residual_at_checkpoint_median,
                Some(|r| r.residual_at_checkpoint),
            ),
            (
                "packets_at_checkpoint_median",
                |a| a.packets_at_checkpoint_median,
                Some(|r| r.packets_at_checkpoint),
            ),
            (
                "last_death_round_median",
                |a| a.last_death_median,
                Some(|r| r.last_death),
            ),
            (
                "last_death_censored",
                |a| a.last_death_censored as f64,
                None,
            ),
        ];
        for (name, value, ratio) in rows {
            let mut line = format!("{name:<32}");
            for a in &self.aggregates {
                let _ = write!(line, "{:>14}", fmt_num(value(a)));
            }
            if let (Some(r), Some(f)) = (&self.ratios, ratio) {
                let _ = write!(line, "{:>14.4}", f(r));
            }
            let _ = writeln!(out, "{}", line.trim_end());
        }

        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "protocol,seed,first_death_round,last_death_round,checkpoint_round,dead,residual_energy_j,packets"
        );
        for r in &self.runs {
            let opt = |v: Option<u64>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:.9},{}",
                r.protocol,
                r.seed,
                opt(r.first_death_round),
                opt(r.last_death_round),
                r.checkpoint_round,
                r.dead_at_checkpoint,
                r.residual_at_checkpoint,
                r.packets_at_checkpoint
            );
        }
        out
    }
}

fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.4}")
    }
}

/// One trace per `(protocol, seed)` plus the comparison across them.
pub struct Sweep {
    pub traces: Vec<SimTrace>,
    pub report: ComparisonReport,
}

pub fn run_sweep(
    config: &NetworkConfig,
    protocols: &[Protocol],
    seeds: &[u64],
    checkpoint: u64,
) -> Result<Sweep> {
    if seeds.is_empty() {
        return Err(Error::EmptyReport("sweep needs at least one seed"));
    }
    if protocols.is_empty() {
        return Err(Error::EmptyReport("sweep needs at least one protocol"));
    }
    let jobs: Vec<(Protocol, u64)> = protocols
        .iter()
        .flat_map(|&p| seeds.iter().map(move |&s| (p, s)))
        .collect();
    let traces = jobs
        .par_iter()
        .map(|&(p, s)| run_simulation(config, p, s))
        .collect::<Result<Vec<_>>>()?;
    let summaries = traces
        .iter()
        .map(|t| TraceSummary::from_trace(t, checkpoint))
        .collect();
    let report = ComparisonReport::from_summaries(summaries, checkpoint)?;
    Ok(Sweep { traces, report })
}

/// File name a trace is persisted under inside an output directory.
pub fn trace_file_name(protocol: Protocol, seed: u64) -> String {
    format!("{protocol}_seed{seed}.csv")
}

pub fn render_trace_csv(trace: &SimTrace) -> String {
    let mut out = String::with_capacity(64 * (trace.rounds.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in &trace.rounds {
        let deaths = r
            .deaths_this_round
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            out,
            "{},{},{:.9},{},{},{},{}",
            r.round,
            r.alive_count,
            r.sum_residual_energy,
            r.packets_to_bs_cumulative,
            r.cluster_count,
            deaths,
            r.ctrl_packets_cumulative
        );
    }
    out
}

pub fn emit_trace_csv(trace: &SimTrace, destination: impl AsRef<Path>) -> Result<()> {
    let path = destination.as_ref();
    fs::write(path, render_trace_csv(trace)).map_err(|e| Error::io(path, e))
}

pub fn emit_comparison(report: &ComparisonReport, destination: impl AsRef<Path>) -> Result<()> {
    let path = destination.as_ref();
    fs::write(path, report.render()).map_err(|e| Error::io(path, e))
}

/// Parses a trace CSV back into per-round metrics.
pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<Vec<RoundMetrics>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |line: usize, reason: String| Error::TraceParse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == TRACE_HEADER => {}
        _ => return Err(bad(1, "missing or unexpected header".into())),
    }
    let mut rounds = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(bad(
                lineno,
                format!("expected 7 fields, found {}", fields.len()),
            ));
        }
        fn num<T: std::str::FromStr>(s: &str) -> std::result::Result<T, String> {
            s.parse().map_err(|_| format!("bad number `{s}`"))
        }
        let parsed = (|| -> std::result::Result<RoundMetrics, String> {
            Ok(RoundMetrics {
                round: num(fields[0])?,
                alive_count: num(fields[1])?,
                sum_residual_energy: num(fields[2])?,
                packets_to_bs_cumulative: num(fields[3])?,
                cluster_count: num(fields[4])?,
                deaths_this_round: if fields[5].is_empty() {
                    Vec::new()
                } else {
                    fields[5]
                        .split(';')
                        .map(num)
                        .collect::<std::result::Result<_, _>>()?
                },
                ctrl_packets_cumulative: num(fields[6])?,
            })
        })();
        rounds.push(parsed.map_err(|r| bad(lineno, r))?);
    }
    Ok(rounds)
}

/// Splits `web_seed42.csv` into its protocol and seed.
pub fn parse_trace_file_name(name: &str) -> Option<(Protocol, u64)> {
    let stem = name.strip_suffix(".csv")?;
    let (protocol, seed) = stem.split_once("_seed")?;
    Some((protocol.parse().ok()?, seed.parse().ok()?))
}

/// Rebuilds a comparison from the trace CSVs in `dir`.
///
/// Node count is recovered from the first row (alive after round 1 plus
/// the nodes that died in it); header-only traces are skipped.
pub fn compare_trace_dir(dir: impl AsRef<Path>, checkpoint: u64) -> Result<ComparisonReport> {
    let dir = dir.as_ref();
    let mut files: Vec<(PathBuf, Protocol, u64)> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok())
        .filter_map(|entry| {
            let name = entry.file_name().into_string().ok()?;
            let (p, s) = parse_trace_file_name(&name)?;
            Some((entry.path(), p, s))
        })
        .collect();
    files.sort();

    let mut summaries = Vec::new();
    for (path, protocol, seed) in files {
        let rounds = read_trace_csv(&path)?;
        let Some(first) = rounds.first() else {
            continue;
        };
        let num_nodes = first.alive_count + first.deaths_this_round.len();
        summaries.push(TraceSummary::from_rounds(
            protocol,
            seed,
            num_nodes,
            f64::NAN,
            &rounds,
            checkpoint,
        ));
    }
    ComparisonReport::from_summaries(summaries, checkpoint)
}
