//! Round loop and per-run traces.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::NetworkConfig;
use crate::energy::EnergyLedger;
use crate::error::Result;
use crate::leach::{leach_round, LeachState};
use crate::model::{init_network, Cluster, NodeId, SimState};
use crate::web::{web_setup_phase, web_steady_state, RoundTally};

/// RNG stream used for LEACH elections; stream 0 places the nodes.
const ELECTION_STREAM: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Web,
    Leach,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Web => "web",
            Protocol::Leach => "leach",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "web" => Ok(Protocol::Web),
            "leach" => Ok(Protocol::Leach),
            other => Err(format!(
                "unknown protocol `{other}` (expected web or leach)"
            )),
        }
    }
}

/// Network state after one round. Rounds are numbered from 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundMetrics {
    pub round: u64,
    pub alive_count: usize,
    pub sum_residual_energy: f64,
    /// Data packets delivered to the BS so far.
    pub packets_to_bs_cumulative: u64,
    /// Member-to-head control packets so far.
    pub ctrl_packets_cumulative: u64,
    pub cluster_count: usize,
    pub deaths_this_round: Vec<NodeId>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Milestones {
    pub first_death_round: Option<u64>,
    /// Lowest id among the nodes that died in the first-death round.
    pub first_death_node: Option<NodeId>,
    /// Round in which the last alive node died.
    pub last_death_round: Option<u64>,
    pub rounds_total: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub config: NetworkConfig,
    pub protocol: Protocol,
    pub seed: u64,
    pub rounds: Vec<RoundMetrics>,
    pub milestones: Milestones,
    pub initial_total_energy: f64,
    pub ledger: EnergyLedger,
    /// Rounds whose clusters did not cover the alive nodes exactly once.
    pub partition_violations: u64,
}

impl SimTrace {
    pub fn final_residual(&self) -> f64 {
        self.rounds
            .last()
            .map_or(self.initial_total_energy, |r| r.sum_residual_energy)
    }

    /// `initial - (charged + residual)`; zero up to rounding.
    pub fn conservation_error(&self) -> f64 {
        self.initial_total_energy - (self.ledger.total() + self.final_residual())
    }

    pub fn headless_rounds(&self) -> usize {
        self.rounds.iter().filter(|r| r.cluster_count == 0).count()
    }
}

/// True when `clusters` cover each node flagged in `alive` exactly once and
/// nothing else.
pub fn covers_alive_exactly(clusters: &[Cluster], alive: &[bool]) -> bool {
    let mut seen = vec![false; alive.len()];
    let mut count = 0usize;
    for c in clusters {
        for id in std::iter::once(c.head_id).chain(c.member_ids.iter().copied()) {
            if id >= alive.len() || seen[id] || !alive[id] {
                return false;
            }
            seen[id] = true;
            count += 1;
        }
    }
    count == alive.iter().filter(|&&a| a).count()
}

/// Runs one protocol from deployment until every node is dead or the
/// round cap is hit.
pub fn run_simulation(config: &NetworkConfig, protocol: Protocol, seed: u64) -> Result<SimTrace> {
    let mut state = init_network(config, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ELECTION_STREAM);
    let mut leach = LeachState::new(config.leach_p, config.num_nodes);
    let mut ledger = EnergyLedger::new();

    let mut rounds = Vec::new();
    let mut milestones = Milestones::default();
    let mut violations = 0u64;
    let mut packets = 0u64;
    let mut ctrl = 0u64;

    while state.alive_count() > 0 && config.max_rounds.is_none_or(|cap| state.round < cap) {
        let alive_before: Vec<bool> = state.nodes.iter().map(|n| n.alive).collect();
        let tally = match protocol {
            Protocol::Web => {
                state.clear_roles();
                let plan = web_setup_phase(&state, config)?;
                if plan.clusters.is_empty() || !covers_alive_exactly(&plan.clusters, &alive_before)
                {
                    violations += 1;
                }
                web_steady_state(&mut state, &plan, config, &mut ledger)?
            }
            Protocol::Leach => {
                let round = state.round;
                let out =
                    leach_round(&mut state, &mut leach, round, config, &mut rng, &mut ledger)?;
                if !out.clusters.is_empty() && !covers_alive_exactly(&out.clusters, &alive_before) {
                    violations += 1;
                }
                out.tally
            }
        };
        state.resync();
        state.round += 1;
        packets += tally.data_packets;
        ctrl += tally.ctrl_packets;
        record_deaths(&mut milestones, &tally, &state);
        rounds.push(metrics_for(&state, &tally, packets, ctrl));
    }
    milestones.rounds_total = state.round;

    Ok(SimTrace {
        config: config.clone(),
        protocol,
        seed,
        rounds,
        milestones,
        initial_total_energy: config.initial_total_energy(),
        ledger,
        partition_violations: violations,
    })
}

fn record_deaths(milestones: &mut Milestones, tally: &RoundTally, state: &SimState) {
    if tally.deaths.is_empty() {
        return;
    }
    if milestones.first_death_round.is_none() {
        milestones.first_death_round = Some(state.round);
        milestones.first_death_node = tally.deaths.iter().copied().min();
    }
    if state.alive_count() == 0 {
        milestones.last_death_round = Some(state.round);
    }
}

fn metrics_for(state: &SimState, tally: &RoundTally, packets: u64, ctrl: u64) -> RoundMetrics {
    RoundMetrics {
        round: state.round,
        alive_count: state.alive_count(),
        sum_residual_energy: state.sum_of_energy(),
        packets_to_bs_cumulative: packets,
        ctrl_packets_cumulative: ctrl,
        cluster_count: tally.clusters,
        deaths_this_round: tally.deaths.clone(),
    }
}
