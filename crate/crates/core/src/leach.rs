//! LEACH baseline.
//!
//! Every alive node still in the candidate set draws `u ~ U[0, 1)` and becomes
//! a head when `u < T(n) = p / (1 - p * (r mod ceil(1/p)))`. Heads leave the
//! candidate set until the epoch of `ceil(1/p)` rounds ends. Non-heads join
//! the nearest head. Traffic is charged exactly as for WEB clusters.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Headless, NetworkConfig};
use crate::energy::{ChargePlan, EnergyLedger};
use crate::error::Result;
use crate::model::{dist_between, dist_to_bs, Cluster, NodeId, SimState};
use crate::web::{dead_since, steady_state, RoundTally};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeachState {
    pub p: f64,
    /// Membership in the candidate set for the current epoch.
    pub eligible: Vec<bool>,
    pub epoch_round: u64,
}

impl LeachState {
    pub fn new(p: f64, num_nodes: usize) -> Self {
        Self {
            p,
            eligible: vec![true; num_nodes],
            epoch_round: 0,
        }
    }

    pub fn epoch_length(&self) -> u64 {
        (1.0 / self.p).ceil() as u64
    }

    /// Threshold for a node still in the candidate set at `round`
    /// (zero-based), clamped to `[0, 1]`.
    pub fn threshold(&self, round: u64) -> f64 {
        let r = (round % self.epoch_length()) as f64;
        let denom = 1.0 - self.p * r;
        if denom <= 0.0 {
            1.0
        } else {
            (self.p / denom).clamp(0.0, 1.0)
        }
    }

    /// Threshold for `node` at `round`; zero outside the candidate set.
    pub fn election_threshold(&self, node: NodeId, round: u64) -> f64 {
        if self.eligible[node] {
            self.threshold(round)
        } else {
            0.0
        }
    }

    /// Enters `round`, restoring every alive node to the candidate set when
    /// a new epoch starts.
    pub fn begin_round(&mut self, round: u64, state: &SimState) {
        self.epoch_round = round % self.epoch_length();
        if self.epoch_round == 0 {
            for node in &state.nodes {
                self.eligible[node.id] = node.alive;
            }
        }
    }
}

/// Draws once for every alive candidate, in id order.
pub fn elect_heads<R: Rng + ?Sized>(
    state: &SimState,
    leach: &mut LeachState,
    round: u64,
    rng: &mut R,
) -> Vec<NodeId> {
    let mut heads = Vec::new();
    for node in state.nodes.iter().filter(|n| n.alive) {
        let threshold = leach.election_threshold(node.id, round);
        if threshold <= 0.0 {
            continue;
        }
        let draw: f64 = rng.random();
        if draw < threshold {
            leach.eligible[node.id] = false;
            heads.push(node.id);
        }
    }
    heads
}

/// Attaches every alive non-head to its nearest head (lowest id on ties).
pub fn join_nearest_head(
    state: &SimState,
    heads: &[NodeId],
    config: &NetworkConfig,
) -> Vec<Cluster> {
    let mut sorted = heads.to_vec();
    sorted.sort_unstable();
    let mut clusters: Vec<Cluster> = sorted
        .iter()
        .map(|&h| Cluster {
            head_id: h,
            member_ids: Vec::new(),
            head_dist_to_bs: dist_to_bs(&state.nodes[h], config),
            weight: None,
        })
        .collect();
    if clusters.is_empty() {
        return clusters;
    }
    for node in state.nodes.iter().filter(|n| n.alive) {
        if sorted.binary_search(&node.id).is_ok() {
            continue;
        }
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, &h) in sorted.iter().enumerate() {
            let d = dist_between(node, &state.nodes[h]);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        clusters[best].member_ids.push(node.id);
    }
    clusters
}

/// Outcome of one LEACH round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeachRound {
    pub heads: Vec<NodeId>,
    pub clusters: Vec<Cluster>,
    pub tally: RoundTally,
}

pub fn leach_round<R: Rng + ?Sized>(
    state: &mut SimState,
    leach: &mut LeachState,
    round: u64,
    config: &NetworkConfig,
    rng: &mut R,
    ledger: &mut EnergyLedger,
) -> Result<LeachRound> {
    state.clear_roles();
    leach.begin_round(round, state);
    let heads = elect_heads(state, leach, round, rng);

    if heads.is_empty() {
        let tally = headless_round(state, config, ledger)?;
        return Ok(LeachRound {
            heads,
            clusters: Vec::new(),
            tally,
        });
    }

    let clusters = join_nearest_head(state, &heads, config);
    let tally = steady_state(state, &clusters, config, ledger)?;
    Ok(LeachRound {
        heads,
        clusters,
        tally,
    })
}

fn headless_round(
    state: &mut SimState,
    config: &NetworkConfig,
    ledger: &mut EnergyLedger,
) -> Result<RoundTally> {
    let mut tally = RoundTally::default();
    if config.headless == Headless::Idle {
        return Ok(tally);
    }
    let was_alive: Vec<bool> = state.nodes.iter().map(|n| n.alive).collect();
    let plan = ChargePlan::new(config);
    let senders: Vec<NodeId> = state.alive_ids().collect();
    for id in senders {
        let charges = plan.direct(dist_to_bs(&state.nodes[id], config))?;
        ledger.charge_all(state, id, &charges);
        tally.data_packets += 1;
    }
    tally.deaths = dead_since(state, &was_alive);
    Ok(tally)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::tx_cost;
    use crate::model::{init_network, NodeState};
    use crate::web::is_partition;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line_state(xs: &[f64]) -> SimState {
        SimState::from_nodes(
            xs.iter()
                .enumerate()
                .map(|(i, &x)| NodeState::new(i, x, 50.0, 0.5))
                .collect(),
        )
    }

    #[test]
    fn threshold_examples() {
        let mut leach = LeachState::new(0.05, 3);
        assert_eq!(leach.epoch_length(), 20);
        assert_abs_diff_eq!(leach.threshold(0), 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(leach.threshold(19), 1.0, epsilon = 1e-12);
        assert!(leach.threshold(19) <= 1.0);
        assert_abs_diff_eq!(leach.threshold(20), 0.05, epsilon = 1e-15);
        leach.eligible[1] = false;
        assert_eq!(leach.election_threshold(1, 7), 0.0);
        assert_eq!(leach.election_threshold(0, 0), 0.05);
    }

    #[test]
    fn certain_election_takes_everyone() {
        let state = line_state(&[1.0, 2.0, 3.0, 4.0]);
        let mut leach = LeachState::new(1.0, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            elect_heads(&state, &mut leach, 0, &mut rng),
            vec![0, 1, 2, 3]
        );
        assert!(leach.eligible.iter().all(|e| !e));
    }

    #[test]
    fn ineligible_round_is_headless_and_direct() {
        let config = NetworkConfig {
            num_nodes: 3,
            ..Default::default()
        };
        let mut state = line_state(&[50.0, 60.0, 80.0]);
        let mut leach = LeachState::new(0.05, 3);
        leach.eligible = vec![false; 3];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut ledger = EnergyLedger::new();
        let out = leach_round(&mut state, &mut leach, 5, &config, &mut rng, &mut ledger).unwrap();
        assert!(out.heads.is_empty());
        assert_eq!(out.tally.data_packets, 3);
        assert_eq!(out.tally.clusters, 0);
        let expected: f64 = [0.0, 10.0, 30.0]
            .iter()
            .map(|&d| tx_cost(6400, d, &config).unwrap())
            .sum();
        assert_abs_diff_eq!(ledger.total(), expected, epsilon = 1e-15);

        let idle = NetworkConfig {
            headless: Headless::Idle,
            ..config
        };
        let mut ledger = EnergyLedger::new();
        let out = leach_round(&mut state, &mut leach, 6, &idle, &mut rng, &mut ledger).unwrap();
        assert_eq!(out.tally.data_packets, 0);
        assert_eq!(ledger.total(), 0.0);
    }

    #[test]
    fn election_is_deterministic() {
        let config = NetworkConfig::default();
        let state = init_network(&config, 9).unwrap();
        let run = || {
            let mut leach = LeachState::new(0.05, 100);
            let mut rng = ChaCha8Rng::seed_from_u64(77);
            elect_heads(&state, &mut leach, 0, &mut rng)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn join_rules() {
        let config = NetworkConfig::default();
        let state = line_state(&[0.0, 10.0, 20.0, 30.0, 40.0]);
        let single = join_nearest_head(&state, &[2], &config);
        assert_eq!(single[0].member_ids, vec![0, 1, 3, 4]);

        // Node 2 sits exactly between heads 1 and 3 and goes to 1.
        let split = join_nearest_head(&state, &[3, 1], &config);
        assert_eq!(split[0].head_id, 1);
        assert_eq!(split[0].member_ids, vec![0, 2]);
        assert_eq!(split[1].member_ids, vec![4]);
        assert!(is_partition(&split, &state));
    }

    #[test]
    fn epoch_reset_restores_candidates() {
        let config = NetworkConfig {
            num_nodes: 30,
            leach_p: 0.25,
            ..Default::default()
        };
        let state = init_network(&config, 4).unwrap();
        let mut leach = LeachState::new(config.leach_p, 30);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut elected = [false; 30];
        for round in 0..4 {
            leach.begin_round(round, &state);
            for h in elect_heads(&state, &mut leach, round, &mut rng) {
                assert!(!elected[h], "node {h} elected twice in one epoch");
                elected[h] = true;
            }
        }
        // The final round of an epoch has threshold 1, so everyone got a turn.
        assert!(elected.iter().all(|&e| e));
        leach.begin_round(4, &state);
        assert!(leach.eligible.iter().all(|&e| e));
    }

    proptest! {
        #[test]
        fn thresholds_bounded(p in 0.001..=1.0f64, round in 0u64..10_000) {
            let leach = LeachState::new(p, 1);
            let t = leach.threshold(round);
            prop_assert!((0.0..=1.0).contains(&t));
        }
    }
}
