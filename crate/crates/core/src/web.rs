//! Energy-balancing clustering with knapsack-bounded membership.
//!
//! Each round the BS repeatedly picks a head from the still-unassigned alive
//! nodes, sizes its cluster with a weight built from the head's distance to
//! the BS, the head/member loss ratio and the network's energy balance, and
//! fills it by solving a 0/1 knapsack over the remaining candidates (value =
//! residual energy, weight = distance to the head). This repeats until every
//! alive node belongs to a cluster.

use serde::{Deserialize, Serialize};

use crate::config::{HeadScore, KnapsackValue, NetworkConfig};
use crate::energy::{lost_energy_ratio, ChargePlan, EnergyLedger};
use crate::error::{Error, Result};
use crate::knapsack::{solve_dp, KnapsackInstance};
use crate::model::{
    dist_between, dist_to_bs, max_field_distance, Cluster, ClusterWeightBreakdown, NodeId, Role,
    SimState,
};

/// Cluster layout for one round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WebRoundPlan {
    pub clusters: Vec<Cluster>,
    /// Logical TDMA order per cluster, members ascending by id.
    pub slot_assignments: Vec<Vec<NodeId>>,
}

/// What a steady-state phase did, before it is folded into the trace.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundTally {
    pub clusters: usize,
    pub data_packets: u64,
    pub ctrl_packets: u64,
    pub deaths: Vec<NodeId>,
}

fn head_score(dist: f64, energy: f64, mode: HeadScore) -> f64 {
    match mode {
        HeadScore::Literal => dist * energy,
        HeadScore::Intent => dist / energy,
    }
}

/// Picks the next head among `unassigned`, lowest id on ties.
pub fn select_head(
    state: &SimState,
    unassigned: &[NodeId],
    config: &NetworkConfig,
) -> Result<NodeId> {
    let mut best: Option<(f64, NodeId)> = None;
    for &id in unassigned {
        let node = &state.nodes[id];
        let score = head_score(
            dist_to_bs(node, config),
            node.residual_energy,
            config.head_score,
        );
        best = match best {
            Some((s, b)) if s < score || (s == score && b < id) => Some((s, b)),
            _ => Some((score, id)),
        };
    }
    best.map(|(_, id)| id).ok_or(Error::NoCandidates)
}

pub fn distance_weight(head_dist_to_bs: f64, config: &NetworkConfig) -> f64 {
    let dmax = max_field_distance(config);
    head_dist_to_bs * config.length / (dmax * dmax)
}

pub fn balance_weight(state: &SimState, config: &NetworkConfig) -> Result<f64> {
    let sum = state.sum_of_energy();
    if sum <= 0.0 {
        return Err(Error::NetworkDead);
    }
    Ok(config.initial_energy / sum * state.alive_count() as f64)
}

pub fn cluster_weight(
    head_dist_to_bs: f64,
    state: &SimState,
    config: &NetworkConfig,
) -> Result<ClusterWeightBreakdown> {
    Ok(ClusterWeightBreakdown::new(
        distance_weight(head_dist_to_bs, config),
        lost_energy_ratio(config)?,
        balance_weight(state, config)?,
    ))
}

/// Builds the cluster around `head_id` from `unassigned` candidates. The
/// head itself is skipped if present in `unassigned`.
pub fn form_cluster(
    head_id: NodeId,
    unassigned: &[NodeId],
    state: &SimState,
    config: &NetworkConfig,
) -> Result<Cluster> {
    let head = &state.nodes[head_id];
    let head_dist_to_bs = dist_to_bs(head, config);
    let weight = cluster_weight(head_dist_to_bs, state, config)?;

    let candidates: Vec<NodeId> = unassigned
        .iter()
        .copied()
        .filter(|&id| id != head_id)
        .collect();
    let values = candidates
        .iter()
        .map(|&id| match config.knapsack_value {
            KnapsackValue::Energy => state.nodes[id].residual_energy,
            KnapsackValue::Unit => 1.0,
        })
        .collect();
    let weights = candidates
        .iter()
        .map(|&id| dist_between(&state.nodes[id], head))
        .collect();
    let instance = KnapsackInstance::new(values, weights, weight.total, config.knapsack_scale);
    let solution = solve_dp(&instance)?;

    Ok(Cluster {
        head_id,
        member_ids: solution.selected.iter().map(|&i| candidates[i]).collect(),
        head_dist_to_bs,
        weight: Some(weight),
    })
}

/// Clusters every alive node: choose a head, fill its cluster, repeat on
/// what is left.
pub fn web_setup_phase(state: &SimState, config: &NetworkConfig) -> Result<WebRoundPlan> {
    let mut remaining: Vec<NodeId> = state.alive_ids().collect();
    let mut assigned = vec![false; state.nodes.len()];
    let mut clusters = Vec::new();

    while !remaining.is_empty() {
        let head = select_head(state, &remaining, config)?;
        let cluster = form_cluster(head, &remaining, state, config)?;
        assigned[head] = true;
        for &m in &cluster.member_ids {
            assigned[m] = true;
        }
        remaining.retain(|&id| !assigned[id]);
        clusters.push(cluster);
    }

    let slot_assignments = clusters.iter().map(|c| c.member_ids.clone()).collect();
    Ok(WebRoundPlan {
        clusters,
        slot_assignments,
    })
}

/// Charges one round of traffic for an already formed set of clusters.
///
/// Members send a control packet to their head; heads receive, aggregate
/// and send one data packet to the BS. Deaths are reported after every
/// charge has been applied.
pub fn steady_state(
    state: &mut SimState,
    clusters: &[Cluster],
    config: &NetworkConfig,
    ledger: &mut EnergyLedger,
) -> Result<RoundTally> {
    let was_alive: Vec<bool> = state.nodes.iter().map(|n| n.alive).collect();
    let plan = ChargePlan::new(config);
    let mut tally = RoundTally {
        clusters: clusters.len(),
        ..Default::default()
    };

    for cluster in clusters {
        let head = cluster.head_id;
        state.nodes[head].role = Role::Head;
        state.nodes[head].rounds_as_head += 1;
        for &m in &cluster.member_ids {
            state.nodes[m].role = Role::Member;
            let d = dist_between(&state.nodes[m], &state.nodes[head]);
            ledger.charge_all(state, m, &plan.member(d)?);
        }
        tally.ctrl_packets += cluster.member_ids.len() as u64;
        let charges = plan.head(cluster.member_ids.len(), cluster.head_dist_to_bs)?;
        ledger.charge_all(state, head, &charges);
        tally.data_packets += 1;
    }

    tally.deaths = dead_since(state, &was_alive);
    Ok(tally)
}

pub(crate) fn dead_since(state: &SimState, was_alive: &[bool]) -> Vec<NodeId> {
    state
        .nodes
        .iter()
        .filter(|n| was_alive[n.id] && !n.alive)
        .map(|n| n.id)
        .collect()
}

pub fn web_steady_state(
    state: &mut SimState,
    plan: &WebRoundPlan,
    config: &NetworkConfig,
    ledger: &mut EnergyLedger,
) -> Result<RoundTally> {
    steady_state(state, &plan.clusters, config, ledger)
}

/// One full round: setup then steady state.
pub fn web_round(
    state: &mut SimState,
    config: &NetworkConfig,
    ledger: &mut EnergyLedger,
) -> Result<(WebRoundPlan, RoundTally)> {
    state.clear_roles();
    let plan = web_setup_phase(state, config)?;
    let tally = web_steady_state(state, &plan, config, ledger)?;
    Ok((plan, tally))
}

/// True when `clusters` cover every alive node exactly once and no dead one.
pub fn is_partition(clusters: &[Cluster], state: &SimState) -> bool {
    let alive: Vec<bool> = state.nodes.iter().map(|n| n.alive).collect();
    crate::sim::covers_alive_exactly(clusters, &alive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{aggregation_cost, tx_cost};
    use crate::knapsack::solve_brute_force;
    use crate::model::{init_network, NodeState};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn state_of(nodes: &[(f64, f64, f64)]) -> SimState {
        SimState::from_nodes(
            nodes
                .iter()
                .enumerate()
                .map(|(i, &(x, y, e))| NodeState::new(i, x, y, e))
                .collect(),
        )
    }

    #[test]
    fn round_one_heads_agree_across_modes() {
        let config = NetworkConfig::default();
        let state = init_network(&config, 5).unwrap();
        let all: Vec<_> = state.alive_ids().collect();
        let nearest = all
            .iter()
            .copied()
            .min_by(|&a, &b| {
                dist_to_bs(&state.nodes[a], &config)
                    .total_cmp(&dist_to_bs(&state.nodes[b], &config))
            })
            .unwrap();
        assert_eq!(select_head(&state, &all, &config).unwrap(), nearest);
        let intent = NetworkConfig {
            head_score: HeadScore::Intent,
            ..config
        };
        assert_eq!(select_head(&state, &all, &intent).unwrap(), nearest);
    }

    #[test]
    fn literal_and_intent_disagree_on_energy() {
        // Both 10 m from the BS at (50, 50).
        let state = state_of(&[(60.0, 50.0, 0.5), (50.0, 60.0, 0.3)]);
        let literal = NetworkConfig::default();
        let intent = NetworkConfig {
            head_score: HeadScore::Intent,
            ..Default::default()
        };
        assert_eq!(select_head(&state, &[0, 1], &literal).unwrap(), 1);
        assert_eq!(select_head(&state, &[0, 1], &intent).unwrap(), 0);
    }

    #[test]
    fn select_head_edges() {
        let state = state_of(&[(60.0, 50.0, 0.5), (40.0, 50.0, 0.5)]);
        let config = NetworkConfig::default();
        assert_eq!(select_head(&state, &[1], &config).unwrap(), 1);
        // Exact tie goes to the lower id regardless of slice order.
        assert_eq!(select_head(&state, &[1, 0], &config).unwrap(), 0);
        assert!(matches!(
            select_head(&state, &[], &config),
            Err(Error::NoCandidates)
        ));
    }

    #[test]
    fn distance_weight_examples() {
        let config = NetworkConfig::default();
        assert_eq!(distance_weight(0.0, &config), 0.0);
        assert_abs_diff_eq!(distance_weight(70.7107, &config), 0.35355, epsilon = 1e-4);
        let dmax = max_field_distance(&config);
        assert_abs_diff_eq!(
            distance_weight(dmax, &config),
            100.0 / dmax,
            epsilon = 1e-12
        );
    }

    #[test]
    fn balance_weight_examples() {
        let config = NetworkConfig::default();
        let mut state = init_network(&config, 1).unwrap();
        assert_abs_diff_eq!(
            balance_weight(&state, &config).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        for id in 0..100 {
            state.deduct(id, 0.25);
        }
        assert_abs_diff_eq!(
            balance_weight(&state, &config).unwrap(),
            2.0,
            epsilon = 1e-12
        );

        let lone = state_of(&[(1.0, 1.0, 0.5)]);
        assert_eq!(balance_weight(&lone, &config).unwrap(), 1.0);

        let mut dead = state_of(&[(1.0, 1.0, 0.5)]);
        dead.deduct(0, 1.0);
        assert!(matches!(
            balance_weight(&dead, &config),
            Err(Error::NetworkDead)
        ));
    }

    #[test]
    fn cluster_weight_examples() {
        let config = NetworkConfig::default();
        let state = init_network(&config, 1).unwrap();
        let w = cluster_weight(35.36, &state, &config).unwrap();
        assert_abs_diff_eq!(w.total, 37.3768, epsilon = 1e-3);
        assert_eq!(
            w.total,
            w.dist_weight + w.lost_energy_ratio + w.balance_weight
        );
        let at_bs = cluster_weight(0.0, &state, &config).unwrap();
        assert_abs_diff_eq!(at_bs.total, 37.2, epsilon = 1e-9);

        let mut drained = state.clone();
        let mut last = w.total;
        for _ in 0..5 {
            for id in 0..100 {
                drained.deduct(id, 0.05);
            }
            let next = cluster_weight(35.36, &drained, &config).unwrap().total;
            assert!(next > last);
            last = next;
        }
    }

    #[test]
    fn form_cluster_singleton_without_candidates() {
        let config = NetworkConfig::default();
        let state = state_of(&[(50.0, 50.0, 0.5)]);
        let c = form_cluster(0, &[], &state, &config).unwrap();
        assert!(c.member_ids.is_empty());
        assert_eq!(c.size(), 1);
    }

    #[test]
    fn form_cluster_three_candidates() {
        // Head at the BS, candidates 10, 20 and 40 m away, equal energy.
        let config = NetworkConfig::default();
        let state = state_of(&[
            (50.0, 50.0, 0.5),
            (60.0, 50.0, 0.5),
            (50.0, 70.0, 0.5),
            (10.0, 50.0, 0.5),
        ]);
        let c = form_cluster(0, &[1, 2, 3], &state, &config).unwrap();
        let w = c.weight.unwrap();
        assert_abs_diff_eq!(w.total, 37.2, epsilon = 1e-9);
        assert_eq!(c.member_ids, vec![1, 2]);

        // Same instance through the oracle.
        let instance = KnapsackInstance::new(vec![0.5; 3], vec![10.0, 20.0, 40.0], w.total, 100);
        assert_eq!(solve_brute_force(&instance).unwrap().selected, vec![0, 1]);
    }

    #[test]
    fn form_cluster_takes_coincident_candidate() {
        let config = NetworkConfig::default();
        let state = state_of(&[(30.0, 30.0, 0.5), (30.0, 30.0, 0.01), (60.0, 90.0, 0.5)]);
        let c = form_cluster(0, &[0, 1, 2], &state, &config).unwrap();
        assert_eq!(c.member_ids, vec![1]);
    }

    #[test]
    fn setup_single_node() {
        let config = NetworkConfig::default();
        let state = state_of(&[(3.0, 4.0, 0.5)]);
        let plan = web_setup_phase(&state, &config).unwrap();
        assert_eq!(plan.clusters.len(), 1);
        assert!(plan.clusters[0].member_ids.is_empty());
    }

    #[test]
    fn setup_defaults_round_one() {
        let config = NetworkConfig::default();
        let state = init_network(&config, 3).unwrap();
        let plan = web_setup_phase(&state, &config).unwrap();
        assert!(!plan.clusters.is_empty());
        assert!(is_partition(&plan.clusters, &state));
        let covered: usize = plan.clusters.iter().map(Cluster::size).sum();
        assert_eq!(covered, 100);
        for (cluster, slots) in plan.clusters.iter().zip(&plan.slot_assignments) {
            let w = cluster.weight.unwrap();
            assert!((37.2..=37.91).contains(&w.total), "capacity {}", w.total);
            assert!(slots.windows(2).all(|p| p[0] < p[1]));
            assert_eq!(slots, &cluster.member_ids);
        }
    }

    #[test]
    fn steady_state_singleton() {
        let config = NetworkConfig::default();
        let mut state = state_of(&[(50.0, 80.0, 0.5)]);
        let plan = web_setup_phase(&state, &config).unwrap();
        let mut ledger = EnergyLedger::new();
        let tally = web_steady_state(&mut state, &plan, &config, &mut ledger).unwrap();
        assert_eq!(tally.data_packets, 1);
        assert_eq!(tally.ctrl_packets, 0);
        let expected =
            aggregation_cost(6400, &config).unwrap() + tx_cost(6400, 30.0, &config).unwrap();
        assert_abs_diff_eq!(ledger.total(), expected, epsilon = 1e-15);
        assert_eq!(state.nodes[0].role, Role::Head);
        assert_eq!(state.nodes[0].rounds_as_head, 1);
    }

    #[test]
    fn steady_state_death_clamps() {
        let config = NetworkConfig::default();
        let mut state = state_of(&[(50.0, 50.0, 0.5), (52.0, 50.0, 1e-7)]);
        let plan = web_setup_phase(&state, &config).unwrap();
        assert_eq!(plan.clusters.len(), 1);
        let mut ledger = EnergyLedger::new();
        let tally = web_steady_state(&mut state, &plan, &config, &mut ledger).unwrap();
        assert_eq!(tally.deaths, vec![1]);
        assert_eq!(state.nodes[1].residual_energy, 0.0);
        assert!(!state.nodes[1].alive);
        assert_eq!(tally.data_packets, tally.clusters as u64);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn setup_partitions_and_respects_capacity(seed in any::<u64>(), n in 1usize..60,
                                                  intent in any::<bool>(), drain in 0.0..0.4f64) {
            let config = NetworkConfig {
                num_nodes: n,
                head_score: if intent { HeadScore::Intent } else { HeadScore::Literal },
                ..Default::default()
            };
            let mut state = init_network(&config, seed).unwrap();
            for id in (0..n).step_by(3) {
                state.deduct(id, drain + 0.01 * id as f64);
            }
            if state.alive_count() == 0 {
                return Ok(());
            }
            let plan = web_setup_phase(&state, &config).unwrap();
            prop_assert!(is_partition(&plan.clusters, &state));
            prop_assert!(plan.clusters.len() <= state.alive_count());
            for c in &plan.clusters {
                let head = &state.nodes[c.head_id];
                let cap = (c.weight.unwrap().total * 100.0).floor() as u64;
                let used: u64 = c.member_ids.iter()
                    .map(|&m| (dist_between(&state.nodes[m], head) * 100.0).round() as u64)
                    .sum();
                prop_assert!(used <= cap);
            }
        }

        #[test]
        fn head_choice_is_scale_invariant(seed in any::<u64>(), factor in 0.01..100.0f64) {
            let config = NetworkConfig { num_nodes: 25, ..Default::default() };
            let mut state = init_network(&config, seed).unwrap();
            for id in 0..25 {
                state.deduct(id, 0.017 * id as f64);
            }
            let ids: Vec<_> = state.alive_ids().collect();
            let chosen = select_head(&state, &ids, &config).unwrap();
            // Scaling every energy scales every literal score by the same factor.
            let mut scaled = state.clone();
            for n in &mut scaled.nodes {
                n.residual_energy *= factor;
            }
            prop_assert_eq!(select_head(&scaled, &ids, &config).unwrap(), chosen);
        }
    }
}
