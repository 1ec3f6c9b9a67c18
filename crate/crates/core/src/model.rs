//! Network state shared by both protocols and the geometry they rely on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::NetworkConfig;
use crate::error::Result;

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    #[default]
    Unassigned,
    Member,
    Head,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeState {
    pub id: NodeId,
    pub x: f64,
    pub y: f64,
    pub residual_energy: f64,
    pub alive: bool,
    pub role: Role,
    pub rounds_as_head: u64,
}

impl NodeState {
    pub fn new(id: NodeId, x: f64, y: f64, energy: f64) -> Self {
        Self {
            id,
            x,
            y,
            residual_energy: energy,
            alive: energy > 0.0,
            role: Role::Unassigned,
            rounds_as_head: 0,
        }
    }
}

/// Per-cluster capacity and the three terms it is built from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterWeightBreakdown {
    pub dist_weight: f64,
    pub lost_energy_ratio: f64,
    pub balance_weight: f64,
    pub total: f64,
}

impl ClusterWeightBreakdown {
    pub fn new(dist_weight: f64, lost_energy_ratio: f64, balance_weight: f64) -> Self {
        Self {
            dist_weight,
            lost_energy_ratio,
            balance_weight,
            total: dist_weight + lost_energy_ratio + balance_weight,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub head_id: NodeId,
    /// Ascending by id.
    pub member_ids: Vec<NodeId>,
    pub head_dist_to_bs: f64,
    /// Absent for clusters that were not sized by a knapsack (LEACH).
    pub weight: Option<ClusterWeightBreakdown>,
}

impl Cluster {
    pub fn size(&self) -> usize {
        1 + self.member_ids.len()
    }
}

/// Mutable state of one simulation run.
///
/// `sum_of_energy` and `alive_count` are caches over `nodes`; every
/// mutation goes through [`SimState::deduct`] to keep them in step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub round: u64,
    pub nodes: Vec<NodeState>,
    sum_of_energy: f64,
    alive_count: usize,
}

impl SimState {
    pub fn from_nodes(nodes: Vec<NodeState>) -> Self {
        let mut state = Self {
            round: 0,
            nodes,
            sum_of_energy: 0.0,
            alive_count: 0,
        };
        state.resync();
        state
    }

    pub fn sum_of_energy(&self) -> f64 {
        self.sum_of_energy
    }

    pub fn alive_count(&self) -> usize {
        self.alive_count
    }

    pub fn is_alive(&self, id: NodeId) -> bool {
        self.nodes[id].alive
    }

    pub fn alive_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().filter(|n| n.alive).map(|n| n.id)
    }

    /// Removes up to `amount` joules from node `id`, clamping at zero.
    /// Returns the amount actually removed. A node whose energy reaches
    /// zero is marked dead immediately; dead nodes are never charged.
    pub fn deduct(&mut self, id: NodeId, amount: f64) -> f64 {
        let node = &mut self.nodes[id];
        if !node.alive || amount <= 0.0 {
            return 0.0;
        }
        let taken = amount.min(node.residual_energy);
        if taken >= node.residual_energy {
            node.residual_energy = 0.0;
            node.alive = false;
            self.alive_count -= 1;
        } else {
            node.residual_energy -= taken;
        }
        self.sum_of_energy -= taken;
        taken
    }

    /// Recomputes the cached aggregates from the node list.
    pub fn resync(&mut self) {
        self.sum_of_energy = self
            .nodes
            .iter()
            .filter(|n| n.alive)
            .map(|n| n.residual_energy)
            .sum();
        self.alive_count = self.nodes.iter().filter(|n| n.alive).count();
    }

    pub fn recomputed_sum_of_energy(&self) -> f64 {
        self.nodes
            .iter()
            .filter(|n| n.alive)
            .map(|n| n.residual_energy)
            .sum()
    }

    pub fn clear_roles(&mut self) {
        for node in &mut self.nodes {
            node.role = Role::Unassigned;
        }
    }
}

/// Places `num_nodes` nodes uniformly at random over the field.
pub fn init_network(config: &NetworkConfig, seed: u64) -> Result<SimState> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = (0..config.num_nodes)
        .map(|id| {
            let x = rng.random_range(0.0..=config.length);
            let y = rng.random_range(0.0..=config.width);
            NodeState::new(id, x, y, config.initial_energy)
        })
        .collect();
    Ok(SimState::from_nodes(nodes))
}

pub fn dist_to_bs(node: &NodeState, config: &NetworkConfig) -> f64 {
    (config.bs_x - node.x).hypot(config.bs_y - node.y)
}

pub fn dist_between(a: &NodeState, b: &NodeState) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Diagonal of the field, the largest in-field distance.
pub fn max_field_distance(config: &NetworkConfig) -> f64 {
    config.length.hypot(config.width)
}
