//! First-order radio energy model and per-role charging.
//!
//! Transmitting `k` bits over `d` metres costs `E_elec*k + E_fs*k*d^2` below
//! the crossover distance `d0 = sqrt(E_fs / E_mp)` and `E_elec*k + E_mp*k*d^4`
//! at or beyond it. Receiving costs `E_elec*k`, aggregating `E_da*k`.

use serde::{Deserialize, Serialize};

use crate::config::{ChargeModel, NetworkConfig};
use crate::error::{Error, Result};
use crate::model::{NodeId, SimState};

/// Distance at which the free-space and multipath amplifier costs meet.
pub fn crossover_distance(config: &NetworkConfig) -> f64 {
    (config.e_fs / config.e_mp).sqrt()
}

pub fn tx_cost(bits: u32, distance: f64, config: &NetworkConfig) -> Result<f64> {
    if bits == 0 {
        return Err(Error::ZeroBits);
    }
    let k = f64::from(bits);
    let amp = if distance < crossover_distance(config) {
        config.e_fs * distance * distance
    } else {
        let d2 = distance * distance;
        config.e_mp * d2 * d2
    };
    Ok(config.e_elec * k + amp * k)
}

pub fn rx_cost(bits: u32, config: &NetworkConfig) -> Result<f64> {
    if bits == 0 {
        return Err(Error::ZeroBits);
    }
    Ok(config.e_elec * f64::from(bits))
}

pub fn aggregation_cost(bits: u32, config: &NetworkConfig) -> Result<f64> {
    if bits == 0 {
        return Err(Error::ZeroBits);
    }
    Ok(config.e_da * f64::from(bits))
}

/// Energy a head loses per round: aggregate and send one data packet,
/// receive one control packet.
pub fn lost_energy_head(config: &NetworkConfig) -> f64 {
    (config.e_elec + config.e_da) * f64::from(config.data_packet_bits)
        + config.e_elec * f64::from(config.ctrl_packet_bits)
}

/// Energy a member loses per round sending its control packet.
pub fn lost_energy_member(config: &NetworkConfig) -> f64 {
    config.e_elec * f64::from(config.ctrl_packet_bits)
}

/// Head-to-member loss ratio, the communication term of the cluster weight.
pub fn lost_energy_ratio(config: &NetworkConfig) -> Result<f64> {
    let member = lost_energy_member(config);
    if member <= 0.0 {
        return Err(Error::config(
            "ctrl_packet_bits",
            "member loss is zero, head/member ratio is undefined",
        ));
    }
    Ok(lost_energy_head(config) / member)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChargeCause {
    TxData,
    TxCtrl,
    Rx,
    Aggregate,
}

impl ChargeCause {
    pub const ALL: [ChargeCause; 4] = [
        ChargeCause::TxData,
        ChargeCause::TxCtrl,
        ChargeCause::Rx,
        ChargeCause::Aggregate,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

/// One deduction from one node. `amount` is what was actually removed,
/// which is less than the requested cost when the battery ran out.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyCharge {
    pub node_id: NodeId,
    pub amount: f64,
    pub cause: ChargeCause,
}

/// Per-round costs for a node acting in a given role.
#[derive(Clone, Copy, Debug)]
pub struct ChargePlan<'a> {
    config: &'a NetworkConfig,
}

impl<'a> ChargePlan<'a> {
    pub fn new(config: &'a NetworkConfig) -> Self {
        Self { config }
    }

    /// Member sending its control packet to a head `dist_to_head` away.
    pub fn member(&self, dist_to_head: f64) -> Result<Vec<(ChargeCause, f64)>> {
        let c = self.config;
        let cost = match c.charge_model {
            ChargeModel::Radio => tx_cost(c.ctrl_packet_bits, dist_to_head, c)?,
            ChargeModel::LostEnergy => lost_energy_member(c),
        };
        Ok(vec![(ChargeCause::TxCtrl, cost)])
    }

    /// Head receiving `members` control packets, aggregating, and sending
    /// one data packet to the BS.
    pub fn head(&self, members: usize, dist_to_bs: f64) -> Result<Vec<(ChargeCause, f64)>> {
        let c = self.config;
        let mut out = Vec::with_capacity(3);
        match c.charge_model {
            ChargeModel::Radio => {
                if members > 0 {
                    out.push((
                        ChargeCause::Rx,
                        rx_cost(c.ctrl_packet_bits, c)? * members as f64,
                    ));
                }
                out.push((
                    ChargeCause::Aggregate,
                    aggregation_cost(c.data_packet_bits, c)?,
                ));
                out.push((
                    ChargeCause::TxData,
                    tx_cost(c.data_packet_bits, dist_to_bs, c)?,
                ));
            }
            ChargeModel::LostEnergy => {
                let data = f64::from(c.data_packet_bits);
                out.push((ChargeCause::Rx, c.e_elec * f64::from(c.ctrl_packet_bits)));
                out.push((ChargeCause::Aggregate, c.e_da * data));
                out.push((ChargeCause::TxData, c.e_elec * data));
            }
        }
        Ok(out)
    }

    /// Node sending its own data packet straight to the BS.
    pub fn direct(&self, dist_to_bs: f64) -> Result<Vec<(ChargeCause, f64)>> {
        let c = self.config;
        let cost = match c.charge_model {
            ChargeModel::Radio => tx_cost(c.data_packet_bits, dist_to_bs, c)?,
            ChargeModel::LostEnergy => c.e_elec * f64::from(c.data_packet_bits),
        };
        Ok(vec![(ChargeCause::TxData, cost)])
    }
}

/// Running account of every joule removed from the network.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    by_cause: [f64; 4],
    total: f64,
    charges: u64,
    #[serde(skip)]
    log: Option<Vec<EnergyCharge>>,
}

impl EnergyLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// A ledger that also keeps every individual charge.
    pub fn with_log() -> Self {
        Self {
            log: Some(Vec::new()),
            ..Self::default()
        }
    }

    /// Deducts `cost` from `node` and records what was taken.
    pub fn charge(
        &mut self,
        state: &mut SimState,
        node: NodeId,
        cause: ChargeCause,
        cost: f64,
    ) -> Option<EnergyCharge> {
        let amount = state.deduct(node, cost);
        if amount <= 0.0 {
            return None;
        }
        let charge = EnergyCharge {
            node_id: node,
            amount,
            cause,
        };
        self.by_cause[cause.index()] += amount;
        self.total += amount;
        self.charges += 1;
        if let Some(log) = &mut self.log {
            log.push(charge);
        }
        Some(charge)
    }

    pub fn charge_all(&mut self, state: &mut SimState, node: NodeId, plan: &[(ChargeCause, f64)]) {
        for &(cause, cost) in plan {
            self.charge(state, node, cause, cost);
        }
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn total_for(&self, cause: ChargeCause) -> f64 {
        self.by_cause[cause.index()]
    }

    pub fn charge_count(&self) -> u64 {
        self.charges
    }

    pub fn log(&self) -> Option<&[EnergyCharge]> {
        self.log.as_deref()
    }
}
