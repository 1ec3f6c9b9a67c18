//! Network and protocol parameters.
//!
//! Defaults reproduce the reference deployment: 100 nodes on a 100 m x 100 m
//! field, base station at the centre, 0.5 J batteries and a first-order radio
//! with 50 nJ/bit electronics.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scoring rule for choosing the next cluster head.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadScore {
    /// `argmin dist_to_bs * energy`, exactly as the selection formula reads.
    #[default]
    Literal,
    /// `argmin dist_to_bs / energy`: nearest node with the most energy.
    Intent,
}

/// What a candidate contributes to the knapsack objective.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnapsackValue {
    /// Residual energy of the candidate.
    #[default]
    Energy,
    /// Every candidate is worth 1, maximising member count.
    Unit,
}

/// How per-round energy is deducted from nodes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChargeModel {
    /// Distance-dependent first-order radio model.
    #[default]
    Radio,
    /// Flat head/member costs from the lost-energy formulas.
    LostEnergy,
}

/// LEACH behaviour when no head is elected in a round.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Headless {
    /// Every alive node transmits its data packet straight to the BS.
    #[default]
    Direct,
    /// Nothing is transmitted and nobody is charged.
    Idle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub num_nodes: usize,
    /// Field extent along x, metres.
    pub length: f64,
    /// Field extent along y, metres.
    pub width: f64,
    pub bs_x: f64,
    pub bs_y: f64,
    /// Battery per node, joules.
    pub initial_energy: f64,
    /// Transmit/receive electronics, J/bit.
    pub e_elec: f64,
    /// Free-space amplifier, J/bit/m^2.
    pub e_fs: f64,
    /// Multipath amplifier, J/bit/m^4.
    pub e_mp: f64,
    /// Data aggregation, J/bit.
    pub e_da: f64,
    /// Head to BS packet size.
    pub data_packet_bits: u32,
    /// Member to head packet size.
    pub ctrl_packet_bits: u32,
    pub leach_p: f64,
    /// Round cap; `None` runs until every node is dead.
    pub max_rounds: Option<u64>,
    pub knapsack_scale: u32,
    pub seed: u64,
    pub head_score: HeadScore,
    pub knapsack_value: KnapsackValue,
    pub charge_model: ChargeModel,
    pub headless: Headless,
}

pub const DEFAULT_MAX_ROUNDS: u64 = 10_000;

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            num_nodes: 100,
            length: 100.0,
            width: 100.0,
            bs_x: 50.0,
            bs_y: 50.0,
            initial_energy: 0.5,
            e_elec: 50e-9,
            e_fs: 100e-12,
            e_mp: 0.013e-12,
            e_da: 5e-9,
            data_packet_bits: 6400,
            ctrl_packet_bits: 200,
            leach_p: 0.05,
            max_rounds: Some(DEFAULT_MAX_ROUNDS),
            knapsack_scale: 100,
            seed: 0,
            head_score: HeadScore::default(),
            knapsack_value: KnapsackValue::default(),
            charge_model: ChargeModel::default(),
            headless: Headless::default(),
        }
    }
}

impl NetworkConfig {
    /// Reads a JSON config. Missing keys take their defaults, unknown keys
    /// are rejected, and the result is validated.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: Self = serde_json::from_str(&text).map_err(|source| Error::ConfigParse {
            path: path.to_path_buf(),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serialisable")
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_nodes == 0 {
            return Err(Error::config("num_nodes", "must be at least 1"));
        }
        positive("length", self.length)?;
        positive("width", self.width)?;
        if !self.bs_x.is_finite() {
            return Err(Error::config("bs_x", "must be finite"));
        }
        if !self.bs_y.is_finite() {
            return Err(Error::config("bs_y", "must be finite"));
        }
        positive("initial_energy", self.initial_energy)?;
        positive("e_elec", self.e_elec)?;
        positive("e_fs", self.e_fs)?;
        positive("e_mp", self.e_mp)?;
        positive("e_da", self.e_da)?;
        if self.data_packet_bits == 0 {
            return Err(Error::config("data_packet_bits", "must be at least 1"));
        }
        if self.ctrl_packet_bits == 0 {
            return Err(Error::config("ctrl_packet_bits", "must be at least 1"));
        }
        if !(self.leach_p > 0.0 && self.leach_p <= 1.0) {
            return Err(Error::config("leach_p", "must lie in (0, 1]"));
        }
        if self.knapsack_scale == 0 {
            return Err(Error::config("knapsack_scale", "must be at least 1"));
        }
        Ok(())
    }

    /// Sum of all batteries at deployment.
    pub fn initial_total_energy(&self) -> f64 {
        self.initial_energy * self.num_nodes as f64
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::config(
            field,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}
