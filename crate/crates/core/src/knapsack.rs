//! Exact 0/1 knapsack over real-valued items.
//!
//! Weights and capacity are quantized to integers (`round(w * scale)`,
//! `floor(capacity * scale)`) so the classic value-maximising dynamic
//! program can index on weight. Values stay real.

use serde::{Deserialize, Serialize};

use crate::error::KnapsackError;

/// Largest brute-force instance the oracle will enumerate.
pub const ORACLE_MAX_ITEMS: usize = 20;

/// Cap on DP decision-table cells (one bit each).
const MAX_TABLE_BITS: u128 = 1 << 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnapsackInstance {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
    pub capacity: f64,
    pub scale: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quantized {
    pub weights: Vec<u64>,
    pub capacity: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnapsackSolution {
    /// Ascending item indices.
    pub selected: Vec<usize>,
    pub total_value: f64,
    pub total_weight: f64,
    pub quantized_weight: u64,
}

impl KnapsackInstance {
    pub fn new(values: Vec<f64>, weights: Vec<f64>, capacity: f64, scale: u32) -> Self {
        Self {
            values,
            weights,
            capacity,
            scale,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check(&self) -> Result<(), KnapsackError> {
        if self.values.len() != self.weights.len() {
            return Err(KnapsackError::LengthMismatch {
                values: self.values.len(),
                weights: self.weights.len(),
            });
        }
        if self.scale == 0 {
            return Err(KnapsackError::BadScale);
        }
        if !(self.capacity.is_finite() && self.capacity >= 0.0) {
            return Err(KnapsackError::BadCapacity);
        }
        for (index, (&v, &w)) in self.values.iter().zip(&self.weights).enumerate() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(KnapsackError::BadItem {
                    index,
                    what: "value",
                });
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(KnapsackError::BadItem {
                    index,
                    what: "weight",
                });
            }
        }
        Ok(())
    }

    pub fn quantize(&self) -> Result<Quantized, KnapsackError> {
        self.check()?;
        let scale = f64::from(self.scale);
        let too_large = |capacity| KnapsackError::TooLarge {
            items: self.len(),
            capacity,
        };
        let cap = (self.capacity * scale).floor();
        if cap >= u64::MAX as f64 {
            return Err(too_large(u64::MAX));
        }
        let capacity = cap as u64;
        let weights = self
            .weights
            .iter()
            .map(|&w| {
                let q = (w * scale).round();
                if q >= u64::MAX as f64 {
                    Err(too_large(capacity))
                } else {
                    Ok(q as u64)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Quantized { weights, capacity })
    }

    fn solution_from(&self, q: &Quantized, selected: Vec<usize>) -> KnapsackSolution {
        let total_value = selected.iter().map(|&i| self.values[i]).sum();
        let total_weight = selected.iter().map(|&i| self.weights[i]).sum();
        let quantized_weight = selected.iter().map(|&i| q.weights[i]).sum();
        KnapsackSolution {
            selected,
            total_value,
            total_weight,
            quantized_weight,
        }
    }
}

/// Solves by dynamic programming over quantized weight.
///
/// Item `i` is taken during backtracking iff including it strictly improved
/// the best value at that capacity, so among equal-value optima the one
/// that leaves out higher-indexed items is returned.
pub fn solve_dp(instance: &KnapsackInstance) -> Result<KnapsackSolution, KnapsackError> {
    let q = instance.quantize()?;
    let cap = q.capacity;

    // Items heavier than the whole capacity can never be taken.
    let fitting: Vec<usize> = (0..instance.len())
        .filter(|&i| q.weights[i] <= cap)
        .collect();
    if fitting.is_empty() {
        return Ok(instance.solution_from(&q, Vec::new()));
    }
    let cells = (cap as u128 + 1) * fitting.len() as u128;
    if cells > MAX_TABLE_BITS {
        return Err(KnapsackError::TooLarge {
            items: instance.len(),
            capacity: cap,
        });
    }

    let width = cap as usize + 1;
    let words = width.div_ceil(64);
    let mut best = vec![0.0f64; width];
    let mut keep = vec![0u64; words * fitting.len()];

    for (row, &item) in fitting.iter().enumerate() {
        let w = q.weights[item] as usize;
        let v = instance.values[item];
        let bits = &mut keep[row * words..(row + 1) * words];
        for c in (w..width).rev() {
            let with = best[c - w] + v;
            if with > best[c] {
                best[c] = with;
                bits[c / 64] |= 1 << (c % 64);
            }
        }
    }

    let mut selected = Vec::new();
    let mut c = cap as usize;
    for (row, &item) in fitting.iter().enumerate().rev() {
        if keep[row * words + c / 64] & (1 << (c % 64)) != 0 {
            selected.push(item);
            c -= q.weights[item] as usize;
        }
    }
    selected.reverse();
    Ok(instance.solution_from(&q, selected))
}

/// Exhaustive reference solver for small instances.
///
/// Enumerates every subset under the same quantized feasibility rule and
/// keeps the best value, preferring the lexicographically smallest index
/// list on ties.
pub fn solve_brute_force(instance: &KnapsackInstance) -> Result<KnapsackSolution, KnapsackError> {
    let q = instance.quantize()?;
    let n = instance.len();
    if n > ORACLE_MAX_ITEMS {
        return Err(KnapsackError::OracleTooLarge {
            max: ORACLE_MAX_ITEMS,
            got: n,
        });
    }
    let indices = |mask: u32| -> Vec<usize> { (0..n).filter(|i| mask >> i & 1 == 1).collect() };

    // Each subset extends the subset without its highest item, so value
    // sums are accumulated in ascending index order.
    let subsets = 1usize << n;
    let mut weight = vec![0u64; subsets];
    let mut value = vec![0.0f64; subsets];
    let mut best_mask = 0u32;
    let mut best_value = 0.0f64;
    for mask in 1..subsets {
        let top = usize::BITS - 1 - mask.leading_zeros();
        let rest = mask ^ (1 << top);
        weight[mask] = weight[rest] + q.weights[top as usize];
        value[mask] = value[rest] + instance.values[top as usize];
        if weight[mask] > q.capacity {
            continue;
        }
        let (m, v) = (mask as u32, value[mask]);
        if v > best_value || (v == best_value && indices(m) < indices(best_mask)) {
            best_mask = m;
            best_value = v;
        }
    }
    Ok(instance.solution_from(&q, indices(best_mask)))
}
