//! Effect measures for target sets.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::WeightedDigraph;
use crate::modify::target_in_weight;
use crate::targets::TargetSet;

/// Energy of the target set: `π_t = Σ_i π_i·t_i`.
pub fn energy(pi: &[f64], targets: &TargetSet) -> Result<f64> {
    if pi.len() != targets.node_count() {
        return Err(invalid(format!(
            "probability vector has {} entries, target set expects {}",
            pi.len(),
            targets.node_count()
        )));
    }
    Ok(targets.members().iter().map(|&m| pi[m]).sum())
}

/// Influence potential `τ = π′_t / π_t`.
pub fn influence_potential(energy_after: f64, energy_before: f64) -> Result<f64> {
    if energy_before.is_nan() || energy_before <= 0.0 {
        return Err(invalid(format!(
            "baseline energy must be positive, got {energy_before}"
        )));
    }
    Ok(energy_after / energy_before)
}

/// Weighted degrees of a target set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetDegrees {
    /// `d⁻`: weight of links pointing at targets.
    pub in_degree: f64,
    /// `d⁺`: weight of links leaving targets.
    pub out_degree: f64,
    /// `d⁺ / d⁻`; `+∞` when the set has no in-links.
    pub ratio: f64,
}

impl TargetDegrees {
    pub fn ratio_is_finite(&self) -> bool {
        self.ratio.is_finite()
    }
}

/// In- and out-weight of the target set. Links between two targets count on
/// both sides.
pub fn target_degrees(g: &WeightedDigraph, targets: &TargetSet) -> TargetDegrees {
    let mask = targets.mask();
    let in_degree = target_in_weight(g, &mask);
    let out_degree: f64 = g.edges().filter(|e| mask[e.src]).map(|e| e.weight).sum();
    let ratio = if in_degree > 0.0 {
        out_degree / in_degree
    } else {
        f64::INFINITY
    };
    TargetDegrees {
        in_degree,
        out_degree,
        ratio,
    }
}

/// All per-run effect measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetMetrics {
    pub energy_before: f64,
    pub energy_after: f64,
    pub influence_potential: f64,
    pub degrees: TargetDegrees,
}

impl TargetMetrics {
    /// Degrees are taken on the unmodified graph.
    pub fn compute(
        original: &WeightedDigraph,
        pi_before: &[f64],
        pi_after: &[f64],
        targets: &TargetSet,
    ) -> Result<Self> {
        let energy_before = energy(pi_before, targets)?;
        let energy_after = energy(pi_after, targets)?;
        Ok(Self {
            energy_before,
            energy_after,
            influence_potential: influence_potential(energy_after, energy_before)?,
            degrees: target_degrees(original, targets),
        })
    }
}
