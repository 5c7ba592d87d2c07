//! Target-node sets.

use std::io::Write;

use rand::Rng;

use crate::error::{invalid, Result};
use crate::graph::WeightedDigraph;
use crate::seed::{derive_seed, fnv1a, stream};

/// A non-empty set of target nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSet {
    members: Vec<usize>,
    node_count: usize,
    /// Fraction of the graph covered, `|members| / n`.
    pub phi: f64,
    pub sample_id: u64,
    /// Seed of the stream the members were drawn from; zero for explicit sets.
    pub seed: u64,
}

impl TargetSet {
    /// Explicit set over a graph with `node_count` nodes. Duplicates are merged.
    pub fn from_members(mut members: Vec<usize>, node_count: usize) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(invalid("target set must contain at least one node"));
        }
        if let Some(&bad) = members.iter().find(|&&m| m >= node_count) {
            return Err(invalid(format!(
                "target {bad} out of range for {node_count} nodes"
            )));
        }
        Ok(Self {
            phi: members.len() as f64 / node_count as f64,
            members,
            node_count,
            sample_id: 0,
            seed: 0,
        })
    }

    /// Sorted member indices.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn contains(&self, node: usize) -> bool {
        self.members.binary_search(&node).is_ok()
    }

    /// Membership mask of length `n`.
    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.node_count];
        for &m in &self.members {
            mask[m] = true;
        }
        mask
    }

    /// Fingerprint of the member set.
    pub fn fingerprint(&self) -> u64 {
        fnv1a(self.members.iter().map(|&m| m as u64))
    }
}

/// Number of targets for fraction `phi` of `n` nodes: `round(phi·n)`, at least one.
pub fn target_count(phi: f64, n: usize) -> Result<usize> {
    if !(phi > 0.0 && phi <= 1.0) {
        return Err(invalid(format!("phi must lie in (0, 1], got {phi}")));
    }
    Ok(((phi * n as f64).round() as usize).clamp(1, n.max(1)))
}

/// Draws `target_count(phi, n)` distinct nodes uniformly from `rng`.
pub fn sample_members<R: Rng + ?Sized>(n: usize, phi: f64, rng: &mut R) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(crate::Error::EmptyGraph);
    }
    let k = target_count(phi, n)?;
    let mut members = rand::seq::index::sample(rng, n, k).into_vec();
    members.sort_unstable();
    Ok(members)
}

/// Target set number `sample_id` for fraction `phi`, drawn from the stream
/// derived from `(master_seed, phi, sample_id)`.
pub fn sample_targets(
    g: &WeightedDigraph,
    phi: f64,
    master_seed: u64,
    sample_id: u64,
) -> Result<TargetSet> {
    let seed = derive_seed(master_seed, &[0x7461_7267, phi.to_bits(), sample_id]);
    let members = sample_members(g.node_count(), phi, &mut stream(seed))?;
    let mut set = TargetSet::from_members(members, g.node_count())?;
    set.sample_id = sample_id;
    set.seed = seed;
    Ok(set)
}

/// Indicator vector `t` with ones at the members.
pub fn target_vector(targets: &TargetSet, n: usize) -> Result<Vec<f64>> {
    let mut t = vec![0.0; n];
    for &m in targets.members() {
        *t.get_mut(m)
            .ok_or_else(|| invalid(format!("target {m} out of range for {n} nodes")))? = 1.0;
    }
    Ok(t)
}

/// Writes `sample_id,node_index,label` rows for every member of every set.
pub fn write_targets_csv<'a, W: Write>(
    g: &WeightedDigraph,
    sets: impl IntoIterator<Item = &'a TargetSet>,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sample_id", "node_index", "label"])?;
    for set in sets {
        for &m in set.members() {
            w.write_record([set.sample_id.to_string(), m.to_string(), g.label(m)])?;
        }
    }
    w.flush()?;
    Ok(())
}
