//! Synthetic website-like graphs.
//!
//! Directed Chung–Lu model: every node draws an out-fitness and an
//! in-fitness from a Pareto law, and each link picks its source and
//! destination proportionally to those fitnesses, which gives heavy-tailed
//! in- and out-degree distributions. A cycle through a random permutation of
//! all nodes is added on top so the graph is strongly connected. Parallel
//! links are summed and self-loops dropped, as for any loaded edge list.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand_distr::Pareto;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::WeightedDigraph;
use crate::seed::stream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleFreeConfig {
    pub nodes: usize,
    /// Random links per node, on top of the spanning cycle.
    pub mean_out_degree: f64,
    /// Tail exponent of the fitness distributions (`P(x) ~ x^-exponent`).
    pub exponent: f64,
    pub seed: u64,
}

impl Default for ScaleFreeConfig {
    fn default() -> Self {
        Self {
            nodes: 5000,
            mean_out_degree: 8.0,
            exponent: 2.5,
            seed: 20_160_101,
        }
    }
}

/// Generates a strongly connected scale-free-like digraph with labels `n0, n1, …`.
pub fn scale_free(config: &ScaleFreeConfig) -> Result<WeightedDigraph> {
    let n = config.nodes;
    if n < 2 {
        return Err(invalid("synthetic graph needs at least two nodes"));
    }
    if !(config.mean_out_degree >= 0.0 && config.mean_out_degree.is_finite()) {
        return Err(invalid("mean out-degree must be finite and non-negative"));
    }
    if config.exponent.is_nan() || config.exponent <= 1.0 {
        return Err(invalid("fitness exponent must exceed 1"));
    }
    let mut rng = stream(config.seed);
    let fitness = Pareto::new(1.0, config.exponent - 1.0).expect("valid pareto parameters");
    let out_fit: Vec<f64> = (0..n).map(|_| fitness.sample(&mut rng)).collect();
    let in_fit: Vec<f64> = (0..n).map(|_| fitness.sample(&mut rng)).collect();
    let pick_src = WeightedIndex::new(&out_fit).expect("positive fitness");
    let pick_dst = WeightedIndex::new(&in_fit).expect("positive fitness");

    let links = (config.mean_out_degree * n as f64).round() as usize;
    let mut edges = Vec::with_capacity(links + n);
    for _ in 0..links {
        edges.push((pick_src.sample(&mut rng), pick_dst.sample(&mut rng), 1.0));
    }
    let mut ring: Vec<usize> = (0..n).collect();
    ring.shuffle(&mut rng);
    for k in 0..n {
        edges.push((ring[k], ring[(k + 1) % n], 1.0));
    }
    let labels = (0..n).map(|i| format!("n{i}")).collect();
    Ok(WeightedDigraph::from_edges(n, edges, Some(labels))?.0)
}
