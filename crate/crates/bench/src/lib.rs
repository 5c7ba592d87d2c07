//! Shared inputs for the criterion benchmarks in `benches/`.

use surfsteer_core::surfer::stationary_of;
use surfsteer_core::synthetic::{scale_free, ScaleFreeConfig};
use surfsteer_core::targets::sample_targets;
use surfsteer_core::{PowerIteration, TargetSet, WeightedDigraph};

/// Synthetic graph, a 10% target sample and the baseline stationary vector.
pub struct Workload {
    pub graph: WeightedDigraph,
    pub targets: TargetSet,
    pub pi: Vec<f64>,
}

pub fn workload(nodes: usize) -> Workload {
    let graph = scale_free(&ScaleFreeConfig {
        nodes,
        ..ScaleFreeConfig::default()
    })
    .expect("generator parameters are valid");
    let targets = sample_targets(&graph, 0.1, 1, 0).expect("phi is valid");
    let pi = stationary_of(&graph, &PowerIteration::default())
        .expect("synthetic graph converges")
        .pi;
    Workload { graph, targets, pi }
}
