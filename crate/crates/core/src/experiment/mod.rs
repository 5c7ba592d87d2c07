//! Seeded experiment sweeps.
//!
//! One run follows the full pipeline: baseline stationary distribution,
//! modification, new transition matrix, new stationary distribution, and
//! the comparison of target energies. A sweep repeats that over a grid of
//! target fractions `φ`, samples, bias strengths and mixing factors. Target
//! sets are drawn once per `(φ, sample)` and reused by every strategy and
//! strength, and results come back in grid order whatever the worker count.

mod binning;
mod config;
mod output;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use binning::{
    bin_by_degree_ratio, bin_groups, write_bins_csv, write_grouped_bins_csv, BinGroup,
    BinnedSummary, Binning,
};
pub use config::{realistic_strengths, saturation_strengths, SweepConfig};
pub use output::{write_failures_csv, write_records_csv, write_records_jsonl, RECORD_HEADER};

use crate::error::{Error, Result};
use crate::graph::{is_strongly_connected, strongly_connected_components, WeightedDigraph};
use crate::metrics::TargetMetrics;
use crate::modify::{self, LinkBudget, ModificationSpec, Strategy};
use crate::seed::derive_seed;
use crate::surfer::{lorenz_curve, stationary_of, LorenzPoint, PowerIteration, StationaryResult};
use crate::targets::{sample_targets, TargetSet};

use config::sorted_unique;

/// Outcome of one modification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub graph_id: String,
    pub strategy: Strategy,
    pub phi: f64,
    pub sample_id: u64,
    pub b: f64,
    pub alpha: Option<f64>,
    pub pi_t: f64,
    pub pi_t_prime: f64,
    pub tau: f64,
    pub d_in: f64,
    pub d_out: f64,
    /// `d_out / d_in`, infinite when the targets have no in-links.
    pub degree_ratio: f64,
    pub l_b: f64,
    pub inserted_count: usize,
    pub biased_weight: f64,
    pub iters_before: usize,
    pub iters_after: usize,
    pub wall_time_ms: Option<f64>,
    /// Fingerprint of the target members.
    pub targets_hash: u64,
}

/// A run of a sweep that failed, with the grid point it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub strategy: Strategy,
    pub phi: f64,
    pub sample_id: u64,
    pub b: f64,
    pub alpha: Option<f64>,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub records: Vec<RunRecord>,
    pub failures: Vec<RunFailure>,
    pub baseline: StationaryResult,
    /// Target sets keyed by `(φ, sample_id)` in grid order.
    pub target_sets: Vec<(f64, TargetSet)>,
}

/// Fails unless `g` is non-empty and strongly connected.
pub fn require_strongly_connected(g: &WeightedDigraph) -> Result<()> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if !is_strongly_connected(g) {
        let components = strongly_connected_components(g);
        return Err(Error::NotStronglyConnected {
            n: g.node_count(),
            components: components.len(),
            largest: components.iter().map(Vec::len).max().unwrap_or(0),
        });
    }
    Ok(())
}

/// A run together with the graph and budget it produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: RunRecord,
    pub modified: WeightedDigraph,
    pub budget: LinkBudget,
    pub pi_after: Vec<f64>,
}

fn run_against_baseline(
    g: &WeightedDigraph,
    graph_id: &str,
    baseline: &StationaryResult,
    targets: &TargetSet,
    phi: f64,
    spec: &ModificationSpec,
    solver: &PowerIteration,
) -> Result<RunOutput> {
    let start = Instant::now();
    let (modified, budget) = modify::apply(g, targets, &baseline.pi, spec)?;
    let after = stationary_of(&modified, solver)?;
    let m = TargetMetrics::compute(g, &baseline.pi, &after.pi, targets)?;
    let record = RunRecord {
        graph_id: graph_id.to_owned(),
        strategy: spec.strategy,
        phi,
        sample_id: targets.sample_id,
        b: spec.bias_strength,
        alpha: spec.alpha,
        pi_t: m.energy_before,
        pi_t_prime: m.energy_after,
        tau: m.influence_potential,
        d_in: m.degrees.in_degree,
        d_out: m.degrees.out_degree,
        degree_ratio: m.degrees.ratio,
        l_b: budget.total_weight,
        inserted_count: budget.inserted_count,
        biased_weight: budget.biased_weight,
        iters_before: baseline.iterations,
        iters_after: after.iterations,
        wall_time_ms: Some(start.elapsed().as_secs_f64() * 1e3),
        targets_hash: targets.fingerprint(),
    };
    Ok(RunOutput {
        record,
        modified,
        budget,
        pi_after: after.pi,
    })
}

/// Runs one modification end to end on a strongly connected graph.
pub fn run_single(
    g: &WeightedDigraph,
    graph_id: &str,
    targets: &TargetSet,
    spec: &ModificationSpec,
    solver: &PowerIteration,
) -> Result<RunRecord> {
    Ok(run_detailed(g, graph_id, targets, spec, solver)?.record)
}

/// Like [`run_single`], also returning the modified graph.
pub fn run_detailed(
    g: &WeightedDigraph,
    graph_id: &str,
    targets: &TargetSet,
    spec: &ModificationSpec,
    solver: &PowerIteration,
) -> Result<RunOutput> {
    require_strongly_connected(g)?;
    let baseline = stationary_of(g, solver)?;
    run_against_baseline(g, graph_id, &baseline, targets, targets.phi, spec, solver)
}

/// Seed of the link sampler for a combined run at one grid point.
pub fn combined_seed(master_seed: u64, phi: f64, sample_id: u64, b: f64, alpha: f64) -> u64 {
    derive_seed(
        master_seed,
        &[
            0x006d_6978,
            phi.to_bits(),
            sample_id,
            b.to_bits(),
            alpha.to_bits(),
        ],
    )
}

struct Task {
    set: usize,
    phi: f64,
    spec: ModificationSpec,
}

/// Runs the whole grid of `config` with a pool of `workers` threads.
///
/// Per-run errors are collected as [`RunFailure`]s; only problems that make
/// every run impossible (invalid config, disconnected graph, baseline not
/// converging) abort the sweep.
pub fn sweep(
    g: &WeightedDigraph,
    graph_id: &str,
    config: &SweepConfig,
    workers: usize,
) -> Result<SweepOutcome> {
    config.validate()?;
    require_strongly_connected(g)?;
    let solver = config.solver();
    let baseline = stationary_of(g, &solver)?;

    let phis = sorted_unique(&config.phi_values);
    let strengths = sorted_unique(&config.bias_strengths);
    let alphas = sorted_unique(&config.alpha_values);
    let mut strategies = config.strategies.clone();
    strategies.sort();
    strategies.dedup();

    let mut target_sets = Vec::with_capacity(phis.len() * config.samples_per_phi);
    for &phi in &phis {
        for sample in 0..config.samples_per_phi as u64 {
            target_sets.push((phi, sample_targets(g, phi, config.master_seed, sample)?));
        }
    }

    let mut tasks = Vec::with_capacity(config.run_count());
    for &strategy in &strategies {
        for (set, (phi, targets)) in target_sets.iter().enumerate() {
            for &b in &strengths {
                let spec = match strategy {
                    Strategy::ClickBias => ModificationSpec::click_bias(b),
                    Strategy::LinkInsertion => ModificationSpec::link_insertion(b),
                    Strategy::Combined => {
                        for &alpha in &alphas {
                            let seed = combined_seed(
                                config.master_seed,
                                *phi,
                                targets.sample_id,
                                b,
                                alpha,
                            );
                            tasks.push(Task {
                                set,
                                phi: *phi,
                                spec: ModificationSpec::combined(b, alpha, seed),
                            });
                        }
                        continue;
                    }
                };
                tasks.push(Task {
                    set,
                    phi: *phi,
                    spec,
                });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Validation(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<RunRecord>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|task| {
                let targets = &target_sets[task.set].1;
                run_against_baseline(
                    g, graph_id, &baseline, targets, task.phi, &task.spec, &solver,
                )
                .map(|out| out.record)
            })
            .collect()
    });

    let mut records = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (task, result) in tasks.iter().zip(results) {
        match result {
            Ok(r) => records.push(r),
            Err(e) => {
                log::warn!("run failed: {e}");
                failures.push(RunFailure {
                    strategy: task.spec.strategy,
                    phi: task.phi,
                    sample_id: target_sets[task.set].1.sample_id,
                    b: task.spec.bias_strength,
                    alpha: task.spec.alpha,
                    error: e.to_string(),
                });
            }
        }
    }
    Ok(SweepOutcome {
        records,
        failures,
        baseline,
        target_sets,
    })
}

/// Lorenz curve of the graph's baseline stationary distribution.
pub fn lorenz_report(g: &WeightedDigraph, solver: &PowerIteration) -> Result<Vec<LorenzPoint>> {
    lorenz_curve(&stationary_of(g, solver)?.pi)
}

/// Mean of `value` over records grouped by `key`, ascending in the key.
/// Returns `(key, mean, count)` triples.
pub fn group_means(
    records: &[RunRecord],
    key: impl Fn(&RunRecord) -> f64,
    value: impl Fn(&RunRecord) -> f64,
) -> Vec<(f64, f64, usize)> {
    let mut pairs: Vec<(f64, f64)> = records.iter().map(|r| (key(r), value(r))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64, usize)> = Vec::new();
    for (k, v) in pairs {
        match out.last_mut() {
            Some(last) if last.0 == k => {
                last.1 += v;
                last.2 += 1;
            }
            _ => out.push((k, v, 1)),
        }
    }
    for entry in &mut out {
        entry.1 /= entry.2 as f64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::toy_graph;

    fn toy_target() -> TargetSet {
        TargetSet::from_members(vec![0], 4).unwrap()
    }

    #[test]
    fn toy_click_bias_record() {
        let r = run_single(
            &toy_graph(),
            "toy",
            &toy_target(),
            &ModificationSpec::click_bias(2.0),
            &PowerIteration::default(),
        )
        .unwrap();
        assert!((r.pi_t - 2.0 / 11.0).abs() < 1e-11);
        assert!((r.pi_t_prime - 4.0 / 17.0).abs() < 1e-11);
        assert!((r.tau - 22.0 / 17.0).abs() < 1e-10);
        assert_eq!((r.d_in, r.d_out, r.degree_ratio), (1.0, 1.0, 1.0));
        assert_eq!(r.l_b, 1.0);
        assert_eq!(r.alpha, None);
        assert!(r.iters_before > 0 && r.iters_after > 0);
    }

    #[test]
    fn unit_bias_changes_nothing() {
        let r = run_single(
            &toy_graph(),
            "toy",
            &toy_target(),
            &ModificationSpec::click_bias(1.0),
            &PowerIteration::default(),
        )
        .unwrap();
        assert_eq!(r.pi_t, r.pi_t_prime);
        assert_eq!(r.tau, 1.0);
    }

    #[test]
    fn full_mix_equals_click_bias() {
        let solver = PowerIteration::default();
        let g = toy_graph();
        let a = run_single(
            &g,
            "toy",
            &toy_target(),
            &ModificationSpec::click_bias(2.0),
            &solver,
        )
        .unwrap();
        let b = run_single(
            &g,
            "toy",
            &toy_target(),
            &ModificationSpec::combined(2.0, 1.0, 17),
            &solver,
        )
        .unwrap();
        assert_eq!(a.pi_t_prime, b.pi_t_prime);
        assert_eq!(a.tau, b.tau);
        assert_eq!(a.l_b, b.l_b);
        assert_eq!(a.biased_weight, b.biased_weight);
    }

    #[test]
    fn run_single_requires_strong_connectivity() {
        let g = crate::graph::load_edge_list("a\tb\nb\ta\nb\tc\n".as_bytes())
            .unwrap()
            .graph;
        let t = TargetSet::from_members(vec![0], 3).unwrap();
        assert!(matches!(
            run_single(
                &g,
                "x",
                &t,
                &ModificationSpec::click_bias(2.0),
                &PowerIteration::default()
            ),
            Err(Error::NotStronglyConnected { components: 2, .. })
        ));
    }

    #[test]
    fn sweep_cardinality_and_order() {
        let cfg = SweepConfig {
            phi_values: vec![0.1],
            bias_strengths: vec![5.0, 2.0],
            strategies: vec![Strategy::ClickBias],
            samples_per_phi: 3,
            master_seed: 1,
            ..SweepConfig::default()
        };
        let out = sweep(&toy_graph(), "toy", &cfg, 2).unwrap();
        assert_eq!(out.records.len(), 6);
        assert!(out.failures.is_empty());
        let keys: Vec<_> = out.records.iter().map(|r| (r.sample_id, r.b)).collect();
        assert_eq!(
            keys,
            vec![(0, 2.0), (0, 5.0), (1, 2.0), (1, 5.0), (2, 2.0), (2, 5.0)]
        );
    }

    #[test]
    fn sweep_collects_failures() {
        // complete digraph: the uniform start is stationary, so the baseline
        // converges in one step while every biased chain needs more
        let edges = (0..4).flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j, 1.0)));
        let g = WeightedDigraph::from_edges(4, edges, None).unwrap().0;
        let cfg = SweepConfig {
            phi_values: vec![0.25],
            bias_strengths: vec![1.0, 2.0],
            strategies: vec![Strategy::ClickBias],
            samples_per_phi: 2,
            max_iterations: 1,
            ..SweepConfig::default()
        };
        let out = sweep(&g, "k4", &cfg, 1).unwrap();
        assert_eq!(out.baseline.iterations, 1);
        assert_eq!(out.records.len(), 2);
        assert!(out.records.iter().all(|r| r.b == 1.0));
        assert_eq!(out.failures.len(), 2);
        assert!(out.failures.iter().all(|f| f.b == 2.0));
        assert!(out.failures[0].error.contains("did not converge"));
    }

    #[test]
    fn group_means_sorts_by_key() {
        let base = run_single(
            &toy_graph(),
            "toy",
            &toy_target(),
            &ModificationSpec::click_bias(2.0),
            &PowerIteration::default(),
        )
        .unwrap();
        let mut a = base.clone();
        a.b = 5.0;
        a.pi_t_prime = 0.5;
        let mut b = base.clone();
        b.b = 5.0;
        b.pi_t_prime = 0.3;
        let means = group_means(&[a, base.clone(), b], |r| r.b, |r| r.pi_t_prime);
        assert_eq!(means.len(), 2);
        assert_eq!(means[0], (2.0, base.pi_t_prime, 1));
        assert!((means[1].1 - 0.4).abs() < 1e-15);
        assert_eq!(means[1].2, 2);
    }
}
