//! Shared fixtures and the dense linear-algebra oracle.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfsteer_core::{TargetSet, WeightedDigraph};

/// Strongly connected, aperiodic digraph: a cycle over a random permutation,
/// one chord closing a cycle of length `n − 1`, one random extra out-link per
/// node and up to `n` further random links.
///
/// With `integer_weights` every weight is a small integer, which keeps sums
/// exact in floating point.
pub fn random_strong_graph<R: Rng>(
    rng: &mut R,
    n: usize,
    integer_weights: bool,
) -> WeightedDigraph {
    assert!(n >= 3);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let weight = |rng: &mut R| {
        if integer_weights {
            f64::from(rng.random_range(1u8..=9))
        } else {
            rng.random_range(0.05..10.0)
        }
    };
    let mut edges = Vec::new();
    for k in 0..n {
        edges.push((perm[k], perm[(k + 1) % n], weight(rng)));
    }
    edges.push((perm[0], perm[2], weight(rng)));
    for s in 0..n {
        let d = (s + rng.random_range(1..n)) % n;
        edges.push((s, d, weight(rng)));
    }
    let extra = rng.random_range(0..=n);
    for _ in 0..extra {
        let (s, d) = (rng.random_range(0..n), rng.random_range(0..n));
        if s != d {
            edges.push((s, d, weight(rng)));
        }
    }
    WeightedDigraph::from_edges(n, edges, None).unwrap().0
}

/// Random non-empty target set.
pub fn random_targets<R: Rng>(rng: &mut R, n: usize) -> TargetSet {
    let k = rng.random_range(1..=n.div_ceil(2));
    let members = rand::seq::index::sample(rng, n, k).into_vec();
    TargetSet::from_members(members, n).unwrap()
}

/// Proptest strategy over [`random_strong_graph`] with integer weights.
///
/// Cases are drawn from a seed so that shrinking cannot assemble the
/// near-periodic chains on which power iteration legitimately stalls.
pub fn arb_strong_graph(max_n: usize) -> impl Strategy<Value = WeightedDigraph> {
    (3..=max_n, any::<u64>())
        .prop_map(|(n, seed)| random_strong_graph(&mut ChaCha8Rng::seed_from_u64(seed), n, true))
}

/// A graph together with a non-empty target set on it.
pub fn arb_graph_and_targets(max_n: usize) -> impl Strategy<Value = (WeightedDigraph, TargetSet)> {
    (3..=max_n, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_strong_graph(&mut rng, n, true);
        let t = random_targets(&mut rng, n);
        (g, t)
    })
}

/// Dense column-stochastic matrix `P = W D⁻¹`, built independently of the
/// library's sparse transition matrix.
pub fn dense_transition(g: &WeightedDigraph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut w = DMatrix::<f64>::zeros(n, n);
    for e in g.edges() {
        w[(e.dst, e.src)] += e.weight;
    }
    for j in 0..n {
        let d: f64 = w.column(j).sum();
        for i in 0..n {
            w[(i, j)] /= d;
        }
    }
    w
}

/// Solves `(P − I)π = 0`, `Σπ = 1` by LU decomposition.
pub fn dense_stationary(g: &WeightedDigraph) -> Vec<f64> {
    let n = g.node_count();
    let mut a = dense_transition(g) - DMatrix::<f64>::identity(n, n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(n);
    rhs[n - 1] = 1.0;
    let pi = a.lu().solve(&rhs).expect("stationary system is regular");
    pi.iter().copied().collect()
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Graph with explicit labels from `(src, dst)` pairs on nodes `0..n`.
pub fn graph_from_pairs(n: usize, pairs: &[(usize, usize)]) -> WeightedDigraph {
    let edges = pairs.iter().map(|&(s, d)| (s, d, 1.0));
    WeightedDigraph::from_edges(n, edges, None).unwrap().0
}

/// Proptest config with `cases` cases and no failure-persistence files.
pub fn cases(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}
