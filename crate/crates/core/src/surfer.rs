//! Transition matrices and stationary distributions of the random surfer.

use std::io::Write;

use crate::error::{invalid, Error, Result};
use crate::format::num;
use crate::graph::WeightedDigraph;

/// Column-stochastic `P = W D⁻¹`, stored row-compressed so that `P·v`
/// is a gather over each node's in-links.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    probs: Vec<f64>,
}

impl TransitionMatrix {
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Entry `P[i][j]`: probability of stepping from `j` to `i`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.offsets[i]..self.offsets[i + 1];
        match self.cols[range.clone()].binary_search(&j) {
            Ok(k) => self.probs[range.start + k],
            Err(_) => 0.0,
        }
    }

    /// Non-zero entries of row `i` as `(j, P[i][j])`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.cols[range.clone()]
            .iter()
            .copied()
            .zip(self.probs[range].iter().copied())
    }

    /// `out = P · v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.node_count());
        assert_eq!(out.len(), self.node_count());
        for (i, slot) in out.iter_mut().enumerate() {
            let range = self.offsets[i]..self.offsets[i + 1];
            *slot = self.cols[range.clone()]
                .iter()
                .zip(&self.probs[range])
                .map(|(&j, &p)| p * v[j])
                .sum();
        }
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.node_count()];
        for (&j, &p) in self.cols.iter().zip(&self.probs) {
            sums[j] += p;
        }
        sums
    }

    /// Dense row-major copy; only sensible for small graphs.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.node_count();
        let mut dense = vec![vec![0.0; n]; n];
        for (i, row) in dense.iter_mut().enumerate() {
            for (j, p) in self.row(i) {
                row[j] = p;
            }
        }
        dense
    }
}

/// Normalizes every column of `W` by its sum.
///
/// Fails on the first node without outgoing weight.
pub fn transition_matrix(g: &WeightedDigraph) -> Result<TransitionMatrix> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    g.ensure_no_dangling()?;
    let mut offsets = vec![0usize; n + 1];
    for e in g.edges() {
        offsets[e.dst + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut cols = vec![0usize; g.edge_count()];
    let mut probs = vec![0.0; g.edge_count()];
    for src in 0..n {
        let total = g.out_weight(src);
        for (dst, w) in g.out_edges(src) {
            let k = fill[dst];
            cols[k] = src;
            probs[k] = w / total;
            fill[dst] += 1;
        }
    }
    Ok(TransitionMatrix {
        offsets,
        cols,
        probs,
    })
}

/// Power-iteration settings. The residual is the L1 distance between
/// successive iterates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIteration {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 100_000,
        }
    }
}

impl PowerIteration {
    pub fn new(tolerance: f64, max_iterations: usize) -> Result<Self> {
        let s = Self {
            tolerance,
            max_iterations,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(invalid(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryResult {
    pub pi: Vec<f64>,
    /// Matrix-vector products performed.
    pub iterations: usize,
    /// L1 change of the final step.
    pub residual: f64,
}

/// Iterates `v ← P·v` from the uniform vector until the L1 change drops
/// below the tolerance. The iterate is renormalized after every step.
///
/// No damping is applied, so a periodic chain started off its fixed point
/// ends in [`Error::NotConverged`].
pub fn stationary(p: &TransitionMatrix, solver: &PowerIteration) -> Result<StationaryResult> {
    solver.validate()?;
    let n = p.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut v = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut history = Vec::new();
    for iteration in 1..=solver.max_iterations {
        p.apply(&v, &mut next);
        let mass: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= mass);
        let residual: f64 = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut v, &mut next);
        history.push(residual);
        if residual < solver.tolerance {
            return Ok(StationaryResult {
                pi: v,
                iterations: iteration,
                residual,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: solver.max_iterations,
        residual: history.last().copied().unwrap_or(f64::NAN),
        last_iterate: v,
        residual_history: history,
    })
}

/// Convenience: stationary distribution of a graph.
pub fn stationary_of(g: &WeightedDigraph, solver: &PowerIteration) -> Result<StationaryResult> {
    stationary(&transition_matrix(g)?, solver)
}

/// One point of a Lorenz curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorenzPoint {
    /// Fraction `k/n` of nodes taken, most probable first.
    pub node_fraction: f64,
    /// Probability mass held by those nodes.
    pub cumulative_energy: f64,
}

/// Lorenz curve of a probability vector, from `(0, 0)` to `(1, 1)`.
pub fn lorenz_curve(pi: &[f64]) -> Result<Vec<LorenzPoint>> {
    if pi.is_empty() {
        return Err(invalid("empty probability vector"));
    }
    if pi.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(invalid("probabilities must be finite and non-negative"));
    }
    let total: f64 = pi.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("probabilities sum to {total}, not 1")));
    }
    let mut sorted = pi.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let n = sorted.len();
    let mut points = Vec::with_capacity(n + 1);
    points.push(LorenzPoint {
        node_fraction: 0.0,
        cumulative_energy: 0.0,
    });
    let mut acc = 0.0;
    for (k, x) in sorted.iter().enumerate() {
        acc += x;
        points.push(LorenzPoint {
            node_fraction: (k + 1) as f64 / n as f64,
            cumulative_energy: if k + 1 == n { 1.0 } else { acc.min(1.0) },
        });
    }
    Ok(points)
}

/// Writes `node,label,pi` rows in node order.
pub fn write_stationary_csv<W: Write>(g: &WeightedDigraph, pi: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "label", "pi"])?;
    for (i, &p) in pi.iter().enumerate() {
        w.write_record([i.to_string(), g.label(i), num(p)])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `node_fraction,cumulative_energy` rows.
pub fn write_lorenz_csv<W: Write>(points: &[LorenzPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node_fraction", "cumulative_energy"])?;
    for p in points {
        w.write_record([num(p.node_fraction), num(p.cumulative_energy)])?;
    }
    w.flush()?;
    Ok(())
}
