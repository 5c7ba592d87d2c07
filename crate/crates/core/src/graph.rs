//! Weighted directed graphs of websites.
//!
//! Matrix convention: `W[i][j]` is the total weight of links pointing from
//! node `j` to node `i`, so a column of `W` is the out-link profile of one
//! page. Internally the graph is stored row-compressed by *source*, which
//! makes a source's out-weight (a column sum of `W`) an `O(out-degree)`
//! lookup.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// One aggregated link `src -> dst` carrying `weight` (entry `W[dst][src]`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// Immutable sparse weighted digraph.
///
/// Invariants: every stored weight is strictly positive and finite, there is
/// at most one entry per ordered pair, and there are no self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    offsets: Vec<usize>,
    dsts: Vec<usize>,
    weights: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl WeightedDigraph {
    /// Builds a graph from raw links.
    ///
    /// Parallel links are summed, self-loops and zero weights are dropped.
    /// Returns the graph together with the number of self-loop links removed.
    pub fn from_edges<I>(n: usize, edges: I, labels: Option<Vec<String>>) -> Result<(Self, usize)>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(invalid(format!(
                    "{} labels supplied for {} nodes",
                    labels.len(),
                    n
                )));
            }
        }
        let mut triples = Vec::new();
        let mut self_loops = 0;
        for (src, dst, weight) in edges {
            if src >= n || dst >= n {
                return Err(invalid(format!(
                    "link {src}->{dst} out of range for {n} nodes"
                )));
            }
            if !weight.is_finite() || weight < 0.0 {
                return Err(invalid(format!(
                    "link {src}->{dst} has invalid weight {weight}"
                )));
            }
            if src == dst {
                self_loops += 1;
                continue;
            }
            if weight > 0.0 {
                triples.push((src, dst, weight));
            }
        }
        // stable sort keeps summation order equal to input order per pair
        triples.sort_by_key(|&(s, d, _)| (s, d));

        let mut offsets = vec![0usize; n + 1];
        let mut dsts: Vec<usize> = Vec::with_capacity(triples.len());
        let mut weights: Vec<f64> = Vec::with_capacity(triples.len());
        let mut last: Option<(usize, usize)> = None;
        for (s, d, w) in triples {
            if last == Some((s, d)) {
                *weights.last_mut().expect("entry exists") += w;
            } else {
                dsts.push(d);
                weights.push(w);
                offsets[s + 1] += 1;
                last = Some((s, d));
            }
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Ok((
            Self {
                offsets,
                dsts,
                weights,
                labels,
            },
            self_loops,
        ))
    }

    /// Graph with no nodes.
    pub fn empty() -> Self {
        Self {
            offsets: vec![0],
            dsts: Vec::new(),
            weights: Vec::new(),
            labels: None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of distinct (aggregated) links.
    pub fn edge_count(&self) -> usize {
        self.dsts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_count() == 0
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// External label of `node`, or its index when the graph is unlabeled.
    pub fn label(&self, node: usize) -> String {
        match &self.labels {
            Some(labels) => labels[node].clone(),
            None => node.to_string(),
        }
    }

    /// Index of the node carrying `label`. Unlabeled graphs resolve decimal indices.
    pub fn find_label(&self, label: &str) -> Option<usize> {
        match &self.labels {
            Some(labels) => labels.iter().position(|l| l == label),
            None => label
                .parse()
                .ok()
                .filter(|&i: &usize| i < self.node_count()),
        }
    }

    /// Out-links of `src` as `(dst, weight)`, ordered by destination.
    pub fn out_edges(&self, src: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[src]..self.offsets[src + 1];
        self.dsts[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn out_degree(&self, src: usize) -> usize {
        self.offsets[src + 1] - self.offsets[src]
    }

    /// Total out-weight of `src`, i.e. column sum `Σ_i W[i][src]`.
    pub fn out_weight(&self, src: usize) -> f64 {
        self.weights[self.offsets[src]..self.offsets[src + 1]]
            .iter()
            .sum()
    }

    /// Entry `W[dst][src]`, zero when absent.
    pub fn weight(&self, src: usize, dst: usize) -> f64 {
        let range = self.offsets[src]..self.offsets[src + 1];
        match self.dsts[range.clone()].binary_search(&dst) {
            Ok(k) => self.weights[range.start + k],
            Err(_) => 0.0,
        }
    }

    /// All links in source-major, destination-minor order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.node_count()).flat_map(move |src| {
            self.out_edges(src)
                .map(move |(dst, weight)| Edge { src, dst, weight })
        })
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Same structure with every weight replaced by `f(edge)`.
    ///
    /// Entries mapped to zero are kept out of the result.
    pub fn map_weights(&self, mut f: impl FnMut(Edge) -> f64) -> Result<Self> {
        let edges: Vec<_> = self.edges().map(|e| (e.src, e.dst, f(e))).collect();
        Ok(Self::from_edges(self.node_count(), edges, self.labels.clone())?.0)
    }

    /// Copy of the graph with extra weight added on the given `(src, dst, weight)` pairs.
    pub fn with_added(&self, additions: &[(usize, usize, f64)]) -> Result<Self> {
        let edges = self
            .edges()
            .map(|e| (e.src, e.dst, e.weight))
            .chain(additions.iter().copied());
        let (g, self_loops) = Self::from_edges(self.node_count(), edges, self.labels.clone())?;
        if self_loops > 0 {
            return Err(Error::Consistency(format!("{self_loops} self-loops added")));
        }
        Ok(g)
    }

    /// Subgraph induced by `nodes` (given in the order they should be numbered).
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<(Self, Vec<Option<usize>>)> {
        let mut mapping = vec![None; self.node_count()];
        for (new, &old) in nodes.iter().enumerate() {
            mapping[old] = Some(new);
        }
        let edges: Vec<_> = self
            .edges()
            .filter_map(|e| Some((mapping[e.src]?, mapping[e.dst]?, e.weight)))
            .collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| nodes.iter().map(|&i| l[i].clone()).collect());
        let (g, _) = Self::from_edges(nodes.len(), edges, labels)?;
        Ok((g, mapping))
    }

    /// Weighted in-degree `Σ_j W[i][j]` of every node.
    pub fn in_weights(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.node_count()];
        for e in self.edges() {
            acc[e.dst] += e.weight;
        }
        acc
    }

    /// Weighted out-degree of every node.
    pub fn out_weights(&self) -> Vec<f64> {
        (0..self.node_count()).map(|s| self.out_weight(s)).collect()
    }

    /// Returns an error naming the first node with zero out-weight.
    pub fn ensure_no_dangling(&self) -> Result<()> {
        match (0..self.node_count()).find(|&s| self.out_degree(s) == 0) {
            Some(node) => Err(Error::DanglingNode {
                node,
                label: self.label(node),
            }),
            None => Ok(()),
        }
    }
}

/// Result of reading an edge list.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: WeightedDigraph,
    /// Self-loop lines that were discarded.
    pub self_loops: usize,
}

/// Reads `source<TAB>destination[<TAB>weight]` lines.
///
/// Lines starting with `#` and blank lines are skipped. Node identifiers are
/// arbitrary strings numbered in order of first appearance.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<LoadedGraph> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut raw = Vec::new();
    let mut intern = |name: &str| -> usize {
        if let Some(&i) = index.get(name) {
            return i;
        }
        let i = labels.len();
        index.insert(name.to_owned(), i);
        labels.push(name.to_owned());
        i
    };

    for (k, line) in reader.lines().enumerate() {
        let lineno = k + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let parse_err = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        let weight = match fields.len() {
            2 => 1.0,
            3 => {
                let w: f64 = fields[2]
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(format!("weight {:?} is not a number", fields[2])))?;
                if !w.is_finite() || w < 0.0 {
                    return Err(parse_err(format!(
                        "weight {w} must be finite and non-negative"
                    )));
                }
                w
            }
            count => {
                return Err(parse_err(format!(
                    "expected 2 or 3 tab-separated fields, found {count}"
                )))
            }
        };
        let (src, dst) = (fields[0], fields[1]);
        if src.is_empty() || dst.is_empty() {
            return Err(parse_err("empty node identifier".into()));
        }
        let s = intern(src);
        let d = intern(dst);
        raw.push((s, d, weight));
    }

    let n = labels.len();
    let (graph, self_loops) = WeightedDigraph::from_edges(n, raw, Some(labels))?;
    if self_loops > 0 {
        log::warn!("dropped {self_loops} self-loop link(s)");
    }
    Ok(LoadedGraph { graph, self_loops })
}

/// Writes the graph as a tab-separated edge list using node labels.
///
/// Weights use the shortest representation that reads back to the same value.
pub fn write_edge_list<W: Write>(g: &WeightedDigraph, mut out: W) -> Result<()> {
    for e in g.edges() {
        writeln!(out, "{}\t{}\t{}", g.label(e.src), g.label(e.dst), e.weight)?;
    }
    out.flush()?;
    Ok(())
}

/// Weighted degree profile of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSummary {
    pub in_degree: Vec<f64>,
    pub out_degree: Vec<f64>,
    /// Total weight over node count; equals both mean in- and mean out-degree.
    pub average_degree: f64,
}

pub fn degree_summary(g: &WeightedDigraph) -> Result<DegreeSummary> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(DegreeSummary {
        in_degree: g.in_weights(),
        out_degree: g.out_weights(),
        average_degree: g.total_weight() / g.node_count() as f64,
    })
}

/// Strongly connected components, each sorted ascending, in discovery order.
///
/// Iterative Tarjan; safe on deep graphs.
pub fn strongly_connected_components(g: &WeightedDigraph) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = g.node_count();
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next_index = 0;
    // (node, position in its out-edge list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos == 0 && index[v] == UNVISITED {
                index[v] = next_index;
                lowlink[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            let start = g.offsets[v];
            let end = g.offsets[v + 1];
            if start + *pos < end {
                let w = g.dsts[start + *pos];
                *pos += 1;
                if index[w] == UNVISITED {
                    call.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                lowlink[parent] = lowlink[parent].min(lowlink[v]);
            }
            if lowlink[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                component.sort_unstable();
                components.push(component);
            }
        }
    }
    components
}

pub fn is_strongly_connected(g: &WeightedDigraph) -> bool {
    g.node_count() > 0 && strongly_connected_components(g).len() == 1
}

/// Largest strongly connected component, as an induced subgraph plus the
/// old-to-new index mapping (`None` for dropped nodes).
///
/// Ties in size go to the component holding the lowest original index.
/// Retained nodes keep their relative order.
pub fn largest_scc(g: &WeightedDigraph) -> Result<(WeightedDigraph, Vec<Option<usize>>)> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let components = strongly_connected_components(g);
    let best = components
        .iter()
        .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
        .expect("non-empty graph has a component");
    g.induced_subgraph(best)
}

/// Provenance of a largest-SCC reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SccProvenance {
    pub original_nodes: usize,
    pub original_edges: usize,
    pub retained_nodes: usize,
    pub components: usize,
}

/// Sidecar written next to every exported graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphMetadata {
    pub tool_version: String,
    pub nodes: usize,
    pub edges: usize,
    pub total_weight: f64,
    pub synthetic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scc: Option<SccProvenance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<serde_json::Value>,
}

impl GraphMetadata {
    pub fn describe(g: &WeightedDigraph) -> Self {
        Self {
            tool_version: crate::VERSION.to_owned(),
            nodes: g.node_count(),
            edges: g.edge_count(),
            total_weight: g.total_weight(),
            synthetic: false,
            scc: None,
            extra: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::TOY_EDGE_LIST as T4;

    fn load(text: &str) -> WeightedDigraph {
        load_edge_list(text.as_bytes()).unwrap().graph
    }

    fn dense(g: &WeightedDigraph) -> Vec<Vec<f64>> {
        let n = g.node_count();
        let mut w = vec![vec![0.0; n]; n];
        for e in g.edges() {
            w[e.dst][e.src] = e.weight;
        }
        w
    }

    #[test]
    fn labels_follow_first_appearance() {
        let g = load(T4);
        assert_eq!(g.labels().unwrap(), ["1", "4", "2", "3"]);
        assert_eq!(g.weight(0, 1), 1.0);
        assert_eq!(g.weight(2, 0), 1.0);
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn toy_graph_matches_figure_matrix() {
        let g = crate::fixtures::toy_graph();
        assert_eq!(g.node_count(), 4);
        let expected = vec![
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 1.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![1.0, 0.0, 1.0, 0.0],
        ];
        assert_eq!(dense(&g), expected);
        assert_eq!(g.labels().unwrap(), ["1", "2", "3", "4"]);
    }

    #[test]
    fn empty_stream() {
        let loaded = load_edge_list("".as_bytes()).unwrap();
        assert_eq!(loaded.graph.node_count(), 0);
        assert_eq!(loaded.graph.edge_count(), 0);
    }

    #[test]
    fn parallel_links_are_summed() {
        let g = load("a\tb\na\tb\n");
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight(0, 1), 2.0);
    }

    #[test]
    fn comments_weights_and_self_loops() {
        let loaded = load_edge_list("# header\nx\ty\t2.5\ny\ty\nz\tx\t0.5\n".as_bytes()).unwrap();
        assert_eq!(loaded.self_loops, 1);
        let g = loaded.graph;
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.weight(0, 1), 2.5);
        assert_eq!(g.weight(2, 0), 0.5);
        assert_eq!(g.weight(1, 1), 0.0);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        for (text, line) in [
            ("a\tb\nc\n", 2),
            ("a\tb\tx\n", 1),
            ("# c\na\tb\t-1\n", 2),
            ("a\tb\t1\t2\n", 1),
            ("a\tb\tNaN\n", 1),
        ] {
            match load_edge_list(text.as_bytes()) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn degree_summary_of_toy_graph() {
        let d = degree_summary(&crate::fixtures::toy_graph()).unwrap();
        assert_eq!(d.out_degree, vec![1.0, 2.0, 2.0, 1.0]);
        assert_eq!(d.in_degree, vec![1.0, 2.0, 1.0, 2.0]);
        assert_eq!(d.average_degree, 1.5);
    }

    #[test]
    fn degree_summary_two_cycle_and_reweighted() {
        let d = degree_summary(&load("a\tb\nb\ta\n")).unwrap();
        assert_eq!(d.in_degree, vec![1.0, 1.0]);
        assert_eq!(d.out_degree, vec![1.0, 1.0]);
        assert_eq!(d.average_degree, 1.0);

        let g = load("1\t4\n2\t1\t3\n2\t3\n3\t2\n3\t4\n4\t2\n");
        let d = degree_summary(&g).unwrap();
        assert_eq!(d.in_degree[g.find_label("1").unwrap()], 3.0);
        assert_eq!(d.out_degree[g.find_label("2").unwrap()], 4.0);
        assert_eq!(d.average_degree, 2.0);
    }

    #[test]
    fn degree_summary_rejects_empty() {
        assert!(matches!(
            degree_summary(&WeightedDigraph::empty()),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn scc_of_toy_graph_is_identity() {
        let g = load(T4);
        let (h, mapping) = largest_scc(&g).unwrap();
        assert_eq!(h, g);
        assert_eq!(mapping, vec![Some(0), Some(1), Some(2), Some(3)]);
    }

    #[test]
    fn scc_drops_unreachable_tail() {
        let g = load(&format!("{T4}1\t5\n"));
        let (h, mapping) = largest_scc(&g).unwrap();
        assert_eq!(h.node_count(), 4);
        assert_eq!(mapping[4], None);
        assert_eq!(dense(&h), dense(&load(T4)));
    }

    #[test]
    fn scc_tie_prefers_lowest_index() {
        let g = load("d\te\ne\tf\nf\td\na\tb\nb\tc\nc\ta\na\td\n");
        // labels in first-appearance order: d,e,f,a,b,c
        let (h, mapping) = largest_scc(&g).unwrap();
        assert_eq!(h.node_count(), 3);
        assert_eq!(h.labels().unwrap(), ["d", "e", "f"]);
        assert_eq!(&mapping[3..], &[None, None, None]);

        let g = load("a\tb\nb\tc\nc\ta\na\td\nd\te\ne\tf\nf\td\n");
        let (h, _) = largest_scc(&g).unwrap();
        assert_eq!(h.labels().unwrap(), ["a", "b", "c"]);
    }

    #[test]
    fn scc_rejects_empty() {
        assert!(matches!(
            largest_scc(&WeightedDigraph::empty()),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn writer_round_trips_labels_and_weights() {
        let g = load("a\tb\t0.1\nb\tc\t3\nc\ta\t1e-7\na\tc\n");
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        assert_eq!(load(std::str::from_utf8(&buf).unwrap()), g);
    }
}
