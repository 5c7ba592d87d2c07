//! Link modifications that steer the random surfer toward target nodes.
//!
//! All operations are pure: they return a new [`WeightedDigraph`] and never
//! touch their input. Three strategies share one currency, the *link budget*
//! `l(b)`, which is the total weight a modification adds to `W`:
//!
//! * **click bias** multiplies every link into a target by the bias strength
//!   `b`, adding `(b − 1)·d⁻` where `d⁻` is the weighted in-degree of the
//!   target set;
//! * **link insertion** spends the same budget as unit-weight links from the
//!   most visited pages to the targets;
//! * **combined** spends a fraction `α` of the budget on biasing a random,
//!   visit-weighted subset of the links into targets and inserts the rest.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::WeightedDigraph;
use crate::seed::stream;
use crate::targets::TargetSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    ClickBias,
    LinkInsertion,
    Combined,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::ClickBias,
        Strategy::LinkInsertion,
        Strategy::Combined,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::ClickBias => "click_bias",
            Strategy::LinkInsertion => "link_insertion",
            Strategy::Combined => "combined",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "bias" | "click_bias" | "clickbias" => Ok(Strategy::ClickBias),
            "insert" | "insertion" | "link_insertion" | "linkinsertion" => {
                Ok(Strategy::LinkInsertion)
            }
            "combined" | "combine" | "mix" => Ok(Strategy::Combined),
            other => Err(invalid(format!("unknown strategy {other:?}"))),
        }
    }
}

/// What to do to the graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModificationSpec {
    pub strategy: Strategy,
    /// Bias strength `b ≥ 1`; for insertion it sizes the budget.
    pub bias_strength: f64,
    /// Mixing factor, only for [`Strategy::Combined`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Sampling seed, only for [`Strategy::Combined`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ModificationSpec {
    pub fn click_bias(b: f64) -> Self {
        Self {
            strategy: Strategy::ClickBias,
            bias_strength: b,
            alpha: None,
            seed: None,
        }
    }

    pub fn link_insertion(b: f64) -> Self {
        Self {
            strategy: Strategy::LinkInsertion,
            bias_strength: b,
            alpha: None,
            seed: None,
        }
    }

    pub fn combined(b: f64, alpha: f64, seed: u64) -> Self {
        Self {
            strategy: Strategy::Combined,
            bias_strength: b,
            alpha: Some(alpha),
            seed: Some(seed),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_strength(self.bias_strength)?;
        match (self.strategy, self.alpha) {
            (Strategy::Combined, Some(a)) => check_alpha(a),
            (Strategy::Combined, None) => Err(invalid("combined strategy needs alpha")),
            (_, Some(_)) => Err(invalid("alpha only applies to the combined strategy")),
            (_, None) => Ok(()),
        }
    }
}

fn check_strength(b: f64) -> Result<()> {
    if b.is_finite() && b >= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "bias strength must be a finite value >= 1, got {b}"
        )))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(invalid(format!("alpha must lie in [0, 1], got {alpha}")))
    }
}

/// Where the added weight went.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LinkBudget {
    /// `l(b)`: weight the modification is entitled to add.
    pub total_weight: f64,
    /// Unit links actually inserted.
    pub inserted_count: usize,
    /// Weight added by biasing existing links.
    pub biased_weight: f64,
    /// Existing links that were biased.
    pub biased_links: usize,
    /// Inserted links that landed on a pair already carrying weight, either
    /// from the input graph or from an earlier pass over the sources.
    pub parallel_inserted: usize,
}

/// Weighted in-degree of the target set, `Σ_ij (diag(t)·W)_ij`.
pub(crate) fn target_in_weight(g: &WeightedDigraph, mask: &[bool]) -> f64 {
    g.edges().filter(|e| mask[e.dst]).map(|e| e.weight).sum()
}

/// `l(b) = (b − 1) · d⁻`: the weight click bias adds for this target set.
pub fn bias_budget(g: &WeightedDigraph, targets: &TargetSet, b: f64) -> Result<f64> {
    check_strength(b)?;
    check_targets(g, targets)?;
    Ok((b - 1.0) * target_in_weight(g, &targets.mask()))
}

fn check_targets(g: &WeightedDigraph, targets: &TargetSet) -> Result<()> {
    if targets.node_count() != g.node_count() {
        return Err(invalid(format!(
            "target set built for {} nodes, graph has {}",
            targets.node_count(),
            g.node_count()
        )));
    }
    Ok(())
}

/// `W′ = B·W` with `B = I + (b − 1)·diag(t)`: every link into a target is
/// multiplied by `b`.
pub fn click_bias(g: &WeightedDigraph, targets: &TargetSet, b: f64) -> Result<WeightedDigraph> {
    check_strength(b)?;
    check_targets(g, targets)?;
    let mask = targets.mask();
    g.map_weights(|e| if mask[e.dst] { e.weight * b } else { e.weight })
}

/// `Σ W′ − Σ W`.
pub fn link_budget(original: &WeightedDigraph, modified: &WeightedDigraph) -> Result<f64> {
    let added = modified.total_weight() - original.total_weight();
    if added < 0.0 {
        return Err(Error::Consistency(format!(
            "modified graph lost weight ({added})"
        )));
    }
    Ok(added)
}

/// Nodes by descending probability, ties by ascending index.
fn rank_by_probability(pi: &[f64], nodes: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut ranked: Vec<usize> = nodes.into_iter().collect();
    ranked.sort_by(|&a, &b| pi[b].total_cmp(&pi[a]).then(a.cmp(&b)));
    ranked
}

/// Inserts `budget_count` unit links toward the targets. A zero budget
/// returns the graph unchanged.
///
/// Sources are the `⌈budget / |targets|⌉` nodes with the highest original
/// stationary probability. Each source links to the targets in order of
/// their original probability (self pairs skipped and not counted) until the
/// budget is spent; if every source/target pair has been used the source list
/// is walked again, stacking parallel weight. Pairs that already carry a link
/// receive additional weight.
pub fn insert_links(
    g: &WeightedDigraph,
    targets: &TargetSet,
    pi_original: &[f64],
    budget_count: usize,
) -> Result<(WeightedDigraph, LinkBudget)> {
    check_targets(g, targets)?;
    let n = g.node_count();
    if pi_original.len() != n {
        return Err(invalid(format!(
            "stationary vector has {} entries, graph has {n} nodes",
            pi_original.len()
        )));
    }
    if budget_count == 0 {
        return Ok((g.clone(), LinkBudget::default()));
    }
    let ranked = rank_by_probability(pi_original, 0..n);
    let target_order = rank_by_probability(pi_original, targets.members().iter().copied());
    let mut source_count = budget_count.div_ceil(targets.len()).min(n);
    // A lone target that is also the only source has no usable pair.
    if source_count == 1 && targets.len() == 1 && ranked[0] == target_order[0] {
        source_count = 2;
    }
    if source_count > n {
        return Err(invalid(
            "no source/target pair available without a self-loop",
        ));
    }

    let pairs: Vec<(usize, usize)> = ranked[..source_count]
        .iter()
        .flat_map(|&s| target_order.iter().map(move |&t| (s, t)))
        .filter(|&(s, t)| s != t)
        .collect();
    let rounds = budget_count / pairs.len();
    let remainder = budget_count % pairs.len();

    let mut additions = Vec::with_capacity(pairs.len().min(budget_count));
    let mut parallel = 0;
    for (k, &(s, t)) in pairs.iter().enumerate() {
        let count = rounds + usize::from(k < remainder);
        if count == 0 {
            break;
        }
        parallel += if g.weight(s, t) > 0.0 {
            count
        } else {
            count - 1
        };
        additions.push((s, t, count as f64));
    }
    let modified = g.with_added(&additions)?;
    Ok((
        modified,
        LinkBudget {
            total_weight: budget_count as f64,
            inserted_count: budget_count,
            biased_weight: 0.0,
            biased_links: 0,
            parallel_inserted: parallel,
        },
    ))
}

/// An existing link into a target together with its selection probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EligibleLink {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
    pub probability: f64,
}

/// `L = diag(π)·diag(t)·W·diag(π)`, normalized to sum to one.
///
/// The support is exactly the existing links into targets; links are listed
/// in source-major order.
pub fn eligible_link_distribution(
    g: &WeightedDigraph,
    targets: &TargetSet,
    pi: &[f64],
) -> Result<Vec<EligibleLink>> {
    check_targets(g, targets)?;
    if pi.len() != g.node_count() {
        return Err(invalid("stationary vector length does not match the graph"));
    }
    let mask = targets.mask();
    let mut links: Vec<EligibleLink> = g
        .edges()
        .filter(|e| mask[e.dst])
        .map(|e| EligibleLink {
            src: e.src,
            dst: e.dst,
            weight: e.weight,
            probability: pi[e.dst] * e.weight * pi[e.src],
        })
        .collect();
    let total: f64 = links.iter().map(|l| l.probability).sum();
    if links.is_empty() || total.is_nan() || total <= 0.0 {
        return Err(Error::EmptySupport);
    }
    for l in &mut links {
        l.probability /= total;
    }
    Ok(links)
}

/// Order in which links would be drawn one by one without replacement, each
/// draw proportional to the remaining probabilities.
///
/// Uses exponential races: link `k` gets key `E_k / p_k` with `E_k ~ Exp(1)`,
/// and ascending keys reproduce sequential renormalized sampling.
pub fn sampling_order<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> Vec<usize> {
    let keys: Vec<f64> = probabilities
        .iter()
        .map(|&p| {
            let u = 1.0 - rng.random::<f64>();
            -u.ln() / p
        })
        .collect();
    let mut order: Vec<usize> = (0..probabilities.len()).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(a.cmp(&b)));
    order
}

/// Mixes click bias and link insertion under one budget `l(b) = (b − 1)·d⁻`.
///
/// Bias phase: eligible links are drawn without replacement from
/// [`eligible_link_distribution`]; a drawn link is multiplied by `b` if its
/// whole cost `(b − 1)·w` fits into what is left of `α·l(b)`, otherwise the
/// phase ends. Insertion phase: whatever weight was not spent on biasing is
/// rounded to a link count and handed to [`insert_links`] on the biased graph,
/// still ranking nodes by the original `π`.
pub fn combine<R: Rng + ?Sized>(
    g: &WeightedDigraph,
    targets: &TargetSet,
    pi: &[f64],
    b: f64,
    alpha: f64,
    rng: &mut R,
) -> Result<(WeightedDigraph, LinkBudget)> {
    check_strength(b)?;
    check_alpha(alpha)?;
    let links = eligible_link_distribution(g, targets, pi)?;
    let in_weight: f64 = target_in_weight(g, &targets.mask());
    let total = (b - 1.0) * in_weight;
    let bias_allowance = alpha * total;
    let slack = 1e-9 * total;

    let probabilities: Vec<f64> = links.iter().map(|l| l.probability).collect();
    let order = sampling_order(&probabilities, rng);
    let mut chosen = vec![false; links.len()];
    let mut spent = 0.0;
    let mut biased_links = 0;
    if alpha > 0.0 {
        for k in order {
            let cost = (b - 1.0) * links[k].weight;
            if spent + cost > bias_allowance + slack {
                break;
            }
            spent += cost;
            chosen[k] = true;
            biased_links += 1;
        }
    }

    // links are in source-major order, the same order map_weights visits edges
    let mut next = 0;
    let biased = g.map_weights(|e| {
        if next < links.len() && links[next].src == e.src && links[next].dst == e.dst {
            let hit = chosen[next];
            next += 1;
            if hit {
                return e.weight * b;
            }
        }
        e.weight
    })?;

    let leftover = (total - spent).max(0.0);
    let insert_count = leftover.round() as usize;
    let (modified, inserted) = if insert_count >= 1 {
        insert_links(&biased, targets, pi, insert_count)?
    } else {
        (biased, LinkBudget::default())
    };
    Ok((
        modified,
        LinkBudget {
            total_weight: total,
            inserted_count: inserted.inserted_count,
            biased_weight: spent,
            biased_links,
            parallel_inserted: inserted.parallel_inserted,
        },
    ))
}

/// Applies `spec` to `g`. `pi_original` is the stationary vector of `g`.
///
/// Link insertion spends `round((b − 1)·d⁻)` unit links; a zero budget
/// leaves the graph unchanged.
pub fn apply(
    g: &WeightedDigraph,
    targets: &TargetSet,
    pi_original: &[f64],
    spec: &ModificationSpec,
) -> Result<(WeightedDigraph, LinkBudget)> {
    spec.validate()?;
    let b = spec.bias_strength;
    match spec.strategy {
        Strategy::ClickBias => {
            let modified = click_bias(g, targets, b)?;
            let added = link_budget(g, &modified)?;
            let biased_links = if b > 1.0 {
                let mask = targets.mask();
                g.edges().filter(|e| mask[e.dst]).count()
            } else {
                0
            };
            Ok((
                modified,
                LinkBudget {
                    total_weight: added,
                    biased_weight: added,
                    biased_links,
                    ..LinkBudget::default()
                },
            ))
        }
        Strategy::LinkInsertion => {
            let total = bias_budget(g, targets, b)?;
            let count = total.round() as usize;
            if count == 0 {
                return Ok((g.clone(), LinkBudget::default()));
            }
            let (modified, mut budget) = insert_links(g, targets, pi_original, count)?;
            budget.total_weight = total;
            Ok((modified, budget))
        }
        Strategy::Combined => {
            let alpha = spec.alpha.expect("validated");
            let mut rng = stream(spec.seed.unwrap_or(0));
            combine(g, targets, pi_original, b, alpha, &mut rng)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cycle, toy_graph};
    use crate::surfer::{stationary_of, transition_matrix, PowerIteration};

    const TOY_PI: [f64; 4] = [2.0 / 11.0, 4.0 / 11.0, 2.0 / 11.0, 3.0 / 11.0];

    fn targets(members: &[usize], n: usize) -> TargetSet {
        TargetSet::from_members(members.to_vec(), n).unwrap()
    }

    fn pi_of(g: &WeightedDigraph) -> Vec<f64> {
        stationary_of(g, &PowerIteration::default()).unwrap().pi
    }

    #[test]
    fn strategy_names_parse() {
        for s in Strategy::ALL {
            assert_eq!(s.as_str().parse::<Strategy>().unwrap(), s);
        }
        assert_eq!("bias".parse::<Strategy>().unwrap(), Strategy::ClickBias);
        assert_eq!(
            "insert".parse::<Strategy>().unwrap(),
            Strategy::LinkInsertion
        );
        assert!("delete".parse::<Strategy>().is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(ModificationSpec::click_bias(0.5).validate().is_err());
        assert!(ModificationSpec::click_bias(f64::NAN).validate().is_err());
        assert!(ModificationSpec::combined(2.0, 1.5, 0).validate().is_err());
        let mut spec = ModificationSpec::click_bias(2.0);
        spec.alpha = Some(0.5);
        assert!(spec.validate().is_err());
        assert!(ModificationSpec::combined(2.0, 0.5, 0).validate().is_ok());
    }

    #[test]
    fn click_bias_on_toy_graph() {
        let g = toy_graph();
        let t = targets(&[0], 4);
        let biased = click_bias(&g, &t, 2.0).unwrap();
        assert_eq!(biased.weight(1, 0), 2.0);
        for e in g.edges().filter(|e| e.dst != 0) {
            assert_eq!(biased.weight(e.src, e.dst), e.weight);
        }
        assert_eq!(g, toy_graph(), "input untouched");

        let p = transition_matrix(&biased).unwrap();
        assert!((p.get(0, 1) - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.get(2, 1) - 1.0 / 3.0).abs() < 1e-15);

        let pi = pi_of(&biased);
        let exact = [4.0 / 17.0, 6.0 / 17.0, 2.0 / 17.0, 5.0 / 17.0];
        for (a, b) in pi.iter().zip(exact) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn unit_bias_is_identity() {
        let g = toy_graph();
        assert_eq!(click_bias(&g, &targets(&[0, 2], 4), 1.0).unwrap(), g);
        assert!(click_bias(&g, &targets(&[0], 4), 0.9).is_err());
    }

    #[test]
    fn budgets_on_toy_graph() {
        let g = toy_graph();
        let one = targets(&[0], 4);
        assert_eq!(
            link_budget(&g, &click_bias(&g, &one, 2.0).unwrap()).unwrap(),
            1.0
        );
        assert_eq!(
            link_budget(&g, &click_bias(&g, &one, 1.0).unwrap()).unwrap(),
            0.0
        );
        let two = targets(&[0, 1], 4);
        assert_eq!(
            link_budget(&g, &click_bias(&g, &two, 5.0).unwrap()).unwrap(),
            12.0
        );
        assert_eq!(bias_budget(&g, &two, 5.0).unwrap(), 12.0);
        assert!(link_budget(&click_bias(&g, &two, 5.0).unwrap(), &g).is_err());
    }

    #[test]
    fn insertion_uses_most_visited_source() {
        let g = toy_graph();
        let (modified, budget) = insert_links(&g, &targets(&[0], 4), &TOY_PI, 1).unwrap();
        assert_eq!(modified.weight(1, 0), 2.0);
        assert_eq!(modified.total_weight(), 7.0);
        assert_eq!(budget.inserted_count, 1);
        assert_eq!(budget.parallel_inserted, 1);
    }

    #[test]
    fn insertion_skips_self_pairs_and_wraps() {
        // sources by π: 2, 4, 1, 3 (labels); 1→1 skipped, then 2→1 again
        let g = toy_graph();
        let (modified, budget) = insert_links(&g, &targets(&[0], 4), &TOY_PI, 4).unwrap();
        assert_eq!(modified.weight(1, 0), 3.0);
        assert_eq!(modified.weight(3, 0), 1.0);
        assert_eq!(modified.weight(2, 0), 1.0);
        assert_eq!(modified.weight(0, 0), 0.0);
        assert_eq!(budget.parallel_inserted, 2);
        assert_eq!(link_budget(&g, &modified).unwrap(), 4.0);
    }

    #[test]
    fn insertion_into_whole_cycle() {
        let g = cycle(3);
        let pi = pi_of(&g);
        let (modified, _) = insert_links(&g, &targets(&[0, 1, 2], 3), &pi, 3).unwrap();
        // single source (node 0, ties by index) links to 1 and 2, then 1 again
        assert_eq!(modified.weight(0, 1), 3.0);
        assert_eq!(modified.weight(0, 2), 1.0);
        assert!(modified.edges().all(|e| e.src != e.dst));
        assert_eq!(link_budget(&g, &modified).unwrap(), 3.0);
    }

    #[test]
    fn insertion_when_top_node_is_the_only_target() {
        let g = toy_graph();
        let (modified, _) = insert_links(&g, &targets(&[1], 4), &TOY_PI, 1).unwrap();
        // node "2" is both the top source and the target; next source is "4"
        assert_eq!(modified.weight(3, 1), 2.0);
    }

    #[test]
    fn zero_budget_insertion_is_identity() {
        let (same, budget) = insert_links(&toy_graph(), &targets(&[0], 4), &TOY_PI, 0).unwrap();
        assert_eq!(same, toy_graph());
        assert_eq!(budget, LinkBudget::default());
    }

    #[test]
    fn displayed_insertion_matrix() {
        let g = toy_graph();
        let inserted = g.with_added(&[(3, 0, 1.0)]).unwrap();
        let p = transition_matrix(&inserted).unwrap();
        assert_eq!(p.get(0, 3), 0.5);
        assert_eq!(p.get(1, 3), 0.5);
        let pi = pi_of(&inserted);
        let exact = [1.25 / 4.25, 1.0 / 4.25, 0.5 / 4.25, 1.5 / 4.25];
        for (a, b) in pi.iter().zip(exact) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn eligible_links_on_toy_graph() {
        let g = toy_graph();
        let l = eligible_link_distribution(&g, &targets(&[0], 4), &TOY_PI).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!((l[0].src, l[0].dst, l[0].probability), (1, 0, 1.0));

        let l = eligible_link_distribution(&g, &targets(&[0, 2], 4), &TOY_PI).unwrap();
        assert_eq!(l.len(), 2);
        for link in &l {
            assert_eq!(link.src, 1);
            assert!((link.probability - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn eligible_links_uniform_on_regular_graph() {
        // 4 nodes, each links to the next two: 2-regular
        let edges = (0..4).flat_map(|i| [(i, (i + 1) % 4, 1.0), (i, (i + 2) % 4, 1.0)]);
        let g = WeightedDigraph::from_edges(4, edges, None).unwrap().0;
        let l = eligible_link_distribution(&g, &targets(&[0, 1], 4), &[0.25; 4]).unwrap();
        assert_eq!(l.len(), 4);
        assert!(l.iter().all(|x| (x.probability - 0.25).abs() < 1e-15));
    }

    #[test]
    fn eligible_links_need_support() {
        let g = WeightedDigraph::from_edges(2, [(0, 1, 1.0)], None)
            .unwrap()
            .0;
        assert!(matches!(
            eligible_link_distribution(&g, &targets(&[0], 2), &[0.5, 0.5]),
            Err(Error::EmptySupport)
        ));
    }

    #[test]
    fn combine_endpoints_on_toy_graph() {
        let g = toy_graph();
        let t = targets(&[0], 4);
        let (full, budget) = combine(&g, &t, &TOY_PI, 2.0, 1.0, &mut stream(7)).unwrap();
        assert_eq!(full, click_bias(&g, &t, 2.0).unwrap());
        assert_eq!(budget.biased_weight, 1.0);
        assert_eq!(budget.inserted_count, 0);

        let (none, budget) = combine(&g, &t, &TOY_PI, 2.0, 0.0, &mut stream(7)).unwrap();
        assert_eq!(none, insert_links(&g, &t, &TOY_PI, 1).unwrap().0);
        assert_eq!(budget.biased_links, 0);
        assert_eq!(budget.inserted_count, 1);
    }

    #[test]
    fn combine_does_not_split_links() {
        // l(b) = 4, bias share 2, the only eligible link costs 4
        let g = toy_graph();
        let t = targets(&[0], 4);
        let (modified, budget) = combine(&g, &t, &TOY_PI, 5.0, 0.5, &mut stream(1)).unwrap();
        assert_eq!(budget.total_weight, 4.0);
        assert_eq!(budget.biased_links, 0);
        assert_eq!(budget.biased_weight, 0.0);
        assert_eq!(budget.inserted_count, 4);
        assert_eq!(modified, insert_links(&g, &t, &TOY_PI, 4).unwrap().0);
    }

    #[test]
    fn combine_partial_mix_conserves_budget() {
        // target "2" has in-links from "3" and "4"; l(3) = 4, bias share 2 = one link
        let g = toy_graph();
        let t = targets(&[1], 4);
        let (modified, budget) = combine(&g, &t, &TOY_PI, 3.0, 0.5, &mut stream(3)).unwrap();
        assert_eq!(budget.biased_links, 1);
        assert_eq!(budget.biased_weight, 2.0);
        assert_eq!(budget.inserted_count, 2);
        assert_eq!(link_budget(&g, &modified).unwrap(), 4.0);
    }

    #[test]
    fn sampling_order_follows_probabilities() {
        let p = [0.7, 0.2, 0.1];
        let mut first = [0usize; 3];
        let mut rng = stream(99);
        let draws = 20_000;
        for _ in 0..draws {
            let order = sampling_order(&p, &mut rng);
            first[order[0]] += 1;
        }
        for (k, &c) in first.iter().enumerate() {
            assert!((c as f64 / draws as f64 - p[k]).abs() < 0.015, "{first:?}");
        }
        // second draw after removing the first: P(order = [0, 1, 2]) = 0.7 * 0.2/0.3
        let mut rng = stream(5);
        let hits = (0..draws)
            .filter(|_| sampling_order(&p, &mut rng) == vec![0, 1, 2])
            .count();
        assert!((hits as f64 / draws as f64 - 0.7 * 2.0 / 3.0).abs() < 0.015);
    }

    #[test]
    fn apply_dispatches() {
        let g = toy_graph();
        let t = targets(&[0], 4);
        let (w, budget) = apply(&g, &t, &TOY_PI, &ModificationSpec::click_bias(2.0)).unwrap();
        assert_eq!(w.weight(1, 0), 2.0);
        assert_eq!(budget.biased_weight, 1.0);
        assert_eq!(budget.biased_links, 1);

        let (w, budget) = apply(&g, &t, &TOY_PI, &ModificationSpec::link_insertion(3.0)).unwrap();
        assert_eq!(budget.inserted_count, 2);
        assert_eq!(link_budget(&g, &w).unwrap(), 2.0);

        let (w, budget) = apply(&g, &t, &TOY_PI, &ModificationSpec::link_insertion(1.0)).unwrap();
        assert_eq!(w, g);
        assert_eq!(budget.inserted_count, 0);

        let a = apply(&g, &t, &TOY_PI, &ModificationSpec::combined(2.0, 1.0, 9)).unwrap();
        assert_eq!(a.0, click_bias(&g, &t, 2.0).unwrap());
    }
}
