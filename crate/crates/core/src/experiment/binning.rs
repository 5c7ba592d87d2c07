use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::format::num;
use crate::modify::Strategy;
use crate::stats::{spearman, Correlation};

use super::RunRecord;

/// How degree-ratio bins are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binning {
    /// Equal-width intervals over `[min, max]` of the observed ratios.
    EqualWidth,
    /// Intervals holding (nearly) equal numbers of records.
    EqualCount,
}

impl Binning {
    pub fn as_str(self) -> &'static str {
        match self {
            Binning::EqualWidth => "equal_width",
            Binning::EqualCount => "equal_count",
        }
    }
}

/// Mean modified energy per degree-ratio bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedSummary {
    pub binning: Binning,
    /// `bins + 1` boundaries.
    pub edges: Vec<f64>,
    /// Mean `π′_t` per bin; `None` for empty bins.
    pub mean_energy: Vec<Option<f64>>,
    pub counts: Vec<usize>,
    /// Records dropped because their ratio is infinite.
    pub dropped_infinite: usize,
    /// Set when fewer distinct ratios than requested bins forced fewer bins.
    pub reduced_from: Option<usize>,
}

impl BinnedSummary {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Rank correlation between bin index and mean energy over non-empty bins.
    pub fn trend(&self) -> Result<Correlation> {
        let (idx, means): (Vec<f64>, Vec<f64>) = self
            .mean_energy
            .iter()
            .enumerate()
            .filter_map(|(k, m)| m.map(|m| (k as f64, m)))
            .unzip();
        spearman(&idx, &means)
    }
}

/// Groups records by degree ratio and averages `π′_t` per group.
///
/// All records must come from the same strategy, strength and mixing factor.
pub fn bin_by_degree_ratio(
    records: &[RunRecord],
    n_bins: usize,
    binning: Binning,
) -> Result<BinnedSummary> {
    if n_bins == 0 {
        return Err(invalid("need at least one bin"));
    }
    if let Some(first) = records.first() {
        let same = records
            .iter()
            .all(|r| r.strategy == first.strategy && r.b == first.b && r.alpha == first.alpha);
        if !same {
            return Err(invalid("binning mixes strategies or strengths"));
        }
    }
    let mut finite: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.degree_ratio.is_finite())
        .map(|r| (r.degree_ratio, r.pi_t_prime))
        .collect();
    let dropped_infinite = records.len() - finite.len();
    if dropped_infinite > 0 {
        log::warn!("dropped {dropped_infinite} record(s) with infinite degree ratio");
    }
    if finite.is_empty() {
        return Err(invalid("no records with a finite degree ratio"));
    }
    finite.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut distinct = finite.iter().map(|p| p.0).collect::<Vec<_>>();
    distinct.dedup();
    let bins = n_bins.min(distinct.len());
    let reduced_from = (bins < n_bins).then_some(n_bins);
    if reduced_from.is_some() {
        log::warn!(
            "only {} distinct ratios, using {bins} bins instead of {n_bins}",
            distinct.len()
        );
    }

    let lo = finite[0].0;
    let hi = finite[finite.len() - 1].0;
    let mut assignment = Vec::with_capacity(finite.len());
    let edges = match binning {
        Binning::EqualWidth => {
            let width = (hi - lo) / bins as f64;
            for &(r, _) in &finite {
                let k = if width > 0.0 {
                    (((r - lo) / width).floor() as usize).min(bins - 1)
                } else {
                    0
                };
                assignment.push(k);
            }
            (0..=bins)
                .map(|k| if k == bins { hi } else { lo + width * k as f64 })
                .collect()
        }
        Binning::EqualCount => {
            let n = finite.len();
            for k in 0..n {
                assignment.push(k * bins / n);
            }
            let mut edges = vec![lo];
            for b in 1..bins {
                let first = (b * n).div_ceil(bins);
                edges.push(finite[first].0);
            }
            edges.push(hi);
            edges
        }
    };

    let mut sums = vec![0.0; bins];
    let mut counts = vec![0usize; bins];
    for (&(_, e), &k) in finite.iter().zip(&assignment) {
        sums[k] += e;
        counts[k] += 1;
    }
    let mean_energy = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| (c > 0).then(|| s / c as f64))
        .collect();
    Ok(BinnedSummary {
        binning,
        edges,
        mean_energy,
        counts,
        dropped_infinite,
        reduced_from,
    })
}

/// `bin,lower,upper,count,mean_pi_t_prime,binning` rows.
pub fn write_bins_csv<W: Write>(summary: &BinnedSummary, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "bin",
        "lower",
        "upper",
        "count",
        "mean_pi_t_prime",
        "binning",
    ])?;
    for k in 0..summary.bins() {
        w.write_record([
            k.to_string(),
            num(summary.edges[k]),
            num(summary.edges[k + 1]),
            summary.counts[k].to_string(),
            summary.mean_energy[k].map(num).unwrap_or_default(),
            summary.binning.as_str().to_owned(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Records sharing a strategy, target fraction, strength and mixing factor.
#[derive(Debug, Clone, PartialEq)]
pub struct BinGroup {
    pub strategy: Strategy,
    pub phi: f64,
    pub b: f64,
    pub alpha: Option<f64>,
    pub summary: BinnedSummary,
}

/// Bins every `(strategy, φ, b, α)` group separately, in first-seen order.
///
/// Groups without any finite degree ratio are skipped with a warning.
pub fn bin_groups(records: &[RunRecord], n_bins: usize, binning: Binning) -> Result<Vec<BinGroup>> {
    let mut keys: Vec<(Strategy, f64, f64, Option<f64>)> = Vec::new();
    let mut members: Vec<Vec<RunRecord>> = Vec::new();
    for r in records {
        let key = (r.strategy, r.phi, r.b, r.alpha);
        match keys.iter().position(|k| *k == key) {
            Some(i) => members[i].push(r.clone()),
            None => {
                keys.push(key);
                members.push(vec![r.clone()]);
            }
        }
    }
    let mut out = Vec::with_capacity(keys.len());
    for ((strategy, phi, b, alpha), group) in keys.into_iter().zip(members) {
        if group.iter().all(|r| !r.degree_ratio.is_finite()) {
            log::warn!(
                "{} phi={phi} b={b}: no finite degree ratios, group skipped",
                strategy.as_str()
            );
            continue;
        }
        let summary = bin_by_degree_ratio(&group, n_bins, binning)?;
        out.push(BinGroup {
            strategy,
            phi,
            b,
            alpha,
            summary,
        });
    }
    Ok(out)
}

/// Per-group bin rows, prefixed with the group key columns.
pub fn write_grouped_bins_csv<W: Write>(groups: &[BinGroup], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "strategy",
        "phi",
        "b",
        "alpha",
        "bin",
        "lower",
        "upper",
        "count",
        "mean_pi_t_prime",
        "binning",
    ])?;
    for g in groups {
        let s = &g.summary;
        for k in 0..s.bins() {
            w.write_record([
                g.strategy.as_str().to_owned(),
                num(g.phi),
                num(g.b),
                g.alpha.map(num).unwrap_or_default(),
                k.to_string(),
                num(s.edges[k]),
                num(s.edges[k + 1]),
                s.counts[k].to_string(),
                s.mean_energy[k].map(num).unwrap_or_default(),
                s.binning.as_str().to_owned(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
