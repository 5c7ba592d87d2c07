//! Random-surfer models of websites.
//!
//! A website is a weighted directed graph `W` where `W[i][j]` holds the total
//! weight of links from page `j` to page `i`. The random surfer follows an
//! outgoing link with probability proportional to its weight; its stationary
//! distribution `π` tells how often each page is visited in the long run.
//!
//! This crate computes `π` by power iteration, applies link modifications
//! (click bias, link insertion, and budgeted mixtures of both) that try to
//! steer the surfer toward a set of target pages, measures the effect, and
//! runs seeded experiment sweeps over those modifications.
//!
//! ```
//! use surfsteer_core::{graph, metrics, modify, surfer, targets::TargetSet};
//!
//! let text = "1\t4\n2\t1\n2\t3\n3\t2\n3\t4\n4\t2\n";
//! let g = graph::load_edge_list(text.as_bytes()).unwrap().graph;
//! let solver = surfer::PowerIteration::default();
//! let pi = surfer::stationary(&surfer::transition_matrix(&g).unwrap(), &solver).unwrap();
//!
//! let t = TargetSet::from_members(vec![0], g.node_count()).unwrap();
//! let biased = modify::click_bias(&g, &t, 2.0).unwrap();
//! let pi2 = surfer::stationary(&surfer::transition_matrix(&biased).unwrap(), &solver).unwrap();
//!
//! let tau = metrics::influence_potential(
//!     metrics::energy(&pi2.pi, &t).unwrap(),
//!     metrics::energy(&pi.pi, &t).unwrap(),
//! )
//! .unwrap();
//! assert!((tau - 22.0 / 17.0).abs() < 1e-9);
//! ```

pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod format;
pub mod graph;
pub mod metrics;
pub mod modify;
pub mod seed;
pub mod stats;
pub mod surfer;
pub mod synthetic;
pub mod targets;

pub use error::{Error, Result};
pub use experiment::{RunRecord, SweepConfig};
pub use graph::WeightedDigraph;
pub use modify::{LinkBudget, ModificationSpec, Strategy};
pub use surfer::{PowerIteration, StationaryResult, TransitionMatrix};
pub use targets::TargetSet;

/// Version string embedded in every output's metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
