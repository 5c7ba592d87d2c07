use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::modify::Strategy;
use crate::surfer::PowerIteration;

/// Bias strengths between 2 and 15, the range of realistic interface emphasis.
pub fn realistic_strengths() -> Vec<f64> {
    (2..=15).map(f64::from).collect()
}

/// Strengths up to 200 for studying saturation.
pub fn saturation_strengths() -> Vec<f64> {
    vec![2.0, 5.0, 10.0, 20.0, 35.0, 50.0, 100.0, 150.0, 200.0]
}

/// Parameter grid of an experiment sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub phi_values: Vec<f64>,
    pub bias_strengths: Vec<f64>,
    pub alpha_values: Vec<f64>,
    pub samples_per_phi: usize,
    pub master_seed: u64,
    pub strategies: Vec<Strategy>,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let solver = PowerIteration::default();
        Self {
            phi_values: vec![0.01, 0.02, 0.05, 0.1, 0.15, 0.2],
            bias_strengths: realistic_strengths(),
            alpha_values: (0..=10).map(|k| f64::from(k) / 10.0).collect(),
            samples_per_phi: 100,
            master_seed: 0,
            strategies: Strategy::ALL.to_vec(),
            tolerance: solver.tolerance,
            max_iterations: solver.max_iterations,
        }
    }
}

impl SweepConfig {
    pub fn solver(&self) -> PowerIteration {
        PowerIteration {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonempty = |name: &str, len: usize| {
            if len == 0 {
                Err(invalid(format!("{name} must not be empty")))
            } else {
                Ok(())
            }
        };
        nonempty("phi_values", self.phi_values.len())?;
        nonempty("bias_strengths", self.bias_strengths.len())?;
        nonempty("strategies", self.strategies.len())?;
        if self.strategies.contains(&Strategy::Combined) {
            nonempty("alpha_values", self.alpha_values.len())?;
        }
        if let Some(p) = self.phi_values.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
            return Err(invalid(format!("phi {p} outside (0, 1]")));
        }
        if let Some(b) = self
            .bias_strengths
            .iter()
            .find(|&&b| !(b >= 1.0 && b.is_finite()))
        {
            return Err(invalid(format!("bias strength {b} below 1")));
        }
        if let Some(a) = self
            .alpha_values
            .iter()
            .find(|&&a| !(0.0..=1.0).contains(&a))
        {
            return Err(invalid(format!("alpha {a} outside [0, 1]")));
        }
        if self.samples_per_phi == 0 {
            return Err(invalid("samples_per_phi must be at least 1"));
        }
        self.solver().validate()
    }

    /// Number of runs the sweep will attempt.
    pub fn run_count(&self) -> usize {
        let distinct = |v: &[f64]| sorted_unique(v).len();
        let per_sample = distinct(&self.phi_values) * self.samples_per_phi;
        let mut strategies = self.strategies.clone();
        strategies.sort();
        strategies.dedup();
        strategies
            .iter()
            .map(|s| {
                let alphas = if *s == Strategy::Combined {
                    distinct(&self.alpha_values)
                } else {
                    1
                };
                per_sample * distinct(&self.bias_strengths) * alphas
            })
            .sum()
    }

    /// Parses the flat `key = value` format; lists are comma separated and
    /// `#` starts a comment. Missing keys keep their defaults.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: k + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let result = match key {
                "phi_values" => parse_list(value).map(|v| cfg.phi_values = v),
                "bias_strengths" => parse_list(value).map(|v| cfg.bias_strengths = v),
                "alpha_values" => parse_list(value).map(|v| cfg.alpha_values = v),
                "samples_per_phi" => parse_one(value).map(|v| cfg.samples_per_phi = v),
                "master_seed" => parse_one(value).map(|v| cfg.master_seed = v),
                "strategies" => parse_list(value).map(|v| cfg.strategies = v),
                "tolerance" => parse_one(value).map(|v| cfg.tolerance = v),
                "max_iterations" => parse_one(value).map(|v| cfg.max_iterations = v),
                other => Err(format!("unknown key {other:?}")),
            };
            result.map_err(parse_err)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Inverse of [`SweepConfig::from_kv_str`].
    pub fn to_kv_string(&self) -> String {
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut out = String::new();
        let _ = writeln!(out, "phi_values = {}", join(&self.phi_values));
        let _ = writeln!(out, "bias_strengths = {}", join(&self.bias_strengths));
        let _ = writeln!(out, "alpha_values = {}", join(&self.alpha_values));
        let _ = writeln!(out, "samples_per_phi = {}", self.samples_per_phi);
        let _ = writeln!(out, "master_seed = {}", self.master_seed);
        let strategies: Vec<_> = self.strategies.iter().map(|s| s.as_str()).collect();
        let _ = writeln!(out, "strategies = {}", strategies.join(", "));
        let _ = writeln!(out, "tolerance = {:e}", self.tolerance);
        let _ = writeln!(out, "max_iterations = {}", self.max_iterations);
        out
    }
}

pub(crate) fn sorted_unique(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn parse_one<T: FromStr>(value: &str) -> std::result::Result<T, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse {value:?}"))
}

fn parse_list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_one)
        .collect()
}
