//! The feasibility filter and the descriptor-based drug-likeness catalog.
//!
//! Bounds live in `data/filters.rules`; this module parses that registry and
//! evaluates it. Every breached rule is reported, not just the first.

use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptors::DescriptorSet;
use crate::tables::FILTER_RULES;

/// Name of the registry section holding the feasibility bounds.
pub const FEASIBILITY: &str = "feasibility";

/// Catalog filters known by name but not implemented, since they need
/// substructure rule lists.
pub const SUBSTRUCTURE_FILTERS: [&str; 3] = ["glaxo", "brenk", "zinc-basic"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("unknown filter {0:?}")]
    Unknown(String),
    #[error("filter {0:?} is out-of-scope: substructure rules")]
    OutOfScope(String),
}

/// One bound on a descriptor. Ranges are closed at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Comparison {
    Le { bound: f64 },
    Lt { bound: f64 },
    Ge { bound: f64 },
    Gt { bound: f64 },
    In { lo: f64, hi: f64 },
}

impl Comparison {
    pub fn holds(self, x: f64) -> bool {
        match self {
            Comparison::Le { bound } => x <= bound,
            Comparison::Lt { bound } => x < bound,
            Comparison::Ge { bound } => x >= bound,
            Comparison::Gt { bound } => x > bound,
            Comparison::In { lo, hi } => lo <= x && x <= hi,
        }
    }

    /// The bound a failing value breached.
    pub fn breached_bound(self, x: f64) -> f64 {
        match self {
            Comparison::Le { bound } | Comparison::Lt { bound } | Comparison::Ge { bound } | Comparison::Gt { bound } => {
                bound
            }
            Comparison::In { lo, hi } => {
                if x < lo {
                    lo
                } else {
                    hi
                }
            }
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Comparison::Le { bound } => write!(f, "<= {bound}"),
            Comparison::Lt { bound } => write!(f, "< {bound}"),
            Comparison::Ge { bound } => write!(f, ">= {bound}"),
            Comparison::Gt { bound } => write!(f, "> {bound}"),
            Comparison::In { lo, hi } => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub name: String,
    /// DescriptorSet field name, or `key_length`.
    pub descriptor: String,
    pub comparison: Comparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub name: String,
    /// Violations tolerated while still passing.
    pub budget: usize,
    pub rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    pub observed: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub filter_name: String,
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl FilterVerdict {
    pub fn violated(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

fn parse_comparison(op: &str, bound: &str) -> Comparison {
    let num = |s: &str| -> f64 { s.trim().parse().unwrap_or_else(|_| panic!("bad bound {s:?} in filters.rules")) };
    match op {
        "<=" => Comparison::Le { bound: num(bound) },
        "<" => Comparison::Lt { bound: num(bound) },
        ">=" => Comparison::Ge { bound: num(bound) },
        ">" => Comparison::Gt { bound: num(bound) },
        "in" => {
            let inner = bound.trim().trim_start_matches('[').trim_end_matches(']');
            let (lo, hi) = inner.split_once(',').expect("range bound is [lo, hi]");
            Comparison::In { lo: num(lo), hi: num(hi) }
        }
        other => panic!("unknown operator {other:?} in filters.rules"),
    }
}

/// Parse a rules file. Panics on malformed input, since the registry is
/// compiled in and checked by tests.
pub fn parse_rules(text: &str) -> Vec<FilterSpec> {
    let mut specs: Vec<FilterSpec> = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            specs.push(FilterSpec { name: name.to_string(), budget: 0, rules: Vec::new() });
            continue;
        }
        let spec = specs.last_mut().expect("rule before the first section");
        let cols: Vec<&str> = line.split('\t').map(str::trim).filter(|c| !c.is_empty()).collect();
        match cols.as_slice() {
            ["budget", n] => spec.budget = n.parse().expect("budget is an integer"),
            [name, descriptor, op, bound] => spec.rules.push(Rule {
                name: name.to_string(),
                descriptor: descriptor.to_string(),
                comparison: parse_comparison(op, bound),
            }),
            _ => panic!("malformed line in filters.rules: {line:?}"),
        }
    }
    specs
}

/// Every section of the compiled-in registry, feasibility first.
pub fn registry() -> &'static [FilterSpec] {
    static REGISTRY: OnceLock<Vec<FilterSpec>> = OnceLock::new();
    REGISTRY.get_or_init(|| parse_rules(FILTER_RULES))
}

/// Names of the catalog filters, in registry order.
pub fn catalog_names() -> Vec<&'static str> {
    registry().iter().map(|s| s.name.as_str()).filter(|n| *n != FEASIBILITY).collect()
}

/// Lower-case and hyphenate a user-supplied name ("Pfizer 3/75" becomes
/// "pfizer-3-75").
pub fn normalize_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for c in name.trim().chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('-') && !out.is_empty() {
            out.push('-');
        }
    }
    out.trim_end_matches('-').to_string()
}

/// Look up a catalog filter (the feasibility section is not a catalog entry).
pub fn lookup(name: &str) -> Result<&'static FilterSpec, FilterError> {
    let key = normalize_name(name);
    if SUBSTRUCTURE_FILTERS.contains(&key.as_str()) {
        return Err(FilterError::OutOfScope(key));
    }
    registry()
        .iter()
        .find(|s| s.name == key && s.name != FEASIBILITY)
        .ok_or_else(|| FilterError::Unknown(name.to_string()))
}

/// Evaluate a spec; `extra` supplies values that are not descriptors.
pub fn evaluate(spec: &FilterSpec, d: &DescriptorSet, extra: &[(&str, f64)]) -> FilterVerdict {
    let violations: Vec<Violation> = spec
        .rules
        .iter()
        .filter_map(|rule| {
            let observed = d
                .value(&rule.descriptor)
                .or_else(|| extra.iter().find(|(k, _)| *k == rule.descriptor).map(|&(_, v)| v))
                .unwrap_or_else(|| panic!("no value for {:?}", rule.descriptor));
            (!rule.comparison.holds(observed)).then(|| Violation {
                rule: rule.name.clone(),
                observed,
                bound: rule.comparison.breached_bound(observed),
            })
        })
        .collect();
    FilterVerdict { filter_name: spec.name.clone(), passed: violations.len() <= spec.budget, violations }
}

/// The nine feasibility bounds. `key_length` is the canonical key's length
/// in bytes.
pub fn feasibility_check(d: &DescriptorSet, key_length: usize) -> FilterVerdict {
    let spec = registry().iter().find(|s| s.name == FEASIBILITY).expect("feasibility section");
    evaluate(spec, d, &[("key_length", key_length as f64)])
}

pub fn apply_filter(name: &str, d: &DescriptorSet) -> Result<FilterVerdict, FilterError> {
    Ok(evaluate(lookup(name)?, d, &[]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassRate {
    pub filter: String,
    pub passed: u64,
    pub total: u64,
    /// passed / total, or 0 for an empty dataset.
    pub fraction: f64,
}

/// Fraction of molecules passing each named filter.
pub fn filter_profile(descriptors: &[DescriptorSet], names: &[&str]) -> Result<Vec<PassRate>, FilterError> {
    let specs: Vec<&FilterSpec> = names.iter().map(|n| lookup(n)).collect::<Result<_, _>>()?;
    let counts = descriptors
        .par_iter()
        .map(|d| specs.iter().map(|s| evaluate(s, d, &[]).passed as u64).collect::<Vec<u64>>())
        .reduce(|| vec![0; specs.len()], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    let total = descriptors.len() as u64;
    Ok(specs
        .iter()
        .zip(counts)
        .map(|(s, passed)| PassRate {
            filter: s.name.clone(),
            passed,
            total,
            fraction: if total == 0 { 0.0 } else { passed as f64 / total as f64 },
        })
        .collect())
}
