//! Checks against frozen reference fixtures, shared by the integration
//! tests and the acceptance run. Each returns one line per disagreement.

#![allow(dead_code)]

use molcurate::descriptors::{compute_descriptors, DescriptorSet};
use molcurate::diversity::{ks_statistic, wasserstein_1d, DistanceSummary};
use molcurate::filters::feasibility_check;
use molcurate::molgraph::{canonicalize, parse_smiles};
use molcurate::standardizer::standardize;

pub const PANEL: &str = include_str!("../fixtures/descriptor_panel.tsv");
pub const BOUNDARY: &str = include_str!("../fixtures/feasibility_boundary.tsv");
pub const DISTRIBUTIONS: &str = include_str!("../fixtures/distribution_stats.tsv");

pub const MW_TOL: f64 = 0.001;
pub const LOGP_TOL: f64 = 0.1;
pub const TPSA_TOL: f64 = 0.01;
pub const STATS_TOL: f64 = 1e-12;

const COUNTS: [&str; 14] = [
    "n_atoms",
    "n_heavy",
    "n_fragments",
    "hba",
    "hbd",
    "n_rot_bonds",
    "n_rings",
    "max_ring_size",
    "n_carbons",
    "n_heteroatoms",
    "n_charged_groups",
    "total_charge",
    "n_aromatic_bonds",
    "n_stereocenters",
];

/// Header and data rows of a fixture, comments skipped.
pub fn table(text: &str) -> (Vec<&str>, Vec<Vec<&str>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split('\t').collect();
    (header, lines.map(|l| l.split('\t').collect()).collect())
}

fn cell<'a>(header: &[&str], row: &[&'a str], name: &str) -> &'a str {
    row[header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"))]
}

fn descriptors_of(smiles: &str) -> (DescriptorSet, usize) {
    let mol = standardize(&parse_smiles(smiles).unwrap()).unwrap();
    let (key, _) = canonicalize(&mol);
    (compute_descriptors(&mol), key.len())
}

fn compare(out: &mut Vec<String>, name: &str, d: &DescriptorSet, field: &str, expected: &str, tol: f64) {
    let expected: f64 = expected.parse().unwrap();
    let actual = d.value(field).unwrap();
    if (expected - actual).abs() > tol {
        out.push(format!("{name} {field}: expected {expected}, got {actual}"));
    }
}

pub fn panel_mismatches() -> Vec<String> {
    let (header, rows) = table(PANEL);
    let mut out = Vec::new();
    for row in &rows {
        let get = |c: &str| cell(&header, row, c);
        let (d, _) = descriptors_of(get("smiles"));
        compare(&mut out, get("name"), &d, "mol_weight", get("mol_weight"), MW_TOL);
        compare(&mut out, get("name"), &d, "logp", get("logp"), LOGP_TOL);
        compare(&mut out, get("name"), &d, "tpsa", get("tpsa"), TPSA_TOL);
        for f in COUNTS {
            compare(&mut out, get("name"), &d, f, get(f), 0.0);
        }
    }
    out
}

/// Feasibility verdicts on molecules placed either side of each bound.
pub fn boundary_mismatches() -> Vec<String> {
    let (header, rows) = table(BOUNDARY);
    let mut out = Vec::new();
    for row in &rows {
        let get = |c: &str| cell(&header, row, c);
        let name = get("name");
        let (d, key_len) = descriptors_of(get("smiles"));
        compare(&mut out, name, &d, "mol_weight", get("mol_weight"), MW_TOL);
        compare(&mut out, name, &d, "logp", get("logp"), LOGP_TOL);
        compare(&mut out, name, &d, "tpsa", get("tpsa"), TPSA_TOL);
        for f in ["n_fragments", "n_atoms", "hba", "hbd", "n_rot_bonds"] {
            compare(&mut out, name, &d, f, get(f), 0.0);
        }
        let verdict = feasibility_check(&d, key_len);
        let mut got: Vec<&str> = verdict.violations.iter().map(|v| v.rule.as_str()).collect();
        got.sort_unstable();
        let mut want: Vec<&str> = get("violated").split(',').filter(|s| *s != "-").collect();
        want.sort_unstable();
        if got != want {
            out.push(format!("{name}: expected violations {want:?}, got {got:?}"));
        }
        if verdict.passed != want.is_empty() {
            out.push(format!("{name}: passed={} disagrees with its violations", verdict.passed));
        }
    }
    out
}

/// The two frozen samples, as multiples of 1/64.
pub fn distribution_samples() -> (Vec<f64>, Vec<f64>) {
    let (_, rows) = table(DISTRIBUTIONS);
    let sample = |key: &str| -> Vec<f64> {
        let row = rows.iter().find(|r| r[0] == key).unwrap();
        row[1].split(',').map(|v| v.parse::<f64>().unwrap() / 64.0).collect()
    };
    (sample("a"), sample("b"))
}

pub fn distribution_mismatches() -> Vec<String> {
    let (_, rows) = table(DISTRIBUTIONS);
    let (a, b) = distribution_samples();
    let sa = DistanceSummary::of(&a);
    let sb = DistanceSummary::of(&b);
    let value = |key: &str| -> Option<f64> {
        let (s, field) = key.split_once('_')?;
        let summary = match s {
            "a" => &sa,
            "b" => &sb,
            _ => return None,
        };
        let field = if field == "p50" { "median" } else { field };
        summary.columns().iter().find(|(n, _)| *n == field).map(|(_, v)| *v)
    };
    let mut out = Vec::new();
    for row in rows.iter().filter(|r| r[0] != "a" && r[0] != "b") {
        let expected: f64 = row[1].parse().unwrap();
        let actual = match row[0] {
            "wasserstein" => wasserstein_1d(&a, &b),
            "ks" => ks_statistic(&a, &b),
            key => value(key).unwrap_or_else(|| panic!("unknown key {key}")),
        };
        if (expected - actual).abs() > STATS_TOL {
            out.push(format!("{}: expected {expected}, got {actual}", row[0]));
        }
    }
    out
}
