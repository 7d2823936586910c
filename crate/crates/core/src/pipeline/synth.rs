//! Seeded synthetic record generator for load and regression runs.
//!
//! Molecules are chains of small building blocks with optional terminal
//! branches. A configurable share of records is corrupted so that every stage
//! has something to remove.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{write_records, MoleculeRecord, PipelineError, Status};

/// Chain blocks: text, and whether the last atom can take one more branch.
const CHAIN: [(&str, bool); 22] = [
    ("C", true),
    ("CC", true),
    ("CCC", true),
    ("C(C)", false),
    ("C(=O)", false),
    ("C(=O)N", false),
    ("N", false),
    ("NC(=O)", false),
    ("O", false),
    ("S", false),
    ("S(=O)(=O)", false),
    ("c1ccccc1", false),
    ("c1ccncc1", false),
    ("c1ccc(F)cc1", false),
    ("c1ccc(Cl)cc1", false),
    ("c1cc[nH]c1", false),
    ("c1ccsc1", false),
    ("c1nc[nH]c1", false),
    ("C1CCNCC1", true),
    ("C1CCOCC1", true),
    ("C1CCCCC1", true),
    ("C1CC1", true),
];

const TERMINAL: [&str; 12] =
    ["C", "F", "Cl", "Br", "O", "N", "OC", "C#N", "C(F)(F)F", "C(=O)O", "C(=O)N", "N(C)C"];

const SALTS: [&str; 4] = [".Cl", ".[Na+]", ".O", ".Br"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n: usize,
    pub seed: u64,
    pub source: String,
    /// Rates per record; whatever is left over is a plain new molecule.
    pub parse_fail: f64,
    pub standardize_fail: f64,
    pub infeasible: f64,
    pub duplicate: f64,
    pub salt: f64,
}

impl SynthConfig {
    pub fn new(n: usize, seed: u64) -> SynthConfig {
        SynthConfig {
            n,
            seed,
            source: "synthetic".into(),
            parse_fail: 0.01,
            standardize_fail: 0.005,
            infeasible: 0.005,
            duplicate: 0.02,
            salt: 0.03,
        }
    }

    /// Only well-formed, distinct-looking molecules.
    pub fn clean(n: usize, seed: u64) -> SynthConfig {
        SynthConfig { parse_fail: 0.0, standardize_fail: 0.0, infeasible: 0.0, duplicate: 0.0, salt: 0.0, ..SynthConfig::new(n, seed) }
    }
}

/// One random molecule with 2 to 8 chain blocks.
pub fn random_smiles<R: Rng>(rng: &mut R) -> String {
    let blocks = rng.gen_range(2..=8);
    let mut s = String::new();
    for i in 0..blocks {
        let (text, branchable) = *CHAIN.choose(rng).expect("blocks");
        s.push_str(text);
        if branchable && i + 1 < blocks && rng.gen_bool(0.3) {
            s.push('(');
            s.push_str(TERMINAL.choose(rng).expect("terminals"));
            s.push(')');
        }
    }
    if rng.gen_bool(0.7) {
        s.push_str(TERMINAL.choose(rng).expect("terminals"));
    }
    s
}

/// `n` random molecules (duplicates possible).
pub fn random_molecules(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_smiles(&mut rng)).collect()
}

/// Lazily generated raw records.
pub fn synth_records(cfg: &SynthConfig) -> impl Iterator<Item = MoleculeRecord> + '_ {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut recent: Vec<String> = Vec::with_capacity(1024);
    (0..cfg.n).map(move |i| {
        let roll: f64 = rng.gen();
        let mut cut = cfg.parse_fail;
        let smiles = if roll < cut {
            let base = random_smiles(&mut rng);
            match rng.gen_range(0..3) {
                0 => format!("{base}("),
                1 => format!("C1{base}"),
                _ => format!("{base}[Xq]"),
            }
        } else if roll < {
            cut += cfg.standardize_fail;
            cut
        } {
            format!("c1cccc1{}", random_smiles(&mut rng))
        } else if roll < {
            cut += cfg.infeasible;
            cut
        } {
            if rng.gen_bool(0.5) {
                format!("{}.C.C.C", random_smiles(&mut rng))
            } else {
                "C".repeat(rng.gen_range(160..220))
            }
        } else if roll < {
            cut += cfg.duplicate;
            cut
        } && !recent.is_empty()
        {
            recent.choose(&mut rng).expect("recent").clone()
        } else if roll < {
            cut += cfg.salt;
            cut
        } {
            format!("{}{}", random_smiles(&mut rng), SALTS.choose(&mut rng).expect("salts"))
        } else {
            let s = random_smiles(&mut rng);
            if recent.len() < 1024 {
                recent.push(s.clone());
            } else {
                let slot = rng.gen_range(0..1024);
                recent[slot] = s.clone();
            }
            s
        };
        MoleculeRecord {
            source: cfg.source.clone(),
            source_id: format!("{}-{i}", cfg.source),
            smiles,
            key: None,
            status: Status::Ok,
        }
    })
}

/// Write a synthetic record file; returns the number of rows.
pub fn write_synthetic(path: &Path, cfg: &SynthConfig) -> Result<u64, PipelineError> {
    let records: Vec<MoleculeRecord> = synth_records(cfg).collect();
    write_records(path, records.iter())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;
    use crate::standardizer::standardize;

    #[test]
    fn clean_molecules_parse_and_standardize() {
        for s in random_molecules(2000, 7) {
            let m = parse_smiles(&s).unwrap_or_else(|e| panic!("{s}: {e}"));
            standardize(&m).unwrap_or_else(|e| panic!("{s}: {e}"));
        }
    }

    #[test]
    fn generation_is_seeded() {
        let cfg = SynthConfig::new(500, 3);
        let a: Vec<_> = synth_records(&cfg).collect();
        let b: Vec<_> = synth_records(&cfg).collect();
        assert_eq!(a, b);
        assert_ne!(random_molecules(50, 1), random_molecules(50, 2));
    }
}
