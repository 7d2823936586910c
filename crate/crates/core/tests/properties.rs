//! Property tests for the invariants each module promises.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use molcurate::analytics::{dataset_summary, OrderStats};
use molcurate::descriptors::{compute_descriptors, DescriptorSet};
use molcurate::diversity::{
    diverse_subset, ks_statistic, maxmin_pick, ncircles, wasserstein_1d, DistanceSummary, ENVELOPE_MAX_N,
};
use molcurate::filters::{catalog_names, evaluate, feasibility_check, lookup};
use molcurate::fingerprint::{ecfp, tanimoto_distance, Fingerprint};
use molcurate::molgraph::{canonicalize, fragments, parse_smiles, CanonicalKey, Molecule};
use molcurate::pipeline::synth::{random_smiles, synth_records, SynthConfig};
use molcurate::pipeline::{merge_rows, run_rows, MoleculeRecord, RawRow, Row, RunOptions, Stage, Status};
use molcurate::standardizer::standardize;

const SUFFIXES: [&str; 5] = ["", ".[Na+]", ".[Cl-].[NH4+]", ".O", ".CC(=O)[O-].[K+]"];

fn molecule(seed: u64) -> Molecule {
    parse_smiles(&random_smiles(&mut ChaCha8Rng::seed_from_u64(seed))).unwrap()
}

fn shuffled(mol: &Molecule, seed: u64) -> Molecule {
    let mut order: Vec<usize> = (0..mol.atom_count()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    mol.permuted(&order)
}

fn key(mol: &Molecule) -> CanonicalKey {
    canonicalize(mol).0
}

fn random_fps(n: usize, bits: usize, seed: u64) -> Vec<Fingerprint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| Fingerprint::from_bits(64, (0..rng.gen_range(1..=bits)).map(|_| rng.gen_range(0..64)))).collect()
}

fn dist(a: &Fingerprint, b: &Fingerprint) -> f64 {
    tanimoto_distance(a, b).unwrap()
}

fn rows(records: impl IntoIterator<Item = MoleculeRecord>) -> Vec<Row> {
    records
        .into_iter()
        .enumerate()
        .map(|(i, r)| Ok(RawRow { line: i as u64 + 2, source: r.source, source_id: r.source_id, smiles: r.smiles }))
        .collect()
}

fn descriptor_set() -> impl Strategy<Value = DescriptorSet> {
    (
        (0.0..1200.0f64, 0u32..200, 0u32..90, 1u32..5, 0u32..25, 0u32..20, -8.0..12.0f64, 0.0..300.0f64),
        (0u32..40, 0u32..60, 0u32..10, 0u32..25, 0u32..60, 0u32..25, 0.0..3.0f64, 0u32..8),
        (-6i32..6, 0u32..40, 0u32..5, 0.0..200.0f64),
    )
        .prop_map(|((mw, atoms, heavy, frags, hba, hbd, logp, tpsa), (rot, rigid, rings, ring, c, het, ratio, charged), (charge, arom, stereo, mr))| {
            DescriptorSet {
                mol_weight: mw,
                n_atoms: atoms,
                n_heavy: heavy,
                n_fragments: frags,
                hba,
                hbd,
                logp,
                mr,
                tpsa,
                n_rot_bonds: rot,
                n_rigid_bonds: rigid,
                n_rings: rings,
                max_ring_size: ring,
                n_carbons: c,
                n_heteroatoms: het,
                hetero_carbon_ratio: ratio,
                n_charged_groups: charged,
                total_charge: charge,
                n_aromatic_bonds: arom,
                n_stereocenters: stereo,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_key_ignores_atom_order(seed in any::<u64>(), perm in any::<u64>()) {
        let mol = molecule(seed);
        prop_assert_eq!(key(&shuffled(&mol, perm)), key(&mol));
    }

    #[test]
    fn canonical_smiles_round_trips(seed in any::<u64>()) {
        let mol = molecule(seed);
        let (k, smiles) = canonicalize(&mol);
        prop_assert_eq!(key(&parse_smiles(&smiles).unwrap()), k);
    }

    #[test]
    fn standardize_is_idempotent_and_keeps_heavy_atoms(seed in any::<u64>(), s in 0usize..SUFFIXES.len()) {
        let smiles = format!("{}{}", random_smiles(&mut ChaCha8Rng::seed_from_u64(seed)), SUFFIXES[s]);
        let mol = parse_smiles(&smiles).unwrap();
        let once = standardize(&mol).unwrap();
        let twice = standardize(&once).unwrap();
        prop_assert_eq!(key(&twice), key(&once));
        let heavy = |m: &Molecule| {
            let mut e: Vec<u8> = m.atoms().iter().filter(|a| !a.is_hydrogen()).map(|a| a.element).collect();
            e.sort_unstable();
            e
        };
        prop_assert_eq!(heavy(&once), heavy(&mol));
    }

    #[test]
    fn descriptors_ignore_atom_order(seed in any::<u64>(), perm in any::<u64>()) {
        let mol = molecule(seed);
        let a = compute_descriptors(&mol);
        let b = compute_descriptors(&shuffled(&mol, perm));
        for f in DescriptorSet::FIELDS {
            let (x, y) = (a.value(f).unwrap(), b.value(f).unwrap());
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{} {} vs {}", f, x, y);
        }
    }

    #[test]
    fn additive_descriptors_sum_over_fragments(a in any::<u64>(), b in any::<u64>()) {
        let whole = parse_smiles(&format!("{}.{}", molecule(a), molecule(b))).unwrap();
        let d = compute_descriptors(&whole);
        let parts: Vec<DescriptorSet> = fragments(&whole).iter().map(compute_descriptors).collect();
        for f in ["mol_weight", "tpsa", "logp", "mr", "n_atoms", "n_heavy", "n_fragments", "hba", "hbd",
                  "n_rot_bonds", "n_rigid_bonds", "n_rings", "n_carbons", "n_heteroatoms",
                  "n_charged_groups", "total_charge", "n_aromatic_bonds", "n_stereocenters"] {
            let sum: f64 = parts.iter().map(|p| p.value(f).unwrap()).sum();
            prop_assert!((d.value(f).unwrap() - sum).abs() < 1e-9, "{} {} vs {}", f, d.value(f).unwrap(), sum);
        }
    }

    #[test]
    fn fragments_partition_atoms_and_rings_are_cyclomatic(a in any::<u64>(), b in any::<u64>()) {
        let mol = parse_smiles(&format!("{}.{}", molecule(a), molecule(b))).unwrap();
        let frags = fragments(&mol);
        prop_assert_eq!(frags.iter().map(Molecule::atom_count).sum::<usize>(), mol.atom_count());
        let (_, components) = mol.components();
        prop_assert_eq!(frags.len(), components);
        prop_assert_eq!(mol.rings().len() + mol.atom_count(), mol.bond_count() + components);
    }

    #[test]
    fn ecfp_ignores_atom_order(seed in any::<u64>(), perm in any::<u64>()) {
        let mol = molecule(seed);
        prop_assert_eq!(ecfp(&shuffled(&mol, perm), 2, 2048), ecfp(&mol, 2, 2048));
    }

    #[test]
    fn tanimoto_distance_is_a_metric(seed in any::<u64>()) {
        let f = random_fps(3, 20, seed);
        let (a, b, c) = (&f[0], &f[1], &f[2]);
        prop_assert_eq!(dist(a, a), 0.0);
        prop_assert_eq!(dist(a, b), dist(b, a));
        prop_assert!((0.0..=1.0).contains(&dist(a, b)));
        prop_assert!(dist(a, c) <= dist(a, b) + dist(b, c) + 1e-12);
    }

    #[test]
    fn leadlike_bounds_are_inside_druglike_bounds(d in descriptor_set()) {
        let lead = lookup("faf4-leadlike").unwrap();
        let drug = lookup("faf4-druglike").unwrap();
        for rule in &lead.rules {
            if let Some(wide) = drug.rules.iter().find(|r| r.name == rule.name) {
                let x = d.value(&rule.descriptor).unwrap();
                prop_assert!(!rule.comparison.holds(x) || wide.comparison.holds(x), "{}", rule.name);
            }
        }
    }

    #[test]
    fn verdicts_list_every_breach_and_respect_budgets(d in descriptor_set(), key_len in 0usize..3000) {
        for name in catalog_names() {
            let spec = lookup(name).unwrap();
            let v = evaluate(spec, &d, &[]);
            let breached: Vec<&str> = spec.rules.iter()
                .filter(|r| !r.comparison.holds(d.value(&r.descriptor).unwrap()))
                .map(|r| r.name.as_str())
                .collect();
            let listed: Vec<&str> = v.violations.iter().map(|x| x.rule.as_str()).collect();
            prop_assert_eq!(listed, breached);
            prop_assert_eq!(v.passed, v.violations.len() <= spec.budget);
        }
        let f = feasibility_check(&d, key_len);
        prop_assert_eq!(&f, &feasibility_check(&d, key_len));
        prop_assert_eq!(f.passed, f.violations.is_empty());
    }

    #[test]
    fn percentiles_are_ordered(values in prop::collection::vec(-1e6..1e6f64, 1..300)) {
        let s = OrderStats::of(&values).unwrap().ordered();
        prop_assert!(s.windows(2).all(|w| w[0] <= w[1]), "{:?}", s);
        let unit: Vec<f64> = values.iter().map(|v| (v.abs() / 1e6).min(1.0)).collect();
        let d = DistanceSummary::of(&unit);
        prop_assert!(d.p10 <= d.p25 && d.p25 <= d.median && d.median <= d.p75 && d.p75 <= d.p90);
    }

    #[test]
    fn two_sample_statistics_are_bounded_and_symmetric(
        a in prop::collection::vec(0.0..=1.0f64, 1..200),
        b in prop::collection::vec(0.0..=1.0f64, 1..200),
    ) {
        let (w, k) = (wasserstein_1d(&a, &b), ks_statistic(&a, &b));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&w) && (0.0..=1.0).contains(&k));
        prop_assert!((w - wasserstein_1d(&b, &a)).abs() < 1e-12);
        prop_assert_eq!(k, ks_statistic(&b, &a));
        prop_assert_eq!((wasserstein_1d(&a, &a), ks_statistic(&a, &a)), (0.0, 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ledger_balances_for_any_chunking(n in 1usize..400, seed in any::<u64>(), chunk in 1usize..97) {
        let cfg = SynthConfig::new(n, seed);
        let whole = run_rows(rows(synth_records(&cfg)), RunOptions::default());
        let chunked = run_rows(rows(synth_records(&cfg)), RunOptions { until: Stage::Filtering, chunk_rows: chunk });
        prop_assert!(whole.ledger.balanced());
        let row = whole.ledger.row(&cfg.source).unwrap();
        prop_assert_eq!(row.initial, n as u64);
        prop_assert_eq!(row.final_count, whole.kept.len() as u64);
        prop_assert_eq!(row.removed.total() as usize, whole.quarantine.len());
        prop_assert_eq!(&chunked.kept, &whole.kept);
        prop_assert_eq!(&chunked.ledger, &whole.ledger);
        let keys: BTreeSet<&str> = whole.kept.iter().map(|r| r.key.as_ref().unwrap().as_str()).collect();
        prop_assert_eq!(keys.len(), whole.kept.len());
    }

    #[test]
    fn merge_key_set_is_order_invariant_and_first_wins(seed in any::<u64>(), sizes in prop::array::uniform3(0usize..40)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool: Vec<String> = (0..30).map(|i| format!("C{}", "C".repeat(i))).collect();
        let sources: Vec<Vec<MoleculeRecord>> = sizes.iter().enumerate().map(|(s, &m)| {
            let mut keys: Vec<&String> = pool.choose_multiple(&mut rng, m.min(pool.len())).collect();
            keys.sort();
            keys.into_iter().enumerate().map(|(i, k)| MoleculeRecord {
                source: format!("s{s}"),
                source_id: format!("{i}"),
                smiles: k.clone(),
                key: Some(CanonicalKey::from_canonical_string(k.clone())),
                status: Status::Ok,
            }).collect()
        }).collect();
        let union: BTreeSet<&str> = sources.iter().flatten().map(|r| r.smiles.as_str()).collect();
        for order in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let input: Vec<MoleculeRecord> = order.iter().flat_map(|&s| sources[s].clone()).collect();
            let out = merge_rows(input.iter().cloned().map(Ok)).unwrap();
            let keys: BTreeSet<&str> = out.records.iter().map(|r| r.smiles.as_str()).collect();
            prop_assert_eq!(&keys, &union);
            let mut first: BTreeMap<&str, &str> = BTreeMap::new();
            for r in &input {
                first.entry(r.smiles.as_str()).or_insert(r.source.as_str());
            }
            for r in &out.records {
                prop_assert_eq!(first[r.smiles.as_str()], r.source.as_str());
            }
            prop_assert_eq!(out.gain.sources.iter().map(|g| g.new).sum::<u64>(), out.gain.total);
            for g in &out.gain.sources {
                prop_assert_eq!(g.input, g.new + g.duplicates);
                prop_assert_eq!(g.overlap_with.iter().map(|o| o.count).sum::<u64>(), g.duplicates);
            }
            let again = merge_rows(out.records.iter().cloned().chain(out.records.iter().cloned()).map(Ok)).unwrap();
            prop_assert_eq!(again.gain.total, out.gain.total);
        }
    }

    #[test]
    fn maxmin_centers_are_t_apart_and_cover(seed in any::<u64>(), n in 1usize..150, ti in 0usize..3) {
        let t = [0.5, 0.75, 0.9][ti];
        let fps = random_fps(n, 12, seed);
        let picks = maxmin_pick(&fps, t, usize::MAX, seed).unwrap();
        for (x, &i) in picks.iter().enumerate() {
            for &j in &picks[x + 1..] {
                prop_assert!(dist(&fps[i], &fps[j]) >= t);
            }
        }
        for i in (0..n).filter(|i| !picks.contains(i)) {
            prop_assert!(picks.iter().any(|&p| dist(&fps[i], &fps[p]) < t), "{} is {} or more from every center", i, t);
        }
    }

    #[test]
    fn ncircles_is_a_maximal_packing(seed in any::<u64>(), n in 1usize..200, t in 0.0..1.0f64) {
        let fps = random_fps(n, 12, seed);
        let r = ncircles(&fps, t).unwrap();
        let acc: BTreeSet<usize> = r.accepted.iter().copied().collect();
        for (x, &i) in r.accepted.iter().enumerate() {
            for &j in &r.accepted[x + 1..] {
                prop_assert!(dist(&fps[i], &fps[j]) >= t);
            }
        }
        for i in (0..n).filter(|i| !acc.contains(i)) {
            prop_assert!(r.accepted.iter().any(|&a| dist(&fps[i], &fps[a]) < t), "{} could be added", i);
        }
        prop_assert!(r.count >= r.greedy_count);
    }

    #[test]
    fn ncircles_is_monotone_in_t(seed in any::<u64>(), n in 1usize..=ENVELOPE_MAX_N, a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let fps = random_fps(n, 12, seed);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(ncircles(&fps, lo).unwrap().count >= ncircles(&fps, hi).unwrap().count);
    }

    #[test]
    fn diverse_subset_is_exact_and_replayable(seed in any::<u64>(), n in 1usize..200, frac in 0.0..=1.0f64) {
        let fps = random_fps(n, 12, seed ^ 1);
        let m = ((n as f64) * frac) as usize;
        let a = diverse_subset(&fps, m, 0.8, seed).unwrap();
        prop_assert_eq!(a.indices.len(), m);
        prop_assert!(a.indices.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(&a, &diverse_subset(&fps, m, 0.8, seed).unwrap());
    }

    #[test]
    fn element_group_fractions_are_fractions(seeds in prop::collection::vec(any::<u64>(), 0..30)) {
        let mols: Vec<Molecule> = seeds.iter().map(|&s| molecule(s)).collect();
        let r = dataset_summary(&mols);
        for g in &r.element_groups.groups {
            let f = r.element_groups.fraction(g.group);
            prop_assert!((0.0..=1.0).contains(&f));
        }
        for c in &r.descriptors {
            if let Some(s) = &c.stats {
                prop_assert!(s.ordered().windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }
}
