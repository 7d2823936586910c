//! Dataset characterization: element groups, generic scaffolds, salts and
//! descriptor distributions.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::descriptors::{compute_descriptors, DescriptorSet};
use crate::diversity::nearest_rank;
use crate::filters::{catalog_names, filter_profile, PassRate, SUBSTRUCTURE_FILTERS};
use crate::molgraph::element::{element, ElementClass};
use crate::molgraph::{canonicalize, fragments, Atom, Bond, BondOrder, CanonicalKey, Molecule};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Element groups; a molecule can belong to several.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementGroup {
    Carbon,
    Nitrogen,
    Oxygen,
    Sulfur,
    Halogen,
    Metalloid,
    Metal,
    Other,
}

impl ElementGroup {
    pub const ALL: [ElementGroup; 8] = [
        ElementGroup::Carbon,
        ElementGroup::Nitrogen,
        ElementGroup::Oxygen,
        ElementGroup::Sulfur,
        ElementGroup::Halogen,
        ElementGroup::Metalloid,
        ElementGroup::Metal,
        ElementGroup::Other,
    ];

    /// Group of an element; hydrogen belongs to none.
    pub fn of(z: u8) -> Option<ElementGroup> {
        Some(match z {
            1 => return None,
            6 => ElementGroup::Carbon,
            7 => ElementGroup::Nitrogen,
            8 => ElementGroup::Oxygen,
            16 => ElementGroup::Sulfur,
            _ => match element(z).map(|e| e.class) {
                Some(ElementClass::Halogen) => ElementGroup::Halogen,
                Some(ElementClass::Metalloid) => ElementGroup::Metalloid,
                Some(ElementClass::Metal) => ElementGroup::Metal,
                _ => ElementGroup::Other,
            },
        })
    }

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

/// Set of groups present in one molecule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct GroupFlags(u8);

impl GroupFlags {
    pub fn of(mol: &Molecule) -> GroupFlags {
        GroupFlags(mol.atoms().iter().filter_map(|a| ElementGroup::of(a.element)).fold(0, |f, g| f | g.bit()))
    }

    pub fn contains(self, g: ElementGroup) -> bool {
        self.0 & g.bit() != 0
    }

    pub fn groups(self) -> impl Iterator<Item = ElementGroup> {
        ElementGroup::ALL.into_iter().filter(move |g| self.contains(*g))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupShare {
    pub group: ElementGroup,
    pub molecules: u64,
    /// molecules / n, 0 for an empty dataset.
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementProfile {
    pub n: u64,
    pub groups: Vec<GroupShare>,
}

impl ElementProfile {
    pub fn fraction(&self, g: ElementGroup) -> f64 {
        self.groups.iter().find(|s| s.group == g).map_or(0.0, |s| s.fraction)
    }
}

fn profile_from_flags(flags: &[GroupFlags]) -> ElementProfile {
    let n = flags.len() as u64;
    let groups = ElementGroup::ALL
        .iter()
        .map(|&group| {
            let molecules = flags.iter().filter(|f| f.contains(group)).count() as u64;
            GroupShare { group, molecules, fraction: if n == 0 { 0.0 } else { molecules as f64 / n as f64 } }
        })
        .collect();
    ElementProfile { n, groups }
}

/// Share of molecules containing each element group.
pub fn element_profile(mols: &[Molecule]) -> ElementProfile {
    let flags: Vec<GroupFlags> = mols.par_iter().map(GroupFlags::of).collect();
    profile_from_flags(&flags)
}

/// Generic ring framework: ring atoms plus the linkers between rings, with
/// every atom made a neutral carbon and every bond single. `None` for
/// acyclic molecules.
pub fn generic_scaffold(mol: &Molecule) -> Option<CanonicalKey> {
    let n = mol.atom_count();
    let mut keep: Vec<bool> = mol.atoms().iter().map(|a| a.element != 1).collect();
    let mut degree: Vec<usize> =
        (0..n).map(|i| mol.neighbors(i).iter().filter(|nb| keep[nb.atom]).count()).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&i| keep[i] && !mol.atom(i).in_ring && degree[i] <= 1).collect();
    while let Some(i) = stack.pop() {
        if !keep[i] {
            continue;
        }
        keep[i] = false;
        for nb in mol.neighbors(i) {
            let j = nb.atom;
            if keep[j] {
                degree[j] -= 1;
                if !mol.atom(j).in_ring && degree[j] <= 1 {
                    stack.push(j);
                }
            }
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&i| keep[i]).collect();
    if kept.is_empty() {
        return None;
    }
    let mut new_index = vec![usize::MAX; n];
    for (k, &i) in kept.iter().enumerate() {
        new_index[i] = k;
    }
    let bonds: Vec<Bond> = mol
        .bonds()
        .iter()
        .filter(|b| keep[b.begin] && keep[b.end])
        .map(|b| Bond::new(new_index[b.begin], new_index[b.end], BondOrder::Single))
        .collect();
    let mut atoms = vec![Atom::new(6); kept.len()];
    for b in &bonds {
        for a in [b.begin, b.end] {
            atoms[a].implicit_h += 1;
        }
    }
    for a in &mut atoms {
        a.implicit_h = 4u8.saturating_sub(a.implicit_h);
    }
    let framework = Molecule::new(atoms, bonds).expect("framework of a valid graph");
    Some(canonicalize(&framework).0)
}

/// True when at least two disconnected components carry a net charge.
pub fn is_salt(mol: &Molecule) -> bool {
    fragments(mol)
        .iter()
        .filter(|f| f.atoms().iter().map(|a| a.formal_charge as i32).sum::<i32>() != 0)
        .count()
        >= 2
}

/// The ten order statistics of a descriptor column (nearest-rank).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderStats {
    pub min: f64,
    pub p1: f64,
    pub p5: f64,
    pub q1: f64,
    pub mean: f64,
    pub median: f64,
    pub q3: f64,
    pub p95: f64,
    pub p99: f64,
    pub max: f64,
}

impl OrderStats {
    /// `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<OrderStats> {
        if values.is_empty() {
            return None;
        }
        let mut s = values.to_vec();
        s.sort_by(f64::total_cmp);
        Some(OrderStats {
            min: s[0],
            p1: nearest_rank(&s, 1.0),
            p5: nearest_rank(&s, 5.0),
            q1: nearest_rank(&s, 25.0),
            mean: s.iter().sum::<f64>() / s.len() as f64,
            median: nearest_rank(&s, 50.0),
            q3: nearest_rank(&s, 75.0),
            p95: nearest_rank(&s, 95.0),
            p99: nearest_rank(&s, 99.0),
            max: s[s.len() - 1],
        })
    }

    /// Order statistics in ascending order (the mean excluded).
    pub fn ordered(&self) -> [f64; 9] {
        [self.min, self.p1, self.p5, self.q1, self.median, self.q3, self.p95, self.p99, self.max]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorColumn {
    pub descriptor: String,
    /// Finite values summarized.
    pub count: u64,
    /// Values left out because they are infinite or NaN.
    pub non_finite: u64,
    /// `None` (JSON null) when there is no finite value.
    pub stats: Option<OrderStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub schema_version: u32,
    pub percentile_method: String,
    pub molecules: u64,
    pub unique_scaffolds: u64,
    pub acyclic: u64,
    pub salts: u64,
    pub element_groups: ElementProfile,
    pub descriptors: Vec<DescriptorColumn>,
    pub filters: Vec<PassRate>,
}

struct Facts {
    flags: GroupFlags,
    scaffold: Option<CanonicalKey>,
    salt: bool,
    descriptors: DescriptorSet,
}

/// Summarize standardized molecules.
pub fn dataset_summary(mols: &[Molecule]) -> DatasetReport {
    let facts: Vec<Facts> = mols
        .par_iter()
        .map(|m| Facts {
            flags: GroupFlags::of(m),
            scaffold: generic_scaffold(m),
            salt: is_salt(m),
            descriptors: compute_descriptors(m),
        })
        .collect();
    let scaffolds: HashSet<&CanonicalKey> = facts.iter().filter_map(|f| f.scaffold.as_ref()).collect();
    let flags: Vec<GroupFlags> = facts.iter().map(|f| f.flags).collect();
    let sets: Vec<DescriptorSet> = facts.iter().map(|f| f.descriptors.clone()).collect();
    let mut columns: BTreeMap<usize, DescriptorColumn> = BTreeMap::new();
    for (k, name) in DescriptorSet::FIELDS.iter().enumerate() {
        let values: Vec<f64> = sets.iter().map(|d| d.value(name).expect("known field")).collect();
        let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
        columns.insert(
            k,
            DescriptorColumn {
                descriptor: name.to_string(),
                count: finite.len() as u64,
                non_finite: (values.len() - finite.len()) as u64,
                stats: OrderStats::of(&finite),
            },
        );
    }
    let names: Vec<&str> = catalog_names().into_iter().filter(|n| !SUBSTRUCTURE_FILTERS.contains(n)).collect();
    DatasetReport {
        schema_version: REPORT_SCHEMA_VERSION,
        percentile_method: "nearest-rank".into(),
        molecules: mols.len() as u64,
        unique_scaffolds: scaffolds.len() as u64,
        acyclic: facts.iter().filter(|f| f.scaffold.is_none()).count() as u64,
        salts: facts.iter().filter(|f| f.salt).count() as u64,
        element_groups: profile_from_flags(&flags),
        descriptors: columns.into_values().collect(),
        filters: filter_profile(&sets, &names).expect("catalog filters are registered"),
    }
}
