//! Canonical atom ranking.
//!
//! Atoms start in classes keyed by (element, isotope, charge, hydrogen count,
//! aromaticity, degree, ring membership). Classes are refined by the sorted
//! ranks of their neighbours until stable. Remaining ties are broken by an
//! individualization search that keeps the labeling whose labeled graph is
//! lexicographically smallest; automorphisms found along the way prune
//! equivalent branches. The canonical key is the SMILES string written in
//! that labeling, which is a complete invariant of the graph.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{write_smiles, BondOrder, Molecule};

/// Upper bound on explored leaves for pathologically symmetric graphs.
const LEAF_BUDGET: usize = 4096;

/// Atom-order independent identifier of a molecular graph (stereo ignored).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalKey(String);

impl CanonicalKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    /// Key length in bytes.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Rebuild a key from its serialized form without re-deriving it.
    pub fn from_canonical_string(s: impl Into<String>) -> CanonicalKey {
        CanonicalKey(s.into())
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Canonical key and canonical SMILES of a molecule.
pub fn canonicalize(mol: &Molecule) -> (CanonicalKey, String) {
    let ranks = canonical_ranks(mol);
    let smiles = write_smiles(mol, Some(&ranks));
    (CanonicalKey(smiles.clone()), smiles)
}

/// Discrete canonical rank per atom (a permutation of `0..n`).
pub fn canonical_ranks(mol: &Molecule) -> Vec<u32> {
    let g = LabeledGraph::new(mol);
    if g.n == 0 {
        return Vec::new();
    }
    let mut ranks = g.initial_partition();
    g.refine(&mut ranks);
    let mut search = Search { g: &g, first: None, best: None, automorphisms: Vec::new(), leaves: 0 };
    let mut prefix = Vec::new();
    search.explore(ranks, &mut prefix);
    search.best.expect("at least one leaf").1
}

/// Symmetry classes from neighbourhood refinement alone: atoms with equal
/// values are indistinguishable by iterated neighbour invariants.
pub fn symmetry_classes(mol: &Molecule) -> Vec<u32> {
    let g = LabeledGraph::new(mol);
    let mut ranks = g.initial_partition();
    g.refine(&mut ranks);
    ranks
}

pub(crate) fn bond_code(order: BondOrder, aromatic: bool) -> u8 {
    if aromatic {
        return 4;
    }
    match order {
        BondOrder::Single => 1,
        BondOrder::Double => 2,
        BondOrder::Triple => 3,
        BondOrder::Aromatic => 4,
    }
}

struct LabeledGraph {
    n: usize,
    labels: Vec<u64>,
    adj: Vec<Vec<(u32, u8)>>,
    in_ring: Vec<bool>,
}

impl LabeledGraph {
    fn new(mol: &Molecule) -> LabeledGraph {
        let n = mol.atom_count();
        let labels = mol
            .atoms()
            .iter()
            .map(|a| {
                ((a.element as u64) << 40)
                    | ((a.isotope as u64) << 24)
                    | (((a.formal_charge as i16 + 128) as u64) << 16)
                    | ((a.implicit_h as u64) << 8)
                    | a.aromatic as u64
            })
            .collect();
        let adj = (0..n)
            .map(|i| {
                mol.neighbors(i)
                    .iter()
                    .map(|nb| {
                        let b = mol.bond(nb.bond);
                        (nb.atom as u32, bond_code(b.order, b.aromatic))
                    })
                    .collect()
            })
            .collect();
        let in_ring = mol.atoms().iter().map(|a| a.in_ring).collect();
        LabeledGraph { n, labels, adj, in_ring }
    }

    fn initial_partition(&self) -> Vec<u32> {
        let key = |i: usize| (self.labels[i], self.adj[i].len(), self.in_ring[i]);
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&i| key(i));
        let mut ranks = vec![0u32; self.n];
        let mut start = 0;
        for pos in 0..order.len() {
            if pos > 0 && key(order[pos]) != key(order[pos - 1]) {
                start = pos;
            }
            ranks[order[pos]] = start as u32;
        }
        ranks
    }

    /// Refine `ranks` (cell-start encoding) to the coarsest equitable
    /// partition finer than it.
    fn refine(&self, ranks: &mut [u32]) {
        let mut cells = count_cells(ranks);
        let mut order: Vec<usize> = (0..self.n).collect();
        let mut sigs: Vec<Vec<u64>> = vec![Vec::new(); self.n];
        loop {
            if cells == self.n {
                return;
            }
            for (i, sig) in sigs.iter_mut().enumerate() {
                sig.clear();
                sig.push(ranks[i] as u64);
                let start = sig.len();
                sig.extend(self.adj[i].iter().map(|&(j, code)| ((ranks[j as usize] as u64) << 8) | code as u64));
                sig[start..].sort_unstable();
            }
            order.sort_by(|&a, &b| sigs[a].cmp(&sigs[b]));
            let mut start = 0;
            let mut new_ranks = vec![0u32; self.n];
            for pos in 0..self.n {
                if pos > 0 && sigs[order[pos]] != sigs[order[pos - 1]] {
                    start = pos;
                }
                new_ranks[order[pos]] = start as u32;
            }
            let new_cells = count_cells(&new_ranks);
            ranks.copy_from_slice(&new_ranks);
            if new_cells == cells {
                return;
            }
            cells = new_cells;
        }
    }

    /// Labeled-graph certificate for a discrete ranking.
    fn certificate(&self, ranks: &[u32]) -> Vec<u64> {
        let mut lab = vec![0usize; self.n];
        for (atom, &r) in ranks.iter().enumerate() {
            lab[r as usize] = atom;
        }
        let mut cert = Vec::with_capacity(self.n * 3);
        cert.extend(lab.iter().map(|&a| self.labels[a]));
        let mut edges = Vec::new();
        for (pos, &a) in lab.iter().enumerate() {
            edges.clear();
            for &(j, code) in &self.adj[a] {
                let r = ranks[j as usize] as u64;
                if r > pos as u64 {
                    edges.push(((pos as u64) << 34) | (r << 4) | code as u64);
                }
            }
            edges.sort_unstable();
            cert.extend_from_slice(&edges);
        }
        cert
    }
}

fn count_cells(ranks: &[u32]) -> usize {
    let mut seen = vec![false; ranks.len()];
    let mut count = 0;
    for &r in ranks {
        if !seen[r as usize] {
            seen[r as usize] = true;
            count += 1;
        }
    }
    count
}

struct Search<'a> {
    g: &'a LabeledGraph,
    first: Option<(Vec<u64>, Vec<u32>)>,
    best: Option<(Vec<u64>, Vec<u32>)>,
    automorphisms: Vec<Vec<u32>>,
    leaves: usize,
}

impl Search<'_> {
    fn explore(&mut self, mut ranks: Vec<u32>, prefix: &mut Vec<u32>) {
        self.g.refine(&mut ranks);
        let Some(cell) = target_cell(&ranks) else {
            self.leaf(ranks);
            return;
        };
        let mut tried: Vec<u32> = Vec::new();
        for &v in &cell {
            if !tried.is_empty() && self.leaves >= LEAF_BUDGET {
                break;
            }
            if !tried.is_empty() && self.same_orbit(&tried, v, prefix) {
                continue;
            }
            tried.push(v);
            let mut child = ranks.clone();
            let start = ranks[v as usize];
            for &w in &cell {
                child[w as usize] = start + 1;
            }
            child[v as usize] = start;
            prefix.push(v);
            self.explore(child, prefix);
            prefix.pop();
        }
    }

    fn leaf(&mut self, ranks: Vec<u32>) {
        self.leaves += 1;
        let cert = self.g.certificate(&ranks);
        match &self.first {
            None => {
                self.first = Some((cert.clone(), ranks.clone()));
            }
            Some((first_cert, first_ranks)) => {
                if *first_cert == cert {
                    self.automorphisms.push(automorphism(first_ranks, &ranks));
                }
            }
        }
        match &self.best {
            None => self.best = Some((cert, ranks)),
            Some((best_cert, best_ranks)) => match cert.cmp(best_cert) {
                std::cmp::Ordering::Less => self.best = Some((cert, ranks)),
                std::cmp::Ordering::Equal => {
                    let gamma = automorphism(best_ranks, &ranks);
                    if !self.automorphisms.contains(&gamma) {
                        self.automorphisms.push(gamma);
                    }
                }
                std::cmp::Ordering::Greater => {}
            },
        }
    }

    /// Is `v` in the orbit of an already explored member under the
    /// automorphisms that fix the current prefix pointwise?
    fn same_orbit(&self, tried: &[u32], v: u32, prefix: &[u32]) -> bool {
        let n = self.g.n;
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(p: &mut [u32], mut x: u32) -> u32 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        let mut any = false;
        for gamma in &self.automorphisms {
            if prefix.iter().any(|&a| gamma[a as usize] != a) {
                continue;
            }
            any = true;
            for (a, &b) in gamma.iter().enumerate() {
                let (ra, rb) = (find(&mut parent, a as u32), find(&mut parent, b));
                if ra != rb {
                    parent[ra as usize] = rb;
                }
            }
        }
        if !any {
            return false;
        }
        let rv = find(&mut parent, v);
        tried.iter().any(|&t| find(&mut parent, t) == rv)
    }
}

/// Map from atoms labeled in `from` to the atoms at the same positions in `to`.
fn automorphism(from: &[u32], to: &[u32]) -> Vec<u32> {
    let n = from.len();
    let mut lab_to = vec![0u32; n];
    for (atom, &r) in to.iter().enumerate() {
        lab_to[r as usize] = atom as u32;
    }
    (0..n).map(|a| lab_to[from[a] as usize]).collect()
}

/// Members of the first non-singleton cell, in atom order.
fn target_cell(ranks: &[u32]) -> Option<Vec<u32>> {
    let n = ranks.len();
    let mut size = vec![0u32; n];
    for &r in ranks {
        size[r as usize] += 1;
    }
    let target = (0..n).find(|&r| size[r] > 1)? as u32;
    Some((0..n as u32).filter(|&a| ranks[a as usize] == target).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    fn key(s: &str) -> CanonicalKey {
        canonicalize(&parse_smiles(s).unwrap()).0
    }

    #[test]
    fn atom_order_does_not_matter() {
        assert_eq!(key("OCC"), key("CCO"));
        assert_eq!(key("C(C)(C)O"), key("CC(O)C"));
        assert_eq!(key("c1ccccc1O"), key("Oc1ccccc1"));
        assert_eq!(key("[Na+].[Cl-]"), key("[Cl-].[Na+]"));
    }

    #[test]
    fn isomers_differ() {
        assert_ne!(key("CCO"), key("COC"));
        assert_ne!(key("CC(C)C"), key("CCCC"));
        assert_ne!(key("Cc1ccccc1C"), key("Cc1cccc(C)c1"));
        assert_ne!(key("[13CH4]"), key("C"));
        assert_ne!(key("C[NH3+]"), key("CN"));
    }

    #[test]
    fn stereo_is_ignored() {
        assert_eq!(key("C[C@H](N)O"), key("C[C@@H](N)O"));
        assert_eq!(key("F/C=C/F"), key("F/C=C\\F"));
    }

    #[test]
    fn symmetric_graphs_are_stable() {
        // highly symmetric cages exercise the automorphism pruning
        let cubane = parse_smiles("C12C3C4C1C5C2C3C45").unwrap();
        let k = canonicalize(&cubane).0;
        let n = cubane.atom_count();
        let rev: Vec<usize> = (0..n).rev().collect();
        assert_eq!(canonicalize(&cubane.permuted(&rev)).0, k);
        let neo = parse_smiles("CC(C)(C)C(C(C)(C)C)(C(C)(C)C)C(C)(C)C").unwrap();
        let k2 = canonicalize(&neo).0;
        let rot: Vec<usize> = (0..neo.atom_count()).map(|i| (i + 7) % neo.atom_count()).collect();
        assert_eq!(canonicalize(&neo.permuted(&rot)).0, k2);
    }

    #[test]
    fn ranks_are_a_permutation() {
        let m = parse_smiles("CC(=O)Oc1ccccc1C(=O)O").unwrap();
        let mut r = canonical_ranks(&m);
        r.sort_unstable();
        assert_eq!(r, (0..m.atom_count() as u32).collect::<Vec<_>>());
    }

    #[test]
    fn symmetry_classes_group_equivalent_atoms() {
        let m = parse_smiles("CC(C)O").unwrap();
        let c = symmetry_classes(&m);
        assert_eq!(c[0], c[2]);
        assert_ne!(c[0], c[1]);
    }
}
