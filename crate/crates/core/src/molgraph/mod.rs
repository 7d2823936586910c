//! Molecular graph model, SMILES reading/writing, ring perception and
//! canonicalization.

mod canon;
pub mod element;
mod rings;
mod smiles;
pub mod valence;
mod writer;

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

pub(crate) use canon::bond_code;
pub use canon::{canonical_ranks, canonicalize, symmetry_classes, CanonicalKey};
pub use smiles::{parse_smiles, SmilesError, SmilesErrorKind};
pub use writer::write_smiles;

/// Bond multiplicity. `Aromatic` is the unresolved state of a bond read from
/// lowercase SMILES before kekulization assigns it an integer order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Integer order; unresolved aromatic bonds count as 1.
    pub fn valence_contribution(self) -> u32 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }

    pub fn from_integer(order: u32) -> Option<BondOrder> {
        match order {
            1 => Some(BondOrder::Single),
            2 => Some(BondOrder::Double),
            3 => Some(BondOrder::Triple),
            _ => None,
        }
    }
}

/// Tetrahedral chirality annotation as written in the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Chirality {
    #[default]
    None,
    /// `@`
    Anticlockwise,
    /// `@@`
    Clockwise,
    /// Any other `@` class (`@TH1`, `@SP2`, ...).
    Other,
}

/// Double-bond geometry marker carried by a single bond (`/` or `\`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BondDirection {
    #[default]
    None,
    Up,
    Down,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    /// Atomic number.
    pub element: u8,
    pub formal_charge: i8,
    /// Mass number, 0 when unspecified.
    pub isotope: u16,
    pub implicit_h: u8,
    pub aromatic: bool,
    /// Set by ring perception; ignored on input.
    pub in_ring: bool,
    pub chirality: Chirality,
}

impl Atom {
    pub fn new(element: u8) -> Atom {
        Atom {
            element,
            formal_charge: 0,
            isotope: 0,
            implicit_h: 0,
            aromatic: false,
            in_ring: false,
            chirality: Chirality::None,
        }
    }

    pub fn symbol(&self) -> &'static str {
        element::symbol(self.element)
    }

    pub fn is_hydrogen(&self) -> bool {
        self.element == element::HYDROGEN
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bond {
    pub begin: usize,
    pub end: usize,
    pub order: BondOrder,
    pub aromatic: bool,
    pub direction: BondDirection,
}

impl Bond {
    pub fn new(begin: usize, end: usize, order: BondOrder) -> Bond {
        Bond {
            begin,
            end,
            aromatic: order == BondOrder::Aromatic,
            order,
            direction: BondDirection::None,
        }
    }

    pub fn other(&self, atom: usize) -> usize {
        if self.begin == atom {
            self.end
        } else {
            self.begin
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("bond {bond} references missing atom {atom}")]
    MissingAtom { bond: usize, atom: usize },
    #[error("bond {bond} joins atom {atom} to itself")]
    SelfLoop { bond: usize, atom: usize },
    #[error("duplicate bond between atoms {0} and {1}")]
    DuplicateBond(usize, usize),
    #[error("atom {0} is aromatic but not in a ring")]
    AromaticOutsideRing(usize),
}

/// Neighbour entry: adjacent atom and the connecting bond index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    pub atom: usize,
    pub bond: usize,
}

/// Immutable molecular graph with perceived rings.
#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<Neighbor>>,
    rings: Vec<Vec<usize>>,
    bond_in_ring: Vec<bool>,
}

impl Molecule {
    /// Build a molecule, validating the bond table and perceiving rings.
    pub fn new(mut atoms: Vec<Atom>, bonds: Vec<Bond>) -> Result<Molecule, GraphError> {
        let n = atoms.len();
        let mut seen = HashSet::with_capacity(bonds.len());
        let mut adjacency = vec![Vec::new(); n];
        for (i, b) in bonds.iter().enumerate() {
            for atom in [b.begin, b.end] {
                if atom >= n {
                    return Err(GraphError::MissingAtom { bond: i, atom });
                }
            }
            if b.begin == b.end {
                return Err(GraphError::SelfLoop { bond: i, atom: b.begin });
            }
            let pair = (b.begin.min(b.end), b.begin.max(b.end));
            if !seen.insert(pair) {
                return Err(GraphError::DuplicateBond(pair.0, pair.1));
            }
            adjacency[b.begin].push(Neighbor { atom: b.end, bond: i });
            adjacency[b.end].push(Neighbor { atom: b.begin, bond: i });
        }
        let perception = rings::perceive(n, &bonds, &adjacency);
        for (i, atom) in atoms.iter_mut().enumerate() {
            atom.in_ring = perception.atom_in_ring[i];
            if atom.aromatic && !atom.in_ring {
                return Err(GraphError::AromaticOutsideRing(i));
            }
        }
        for (i, b) in bonds.iter().enumerate() {
            if b.aromatic && !perception.bond_in_ring[i] {
                return Err(GraphError::AromaticOutsideRing(b.begin));
            }
        }
        Ok(Molecule {
            atoms,
            bonds,
            adjacency,
            rings: perception.rings,
            bond_in_ring: perception.bond_in_ring,
        })
    }

    pub fn empty() -> Molecule {
        Molecule {
            atoms: Vec::new(),
            bonds: Vec::new(),
            adjacency: Vec::new(),
            rings: Vec::new(),
            bond_in_ring: Vec::new(),
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn bond(&self, i: usize) -> &Bond {
        &self.bonds[i]
    }

    pub fn neighbors(&self, atom: usize) -> &[Neighbor] {
        &self.adjacency[atom]
    }

    /// Smallest set of smallest rings, each as an ordered atom cycle.
    pub fn rings(&self) -> &[Vec<usize>] {
        &self.rings
    }

    pub fn bond_in_ring(&self, bond: usize) -> bool {
        self.bond_in_ring[bond]
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Number of explicit graph neighbours.
    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    /// Hydrogens on `atom`: implicit count plus explicit hydrogen neighbours.
    pub fn total_h(&self, atom: usize) -> u32 {
        let explicit = self.adjacency[atom]
            .iter()
            .filter(|nb| self.atoms[nb.atom].is_hydrogen())
            .count() as u32;
        self.atoms[atom].implicit_h as u32 + explicit
    }

    /// Non-hydrogen neighbours.
    pub fn heavy_degree(&self, atom: usize) -> usize {
        self.adjacency[atom]
            .iter()
            .filter(|nb| !self.atoms[nb.atom].is_hydrogen())
            .count()
    }

    /// Sum of bond orders, unresolved aromatic bonds counted as 1.
    pub fn explicit_valence(&self, atom: usize) -> u32 {
        self.adjacency[atom]
            .iter()
            .map(|nb| self.bonds[nb.bond].order.valence_contribution())
            .sum()
    }

    /// Bond index joining two atoms, if any.
    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a].iter().find(|nb| nb.atom == b).map(|nb| nb.bond)
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.atoms.iter().filter(|a| !a.is_hydrogen()).count()
    }

    /// Connected-component id per atom and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.atoms.len();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            stack.push(start);
            while let Some(a) = stack.pop() {
                for nb in &self.adjacency[a] {
                    if comp[nb.atom] == usize::MAX {
                        comp[nb.atom] = count;
                        stack.push(nb.atom);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// Take the atom and bond tables back out for editing.
    pub fn into_parts(self) -> (Vec<Atom>, Vec<Bond>) {
        (self.atoms, self.bonds)
    }

    /// Induced subgraph on `keep` (in the given order). Returns the new
    /// molecule and the old-to-new index map.
    pub fn subgraph(&self, keep: &[usize]) -> (Molecule, Vec<Option<usize>>) {
        let mut map = vec![None; self.atoms.len()];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = Some(new);
        }
        let atoms: Vec<Atom> = keep.iter().map(|&i| self.atoms[i].clone()).collect();
        let bonds: Vec<Bond> = self
            .bonds
            .iter()
            .filter_map(|b| {
                let (x, y) = (map[b.begin]?, map[b.end]?);
                Some(Bond { begin: x, end: y, ..b.clone() })
            })
            .collect();
        let mol = Molecule::new(atoms, bonds).expect("induced subgraph of a valid graph is valid");
        (mol, map)
    }

    /// Renumber atoms: new atom `i` is old atom `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Molecule {
        assert_eq!(order.len(), self.atoms.len());
        self.subgraph(order).0
    }
}

impl fmt::Display for Molecule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_smiles(self, None))
    }
}

/// Connected components as separate molecules, largest (by heavy atoms)
/// first, ties broken by canonical key.
pub fn fragments(mol: &Molecule) -> Vec<Molecule> {
    let (comp, count) = mol.components();
    if count <= 1 {
        return vec![mol.clone()];
    }
    let mut members = vec![Vec::new(); count];
    for (atom, &c) in comp.iter().enumerate() {
        members[c].push(atom);
    }
    let mut frags: Vec<(usize, CanonicalKey, Molecule)> = members
        .iter()
        .map(|atoms| {
            let (frag, _) = mol.subgraph(atoms);
            let key = canonicalize(&frag).0;
            (frag.heavy_atom_count(), key, frag)
        })
        .collect();
    frags.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    frags.into_iter().map(|(_, _, m)| m).collect()
}

/// Number of connected components.
pub fn fragment_count(mol: &Molecule) -> usize {
    mol.components().1
}
