//! Physicochemical descriptors used by the feasibility filter and the
//! drug-likeness filter catalog.

mod crippen;
mod tpsa;

use serde::{Deserialize, Serialize};

pub use crippen::{atom_classes, crippen_logp_mr};
pub use tpsa::{atom_contribution as tpsa_atom_contribution, tpsa, tpsa_with};

use crate::molgraph::element::{atomic_weight, BROMINE, CARBON, CHLORINE, FLUORINE, HYDROGEN, NITROGEN, OXYGEN, SULFUR};
use crate::molgraph::{fragment_count, symmetry_classes, BondOrder, Molecule};

/// Which bonds count as rotatable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RotatableMode {
    /// Single, non-ring bonds between non-terminal atoms, excluding bonds
    /// next to triple bonds, to CX3/C(CH3)3 groups, and amide-like C-N,
    /// C-O and C-S bonds.
    #[default]
    Strict,
    /// Single, non-ring bonds between non-terminal atoms not in a triple bond.
    NonStrict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DescriptorOptions {
    pub rotatable: RotatableMode,
    /// Let sulfur and phosphorus contribute to TPSA.
    pub tpsa_s_and_p: bool,
}

/// Every descriptor the filters refer to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorSet {
    /// Daltons, implicit hydrogens included.
    pub mol_weight: f64,
    /// Heavy atoms plus all hydrogens.
    pub n_atoms: u32,
    pub n_heavy: u32,
    pub n_fragments: u32,
    pub hba: u32,
    pub hbd: u32,
    pub logp: f64,
    pub mr: f64,
    pub tpsa: f64,
    pub n_rot_bonds: u32,
    pub n_rigid_bonds: u32,
    pub n_rings: u32,
    pub max_ring_size: u32,
    pub n_carbons: u32,
    pub n_heteroatoms: u32,
    /// Heteroatoms per carbon. Infinite for carbon-free molecules with
    /// heteroatoms, 0 for carbon-free molecules without.
    pub hetero_carbon_ratio: f64,
    pub n_charged_groups: u32,
    pub total_charge: i32,
    pub n_aromatic_bonds: u32,
    pub n_stereocenters: u32,
}

impl DescriptorSet {
    /// Field names accepted by [`DescriptorSet::value`].
    pub const FIELDS: [&'static str; 20] = [
        "mol_weight",
        "n_atoms",
        "n_heavy",
        "n_fragments",
        "hba",
        "hbd",
        "logp",
        "mr",
        "tpsa",
        "n_rot_bonds",
        "n_rigid_bonds",
        "n_rings",
        "max_ring_size",
        "n_carbons",
        "n_heteroatoms",
        "hetero_carbon_ratio",
        "n_charged_groups",
        "total_charge",
        "n_aromatic_bonds",
        "n_stereocenters",
    ];

    /// Look up a descriptor by field name.
    pub fn value(&self, name: &str) -> Option<f64> {
        Some(match name {
            "mol_weight" => self.mol_weight,
            "n_atoms" => self.n_atoms as f64,
            "n_heavy" => self.n_heavy as f64,
            "n_fragments" => self.n_fragments as f64,
            "hba" => self.hba as f64,
            "hbd" => self.hbd as f64,
            "logp" => self.logp,
            "mr" => self.mr,
            "tpsa" => self.tpsa,
            "n_rot_bonds" => self.n_rot_bonds as f64,
            "n_rigid_bonds" => self.n_rigid_bonds as f64,
            "n_rings" => self.n_rings as f64,
            "max_ring_size" => self.max_ring_size as f64,
            "n_carbons" => self.n_carbons as f64,
            "n_heteroatoms" => self.n_heteroatoms as f64,
            "hetero_carbon_ratio" => self.hetero_carbon_ratio,
            "n_charged_groups" => self.n_charged_groups as f64,
            "total_charge" => self.total_charge as f64,
            "n_aromatic_bonds" => self.n_aromatic_bonds as f64,
            "n_stereocenters" => self.n_stereocenters as f64,
            _ => return None,
        })
    }
}

/// Descriptors with default options (strict rotatable bonds, N/O TPSA).
pub fn compute_descriptors(mol: &Molecule) -> DescriptorSet {
    compute_descriptors_with(mol, DescriptorOptions::default())
}

pub fn compute_descriptors_with(mol: &Molecule, opts: DescriptorOptions) -> DescriptorSet {
    let atoms = mol.atoms();
    let implicit: u32 = atoms.iter().map(|a| a.implicit_h as u32).sum();
    let h_weight = atomic_weight(HYDROGEN);
    let mol_weight = atoms.iter().map(|a| atomic_weight(a.element) + a.implicit_h as f64 * h_weight).sum();
    let n_heavy = atoms.iter().filter(|a| a.element != HYDROGEN).count() as u32;
    let n_carbons = atoms.iter().filter(|a| a.element == CARBON).count() as u32;
    let n_heteroatoms = n_heavy - n_carbons;
    let hetero_carbon_ratio = match (n_heteroatoms, n_carbons) {
        (0, 0) => 0.0,
        (_, 0) => f64::INFINITY,
        (h, c) => h as f64 / c as f64,
    };
    let polar = |z: u8| z == NITROGEN || z == OXYGEN;
    let hba = atoms.iter().filter(|a| polar(a.element)).count() as u32;
    let hbd = (0..mol.atom_count()).filter(|&i| polar(atoms[i].element)).map(|i| mol.total_h(i)).sum();
    let (logp, mr) = crippen_logp_mr(mol);
    let rotatable = rotatable_bonds(mol, opts.rotatable);
    let n_rigid_bonds = (0..mol.bond_count()).filter(|&b| !rotatable[b] && is_rigid(mol, b)).count() as u32;
    DescriptorSet {
        mol_weight,
        n_atoms: atoms.len() as u32 + implicit,
        n_heavy,
        n_fragments: fragment_count(mol) as u32,
        hba,
        hbd,
        logp,
        mr,
        tpsa: tpsa_with(mol, opts.tpsa_s_and_p),
        n_rot_bonds: rotatable.iter().filter(|&&r| r).count() as u32,
        n_rigid_bonds,
        n_rings: mol.rings().len() as u32,
        max_ring_size: mol.rings().iter().map(|r| r.len() as u32).max().unwrap_or(0),
        n_carbons,
        n_heteroatoms,
        hetero_carbon_ratio,
        n_charged_groups: atoms.iter().filter(|a| a.formal_charge != 0).count() as u32,
        total_charge: atoms.iter().map(|a| a.formal_charge as i32).sum(),
        n_aromatic_bonds: mol.bonds().iter().filter(|b| b.aromatic).count() as u32,
        n_stereocenters: stereocenters(mol).len() as u32,
    }
}

fn in_triple_bond(mol: &Molecule, a: usize) -> bool {
    mol.neighbors(a).iter().any(|nb| mol.bond(nb.bond).order == BondOrder::Triple)
}

fn is_aliphatic(mol: &Molecule, a: usize, z: u8) -> bool {
    let atom = mol.atom(a);
    atom.element == z && !atom.aromatic
}

/// Neither terminal, nor in a triple bond, nor the centre of CF3, CCl3,
/// CBr3 or C(CH3)3.
fn basic_end(mol: &Molecule, a: usize) -> bool {
    if mol.degree(a) == 1 || in_triple_bond(mol, a) {
        return false;
    }
    if !is_aliphatic(mol, a, CARBON) {
        return true;
    }
    let count = |pred: &dyn Fn(usize) -> bool| {
        mol.neighbors(a)
            .iter()
            .filter(|nb| {
                let b = mol.bond(nb.bond);
                (b.order == BondOrder::Single || b.aromatic) && pred(nb.atom)
            })
            .count()
    };
    for z in [FLUORINE, CHLORINE, BROMINE] {
        if count(&|n| is_aliphatic(mol, n, z)) >= 3 {
            return false;
        }
    }
    count(&|n| is_aliphatic(mol, n, CARBON) && mol.total_h(n) == 3) < 3
}

/// Aliphatic carbon with exactly three connections and a double bond to an
/// aliphatic N, O or S (any charge when `cation` is false, N+ otherwise).
fn is_acyl_like(mol: &Molecule, c: usize, cation: bool) -> bool {
    is_aliphatic(mol, c, CARBON)
        && mol.degree(c) == 3
        && mol.neighbors(c).iter().any(|nb| {
            let n = mol.atom(nb.atom);
            let b = mol.bond(nb.bond);
            b.order == BondOrder::Double
                && !b.aromatic
                && !n.aromatic
                && if cation {
                    n.element == NITROGEN && n.formal_charge == 1
                } else {
                    matches!(n.element, NITROGEN | OXYGEN | SULFUR)
                }
        })
}

fn plain_acyclic_single(mol: &Molecule, b: usize) -> bool {
    let bond = mol.bond(b);
    bond.order == BondOrder::Single && !bond.aromatic && !mol.bond_in_ring(b)
}

/// Amide-like partner: any N, aliphatic O, or aliphatic non-terminal S.
fn is_amide_partner(mol: &Molecule, x: usize, nitrogen_only: bool) -> bool {
    let atom = mol.atom(x);
    if atom.element == NITROGEN {
        return !nitrogen_only || mol.degree(x) != 1;
    }
    !nitrogen_only
        && !atom.aromatic
        && (atom.element == OXYGEN || (atom.element == SULFUR && mol.degree(x) != 1))
}

/// `basic_end` and not part of an amide, ester, thioester or amidinium
/// linkage through any acyclic single bond.
fn full_end(mol: &Molecule, a: usize) -> bool {
    if !basic_end(mol, a) {
        return false;
    }
    for nb in mol.neighbors(a) {
        if !plain_acyclic_single(mol, nb.bond) {
            continue;
        }
        let x = nb.atom;
        if is_acyl_like(mol, a, false) && is_amide_partner(mol, x, false) {
            return false;
        }
        if is_amide_partner(mol, a, false) && is_acyl_like(mol, x, false) {
            return false;
        }
        if is_acyl_like(mol, a, true) && is_amide_partner(mol, x, true) {
            return false;
        }
        if is_amide_partner(mol, a, true) && is_acyl_like(mol, x, true) {
            return false;
        }
    }
    true
}

/// Rotatable flag per bond.
pub fn rotatable_bonds(mol: &Molecule, mode: RotatableMode) -> Vec<bool> {
    (0..mol.bond_count())
        .map(|b| {
            let bond = mol.bond(b);
            let single = bond.order == BondOrder::Single || bond.aromatic;
            if !single || mol.bond_in_ring(b) {
                return false;
            }
            let (a, c) = (bond.begin, bond.end);
            match mode {
                RotatableMode::NonStrict => [a, c].iter().all(|&x| mol.degree(x) != 1 && !in_triple_bond(mol, x)),
                RotatableMode::Strict => {
                    (full_end(mol, a) && basic_end(mol, c)) || (full_end(mol, c) && basic_end(mol, a))
                }
            }
        })
        .collect()
}

/// Ring bonds, acyclic double and triple bonds, and amide C(=O)-N bonds.
fn is_rigid(mol: &Molecule, b: usize) -> bool {
    let bond = mol.bond(b);
    if mol.bond_in_ring(b) || bond.aromatic || bond.order != BondOrder::Single {
        return true;
    }
    let carbonyl = |c: usize| {
        mol.atom(c).element == CARBON
            && mol.neighbors(c).iter().any(|nb| {
                mol.bond(nb.bond).order == BondOrder::Double && mol.atom(nb.atom).element == OXYGEN
            })
    };
    let (a, c) = (bond.begin, bond.end);
    (carbonyl(a) && mol.atom(c).element == NITROGEN) || (carbonyl(c) && mol.atom(a).element == NITROGEN)
}

/// Tetrahedral carbons whose four substituents are pairwise inequivalent
/// under graph symmetry.
pub fn stereocenters(mol: &Molecule) -> Vec<usize> {
    let classes = symmetry_classes(mol);
    (0..mol.atom_count())
        .filter(|&a| {
            let atom = mol.atom(a);
            let nbrs = mol.neighbors(a);
            let h = mol.total_h(a) as usize;
            // explicit hydrogen neighbours are folded into the hydrogen count
            let heavy: Vec<usize> = nbrs.iter().map(|nb| nb.atom).filter(|&n| !mol.atom(n).is_hydrogen()).collect();
            if atom.element != CARBON
                || atom.aromatic
                || heavy.len() + h != 4
                || h > 1
                || nbrs.iter().any(|nb| mol.bond(nb.bond).order != BondOrder::Single)
            {
                return false;
            }
            let mut seen: Vec<u32> = heavy.iter().map(|&n| classes[n]).collect();
            seen.sort_unstable();
            seen.windows(2).all(|w| w[0] != w[1])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;
    use crate::standardizer::standardize;

    fn d(s: &str) -> DescriptorSet {
        compute_descriptors(&standardize(&parse_smiles(s).unwrap()).unwrap())
    }

    fn rot(s: &str, mode: RotatableMode) -> u32 {
        let m = standardize(&parse_smiles(s).unwrap()).unwrap();
        rotatable_bonds(&m, mode).iter().filter(|&&r| r).count() as u32
    }

    #[test]
    fn water_and_ethanol() {
        let w = d("O");
        assert!((w.mol_weight - 18.015).abs() < 1e-9);
        // donors count hydrogens, so water has two
        assert_eq!((w.hba, w.hbd, w.n_rot_bonds, w.n_atoms, w.n_heavy), (1, 2, 0, 3, 1));
        let e = d("CCO");
        assert!((e.mol_weight - 46.069).abs() < 1e-9);
        assert_eq!((e.hba, e.hbd, e.n_rot_bonds, e.n_atoms), (1, 1, 0, 9));
    }

    #[test]
    fn salt_counts() {
        let s = d("[Na+].[Cl-]");
        assert_eq!((s.n_fragments, s.total_charge, s.n_charged_groups), (2, 0, 2));
        assert_eq!(s.n_carbons, 0);
        assert_eq!(s.hetero_carbon_ratio, f64::INFINITY);
    }

    #[test]
    fn strict_rotatable_bonds() {
        for (s, n) in [
            ("CC(=O)NCC", 1),
            ("CCC(=O)OCC", 2),
            ("CCC(F)(F)F", 0),
            ("CCC(C)(C)C", 0),
            ("CCC#CC", 0),
            ("CC(=S)NC", 0),
            ("CC(=N)NC", 0),
            ("c1ccccc1-c1ccccc1", 1),
            ("CC(=O)OC", 0),
            ("CCNC(=O)NCC", 2),
            ("CCS(=O)(=O)NC", 2),
            ("CCOc1ccccc1", 2),
        ] {
            assert_eq!(rot(s, RotatableMode::Strict), n, "{s}");
        }
    }

    #[test]
    fn non_strict_counts_amides() {
        assert_eq!(rot("CC(=O)NCC", RotatableMode::NonStrict), 2);
        assert_eq!(rot("CCC#CC", RotatableMode::NonStrict), 0);
        assert_eq!(rot("CC(C)(C)CC", RotatableMode::NonStrict), 1);
        assert_eq!(rot("CC(C)(C)CC", RotatableMode::Strict), 0);
    }

    #[test]
    fn rotatable_and_rigid_never_exceed_bonds() {
        for s in ["CC(=O)NCC", "c1ccccc1C(=O)NC", "CC=CC#N", "C1CC1C(=O)O"] {
            let m = standardize(&parse_smiles(s).unwrap()).unwrap();
            let ds = compute_descriptors(&m);
            assert!(ds.n_rot_bonds + ds.n_rigid_bonds <= m.bond_count() as u32, "{s}");
        }
        assert_eq!(d("CC(=O)NC").n_rigid_bonds, 2);
        assert_eq!(d("c1ccccc1").n_rigid_bonds, 6);
    }

    #[test]
    fn stereocenter_counts() {
        assert_eq!(d("CC(O)CC").n_stereocenters, 1);
        assert_eq!(d("CC(C)O").n_stereocenters, 0);
        assert_eq!(d("OC(F)(Cl)Br").n_stereocenters, 1);
        assert_eq!(d("CC(O)C(O)C").n_stereocenters, 2);
    }

    #[test]
    fn ring_and_aromatic_counts() {
        let n = d("c1ccc2ccccc2c1");
        assert_eq!((n.n_rings, n.max_ring_size, n.n_aromatic_bonds), (2, 6, 11));
    }

    #[test]
    fn ch2_adds_exact_weight() {
        let a = d("CCCC");
        let b = d("CCCCC");
        assert!((b.mol_weight - a.mol_weight - 14.027).abs() < 1e-9);
        assert!(b.logp >= a.logp);
    }

    #[test]
    fn value_lookup_covers_every_field() {
        let e = d("CCO");
        for f in DescriptorSet::FIELDS {
            assert!(e.value(f).is_some(), "{f}");
        }
        assert!(e.value("bogus").is_none());
    }
}
