//! Structure standardization.
//!
//! Steps, in order:
//! 1. valence check against the permissive table
//! 2. aromatic bonds from the input are resolved to a Kekulé form
//! 3. explicit hydrogens folded into implicit counts
//! 4. metal disconnection (groups 1, 2 and Zn from N, O and halogens)
//! 5. functional-group normalization to a fixed point
//! 6. reionization of adjacent +/- pairs on N and O
//! 7. Hückel aromaticity perception on the final Kekulé graph
//! 8. valence check against the strict table
//!
//! Perception runs on a Kekulé form, so the input's aromatic bonds are
//! resolved first and perception is done once all bond edits are final.
//! Output bonds always carry integer orders; aromatic bonds are flagged.

mod aromaticity;
mod kekulize;
mod matching;
mod normalize;

use thiserror::Error;

use crate::molgraph::valence::{fill_valence, ValenceMode};
use crate::molgraph::{Atom, Bond, BondOrder, GraphError, Molecule};

pub use normalize::TRANSFORMS;

/// Standardization stopped at `step`; the record cannot be used.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{step}: {detail}")]
pub struct StandardizationFailure {
    pub step: &'static str,
    pub detail: String,
}

impl StandardizationFailure {
    fn new(step: &'static str, detail: impl Into<String>) -> StandardizationFailure {
        StandardizationFailure { step, detail: detail.into() }
    }
}

/// Editable atom and bond tables.
#[derive(Debug, Clone)]
pub(crate) struct Draft {
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
}

impl Draft {
    pub fn from_molecule(mol: &Molecule) -> Draft {
        let (atoms, bonds) = mol.clone().into_parts();
        Draft { atoms, bonds }
    }

    /// Neighbour list as (atom, bond) pairs.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.atoms.len()];
        for (i, b) in self.bonds.iter().enumerate() {
            adj[b.begin].push((b.end, i));
            adj[b.end].push((b.begin, i));
        }
        adj
    }

    /// Bond-order sum plus implicit hydrogens; unresolved aromatic bonds count 1.
    pub fn used_valences(&self) -> Vec<u32> {
        let mut used: Vec<u32> = self.atoms.iter().map(|a| a.implicit_h as u32).collect();
        for b in &self.bonds {
            let v = b.order.valence_contribution();
            used[b.begin] += v;
            used[b.end] += v;
        }
        used
    }

    pub fn build(self) -> Result<Molecule, GraphError> {
        Molecule::new(self.atoms, self.bonds)
    }
}

/// Run the full standardization sequence.
pub fn standardize(mol: &Molecule) -> Result<Molecule, StandardizationFailure> {
    let mut draft = Draft::from_molecule(mol);
    check_valence(&draft, ValenceMode::Permissive)?;
    kekulize::kekulize(&mut draft)?;
    fold_hydrogens(&mut draft);
    normalize::disconnect_metals(&mut draft);
    normalize::normalize(&mut draft);
    normalize::reionize(&mut draft);
    let mut draft = Draft::from_molecule(&build(draft)?);
    let kekule = build(draft.clone())?;
    let (atom_flags, bond_flags) = aromaticity::perceive(&kekule);
    for (a, f) in draft.atoms.iter_mut().zip(atom_flags) {
        a.aromatic = f;
    }
    for (b, f) in draft.bonds.iter_mut().zip(bond_flags) {
        b.aromatic = f;
    }
    check_valence(&draft, ValenceMode::Strict)?;
    build(draft)
}

/// Remove metal-to-N/O/halogen bonds (groups 1 and 2 plus Zn), transferring
/// one unit of charge per bond order from metal to partner.
pub fn disconnect_metals(mol: &Molecule) -> Molecule {
    let mut draft = Draft::from_molecule(mol);
    if !normalize::disconnect_metals(&mut draft) {
        return mol.clone();
    }
    match draft.clone().build() {
        Ok(m) => m,
        // a removed bond closed an aromatic ring: drop the flags on atoms
        // that left every ring
        Err(_) => {
            let plain = Draft {
                atoms: draft.atoms.iter().cloned().map(|a| Atom { aromatic: false, ..a }).collect(),
                bonds: draft.bonds.iter().cloned().map(|b| Bond { aromatic: false, ..b }).collect(),
            };
            plain.build().expect("flag-free graph is valid")
        }
    }
}

/// Resolve aromatic bonds into alternating single/double bonds.
pub fn kekulize(mol: &Molecule) -> Result<Molecule, StandardizationFailure> {
    let mut draft = Draft::from_molecule(mol);
    kekulize::kekulize(&mut draft)?;
    build(draft)
}

fn build(draft: Draft) -> Result<Molecule, StandardizationFailure> {
    draft.build().map_err(|e| StandardizationFailure::new("graph", e.to_string()))
}

fn check_valence(draft: &Draft, mode: ValenceMode) -> Result<(), StandardizationFailure> {
    let used = draft.used_valences();
    for (i, a) in draft.atoms.iter().enumerate() {
        // out-of-table atoms (metals) are not checked
        if crate::molgraph::valence::allowed_valences(a.element, a.formal_charge, mode).is_none() {
            continue;
        }
        if fill_valence(a.element, a.formal_charge, used[i], mode).is_none() {
            return Err(StandardizationFailure::new(
                "valence",
                format!("{}{:+} atom {i} has valence {}", a.symbol(), a.formal_charge, used[i]),
            ));
        }
    }
    Ok(())
}

/// Fold plain hydrogens bonded to exactly one heavy atom into that atom's
/// implicit count. Isotopic or charged hydrogens and H2 stay explicit.
fn fold_hydrogens(draft: &mut Draft) {
    let adj = draft.adjacency();
    let mut remove = vec![false; draft.atoms.len()];
    for (i, a) in draft.atoms.iter().enumerate() {
        if !a.is_hydrogen() || a.isotope != 0 || a.formal_charge != 0 || a.implicit_h != 0 || adj[i].len() != 1 {
            continue;
        }
        let (heavy, bond) = adj[i][0];
        if draft.atoms[heavy].is_hydrogen() || draft.bonds[bond].order != BondOrder::Single {
            continue;
        }
        remove[i] = true;
    }
    if !remove.iter().any(|&r| r) {
        return;
    }
    for (i, &r) in remove.iter().enumerate() {
        if r {
            let heavy = adj[i][0].0;
            draft.atoms[heavy].implicit_h += 1;
        }
    }
    let mut map = vec![usize::MAX; draft.atoms.len()];
    let mut atoms = Vec::with_capacity(draft.atoms.len());
    for (i, a) in draft.atoms.drain(..).enumerate() {
        if !remove[i] {
            map[i] = atoms.len();
            atoms.push(a);
        }
    }
    draft.atoms = atoms;
    draft.bonds = std::mem::take(&mut draft.bonds)
        .into_iter()
        .filter(|b| !remove[b.begin] && !remove[b.end])
        .map(|b| Bond { begin: map[b.begin], end: map[b.end], ..b })
        .collect();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::{canonicalize, fragment_count, parse_smiles};

    fn std_smiles(s: &str) -> String {
        canonicalize(&standardize(&parse_smiles(s).unwrap()).unwrap()).1
    }

    fn canon(s: &str) -> String {
        canonicalize(&parse_smiles(s).unwrap()).1
    }

    #[test]
    fn ethanol_unchanged() {
        assert_eq!(std_smiles("CCO"), canon("CCO"));
    }

    #[test]
    fn kekule_and_aromatic_inputs_converge() {
        assert_eq!(std_smiles("C1=CC=CC=C1"), std_smiles("c1ccccc1"));
        assert_eq!(std_smiles("C1=CC=CN=C1"), std_smiles("c1ccncc1"));
        assert_eq!(std_smiles("C1=CC=CC=C1"), canon("c1ccccc1"));
    }

    #[test]
    fn nitro_is_charge_separated() {
        assert_eq!(std_smiles("N(=O)(=O)c1ccccc1"), std_smiles("[O-][N+](=O)c1ccccc1"));
        assert_eq!(std_smiles("CN(=O)=O"), canon("C[N+](=O)[O-]"));
    }

    #[test]
    fn other_transforms() {
        assert_eq!(std_smiles("CN=N#N"), canon("CN=[N+]=[N-]"));
        assert_eq!(std_smiles("C=N#N"), canon("C=[N+]=[N-]"));
        assert_eq!(std_smiles("CS(C)=O"), canon("C[S+](C)[O-]"));
        assert_eq!(std_smiles("CS(C)(=O)=O"), canon("CS(C)(=O)=O"));
        assert_eq!(std_smiles("CN(C)(C)=O"), canon("C[N+](C)(C)[O-]"));
        assert_eq!(std_smiles("O=n1ccccc1"), canon("[O-][n+]1ccccc1"));
        assert_eq!(std_smiles("C[P+](C)(C)[O-]"), canon("CP(C)(C)=O"));
    }

    #[test]
    fn metals_disconnected() {
        let m = standardize(&parse_smiles("[Na]OC").unwrap()).unwrap();
        assert_eq!(fragment_count(&m), 2);
        assert_eq!(canonicalize(&m).1, canon("[Na+].C[O-]"));
        assert_eq!(std_smiles("[K]Cl"), canon("[K+].[Cl-]"));
        assert_eq!(std_smiles("Cl[Zn]Cl"), canon("[Cl-].[Cl-].[Zn+2]"));
        // transition metals stay bonded
        assert_eq!(fragment_count(&standardize(&parse_smiles("Cl[Fe]Cl").unwrap()).unwrap()), 1);
    }

    #[test]
    fn explicit_hydrogens_folded() {
        assert_eq!(std_smiles("[H]C([H])([H])O[H]"), canon("CO"));
        assert_eq!(std_smiles("[2H]C"), canon("[2H]C"));
        assert_eq!(std_smiles("[H][H]"), canon("[H][H]"));
    }

    #[test]
    fn reionizes_adjacent_pair() {
        assert_eq!(std_smiles("C[N+][O-]"), canon("CN=O"));
        // an N-oxide has no neutral form within the strict table
        assert_eq!(std_smiles("C[N+](C)(C)[O-]"), canon("C[N+](C)(C)[O-]"));
    }

    #[test]
    fn failures_name_their_step() {
        assert_eq!(standardize(&parse_smiles("c1cccc1").unwrap()).unwrap_err().step, "kekulize");
        assert_eq!(standardize(&parse_smiles("CN(C)(C)=C").unwrap()).unwrap_err().step, "valence");
    }

    #[test]
    fn idempotent_on_examples() {
        for s in [
            "CCO",
            "c1ccccc1",
            "N(=O)(=O)c1ccccc1",
            "O=c1cccc[nH]1",
            "[Na]OC(=O)c1ccccc1",
            "CS(C)=O",
            "c1ccc2[nH]ccc2c1",
            "C1=CC2=CC=CC=CC2=C1",
            "[CH-]1C=CC=C1.[Na+]",
            "O=n1ccccc1",
        ] {
            let once = standardize(&parse_smiles(s).unwrap()).unwrap();
            let (k1, smi) = canonicalize(&once);
            let twice = standardize(&parse_smiles(&smi).unwrap()).unwrap();
            assert_eq!(canonicalize(&twice).0, k1, "{s}");
        }
    }
}
