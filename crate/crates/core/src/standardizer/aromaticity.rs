//! Hückel aromaticity over the smallest rings and over pairs of rings fused
//! through one bond. Only C, N, O and S take part. Bond orders are left in
//! Kekulé form; atoms and bonds of aromatic rings get their aromatic flag.

use crate::molgraph::element::{CARBON, NITROGEN, OXYGEN, SULFUR};
use crate::molgraph::{BondOrder, Molecule};

/// Pi electrons an atom donates to a ring, or `None` if it cannot be part
/// of an aromatic ring.
fn pi_electrons(mol: &Molecule, a: usize) -> Option<u32> {
    let atom = mol.atom(a);
    if !matches!(atom.element, CARBON | NITROGEN | OXYGEN | SULFUR) {
        return None;
    }
    let mut ring_double = 0;
    let mut exo_hetero = false;
    for nb in mol.neighbors(a) {
        let bond = mol.bond(nb.bond);
        match bond.order {
            BondOrder::Single => {}
            BondOrder::Double if mol.bond_in_ring(nb.bond) => ring_double += 1,
            BondOrder::Double if matches!(mol.atom(nb.atom).element, NITROGEN | OXYGEN | SULFUR) => exo_hetero = true,
            _ => return None,
        }
    }
    match (ring_double, exo_hetero) {
        (1, false) => return Some(1),
        (0, true) => return Some(0),
        (0, false) => {}
        _ => return None,
    }
    let connections = mol.degree(a) + atom.implicit_h as usize;
    match (atom.element, atom.formal_charge, connections) {
        (CARBON, -1, 0..=3) => Some(2),
        (CARBON, 1, 0..=3) => Some(0),
        (NITROGEN, 0, 3) => Some(2),
        (NITROGEN, -1, 2) => Some(2),
        (OXYGEN, 0, 2) | (SULFUR, 0, 2) => Some(2),
        _ => None,
    }
}

fn ring_bonds(mol: &Molecule, ring: &[usize]) -> Vec<usize> {
    (0..ring.len())
        .filter_map(|i| mol.bond_between(ring[i], ring[(i + 1) % ring.len()]))
        .collect()
}

fn huckel(total: u32) -> bool {
    total % 4 == 2
}

/// Aromatic flags per atom and per bond for a molecule without flags.
pub(crate) fn perceive(mol: &Molecule) -> (Vec<bool>, Vec<bool>) {
    let mut atom_flags = vec![false; mol.atom_count()];
    let mut bond_flags = vec![false; mol.bond_count()];
    let rings = mol.rings();
    if rings.is_empty() {
        return (atom_flags, bond_flags);
    }
    let electrons: Vec<Option<u32>> = (0..mol.atom_count()).map(|a| pi_electrons(mol, a)).collect();
    let count = |atoms: &[usize]| -> Option<u32> { atoms.iter().map(|&a| electrons[a]).sum() };
    let mark = |ring: &[usize], atom_flags: &mut Vec<bool>, bond_flags: &mut Vec<bool>| {
        for &a in ring {
            atom_flags[a] = true;
        }
        for b in ring_bonds(mol, ring) {
            bond_flags[b] = true;
        }
    };
    let mut ring_aromatic = vec![false; rings.len()];
    for (i, ring) in rings.iter().enumerate() {
        if count(ring).is_some_and(huckel) {
            ring_aromatic[i] = true;
            mark(ring, &mut atom_flags, &mut bond_flags);
        }
    }
    for i in 0..rings.len() {
        for j in i + 1..rings.len() {
            if ring_aromatic[i] && ring_aromatic[j] {
                continue;
            }
            let shared: Vec<usize> = rings[i].iter().copied().filter(|a| rings[j].contains(a)).collect();
            if shared.len() != 2 || mol.bond_between(shared[0], shared[1]).is_none() {
                continue;
            }
            let mut union = rings[i].clone();
            union.extend(rings[j].iter().copied().filter(|a| !shared.contains(a)));
            if count(&union).is_some_and(huckel) {
                mark(&rings[i], &mut atom_flags, &mut bond_flags);
                mark(&rings[j], &mut atom_flags, &mut bond_flags);
            }
        }
    }
    (atom_flags, bond_flags)
}
