//! Functional-group normalization, metal disconnection and reionization on
//! Kekulé drafts (no aromatic flags).

use super::Draft;
use crate::molgraph::element::{BROMINE, CARBON, CHLORINE, FLUORINE, IODINE, NITROGEN, OXYGEN, PHOSPHORUS, SULFUR};
use crate::molgraph::valence::{allowed_valences, ValenceMode};
use crate::molgraph::BondOrder;

/// Groups 1 and 2 plus zinc.
pub(crate) fn is_disconnectable_metal(z: u8) -> bool {
    matches!(z, 3 | 11 | 19 | 37 | 55 | 87 | 4 | 12 | 20 | 38 | 56 | 88 | 30)
}

fn is_metal_partner(z: u8) -> bool {
    matches!(z, NITROGEN | OXYGEN | FLUORINE | CHLORINE | BROMINE | IODINE)
}

/// Delete metal-N/O/halogen bonds, moving one charge unit per bond order.
/// Returns whether anything changed.
pub(crate) fn disconnect_metals(draft: &mut Draft) -> bool {
    let mut changed = false;
    let mut kept = Vec::with_capacity(draft.bonds.len());
    for bond in std::mem::take(&mut draft.bonds) {
        let (a, b) = (bond.begin, bond.end);
        let (za, zb) = (draft.atoms[a].element, draft.atoms[b].element);
        let pair = if is_disconnectable_metal(za) && is_metal_partner(zb) {
            Some((a, b))
        } else if is_disconnectable_metal(zb) && is_metal_partner(za) {
            Some((b, a))
        } else {
            None
        };
        match pair {
            Some((metal, partner)) => {
                let q = bond.order.valence_contribution() as i8;
                draft.atoms[metal].formal_charge += q;
                draft.atoms[partner].formal_charge -= q;
                changed = true;
            }
            None => kept.push(bond),
        }
    }
    draft.bonds = kept;
    changed
}

/// The normalization transforms, in application order.
pub const TRANSFORMS: [&str; 6] = ["nitro", "azide", "diazo", "sulfoxide", "n-oxide", "phosphate"];

/// Apply the transforms until none matches. Returns the number of edits.
pub(crate) fn normalize(draft: &mut Draft) -> usize {
    let limit = 4 * draft.atoms.len() + 4;
    let mut edits = 0;
    while edits < limit && apply_one(draft) {
        edits += 1;
    }
    edits
}

fn apply_one(draft: &mut Draft) -> bool {
    let adj = draft.adjacency();
    let used = draft.used_valences();
    let atoms = &draft.atoms;
    let bonds = &draft.bonds;
    // terminal, neutral, hydrogen-free atom of element z
    let terminal = |i: usize, z: u8| {
        atoms[i].element == z && atoms[i].formal_charge == 0 && atoms[i].implicit_h == 0 && adj[i].len() == 1
    };
    let bonded = |i: usize, order: BondOrder| adj[i].iter().filter(move |&&(_, b)| bonds[b].order == order);

    for i in 0..atoms.len() {
        let a = &atoms[i];
        if a.formal_charge == 0 && a.element == NITROGEN {
            let oxo: Vec<(usize, usize)> = bonded(i, BondOrder::Double).copied().filter(|&(j, _)| terminal(j, OXYGEN)).collect();
            // nitro: N(=O)=O -> [N+](=O)[O-]
            if oxo.len() >= 2 {
                charge_separate(draft, i, oxo[0].0, oxo[0].1);
                return true;
            }
            // azide N=N#N and diazo C=N#N -> X=[N+]=[N-]
            let triple = bonded(i, BondOrder::Triple).copied().find(|&(j, _)| terminal(j, NITROGEN));
            let double_to = bonded(i, BondOrder::Double).map(|&(j, _)| atoms[j].element).next();
            if let (Some((j, b)), Some(NITROGEN | CARBON)) = (triple, double_to) {
                charge_separate(draft, i, j, b);
                return true;
            }
            // N-oxide: pentavalent N=O -> [N+][O-]
            if used[i] == 5 && oxo.len() == 1 {
                charge_separate(draft, i, oxo[0].0, oxo[0].1);
                return true;
            }
        }
        // sulfoxide: X-S(=O)-Y with X, Y not oxygen -> [S+][O-]
        if a.formal_charge == 0 && a.element == SULFUR && adj[i].len() == 3 && used[i] == 4 {
            let oxo: Vec<(usize, usize)> = bonded(i, BondOrder::Double).copied().filter(|&(j, _)| terminal(j, OXYGEN)).collect();
            let other_o = adj[i].iter().filter(|&&(j, _)| atoms[j].element == OXYGEN).count();
            if oxo.len() == 1 && other_o == 1 {
                charge_separate(draft, i, oxo[0].0, oxo[0].1);
                return true;
            }
        }
        // phosphate charge form: [P+][O-] -> P=O
        if a.formal_charge == 1 && a.element == PHOSPHORUS {
            let target = used[i] + 1;
            let fits = allowed_valences(PHOSPHORUS, 0, ValenceMode::Strict).is_some_and(|v| v.contains(&(target as u8)));
            let oxide = adj[i].iter().copied().find(|&(j, b)| {
                bonds[b].order == BondOrder::Single
                    && atoms[j].element == OXYGEN
                    && atoms[j].formal_charge == -1
                    && atoms[j].implicit_h == 0
                    && adj[j].len() == 1
            });
            if let (true, Some((j, b))) = (fits, oxide) {
                draft.atoms[i].formal_charge = 0;
                draft.atoms[j].formal_charge = 0;
                draft.bonds[b].order = BondOrder::Double;
                return true;
            }
        }
    }
    false
}

/// Lower bond `b` between `pos` and `neg` by one order, charging them +1/-1.
fn charge_separate(draft: &mut Draft, pos: usize, neg: usize, b: usize) {
    let bond = &mut draft.bonds[b];
    bond.order = match bond.order {
        BondOrder::Triple => BondOrder::Double,
        _ => BondOrder::Single,
    };
    draft.atoms[pos].formal_charge += 1;
    draft.atoms[neg].formal_charge -= 1;
}

/// Neutralize adjacent +1/-1 pairs on N/O by raising the bond order when both
/// atoms then sit at an allowed neutral valence. Returns the number of pairs.
pub(crate) fn reionize(draft: &mut Draft) -> usize {
    let mut count = 0;
    loop {
        let used = draft.used_valences();
        let neutral_ok = |z: u8, v: u32| allowed_valences(z, 0, ValenceMode::Strict).is_some_and(|vs| vs.contains(&(v as u8)));
        let hit = draft.bonds.iter().position(|bond| {
            let (a, b) = (&draft.atoms[bond.begin], &draft.atoms[bond.end]);
            matches!(a.element, NITROGEN | OXYGEN)
                && matches!(b.element, NITROGEN | OXYGEN)
                && a.formal_charge * b.formal_charge == -1
                && matches!(bond.order, BondOrder::Single | BondOrder::Double)
                && neutral_ok(a.element, used[bond.begin] + 1)
                && neutral_ok(b.element, used[bond.end] + 1)
        });
        let Some(i) = hit else {
            return count;
        };
        let bond = &mut draft.bonds[i];
        bond.order = if bond.order == BondOrder::Single { BondOrder::Double } else { BondOrder::Triple };
        let (x, y) = (bond.begin, bond.end);
        draft.atoms[x].formal_charge = 0;
        draft.atoms[y].formal_charge = 0;
        count += 1;
    }
}
