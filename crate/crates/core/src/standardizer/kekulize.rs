//! Resolve unassigned aromatic bonds into alternating single/double bonds.

use super::matching::maximum_matching;
use super::{Draft, StandardizationFailure};
use crate::molgraph::valence::{fill_valence, ValenceMode};
use crate::molgraph::BondOrder;

/// Replace every `BondOrder::Aromatic` bond with a single or double bond so
/// that each atom short of its valence receives exactly one double bond.
/// Clears all aromatic flags.
pub(crate) fn kekulize(draft: &mut Draft) -> Result<(), StandardizationFailure> {
    let n = draft.atoms.len();
    let used = draft.used_valences();
    let mut has_aromatic_bond = vec![false; n];
    for b in &draft.bonds {
        if b.order == BondOrder::Aromatic {
            has_aromatic_bond[b.begin] = true;
            has_aromatic_bond[b.end] = true;
        }
    }
    let needs: Vec<bool> = (0..n)
        .map(|i| {
            let a = &draft.atoms[i];
            has_aromatic_bond[i]
                && fill_valence(a.element, a.formal_charge, used[i], ValenceMode::Permissive).is_some_and(|v| v > used[i])
        })
        .collect();
    let mut adj = vec![Vec::new(); n];
    for b in &draft.bonds {
        if b.order == BondOrder::Aromatic && needs[b.begin] && needs[b.end] {
            adj[b.begin].push(b.end);
            adj[b.end].push(b.begin);
        }
    }
    let mate = maximum_matching(&adj);
    if let Some(i) = (0..n).find(|&i| needs[i] && mate[i].is_none()) {
        return Err(StandardizationFailure::new(
            "kekulize",
            format!("no alternating bond assignment reaches atom {i}"),
        ));
    }
    for b in draft.bonds.iter_mut() {
        if b.order == BondOrder::Aromatic {
            b.order = if mate[b.begin] == Some(b.end) { BondOrder::Double } else { BondOrder::Single };
        }
        b.aromatic = false;
    }
    for a in draft.atoms.iter_mut() {
        a.aromatic = false;
    }
    Ok(())
}
