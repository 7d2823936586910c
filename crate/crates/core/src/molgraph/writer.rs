//! SMILES writer. Given a ranking, the output is a deterministic function of
//! the ranked graph: depth-first from the lowest-ranked atom of each
//! fragment, neighbours visited in rank order, ring-closure digits taken
//! from the lowest free number. Stereo annotations are not written.

use std::fmt::Write;

use super::element::{self, BORON, BROMINE, CARBON, CHLORINE, FLUORINE, IODINE, NITROGEN, OXYGEN, PHOSPHORUS, SULFUR};
use super::smiles::organic_implicit_h;
use super::{Atom, BondOrder, Molecule};

/// Write `mol` as SMILES. With `ranks`, atoms are traversed in rank order;
/// without, in input order.
pub fn write_smiles(mol: &Molecule, ranks: Option<&[u32]>) -> String {
    let n = mol.atom_count();
    let rank = |a: usize| ranks.map(|r| r[a] as usize).unwrap_or(a);
    let mut sorted_nbrs: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|a| {
            let mut v: Vec<(usize, usize)> = mol.neighbors(a).iter().map(|nb| (nb.atom, nb.bond)).collect();
            v.sort_by_key(|&(w, _)| rank(w));
            v
        })
        .collect();

    // pass 1: DFS tree and ring closures
    let mut visited = vec![false; n];
    let mut children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut parent_bond = vec![usize::MAX; n];
    let mut closure_seen = vec![false; mol.bond_count()];
    // per atom: (partner, bond, opens?) in discovery order
    let mut closures: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); n];
    let mut starts: Vec<usize> = (0..n).collect();
    starts.sort_by_key(|&a| rank(a));
    let mut roots = Vec::new();
    for &root in &starts {
        if visited[root] {
            continue;
        }
        roots.push(root);
        visited[root] = true;
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
            if *pos >= sorted_nbrs[v].len() {
                stack.pop();
                continue;
            }
            let (w, b) = sorted_nbrs[v][*pos];
            *pos += 1;
            if b == parent_bond[v] {
                continue;
            }
            if !visited[w] {
                visited[w] = true;
                parent_bond[w] = b;
                children[v].push((w, b));
                stack.push((w, 0));
            } else if !closure_seen[b] {
                // w is an ancestor still on the stack: it opens, v closes
                closure_seen[b] = true;
                closures[w].push((v, b, true));
                closures[v].push((w, b, false));
            }
        }
    }
    sorted_nbrs.clear();

    // pass 2: emit
    enum Task {
        Atom(usize, Option<usize>),
        Text(&'static str),
    }
    let mut out = String::with_capacity(n * 2);
    let mut digit_of_bond: Vec<Option<u32>> = vec![None; mol.bond_count()];
    let mut in_use: Vec<bool> = Vec::new();
    for (fi, &root) in roots.iter().enumerate() {
        if fi > 0 {
            out.push('.');
        }
        let mut tasks = vec![Task::Atom(root, None)];
        while let Some(task) = tasks.pop() {
            let (a, via) = match task {
                Task::Text(t) => {
                    out.push_str(t);
                    continue;
                }
                Task::Atom(a, via) => (a, via),
            };
            if let Some(b) = via {
                out.push_str(bond_symbol(mol, b));
            }
            write_atom(mol, a, &mut out);
            // closings first, then openings ordered by partner rank
            let mut here = closures[a].clone();
            here.sort_by_key(|&(w, _, opens)| (opens, rank(w)));
            let mut freed = Vec::new();
            for (_, b, opens) in here {
                if opens {
                    let d = match in_use.iter().position(|u| !u) {
                        Some(d) => d,
                        None => {
                            in_use.push(false);
                            in_use.len() - 1
                        }
                    };
                    in_use[d] = true;
                    let d = d as u32 + 1;
                    digit_of_bond[b] = Some(d);
                    out.push_str(bond_symbol(mol, b));
                    push_ring_digit(&mut out, d);
                } else {
                    let d = digit_of_bond[b].expect("ring closure opened before it closes");
                    push_ring_digit(&mut out, d);
                    freed.push(d);
                }
            }
            for d in freed {
                in_use[d as usize - 1] = false;
            }
            let kids = &children[a];
            if let Some((&(last, lb), rest)) = kids.split_last() {
                tasks.push(Task::Atom(last, Some(lb)));
                for &(c, cb) in rest.iter().rev() {
                    tasks.push(Task::Text(")"));
                    tasks.push(Task::Atom(c, Some(cb)));
                    tasks.push(Task::Text("("));
                }
            }
        }
    }
    out
}

fn push_ring_digit(out: &mut String, d: u32) {
    if d < 10 {
        out.push(char::from(b'0' + d as u8));
    } else {
        let _ = write!(out, "%{d:02}");
    }
}

fn bond_symbol(mol: &Molecule, b: usize) -> &'static str {
    let bond = mol.bond(b);
    let both_aromatic = mol.atom(bond.begin).aromatic && mol.atom(bond.end).aromatic;
    if bond.aromatic {
        return if both_aromatic { "" } else { ":" };
    }
    match bond.order {
        BondOrder::Single => {
            if both_aromatic {
                "-"
            } else {
                ""
            }
        }
        BondOrder::Double => "=",
        BondOrder::Triple => "#",
        BondOrder::Aromatic => ":",
    }
}

fn lowercase_allowed(z: u8) -> bool {
    matches!(z, BORON | CARBON | NITROGEN | OXYGEN | PHOSPHORUS | SULFUR | 33 | 34 | 52)
}

fn organic_subset(z: u8) -> bool {
    matches!(z, BORON | CARBON | NITROGEN | OXYGEN | PHOSPHORUS | SULFUR | FLUORINE | CHLORINE | BROMINE | IODINE)
}

/// Valence as the reader will count it: aromatic-flagged bonds count 1.
fn written_valence(mol: &Molecule, a: usize) -> u32 {
    mol.neighbors(a)
        .iter()
        .map(|nb| {
            let b = mol.bond(nb.bond);
            if b.aromatic {
                1
            } else {
                b.order.valence_contribution()
            }
        })
        .sum()
}

fn write_atom(mol: &Molecule, a: usize, out: &mut String) {
    let atom: &Atom = mol.atom(a);
    let aromatic = atom.aromatic && lowercase_allowed(atom.element);
    let symbol = element::symbol(atom.element);
    if organic_subset(atom.element) && atom.formal_charge == 0 && atom.isotope == 0 {
        let implied = organic_implicit_h(atom.element, aromatic, written_valence(mol, a));
        if implied == Some(atom.implicit_h) && (!aromatic || matches!(atom.element, BORON | CARBON | NITROGEN | OXYGEN | PHOSPHORUS | SULFUR)) {
            if aromatic {
                out.push_str(&symbol.to_ascii_lowercase());
            } else {
                out.push_str(symbol);
            }
            return;
        }
    }
    out.push('[');
    if atom.isotope > 0 {
        let _ = write!(out, "{}", atom.isotope);
    }
    if aromatic {
        out.push_str(&symbol.to_ascii_lowercase());
    } else {
        out.push_str(symbol);
    }
    match atom.implicit_h {
        0 => {}
        1 => out.push('H'),
        h => {
            let _ = write!(out, "H{h}");
        }
    }
    match atom.formal_charge {
        0 => {}
        1 => out.push('+'),
        -1 => out.push('-'),
        q if q > 0 => {
            let _ = write!(out, "+{q}");
        }
        q => {
            let _ = write!(out, "-{}", -q);
        }
    }
    out.push(']');
}
