//! Wildman-Crippen logP and molar refractivity.
//!
//! Every atom, hydrogens included, gets the first class whose environment
//! rule it satisfies. Rules are small trees: a predicate on the atom and
//! predicates on distinct neighbours reached through bonds of a given kind.
//! Contributions per class come from `crippen.tsv`.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::molgraph::{BondOrder, Molecule};
use crate::tables::{rows, CRIPPEN_TSV};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Single,
    Double,
    Triple,
    Aromatic,
}

/// Atom of the hydrogen-complete typing graph.
struct Node {
    z: u8,
    aromatic: bool,
    charge: i8,
    /// Attached hydrogens.
    h: u8,
    /// Total connections, hydrogens included.
    x: u8,
    nbrs: Vec<(usize, Kind)>,
}

fn typing_graph(mol: &Molecule) -> Vec<Node> {
    let mut nodes: Vec<Node> = mol
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| Node {
            z: a.element,
            aromatic: a.aromatic,
            charge: a.formal_charge,
            h: mol.total_h(i) as u8,
            x: (mol.degree(i) + a.implicit_h as usize) as u8,
            nbrs: Vec::new(),
        })
        .collect();
    for b in mol.bonds() {
        let kind = if b.aromatic {
            Kind::Aromatic
        } else {
            match b.order {
                BondOrder::Single => Kind::Single,
                BondOrder::Double => Kind::Double,
                BondOrder::Triple => Kind::Triple,
                BondOrder::Aromatic => Kind::Aromatic,
            }
        };
        nodes[b.begin].nbrs.push((b.end, kind));
        nodes[b.end].nbrs.push((b.begin, kind));
    }
    for (i, a) in mol.atoms().iter().enumerate() {
        for _ in 0..a.implicit_h {
            let h = nodes.len();
            nodes.push(Node { z: 1, aromatic: false, charge: 0, h: 0, x: 1, nbrs: vec![(i, Kind::Single)] });
            nodes[i].nbrs.push((h, Kind::Single));
        }
    }
    nodes
}

#[derive(Clone, Copy)]
enum B {
    /// Unspecified bond: single or aromatic.
    Any,
    Single,
    Double,
    Triple,
    Arom,
}

impl B {
    fn accepts(self, k: Kind) -> bool {
        match self {
            B::Any => matches!(k, Kind::Single | Kind::Aromatic),
            B::Single => k == Kind::Single,
            B::Double => k == Kind::Double,
            B::Triple => k == Kind::Triple,
            B::Arom => k == Kind::Aromatic,
        }
    }
}

type Pred = fn(&Node) -> bool;

struct Rule {
    atom: Pred,
    kids: Vec<(B, Rule)>,
}

fn r(atom: Pred) -> Rule {
    Rule { atom, kids: Vec::new() }
}

impl Rule {
    fn to(mut self, bond: B, kid: Rule) -> Rule {
        self.kids.push((bond, kid));
        self
    }

    fn to_atom(self, bond: B, atom: Pred) -> Rule {
        self.to(bond, r(atom))
    }

    fn matches(&self, g: &[Node], at: usize, used: &mut Vec<usize>) -> bool {
        if !(self.atom)(&g[at]) {
            return false;
        }
        let mark = used.len();
        used.push(at);
        if self.match_kids(g, at, 0, used) {
            return true;
        }
        used.truncate(mark);
        false
    }

    fn match_kids(&self, g: &[Node], center: usize, k: usize, used: &mut Vec<usize>) -> bool {
        let Some((bond, kid)) = self.kids.get(k) else {
            return true;
        };
        for &(n, kind) in &g[center].nbrs {
            if used.contains(&n) || !bond.accepts(kind) {
                continue;
            }
            let mark = used.len();
            if kid.matches(g, n, used) && self.match_kids(g, center, k + 1, used) {
                return true;
            }
            used.truncate(mark);
        }
        false
    }
}

// atom predicates; "aliphatic" follows the lowercase/uppercase convention of
// line notations, so hydrogen counts as aliphatic
fn aliphatic(n: &Node, z: u8) -> bool {
    n.z == z && !n.aromatic
}
fn c(n: &Node) -> bool {
    aliphatic(n, 6)
}
fn arom_c(n: &Node) -> bool {
    n.z == 6 && n.aromatic
}
fn n_(n: &Node) -> bool {
    aliphatic(n, 7)
}
fn o(n: &Node) -> bool {
    aliphatic(n, 8)
}
fn s(n: &Node) -> bool {
    aliphatic(n, 16)
}
fn arom(n: &Node) -> bool {
    n.aromatic
}
fn heavy_aliphatic(n: &Node) -> bool {
    !n.aromatic && n.z != 1
}
fn heavy(n: &Node) -> bool {
    n.z != 1
}
fn hydrogen(n: &Node) -> bool {
    n.z == 1
}
fn carbon_any(n: &Node) -> bool {
    n.z == 6
}
fn nitrogen_any(n: &Node) -> bool {
    n.z == 7
}
fn sulfur_any(n: &Node) -> bool {
    n.z == 16
}
fn positive(n: &Node) -> bool {
    (1..=3).contains(&n.charge)
}
fn negative(n: &Node) -> bool {
    (-3..=-1).contains(&n.charge)
}
/// [N,O,P,S,F,Cl,Br,I]
fn polar_x(n: &Node) -> bool {
    !n.aromatic && matches!(n.z, 7 | 8 | 15 | 16 | 9 | 17 | 35 | 53)
}
/// aliphatic, not one of C N O S F Cl Br I H (P optional)
fn unusual(n: &Node, allow_p: bool) -> bool {
    !n.aromatic && !matches!(n.z, 1 | 6 | 7 | 8 | 16 | 9 | 17 | 35 | 53) && (allow_p || n.z != 15)
}

fn rules() -> Vec<(&'static str, Rule)> {
    use B::*;
    vec![
        ("C1", r(|n| c(n) && n.h == 4)),
        ("C1", r(|n| c(n) && n.h == 3).to_atom(Any, c)),
        ("C1", r(|n| c(n) && n.h == 2).to_atom(Any, c).to_atom(Any, c)),
        ("C2", r(|n| c(n) && n.h == 1).to_atom(Any, c).to_atom(Any, c).to_atom(Any, c)),
        ("C2", r(c).to_atom(Any, c).to_atom(Any, c).to_atom(Any, c).to_atom(Any, c)),
        ("C3", r(|n| c(n) && n.h == 3).to_atom(Any, polar_x)),
        ("C3", r(|n| c(n) && n.h == 2 && n.x == 4).to_atom(Any, polar_x).to_atom(Any, heavy_aliphatic)),
        (
            "C4",
            r(|n| c(n) && n.h == 1 && n.x == 4)
                .to_atom(Any, polar_x)
                .to_atom(Any, heavy_aliphatic)
                .to_atom(Any, heavy_aliphatic),
        ),
        (
            "C4",
            r(|n| c(n) && n.h == 0 && n.x == 4)
                .to_atom(Any, polar_x)
                .to_atom(Any, heavy_aliphatic)
                .to_atom(Any, heavy_aliphatic)
                .to_atom(Any, heavy_aliphatic),
        ),
        ("C5", r(c).to_atom(Double, |n| heavy_aliphatic(n) && n.z != 6)),
        ("C6", r(|n| c(n) && n.h == 2).to_atom(Double, c)),
        ("C6", r(|n| c(n) && n.h == 1).to_atom(Double, c).to_atom(Any, heavy_aliphatic)),
        ("C6", r(|n| c(n) && n.h == 0).to_atom(Double, c).to_atom(Any, heavy_aliphatic).to_atom(Any, heavy_aliphatic)),
        ("C6", r(c).to_atom(Double, c).to_atom(Double, c)),
        ("C7", r(|n| c(n) && n.x == 2).to_atom(Triple, heavy_aliphatic)),
        ("C8", r(|n| c(n) && n.h == 3).to_atom(Any, arom_c)),
        ("C9", r(|n| c(n) && n.h == 3).to_atom(Any, arom)),
        ("C10", r(|n| c(n) && n.h == 2 && n.x == 4).to_atom(Any, arom)),
        ("C11", r(|n| c(n) && n.h == 1 && n.x == 4).to_atom(Any, arom)),
        ("C12", r(|n| c(n) && n.h == 0 && n.x == 4).to_atom(Any, arom)),
        ("C13", r(|n| arom_c(n) && n.h == 0).to_atom(Single, |n| unusual(n, true))),
        ("C14", r(arom_c).to_atom(Any, |n| n.z == 9)),
        ("C15", r(arom_c).to_atom(Any, |n| n.z == 17)),
        ("C16", r(arom_c).to_atom(Any, |n| n.z == 35)),
        ("C17", r(arom_c).to_atom(Any, |n| n.z == 53)),
        ("C18", r(|n| arom_c(n) && n.h == 1)),
        ("C19", r(arom_c).to_atom(Arom, arom).to_atom(Arom, arom).to_atom(Arom, arom)),
        ("C20", r(arom_c).to_atom(Arom, arom).to_atom(Arom, arom).to_atom(Single, arom)),
        ("C21", r(arom_c).to_atom(Arom, arom).to_atom(Arom, arom).to_atom(Single, c)),
        ("C22", r(arom_c).to_atom(Arom, arom).to_atom(Arom, arom).to_atom(Single, n_)),
        ("C23", r(arom_c).to_atom(Arom, arom).to_atom(Arom, arom).to_atom(Single, o)),
        ("C24", r(arom_c).to_atom(Arom, arom).to_atom(Arom, arom).to_atom(Single, s)),
        ("C25", r(arom_c).to_atom(Arom, arom).to_atom(Arom, arom).to_atom(Double, |n| c(n) || n_(n) || o(n))),
        ("C26", r(c).to_atom(Double, c).to_atom(Any, arom).to_atom(Any, heavy_aliphatic)),
        ("C26", r(c).to_atom(Double, c).to_atom(Any, arom_c).to_atom(Any, arom)),
        ("C26", r(|n| c(n) && n.h == 1).to_atom(Double, c).to_atom(Any, arom)),
        ("C26", r(c).to_atom(Double, arom_c)),
        ("C27", r(|n| c(n) && n.x == 4).to_atom(Any, |n| unusual(n, false))),
        ("CS", r(carbon_any)),
        ("H1", r(hydrogen).to_atom(Any, |n| n.z == 6 || n.z == 1)),
        ("H2", r(hydrogen).to(Any, r(o).to_atom(Any, |n| (c(n) && n.x == 4) || arom_c(n)))),
        // these two rules go by element, so aromatic N, O and S are excluded too
        ("H2", r(hydrogen).to(Any, r(o).to_atom(Any, |n| !matches!(n.z, 6 | 7 | 8 | 16)))),
        ("H2", r(hydrogen).to_atom(Any, |n| !matches!(n.z, 6 | 7 | 8))),
        ("H3", r(hydrogen).to_atom(Any, nitrogen_any)),
        ("H3", r(hydrogen).to(Any, r(o).to_atom(Any, nitrogen_any))),
        (
            "H4",
            r(hydrogen).to(Any, r(o).to(Any, r(c).to_atom(Double, |n| n.z == 6 || n.z == 7 || o(n) || s(n)))),
        ),
        ("H4", r(hydrogen).to(Any, r(o).to_atom(Any, |n| o(n) || s(n)))),
        ("HS", r(hydrogen)),
        ("N1", r(|n| n_(n) && n.h == 2 && n.charge == 0).to_atom(Any, heavy_aliphatic)),
        ("N2", r(|n| n_(n) && n.h == 1 && n.charge == 0).to_atom(Any, heavy_aliphatic).to_atom(Any, heavy_aliphatic)),
        ("N3", r(|n| n_(n) && n.h == 2 && n.charge == 0).to_atom(Any, arom)),
        ("N4", r(|n| n_(n) && n.h == 1 && n.charge == 0).to_atom(Any, heavy).to_atom(Any, arom)),
        ("N5", r(|n| n_(n) && n.h == 1 && n.charge == 0).to_atom(Double, heavy)),
        ("N6", r(|n| n_(n) && n.charge == 0).to_atom(Double, heavy).to_atom(Any, heavy)),
        (
            "N7",
            r(|n| n_(n) && n.charge == 0)
                .to_atom(Any, heavy_aliphatic)
                .to_atom(Any, heavy_aliphatic)
                .to_atom(Any, heavy_aliphatic),
        ),
        ("N8", r(|n| n_(n) && n.charge == 0).to_atom(Any, arom).to_atom(Any, heavy).to_atom(Any, heavy_aliphatic)),
        ("N8", r(|n| n_(n) && n.charge == 0).to_atom(Any, arom).to_atom(Any, arom).to_atom(Any, arom)),
        ("N9", r(|n| n_(n) && n.charge == 0).to_atom(Triple, heavy_aliphatic)),
        ("N10", r(|n| n_(n) && (1..=3).contains(&n.h) && positive(n))),
        ("N11", r(|n| n.z == 7 && n.aromatic && n.charge == 0)),
        ("N12", r(|n| n.z == 7 && n.aromatic && positive(n))),
        (
            "N13",
            r(|n| n_(n) && n.h == 0 && positive(n))
                .to_atom(Any, heavy_aliphatic)
                .to_atom(Any, heavy_aliphatic)
                .to_atom(Any, heavy_aliphatic)
                .to_atom(Any, heavy_aliphatic),
        ),
        (
            "N13",
            r(|n| n_(n) && n.h == 0 && positive(n))
                .to_atom(Double, heavy_aliphatic)
                .to_atom(Any, heavy_aliphatic)
                .to_atom(Any, heavy),
        ),
        ("N13", r(|n| n_(n) && n.h == 0 && positive(n)).to_atom(Double, carbon_any).to_atom(Double, nitrogen_any)),
        ("N14", r(|n| n_(n) && positive(n)).to_atom(Triple, heavy_aliphatic)),
        ("N14", r(|n| n_(n) && negative(n))),
        ("N14", r(|n| n_(n) && positive(n)).to_atom(Double, |n| n_(n) && negative(n)).to_atom(Double, n_)),
        ("NS", r(nitrogen_any)),
        ("O1", r(|n| n.z == 8 && n.aromatic)),
        ("O2", r(|n| o(n) && (n.h == 1 || n.h == 2))),
        ("O3", r(o).to_atom(Any, heavy_aliphatic).to_atom(Any, heavy_aliphatic)),
        ("O4", r(o).to_atom(Any, arom).to_atom(Any, heavy)),
        ("O5", r(o).to_atom(Double, |n| n.z == 7 || n.z == 8)),
        ("O5", r(|n| o(n) && n.x == 1 && negative(n)).to_atom(Any, nitrogen_any)),
        ("O6", r(|n| o(n) && n.x == 1 && (n.charge == -1 || n.charge == -2)).to_atom(Any, sulfur_any)),
        ("O6", r(|n| o(n) && n.charge == 0).to_atom(Double, |n| sulfur_any(n) && n.charge == 0)),
        ("O12", r(|n| o(n) && n.charge == -1).to(Any, r(c).to_atom(Double, o))),
        (
            "O7",
            r(|n| o(n) && n.x == 1 && negative(n)).to_atom(Any, |n| !hydrogen(n) && !n_(n) && !s(n)),
        ),
        ("O8", r(o).to_atom(Double, arom_c)),
        ("O9", r(o).to(Double, r(|n| c(n) && n.h == 1).to_atom(Any, c))),
        ("O9", r(o).to(Double, r(c).to_atom(Any, c).to_atom(Any, heavy_aliphatic))),
        ("O9", r(o).to(Double, r(|n| c(n) && n.h == 1).to_atom(Any, |n| n_(n) || o(n)))),
        ("O9", r(o).to_atom(Double, |n| c(n) && n.h == 2)),
        ("O9", r(o).to(Double, r(|n| c(n) && n.x == 2).to_atom(Double, o))),
        ("O10", r(o).to(Double, r(|n| c(n) && n.h == 1).to_atom(Any, arom_c))),
        ("O10", r(o).to(Double, r(c).to_atom(Any, |n| c(n) || arom_c(n)).to_atom(Any, |n| n.aromatic && n.z != 1))),
        ("O10", r(o).to(Double, r(c).to_atom(Any, arom_c).to_atom(Any, heavy_aliphatic))),
        (
            "O11",
            r(o).to(Double, r(c).to_atom(Any, |n| n.z != 1 && n.z != 6).to_atom(Any, |n| n.z != 1 && n.z != 6)),
        ),
        ("OS", r(|n| n.z == 8)),
        ("F", r(|n| n.z == 9 && n.charge == 0)),
        ("Cl", r(|n| n.z == 17 && n.charge == 0)),
        ("Br", r(|n| n.z == 35 && n.charge == 0)),
        ("I", r(|n| n.z == 53 && n.charge == 0)),
        ("Hal", r(|n| matches!(n.z, 9 | 17 | 35 | 53) && n.charge < 0)),
        ("Hal", r(|n| n.z == 53 && positive(n))),
        ("Hal", r(|n| matches!(n.z, 3 | 11 | 19 | 37 | 55) && n.charge == 1)),
        ("P", r(|n| n.z == 15)),
        ("S2", r(|n| s(n) && matches!(n.charge, -4..=-1 | 1..=3 | 5 | 6))),
        ("S2", r(|n| s(n) && n.charge == 0).to_atom(Double, |n| !n.aromatic && matches!(n.z, 7 | 8 | 15 | 16))),
        ("S1", r(s)),
        ("S3", r(|n| n.z == 16 && n.aromatic)),
        ("Me1", r(|n| matches!(n.z, 3 | 11 | 19 | 37 | 55 | 4 | 12 | 20 | 38 | 56 | 5 | 13 | 31 | 49 | 81))),
        ("Me1", r(|n| matches!(n.z, 14 | 32 | 50 | 82 | 33 | 51 | 83 | 34 | 52 | 84))),
        ("Me2", r(|n| matches!(n.z, 21..=30 | 39..=48 | 72..=80))),
    ]
}

struct Typer {
    rules: Vec<(usize, Rule)>,
    names: Vec<&'static str>,
    values: Vec<(f64, f64)>,
}

fn typer() -> &'static Typer {
    static TYPER: OnceLock<Typer> = OnceLock::new();
    TYPER.get_or_init(|| {
        let mut names = Vec::new();
        let mut values = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        for cols in rows(CRIPPEN_TSV) {
            let logp: f64 = cols[1].parse().expect("crippen logp");
            let mr: f64 = cols.get(2).and_then(|v| v.parse().ok()).unwrap_or(0.0);
            index.insert(cols[0].to_string(), names.len());
            names.push(&*Box::leak(cols[0].to_string().into_boxed_str()));
            values.push((logp, mr));
        }
        let rules = rules()
            .into_iter()
            .map(|(name, rule)| (*index.get(name).unwrap_or_else(|| panic!("class {name} missing from crippen.tsv")), rule))
            .collect();
        Typer { rules, names, values }
    })
}

/// Class name per atom, then per implicit hydrogen (in atom order).
/// Untypeable atoms get `None`.
pub fn atom_classes(mol: &Molecule) -> Vec<Option<&'static str>> {
    let t = typer();
    let g = typing_graph(mol);
    let mut used = Vec::with_capacity(8);
    (0..g.len())
        .map(|i| {
            t.rules.iter().find_map(|(cls, rule)| {
                used.clear();
                rule.matches(&g, i, &mut used).then(|| t.names[*cls])
            })
        })
        .collect()
}

/// (logP, molar refractivity) as sums of atom-class contributions.
pub fn crippen_logp_mr(mol: &Molecule) -> (f64, f64) {
    let t = typer();
    let g = typing_graph(mol);
    let mut used = Vec::with_capacity(8);
    let (mut logp, mut mr) = (0.0, 0.0);
    for i in 0..g.len() {
        if let Some(cls) = t.rules.iter().find_map(|(cls, rule)| {
            used.clear();
            rule.matches(&g, i, &mut used).then_some(*cls)
        }) {
            logp += t.values[cls].0;
            mr += t.values[cls].1;
        }
    }
    (logp, mr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;
    use crate::standardizer::standardize;

    fn lm(s: &str) -> (f64, f64) {
        crippen_logp_mr(&standardize(&parse_smiles(s).unwrap()).unwrap())
    }

    fn classes(s: &str) -> Vec<&'static str> {
        atom_classes(&standardize(&parse_smiles(s).unwrap()).unwrap()).into_iter().map(|c| c.unwrap()).collect()
    }

    #[test]
    fn methane_is_one_carbon_and_four_hydrogens() {
        let (logp, mr) = lm("C");
        assert!((logp - (0.1441 + 4.0 * 0.123)).abs() < 1e-12);
        assert!((mr - (2.503 + 4.0 * 1.057)).abs() < 1e-12);
    }

    #[test]
    fn typing_examples() {
        assert_eq!(classes("CCO"), vec!["C1", "C3", "O2", "H1", "H1", "H1", "H1", "H1", "H2"]);
        assert_eq!(classes("c1ccccc1")[..6], ["C18"; 6]);
        assert_eq!(classes("CC(=O)O")[..4], ["C1", "C5", "O9", "O2"]);
        assert_eq!(classes("[Na+].[Cl-]"), vec!["Hal", "Hal"]);
    }

    #[test]
    fn benzene_logp() {
        let (logp, _) = lm("c1ccccc1");
        assert!((logp - 1.6866).abs() < 1e-9);
    }
}
