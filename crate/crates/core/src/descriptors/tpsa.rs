//! Topological polar surface area from N, O (and optionally S, P) fragment
//! contributions.

use std::sync::OnceLock;

use crate::molgraph::element::{atomic_number, NITROGEN, OXYGEN, PHOSPHORUS, SULFUR};
use crate::molgraph::{BondOrder, Molecule};
use crate::tables::{rows, TPSA_TSV};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Environment {
    element: u8,
    charge: i8,
    degree: u8,
    h: u8,
    single: u8,
    double: u8,
    triple: u8,
    aromatic: u8,
    ring3: bool,
}

struct Entry {
    element: u8,
    fields: [Option<i16>; 8],
    value: f64,
}

impl Entry {
    fn matches(&self, env: &Environment) -> bool {
        let actual = [
            env.charge as i16,
            env.degree as i16,
            env.h as i16,
            env.single as i16,
            env.double as i16,
            env.triple as i16,
            env.aromatic as i16,
            env.ring3 as i16,
        ];
        self.element == env.element && self.fields.iter().zip(actual).all(|(f, a)| f.is_none_or(|f| f == a))
    }
}

fn table() -> &'static [Entry] {
    static TABLE: OnceLock<Vec<Entry>> = OnceLock::new();
    TABLE.get_or_init(|| {
        rows(TPSA_TSV)
            .map(|cols| {
                assert_eq!(cols.len(), 10, "tpsa.tsv rows have 10 columns");
                let element = atomic_number(cols[0]).expect("tpsa element");
                let mut fields = [None; 8];
                for (slot, text) in fields.iter_mut().zip(&cols[1..9]) {
                    *slot = if *text == "*" { None } else { Some(text.parse().expect("tpsa integer field")) };
                }
                Entry { element, fields, value: cols[9].parse().expect("tpsa value") }
            })
            .collect()
    })
}

fn environment(mol: &Molecule, a: usize) -> Environment {
    let atom = mol.atom(a);
    let mut env = Environment {
        element: atom.element,
        charge: atom.formal_charge,
        degree: mol.degree(a) as u8,
        h: mol.total_h(a) as u8,
        single: 0,
        double: 0,
        triple: 0,
        aromatic: 0,
        ring3: mol.rings().iter().any(|r| r.len() == 3 && r.contains(&a)),
    };
    for nb in mol.neighbors(a) {
        let b = mol.bond(nb.bond);
        let slot = if b.aromatic {
            &mut env.aromatic
        } else {
            match b.order {
                BondOrder::Single => &mut env.single,
                BondOrder::Double => &mut env.double,
                BondOrder::Triple => &mut env.triple,
                BondOrder::Aromatic => &mut env.aromatic,
            }
        };
        *slot += 1;
    }
    env
}

/// Contribution of one atom.
pub fn atom_contribution(mol: &Molecule, a: usize, include_s_and_p: bool) -> f64 {
    let z = mol.atom(a).element;
    let polar = matches!(z, NITROGEN | OXYGEN) || (include_s_and_p && matches!(z, SULFUR | PHOSPHORUS));
    if !polar {
        return 0.0;
    }
    let env = environment(mol, a);
    if let Some(e) = table().iter().find(|e| e.matches(&env)) {
        return e.value;
    }
    let (d, h) = (env.degree as f64, env.h as f64);
    let fallback = match z {
        NITROGEN => 30.5 - 8.2 * d + 1.5 * h,
        OXYGEN => 28.5 - 8.6 * d + 1.5 * h,
        _ => 0.0,
    };
    fallback.max(0.0)
}

/// Polar surface area in square angstroms. Sulfur and phosphorus only
/// contribute when `include_s_and_p` is set.
pub fn tpsa_with(mol: &Molecule, include_s_and_p: bool) -> f64 {
    (0..mol.atom_count()).map(|a| atom_contribution(mol, a, include_s_and_p)).sum()
}

/// Polar surface area from N and O contributions.
pub fn tpsa(mol: &Molecule) -> f64 {
    tpsa_with(mol, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;
    use crate::standardizer::standardize;

    fn t(s: &str) -> f64 {
        tpsa(&standardize(&parse_smiles(s).unwrap()).unwrap())
    }

    #[test]
    fn reference_values() {
        assert_eq!(t("c1ccccc1"), 0.0);
        assert!((t("c1ccncc1") - 12.89).abs() < 1e-9);
        assert!((t("CCO") - 20.23).abs() < 1e-9);
        assert!((t("CC(=O)O") - 37.30).abs() < 1e-9);
        assert!((t("c1cc[nH]c1") - 15.79).abs() < 1e-9);
        assert!((t("C[N+](=O)[O-]") - 43.14).abs() < 1e-9);
    }

    #[test]
    fn water_uses_the_fallback_formula() {
        // no table row for an oxygen with two hydrogens and no neighbours
        assert!((t("O") - 31.5).abs() < 1e-9);
    }

    #[test]
    fn sulfur_and_phosphorus_are_opt_in() {
        let m = standardize(&parse_smiles("CSC").unwrap()).unwrap();
        assert_eq!(tpsa(&m), 0.0);
        assert!((tpsa_with(&m, true) - 25.30).abs() < 1e-9);
    }
}
