//! Periodic table data: symbols, standard atomic weights and the element
//! classes used by the element-group profile.

use std::sync::OnceLock;

pub(crate) const ELEMENTS_TSV: &str = include_str!("../../data/elements.tsv");

/// Coarse chemical class of an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementClass {
    Nonmetal,
    Halogen,
    Metalloid,
    Metal,
    Noble,
}

#[derive(Debug, Clone)]
pub struct ElementInfo {
    pub symbol: &'static str,
    pub number: u8,
    /// Standard atomic weight in Da.
    pub weight: f64,
    pub class: ElementClass,
}

fn table() -> &'static [ElementInfo] {
    static TABLE: OnceLock<Vec<ElementInfo>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(118);
        for line in ELEMENTS_TSV.lines() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            let symbol = cols.next().expect("symbol column");
            let number: u8 = cols.next().and_then(|c| c.parse().ok()).expect("atomic number");
            let weight: f64 = cols.next().and_then(|c| c.parse().ok()).expect("atomic weight");
            let class = match cols.next().expect("class column") {
                "nonmetal" => ElementClass::Nonmetal,
                "halogen" => ElementClass::Halogen,
                "metalloid" => ElementClass::Metalloid,
                "metal" => ElementClass::Metal,
                "noble" => ElementClass::Noble,
                other => panic!("unknown element class {other}"),
            };
            assert_eq!(number as usize, out.len() + 1, "elements.tsv must be ordered by Z");
            out.push(ElementInfo { symbol, number, weight, class });
        }
        out
    })
}

/// Look up an element by atomic number.
pub fn element(number: u8) -> Option<&'static ElementInfo> {
    if number == 0 {
        return None;
    }
    table().get(number as usize - 1)
}

/// Atomic number for a case-sensitive element symbol ("Cl", not "CL").
pub fn atomic_number(symbol: &str) -> Option<u8> {
    table().iter().find(|e| e.symbol == symbol).map(|e| e.number)
}

pub fn symbol(number: u8) -> &'static str {
    element(number).map(|e| e.symbol).unwrap_or("*")
}

pub fn atomic_weight(number: u8) -> f64 {
    element(number).map(|e| e.weight).unwrap_or(0.0)
}

pub const HYDROGEN: u8 = 1;
pub const BORON: u8 = 5;
pub const CARBON: u8 = 6;
pub const NITROGEN: u8 = 7;
pub const OXYGEN: u8 = 8;
pub const FLUORINE: u8 = 9;
pub const PHOSPHORUS: u8 = 15;
pub const SULFUR: u8 = 16;
pub const CHLORINE: u8 = 17;
pub const BROMINE: u8 = 35;
pub const IODINE: u8 = 53;

pub fn is_halogen(number: u8) -> bool {
    matches!(number, FLUORINE | CHLORINE | BROMINE | IODINE | 85)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_round_trips() {
        for z in 1..=118u8 {
            let e = element(z).unwrap();
            assert_eq!(atomic_number(e.symbol), Some(z));
        }
        assert_eq!(atomic_number("Cl"), Some(17));
        assert_eq!(atomic_number("CL"), None);
        assert!(element(0).is_none());
        assert!(element(119).is_none());
    }

    #[test]
    fn common_weights() {
        assert_eq!(atomic_weight(HYDROGEN), 1.008);
        assert_eq!(atomic_weight(CARBON), 12.011);
        assert_eq!(atomic_weight(OXYGEN), 15.999);
        assert_eq!(element(11).unwrap().class, ElementClass::Metal);
        assert_eq!(element(14).unwrap().class, ElementClass::Metalloid);
        assert_eq!(element(35).unwrap().class, ElementClass::Halogen);
    }
}
