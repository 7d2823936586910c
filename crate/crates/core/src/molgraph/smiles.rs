//! SMILES reader.
//!
//! Supports the organic subset, bracket atoms (isotope, chirality, H count,
//! charge, atom class), all bond symbols except quadruple, ring closures
//! (`1`-`9`, `%nn`), branches and dot-disconnected fragments. Stereo marks
//! are kept as annotations only.

use thiserror::Error;

use super::element::{self, atomic_number};
use super::valence::{self, ValenceMode};
use super::{Atom, Bond, BondDirection, BondOrder, Chirality, GraphError, Molecule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesErrorKind {
    #[error("empty SMILES")]
    Empty,
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unclosed branch")]
    UnclosedBranch,
    #[error("unmatched ')'")]
    UnmatchedParen,
    #[error("ring bond {0} never closed")]
    UnclosedRing(u32),
    #[error("conflicting bond orders on ring closure {0}")]
    RingBondConflict(u32),
    #[error("unknown element symbol {0:?}")]
    UnknownElement(String),
    #[error("malformed bracket atom")]
    BadBracketAtom,
    #[error("bond symbol without a following atom")]
    DanglingBond,
    #[error("unsupported feature: {0}")]
    Unsupported(&'static str),
    #[error("valence {used} of {symbol} cannot be satisfied")]
    Valence { symbol: &'static str, used: u32 },
    #[error("invalid graph: {0}")]
    Graph(#[from] GraphError),
}

/// Parse failure with the byte offset it was detected at.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at offset {offset}")]
pub struct SmilesError {
    pub offset: usize,
    pub kind: SmilesErrorKind,
}

impl SmilesError {
    fn new(offset: usize, kind: SmilesErrorKind) -> SmilesError {
        SmilesError { offset, kind }
    }
}

const AROMATIC_BRACKET: &[&str] = &["b", "c", "n", "o", "p", "s", "se", "as", "te"];

struct PendingAtom {
    atom: Atom,
    /// `None` for organic-subset atoms whose hydrogens are implied.
    bracket_h: Option<u8>,
    offset: usize,
}

struct RingOpen {
    atom: usize,
    order: Option<BondOrder>,
    direction: BondDirection,
    offset: usize,
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    atoms: Vec<PendingAtom>,
    bonds: Vec<Bond>,
    rings: Vec<Option<RingOpen>>,
    /// Bonds typed aromatic only because both ends are aromatic.
    implied_aromatic: Vec<usize>,
}

/// Parse a SMILES string into a molecule with implicit hydrogens assigned and
/// rings perceived.
pub fn parse_smiles(text: &str) -> Result<Molecule, SmilesError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(SmilesError::new(0, SmilesErrorKind::Empty));
    }
    let mut p = Parser { text: text.as_bytes(), pos: 0, atoms: Vec::new(), bonds: Vec::new(), rings: Vec::new(), implied_aromatic: Vec::new() };
    p.parse()?;
    p.finish()
}

impl Parser<'_> {
    fn err<T>(&self, offset: usize, kind: SmilesErrorKind) -> Result<T, SmilesError> {
        Err(SmilesError::new(offset, kind))
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn parse(&mut self) -> Result<(), SmilesError> {
        // previous atom on the current chain, branch stack
        let mut prev: Option<usize> = None;
        let mut branches: Vec<(Option<usize>, usize)> = Vec::new();
        let mut pending_bond: Option<(BondOrder, BondDirection, usize)> = None;
        let mut expect_atom = true;

        while let Some(c) = self.peek() {
            let start = self.pos;
            match c {
                b'(' => {
                    if prev.is_none() || pending_bond.is_some() {
                        return self.err(start, SmilesErrorKind::UnexpectedChar('('));
                    }
                    branches.push((prev, start));
                    self.pos += 1;
                    expect_atom = true;
                }
                b')' => {
                    let Some((at, _)) = branches.pop() else {
                        return self.err(start, SmilesErrorKind::UnmatchedParen);
                    };
                    if pending_bond.is_some() || expect_atom {
                        return self.err(start, SmilesErrorKind::UnexpectedChar(')'));
                    }
                    prev = at;
                    self.pos += 1;
                }
                b'.' => {
                    if pending_bond.is_some() || prev.is_none() {
                        return self.err(start, SmilesErrorKind::UnexpectedChar('.'));
                    }
                    if !branches.is_empty() {
                        return self.err(start, SmilesErrorKind::UnexpectedChar('.'));
                    }
                    prev = None;
                    expect_atom = true;
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b'$' | b':' | b'/' | b'\\' => {
                    if pending_bond.is_some() || prev.is_none() {
                        return self.err(start, SmilesErrorKind::UnexpectedChar(c as char));
                    }
                    let (order, dir) = match c {
                        b'-' => (BondOrder::Single, BondDirection::None),
                        b'=' => (BondOrder::Double, BondDirection::None),
                        b'#' => (BondOrder::Triple, BondDirection::None),
                        b':' => (BondOrder::Aromatic, BondDirection::None),
                        b'/' => (BondOrder::Single, BondDirection::Up),
                        b'\\' => (BondOrder::Single, BondDirection::Down),
                        _ => return self.err(start, SmilesErrorKind::Unsupported("quadruple bond")),
                    };
                    pending_bond = Some((order, dir, start));
                    self.pos += 1;
                }
                b'0'..=b'9' | b'%' => {
                    let Some(atom) = prev else {
                        return self.err(start, SmilesErrorKind::UnexpectedChar(c as char));
                    };
                    if expect_atom {
                        return self.err(start, SmilesErrorKind::UnexpectedChar(c as char));
                    }
                    let number = self.ring_number()?;
                    let bond = pending_bond.take();
                    self.ring_closure(atom, number, bond, start)?;
                }
                _ => {
                    let idx = self.atom()?;
                    if let Some(p) = prev {
                        let (order, dir) = match pending_bond.take() {
                            Some((o, d, _)) => (Some(o), d),
                            None => (None, BondDirection::None),
                        };
                        self.add_bond(p, idx, order, dir);
                    }
                    prev = Some(idx);
                    expect_atom = false;
                }
            }
        }
        if let Some((_, _, offset)) = pending_bond {
            return self.err(offset, SmilesErrorKind::DanglingBond);
        }
        if let Some(&(_, offset)) = branches.last() {
            return self.err(offset, SmilesErrorKind::UnclosedBranch);
        }
        if expect_atom {
            return self.err(self.text.len(), SmilesErrorKind::UnexpectedEnd);
        }
        if let Some((n, open)) = self
            .rings
            .iter()
            .enumerate()
            .filter_map(|(n, r)| r.as_ref().map(|r| (n, r)))
            .min_by_key(|(_, r)| r.offset)
        {
            return self.err(open.offset, SmilesErrorKind::UnclosedRing(n as u32));
        }
        Ok(())
    }

    fn ring_number(&mut self) -> Result<u32, SmilesError> {
        let start = self.pos;
        if self.peek() == Some(b'%') {
            self.pos += 1;
            let digits = self.text.get(self.pos..self.pos + 2);
            match digits {
                Some(d) if d.iter().all(u8::is_ascii_digit) => {
                    self.pos += 2;
                    Ok(((d[0] - b'0') * 10 + (d[1] - b'0')) as u32)
                }
                _ => self.err(start, SmilesErrorKind::UnexpectedChar('%')),
            }
        } else {
            let d = self.text[self.pos] - b'0';
            self.pos += 1;
            Ok(d as u32)
        }
    }

    fn ring_closure(
        &mut self,
        atom: usize,
        number: u32,
        bond: Option<(BondOrder, BondDirection, usize)>,
        offset: usize,
    ) -> Result<(), SmilesError> {
        let slot = number as usize;
        if self.rings.len() <= slot {
            self.rings.resize_with(slot + 1, || None);
        }
        match self.rings[slot].take() {
            None => {
                self.rings[slot] = Some(RingOpen {
                    atom,
                    order: bond.map(|b| b.0),
                    direction: bond.map(|b| b.1).unwrap_or_default(),
                    offset,
                });
                Ok(())
            }
            Some(open) => {
                if open.atom == atom {
                    return self.err(offset, SmilesErrorKind::Graph(GraphError::SelfLoop { bond: self.bonds.len(), atom }));
                }
                let order = match (open.order, bond.map(|b| b.0)) {
                    (Some(a), Some(b)) if a != b => {
                        return self.err(offset, SmilesErrorKind::RingBondConflict(number));
                    }
                    (Some(a), _) => Some(a),
                    (None, b) => b,
                };
                let dir = match bond {
                    Some((_, d, _)) if d != BondDirection::None => d,
                    _ => open.direction,
                };
                if self.bonds.iter().any(|b| (b.begin == open.atom && b.end == atom) || (b.begin == atom && b.end == open.atom)) {
                    return self.err(offset, SmilesErrorKind::Graph(GraphError::DuplicateBond(open.atom.min(atom), open.atom.max(atom))));
                }
                self.add_bond(open.atom, atom, order, dir);
                Ok(())
            }
        }
    }

    fn add_bond(&mut self, a: usize, b: usize, order: Option<BondOrder>, direction: BondDirection) {
        let order = order.unwrap_or_else(|| {
            if self.atoms[a].atom.aromatic && self.atoms[b].atom.aromatic {
                self.implied_aromatic.push(self.bonds.len());
                BondOrder::Aromatic
            } else {
                BondOrder::Single
            }
        });
        let mut bond = Bond::new(a, b, order);
        bond.direction = direction;
        self.bonds.push(bond);
    }

    fn atom(&mut self) -> Result<usize, SmilesError> {
        let start = self.pos;
        let c = self.text[self.pos];
        let pending = if c == b'[' {
            self.bracket_atom()?
        } else {
            let (symbol, aromatic, len) = match (c, self.text.get(self.pos + 1).copied()) {
                (b'C', Some(b'l')) => ("Cl", false, 2),
                (b'B', Some(b'r')) => ("Br", false, 2),
                (b'B' | b'C' | b'N' | b'O' | b'P' | b'S' | b'F' | b'I', _) => {
                    (std::str::from_utf8(&self.text[self.pos..self.pos + 1]).unwrap(), false, 1)
                }
                (b'b', _) => ("B", true, 1),
                (b'c', _) => ("C", true, 1),
                (b'n', _) => ("N", true, 1),
                (b'o', _) => ("O", true, 1),
                (b'p', _) => ("P", true, 1),
                (b's', _) => ("S", true, 1),
                (b'*', _) => return self.err(start, SmilesErrorKind::UnknownElement("*".into())),
                _ if c.is_ascii_alphabetic() => {
                    let end = (self.pos + 2).min(self.text.len());
                    let sym = String::from_utf8_lossy(&self.text[self.pos..end]).into_owned();
                    return self.err(start, SmilesErrorKind::UnknownElement(sym));
                }
                _ => return self.err(start, SmilesErrorKind::UnexpectedChar(c as char)),
            };
            self.pos += len;
            let mut atom = Atom::new(atomic_number(symbol).expect("organic subset symbol"));
            atom.aromatic = aromatic;
            PendingAtom { atom, bracket_h: None, offset: start }
        };
        self.atoms.push(pending);
        Ok(self.atoms.len() - 1)
    }

    fn bracket_atom(&mut self) -> Result<PendingAtom, SmilesError> {
        let start = self.pos;
        let close = match self.text[start..].iter().position(|&b| b == b']') {
            Some(p) => start + p,
            None => return self.err(start, SmilesErrorKind::BadBracketAtom),
        };
        let body = &self.text[start + 1..close];
        let mut i = 0;
        let mut isotope: u32 = 0;
        while i < body.len() && body[i].is_ascii_digit() {
            isotope = isotope * 10 + (body[i] - b'0') as u32;
            if isotope > u16::MAX as u32 {
                return self.err(start + 1, SmilesErrorKind::BadBracketAtom);
            }
            i += 1;
        }
        // element symbol: try two letters first
        let sym_start = i;
        if i >= body.len() || !body[i].is_ascii_alphabetic() {
            return self.err(start + 1 + i, SmilesErrorKind::BadBracketAtom);
        }
        let (element, aromatic) = {
            let two = body.get(i..i + 2).map(|s| String::from_utf8_lossy(s).into_owned());
            let one = String::from_utf8_lossy(&body[i..i + 1]).into_owned();
            let lowered_two = two.as_deref().filter(|t| AROMATIC_BRACKET.contains(t));
            if let Some(t) = lowered_two {
                i += 2;
                (capitalize(t), true)
            } else if let Some(z) = two.as_deref().filter(|t| t.as_bytes()[1].is_ascii_lowercase()).and_then(atomic_number) {
                i += 2;
                (element::symbol(z).to_string(), false)
            } else if AROMATIC_BRACKET.contains(&one.as_str()) {
                i += 1;
                (capitalize(&one), true)
            } else {
                i += 1;
                (one, false)
            }
        };
        let Some(z) = atomic_number(&element) else {
            return self.err(start + 1 + sym_start, SmilesErrorKind::UnknownElement(element));
        };
        let mut atom = Atom::new(z);
        atom.aromatic = aromatic;
        atom.isotope = isotope as u16;
        // chirality
        if i < body.len() && body[i] == b'@' {
            i += 1;
            atom.chirality = Chirality::Anticlockwise;
            if i < body.len() && body[i] == b'@' {
                i += 1;
                atom.chirality = Chirality::Clockwise;
            } else if [b"TH", b"AL", b"SP", b"TB", b"OH"].iter().any(|p| body[i..].starts_with(*p)) {
                i += 2;
                while i < body.len() && body[i].is_ascii_digit() {
                    i += 1;
                }
                atom.chirality = Chirality::Other;
            }
        }
        // hydrogen count
        let mut h = 0u8;
        if i < body.len() && body[i] == b'H' {
            i += 1;
            h = 1;
            if i < body.len() && body[i].is_ascii_digit() {
                h = body[i] - b'0';
                i += 1;
            }
        }
        // charge
        if i < body.len() && (body[i] == b'+' || body[i] == b'-') {
            let sign: i32 = if body[i] == b'+' { 1 } else { -1 };
            let sym = body[i];
            i += 1;
            let mut mag = 1i32;
            if i < body.len() && body[i].is_ascii_digit() {
                mag = 0;
                while i < body.len() && body[i].is_ascii_digit() {
                    mag = mag * 10 + (body[i] - b'0') as i32;
                    i += 1;
                }
            } else {
                while i < body.len() && body[i] == sym {
                    mag += 1;
                    i += 1;
                }
            }
            if mag > 15 {
                return self.err(start + 1 + i, SmilesErrorKind::BadBracketAtom);
            }
            atom.formal_charge = (sign * mag) as i8;
        }
        // atom class
        if i < body.len() && body[i] == b':' {
            i += 1;
            let digits_start = i;
            while i < body.len() && body[i].is_ascii_digit() {
                i += 1;
            }
            if i == digits_start {
                return self.err(start + 1 + i, SmilesErrorKind::BadBracketAtom);
            }
        }
        if i != body.len() {
            return self.err(start + 1 + i, SmilesErrorKind::BadBracketAtom);
        }
        self.pos = close + 1;
        Ok(PendingAtom { atom, bracket_h: Some(h), offset: start })
    }

    fn finish(mut self) -> Result<Molecule, SmilesError> {
        let n = self.atoms.len();
        // an unmarked bond joining two aromatic rings is single
        for &i in &self.implied_aromatic {
            if !joined_without(n, &self.bonds, i) {
                self.bonds[i].order = BondOrder::Single;
                self.bonds[i].aromatic = false;
            }
        }
        let mut used = vec![0u32; n];
        let mut aromatic_bonds = vec![0u32; n];
        for b in &self.bonds {
            let c = b.order.valence_contribution();
            used[b.begin] += c;
            used[b.end] += c;
            if b.order == BondOrder::Aromatic {
                aromatic_bonds[b.begin] += 1;
                aromatic_bonds[b.end] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n);
        let mut atoms = Vec::with_capacity(n);
        for (i, p) in self.atoms.into_iter().enumerate() {
            let mut atom = p.atom;
            let symbol = element::symbol(atom.element);
            match p.bracket_h {
                Some(h) => {
                    atom.implicit_h = h;
                    let total = used[i] + h as u32 + atom.aromatic as u32 * needs_pi_bond(&atom, used[i] + h as u32) as u32;
                    if let Some(max) = valence::max_valence(atom.element, atom.formal_charge, ValenceMode::Permissive) {
                        if total > max {
                            return Err(SmilesError::new(p.offset, SmilesErrorKind::Valence { symbol, used: total }));
                        }
                    }
                }
                None => match organic_implicit_h(atom.element, atom.aromatic, used[i]) {
                    Some(h) => atom.implicit_h = h,
                    None => {
                        return Err(SmilesError::new(p.offset, SmilesErrorKind::Valence { symbol, used: used[i] }));
                    }
                },
            }
            offsets.push(p.offset);
            atoms.push(atom);
        }
        Molecule::new(atoms, self.bonds).map_err(|e| {
            let offset = match &e {
                GraphError::AromaticOutsideRing(a) => offsets.get(*a).copied().unwrap_or(0),
                _ => 0,
            };
            SmilesError::new(offset, SmilesErrorKind::Graph(e))
        })
    }
}

/// Whether the ends of bond `skip` stay connected once it is removed.
fn joined_without(n: usize, bonds: &[Bond], skip: usize) -> bool {
    let mut adj = vec![Vec::new(); n];
    for (i, b) in bonds.iter().enumerate() {
        if i != skip {
            adj[b.begin].push(b.end);
            adj[b.end].push(b.begin);
        }
    }
    let (from, to) = (bonds[skip].begin, bonds[skip].end);
    let mut seen = vec![false; n];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(a) = stack.pop() {
        if a == to {
            return true;
        }
        for &b in &adj[a] {
            if !seen[b] {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    false
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_ascii_uppercase().to_string() + c.as_str(),
        None => String::new(),
    }
}

/// Whether an aromatic atom, with `used` valence already committed (bonds
/// counted as 1 plus hydrogens), still has room for one pi bond.
pub(crate) fn needs_pi_bond(atom: &Atom, used: u32) -> bool {
    match valence::fill_valence(atom.element, atom.formal_charge, used, ValenceMode::Strict) {
        Some(v) => v > used,
        None => false,
    }
}

/// Implicit hydrogens for an organic-subset atom given its explicit valence
/// (aromatic bonds counted as 1). Aromatic atoms that can take a pi bond
/// reserve one valence unit for it. `None` when the valence cannot be
/// satisfied.
pub(crate) fn organic_implicit_h(element: u8, aromatic: bool, used: u32) -> Option<u8> {
    let strict = valence::fill_valence(element, 0, used, ValenceMode::Strict);
    // the permissive table only admits an exact pentavalent match (nitro etc.)
    let exact = || {
        valence::allowed_valences(element, 0, ValenceMode::Permissive)?
            .iter()
            .map(|&v| v as u32)
            .find(|&v| v == used || (aromatic && v == used + 1))
    };
    let v = strict.or_else(exact)?;
    let h = if aromatic {
        if v > used {
            v - used - 1
        } else {
            0
        }
    } else {
        v - used
    };
    Some(h as u8)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err_offset(s: &str) -> usize {
        parse_smiles(s).unwrap_err().offset
    }

    #[test]
    fn methane() {
        let m = parse_smiles("C").unwrap();
        assert_eq!(m.atom_count(), 1);
        assert_eq!(m.atom(0).implicit_h, 4);
        assert_eq!(m.bond_count(), 0);
    }

    #[test]
    fn salt_fragments() {
        let m = parse_smiles("[Na+].[Cl-]").unwrap();
        assert_eq!(m.atom_count(), 2);
        assert_eq!(m.bond_count(), 0);
        assert_eq!(m.atom(0).formal_charge, 1);
        assert_eq!(m.atom(1).formal_charge, -1);
        assert_eq!(m.components().1, 2);
    }

    #[test]
    fn benzene_aromatic() {
        let m = parse_smiles("c1ccccc1").unwrap();
        assert_eq!(m.rings().len(), 1);
        assert_eq!(m.rings()[0].len(), 6);
        for a in m.atoms() {
            assert!(a.aromatic);
            assert_eq!(a.implicit_h, 1);
        }
        assert!(m.bonds().iter().all(|b| b.aromatic));
    }

    #[test]
    fn heteroaromatic_hydrogens() {
        let pyrrole = parse_smiles("c1cc[nH]c1").unwrap();
        assert_eq!(pyrrole.atom(3).implicit_h, 1);
        let pyridine = parse_smiles("c1ccncc1").unwrap();
        assert_eq!(pyridine.atom(3).implicit_h, 0);
        let furan = parse_smiles("c1ccoc1").unwrap();
        assert_eq!(furan.atom(3).implicit_h, 0);
        let thiophene = parse_smiles("c1ccsc1").unwrap();
        assert_eq!(thiophene.atom(3).implicit_h, 0);
        let pyridone = parse_smiles("O=c1cccc[nH]1").unwrap();
        assert_eq!(pyridone.atom(1).implicit_h, 0);
    }

    #[test]
    fn organic_subset_valences() {
        let m = parse_smiles("CC(=O)O").unwrap();
        let h: Vec<u8> = m.atoms().iter().map(|a| a.implicit_h).collect();
        assert_eq!(h, vec![3, 0, 0, 1]);
        let m = parse_smiles("CS(=O)(=O)C").unwrap();
        assert_eq!(m.atom(1).implicit_h, 0);
        let m = parse_smiles("N(=O)(=O)c1ccccc1").unwrap();
        assert_eq!(m.atom(0).implicit_h, 0);
    }

    #[test]
    fn bracket_atoms() {
        let m = parse_smiles("[13CH4]").unwrap();
        assert_eq!(m.atom(0).isotope, 13);
        assert_eq!(m.atom(0).implicit_h, 4);
        let m = parse_smiles("[NH4+]").unwrap();
        assert_eq!(m.atom(0).formal_charge, 1);
        let m = parse_smiles("[O--]").unwrap();
        assert_eq!(m.atom(0).formal_charge, -2);
        let m = parse_smiles("[Fe+3]").unwrap();
        assert_eq!(m.atom(0).formal_charge, 3);
        let m = parse_smiles("C[C@@H](O)N").unwrap();
        assert_eq!(m.atom(1).chirality, Chirality::Clockwise);
        let m = parse_smiles("[se]1cccc1").unwrap();
        assert!(m.atom(0).aromatic);
        let m = parse_smiles("[CH3:1]C").unwrap();
        assert_eq!(m.atom(0).implicit_h, 3);
    }

    #[test]
    fn stereo_bonds_parse() {
        let m = parse_smiles("F/C=C/F").unwrap();
        assert_eq!(m.bond(0).direction, BondDirection::Up);
        assert_eq!(m.bond(1).order, BondOrder::Double);
    }

    #[test]
    fn ring_closure_orders() {
        let m = parse_smiles("C=1CCCCC1").unwrap();
        assert_eq!(m.bonds().iter().filter(|b| b.order == BondOrder::Double).count(), 1);
        let m = parse_smiles("C%10CC%10").unwrap();
        assert_eq!(m.rings().len(), 1);
        assert_eq!(parse_smiles("C=1CCC#1").unwrap_err().kind, SmilesErrorKind::RingBondConflict(1));
    }

    #[test]
    fn syntax_errors_with_offsets() {
        assert_eq!(err_offset("C("), 1);
        assert_eq!(parse_smiles("C(").unwrap_err().kind, SmilesErrorKind::UnclosedBranch);
        assert_eq!(err_offset("CC)"), 2);
        assert_eq!(err_offset("C1CC"), 1);
        assert_eq!(err_offset("CC[Xx]"), 3);
        assert!(matches!(parse_smiles("CC[Xx]").unwrap_err().kind, SmilesErrorKind::UnknownElement(_)));
        assert_eq!(err_offset("C[C"), 1);
        assert_eq!(err_offset("C="), 1);
        assert_eq!(parse_smiles("").unwrap_err().kind, SmilesErrorKind::Empty);
        assert!(matches!(parse_smiles("Q").unwrap_err().kind, SmilesErrorKind::UnknownElement(_)));
    }

    #[test]
    fn valence_errors() {
        let e = parse_smiles("CC(C)(C)(C)C").unwrap_err();
        assert!(matches!(e.kind, SmilesErrorKind::Valence { .. }));
        assert_eq!(e.offset, 1);
        assert!(parse_smiles("FCl(F)F").is_err());
        assert!(parse_smiles("C[O](C)C").is_err());
        // metals are not valence-checked
        assert!(parse_smiles("Cl[Fe](Cl)(Cl)(Cl)(Cl)Cl").is_ok());
    }

    #[test]
    fn aromatic_outside_ring_rejected() {
        let e = parse_smiles("Ccc").unwrap_err();
        assert!(matches!(e.kind, SmilesErrorKind::Graph(GraphError::AromaticOutsideRing(_))));
        assert_eq!(e.offset, 1);
    }

    #[test]
    fn bond_between_aromatic_rings_is_single() {
        let m = parse_smiles("c1ccccc1c1ccccc1").unwrap();
        assert_eq!(m.bonds().iter().filter(|b| b.order == BondOrder::Single).count(), 1);
        assert_eq!(m.rings().len(), 2);
        let m = parse_smiles("c1ccc2ccccc2c1").unwrap();
        assert!(m.bonds().iter().all(|b| b.order == BondOrder::Aromatic));
    }

    #[test]
    fn odd_aromatic_ring_parses() {
        // kekulization is deferred to standardization
        assert!(parse_smiles("c1cccc1").is_ok());
    }
}
