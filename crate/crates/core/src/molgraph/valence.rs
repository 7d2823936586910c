//! Allowed-valence table.
//!
//! Neutral elements carry a fixed list of default valences. Charged atoms use
//! the list of the isoelectronic neighbour (atomic number minus charge), so
//! `[N+]` behaves like carbon and `[O-]` like fluorine. Elements absent from
//! the table (metals and anything exotic) are not valence-checked.

use super::element::NITROGEN;

fn neutral_valences(z: u8) -> Option<&'static [u8]> {
    Some(match z {
        1 => &[1],
        2 | 10 | 18 | 36 | 54 | 86 => &[0],
        5 => &[3],
        6 => &[4],
        7 => &[3],
        8 => &[2],
        9 => &[1],
        14 => &[4],
        15 => &[3, 5],
        16 => &[2, 4, 6],
        17 => &[1],
        32 => &[4],
        33 => &[3, 5],
        34 => &[2, 4, 6],
        35 => &[1],
        51 => &[3, 5],
        52 => &[2, 4, 6],
        53 => &[1, 3, 5],
        _ => return None,
    })
}

/// Valence checking mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValenceMode {
    /// Input tolerance: neutral pentavalent nitrogen is accepted so that
    /// nitro/N-oxide/azide structures drawn without charges can be read and
    /// later normalized.
    Permissive,
    /// Post-standardization table.
    Strict,
}

/// Allowed valences for an element with the given formal charge, or `None`
/// when the atom is outside the table.
pub fn allowed_valences(z: u8, charge: i8, mode: ValenceMode) -> Option<&'static [u8]> {
    neutral_valences(z)?;
    if charge == 0 {
        if z == NITROGEN && mode == ValenceMode::Permissive {
            return Some(&[3, 5]);
        }
        return neutral_valences(z);
    }
    let shifted = z as i16 - charge as i16;
    if !(1..=118).contains(&shifted) {
        return None;
    }
    neutral_valences(shifted as u8)
}

/// Smallest allowed valence that is at least `used`.
pub fn fill_valence(z: u8, charge: i8, used: u32, mode: ValenceMode) -> Option<u32> {
    allowed_valences(z, charge, mode)?
        .iter()
        .map(|&v| v as u32)
        .find(|&v| v >= used)
}

/// Largest allowed valence, if the atom is in the table.
pub fn max_valence(z: u8, charge: i8, mode: ValenceMode) -> Option<u32> {
    allowed_valences(z, charge, mode).and_then(|v| v.last().map(|&x| x as u32))
}
