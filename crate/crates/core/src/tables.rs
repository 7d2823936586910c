//! Embedded data tables and their checksums.

use sha2::{Digest, Sha256};

use crate::molgraph::element::ELEMENTS_TSV;

pub(crate) const TPSA_TSV: &str = include_str!("../data/tpsa.tsv");
pub(crate) const CRIPPEN_TSV: &str = include_str!("../data/crippen.tsv");
pub(crate) const FILTER_RULES: &str = include_str!("../data/filters.rules");

/// A data file compiled into the library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableInfo {
    pub name: &'static str,
    /// Value of the `# version:` header line, if present.
    pub version: Option<String>,
    /// Hex SHA-256 of the file contents.
    pub sha256: String,
}

/// All embedded tables, in a fixed order.
pub fn tables() -> Vec<TableInfo> {
    [
        ("elements.tsv", ELEMENTS_TSV),
        ("tpsa.tsv", TPSA_TSV),
        ("crippen.tsv", CRIPPEN_TSV),
        ("filters.rules", FILTER_RULES),
    ]
    .into_iter()
    .map(|(name, text)| TableInfo { name, version: header_version(text), sha256: sha256_hex(text.as_bytes()) })
    .collect()
}

fn header_version(text: &str) -> Option<String> {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.trim_start_matches('#').trim().strip_prefix("version:").map(|v| v.trim().to_string()))
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Non-comment, non-blank lines of a table split on tabs.
pub(crate) fn rows(text: &str) -> impl Iterator<Item = Vec<&str>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split('\t').map(str::trim).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_table_has_a_checksum() {
        let t = tables();
        assert_eq!(t.len(), 4);
        for info in &t {
            assert_eq!(info.sha256.len(), 64);
        }
        assert_eq!(t[1].version.as_deref(), Some("1"));
    }
}
