//! Descriptor values against the frozen reference panel.

mod common;

#[test]
fn panel_agrees_with_reference_values() {
    let bad = common::panel_mismatches();
    assert!(bad.is_empty(), "{} mismatches:\n{}", bad.len(), bad.join("\n"));
}

#[test]
fn panel_has_fifty_molecules() {
    assert_eq!(common::table(common::PANEL).1.len(), 50);
}
