mod common;

use vizact_core::compiler::explain::{explain_document, to_json, to_markdown, COLUMNS};
use vizact_core::registry::Registry;

#[test]
fn dust_and_magnet_table() {
    let rows = common::explain_rows(common::DNM).unwrap();
    assert_eq!(rows, common::DNM_TABLE.map(|r| r.map(String::from)));
}

#[test]
fn onset_table() {
    let rows = common::explain_rows(common::ONSET).unwrap();
    assert_eq!(rows, common::ONSET_TABLE.map(|r| r.map(String::from)));
}

#[test]
fn columns_are_the_eight_table_headings() {
    assert_eq!(
        COLUMNS,
        ["Action", "User Intent", "Technique", "Event", "Listener", "Hit Object", "Target", "Internal Components"]
    );
}

#[test]
fn markdown_has_a_header_and_one_line_per_unit() {
    let r = Registry::builtin();
    let reports = explain_document(r, &common::doc(common::ONSET)).unwrap();
    let md = to_markdown(r, &reports);
    let lines: Vec<&str> = md.lines().collect();
    assert_eq!(lines.len(), 2 + 4);
    assert!(lines[0].starts_with("| Action |"));
    assert!(lines[4].contains("| Compare Matrices | abstract | move up a hierarchy |"));
}

#[test]
fn json_rows_mirror_markdown() {
    let r = Registry::builtin();
    let reports = explain_document(r, &common::doc(common::DNM)).unwrap();
    let v = to_json(r, &reports);
    let text = v.to_string();
    assert!(text.contains("\"reposition\""));
    assert!(text.contains("all dust particles"));
}
