mod common;

use vizact_core::model::parse_document;

#[test]
fn mutated_documents_never_crash() {
    common::parser_fuzz_check(10_000, 3).unwrap();
}

#[test]
fn failures_point_at_the_offending_input() {
    let diags = parse_document("{\"name\": \"x\", \"scenes\": [").unwrap_err();
    assert!(!diags.is_empty());
    let diags = parse_document("{\"name\": 3}").unwrap_err();
    assert_eq!(diags[0].path, "/name");
}

#[test]
fn non_utf8_bytes_are_a_diagnostic() {
    let diags = vizact_core::model::parse_document_bytes(b"{\"name\": \"\xff\"}").unwrap_err();
    assert!(!diags.is_empty());
}
