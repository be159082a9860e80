mod common;

use vizact_core::compiler::classify::classify_interaction;
use vizact_core::compiler::compile_document;
use vizact_core::registry::Registry;

#[test]
fn every_technique_classifies_back_to_itself() {
    common::roundtrip_check().unwrap();
}

#[test]
fn taxonomy_has_one_unit_per_technique() {
    let r = Registry::builtin();
    let d = common::doc(common::TAXONOMY);
    let out = compile_document(r, &d);
    let mut got: Vec<&str> = out.interactions.iter().map(|c| c.technique.as_str()).collect();
    got.sort();
    let mut want: Vec<&str> = common::SIGNATURES.iter().map(|s| s.0).collect();
    want.sort();
    assert_eq!(got, want);
}

#[test]
fn classification_carries_intents_from_the_registry() {
    let r = Registry::builtin();
    let d = common::doc(common::TAXONOMY);
    for ci in compile_document(r, &d).interactions {
        let rep = classify_interaction(r, &ci.unit, &ci.graph, &d);
        let (users, authoring) = r.intents_of_technique(&ci.technique).unwrap();
        assert_eq!(rep.user_intents, users, "{}", ci.unit);
        assert_eq!(rep.authoring_intents, authoring, "{}", ci.unit);
    }
}
