mod common;

use vizact_core::registry::Registry;

#[test]
fn builtin_registry_matches_the_taxonomy() {
    common::registry_check().unwrap();
}

#[test]
fn aliases_resolve_to_their_technique() {
    let r = Registry::builtin();
    assert_eq!(r.technique("brushing and linking").unwrap().id, "linked_select");
    assert_eq!(r.technique("Shift Select").unwrap().id, "multi_select");
    assert!(r.technique("bookmark").is_none());
}

#[test]
fn select_lists_every_selection_technique() {
    let r = Registry::builtin();
    let got = r.techniques_for_user_intent("select").unwrap();
    assert_eq!(
        got,
        ["point_select", "multi_select", "range_select", "generalized_select", "linked_select", "deselect", "direct_walk"]
    );
}

#[test]
fn intents_of_semantic_zoom_span_two_authoring_intents() {
    let (users, authoring) = Registry::builtin().intents_of_technique("semantic_zoom").unwrap();
    assert_eq!(users, ["steer", "abstract_elaborate"]);
    assert_eq!(authoring, ["AI2", "AI4"]);
}

#[test]
fn unknown_technique_is_a_diagnostic() {
    assert!(Registry::builtin().signature_of("teleport").is_err());
    assert!(Registry::builtin().techniques_for_user_intent("teleport").is_err());
}

#[test]
fn malformed_registry_is_rejected() {
    let dup = common::REGISTRY_JSON.replacen("\"pan\"", "\"sort\"", 1);
    assert!(Registry::from_json(&dup).is_err());
    assert!(Registry::from_json("{}").is_err());
}
