mod common;

#[test]
fn hit_test_matches_brute_force() {
    common::hit_oracle_check(20, 50, 5).unwrap();
}
