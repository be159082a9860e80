//! Shipped scripts replay to the checked-in traces, byte for byte.

use std::path::PathBuf;

use vizact_core::fixtures::{Fixture, ALL};

fn golden(f: &Fixture) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{}.trace.jsonl", f.name))
}

#[test]
fn traces_match_golden_files() {
    let bless = std::env::var_os("VIZACT_BLESS").is_some();
    for f in &ALL {
        let trace = f.trace();
        if bless {
            std::fs::write(golden(f), &trace).unwrap();
        }
        let want = std::fs::read_to_string(golden(f)).unwrap_or_else(|_| panic!("missing golden for {}", f.name));
        assert_eq!(trace, want, "{} drifted from its golden trace", f.name);
    }
}

#[test]
fn two_runs_are_identical() {
    for f in &ALL {
        assert_eq!(f.trace(), f.trace(), "{}", f.name);
    }
}

#[test]
fn every_fixture_event_is_accounted_for() {
    for f in &ALL {
        let n = f.events().events.len();
        assert_eq!(f.trace().lines().count(), n, "{}", f.name);
    }
}
