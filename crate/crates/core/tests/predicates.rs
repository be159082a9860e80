mod common;

use proptest::prelude::*;
use vizact_core::interaction::predicate::Subject;
use vizact_core::interaction::{eval_predicate, Predicate};
use vizact_core::scene::ChannelSet;
use vizact_core::{Row, Value};

#[test]
fn predicate_examples_on_the_bar_chart() {
    common::predicate_check().unwrap();
}

fn row(v: f64) -> Row {
    let mut r = Row::new();
    r.insert("v".into(), Value::from(v));
    r
}

proptest! {
    #[test]
    fn between_is_inclusive_and_matches_comparisons(lo in -1e3f64..1e3, span in 0f64..1e3, x in -2e3f64..2e3) {
        let hi = lo + span;
        let p = Predicate::between("v", lo, hi);
        let r = row(x);
        prop_assert_eq!(eval_predicate(&p, &Subject::datum(&r)).unwrap(), lo <= x && x <= hi);
        prop_assert!(eval_predicate(&p, &Subject::datum(&row(lo))).unwrap());
        prop_assert!(eval_predicate(&p, &Subject::datum(&row(hi))).unwrap());
    }

    #[test]
    fn in_agrees_with_any_eq(list in proptest::collection::vec(0u8..6, 0..5), x in 0u8..6) {
        let vals: Vec<Value> = list.iter().map(|&n| Value::from(n as f64)).collect();
        let r = row(x as f64);
        let any = vals.iter().any(|v| eval_predicate(&Predicate::eq("v", v.clone()), &Subject::datum(&r)).unwrap());
        let inside = eval_predicate(&Predicate::one_of("v", vals), &Subject::datum(&r)).unwrap();
        prop_assert_eq!(inside, any);
    }

    #[test]
    fn channel_variables_read_the_channel(x in -500f64..500.0) {
        let c = ChannelSet { x, ..ChannelSet::default() };
        let p = Predicate::between("@x", 25.0, 50.0);
        prop_assert_eq!(eval_predicate(&p, &Subject::channels(&c)).unwrap(), (25.0..=50.0).contains(&x));
    }
}

#[test]
fn cleared_predicate_matches_nothing() {
    use vizact_core::interaction::predicate::PredOp;
    let p = Predicate::cleared("v", PredOp::Eq);
    assert!(!eval_predicate(&p, &Subject::datum(&row(1.0))).unwrap());
}
