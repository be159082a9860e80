//! Observable and internal interaction components.

pub mod camera;
pub mod eval_scale;
pub mod evaluator;
pub mod event;
pub mod hit;
pub mod predicate;

pub use camera::{Camera, CameraDiff};
pub use eval_scale::{apply_evaluation_scale, EvalResults};
pub use evaluator::{distance_targets, evaluate_targets, order_targets};
pub use event::{Event, EventKind, EventScript, Trigger};
pub use hit::{hit_test, HitObject};
pub use predicate::{eval_predicate, Predicate};
