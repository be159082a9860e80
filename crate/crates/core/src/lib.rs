//! Declarative interaction grammar: document model, scene graph, interaction
//! components, technique taxonomy, compiler and deterministic runtime.

pub mod compiler;
pub mod diag;
pub mod fixtures;
pub mod interaction;
pub mod model;
pub mod registry;
pub mod runtime;
pub mod scene;
pub mod value;

pub use diag::{Code, Diagnostic, Severity};
pub use value::{Row, Value};
