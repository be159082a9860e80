//! Structured diagnostics shared by every stage of the pipeline.
//!
//! A [`Diagnostic`] always carries a stable [`Code`] and a slash-delimited
//! pointer into the source document, so editors and the CLI can anchor it.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Hint,
}

/// Stable diagnostic identifiers. The serialized form never changes between
/// releases; new codes are only ever appended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Code {
    #[serde(rename = "E000_SYNTAX")]
    Syntax,
    #[serde(rename = "E001_UNRESOLVED_NAME")]
    UnresolvedName,
    #[serde(rename = "E002_UNKNOWN_KEY")]
    UnknownKey,
    #[serde(rename = "E003_WRONG_KIND")]
    WrongKind,
    #[serde(rename = "E004_DUPLICATE_NAME")]
    DuplicateName,
    #[serde(rename = "E005_CSV")]
    Csv,
    #[serde(rename = "E006_ROW_SCHEMA")]
    RowSchema,
    #[serde(rename = "E007_BAD_HIERARCHY")]
    BadHierarchy,
    #[serde(rename = "E008_BAD_SCALE")]
    BadScale,
    #[serde(rename = "E009_BAD_PREDICATE")]
    BadPredicate,
    #[serde(rename = "E010_MISSING_TECHNIQUE")]
    MissingTechnique,
    #[serde(rename = "E011_MISSING_INTENT")]
    MissingIntent,
    #[serde(rename = "E012_MISSING_COMPONENTS")]
    MissingComponents,
    #[serde(rename = "E013_MISSING_TARGET")]
    MissingTarget,
    #[serde(rename = "E014_CONTROL_DOMAIN")]
    ControlDomain,
    #[serde(rename = "E020_UNKNOWN_FIELD")]
    UnknownField,
    #[serde(rename = "E021_OUT_OF_DOMAIN")]
    OutOfDomain,
    #[serde(rename = "E022_NOT_NUMERIC")]
    NotNumeric,
    #[serde(rename = "E023_SCHEMA_MISMATCH")]
    SchemaMismatch,
    #[serde(rename = "E030_UNRESOLVED_VARIABLE")]
    UnresolvedVariable,
    #[serde(rename = "E031_ANCHOR_NOT_IN_TARGETS")]
    AnchorNotInTargets,
    #[serde(rename = "E032_KIND_MISMATCH")]
    KindMismatch,
    #[serde(rename = "E033_NON_POSITIVE_FACTOR")]
    NonPositiveFactor,
    #[serde(rename = "E034_TICK_ORDER")]
    TickOrder,
    #[serde(rename = "E035_DRAG_SEQUENCE")]
    DragSequence,
    #[serde(rename = "E040_UNKNOWN_TECHNIQUE")]
    UnknownTechnique,
    #[serde(rename = "E041_UNKNOWN_INTENT")]
    UnknownIntent,
    #[serde(rename = "E050_MISSING_BINDING")]
    MissingBinding,
    #[serde(rename = "E051_SCOPE_MISMATCH")]
    ScopeMismatch,
    #[serde(rename = "W052_SIGNATURE_INCOMPLETE")]
    SignatureIncomplete,
    #[serde(rename = "W053_EXTRANEOUS_COMPONENT")]
    ExtraneousComponent,
    #[serde(rename = "E054_UNCLASSIFIED")]
    Unclassified,
    #[serde(rename = "E060_NO_CANDIDATE")]
    NoCandidate,
    #[serde(rename = "H061_UNSATISFIABLE")]
    Unsatisfiable,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::Syntax => "E000_SYNTAX",
            Code::UnresolvedName => "E001_UNRESOLVED_NAME",
            Code::UnknownKey => "E002_UNKNOWN_KEY",
            Code::WrongKind => "E003_WRONG_KIND",
            Code::DuplicateName => "E004_DUPLICATE_NAME",
            Code::Csv => "E005_CSV",
            Code::RowSchema => "E006_ROW_SCHEMA",
            Code::BadHierarchy => "E007_BAD_HIERARCHY",
            Code::BadScale => "E008_BAD_SCALE",
            Code::BadPredicate => "E009_BAD_PREDICATE",
            Code::MissingTechnique => "E010_MISSING_TECHNIQUE",
            Code::MissingIntent => "E011_MISSING_INTENT",
            Code::MissingComponents => "E012_MISSING_COMPONENTS",
            Code::MissingTarget => "E013_MISSING_TARGET",
            Code::ControlDomain => "E014_CONTROL_DOMAIN",
            Code::UnknownField => "E020_UNKNOWN_FIELD",
            Code::OutOfDomain => "E021_OUT_OF_DOMAIN",
            Code::NotNumeric => "E022_NOT_NUMERIC",
            Code::SchemaMismatch => "E023_SCHEMA_MISMATCH",
            Code::UnresolvedVariable => "E030_UNRESOLVED_VARIABLE",
            Code::AnchorNotInTargets => "E031_ANCHOR_NOT_IN_TARGETS",
            Code::KindMismatch => "E032_KIND_MISMATCH",
            Code::NonPositiveFactor => "E033_NON_POSITIVE_FACTOR",
            Code::TickOrder => "E034_TICK_ORDER",
            Code::DragSequence => "E035_DRAG_SEQUENCE",
            Code::UnknownTechnique => "E040_UNKNOWN_TECHNIQUE",
            Code::UnknownIntent => "E041_UNKNOWN_INTENT",
            Code::MissingBinding => "E050_MISSING_BINDING",
            Code::ScopeMismatch => "E051_SCOPE_MISMATCH",
            Code::SignatureIncomplete => "W052_SIGNATURE_INCOMPLETE",
            Code::ExtraneousComponent => "W053_EXTRANEOUS_COMPONENT",
            Code::Unclassified => "E054_UNCLASSIFIED",
            Code::NoCandidate => "E060_NO_CANDIDATE",
            Code::Unsatisfiable => "H061_UNSATISFIABLE",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: Code, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { severity: Severity::Error, code, path: path.into(), message: message.into() }
    }

    pub fn warning(code: Code, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { severity: Severity::Warning, code, path: path.into(), message: message.into() }
    }

    pub fn hint(code: Code, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { severity: Severity::Hint, code, path: path.into(), message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// One JSON object per line, the wire form used by the CLI and the
    /// serve protocol.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("diagnostic serializes")
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Hint => "hint",
        };
        write!(f, "{sev}[{}] {}: {}", self.code, self.path, self.message)
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

/// Builds slash-delimited document pointers, escaping per RFC 6901.
pub fn pointer<I, S>(segments: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out = String::new();
    for seg in segments {
        out.push('/');
        out.push_str(&seg.as_ref().replace('~', "~0").replace('/', "~1"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_serializes_to_its_stable_string() {
        for code in [Code::UnresolvedName, Code::MissingTechnique, Code::SignatureIncomplete] {
            let json = serde_json::to_string(&code).unwrap();
            assert_eq!(json, format!("\"{}\"", code.as_str()));
        }
    }

    #[test]
    fn diagnostic_json_line_has_fixed_field_order() {
        let d = Diagnostic::error(Code::DuplicateName, "/data/1/name", "duplicate table `t`");
        assert_eq!(
            d.to_json_line(),
            r#"{"severity":"error","code":"E004_DUPLICATE_NAME","path":"/data/1/name","message":"duplicate table `t`"}"#
        );
    }

    #[test]
    fn pointer_escapes_slashes() {
        assert_eq!(pointer(["a/b", "0"]), "/a~1b/0");
    }
}
