//! Text to [`Document`]: syntax, shape, defaults and level invariants.

use std::path::PathBuf;

use crate::diag::{pointer, Code, Diagnostic};
use crate::model::{Document, Level, ObjectDecl};
use crate::scene::channels::default_style;
use crate::value::Value;

/// Supplies the text of files referenced by `{"csv": path}` rows.
pub trait FileResolver {
    fn read(&self, path: &str) -> Result<String, String>;
}

/// Resolver for pure parsing: every file reference fails.
pub struct NoFiles;

impl FileResolver for NoFiles {
    fn read(&self, path: &str) -> Result<String, String> {
        Err(format!("file access disabled, cannot read `{path}`"))
    }
}

/// Resolves paths relative to a base directory.
pub struct DirResolver(pub PathBuf);

impl FileResolver for DirResolver {
    fn read(&self, path: &str) -> Result<String, String> {
        let p = self.0.join(path);
        std::fs::read_to_string(&p).map_err(|e| format!("cannot read `{}`: {e}", p.display()))
    }
}

const TOP_LEVEL: [&str; 6] = ["name", "data", "scales", "scenes", "interactions", "meta"];

/// Parses without file access; CSV row references yield `E005_CSV`.
pub fn parse_document(text: &str) -> Result<(Document, Vec<Diagnostic>), Vec<Diagnostic>> {
    parse_document_with(text, &NoFiles)
}

/// Parses raw bytes, reporting invalid UTF-8 as a syntax error.
pub fn parse_document_bytes(bytes: &[u8]) -> Result<(Document, Vec<Diagnostic>), Vec<Diagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_document(text),
        Err(e) => Err(vec![Diagnostic::error(Code::Syntax, "", format!("invalid UTF-8: {e}"))]),
    }
}

/// Returns the document plus non-fatal diagnostics (warnings), or every
/// diagnostic when at least one is an error.
pub fn parse_document_with(
    text: &str,
    files: &dyn FileResolver,
) -> Result<(Document, Vec<Diagnostic>), Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut value: serde_json::Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            return Err(vec![Diagnostic::error(
                Code::Syntax,
                "",
                format!("{e} (line {}, column {})", e.line(), e.column()),
            )])
        }
    };
    let Some(obj) = value.as_object() else {
        return Err(vec![Diagnostic::error(Code::WrongKind, "", "document must be a JSON object")]);
    };
    for key in obj.keys() {
        if !TOP_LEVEL.contains(&key.as_str()) {
            diags.push(Diagnostic::warning(Code::UnknownKey, pointer([key]), format!("unknown top-level key `{key}`")));
        }
    }
    resolve_csv_rows(&mut value, files, &mut diags);
    if diags.iter().any(Diagnostic::is_error) {
        return Err(diags);
    }

    let mut ignored: Vec<String> = Vec::new();
    let mut on_ignored = |path: serde_ignored::Path<'_>| {
        let mut segs = Vec::new();
        ignored_segments(&path, &mut segs);
        ignored.push(pointer(segs));
    };
    let de = serde_ignored::Deserializer::new(value, &mut on_ignored);
    let parsed: Result<Document, _> = serde_path_to_error::deserialize(de);
    for p in ignored {
        if p.matches('/').count() > 1 {
            let key = p.rsplit('/').next().unwrap_or_default().replace("~1", "/").replace("~0", "~");
            diags.push(Diagnostic::warning(Code::UnknownKey, p.clone(), format!("unknown key `{key}`")));
        }
    }
    let mut doc = match parsed {
        Ok(d) => d,
        Err(e) => {
            diags.push(Diagnostic::error(Code::WrongKind, path_to_pointer(e.path()), e.inner().to_string()));
            return Err(diags);
        }
    };

    for (i, unit) in doc.interactions.iter_mut().enumerate() {
        let at = format!("/interactions/{i}");
        let level = unit.level();
        unit.level = Some(level);
        match level {
            Level::Intent if unit.intent.is_none() => {
                diags.push(Diagnostic::error(Code::MissingIntent, at.clone(), "level `intent` needs an `intent`"))
            }
            Level::Technique if unit.technique.is_none() => diags.push(Diagnostic::error(
                Code::MissingTechnique,
                at.clone(),
                "level `technique` needs a `technique`",
            )),
            Level::Component if unit.components.is_none() => diags.push(Diagnostic::error(
                Code::MissingComponents,
                at.clone(),
                "level `component` needs `components`",
            )),
            _ => {}
        }
        if let Some(intent) = &unit.intent {
            if intent.authoring.is_none() && intent.user.is_none() {
                diags.push(Diagnostic::error(
                    Code::MissingIntent,
                    format!("{at}/intent"),
                    "intent needs `authoringIntent` or `userIntent`",
                ));
            }
        }
        if unit.target.is_empty() {
            diags.push(Diagnostic::error(Code::MissingTarget, at, "an interaction unit needs at least one target"));
        }
    }
    fill_defaults(&mut doc);

    if diags.iter().any(Diagnostic::is_error) {
        Err(diags)
    } else {
        Ok((doc, diags))
    }
}

fn fill_defaults(doc: &mut Document) {
    for t in &mut doc.data {
        if t.fields.is_empty() {
            if let Some(first) = t.rows.first() {
                t.fields = first
                    .keys()
                    .map(|k| {
                        let v = t.rows.iter().filter_map(|r| r.get(k)).find(|v| !v.is_null());
                        let kind = match v {
                            Some(Value::Number(_)) => super::FieldKind::Number,
                            Some(Value::Bool(_)) => super::FieldKind::Boolean,
                            _ => super::FieldKind::String,
                        };
                        super::FieldDef { name: k.clone(), kind }
                    })
                    .collect();
            }
        }
        if t.key.is_none() {
            t.key = t.fields.first().map(|f| f.name.clone());
        }
    }
    for s in &mut doc.scenes {
        for o in &mut s.objects {
            fill_style(o);
        }
    }
}

fn fill_style(o: &mut ObjectDecl) {
    if o.is_mark_like() {
        for (ch, v) in default_style() {
            o.channels.entry(ch).or_insert(v);
        }
    }
    if let Some(t) = &mut o.template {
        fill_style(t);
    }
    for p in &mut o.parts {
        fill_style(p);
    }
}

/// Replaces `{"csv": path}` row specs by inline rows (and fills `fields`).
fn resolve_csv_rows(value: &mut serde_json::Value, files: &dyn FileResolver, diags: &mut Vec<Diagnostic>) {
    let Some(tables) = value.get_mut("data").and_then(|d| d.as_array_mut()) else {
        return;
    };
    for (i, t) in tables.iter_mut().enumerate() {
        let Some(path) = t.get("rows").and_then(|r| r.get("csv")).and_then(|p| p.as_str()).map(str::to_string)
        else {
            continue;
        };
        let at = format!("/data/{i}/rows");
        let declared: Vec<super::FieldDef> =
            t.get("fields").and_then(|f| serde_json::from_value(f.clone()).ok()).unwrap_or_default();
        let text = match files.read(&path) {
            Ok(text) => text,
            Err(e) => {
                diags.push(Diagnostic::error(Code::Csv, at, e));
                continue;
            }
        };
        match super::csv::read_csv(&text, &declared) {
            Ok((fields, rows)) => {
                t["rows"] = serde_json::to_value(rows).expect("rows serialize");
                if declared.is_empty() {
                    t["fields"] = serde_json::to_value(fields).expect("fields serialize");
                }
            }
            Err(e) => diags.push(Diagnostic::error(Code::Csv, at, e)),
        }
    }
}

fn ignored_segments(path: &serde_ignored::Path<'_>, out: &mut Vec<String>) {
    use serde_ignored::Path;
    match path {
        Path::Root => {}
        Path::Seq { parent, index } => {
            ignored_segments(parent, out);
            out.push(index.to_string());
        }
        Path::Map { parent, key } => {
            ignored_segments(parent, out);
            out.push(key.clone());
        }
        Path::Some { parent } | Path::NewtypeStruct { parent } | Path::NewtypeVariant { parent } => {
            ignored_segments(parent, out)
        }
    }
}

/// Converts a serde path into a slash-delimited document pointer.
pub fn path_to_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let segs: Vec<String> = path
        .iter()
        .filter_map(|s| match s {
            Segment::Seq { index } => Some(index.to_string()),
            Segment::Map { key } => Some(key.clone()),
            Segment::Enum { .. } | Segment::Unknown => None,
        })
        .collect();
    pointer(segs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::Severity;

    #[test]
    fn empty_document_parses() {
        let (doc, diags) =
            parse_document(r#"{"name":"empty","data":[],"scales":[],"scenes":[],"interactions":[]}"#).unwrap();
        assert_eq!(doc.name, "empty");
        assert!(doc.data.is_empty() && doc.scenes.is_empty() && doc.interactions.is_empty());
        assert!(diags.is_empty());
    }

    #[test]
    fn syntax_error_is_e000() {
        let errs = parse_document("{\"name\": ").unwrap_err();
        assert_eq!(errs[0].code, Code::Syntax);
    }

    #[test]
    fn unknown_keys_warn_with_paths() {
        let (_, diags) = parse_document(
            r#"{"name":"d","extra":1,"data":[{"name":"t","fields":[],"rows":[],"colour":"red"}]}"#,
        )
        .unwrap();
        let got: Vec<(&str, Severity)> = diags.iter().map(|d| (d.path.as_str(), d.severity)).collect();
        assert!(got.contains(&("/extra", Severity::Warning)));
        assert!(got.contains(&("/data/0/colour", Severity::Warning)));
    }

    #[test]
    fn wrong_kind_points_at_node() {
        let errs = parse_document(r#"{"name":"d","scales":[{"name":"s","kind":"linear","domain":[0,1],"range":[0,1],"padding":"x"}]}"#)
            .unwrap_err();
        assert_eq!(errs[0].code, Code::WrongKind);
        assert_eq!(errs[0].path, "/scales/0/padding");
    }

    #[test]
    fn technique_level_without_technique() {
        let errs = parse_document(
            r#"{"name":"d","interactions":[{"name":"u","level":"technique","on":{"event":"click","listener":"main"},"target":"bars"}]}"#,
        )
        .unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].code, Code::MissingTechnique);
        assert_eq!(errs[0].path, "/interactions/0");
    }

    #[test]
    fn csv_rows_without_resolver_fail_with_e005() {
        let errs = parse_document(r#"{"name":"d","data":[{"name":"t","rows":{"csv":"t.csv"}}]}"#).unwrap_err();
        assert_eq!(errs[0].code, Code::Csv);
        assert_eq!(errs[0].path, "/data/0/rows");
    }

    #[test]
    fn csv_rows_resolve_through_resolver() {
        struct One;
        impl FileResolver for One {
            fn read(&self, _: &str) -> Result<String, String> {
                Ok("k,v\na,1\nb,2\n".into())
            }
        }
        let (doc, _) =
            parse_document_with(r#"{"name":"d","data":[{"name":"t","rows":{"csv":"t.csv"}}]}"#, &One).unwrap();
        assert_eq!(doc.data[0].rows.len(), 2);
        assert_eq!(doc.data[0].key_field(), Some("k"));
    }

    #[test]
    fn invalid_utf8_is_syntax() {
        assert_eq!(parse_document_bytes(&[0xff, 0xfe]).unwrap_err()[0].code, Code::Syntax);
    }
}
