//! CSV ingestion for `{"csv": "<path>"}` table rows.

use crate::model::{is_iso_date, FieldDef, FieldKind};
use crate::value::{Row, Value};

/// Parses CSV text (header row, RFC 4180 quoting). Column kinds are
/// inferred, then overridden by any `declared` field of the same name.
pub fn read_csv(text: &str, declared: &[FieldDef]) -> Result<(Vec<FieldDef>, Vec<Row>), String> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers: Vec<String> =
        rdr.headers().map_err(|e| format!("bad CSV header: {e}"))?.iter().map(str::to_string).collect();
    let mut raw: Vec<Vec<String>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| format!("bad CSV record {}: {e}", i + 1))?;
        raw.push(rec.iter().map(str::to_string).collect());
    }

    let fields: Vec<FieldDef> = headers
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let kind = declared
                .iter()
                .find(|d| &d.name == name)
                .map(|d| d.kind)
                .unwrap_or_else(|| infer_kind(raw.iter().map(|r| r[c].as_str())));
            FieldDef { name: name.clone(), kind }
        })
        .collect();

    let mut rows = Vec::with_capacity(raw.len());
    for (i, rec) in raw.iter().enumerate() {
        let mut row = Row::new();
        for (f, cell) in fields.iter().zip(rec) {
            let v = convert(cell, f.kind)
                .ok_or_else(|| format!("row {}: `{cell}` is not a {} for `{}`", i + 1, f.kind.name(), f.name))?;
            row.insert(f.name.clone(), v);
        }
        rows.push(row);
    }
    Ok((fields, rows))
}

fn infer_kind<'a>(cells: impl Iterator<Item = &'a str> + Clone) -> FieldKind {
    let present = || cells.clone().filter(|c| !c.is_empty());
    if present().next().is_none() {
        return FieldKind::String;
    }
    if present().all(|c| c.parse::<f64>().is_ok_and(f64::is_finite)) {
        FieldKind::Number
    } else if present().all(|c| c == "true" || c == "false") {
        FieldKind::Boolean
    } else if present().all(is_iso_date) {
        FieldKind::Date
    } else {
        FieldKind::String
    }
}

fn convert(cell: &str, kind: FieldKind) -> Option<Value> {
    if cell.is_empty() && kind != FieldKind::String {
        return Some(Value::Null);
    }
    match kind {
        FieldKind::Number => cell.parse::<f64>().ok().filter(|n| n.is_finite()).map(Value::Number),
        FieldKind::Boolean => match cell {
            "true" => Some(Value::Bool(true)),
            "false" => Some(Value::Bool(false)),
            _ => None,
        },
        FieldKind::Date => is_iso_date(cell).then(|| Value::String(cell.to_string())),
        FieldKind::String => Some(Value::String(cell.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infers_kinds_and_honours_quotes() {
        let text = "country,pop,date,big\nUSA,331,2020-01-01,true\n\"Korea, South\",52,2020-01-02,false\n";
        let (fields, rows) = read_csv(text, &[]).unwrap();
        let kinds: Vec<FieldKind> = fields.iter().map(|f| f.kind).collect();
        assert_eq!(kinds, vec![FieldKind::String, FieldKind::Number, FieldKind::Date, FieldKind::Boolean]);
        assert_eq!(rows[1]["country"], Value::from("Korea, South"));
        assert_eq!(rows[0]["pop"], Value::from(331.0));
    }

    #[test]
    fn declared_kind_overrides_inference() {
        let declared = [FieldDef { name: "code".into(), kind: FieldKind::String }];
        let (_, rows) = read_csv("code\n007\n", &declared).unwrap();
        assert_eq!(rows[0]["code"], Value::from("007"));
    }

    #[test]
    fn conversion_failure_is_reported() {
        let declared = [FieldDef { name: "n".into(), kind: FieldKind::Number }];
        assert!(read_csv("n\nabc\n", &declared).is_err());
    }

    #[test]
    fn ragged_rows_are_errors() {
        assert!(read_csv("a,b\n1\n", &[]).is_err());
    }
}
