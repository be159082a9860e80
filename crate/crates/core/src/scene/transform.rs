//! Row derivations attached to collections. Each carries one tunable
//! parameter that a data-update rule may recompute at runtime.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diag::{Code, Diagnostic};
use crate::model::{FieldDef, FieldKind};
use crate::value::{format_number, Row, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregator {
    Sum,
    Mean,
    Min,
    Max,
    Count,
    And,
    Or,
}

impl Aggregator {
    pub fn parse(s: &str) -> Option<Aggregator> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).ok()
    }

    pub fn name(self) -> &'static str {
        match self {
            Aggregator::Sum => "sum",
            Aggregator::Mean => "mean",
            Aggregator::Min => "min",
            Aggregator::Max => "max",
            Aggregator::Count => "count",
            Aggregator::And => "and",
            Aggregator::Or => "or",
        }
    }

    pub fn apply(self, values: &[Value]) -> Value {
        let nums = || values.iter().filter_map(Value::as_f64);
        match self {
            Aggregator::Sum => Value::Number(nums().sum()),
            Aggregator::Mean => {
                let n = nums().count();
                if n == 0 {
                    Value::Null
                } else {
                    Value::Number(nums().sum::<f64>() / n as f64)
                }
            }
            Aggregator::Min => nums().reduce(f64::min).map(Value::Number).unwrap_or(Value::Null),
            Aggregator::Max => nums().reduce(f64::max).map(Value::Number).unwrap_or(Value::Null),
            Aggregator::Count => Value::Number(values.len() as f64),
            Aggregator::And => Value::Bool(!values.is_empty() && values.iter().all(Value::truthy)),
            Aggregator::Or => Value::Bool(values.iter().any(Value::truthy)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Transform {
    /// Index each row against a baseline row: `as = value / baseline * 100`.
    Rebase {
        key: String,
        value: String,
        #[serde(rename = "as")]
        out: String,
        baseline: Value,
    },
    Aggregate {
        #[serde(rename = "groupBy")]
        group_by: Vec<String>,
        field: String,
        #[serde(rename = "as")]
        out: String,
        aggregator: Aggregator,
    },
    /// Keep rows whose level field is at most `level`.
    Hierarchy {
        #[serde(rename = "levelField")]
        level_field: String,
        level: f64,
    },
    /// Group by the current dimension list and sum `field`.
    Drill {
        field: String,
        #[serde(rename = "as")]
        out: String,
        dims: Vec<String>,
    },
    /// Square binning of two numeric fields; `size` is the bin edge.
    Bin {
        x: String,
        y: String,
        #[serde(rename = "as")]
        out: String,
        size: f64,
    },
}

pub const GROUP_FIELD: &str = "group";
pub const BIN_KEY_FIELD: &str = "bin";
pub const BIN_SIZE_FIELD: &str = "size";

impl Transform {
    pub fn op_name(&self) -> &'static str {
        match self {
            Transform::Rebase { .. } => "rebase",
            Transform::Aggregate { .. } => "aggregate",
            Transform::Hierarchy { .. } => "hierarchy",
            Transform::Drill { .. } => "drill",
            Transform::Bin { .. } => "bin",
        }
    }

    /// The name of the tunable parameter.
    pub fn param_name(&self) -> &'static str {
        match self {
            Transform::Rebase { .. } => "baseline",
            Transform::Aggregate { .. } => "aggregator",
            Transform::Hierarchy { .. } => "level",
            Transform::Drill { .. } => "dims",
            Transform::Bin { .. } => "size",
        }
    }

    pub fn param(&self) -> Value {
        match self {
            Transform::Rebase { baseline, .. } => baseline.clone(),
            Transform::Aggregate { aggregator, .. } => aggregator.name().into(),
            Transform::Hierarchy { level, .. } => (*level).into(),
            Transform::Drill { dims, .. } => dims.join(",").into(),
            Transform::Bin { size, .. } => (*size).into(),
        }
    }

    /// Sets the tunable parameter. Drill dims accept a comma-joined string.
    pub fn set_param(&mut self, v: &Value) -> Result<(), String> {
        match self {
            Transform::Rebase { baseline, .. } => *baseline = v.clone(),
            Transform::Aggregate { aggregator, .. } => {
                let s = v.as_str().ok_or("aggregator must be a string")?;
                *aggregator = Aggregator::parse(s).ok_or_else(|| format!("unknown aggregator `{s}`"))?;
            }
            Transform::Hierarchy { level, .. } => *level = v.as_f64().ok_or("level must be a number")?,
            Transform::Drill { dims, .. } => {
                let s = v.as_str().ok_or("dims must be a comma-joined string")?;
                *dims = s.split(',').map(str::trim).filter(|d| !d.is_empty()).map(String::from).collect();
            }
            Transform::Bin { size, .. } => {
                let n = v.as_f64().ok_or("bin size must be a number")?;
                if n.is_nan() || n <= 0.0 {
                    return Err("bin size must be positive".into());
                }
                *size = n;
            }
        }
        Ok(())
    }

    /// Input fields the transform reads.
    pub fn input_fields(&self) -> Vec<&str> {
        match self {
            Transform::Rebase { key, value, .. } => vec![key, value],
            Transform::Aggregate { group_by, field, .. } => {
                group_by.iter().map(String::as_str).chain([field.as_str()]).collect()
            }
            Transform::Hierarchy { level_field, .. } => vec![level_field],
            Transform::Drill { field, dims, .. } => {
                dims.iter().map(String::as_str).chain([field.as_str()]).collect()
            }
            Transform::Bin { x, y, .. } => vec![x, y],
        }
    }

    /// Output schema and key field given the input schema and key.
    pub fn output_schema(&self, fields: &[FieldDef], key: &str) -> (Vec<FieldDef>, String) {
        let num = |n: &str| FieldDef { name: n.to_string(), kind: FieldKind::Number };
        let s = |n: &str| FieldDef { name: n.to_string(), kind: FieldKind::String };
        match self {
            Transform::Rebase { out, .. } => {
                let mut f = fields.to_vec();
                if !f.iter().any(|d| &d.name == out) {
                    f.push(num(out));
                }
                (f, key.to_string())
            }
            Transform::Aggregate { group_by, out, aggregator, .. } => {
                let mut f: Vec<FieldDef> = group_by
                    .iter()
                    .map(|g| fields.iter().find(|d| &d.name == g).cloned().unwrap_or_else(|| s(g)))
                    .collect();
                let kind = match aggregator {
                    Aggregator::And | Aggregator::Or => FieldKind::Boolean,
                    _ => FieldKind::Number,
                };
                f.push(FieldDef { name: out.clone(), kind });
                let key = if group_by.len() == 1 {
                    group_by[0].clone()
                } else {
                    f.insert(0, s(GROUP_FIELD));
                    GROUP_FIELD.to_string()
                };
                (f, key)
            }
            Transform::Hierarchy { .. } => (fields.to_vec(), key.to_string()),
            Transform::Drill { out, .. } => (vec![s(GROUP_FIELD), num(out)], GROUP_FIELD.to_string()),
            Transform::Bin { x, y, out, .. } => (
                vec![s(BIN_KEY_FIELD), num(x), num(y), num(BIN_SIZE_FIELD), num(out)],
                BIN_KEY_FIELD.to_string(),
            ),
        }
    }

    pub fn apply(&self, rows: &[Row]) -> Result<Vec<Row>, Diagnostic> {
        match self {
            Transform::Rebase { key, value, out, baseline } => {
                let base = rows
                    .iter()
                    .find(|r| r.get(key).is_some_and(|k| k.key_string() == baseline.key_string()))
                    .and_then(|r| r.get(value))
                    .and_then(Value::as_f64)
                    .ok_or_else(|| {
                        Diagnostic::error(
                            Code::OutOfDomain,
                            "",
                            format!("baseline `{}` has no numeric `{value}` row", baseline.key_string()),
                        )
                    })?;
                if base == 0.0 {
                    return Err(Diagnostic::error(Code::OutOfDomain, "", "baseline value is zero"));
                }
                Ok(rows
                    .iter()
                    .map(|r| {
                        let mut r = r.clone();
                        let idx = r.get(value).and_then(Value::as_f64).map(|v| v / base * 100.0);
                        r.insert(out.clone(), idx.map(Value::Number).unwrap_or(Value::Null));
                        r
                    })
                    .collect())
            }
            Transform::Aggregate { group_by, field, out, aggregator } => {
                let groups = group_rows(rows, group_by);
                Ok(groups
                    .into_iter()
                    .map(|(vals, members)| {
                        let mut r = Row::new();
                        if group_by.len() != 1 {
                            r.insert(GROUP_FIELD.into(), join_key(&vals).into());
                        }
                        for (g, v) in group_by.iter().zip(vals) {
                            r.insert(g.clone(), v);
                        }
                        let xs: Vec<Value> =
                            members.iter().map(|m| m.get(field).cloned().unwrap_or_default()).collect();
                        r.insert(out.clone(), aggregator.apply(&xs));
                        r
                    })
                    .collect())
            }
            Transform::Hierarchy { level_field, level } => Ok(rows
                .iter()
                .filter(|r| r.get(level_field).and_then(Value::as_f64).is_some_and(|l| l <= *level))
                .cloned()
                .collect()),
            Transform::Drill { field, out, dims } => {
                let groups = group_rows(rows, dims);
                Ok(groups
                    .into_iter()
                    .map(|(vals, members)| {
                        let mut r = Row::new();
                        let label = if dims.is_empty() { "all".to_string() } else { join_key(&vals) };
                        r.insert(GROUP_FIELD.into(), label.into());
                        r.insert(out.clone(), Aggregator::Sum.apply(&members.iter().map(|m| m.get(field).cloned().unwrap_or_default()).collect::<Vec<_>>()));
                        r
                    })
                    .collect())
            }
            Transform::Bin { x, y, out, size } => {
                let mut bins: BTreeMap<(i64, i64), usize> = BTreeMap::new();
                for r in rows {
                    let (Some(vx), Some(vy)) =
                        (r.get(x).and_then(Value::as_f64), r.get(y).and_then(Value::as_f64))
                    else {
                        continue;
                    };
                    let cell = ((vx / size).floor() as i64, (vy / size).floor() as i64);
                    *bins.entry(cell).or_default() += 1;
                }
                Ok(bins
                    .into_iter()
                    .map(|((bx, by), n)| {
                        let (x0, y0) = (bx as f64 * size, by as f64 * size);
                        let mut r = Row::new();
                        r.insert(BIN_KEY_FIELD.into(), format!("{}:{}", format_number(x0), format_number(y0)).into());
                        r.insert(x.clone(), x0.into());
                        r.insert(y.clone(), y0.into());
                        r.insert(BIN_SIZE_FIELD.into(), (*size).into());
                        r.insert(out.clone(), (n as f64).into());
                        r
                    })
                    .collect())
            }
        }
    }
}

fn join_key(vals: &[Value]) -> String {
    vals.iter().map(Value::key_string).collect::<Vec<_>>().join(" / ")
}

/// Groups rows by the given fields, keeping first-appearance order.
fn group_rows<'a>(rows: &'a [Row], by: &[String]) -> Vec<(Vec<Value>, Vec<&'a Row>)> {
    let mut out: Vec<(Vec<Value>, Vec<&Row>)> = Vec::new();
    for r in rows {
        let vals: Vec<Value> = by.iter().map(|g| r.get(g).cloned().unwrap_or_default()).collect();
        match out.iter_mut().find(|(k, _)| *k == vals) {
            Some((_, members)) => members.push(r),
            None => out.push((vals, vec![r])),
        }
    }
    out
}
