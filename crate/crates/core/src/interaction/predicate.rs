//! Predicates: variable, operator, operand, plus optional AND-conjuncts.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diag::{Code, Diagnostic};
use crate::scene::channels::ChannelSet;
use crate::value::{Row, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredOp {
    Eq,
    Neq,
    Lt,
    Lte,
    Gt,
    Gte,
    In,
    NotIn,
    Between,
}

impl PredOp {
    pub fn symbol(self) -> &'static str {
        match self {
            PredOp::Eq => "=",
            PredOp::Neq => "!=",
            PredOp::Lt => "<",
            PredOp::Lte => "<=",
            PredOp::Gt => ">",
            PredOp::Gte => ">=",
            PredOp::In => "in",
            PredOp::NotIn => "not in",
            PredOp::Between => "between",
        }
    }

    pub fn takes_list(self) -> bool {
        matches!(self, PredOp::In | PredOp::NotIn | PredOp::Between)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Operand {
    List(Vec<Value>),
    Scalar(Value),
}

impl Operand {
    pub const CLEARED: Operand = Operand::Scalar(Value::Null);

    pub fn is_cleared(&self) -> bool {
        matches!(self, Operand::Scalar(Value::Null))
    }
}

impl Default for Operand {
    fn default() -> Self {
        Operand::CLEARED
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub variable: String,
    pub op: PredOp,
    #[serde(default)]
    pub operand: Operand,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conjuncts: Vec<Predicate>,
}

/// What a predicate is evaluated against: a datum, a channel set, or both.
#[derive(Debug, Clone, Copy, Default)]
pub struct Subject<'a> {
    pub datum: Option<&'a Row>,
    pub channels: Option<&'a ChannelSet>,
}

impl<'a> Subject<'a> {
    pub fn datum(row: &'a Row) -> Self {
        Subject { datum: Some(row), channels: None }
    }

    pub fn channels(ch: &'a ChannelSet) -> Self {
        Subject { datum: None, channels: Some(ch) }
    }
}

impl Predicate {
    pub fn new(variable: impl Into<String>, op: PredOp, operand: Operand) -> Self {
        Predicate { variable: variable.into(), op, operand, conjuncts: Vec::new() }
    }

    pub fn eq(variable: impl Into<String>, v: impl Into<Value>) -> Self {
        Self::new(variable, PredOp::Eq, Operand::Scalar(v.into()))
    }

    pub fn one_of(variable: impl Into<String>, vs: Vec<Value>) -> Self {
        Self::new(variable, PredOp::In, Operand::List(vs))
    }

    pub fn between(variable: impl Into<String>, lo: impl Into<Value>, hi: impl Into<Value>) -> Self {
        Self::new(variable, PredOp::Between, Operand::List(vec![lo.into(), hi.into()]))
    }

    pub fn cleared(variable: impl Into<String>, op: PredOp) -> Self {
        Self::new(variable, op, Operand::CLEARED)
    }

    pub fn is_cleared(&self) -> bool {
        self.operand.is_cleared()
    }

    pub fn clear(&mut self) {
        self.operand = Operand::CLEARED;
        self.conjuncts.clear();
    }

    /// Structural well-formedness of operand against operator.
    pub fn check(&self) -> Result<(), String> {
        if !self.operand.is_cleared() {
            match (&self.op, &self.operand) {
                (PredOp::In | PredOp::NotIn, Operand::List(_)) => {}
                (PredOp::In | PredOp::NotIn, _) => {
                    return Err(format!("operator `{}` needs a list operand", self.op.symbol()))
                }
                (PredOp::Between, Operand::List(pair)) => {
                    if pair.len() != 2 {
                        return Err("`between` needs a [lo, hi] pair".into());
                    }
                    match pair[0].partial_order(&pair[1]) {
                        Some(Ordering::Greater) => return Err("`between` needs lo <= hi".into()),
                        None => return Err("`between` bounds are not comparable".into()),
                        _ => {}
                    }
                }
                (PredOp::Between, _) => return Err("`between` needs a [lo, hi] pair".into()),
                (_, Operand::List(_)) => {
                    return Err(format!("operator `{}` needs a scalar operand", self.op.symbol()))
                }
                _ => {}
            }
        }
        if self.variable.is_empty() || self.variable == "@" {
            return Err("empty predicate variable".into());
        }
        if let Some(ch) = self.variable.strip_prefix('@') {
            ch.parse::<crate::scene::Channel>()?;
        }
        self.conjuncts.iter().try_for_each(Predicate::check)
    }

    /// Field names this predicate reads (channel variables excluded).
    pub fn fields(&self) -> Vec<&str> {
        let mut out = Vec::new();
        if !self.variable.starts_with('@') {
            out.push(self.variable.as_str());
        }
        for c in &self.conjuncts {
            out.extend(c.fields());
        }
        out
    }
}

fn resolve(variable: &str, subject: &Subject<'_>) -> Result<Value, Diagnostic> {
    if let Some(name) = variable.strip_prefix('@') {
        let ch = name
            .parse::<crate::scene::Channel>()
            .map_err(|e| Diagnostic::error(Code::UnresolvedVariable, "", e))?;
        return match subject.channels {
            Some(cs) => Ok(cs.get(ch).to_value()),
            None => Err(Diagnostic::error(
                Code::UnresolvedVariable,
                "",
                format!("channel variable `{variable}` has no channel set to read"),
            )),
        };
    }
    subject
        .datum
        .and_then(|row| row.get(variable))
        .cloned()
        .ok_or_else(|| {
            Diagnostic::error(Code::UnresolvedVariable, "", format!("field `{variable}` not present on subject"))
        })
}

fn same(a: &Value, b: &Value) -> bool {
    a.partial_order(b) == Some(Ordering::Equal)
}

/// Evaluates `p` on `subject`. A cleared operand matches nothing.
pub fn eval_predicate(p: &Predicate, subject: &Subject<'_>) -> Result<bool, Diagnostic> {
    let v = resolve(&p.variable, subject)?;
    let mut result = if p.is_cleared() {
        false
    } else {
        match (&p.op, &p.operand) {
            (PredOp::Eq, Operand::Scalar(o)) => same(&v, o),
            (PredOp::Neq, Operand::Scalar(o)) => !same(&v, o),
            (PredOp::Lt, Operand::Scalar(o)) => v.partial_order(o) == Some(Ordering::Less),
            (PredOp::Lte, Operand::Scalar(o)) => {
                matches!(v.partial_order(o), Some(Ordering::Less | Ordering::Equal))
            }
            (PredOp::Gt, Operand::Scalar(o)) => v.partial_order(o) == Some(Ordering::Greater),
            (PredOp::Gte, Operand::Scalar(o)) => {
                matches!(v.partial_order(o), Some(Ordering::Greater | Ordering::Equal))
            }
            (PredOp::In, Operand::List(xs)) => xs.iter().any(|x| same(&v, x)),
            (PredOp::NotIn, Operand::List(xs)) => !xs.iter().any(|x| same(&v, x)),
            (PredOp::Between, Operand::List(xs)) if xs.len() == 2 => {
                matches!(v.partial_order(&xs[0]), Some(Ordering::Greater | Ordering::Equal))
                    && matches!(v.partial_order(&xs[1]), Some(Ordering::Less | Ordering::Equal))
            }
            _ => {
                return Err(Diagnostic::error(
                    Code::BadPredicate,
                    "",
                    format!("operand shape does not fit operator `{}`", p.op.symbol()),
                ))
            }
        }
    };
    for c in &p.conjuncts {
        let r = eval_predicate(c, subject)?;
        result = result && r;
    }
    Ok(result)
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn one(v: &Value) -> String {
            match v {
                Value::String(s) => format!("\"{s}\""),
                other => other.key_string(),
            }
        }
        match self {
            Operand::Scalar(v) => f.write_str(&one(v)),
            Operand::List(xs) => {
                let parts: Vec<String> = xs.iter().map(one).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.variable, self.op.symbol(), self.operand)?;
        for c in &self.conjuncts {
            write!(f, " and {c}")?;
        }
        Ok(())
    }
}
