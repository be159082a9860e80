//! State variables: what events write and evaluators read.

use serde::Serialize;

use crate::compiler::graph::{StateDecl, StateKind};
use crate::interaction::predicate::{Operand, PredOp, Predicate};
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum VarValue {
    Predicate(Predicate),
    Scalar(Value),
    List(Vec<Value>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Var {
    pub kind: StateKind,
    pub value: VarValue,
}

fn from_json(v: &serde_json::Value) -> VarValue {
    match v {
        serde_json::Value::Array(items) => {
            VarValue::List(items.iter().filter_map(|i| serde_json::from_value(i.clone()).ok()).collect())
        }
        other => VarValue::Scalar(serde_json::from_value(other.clone()).unwrap_or_default()),
    }
}

impl Var {
    pub fn declare(decl: &StateDecl) -> Var {
        let value = match decl.kind {
            StateKind::Predicate => {
                let mut p = Predicate::cleared(decl.field.clone().unwrap_or_default(), decl.op.unwrap_or(PredOp::Eq));
                if let Some(init) = &decl.initial {
                    p.operand = serde_json::from_value::<Operand>(init.clone()).unwrap_or_default();
                }
                VarValue::Predicate(p)
            }
            _ => decl.initial.as_ref().map(from_json).unwrap_or(VarValue::Scalar(Value::Null)),
        };
        Var { kind: decl.kind, value }
    }

    pub fn predicate(&self) -> Option<&Predicate> {
        match &self.value {
            VarValue::Predicate(p) => Some(p),
            _ => None,
        }
    }

    /// The non-null scalar value, if any.
    pub fn scalar(&self) -> Option<&Value> {
        match &self.value {
            VarValue::Scalar(v) if !v.is_null() => Some(v),
            VarValue::Predicate(p) => match &p.operand {
                Operand::Scalar(v) if !v.is_null() => Some(v),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn list(&self) -> Vec<Value> {
        match &self.value {
            VarValue::List(l) => l.clone(),
            VarValue::Predicate(Predicate { operand: Operand::List(l), .. }) => l.clone(),
            VarValue::Scalar(v) if !v.is_null() => vec![v.clone()],
            VarValue::Predicate(Predicate { operand: Operand::Scalar(v), .. }) if !v.is_null() => vec![v.clone()],
            _ => Vec::new(),
        }
    }

    /// Sets the value; null clears a predicate.
    pub fn assign(&mut self, v: Value) {
        match &mut self.value {
            VarValue::Predicate(p) => {
                if v.is_null() {
                    p.clear();
                } else if p.op.takes_list() && p.op != PredOp::Between {
                    p.operand = Operand::List(vec![v]);
                } else {
                    p.operand = Operand::Scalar(v);
                }
            }
            other => *other = VarValue::Scalar(v),
        }
    }

    pub fn clear(&mut self) {
        match &mut self.value {
            VarValue::Predicate(p) => p.clear(),
            other => *other = VarValue::Scalar(Value::Null),
        }
    }

    fn set_list(&mut self, list: Vec<Value>) {
        match &mut self.value {
            VarValue::Predicate(p) => {
                if list.is_empty() {
                    p.clear();
                } else {
                    p.operand = Operand::List(list);
                }
            }
            other => *other = VarValue::List(list),
        }
    }

    /// Adds `v` to the list, or removes it when present. An emptied
    /// predicate list is cleared.
    pub fn toggle(&mut self, v: Value) {
        let mut list = self.list();
        match list.iter().position(|x| x.key_string() == v.key_string()) {
            Some(i) => {
                list.remove(i);
            }
            None => list.push(v),
        }
        self.set_list(list);
    }

    pub fn remove(&mut self, v: &Value) {
        let mut list = self.list();
        list.retain(|x| x.key_string() != v.key_string());
        self.set_list(list);
    }
}
