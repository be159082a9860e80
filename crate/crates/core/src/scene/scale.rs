//! Data scales: linear, band, point and ordinal.

use std::cmp::Ordering;

use crate::diag::{Code, Diagnostic};
use crate::interaction::predicate::{Operand, PredOp};
use crate::model::{Document, DomainSpec, ScaleDef, ScaleKind};
use crate::scene::ChannelValue;
use crate::value::Value;

#[derive(Debug, Clone, PartialEq)]
pub struct Scale {
    pub name: String,
    pub kind: ScaleKind,
    pub domain: Vec<Value>,
    pub range: Vec<Value>,
    pub padding: f64,
}

impl Scale {
    /// Resolves data-driven domains against the document's tables.
    pub fn resolve(def: &ScaleDef, doc: &Document) -> Result<Scale, Diagnostic> {
        let domain = match &def.domain {
            DomainSpec::Values(v) => v.clone(),
            DomainSpec::Data { data, field } => {
                let t = doc.table(data).ok_or_else(|| {
                    Diagnostic::error(Code::UnresolvedName, "", format!("unknown table `{data}`"))
                })?;
                domain_from_values(def.kind, t.rows.iter().filter_map(|r| r.get(field)))
            }
        };
        Ok(Scale { name: def.name.clone(), kind: def.kind, domain, range: def.range.clone(), padding: def.padding })
    }

    /// Refits the domain to new values (used when an encoding's field
    /// changes).
    pub fn refit<'a>(&mut self, values: impl Iterator<Item = &'a Value>) {
        self.domain = domain_from_values(self.kind, values);
    }

    fn r(&self) -> (f64, f64) {
        let g = |i: usize| self.range.get(i).and_then(Value::as_f64).unwrap_or(0.0);
        (g(0), g(1))
    }

    fn index_of(&self, v: &Value) -> Option<usize> {
        self.domain.iter().position(|d| d.partial_order(v) == Some(Ordering::Equal))
    }

    pub fn step(&self) -> f64 {
        let (r0, r1) = self.r();
        let n = self.domain.len() as f64;
        match self.kind {
            ScaleKind::Band => (r1 - r0) / (n + self.padding).max(1.0),
            ScaleKind::Point => (r1 - r0) / (n - 1.0 + 2.0 * self.padding).max(1.0),
            _ => 0.0,
        }
    }

    pub fn bandwidth(&self) -> f64 {
        match self.kind {
            ScaleKind::Band => self.step() * (1.0 - self.padding),
            _ => 0.0,
        }
    }

    fn start(&self) -> f64 {
        let (r0, r1) = self.r();
        match self.kind {
            ScaleKind::Band => r0 + self.step() * self.padding,
            ScaleKind::Point => {
                let n = self.domain.len() as f64;
                r0 + ((r1 - r0) - self.step() * (n - 1.0).max(0.0)) / 2.0
            }
            _ => r0,
        }
    }

    fn out_of_domain(&self, v: &Value) -> Diagnostic {
        Diagnostic::error(Code::OutOfDomain, "", format!("`{v}` is outside the domain of scale `{}`", self.name))
    }

    pub fn apply(&self, v: &Value) -> Result<ChannelValue, Diagnostic> {
        match self.kind {
            ScaleKind::Linear => {
                let x = v.as_f64().ok_or_else(|| {
                    Diagnostic::error(Code::NotNumeric, "", format!("`{v}` is not numeric for linear scale `{}`", self.name))
                })?;
                let d0 = self.domain.first().and_then(Value::as_f64).unwrap_or(0.0);
                let d1 = self.domain.get(1).and_then(Value::as_f64).unwrap_or(1.0);
                let (r0, r1) = self.r();
                Ok(ChannelValue::Number(r0 + (x - d0) / (d1 - d0) * (r1 - r0)))
            }
            ScaleKind::Band | ScaleKind::Point => {
                let i = self.index_of(v).ok_or_else(|| self.out_of_domain(v))?;
                Ok(ChannelValue::Number(self.start() + self.step() * i as f64))
            }
            ScaleKind::Ordinal => {
                let i = self.index_of(v).ok_or_else(|| self.out_of_domain(v))?;
                let out = &self.range[i % self.range.len().max(1)];
                ChannelValue::from_value(out).ok_or_else(|| self.out_of_domain(v))
            }
        }
    }

    /// Pixel position of a category's center (band) or point.
    pub fn center_of(&self, i: usize) -> f64 {
        self.start() + self.step() * i as f64 + self.bandwidth() / 2.0
    }

    pub fn invert(&self, px: f64) -> Option<f64> {
        if self.kind != ScaleKind::Linear {
            return None;
        }
        let d0 = self.domain.first()?.as_f64()?;
        let d1 = self.domain.get(1)?.as_f64()?;
        let (r0, r1) = self.r();
        if r0 == r1 {
            return None;
        }
        Some(d0 + (px - r0) / (r1 - r0) * (d1 - d0))
    }

    /// Converts a pixel interval into a predicate operator and operand.
    /// Linear scales invert both ends; band and point scales include a
    /// category iff its center lies inside the interval.
    pub fn brush(&self, a: f64, b: f64) -> Option<(PredOp, Operand)> {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        match self.kind {
            ScaleKind::Linear => {
                let (x, y) = (self.invert(lo)?, self.invert(hi)?);
                let (x, y) = if x <= y { (x, y) } else { (y, x) };
                Some((PredOp::Between, Operand::List(vec![x.into(), y.into()])))
            }
            ScaleKind::Band | ScaleKind::Point => {
                let inside: Vec<Value> = (0..self.domain.len())
                    .filter(|&i| {
                        let c = self.center_of(i);
                        c >= lo && c <= hi
                    })
                    .map(|i| self.domain[i].clone())
                    .collect();
                let ascending = self
                    .domain
                    .windows(2)
                    .all(|w| w[0].partial_order(&w[1]) == Some(Ordering::Less));
                if ascending && !inside.is_empty() {
                    let first = inside[0].clone();
                    let last = inside[inside.len() - 1].clone();
                    Some((PredOp::Between, Operand::List(vec![first, last])))
                } else {
                    Some((PredOp::In, Operand::List(inside)))
                }
            }
            ScaleKind::Ordinal => None,
        }
    }

    /// Axis ticks: five evenly spaced values for linear scales, one per
    /// category otherwise. Each tick is (value, pixel position).
    pub fn ticks(&self) -> Vec<(Value, f64)> {
        match self.kind {
            ScaleKind::Linear => {
                let d0 = self.domain.first().and_then(Value::as_f64).unwrap_or(0.0);
                let d1 = self.domain.get(1).and_then(Value::as_f64).unwrap_or(1.0);
                (0..5)
                    .map(|i| {
                        let v = d0 + (d1 - d0) * i as f64 / 4.0;
                        let px = self.apply(&v.into()).ok().and_then(|c| c.as_f64()).unwrap_or(0.0);
                        (Value::Number(v), px)
                    })
                    .collect()
            }
            ScaleKind::Band | ScaleKind::Point => {
                self.domain.iter().enumerate().map(|(i, v)| (v.clone(), self.center_of(i))).collect()
            }
            ScaleKind::Ordinal => self.domain.iter().enumerate().map(|(i, v)| (v.clone(), i as f64)).collect(),
        }
    }
}

fn domain_from_values<'a>(kind: ScaleKind, values: impl Iterator<Item = &'a Value>) -> Vec<Value> {
    match kind {
        ScaleKind::Linear => {
            let nums: Vec<f64> = values.filter_map(Value::as_f64).collect();
            let lo = nums.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = nums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if nums.is_empty() {
                vec![0.0.into(), 1.0.into()]
            } else if lo == hi {
                vec![lo.into(), (lo + 1.0).into()]
            } else {
                vec![lo.into(), hi.into()]
            }
        }
        _ => {
            let mut out: Vec<Value> = Vec::new();
            for v in values {
                if !v.is_null() && !out.iter().any(|o| o.partial_order(v) == Some(Ordering::Equal)) {
                    out.push(v.clone());
                }
            }
            out
        }
    }
}
