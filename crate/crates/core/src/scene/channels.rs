//! Visual channels of a visual object.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Channel {
    X,
    Y,
    Width,
    Height,
    Radius,
    StartAngle,
    EndAngle,
    Fill,
    Stroke,
    Opacity,
    StrokeWidth,
    Text,
    Order,
    Visible,
}

impl Channel {
    pub const ALL: [Channel; 14] = [
        Channel::X,
        Channel::Y,
        Channel::Width,
        Channel::Height,
        Channel::Radius,
        Channel::StartAngle,
        Channel::EndAngle,
        Channel::Fill,
        Channel::Stroke,
        Channel::Opacity,
        Channel::StrokeWidth,
        Channel::Text,
        Channel::Order,
        Channel::Visible,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Channel::X => "x",
            Channel::Y => "y",
            Channel::Width => "width",
            Channel::Height => "height",
            Channel::Radius => "radius",
            Channel::StartAngle => "startAngle",
            Channel::EndAngle => "endAngle",
            Channel::Fill => "fill",
            Channel::Stroke => "stroke",
            Channel::Opacity => "opacity",
            Channel::StrokeWidth => "strokeWidth",
            Channel::Text => "text",
            Channel::Order => "order",
            Channel::Visible => "visible",
        }
    }

    pub fn is_numeric(self) -> bool {
        !matches!(self, Channel::Fill | Channel::Stroke | Channel::Text | Channel::Visible)
    }

    pub fn is_position(self) -> bool {
        matches!(self, Channel::X | Channel::Y)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Channel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Channel::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown channel `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelValue {
    Bool(bool),
    Number(f64),
    Text(String),
}

impl ChannelValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ChannelValue::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            ChannelValue::Bool(b) => Value::Bool(*b),
            ChannelValue::Number(n) => Value::Number(*n),
            ChannelValue::Text(s) => Value::String(s.clone()),
        }
    }

    pub fn from_value(v: &Value) -> Option<ChannelValue> {
        match v {
            Value::Null => None,
            Value::Bool(b) => Some(ChannelValue::Bool(*b)),
            Value::Number(n) => Some(ChannelValue::Number(*n)),
            Value::String(s) => Some(ChannelValue::Text(s.clone())),
        }
    }
}

impl From<f64> for ChannelValue {
    fn from(n: f64) -> Self {
        ChannelValue::Number(n)
    }
}

impl From<&str> for ChannelValue {
    fn from(s: &str) -> Self {
        ChannelValue::Text(s.to_string())
    }
}

impl From<bool> for ChannelValue {
    fn from(b: bool) -> Self {
        ChannelValue::Bool(b)
    }
}

/// A partial channel assignment, e.g. the `trueProps` of an evaluation scale.
pub type ChannelMap = BTreeMap<Channel, ChannelValue>;

pub const DEFAULT_FILL: &str = "#4682b4";
pub const DEFAULT_OPACITY: f64 = 1.0;
pub const DEFAULT_STROKE_WIDTH: f64 = 1.0;

/// The style defaults filled into every mark-like declaration.
pub fn default_style() -> ChannelMap {
    let mut m = ChannelMap::new();
    m.insert(Channel::Fill, DEFAULT_FILL.into());
    m.insert(Channel::Opacity, DEFAULT_OPACITY.into());
    m.insert(Channel::StrokeWidth, DEFAULT_STROKE_WIDTH.into());
    m
}

/// Full channel state of one visual object.
///
/// Sizes are kept non-negative and opacity within `[0, 1]`: every setter
/// clamps, so no diff can ever carry an out-of-range value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChannelSet {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
    pub radius: f64,
    pub start_angle: f64,
    pub end_angle: f64,
    pub fill: String,
    pub stroke: String,
    pub opacity: f64,
    pub stroke_width: f64,
    pub text: String,
    pub order: i64,
    pub visible: bool,
}

impl Default for ChannelSet {
    fn default() -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            width: 0.0,
            height: 0.0,
            radius: 0.0,
            start_angle: 0.0,
            end_angle: 0.0,
            fill: DEFAULT_FILL.to_string(),
            stroke: "none".to_string(),
            opacity: DEFAULT_OPACITY,
            stroke_width: DEFAULT_STROKE_WIDTH,
            text: String::new(),
            order: 0,
            visible: true,
        }
    }
}

impl ChannelSet {
    pub fn get(&self, ch: Channel) -> ChannelValue {
        match ch {
            Channel::X => self.x.into(),
            Channel::Y => self.y.into(),
            Channel::Width => self.width.into(),
            Channel::Height => self.height.into(),
            Channel::Radius => self.radius.into(),
            Channel::StartAngle => self.start_angle.into(),
            Channel::EndAngle => self.end_angle.into(),
            Channel::Fill => self.fill.as_str().into(),
            Channel::Stroke => self.stroke.as_str().into(),
            Channel::Opacity => self.opacity.into(),
            Channel::StrokeWidth => self.stroke_width.into(),
            Channel::Text => self.text.as_str().into(),
            Channel::Order => (self.order as f64).into(),
            Channel::Visible => self.visible.into(),
        }
    }

    /// Sets a channel, coercing and clamping the value. Returns the value
    /// actually stored, or `None` when the value kind does not fit.
    pub fn set(&mut self, ch: Channel, value: &ChannelValue) -> Option<ChannelValue> {
        match ch {
            Channel::Fill | Channel::Stroke | Channel::Text => {
                let s = match value {
                    ChannelValue::Text(s) => s.clone(),
                    ChannelValue::Number(n) => crate::value::format_number(*n),
                    ChannelValue::Bool(b) => b.to_string(),
                };
                match ch {
                    Channel::Fill => self.fill = s,
                    Channel::Stroke => self.stroke = s,
                    _ => self.text = s,
                }
            }
            Channel::Visible => match value {
                ChannelValue::Bool(b) => self.visible = *b,
                ChannelValue::Number(n) => self.visible = *n != 0.0,
                ChannelValue::Text(_) => return None,
            },
            _ => {
                let n = value.as_f64()?;
                if !n.is_finite() {
                    return None;
                }
                match ch {
                    Channel::X => self.x = n,
                    Channel::Y => self.y = n,
                    Channel::Width => self.width = n.max(0.0),
                    Channel::Height => self.height = n.max(0.0),
                    Channel::Radius => self.radius = n.max(0.0),
                    Channel::StartAngle => self.start_angle = n,
                    Channel::EndAngle => self.end_angle = n,
                    Channel::Opacity => self.opacity = n.clamp(0.0, 1.0),
                    Channel::StrokeWidth => self.stroke_width = n.max(0.0),
                    Channel::Order => self.order = n.round() as i64,
                    _ => unreachable!(),
                }
            }
        }
        Some(self.get(ch))
    }

    pub fn apply(&mut self, map: &ChannelMap) {
        for (ch, v) in map {
            self.set(*ch, v);
        }
    }

    pub fn satisfies_invariants(&self) -> bool {
        (0.0..=1.0).contains(&self.opacity)
            && self.width >= 0.0
            && self.height >= 0.0
            && self.radius >= 0.0
            && self.stroke_width >= 0.0
    }

    pub fn center(&self, shape: Option<super::MarkShape>) -> (f64, f64) {
        use super::MarkShape;
        match shape {
            Some(MarkShape::Circle) | Some(MarkShape::Arc) => (self.x, self.y),
            _ => (self.x + self.width / 2.0, self.y + self.height / 2.0),
        }
    }
}
