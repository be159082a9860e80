//! Input events and the triggers interaction units bind to.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::diag::{Code, Diagnostic};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    PointerDown,
    PointerUp,
    PointerMove,
    Click,
    DoubleClick,
    DragStart,
    DragMove,
    DragEnd,
    Wheel,
    Scroll,
    KeyDown,
    KeyUp,
    UiChange,
}

impl EventKind {
    pub const ALL: [EventKind; 13] = [
        EventKind::PointerDown,
        EventKind::PointerUp,
        EventKind::PointerMove,
        EventKind::Click,
        EventKind::DoubleClick,
        EventKind::DragStart,
        EventKind::DragMove,
        EventKind::DragEnd,
        EventKind::Wheel,
        EventKind::Scroll,
        EventKind::KeyDown,
        EventKind::KeyUp,
        EventKind::UiChange,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EventKind::PointerDown => "pointer_down",
            EventKind::PointerUp => "pointer_up",
            EventKind::PointerMove => "pointer_move",
            EventKind::Click => "click",
            EventKind::DoubleClick => "double_click",
            EventKind::DragStart => "drag_start",
            EventKind::DragMove => "drag_move",
            EventKind::DragEnd => "drag_end",
            EventKind::Wheel => "wheel",
            EventKind::Scroll => "scroll",
            EventKind::KeyDown => "key_down",
            EventKind::KeyUp => "key_up",
            EventKind::UiChange => "ui_change",
        }
    }

    /// Events that carry a canvas position.
    pub fn is_positional(self) -> bool {
        !matches!(self, EventKind::KeyDown | EventKind::KeyUp | EventKind::UiChange)
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What an interaction unit listens for. `Drag` covers the whole
/// press-and-move gesture (`drag_start` and every `drag_move`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Trigger {
    Event(EventKind),
    Drag,
}

impl Trigger {
    pub fn name(self) -> &'static str {
        match self {
            Trigger::Event(k) => k.name(),
            Trigger::Drag => "drag",
        }
    }

    pub fn parse(s: &str) -> Option<Trigger> {
        if s == "drag" {
            return Some(Trigger::Drag);
        }
        EventKind::ALL.into_iter().find(|k| k.name() == s).map(Trigger::Event)
    }

    pub fn matches(self, kind: EventKind) -> bool {
        match self {
            Trigger::Event(k) => k == kind,
            Trigger::Drag => matches!(kind, EventKind::DragStart | EventKind::DragMove),
        }
    }

    pub fn is_drag_family(self) -> bool {
        matches!(
            self,
            Trigger::Drag | Trigger::Event(EventKind::DragStart | EventKind::DragMove | EventKind::DragEnd)
        )
    }
}

impl Serialize for Trigger {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Trigger {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Trigger::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown event kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub tick: u64,
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
}

impl Event {
    pub fn new(tick: u64, kind: EventKind) -> Self {
        Event { tick, kind, x: None, y: None, dx: None, dy: None, delta: None, key: None, control: None, value: None }
    }

    pub fn at(tick: u64, kind: EventKind, x: f64, y: f64) -> Self {
        Event { x: Some(x), y: Some(y), ..Event::new(tick, kind) }
    }

    pub fn ui(tick: u64, control: &str, value: impl Into<Value>) -> Self {
        Event { control: Some(control.to_string()), value: Some(value.into()), ..Event::new(tick, EventKind::UiChange) }
    }

    pub fn wheel(tick: u64, x: f64, y: f64, delta: f64) -> Self {
        Event { delta: Some(delta), ..Event::at(tick, EventKind::Wheel, x, y) }
    }

    pub fn position(&self) -> Option<(f64, f64)> {
        Some((self.x?, self.y?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventScript {
    pub name: String,
    #[serde(default)]
    pub events: Vec<Event>,
}

impl EventScript {
    pub fn parse(text: &str) -> Result<EventScript, Diagnostic> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = crate::model::parse::path_to_pointer(e.path());
            let code = if e.inner().is_syntax() || e.inner().is_eof() { Code::Syntax } else { Code::WrongKind };
            Diagnostic::error(code, path, e.inner().to_string())
        })
    }

    /// Ticks strictly increase and drag moves/ends follow a drag start.
    pub fn check(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut last: Option<u64> = None;
        let mut dragging = false;
        for (i, e) in self.events.iter().enumerate() {
            if let Some(t) = last {
                if e.tick <= t {
                    out.push(Diagnostic::error(
                        Code::TickOrder,
                        format!("/events/{i}/tick"),
                        format!("tick {} does not increase past {t}", e.tick),
                    ));
                }
            }
            last = Some(e.tick);
            match e.kind {
                EventKind::DragStart => dragging = true,
                EventKind::DragMove if !dragging => out.push(Diagnostic::error(
                    Code::DragSequence,
                    format!("/events/{i}/kind"),
                    "drag_move without a preceding drag_start",
                )),
                EventKind::DragEnd => {
                    if !dragging {
                        out.push(Diagnostic::error(
                            Code::DragSequence,
                            format!("/events/{i}/kind"),
                            "drag_end without a preceding drag_start",
                        ));
                    }
                    dragging = false;
                }
                _ => {}
            }
        }
        out
    }
}
