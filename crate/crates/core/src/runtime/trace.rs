//! Per-event trace entries and their JSON-lines form.
//!
//! Field order is fixed: tick, event, matched, hit, channelDiffs,
//! stateDiffs, dataDiffs, cameraDiffs, errors. Diff lists are sorted, so a
//! replay of the same script serializes byte for byte the same.

use serde::Serialize;

use crate::diag::Diagnostic;
use crate::interaction::event::EventKind;
use crate::interaction::CameraDiff;
use crate::runtime::state::VarValue;
use crate::scene::{ChannelDiff, StructuralDiff};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateDiff {
    pub var: String,
    pub old: VarValue,
    pub new: VarValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceEntry {
    pub tick: u64,
    /// Effective event kind, after drag synthesis.
    pub event: EventKind,
    pub matched: Vec<String>,
    pub hit: Option<String>,
    pub channel_diffs: Vec<ChannelDiff>,
    pub state_diffs: Vec<StateDiff>,
    pub data_diffs: Vec<StructuralDiff>,
    pub camera_diffs: Vec<CameraDiff>,
    pub errors: Vec<Diagnostic>,
}

impl TraceEntry {
    pub fn empty(tick: u64, event: EventKind) -> Self {
        TraceEntry {
            tick,
            event,
            matched: Vec::new(),
            hit: None,
            channel_diffs: Vec::new(),
            state_diffs: Vec::new(),
            data_diffs: Vec::new(),
            camera_diffs: Vec::new(),
            errors: Vec::new(),
        }
    }

    /// Nothing observable changed.
    pub fn is_quiet(&self) -> bool {
        self.channel_diffs.is_empty()
            && self.state_diffs.is_empty()
            && self.data_diffs.is_empty()
            && self.camera_diffs.is_empty()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("trace entry serializes")
    }
}

/// One JSON object per line, newline-terminated.
pub fn to_jsonl(entries: &[TraceEntry]) -> String {
    let mut s = String::new();
    for e in entries {
        s.push_str(&e.to_json_line());
        s.push('\n');
    }
    s
}
