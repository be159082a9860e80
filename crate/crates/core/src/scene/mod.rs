//! Static representation: visual objects, channels, encodings and scales.

pub mod channels;
pub mod encode;
pub mod graph;
pub mod query;
pub mod scale;
pub mod transform;
pub mod update;

use serde::{Deserialize, Serialize};

pub use channels::{Channel, ChannelMap, ChannelSet, ChannelValue};
pub use encode::{apply_encodings, ChannelDiff};
pub use graph::{build_scene_graph, RowMode, SceneGraph, VisualObject};
pub use query::query_objects;
pub use scale::Scale;
pub use update::{update_object_data, DataUpdate, StructuralDiff};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Mark,
    Glyph,
    Collection,
    Axis,
    Legend,
    Annotation,
    Scene,
    Section,
}

impl ObjectKind {
    pub fn name(self) -> &'static str {
        match self {
            ObjectKind::Mark => "mark",
            ObjectKind::Glyph => "glyph",
            ObjectKind::Collection => "collection",
            ObjectKind::Axis => "axis",
            ObjectKind::Legend => "legend",
            ObjectKind::Annotation => "annotation",
            ObjectKind::Scene => "scene",
            ObjectKind::Section => "section",
        }
    }

    pub fn parse(s: &str) -> Option<ObjectKind> {
        [
            ObjectKind::Mark,
            ObjectKind::Glyph,
            ObjectKind::Collection,
            ObjectKind::Axis,
            ObjectKind::Legend,
            ObjectKind::Annotation,
            ObjectKind::Scene,
            ObjectKind::Section,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }

    /// Kinds that may appear as direct children of `self`.
    pub fn allows_child(self, child: ObjectKind) -> bool {
        use ObjectKind::*;
        match self {
            Section => matches!(child, Section | Scene),
            Scene => matches!(child, Collection | Axis | Legend | Annotation),
            Collection => matches!(child, Mark | Glyph | Collection),
            Glyph => child == Mark,
            Mark | Axis | Legend | Annotation => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkShape {
    Rect,
    Circle,
    Line,
    Path,
    Arc,
    Text,
    Image,
}

impl MarkShape {
    pub fn name(self) -> &'static str {
        match self {
            MarkShape::Rect => "rect",
            MarkShape::Circle => "circle",
            MarkShape::Line => "line",
            MarkShape::Path => "path",
            MarkShape::Arc => "arc",
            MarkShape::Text => "text",
            MarkShape::Image => "image",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orient {
    #[default]
    Bottom,
    Left,
    Top,
    Right,
}
