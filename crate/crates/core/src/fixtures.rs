//! The shipped example corpus: one document and one event script each.

pub struct Fixture {
    pub name: &'static str,
    pub doc: &'static str,
    pub script: &'static str,
}

macro_rules! fixture {
    ($name:literal) => {
        Fixture {
            name: $name,
            doc: include_str!(concat!("../fixtures/", $name, ".json")),
            script: include_str!(concat!("../fixtures/scripts/", $name, ".json")),
        }
    };
}

pub const ALL: [Fixture; 8] = [
    fixture!("bars"),
    fixture!("scatter"),
    fixture!("date-series"),
    fixture!("sunburst-lite"),
    fixture!("dashboard"),
    fixture!("scrolly"),
    fixture!("bigmac-lite"),
    fixture!("heatmap-lite"),
];

pub fn get(name: &str) -> Option<&'static Fixture> {
    ALL.iter().find(|f| f.name == name)
}

impl Fixture {
    pub fn document(&self) -> crate::model::Document {
        crate::model::parse_document(self.doc).expect("shipped fixture parses").0
    }

    pub fn events(&self) -> crate::interaction::EventScript {
        crate::interaction::EventScript::parse(self.script).expect("shipped script parses")
    }

    /// Trace of the shipped script as JSON lines.
    pub fn trace(&self) -> String {
        let (_, entries) = crate::runtime::run_script(crate::registry::Registry::builtin(), &self.document(), &self.events())
            .expect("shipped fixture compiles");
        crate::runtime::to_jsonl(&entries)
    }
}
