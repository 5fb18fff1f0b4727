//! The JSON model file format shared by every tool in the crate.
//!
//! ```json
//! { "type": "dota", "alphabet": ["a"], "locations": ["q0","q1"], "initial": "q0",
//!   "accepting": ["q0"], "sink": null,
//!   "transitions": [ {"source":"q0","action":"a","guard":"[4,9]","reset":false,"target":"q1"} ] }
//! ```
//!
//! Mealy machines use `"type": "dtmm"`, list their inputs under `alphabet` and
//! their outputs under `outputs`, and label transitions with `input`/`output`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dota::{Dota, Transition};
use crate::dtmm::{Dtmm, MealyTransition};
use crate::error::{Error, Result};
use crate::word::lookup;

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Dota(Dota),
    Dtmm(Dtmm),
}

#[derive(Serialize, Deserialize)]
struct FileModel {
    #[serde(rename = "type")]
    kind: String,
    alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outputs: Option<Vec<String>>,
    locations: Vec<String>,
    initial: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    accepting: Option<Vec<String>>,
    #[serde(default)]
    sink: Option<String>,
    transitions: Vec<FileTransition>,
}

#[derive(Serialize, Deserialize)]
struct FileTransition {
    source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    action: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<String>,
    guard: String,
    reset: bool,
    target: String,
}

impl Model {
    pub fn from_json(text: &str) -> Result<Model> {
        let file: FileModel = serde_json::from_str(text)?;
        let loc = |name: &str| lookup(&file.locations, name).map(|i| i as usize);
        let initial = loc(&file.initial)?;
        match file.kind.as_str() {
            "dota" => {
                let mut accepting = vec![false; file.locations.len()];
                for name in file.accepting.as_deref().unwrap_or_default() {
                    accepting[loc(name)?] = true;
                }
                let sink = file.sink.as_deref().map(loc).transpose()?;
                let mut transitions = Vec::with_capacity(file.transitions.len());
                for t in &file.transitions {
                    let action = t
                        .action
                        .as_deref()
                        .ok_or_else(|| Error::Parse("dota transition without \"action\"".into()))?;
                    transitions.push(Transition {
                        source: loc(&t.source)?,
                        action: lookup(&file.alphabet, action)?,
                        guard: t.guard.parse()?,
                        reset: t.reset,
                        target: loc(&t.target)?,
                    });
                }
                Ok(Model::Dota(Dota::new(file.alphabet, file.locations, initial, accepting, sink, transitions)?))
            }
            "dtmm" => {
                let outputs = file.outputs.clone().unwrap_or_else(|| {
                    let mut seen: Vec<String> = Vec::new();
                    for t in &file.transitions {
                        if let Some(o) = &t.output {
                            if !seen.contains(o) {
                                seen.push(o.clone());
                            }
                        }
                    }
                    seen
                });
                let mut transitions = Vec::with_capacity(file.transitions.len());
                for t in &file.transitions {
                    let (Some(input), Some(output)) = (t.input.as_deref(), t.output.as_deref()) else {
                        return Err(Error::Parse("dtmm transition needs \"input\" and \"output\"".into()));
                    };
                    transitions.push(MealyTransition {
                        source: loc(&t.source)?,
                        input: lookup(&file.alphabet, input)?,
                        output: lookup(&outputs, output)?,
                        guard: t.guard.parse()?,
                        reset: t.reset,
                        target: loc(&t.target)?,
                    });
                }
                Ok(Model::Dtmm(Dtmm::new(file.alphabet, outputs, file.locations, initial, transitions)?))
            }
            other => Err(Error::Parse(format!("unknown model type {other:?}"))),
        }
    }

    /// Canonical rendering: transitions sorted by source, action, then guard.
    pub fn to_json(&self) -> String {
        let file = match self {
            Model::Dota(a) => {
                let mut ts: Vec<&Transition> = a.transitions().iter().collect();
                ts.sort_by_key(|t| (t.source, t.action, t.guard.lower(), !t.guard.lower_closed()));
                FileModel {
                    kind: "dota".into(),
                    alphabet: a.alphabet().to_vec(),
                    outputs: None,
                    locations: a.locations().to_vec(),
                    initial: a.locations()[a.initial()].clone(),
                    accepting: Some(
                        (0..a.locations().len())
                            .filter(|&q| a.is_accepting(q))
                            .map(|q| a.locations()[q].clone())
                            .collect(),
                    ),
                    sink: a.sink().map(|s| a.locations()[s].clone()),
                    transitions: ts
                        .into_iter()
                        .map(|t| FileTransition {
                            source: a.locations()[t.source].clone(),
                            action: Some(a.alphabet()[t.action as usize].clone()),
                            input: None,
                            output: None,
                            guard: t.guard.to_string(),
                            reset: t.reset,
                            target: a.locations()[t.target].clone(),
                        })
                        .collect(),
                }
            }
            Model::Dtmm(m) => {
                let mut ts: Vec<&MealyTransition> = m.transitions().iter().collect();
                ts.sort_by_key(|t| (t.source, t.input, t.guard.lower(), !t.guard.lower_closed()));
                FileModel {
                    kind: "dtmm".into(),
                    alphabet: m.inputs().to_vec(),
                    outputs: Some(m.outputs().to_vec()),
                    locations: m.locations().to_vec(),
                    initial: m.locations()[m.initial()].clone(),
                    accepting: None,
                    sink: None,
                    transitions: ts
                        .into_iter()
                        .map(|t| FileTransition {
                            source: m.locations()[t.source].clone(),
                            action: None,
                            input: Some(m.inputs()[t.input as usize].clone()),
                            output: Some(m.outputs()[t.output as usize].clone()),
                            guard: t.guard.to_string(),
                            reset: t.reset,
                            target: m.locations()[t.target].clone(),
                        })
                        .collect(),
                }
            }
        };
        serde_json::to_string_pretty(&file).expect("model serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Model> {
        Model::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    /// Input alphabet (actions for automata, inputs for Mealy machines).
    pub fn alphabet(&self) -> &[String] {
        match self {
            Model::Dota(a) => a.alphabet(),
            Model::Dtmm(m) => m.inputs(),
        }
    }

    pub fn location_count(&self) -> usize {
        match self {
            Model::Dota(a) => a.locations().len(),
            Model::Dtmm(m) => m.locations().len(),
        }
    }

    pub fn as_dota(&self) -> Option<&Dota> {
        match self {
            Model::Dota(a) => Some(a),
            Model::Dtmm(_) => None,
        }
    }

    pub fn as_dtmm(&self) -> Option<&Dtmm> {
        match self {
            Model::Dtmm(m) => Some(m),
            Model::Dota(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    #[test]
    fn canonical_roundtrip() {
        for m in [Model::Dota(reference::delay_window()), Model::Dtmm(reference::alternating_bit_sender())] {
            let text = m.to_json();
            let back = Model::from_json(&text).unwrap();
            assert_eq!(back, m);
            assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn rejects_closed_infinity_and_unknown_names() {
        let bad = r#"{"type":"dota","alphabet":["a"],"locations":["q0"],"initial":"q0","accepting":["q0"],
            "sink":null,"transitions":[{"source":"q0","action":"a","guard":"[0,+]","reset":false,"target":"q0"}]}"#;
        assert!(Model::from_json(bad).is_err());
        let bad = r#"{"type":"dota","alphabet":["a"],"locations":["q0"],"initial":"q9","accepting":[],
            "sink":null,"transitions":[]}"#;
        assert!(Model::from_json(bad).is_err());
    }
}
