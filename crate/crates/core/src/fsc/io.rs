use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Controller, FscError, Hierarchy, Instruction, Transition};
use crate::model::Atom;

pub const FORMAT_TAG: &str = "hfsc-v1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileHierarchy {
    format: String,
    states: usize,
    #[serde(default)]
    root: usize,
    #[serde(default)]
    variables: Vec<String>,
    #[serde(default)]
    values: Vec<String>,
    controllers: Vec<FileController>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileController {
    name: String,
    #[serde(default)]
    params: Vec<String>,
    #[serde(default)]
    conditions: BTreeMap<usize, Atom>,
    #[serde(default)]
    transitions: Vec<FileTransition>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileTransition {
    from: usize,
    branch: u8,
    to: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    action: Option<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    call: Option<FileCall>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileCall {
    controller: usize,
    #[serde(default)]
    args: Vec<String>,
}

pub fn save(h: &Hierarchy) -> String {
    let file = FileHierarchy {
        format: FORMAT_TAG.into(),
        states: h.num_states,
        root: h.root,
        variables: h.variables.clone(),
        values: h.values.clone(),
        controllers: h
            .controllers
            .iter()
            .map(|c| FileController {
                name: c.name.clone(),
                params: c.params.clone(),
                conditions: c.gamma.clone(),
                transitions: c
                    .transitions
                    .iter()
                    .map(|(&(q, b), t)| {
                        let (action, call) = match &t.instruction {
                            Instruction::Action(a) => (Some(a.clone()), None),
                            Instruction::Call { controller, args } => {
                                (None, Some(FileCall { controller: *controller, args: args.clone() }))
                            }
                        };
                        FileTransition { from: q, branch: b as u8, to: t.next, action, call }
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("hierarchy serializes") + "\n"
}

fn format_error(path: impl Into<String>, msg: impl Into<String>) -> FscError {
    FscError::Format { path: path.into(), msg: msg.into() }
}

/// Parses and validates an `hfsc-v1` document.
pub fn load(text: &str) -> Result<Hierarchy, FscError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: FileHierarchy = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        format_error(path, e.into_inner().to_string())
    })?;
    if file.format != FORMAT_TAG {
        return Err(format_error("format", format!("expected {FORMAT_TAG}, found {}", file.format)));
    }
    if file.controllers.is_empty() {
        return Err(format_error("controllers", "at least one controller is required"));
    }
    if file.states == 0 {
        return Err(format_error("states", "must be at least 1"));
    }
    let mut controllers = Vec::with_capacity(file.controllers.len());
    for (i, fc) in file.controllers.into_iter().enumerate() {
        let mut c = Controller::new(fc.name, fc.params);
        for &q in fc.conditions.keys() {
            if q + 1 >= file.states {
                return Err(format_error(format!("controllers[{i}].conditions.{q}"), "state out of range or terminal"));
            }
        }
        c.gamma = fc.conditions;
        for (k, t) in fc.transitions.into_iter().enumerate() {
            let path = format!("controllers[{i}].transitions[{k}]");
            let branch = match t.branch {
                0 => false,
                1 => true,
                b => return Err(format_error(format!("{path}.branch"), format!("branch must be 0 or 1, found {b}"))),
            };
            if !c.gamma.contains_key(&t.from) {
                return Err(format_error(format!("{path}.from"), format!("state {} has no condition", t.from)));
            }
            if t.to >= file.states {
                return Err(format_error(format!("{path}.to"), format!("state {} out of range", t.to)));
            }
            let instruction = match (t.action, t.call) {
                (Some(a), None) => Instruction::Action(a),
                (None, Some(call)) => Instruction::Call { controller: call.controller, args: call.args },
                _ => return Err(format_error(path, "exactly one of action or call is required")),
            };
            if c.transitions.insert((t.from, branch), Transition { next: t.to, instruction }).is_some() {
                return Err(format_error(path, "duplicate transition"));
            }
        }
        controllers.push(c);
    }
    let h = Hierarchy {
        num_states: file.states,
        controllers,
        root: file.root,
        variables: file.variables,
        values: file.values,
    };
    h.validate().map_err(|e| format_error("", e.to_string()))?;
    Ok(h)
}
