//! Tree text format.
//!
//! A tree is a JSON object `{"eval": <int>, "color": 1 | -1, "children": [...]}`.
//! Input may additionally label an object with `"id": "<name>"` and later
//! replace an object by `{"ref": "<name>"}`, which stands for a copy of the
//! labelled subtree. Labels must be defined before use in document order.
//!
//! [`serialize`] is canonical: compact, fixed key order, no labels.

use std::collections::{HashMap, HashSet};
use std::fmt::Write;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::tree::{Color, Node, MAX_EVAL};

pub fn serialize(u: &Node) -> String {
    let mut out = String::with_capacity(40 * u.node_count().min(1 << 16) as usize);
    write_node(u, &mut out);
    out
}

fn write_node(u: &Node, out: &mut String) {
    let _ = write!(
        out,
        "{{\"eval\":{},\"color\":{},\"children\":[",
        u.eval(),
        u.color().sign()
    );
    for (i, c) in u.children().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_node(c, out);
    }
    out.push_str("]}");
}

pub fn parse(text: &str) -> Result<Node> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    from_json(&value)
}

/// Converts an already-parsed JSON value into a tree.
pub fn from_json(value: &Value) -> Result<Node> {
    let mut labels = Labels::default();
    labels.node(value, "$".to_string())
}

#[derive(Default)]
struct Labels {
    defined: HashMap<String, Node>,
    open: HashSet<String>,
}

fn err(path: &str, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_string(),
        message: message.into(),
    }
}

impl Labels {
    fn node(&mut self, value: &Value, path: String) -> Result<Node> {
        let obj = value
            .as_object()
            .ok_or_else(|| err(&path, "expected an object"))?;

        if let Some(r) = obj.get("ref") {
            if obj.len() != 1 {
                return Err(err(&path, "`ref` must be the only key of its object"));
            }
            let name = r
                .as_str()
                .ok_or_else(|| err(&format!("{path}.ref"), "expected a string"))?;
            if self.open.contains(name) {
                return Err(err(&path, format!("cyclic reference to `{name}`")));
            }
            return self
                .defined
                .get(name)
                .cloned()
                .ok_or_else(|| err(&path, format!("reference to undefined label `{name}`")));
        }

        for key in obj.keys() {
            if !matches!(key.as_str(), "eval" | "color" | "children" | "id") {
                return Err(err(&path, format!("unknown key `{key}`")));
            }
        }

        let id = match obj.get("id") {
            None => None,
            Some(Value::String(s)) => {
                if self.defined.contains_key(s) || self.open.contains(s) {
                    return Err(err(&format!("{path}.id"), format!("duplicate label `{s}`")));
                }
                Some(s.clone())
            }
            Some(_) => return Err(err(&format!("{path}.id"), "expected a string")),
        };

        let eval = int_field(obj, "eval", &path)?;
        if eval.unsigned_abs() > MAX_EVAL as u64 {
            return Err(Error::EvalOutOfRange {
                value: eval,
                max: MAX_EVAL as i64,
            });
        }
        let sign = int_field(obj, "color", &path)?;
        let color = Color::from_sign(sign).ok_or_else(|| {
            err(
                &format!("{path}.color"),
                format!("expected 1 or -1, got {sign}"),
            )
        })?;
        let children = obj
            .get("children")
            .ok_or_else(|| err(&path, "missing `children`"))?
            .as_array()
            .ok_or_else(|| err(&format!("{path}.children"), "expected an array"))?;

        if let Some(id) = &id {
            self.open.insert(id.clone());
        }
        let kids = children
            .iter()
            .enumerate()
            .map(|(i, c)| self.node(c, format!("{path}.children[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let node = Node::new(eval, color, kids)?;
        if let Some(id) = id {
            self.open.remove(&id);
            self.defined.insert(id, node.clone());
        }
        Ok(node)
    }
}

fn int_field(obj: &Map<String, Value>, key: &str, path: &str) -> Result<i64> {
    let v = obj
        .get(key)
        .ok_or_else(|| err(path, format!("missing `{key}`")))?;
    v.as_i64().ok_or_else(|| {
        err(
            &format!("{path}.{key}"),
            format!("expected an integer, got {v}"),
        )
    })
}
