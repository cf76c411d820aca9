//! JSON algebra files: exact rational coefficients, zero products omitted.
//!
//! ```json
//! {
//!   "version": 1,
//!   "dimension": 3,
//!   "labels": ["e_0", "e_1", "e_2"],
//!   "entries": [{"i": 0, "j": 0, "k": 1, "coeff": "1"}],
//!   "metadata": {"family": "F1", "params": {"n": "2"}}
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Algebra, FamilyMeta};
use crate::arith::rational::{format_rational, parse_rational};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FileError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field(field: impl Into<String>, message: impl Into<String>) -> FileError {
    FileError::Field { field: field.into(), message: message.into() }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    i: usize,
    j: usize,
    k: usize,
    coeff: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Metadata {
    family: String,
    #[serde(default)]
    params: BTreeMap<String, String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    version: u32,
    dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    entries: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<Metadata>,
}

/// Serializes `a` as a pretty-printed algebra file.
pub fn to_json(a: &Algebra) -> String {
    let file = AlgebraFile {
        version: FORMAT_VERSION,
        dimension: a.dim(),
        labels: Some(a.labels().to_vec()),
        entries: a.entries().map(|(i, j, k, c)| Entry { i, j, k, coeff: format_rational(c) }).collect(),
        metadata: a.meta().map(|m| Metadata {
            family: m.family.clone(),
            params: m.params.iter().map(|(k, v)| (k.clone(), format_rational(v))).collect(),
        }),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("algebra file serializes");
    s.push('\n');
    s
}

/// Parses an algebra file, rejecting out-of-range indices, duplicate
/// triples and inexact coefficients.
pub fn from_json(text: &str) -> Result<Algebra, FileError> {
    let file: AlgebraFile = serde_json::from_str(text)
        .map_err(|e| FileError::Syntax { line: e.line(), column: e.column(), message: strip_location(&e.to_string()) })?;
    if file.version != FORMAT_VERSION {
        return Err(field("version", format!("unsupported version {}, expected {FORMAT_VERSION}", file.version)));
    }
    let d = file.dimension;
    let mut a = Algebra::abelian(d).map_err(|e| field("dimension", e.to_string()))?;
    if let Some(labels) = file.labels {
        if labels.len() != d {
            return Err(field("labels", format!("{} labels for dimension {d}", labels.len())));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(field("labels", "labels must be distinct"));
        }
        a.set_labels(labels).map_err(|e| field("labels", e.to_string()))?;
    }
    let mut seen = BTreeSet::new();
    for (n, e) in file.entries.iter().enumerate() {
        for (name, v) in [("i", e.i), ("j", e.j), ("k", e.k)] {
            if v >= d {
                return Err(field(format!("entries[{n}].{name}"), format!("index {v} out of range for dimension {d}")));
            }
        }
        if !seen.insert((e.i, e.j, e.k)) {
            return Err(field(format!("entries[{n}]"), format!("duplicate entry ({}, {}, {})", e.i, e.j, e.k)));
        }
        let c = parse_rational(&e.coeff)
            .map_err(|_| field(format!("entries[{n}].coeff"), format!("`{}` is not an exact rational p/q", e.coeff)))?;
        a.set(e.i, e.j, e.k, c);
    }
    if let Some(m) = file.metadata {
        let mut params = Vec::new();
        for (k, v) in m.params {
            let q = parse_rational(&v)
                .map_err(|_| field(format!("metadata.params.{k}"), format!("`{v}` is not an exact rational p/q")))?;
            params.push((k, q));
        }
        a.set_meta(Some(FamilyMeta { family: m.family, params }));
    }
    Ok(a)
}

// serde_json appends " at line L column C"; the location is reported separately
fn strip_location(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(p) => msg[..p].to_string(),
        None => msg.to_string(),
    }
}
