//! JSON documents for point sets and matrices, and canonical output.

use std::fs;
use std::io::Read;
use std::path::Path;

use fuglede_core::field::{Ambient, PointSet, PrimeModulus, ResidueMatrix};
use fuglede_core::Error as CoreError;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// A subset of `Z_{m_1} × … × Z_{m_k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetDocument {
    pub moduli: Vec<u32>,
    pub points: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// A matrix of residues modulo a prime `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub p: u32,
    pub rows: Vec<Vec<u64>>,
}

impl SetDocument {
    pub fn from_set(set: &PointSet, label: Option<String>) -> Self {
        Self {
            moduli: set.ambient().moduli().to_vec(),
            points: set
                .coords()
                .into_iter()
                .map(|c| c.into_iter().map(u64::from).collect())
                .collect(),
            label,
        }
    }

    pub fn to_set(&self, source: &str) -> Result<PointSet, CliError> {
        let ambient = Ambient::new(self.moduli.clone()).map_err(|e| CliError::document(source, "/moduli", e))?;
        let mut coords = Vec::with_capacity(self.points.len());
        for (i, point) in self.points.iter().enumerate() {
            if point.len() != ambient.dim() {
                return Err(CliError::document(
                    source,
                    format!("/points/{i}"),
                    format!("point has {} coordinates, expected {}", point.len(), ambient.dim()),
                ));
            }
            let mut c = Vec::with_capacity(point.len());
            for (k, (&x, &m)) in point.iter().zip(ambient.moduli()).enumerate() {
                if x >= u64::from(m) {
                    return Err(CliError::document(
                        source,
                        format!("/points/{i}/{k}"),
                        format!("coordinate {x} is outside [0, {m})"),
                    ));
                }
                c.push(x as u32);
            }
            coords.push(c);
        }
        PointSet::new(ambient, coords).map_err(|e| match e {
            CoreError::DuplicatePoint { index } => {
                CliError::document(source, format!("/points/{index}"), "point duplicates an earlier point")
            }
            other => CliError::document(source, "/points", other),
        })
    }
}

impl MatrixDocument {
    pub fn from_matrix(m: &ResidueMatrix) -> Self {
        Self {
            p: m.modulus().get(),
            rows: m
                .to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(u64::from).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self, source: &str) -> Result<ResidueMatrix, CliError> {
        let p = PrimeModulus::new(self.p).map_err(|e| CliError::document(source, "/p", e))?;
        let cols = self.rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(self.rows.len() * cols);
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != cols {
                return Err(CliError::document(
                    source,
                    format!("/rows/{i}"),
                    format!("row has {} entries, expected {cols}", row.len()),
                ));
            }
            for (j, &x) in row.iter().enumerate() {
                if x >= u64::from(self.p) {
                    return Err(CliError::document(
                        source,
                        format!("/rows/{i}/{j}"),
                        format!("entry {x} is outside [0, {})", self.p),
                    ));
                }
                entries.push(x as u32);
            }
        }
        ResidueMatrix::new(p, self.rows.len(), cols, entries).map_err(|e| CliError::document(source, "/rows", e))
    }
}

/// Contents of `path`, or standard input for `-`.
pub fn read_source(path: &Path) -> Result<String, CliError> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
    } else {
        text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

fn source_name(path: &Path) -> String {
    if path.as_os_str() == "-" {
        "<stdin>".to_string()
    } else {
        path.display().to_string()
    }
}

/// JSON-pointer form (`/points/1/0`) of a deserializer path.
fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    path.iter()
        .map(|s| match s {
            Segment::Seq { index } => format!("/{index}"),
            Segment::Map { key } => format!("/{key}"),
            Segment::Enum { variant } => format!("/{variant}"),
            Segment::Unknown => "/?".to_string(),
        })
        .collect()
}

/// Parse `text` as `T`, reporting the JSON path and line/column on failure.
pub fn parse_document<T: DeserializeOwned>(text: &str, source: &str) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = pointer(e.path());
        let inner = e.into_inner();
        CliError::document(
            source,
            path,
            format!("{inner} (line {}, column {})", inner.line(), inner.column()),
        )
    })?;
    de.end()
        .map_err(|e| CliError::document(source, "", format!("trailing data: {e}")))?;
    Ok(value)
}

pub fn read_set(path: &Path) -> Result<PointSet, CliError> {
    let source = source_name(path);
    let doc: SetDocument = parse_document(&read_source(path)?, &source)?;
    doc.to_set(&source)
}

/// A matrix document, either bare or under a top-level `"matrix"` key (as
/// produced by `brock` and `hadamard dephase`).
pub fn parse_matrix(text: &str, source: &str) -> Result<ResidueMatrix, CliError> {
    let value: Value = parse_document(text, source)?;
    let (inner, prefix) = match value.get("matrix") {
        Some(m) if m.is_object() => (m.clone(), "/matrix"),
        _ => (value, ""),
    };
    let doc: MatrixDocument = serde_path_to_error::deserialize(inner)
        .map_err(|e| CliError::document(source, format!("{prefix}{}", pointer(e.path())), e.into_inner()))?;
    doc.to_matrix(source)
}

pub fn read_matrix(path: &Path) -> Result<ResidueMatrix, CliError> {
    parse_matrix(&read_source(path)?, &source_name(path))
}

/// Sorted keys, two-space indentation, trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json's default map is ordered by key
    let v = serde_json::to_value(value).expect("documents serialize");
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}
