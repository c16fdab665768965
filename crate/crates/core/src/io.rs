//! Reading and writing representations as JSON documents.
//!
//! ```text
//! {
//!   "format": 1,
//!   "n": 1,
//!   "vertices": [
//!     {"subset": [], "dim": 1},
//!     {"subset": [1], "dim": 1}
//!   ],
//!   "edges": [
//!     {
//!       "from": [],
//!       "direction": 1,
//!       "u": {"rows": 1, "cols": 1, "entries": [[[1.0,0.0]]]},
//!       "y": {"rows": 1, "cols": 1, "entries": [[[0.3,0.0]]]}
//!     }
//!   ],
//!   "metadata": {}
//! }
//! ```
//!
//! `u` maps `V_I → V_{I∪i}` and `y` maps `V_{I∪i} → V_I`, both acting on
//! column vectors; entries are row-major `[re, im]` pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::matrix::CMat;
use crate::quiver::{Edge, EdgeMaps, QuiverError, QuiverRep, VertexId, MAX_N};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{location}: {message}")]
    Format { location: String, message: String },
}

impl IoError {
    fn format(location: impl Into<String>, message: impl Into<String>) -> Self {
        IoError::Format {
            location: location.into(),
            message: message.into(),
        }
    }
}

/// A representation with free-form metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct RepDocument {
    pub rep: QuiverRep,
    pub metadata: BTreeMap<String, Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    format: u64,
    n: usize,
    vertices: Vec<RawVertex>,
    edges: Vec<RawEdge>,
    #[serde(default)]
    metadata: BTreeMap<String, Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVertex {
    subset: Vec<usize>,
    dim: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    from: Vec<usize>,
    direction: usize,
    u: RawMatrix,
    y: RawMatrix,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

fn subset(elements: &[usize], n: usize, location: &str) -> Result<VertexId, IoError> {
    if elements.windows(2).any(|w| w[0] >= w[1]) {
        return Err(IoError::format(location, "subset must be strictly increasing"));
    }
    VertexId::from_elements(elements, n).map_err(|e| IoError::format(location, e.to_string()))
}

fn matrix(raw: &RawMatrix, want: (usize, usize), location: &str) -> Result<CMat, IoError> {
    if (raw.rows, raw.cols) != want {
        return Err(IoError::format(
            location,
            format!("declared shape {}x{}, vertex dimensions require {}x{}", raw.rows, raw.cols, want.0, want.1),
        ));
    }
    if raw.entries.len() != raw.rows {
        return Err(IoError::format(
            location,
            format!("{} rows of entries, declared {}", raw.entries.len(), raw.rows),
        ));
    }
    let mut data = Vec::with_capacity(raw.rows * raw.cols);
    for (r, row) in raw.entries.iter().enumerate() {
        if row.len() != raw.cols {
            return Err(IoError::format(
                location,
                format!("row {r} has {} entries, declared {}", row.len(), raw.cols),
            ));
        }
        data.extend(row.iter().map(|[re, im]| Complex64::new(*re, *im)));
    }
    CMat::from_vec(raw.rows, raw.cols, data).map_err(|e| IoError::format(location, e.to_string()))
}

impl RepDocument {
    pub fn new(rep: QuiverRep) -> Self {
        Self {
            rep,
            metadata: BTreeMap::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        let raw: RawDocument = serde_json::from_str(text).map_err(|e| IoError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if raw.format != FORMAT_VERSION {
            return Err(IoError::format("format", format!("unsupported version {}", raw.format)));
        }
        let n = raw.n;
        if n == 0 || n > MAX_N {
            return Err(IoError::format("n", format!("must lie in 1..={MAX_N}, got {n}")));
        }
        let mut dims = vec![None; 1 << n];
        for (k, v) in raw.vertices.iter().enumerate() {
            let loc = format!("vertices[{k}]");
            let id = subset(&v.subset, n, &loc)?;
            if dims[id.index()].replace(v.dim).is_some() {
                return Err(IoError::format(loc, format!("vertex {id} listed twice")));
            }
        }
        let dims: Vec<usize> = dims
            .into_iter()
            .enumerate()
            .map(|(k, d)| d.ok_or_else(|| IoError::format("vertices", format!("vertex {} missing", VertexId::from_mask(k as u32)))))
            .collect::<Result<_, _>>()?;
        let mut maps = BTreeMap::new();
        for (k, e) in raw.edges.iter().enumerate() {
            let from = subset(&e.from, n, &format!("edges[{k}].from"))?;
            if e.direction == 0 || e.direction > n || from.contains(e.direction) {
                return Err(IoError::format(
                    format!("edges[{k}].direction"),
                    format!("{} is not a valid direction from {from}", e.direction),
                ));
            }
            let edge = Edge::new(from, e.direction);
            let (d0, d1) = (dims[from.index()], dims[edge.to().index()]);
            let u = matrix(&e.u, (d1, d0), &format!("edges[{k}] {edge} u"))?;
            let y = matrix(&e.y, (d0, d1), &format!("edges[{k}] {edge} y"))?;
            if maps.insert(edge, EdgeMaps { u, y }).is_some() {
                return Err(IoError::format(format!("edges[{k}]"), format!("edge {edge} listed twice")));
            }
        }
        let present: BTreeSet<Edge> = maps.keys().copied().collect();
        if let Some(e) = Edge::all(n).find(|e| !present.contains(e)) {
            return Err(IoError::format("edges", format!("edge {e} missing")));
        }
        let rep = QuiverRep::new(n, dims, maps).map_err(|e: QuiverError| IoError::format("edges", e.to_string()))?;
        Ok(Self {
            rep,
            metadata: raw.metadata,
        })
    }

    /// Canonical text: vertices and edges in index order, one matrix row
    /// per line, shortest round-trip float formatting.
    pub fn to_json_string(&self) -> Result<String, IoError> {
        let rep = &self.rep;
        let mut out = String::new();
        let _ = writeln!(out, "{{");
        let _ = writeln!(out, "  \"format\": {FORMAT_VERSION},");
        let _ = writeln!(out, "  \"n\": {},", rep.n());
        let _ = writeln!(out, "  \"vertices\": [");
        let vertices: Vec<String> = VertexId::all(rep.n())
            .map(|v| format!("    {{\"subset\": {}, \"dim\": {}}}", elements(v), rep.dim(v)))
            .collect();
        let _ = writeln!(out, "{}", vertices.join(",\n"));
        let _ = writeln!(out, "  ],");
        let _ = writeln!(out, "  \"edges\": [");
        let mut edges = Vec::new();
        for (e, m) in rep.edges() {
            let mut s = String::new();
            let _ = writeln!(s, "    {{");
            let _ = writeln!(s, "      \"from\": {},", elements(e.from));
            let _ = writeln!(s, "      \"direction\": {},", e.dir);
            let _ = writeln!(s, "      \"u\": {},", write_matrix(&m.u, &format!("edge {e} u"))?);
            let _ = writeln!(s, "      \"y\": {}", write_matrix(&m.y, &format!("edge {e} y"))?);
            let _ = write!(s, "    }}");
            edges.push(s);
        }
        let _ = writeln!(out, "{}", edges.join(",\n"));
        let _ = writeln!(out, "  ],");
        if self.metadata.is_empty() {
            let _ = writeln!(out, "  \"metadata\": {{}}");
        } else {
            let _ = writeln!(out, "  \"metadata\": {{");
            let fields: Vec<String> = self
                .metadata
                .iter()
                .map(|(k, v)| format!("    {}: {}", Value::String(k.clone()), v))
                .collect();
            let _ = writeln!(out, "{}", fields.join(",\n"));
            let _ = writeln!(out, "  }}");
        }
        let _ = writeln!(out, "}}");
        Ok(out)
    }

    pub fn read(path: &Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(|source| IoError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<(), IoError> {
        std::fs::write(path, self.to_json_string()?).map_err(|source| IoError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn elements(v: VertexId) -> String {
    let parts: Vec<String> = v.elements().iter().map(|k| k.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn number(x: f64, location: &str) -> Result<String, IoError> {
    if !x.is_finite() {
        return Err(IoError::format(location, format!("non-finite entry {x}")));
    }
    Ok(Value::from(x).to_string())
}

fn write_matrix(m: &CMat, location: &str) -> Result<String, IoError> {
    let mut rows = Vec::with_capacity(m.rows());
    for r in 0..m.rows() {
        let cells: Vec<String> = m
            .row(r)
            .iter()
            .map(|z| Ok(format!("[{},{}]", number(z.re, location)?, number(z.im, location)?)))
            .collect::<Result<_, IoError>>()?;
        rows.push(format!("[{}]", cells.join(", ")));
    }
    let entries = if rows.is_empty() {
        "[]".to_string()
    } else {
        format!("[\n        {}\n      ]", rows.join(",\n        "))
    };
    Ok(format!("{{\"rows\": {}, \"cols\": {}, \"entries\": {entries}}}", m.rows(), m.cols()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{generate, Category};

    #[test]
    fn round_trip_is_exact_and_byte_stable() {
        let rep = generate(2, &[2], Category::Sigma1, 11).unwrap();
        let mut doc = RepDocument::new(rep);
        doc.metadata.insert("seed".into(), Value::from(11));
        let text = doc.to_json_string().unwrap();
        let back = RepDocument::parse(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_json_string().unwrap(), text);
    }

    #[test]
    fn zero_dimensional_vertices() {
        let doc = RepDocument::new(QuiverRep::zero(2).unwrap());
        let text = doc.to_json_string().unwrap();
        assert_eq!(RepDocument::parse(&text).unwrap(), doc);
    }

    #[test]
    fn truncated_input_reports_position() {
        let text = RepDocument::new(QuiverRep::zero(1).unwrap()).to_json_string().unwrap();
        match RepDocument::parse(&text[..text.len() / 2]) {
            Err(IoError::Parse { line, .. }) => assert!(line > 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shape_mismatch_names_edge() {
        let text = RepDocument::new(QuiverRep::zero(1).unwrap()).to_json_string().unwrap();
        let bad = text.replacen("{\"subset\": [1], \"dim\": 0}", "{\"subset\": [1], \"dim\": 1}", 1);
        let err = RepDocument::parse(&bad).unwrap_err().to_string();
        assert!(err.contains("({},1)"), "{err}");
    }

    #[test]
    fn missing_edge_and_bad_version() {
        let text = r#"{"format": 1, "n": 1, "vertices": [{"subset": [], "dim": 0}, {"subset": [1], "dim": 0}], "edges": []}"#;
        assert!(RepDocument::parse(text).unwrap_err().to_string().contains("missing"));
        let text = text.replace("\"format\": 1", "\"format\": 2");
        assert!(matches!(RepDocument::parse(&text), Err(IoError::Format { .. })));
    }
}
