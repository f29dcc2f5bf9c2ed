//! On-disk form of a [`PatternSet`].
//!
//! A pattern directory holds:
//!
//! * `pattern.json`: `{q, c, lambda, vertex_lines, colors}`;
//! * `color_<i>.edges`: one edge `u v` (u < v) per line;
//! * `color_<i>.cliques.json`: `{color, vertices, point_cliques: [{point, members}]}`.
//!
//! Import rebuilds each graph from its edge list and attaches the clique
//! sidecar without assuming the two agree, so a re-verification catches edits
//! to either file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{PatternError, PatternGraph, PatternSet, PointClique};
use crate::graph::Graph;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternManifest {
    pub q: u32,
    pub c: u32,
    pub lambda: Vec<u32>,
    pub vertex_lines: Vec<u32>,
    pub colors: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueSidecar {
    pub color: u32,
    pub vertices: usize,
    pub point_cliques: Vec<PointClique>,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// Parses `u v` lines into a graph on `n` vertices. Blank lines are skipped.
pub fn parse_edge_list(text: &str, n: usize) -> Result<Graph, FormatError> {
    let mut g = Graph::new(n);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| FormatError::Parse {
            line: i + 1,
            message,
        };
        let mut parts = line.split_whitespace();
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err(format!("expected `u v`, got {line:?}")));
        };
        let u: usize = a.parse().map_err(|e| parse_err(format!("{a:?}: {e}")))?;
        let v: usize = b.parse().map_err(|e| parse_err(format!("{b:?}: {e}")))?;
        if u >= n || v >= n || u == v {
            return Err(parse_err(format!("edge ({u}, {v}) invalid for {n} vertices")));
        }
        g.add_edge(u, v);
    }
    Ok(g)
}

pub fn manifest(pattern: &PatternSet) -> PatternManifest {
    PatternManifest {
        q: pattern.q,
        c: pattern.c,
        lambda: pattern.lambda.clone(),
        vertex_lines: pattern.vertex_lines.clone(),
        colors: pattern.graphs.len() as u32,
    }
}

pub fn sidecar(graph: &PatternGraph) -> CliqueSidecar {
    CliqueSidecar {
        color: graph.color(),
        vertices: graph.graph().vertex_count(),
        point_cliques: graph.cliques().to_vec(),
    }
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf, FormatError> {
    fs::write(&path, contents).map_err(|source| FormatError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn read(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, FormatError> {
    serde_json::from_str(&read(path)?).map_err(|source| FormatError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the manifest and per-color files into `dir` (which must exist).
pub fn write_pattern_dir(pattern: &PatternSet, dir: &Path) -> Result<Vec<PathBuf>, FormatError> {
    let mut written = vec![write(dir.join("pattern.json"), &to_json(&manifest(pattern)))?];
    for g in &pattern.graphs {
        let i = g.color();
        written.push(write(dir.join(format!("color_{i}.edges")), &g.edge_list_text())?);
        written.push(write(
            dir.join(format!("color_{i}.cliques.json")),
            &to_json(&sidecar(g)),
        )?);
    }
    Ok(written)
}

/// Reads a directory written by [`write_pattern_dir`].
pub fn read_pattern_dir(dir: &Path) -> Result<PatternSet, FormatError> {
    let manifest: PatternManifest = read_json(&dir.join("pattern.json"))?;
    let n = manifest.vertex_lines.len();
    let mut graphs = Vec::with_capacity(manifest.colors as usize);
    for i in 0..manifest.colors {
        let edges = parse_edge_list(&read(&dir.join(format!("color_{i}.edges")))?, n)?;
        let side: CliqueSidecar = read_json(&dir.join(format!("color_{i}.cliques.json")))?;
        if side.color != i || side.vertices != n {
            return Err(FormatError::Parse {
                line: 0,
                message: format!(
                    "color_{i}.cliques.json describes color {} on {} vertices",
                    side.color, side.vertices
                ),
            });
        }
        graphs.push(PatternGraph::from_parts(i, edges, side.point_cliques)?);
    }
    Ok(PatternSet {
        q: manifest.q,
        c: manifest.c,
        lambda: manifest.lambda,
        vertex_lines: manifest.vertex_lines,
        graphs,
    })
}
