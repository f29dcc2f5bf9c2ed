//! Edge-disjoint graphs on the vertex set L, one per color.
//!
//! Two lines of L are adjacent in the graph of color `i` when their common
//! point is a point of `P_i`. Grouping the edges by that common point gives
//! the point-cliques: for `p ∈ P_i`, the set of L-lines through `p`. Every
//! edge lies in exactly one point-clique because two lines meet once.
//!
//! Any `K_{k+1}` (k ≥ 3) of such a graph has a point-clique holding either all
//! `k + 1` of its vertices (degenerate) or exactly `k` of them (a fan: `k`
//! concurrent lines plus one transversal). [`classify_kplus1_clique`] sorts
//! cliques into these two kinds and [`count_fans_through_edge`] counts fans
//! through an edge without enumerating cliques.

pub mod io;

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::certificate::{Certificate, CheckRecord};
use crate::coloring::PointColoring;
use crate::geometry::{LineId, PointId};
use crate::graph::Graph;
use crate::pencil::PencilStructure;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("classification needs k >= 3 (got {0})")]
    KTooSmall(usize),
    #[error("expected {expected} vertices, got {got}")]
    WrongSize { expected: usize, got: usize },
    #[error("not a K_{{k+1}}: {0:?}")]
    NotAClique(Vec<u32>),
    #[error("structural violation: no point-clique holds k or k+1 vertices of {0:?}")]
    StructureViolation(Vec<u32>),
    #[error("edge ({0}, {1}) is not in the graph")]
    MissingEdge(u32, u32),
    #[error("point-clique of point {point} lists vertex {vertex} outside 0..{n}")]
    VertexOutOfRange { point: PointId, vertex: u32, n: usize },
}

/// The L-lines through one point of `P_i`, as sorted vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointClique {
    pub point: PointId,
    pub members: Vec<u32>,
}

/// The graph of one color together with its point-clique decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternGraph {
    color: u32,
    graph: Graph,
    cliques: Vec<PointClique>,
    /// For each vertex, indices into `cliques` of the cliques containing it.
    vertex_cliques: Vec<Vec<u32>>,
}

impl PatternGraph {
    /// Graph whose edges are exactly the pairs inside the given cliques.
    pub fn from_cliques(
        color: u32,
        vertex_count: usize,
        cliques: Vec<PointClique>,
    ) -> Result<Self, PatternError> {
        let mut graph = Graph::new(vertex_count);
        for k in &cliques {
            for (i, &u) in k.members.iter().enumerate() {
                for &v in &k.members[i + 1..] {
                    graph.add_edge(u as usize, v as usize);
                }
            }
        }
        Self::from_parts(color, graph, cliques)
    }

    /// Pairs an explicit edge set with a clique list; the two are not
    /// required to agree ([`verify_pattern`] checks that).
    pub fn from_parts(
        color: u32,
        graph: Graph,
        mut cliques: Vec<PointClique>,
    ) -> Result<Self, PatternError> {
        let n = graph.vertex_count();
        let mut vertex_cliques = vec![Vec::new(); n];
        for (idx, k) in cliques.iter_mut().enumerate() {
            k.members.sort_unstable();
            for &v in &k.members {
                if v as usize >= n {
                    return Err(PatternError::VertexOutOfRange {
                        point: k.point,
                        vertex: v,
                        n,
                    });
                }
                vertex_cliques[v as usize].push(idx as u32);
            }
        }
        Ok(Self {
            color,
            graph,
            cliques,
            vertex_cliques,
        })
    }

    pub fn color(&self) -> u32 {
        self.color
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn cliques(&self) -> &[PointClique] {
        &self.cliques
    }

    /// Indices of the point-cliques containing `vertex`.
    pub fn cliques_of(&self, vertex: u32) -> &[u32] {
        &self.vertex_cliques[vertex as usize]
    }

    /// Index of the point-clique holding both endpoints, if any.
    pub fn clique_of_edge(&self, u: u32, v: u32) -> Option<usize> {
        let a = self.cliques_of(u);
        let b = self.cliques_of(v);
        a.iter().find(|x| b.contains(x)).map(|&x| x as usize)
    }

    pub fn clique_bits(&self, idx: usize) -> FixedBitSet {
        crate::graph::bitset_of(
            self.graph.vertex_count(),
            self.cliques[idx].members.iter().map(|&v| v as usize),
        )
    }

    /// `"u v"` per edge, `u < v`, lexicographic.
    pub fn edge_list_text(&self) -> String {
        let mut s = String::new();
        for (u, v) in self.graph.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    /// SHA-256 of [`edge_list_text`](Self::edge_list_text), hex encoded.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.edge_list_text().as_bytes()))
    }
}

/// All graphs of a pattern plus the parameters that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    pub q: u32,
    pub c: u32,
    pub lambda: Vec<u32>,
    /// Vertex `i` is the line `vertex_lines[i]`.
    pub vertex_lines: Vec<LineId>,
    pub graphs: Vec<PatternGraph>,
}

impl PatternSet {
    pub fn vertex_count(&self) -> usize {
        self.vertex_lines.len()
    }
}

/// One graph per color on the vertex set L.
pub fn build_pattern(pencil: &PencilStructure, coloring: &PointColoring) -> PatternSet {
    let plane = pencil.plane();
    let n = pencil.common_secants().len();
    let mut per_color: Vec<Vec<PointClique>> = vec![Vec::new(); coloring.colors as usize];
    for (&point, &color) in &coloring.assignment {
        let members: Vec<u32> = plane
            .lines_through(point)
            .iter()
            .filter_map(|&l| pencil.vertex_of(l))
            .collect();
        per_color[color as usize].push(PointClique { point, members });
    }
    let graphs = per_color
        .into_iter()
        .enumerate()
        .map(|(color, cliques)| {
            PatternGraph::from_cliques(color as u32, n, cliques)
                .expect("members come from vertex_of and are in range")
        })
        .collect();
    PatternSet {
        q: pencil.q(),
        c: coloring.c,
        lambda: pencil.lambda_residues(),
        vertex_lines: pencil.common_secants().to_vec(),
        graphs,
    }
}

fn window(x: u64, scale: u64, c: u64) -> bool {
    2 * c * x >= scale && c * x <= 2 * scale
}

/// Checks, per color: the edges are exactly the disjoint union of the
/// point-cliques; each point-clique with two or more members is a maximal
/// clique; the number of point-cliques lies in `[q³/2c, 2q³/c]`; every vertex
/// is in `[q/2c, 2q/c]` point-cliques. Also checks that no edge has two
/// colors.
pub fn verify_pattern(pattern: &PatternSet) -> Certificate {
    let q = pattern.q as u64;
    let c = pattern.c as u64;
    let n = pattern.vertex_count();
    let mut cert = Certificate::new();

    // Edge-disjointness across colors.
    let mut total = 0usize;
    let mut union = 0usize;
    let mut overlaps = Vec::new();
    for v in 0..n {
        let mut seen = FixedBitSet::with_capacity(n);
        for g in &pattern.graphs {
            let nb = g.graph().neighbors(v);
            total += nb.count_ones(..);
            for u in nb.intersection(&seen).filter(|&u| u > v) {
                overlaps.push(serde_json::json!({"edge": [v, u], "color": g.color()}));
            }
            seen.union_with(nb);
        }
        union += seen.count_ones(..);
    }
    cert.push(
        CheckRecord::new(
            "pattern.edge_disjoint",
            "no edge appears in two color graphs",
            total == union && overlaps.is_empty(),
        )
        .tally("edges_total", total / 2)
        .tally("edges_distinct", union / 2)
        .witnesses_capped(overlaps, 10),
    );

    let mut decomposition_bad = Vec::new();
    let mut maximality_bad = Vec::new();
    let mut count_bad = Vec::new();
    let mut membership_bad = Vec::new();
    let mut clique_counts = BTreeMap::new();
    let mut membership_range = BTreeMap::new();
    for g in &pattern.graphs {
        let color = g.color();
        // Each edge in exactly one clique, and clique pairs are edges.
        let mut cover: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for k in g.cliques() {
            for (i, &u) in k.members.iter().enumerate() {
                for &v in &k.members[i + 1..] {
                    *cover.entry((u, v)).or_default() += 1;
                }
            }
        }
        for (u, v) in g.graph().edges() {
            let hits = cover.remove(&(u as u32, v as u32)).unwrap_or(0);
            if hits != 1 {
                decomposition_bad.push(serde_json::json!({"color": color, "edge": [u, v], "cliques": hits}));
            }
        }
        for ((u, v), hits) in cover {
            decomposition_bad.push(
                serde_json::json!({"color": color, "non_edge": [u, v], "cliques": hits}),
            );
        }

        // Maximality: no outside vertex is adjacent to a whole clique.
        for k in g.cliques().iter().filter(|k| k.members.len() >= 2) {
            let mut common = g.graph().neighbors(k.members[0] as usize).clone();
            for &m in &k.members[1..] {
                common.intersect_with(g.graph().neighbors(m as usize));
            }
            if let Some(ext) = common.ones().find(|x| !k.members.contains(&(*x as u32))) {
                maximality_bad.push(
                    serde_json::json!({"color": color, "point": k.point, "extends_by": ext}),
                );
            }
        }

        let count = g.cliques().len() as u64;
        clique_counts.insert(color.to_string(), count);
        if !window(count, q * q * q, c) {
            count_bad.push(serde_json::json!({"color": color, "point_cliques": count}));
        }

        let mut lo = u64::MAX;
        let mut hi = 0;
        for v in 0..n as u32 {
            let m = g.cliques_of(v).len() as u64;
            lo = lo.min(m);
            hi = hi.max(m);
            if !window(m, q, c) {
                membership_bad.push(serde_json::json!({"color": color, "vertex": v, "memberships": m}));
            }
        }
        membership_range.insert(color.to_string(), (lo.min(hi), hi));
    }

    cert.push(
        CheckRecord::new(
            "pattern.clique_decomposition",
            "each graph is the edge-disjoint union of its point-cliques",
            decomposition_bad.is_empty(),
        )
        .tally("colors", pattern.graphs.len())
        .witnesses_capped(decomposition_bad, 10),
    );
    cert.push(
        CheckRecord::new(
            "pattern.clique_maximality",
            "every point-clique with at least two members is a maximal clique",
            maximality_bad.is_empty(),
        )
        .witnesses_capped(maximality_bad, 10),
    );
    cert.push(
        CheckRecord::new(
            "pattern.clique_count_window",
            "each color has between q³/2c and 2q³/c point-cliques",
            count_bad.is_empty(),
        )
        .tally("point_cliques", clique_counts)
        .witnesses_capped(count_bad, 10),
    );
    cert.push(
        CheckRecord::new(
            "pattern.membership_window",
            "every vertex lies in between q/2c and 2q/c point-cliques of each color",
            membership_bad.is_empty(),
        )
        .tally("membership_range", membership_range)
        .witnesses_capped(membership_bad, 10),
    );
    cert
}

/// How a `K_{k+1}` sits against the point-cliques.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CliqueKind {
    /// All vertices go through one point.
    Degenerate { point: PointId, clique: usize },
    /// `k` vertices through `concurrence_point`, plus one transversal.
    Fan {
        concurrence_point: PointId,
        spine_clique: usize,
        transversal: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueWitness {
    pub vertices: Vec<u32>,
    #[serde(flatten)]
    pub kind: CliqueKind,
}

/// Classifies a `K_{k+1}` as degenerate or a fan.
pub fn classify_kplus1_clique(
    graph: &PatternGraph,
    vertices: &[u32],
    k: usize,
) -> Result<CliqueWitness, PatternError> {
    if k < 3 {
        return Err(PatternError::KTooSmall(k));
    }
    if vertices.len() != k + 1 {
        return Err(PatternError::WrongSize {
            expected: k + 1,
            got: vertices.len(),
        });
    }
    let as_usize: Vec<usize> = vertices.iter().map(|&v| v as usize).collect();
    if as_usize.iter().any(|&v| v >= graph.graph().vertex_count())
        || !graph.graph().is_clique(&as_usize)
    {
        return Err(PatternError::NotAClique(vertices.to_vec()));
    }
    let mut hits: BTreeMap<u32, usize> = BTreeMap::new();
    for &v in vertices {
        for &k_idx in graph.cliques_of(v) {
            *hits.entry(k_idx).or_default() += 1;
        }
    }
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    if let Some((&idx, _)) = hits.iter().find(|(_, &h)| h == k + 1) {
        return Ok(CliqueWitness {
            vertices: sorted,
            kind: CliqueKind::Degenerate {
                point: graph.cliques()[idx as usize].point,
                clique: idx as usize,
            },
        });
    }
    if let Some((&idx, _)) = hits.iter().find(|(_, &h)| h == k) {
        let spine = &graph.cliques()[idx as usize];
        let transversal = *vertices
            .iter()
            .find(|v| !spine.members.contains(v))
            .expect("exactly one vertex lies off the spine");
        return Ok(CliqueWitness {
            vertices: sorted,
            kind: CliqueKind::Fan {
                concurrence_point: spine.point,
                spine_clique: idx as usize,
                transversal,
            },
        });
    }
    Err(PatternError::StructureViolation(sorted))
}

/// Tally of an exhaustive `K_{k+1}` classification.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueCensus {
    pub degenerate: u64,
    pub fans: u64,
    pub violations: Vec<Vec<u32>>,
}

/// Enumerates every `K_{k+1}` of the graph and classifies each.
pub fn classify_all_cliques(graph: &PatternGraph, k: usize) -> Result<CliqueCensus, PatternError> {
    if k < 3 {
        return Err(PatternError::KTooSmall(k));
    }
    let mut census = CliqueCensus::default();
    let mut err = None;
    graph.graph().for_each_clique(k + 1, |c| {
        let vs: Vec<u32> = c.iter().map(|&v| v as u32).collect();
        match classify_kplus1_clique(graph, &vs, k) {
            Ok(w) => match w.kind {
                CliqueKind::Degenerate { .. } => census.degenerate += 1,
                CliqueKind::Fan { .. } => census.fans += 1,
            },
            Err(PatternError::StructureViolation(v)) => census.violations.push(v),
            Err(e) => {
                err = Some(e);
                return true;
            }
        }
        false
    });
    match err {
        Some(e) => Err(e),
        None => Ok(census),
    }
}

pub(crate) fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of `(k+1)`-fans containing the edge `uv`.
///
/// Fans whose concurrence point is `u ∩ v` pick `k − 2` more spine lines from
/// the clique of `uv` and a transversal outside it; the others use `u` or `v`
/// as the transversal and a spine of `k` lines through some other point on
/// the remaining endpoint.
pub fn count_fans_through_edge(
    graph: &PatternGraph,
    u: u32,
    v: u32,
    k: usize,
) -> Result<u64, PatternError> {
    if k < 3 {
        return Err(PatternError::KTooSmall(k));
    }
    let g = graph.graph();
    if !g.has_edge(u as usize, v as usize) {
        return Err(PatternError::MissingEdge(u, v));
    }
    let k = k as u64;
    let edge_clique = graph
        .clique_of_edge(u, v)
        .ok_or(PatternError::StructureViolation(vec![u, v]))?;
    let spine_bits = graph.clique_bits(edge_clique);

    let mut common = g.neighbors(u as usize).clone();
    common.intersect_with(g.neighbors(v as usize));
    common.difference_with(&spine_bits);
    let through_meet: u64 = common
        .ones()
        .map(|t| {
            let m = g.neighbors(t).intersection_count(&spine_bits) as u64;
            binomial(m - 2, k - 2)
        })
        .sum();

    let mut elsewhere = 0u64;
    for (transversal, anchor) in [(u, v), (v, u)] {
        for &idx in graph.cliques_of(anchor) {
            let members = &graph.cliques()[idx as usize].members;
            if members.contains(&transversal) {
                continue;
            }
            let m = members
                .iter()
                .filter(|&&w| g.has_edge(transversal as usize, w as usize))
                .count() as u64;
            // m counts the anchor itself
            elsewhere += binomial(m - 1, k - 1);
        }
    }
    Ok(through_meet + elsewhere)
}

/// `count ≤ 2·(2q/c)^k`, compared exactly.
pub fn fan_count_within_bound(count: u64, q: u32, c: u32, k: usize) -> bool {
    let lhs = (count as u128).checked_mul((c as u128).pow(k as u32));
    let rhs = 2u128.checked_mul((2 * q as u128).pow(k as u32));
    match (lhs, rhs) {
        (Some(l), Some(r)) => l <= r,
        _ => (count as f64) <= 2.0 * (2.0 * q as f64 / c as f64).powi(k as i32),
    }
}
