//! Random Turánization of a pattern graph.
//!
//! Each point-clique is split independently: every member goes to part `R_0`
//! with probability `1 − α` and to each of `R_1..R_k` with probability `α/k`.
//! An edge survives iff, inside the unique point-clique containing it, its
//! endpoints sit in two different parts among `R_1..R_k`. Inside a clique
//! the survivors form a complete `k`-partite graph, so no `K_{k+1}` can live
//! in one clique any more; the only candidates left are fans.
//!
//! Randomness: the graph of color `i` uses seed `derive_seed(seed, i)` and
//! clique `j` draws from substream `j` of it. Per member (in increasing
//! vertex order) one `gen_bool(α)` decides activity and, if active, one
//! `gen_range(1..=k)` picks the part.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use rand::seq::index;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certificate::{Certificate, CheckRecord};
use crate::graph::{bitset_of, Graph};
use crate::pattern::{PatternGraph, PointClique};
use crate::rng;

/// Retention probability used when none is given.
pub const DEFAULT_ALPHA: f64 = 0.5;

/// Largest vertex count for which [`AlphaMode::Exhaustive`] is allowed.
pub const EXHAUSTIVE_CAP: usize = 25;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SparsifyError {
    #[error("alpha must lie in [0, 1] (got {0})")]
    Alpha(f64),
    #[error("k must be at least 1")]
    K,
    #[error("exhaustive subset search is capped at {EXHAUSTIVE_CAP} vertices (graph has {0})")]
    ExhaustiveTooLarge(usize),
    #[error("subset size {size} exceeds the vertex count {n}")]
    SubsetTooLarge { size: usize, n: usize },
    #[error("sparse graph has {sparse} vertices but the base graph has {base}")]
    BaseMismatch { sparse: usize, base: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparsifyParams {
    pub k: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl SparsifyParams {
    pub fn new(k: usize, alpha: f64, seed: u64) -> Result<Self, SparsifyError> {
        if k == 0 {
            return Err(SparsifyError::K);
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(SparsifyError::Alpha(alpha));
        }
        Ok(Self { k, alpha, seed })
    }
}

/// The kept subgraph of one color and the partition that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseGraph {
    pub color: u32,
    pub params: SparsifyParams,
    /// Content hash of the base graph's edge list.
    pub base_hash: String,
    /// `parts[j][t]`: part of the `t`-th member of point-clique `j`.
    pub parts: Vec<Vec<u32>>,
    pub kept: Graph,
}

/// Draws the partition of every point-clique and keeps cross-part edges.
pub fn sparsify(base: &PatternGraph, params: SparsifyParams) -> SparseGraph {
    let color_seed = rng::derive_seed(params.seed, base.color() as u64);
    let parts: Vec<Vec<u32>> = base
        .cliques()
        .par_iter()
        .enumerate()
        .map(|(j, clique)| draw_parts(clique, params, color_seed, j as u64))
        .collect();
    let mut kept = Graph::new(base.graph().vertex_count());
    for (clique, p) in base.cliques().iter().zip(&parts) {
        for (a, &u) in clique.members.iter().enumerate() {
            for (b, &v) in clique.members.iter().enumerate().skip(a + 1) {
                if p[a] != 0 && p[b] != 0 && p[a] != p[b] {
                    kept.add_edge(u as usize, v as usize);
                }
            }
        }
    }
    SparseGraph {
        color: base.color(),
        params,
        base_hash: base.content_hash(),
        parts,
        kept,
    }
}

fn draw_parts(clique: &PointClique, params: SparsifyParams, seed: u64, stream: u64) -> Vec<u32> {
    let mut rng = rng::substream(seed, stream);
    clique
        .members
        .iter()
        .map(|_| {
            if rng.gen_bool(params.alpha) {
                rng.gen_range(1..=params.k as u32)
            } else {
                0
            }
        })
        .collect()
}

/// `α²·(1 − 1/k)`: both endpoints active, in different parts.
pub fn keep_probability(k: usize, alpha: f64) -> f64 {
    alpha * alpha * (1.0 - 1.0 / k as f64)
}

/// JSON form of a sparse graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseGraphRecord {
    pub base_hash: String,
    pub color: u32,
    pub seed: u64,
    pub alpha: f64,
    pub k: usize,
    pub vertices: usize,
    pub kept_edges: Vec<(usize, usize)>,
}

impl SparseGraph {
    pub fn record(&self) -> SparseGraphRecord {
        SparseGraphRecord {
            base_hash: self.base_hash.clone(),
            color: self.color,
            seed: self.params.seed,
            alpha: self.params.alpha,
            k: self.params.k,
            vertices: self.kept.vertex_count(),
            kept_edges: self.kept.edges().collect(),
        }
    }
}

/// Some `K_{k+1}` of the kept graph found through fan structure: a spine of
/// `k` vertices inside one point-clique plus a transversal adjacent to all of
/// them. Scans cliques in order and returns the first hit.
pub fn find_fan_clique(base: &PatternGraph, sparse: &SparseGraph) -> Option<Vec<u32>> {
    let k = sparse.params.k;
    let kept = &sparse.kept;
    let n = kept.vertex_count();
    (0..base.cliques().len()).into_par_iter().find_map_first(|j| {
        let members = &base.cliques()[j].members;
        if members.len() < k {
            return None;
        }
        let bits = base.clique_bits(j);
        (0..n).filter(|&t| !bits.contains(t)).find_map(|t| {
            let mut cand = kept.neighbors(t).clone();
            cand.intersect_with(&bits);
            if cand.count_ones(..) < k {
                return None;
            }
            kept.find_clique_in(k, &cand).map(|spine| {
                let mut w: Vec<u32> = spine.iter().map(|&v| v as u32).collect();
                w.push(t as u32);
                w.sort_unstable();
                w
            })
        })
    })
}

/// Certifies that the kept graph has no `K_{k+1}`.
///
/// Records the per-clique `k`-partite structure, the absence of degenerate
/// cliques, the fan search, and its agreement with a structure-blind clique
/// search over the whole kept graph.
pub fn check_kplus1_free(
    base: &PatternGraph,
    sparse: &SparseGraph,
) -> Result<Certificate, SparsifyError> {
    let n = base.graph().vertex_count();
    if sparse.kept.vertex_count() != n {
        return Err(SparsifyError::BaseMismatch {
            sparse: sparse.kept.vertex_count(),
            base: n,
        });
    }
    let k = sparse.params.k;
    let mut cert = Certificate::new();

    let mut structure_bad = Vec::new();
    let mut stray = 0usize;
    for (u, v) in sparse.kept.edges() {
        if !base.graph().has_edge(u, v) {
            stray += 1;
            structure_bad.push(serde_json::json!({"edge": [u, v], "issue": "not a base edge"}));
        }
    }
    for (j, clique) in base.cliques().iter().enumerate() {
        let Some(parts) = sparse.parts.get(j) else {
            structure_bad.push(serde_json::json!({"clique": j, "issue": "no partition"}));
            continue;
        };
        for (a, &u) in clique.members.iter().enumerate() {
            for (b, &v) in clique.members.iter().enumerate().skip(a + 1) {
                let should = parts[a] != 0 && parts[b] != 0 && parts[a] != parts[b];
                if should != sparse.kept.has_edge(u as usize, v as usize) {
                    structure_bad.push(serde_json::json!({
                        "clique": j, "edge": [u, v], "parts": [parts[a], parts[b]]
                    }));
                }
            }
        }
    }
    cert.push(
        CheckRecord::new(
            "sparsify.cliques_k_partite",
            "inside every point-clique the kept edges are exactly the pairs in distinct parts among R_1..R_k",
            structure_bad.is_empty(),
        )
        .tally("stray_edges", stray)
        .witnesses_capped(structure_bad, 10),
    );

    let degenerate: Vec<serde_json::Value> = (0..base.cliques().len())
        .into_par_iter()
        .filter_map(|j| {
            sparse
                .kept
                .find_clique_in(k + 1, &base.clique_bits(j))
                .map(|c| serde_json::json!({"clique": j, "vertices": c}))
        })
        .collect();
    cert.push(
        CheckRecord::new(
            "sparsify.no_degenerate_clique",
            "no point-clique contains a kept K_{k+1}",
            degenerate.is_empty(),
        )
        .witnesses_capped(degenerate, 10),
    );

    let fan = find_fan_clique(base, sparse);
    let blind = sparse.kept.find_clique(k + 1);
    cert.push(
        CheckRecord::new(
            "sparsify.kplus1_free",
            "the kept graph contains no K_{k+1}",
            fan.is_none(),
        )
        .tally("k", k)
        .tally("kept_edges", sparse.kept.edge_count())
        .witnesses_capped(fan.iter().map(|w| serde_json::json!({"fan": w})), 1),
    );
    cert.push(
        CheckRecord::new(
            "sparsify.search_agreement",
            "fan-structured search and structure-blind clique search agree",
            fan.is_some() == blind.is_some(),
        )
        .tally("fan_search_found", fan.is_some())
        .tally("blind_search_found", blind.is_some()),
    );
    Ok(cert)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaMode {
    Exhaustive,
    Sampled(usize),
}

/// Checks that every tested vertex subset of `subset_size` induces a `K_k` in
/// the kept graph: all subsets (exhaustive mode, small graphs only) or
/// `n_samples` uniform subsets drawn from substreams `0..n_samples` of `seed`.
pub fn check_alpha_k(
    sparse: &SparseGraph,
    k: usize,
    subset_size: usize,
    mode: AlphaMode,
    seed: u64,
) -> Result<Certificate, SparsifyError> {
    let g = &sparse.kept;
    let n = g.vertex_count();
    if subset_size > n {
        return Err(SparsifyError::SubsetTooLarge {
            size: subset_size,
            n,
        });
    }
    let subsets: Vec<Vec<usize>> = match mode {
        AlphaMode::Exhaustive => {
            if n > EXHAUSTIVE_CAP {
                return Err(SparsifyError::ExhaustiveTooLarge(n));
            }
            combinations(n, subset_size)
        }
        AlphaMode::Sampled(count) => (0..count as u64)
            .map(|i| {
                let mut rng = rng::substream(seed, i);
                let mut s = index::sample(&mut rng, n, subset_size).into_vec();
                s.sort_unstable();
                s
            })
            .collect(),
    };
    let misses: Vec<(usize, Vec<usize>)> = subsets
        .par_iter()
        .enumerate()
        .filter(|(_, s)| g.find_clique_in(k, &bitset_of(n, s.iter().copied())).is_none())
        .map(|(i, s)| (i, s.clone()))
        .collect();
    let tested = subsets.len();
    let mut record = CheckRecord::new(
        "sparsify.alpha_k",
        "every tested vertex subset of the given size induces a K_k",
        misses.is_empty() && tested > 0,
    )
    .tally("k", k)
    .tally("subset_size", subset_size)
    .tally("subsets_tested", tested)
    .tally("subsets_with_kk", tested - misses.len())
    .tally(
        "mode",
        match mode {
            AlphaMode::Exhaustive => "exhaustive".to_string(),
            AlphaMode::Sampled(_) => format!("sampled(seed={seed})"),
        },
    );
    record = record.witnesses_capped(
        misses
            .into_iter()
            .map(|(i, s)| serde_json::json!({"subset_index": i, "vertices": s})),
        5,
    );
    Ok(Certificate::from_iter([record]))
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..r).collect();
    if r > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..r).rev().find(|&i| cur[i] != i + n - r) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..r {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// `r^{−15/(2k)} · ln(r)^{−4} · ln(k)^{−4}`.
pub fn asymptotic_alpha(r: f64, k: f64) -> f64 {
    r.powf(-15.0 / (2.0 * k)) * r.ln().powi(-4) * k.ln().powi(-4)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaChoice {
    Value(f64),
    /// The asymptotic formula [`asymptotic_alpha`], falling back to
    /// [`DEFAULT_ALPHA`] when it is not a probability.
    Asymptotic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaResolution {
    pub alpha: f64,
    pub formula_value: Option<f64>,
    pub fell_back: bool,
    pub note: Option<String>,
}

pub fn resolve_alpha(choice: AlphaChoice, r: u32, k: usize) -> Result<AlphaResolution, SparsifyError> {
    match choice {
        AlphaChoice::Value(a) => {
            SparsifyParams::new(k.max(1), a, 0)?;
            Ok(AlphaResolution {
                alpha: a,
                formula_value: None,
                fell_back: false,
                note: None,
            })
        }
        AlphaChoice::Asymptotic => {
            let v = asymptotic_alpha(r as f64, k as f64);
            if v.is_finite() && v > 0.0 && v <= 1.0 {
                Ok(AlphaResolution {
                    alpha: v,
                    formula_value: Some(v),
                    fell_back: false,
                    note: None,
                })
            } else {
                Ok(AlphaResolution {
                    alpha: DEFAULT_ALPHA,
                    formula_value: v.is_finite().then_some(v),
                    fell_back: true,
                    note: Some(format!(
                        "formula alpha for r={r}, k={k} is {v}, not in (0, 1]; using {DEFAULT_ALPHA}"
                    )),
                })
            }
        }
    }
}

/// One inequality, evaluated in log space so that large parameters stay finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub statement: String,
    pub ln_lhs: f64,
    pub ln_rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub q: f64,
    pub k: u32,
    pub r: f64,
    pub c: f64,
    pub alpha: f64,
    pub inequalities: Vec<Inequality>,
}

impl FeasibilityReport {
    pub fn get(&self, name: &str) -> Option<&Inequality> {
        self.inequalities.iter().find(|i| i.name == name)
    }

    pub fn all_hold(&self) -> bool {
        self.inequalities.iter().all(|i| i.holds)
    }
}

/// `ln C(⌊x⌋, k)`; `−∞` when `⌊x⌋ < k`.
fn ln_binomial(x: f64, k: u32) -> f64 {
    let n = x.floor();
    if n < k as f64 {
        return f64::NEG_INFINITY;
    }
    (0..k).map(|j| (n - j as f64).ln() - ((j + 1) as f64).ln()).sum()
}

/// Evaluates the parameter inequalities used by the existence argument for
/// concrete `(q, k, r, c, α)`.
pub fn feasibility_report(q: f64, k: u32, r: f64, c: f64, alpha: f64) -> FeasibilityReport {
    let kf = k as f64;
    let half = 0.5f64.ln();
    let lam = (q / 2.0).floor();
    let mut items = Vec::new();
    let mut push = |name: &str, statement: &str, ln_lhs: f64, ln_rhs: f64, strict: bool| {
        let holds = if strict { ln_lhs < ln_rhs } else { ln_lhs <= ln_rhs };
        items.push(Inequality {
            name: name.into(),
            statement: statement.into(),
            ln_lhs,
            ln_rhs,
            holds,
        });
    };
    push(
        "retention",
        "32·k·c·ln(e·r) ≤ α·q",
        32f64.ln() + kf.ln() + c.ln() + (1.0 + r.ln()).ln(),
        alpha.ln() + q.ln(),
        false,
    );
    push(
        "fan_union_bound",
        "q⁷·C(2q/c, k)·α^{3k} < 1/2",
        7.0 * q.ln() + ln_binomial(2.0 * q / c, k) + 3.0 * kf * alpha.ln(),
        half,
        true,
    );
    push(
        "coloring_condition",
        "c ≤ q / (48·ln q)",
        c.ln(),
        q.ln() - 48f64.ln() - q.ln().ln(),
        false,
    );
    push(
        "enough_colors",
        "r ≤ c·⌊q/2⌋",
        r.ln(),
        c.ln() + lam.ln(),
        false,
    );
    push(
        "class_size_union_bound",
        "c·⌊q/2⌋·2·exp(−q³/4c) < 1/2",
        c.ln() + lam.ln() + 2f64.ln() - q.powi(3) / (4.0 * c),
        half,
        true,
    );
    push(
        "line_count_union_bound",
        "2·q⁴·c·⌊q/2⌋·exp(−q/8c) < 1/2",
        2f64.ln() + 4.0 * q.ln() + c.ln() + lam.ln() - q / (8.0 * c),
        half,
        true,
    );
    FeasibilityReport {
        q,
        k,
        r,
        c,
        alpha,
        inequalities: items,
    }
}

/// Parameters of the asymptotic regime for `(k, r)`: `q` at the lower end of
/// `(C/2)·k^{1/2}·r^{1/2+15/(2k)}·ln⁵r·ln⁵k` with `C = 2¹⁰⁰`, `c = ⌈8r/q⌉`,
/// and `α` from [`asymptotic_alpha`]. `q` is not rounded to a prime.
pub fn asymptotic_parameters(k: u32, r: f64) -> (f64, f64, f64) {
    let kf = k as f64;
    let big_c = 2f64.powi(100);
    let q = big_c / 2.0
        * kf.sqrt()
        * r.powf(0.5 + 15.0 / (2.0 * kf))
        * r.ln().powi(5)
        * kf.ln().powi(5);
    let c = (8.0 * r / q).ceil();
    (q, c, asymptotic_alpha(r, kf))
}

/// Exact survival probability of a fan under the partition, given the
/// point-cliques it touches: the `k` spine vertices must land in distinct
/// active parts of the spine clique, and each of the `k` other relevant
/// cliques (spine vertex + transversal) must keep its edge.
pub fn fan_survival_probability(k: usize, alpha: f64) -> f64 {
    let spine: f64 = (0..k).map(|i| alpha * (k - i) as f64 / k as f64).product();
    spine * keep_probability(k, alpha).powi(k as i32)
}

/// Survival count of an edge across many seeds, used to estimate
/// [`keep_probability`].
pub fn kept_edge_frequency(
    base: &PatternGraph,
    edge: (usize, usize),
    k: usize,
    alpha: f64,
    seeds: std::ops::Range<u64>,
) -> Result<(u64, u64), SparsifyError> {
    let trials = seeds.end.saturating_sub(seeds.start);
    let hits = seeds
        .into_par_iter()
        .map(|s| {
            let p = SparsifyParams::new(k, alpha, s)?;
            Ok(sparsify(base, p).kept.has_edge(edge.0, edge.1) as u64)
        })
        .collect::<Result<Vec<_>, SparsifyError>>()?
        .into_iter()
        .sum();
    Ok((hits, trials))
}

/// Per-seed K_{k+1} scan over `seeds` plus the first K_{k+1}-free seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedScan {
    pub color: u32,
    /// seed → whether the kept graph is K_{k+1}-free.
    pub verdicts: BTreeMap<u64, bool>,
    pub first_free: Option<u64>,
}

/// Runs [`sparsify`] + fan search for each seed in order.
pub fn scan_seeds(
    base: &PatternGraph,
    k: usize,
    alpha: f64,
    seeds: impl IntoIterator<Item = u64>,
) -> Result<SeedScan, SparsifyError> {
    let mut verdicts = BTreeMap::new();
    let mut first_free = None;
    for s in seeds {
        let sparse = sparsify(base, SparsifyParams::new(k, alpha, s)?);
        let free = find_fan_clique(base, &sparse).is_none();
        verdicts.insert(s, free);
        if free && first_free.is_none() {
            first_free = Some(s);
        }
    }
    Ok(SeedScan {
        color: base.color(),
        verdicts,
        first_free,
    })
}

/// Helper for callers holding only a subset list.
pub fn subset_bits(n: usize, subset: &[usize]) -> FixedBitSet {
    bitset_of(n, subset.iter().copied())
}
