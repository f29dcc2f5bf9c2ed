//! Edge colorings of `K_{q²}` from the affine plane `AG(2, q)` in which every
//! one-vertex extension creates a new monochromatic `K_{k+1}`.
//!
//! Two points get the color of the parallel class of the line they span;
//! classes `r−1..=q` (0-based) are merged into the last color. Colors are
//! numbered `1..=r`. Inside a color every vertex lies on a line-clique of
//! size `q` from each constituent class, and a color that occupies at least
//! `q²/r > (k−1)·q` new edges must put `k` of them on one such line.
//!
//! Indexing: here `k` is the order of the forced clique minus one (the
//! construction forces `K_{k+1}`). [`semisat_upper_bound`] takes the target
//! clique order directly.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certificate::{Certificate, CheckRecord};
use crate::field::is_prime;
use crate::geometry::{build_affine_plane, AffinePlane, GeometryError};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemisatError {
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("no prime strictly between {lo} and {hi}")]
    NoPrime { lo: u64, hi: u64 },
    #[error("r = {r} exceeds q + 1 = {}", q + 1)]
    TooManyColors { r: u32, q: u32 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemisatColoring {
    pub k: u32,
    pub r: u32,
    plane: AffinePlane,
    /// Color (1..=r) of each parallel class.
    class_color: Vec<u32>,
}

/// Smallest prime strictly between `lo` and `hi`.
pub fn smallest_prime_between(lo: u64, hi: u64) -> Option<u64> {
    (lo + 1..hi).find(|&p| is_prime(p))
}

/// Builds the coloring forcing `K_{k+1}` with `r` colors. Without `q`, the
/// smallest prime in `((k−1)r, 2(k−1)r)` is used.
pub fn build_semisat(k: u32, r: u32, q: Option<u64>) -> Result<SemisatColoring, SemisatError> {
    if k < 2 {
        return Err(SemisatError::Degenerate(format!(
            "k = {k}: the forced clique K_{} is a single edge or vertex",
            k + 1
        )));
    }
    if r < 1 {
        return Err(SemisatError::Degenerate("r must be at least 1".into()));
    }
    let lo = (k as u64 - 1) * r as u64;
    let q = match q {
        Some(q) => q,
        None => smallest_prime_between(lo, 2 * lo).ok_or(SemisatError::NoPrime { lo, hi: 2 * lo })?,
    };
    let plane = build_affine_plane(q)?;
    let q = plane.order();
    if r > q + 1 {
        return Err(SemisatError::TooManyColors { r, q });
    }
    let class_color = (0..=q).map(|class| (class + 1).min(r)).collect();
    Ok(SemisatColoring {
        k,
        r,
        plane,
        class_color,
    })
}

impl SemisatColoring {
    pub fn q(&self) -> u32 {
        self.plane.order()
    }

    pub fn vertex_count(&self) -> usize {
        self.plane.point_count()
    }

    pub fn plane(&self) -> &AffinePlane {
        &self.plane
    }

    pub fn class_color(&self, class: usize) -> u32 {
        self.class_color[class]
    }

    /// Parallel classes merged into `color`.
    pub fn classes_of(&self, color: u32) -> Vec<usize> {
        (0..self.class_color.len())
            .filter(|&c| self.class_color[c] == color)
            .collect()
    }

    /// Color of the edge `{u, v}`; `None` for `u == v`.
    pub fn color(&self, u: u32, v: u32) -> Option<u32> {
        self.plane
            .line_through(u, v)
            .map(|(class, _)| self.class_color[class])
    }

    /// `n r`, then one `u v color` line per pair `u < v`.
    pub fn export_text(&self) -> String {
        let n = self.vertex_count() as u32;
        let mut out = format!("{n} {}\n", self.r);
        for u in 0..n {
            for v in u + 1..n {
                let c = self.color(u, v).expect("distinct points");
                out.push_str(&format!("{u} {v} {c}\n"));
            }
        }
        out
    }
}

/// Structural checks: total coloring, color classes as unions of disjoint
/// line-cliques, cross-class lines meeting in one vertex, and the pigeonhole
/// inequality `q² > (k−1)·q·r`.
pub fn verify_structure(coloring: &SemisatColoring) -> Certificate {
    let q = coloring.q();
    let n = coloring.vertex_count() as u32;
    let r = coloring.r;
    let mut cert = Certificate::new();

    // Independent edge coloring straight from coordinates.
    let slope_class = |u: u32, v: u32| -> usize {
        let (x1, y1) = (u / q, u % q);
        let (x2, y2) = (v / q, v % q);
        if x1 == x2 {
            return q as usize;
        }
        let dx = (x2 + q - x1) % q;
        let dy = (y2 + q - y1) % q;
        let inv = (1..q).find(|&i| dx * i % q == 1).expect("q prime");
        (dy * inv % q) as usize
    };

    let mut per_color = vec![0u64; r as usize + 1];
    let mut bad_total = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            match coloring.color(u, v) {
                Some(c) if (1..=r).contains(&c) => {
                    per_color[c as usize] += 1;
                    let expected = (slope_class(u, v) as u32 + 1).min(r);
                    if expected != c {
                        bad_total.push(serde_json::json!({"edge": [u, v], "color": c, "expected": expected}));
                    }
                }
                other => bad_total.push(serde_json::json!({"edge": [u, v], "color": other})),
            }
        }
    }
    let pairs = n as u64 * (n as u64 - 1) / 2;
    cert.push(
        CheckRecord::new(
            "semisat.total_coloring",
            "every pair of distinct vertices has exactly one color in 1..=r, given by the slope of the spanned line",
            bad_total.is_empty() && per_color.iter().sum::<u64>() == pairs,
        )
        .tally("pairs", pairs)
        .tally("edges_per_color", &per_color[1..])
        .witnesses_capped(bad_total, 10),
    );

    let mut bad_classes = Vec::new();
    let mut clique_counts = Vec::new();
    for color in 1..=r {
        let classes = coloring.classes_of(color);
        let mut edges = 0u64;
        for &class in &classes {
            let lines = &coloring.plane.parallel_classes()[class];
            let mut covered = vec![0u32; n as usize];
            for line in lines {
                if line.len() != q as usize {
                    bad_classes.push(serde_json::json!({"class": class, "line": line, "issue": "size"}));
                }
                for &p in line {
                    covered[p as usize] += 1;
                }
                for (i, &a) in line.iter().enumerate() {
                    for &b in &line[i + 1..] {
                        if coloring.color(a, b) != Some(color) {
                            bad_classes.push(serde_json::json!({"class": class, "edge": [a, b]}));
                        }
                    }
                }
                edges += (line.len() * (line.len() - 1) / 2) as u64;
            }
            if covered.iter().any(|&c| c != 1) || lines.len() != q as usize {
                bad_classes.push(serde_json::json!({"class": class, "issue": "not a partition into q lines"}));
            }
        }
        if edges != per_color[color as usize] {
            bad_classes.push(serde_json::json!({
                "color": color, "line_clique_edges": edges, "colored_edges": per_color[color as usize]
            }));
        }
        clique_counts.push(classes.len() as u32 * q);
    }
    let expected_last = (q + 2 - r) * q;
    let counts_ok = clique_counts[..r as usize - 1].iter().all(|&c| c == q)
        && clique_counts[r as usize - 1] == expected_last;
    cert.push(
        CheckRecord::new(
            "semisat.class_decomposition",
            "colors 1..r-1 are unions of q disjoint q-cliques; color r is a union of (q+2-r)q line-cliques",
            bad_classes.is_empty() && counts_ok,
        )
        .tally("line_cliques_per_color", &clique_counts)
        .witnesses_capped(bad_classes, 10),
    );

    let classes = coloring.plane.parallel_classes();
    let mut bad_meet = Vec::new();
    let mut pairs_checked = 0u64;
    for (ca, a_lines) in classes.iter().enumerate() {
        for b_lines in &classes[ca + 1..] {
            for a in a_lines {
                for b in b_lines {
                    pairs_checked += 1;
                    let common = a.iter().filter(|p| b.contains(p)).count();
                    if common != 1 {
                        bad_meet.push(serde_json::json!({"lines": [a, b], "common": common}));
                    }
                }
            }
        }
    }
    cert.push(
        CheckRecord::new(
            "semisat.cross_class_meeting",
            "two line-cliques from different parallel classes share exactly one vertex",
            bad_meet.is_empty(),
        )
        .tally("line_pairs_checked", pairs_checked)
        .witnesses_capped(bad_meet, 10),
    );

    let lhs = q as u64 * q as u64;
    let rhs = (coloring.k as u64 - 1) * q as u64 * r as u64;
    cert.push(
        CheckRecord::new(
            "semisat.pigeonhole",
            "q^2/r > (k-1)q",
            lhs > rhs,
        )
        .tally("q_squared", lhs)
        .tally("k_minus_1_q_r", rhs),
    );
    cert
}

/// Colors (1..=r) of the new edges, indexed by old vertex.
pub type Extension = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionWitness {
    pub label: String,
    pub color: u32,
    /// Occurrences of `color` among the new edges.
    pub occurrences: u32,
    pub class: usize,
    pub line: usize,
    /// `k` old vertices on the line; with the new vertex they form the clique.
    pub vertices: Vec<u32>,
}

/// Finds a monochromatic `K_{k+1}` through the new vertex, preferring the
/// most frequent extension color.
pub fn find_witness(coloring: &SemisatColoring, ext: &[u32], label: &str) -> Option<ExtensionWitness> {
    let k = coloring.k as usize;
    let mut occurrences = vec![0u32; coloring.r as usize + 1];
    for &c in ext {
        if let Some(o) = occurrences.get_mut(c as usize) {
            *o += 1;
        }
    }
    let mut order: Vec<u32> = (1..=coloring.r).collect();
    order.sort_by_key(|&c| (std::cmp::Reverse(occurrences[c as usize]), c));
    order.into_iter().find_map(|color| {
        coloring.classes_of(color).into_iter().find_map(|class| {
            coloring.plane.parallel_classes()[class]
                .iter()
                .enumerate()
                .find_map(|(li, line)| {
                    let hits: Vec<u32> = line
                        .iter()
                        .copied()
                        .filter(|&p| ext[p as usize] == color)
                        .take(k)
                        .collect();
                    (hits.len() == k).then(|| ExtensionWitness {
                        label: label.to_string(),
                        color,
                        occurrences: occurrences[color as usize],
                        class,
                        line: li,
                        vertices: hits,
                    })
                })
        })
    })
}

/// Re-checks a witness against the edge colors alone.
pub fn witness_is_valid(coloring: &SemisatColoring, ext: &[u32], w: &ExtensionWitness) -> bool {
    let mut vs = w.vertices.clone();
    vs.sort_unstable();
    vs.dedup();
    vs.len() == coloring.k as usize
        && vs.iter().all(|&v| ext.get(v as usize) == Some(&w.color))
        && vs.iter().enumerate().all(|(i, &a)| {
            vs[i + 1..]
                .iter()
                .all(|&b| coloring.color(a, b) == Some(w.color))
        })
}

/// Deterministic extensions: one color everywhere, colors by vertex index
/// mod r, and a spread that cycles colors along each vertical line.
pub fn adversarial_extensions(coloring: &SemisatColoring) -> Vec<(String, Extension)> {
    let n = coloring.vertex_count() as u32;
    let q = coloring.q();
    let r = coloring.r;
    vec![
        ("all_one_color".into(), vec![1; n as usize]),
        ("balanced".into(), (0..n).map(|v| v % r + 1).collect()),
        (
            "per_line_spread".into(),
            (0..n).map(|v| ((v / q + 2 * (v % q)) % q) % r + 1).collect(),
        ),
    ]
}

/// Uniform random extension number `index` of `seed`.
pub fn random_extension(coloring: &SemisatColoring, seed: u64, index: u64) -> Extension {
    let mut rng = rng::substream(seed, index);
    (0..coloring.vertex_count())
        .map(|_| rng.gen_range(1..=coloring.r))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionOutcome {
    pub label: String,
    pub witness: Option<ExtensionWitness>,
    pub valid: bool,
}

/// Witness search over `n_random` random extensions plus the adversarial
/// ones. Returns the certificate and the per-extension log.
pub fn verify_extension_property(
    coloring: &SemisatColoring,
    n_random: u64,
    seed: u64,
) -> (Certificate, Vec<ExtensionOutcome>) {
    let run = |label: String, ext: Extension| {
        let witness = find_witness(coloring, &ext, &label);
        let valid = witness
            .as_ref()
            .is_some_and(|w| witness_is_valid(coloring, &ext, w));
        ExtensionOutcome { label, witness, valid }
    };
    let mut outcomes: Vec<ExtensionOutcome> = adversarial_extensions(coloring)
        .into_iter()
        .map(|(label, ext)| run(label, ext))
        .collect();
    let adversarial = outcomes.len();
    outcomes.extend(
        (0..n_random)
            .into_par_iter()
            .map(|i| run(format!("random_{i}"), random_extension(coloring, seed, i)))
            .collect::<Vec<_>>(),
    );
    let failures: Vec<serde_json::Value> = outcomes
        .iter()
        .filter(|o| !o.valid)
        .map(|o| serde_json::json!({"extension": o.label, "witness": o.witness}))
        .collect();
    let record = CheckRecord::new(
        "semisat.extension_property",
        "every tested one-vertex extension creates a new monochromatic K_{k+1}",
        failures.is_empty(),
    )
    .tally("random_extensions", n_random)
    .tally("adversarial_extensions", adversarial)
    .tally("seed", seed)
    .tally("failures", failures.len());
    let record = if failures.is_empty() {
        record.witnesses_capped(
            outcomes[..adversarial]
                .iter()
                .map(|o| serde_json::to_value(&o.witness).expect("plain data")),
            adversarial,
        )
    } else {
        record.witnesses_capped(failures, 10)
    };
    (Certificate::from_iter([record]), outcomes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemisatBound {
    /// Target clique order.
    pub k: u32,
    pub r: u32,
    pub q: u64,
    /// `q²`, the size of the construction.
    pub n: u64,
    /// `4(k−2)²r²`.
    pub ceiling: u64,
}

/// Size of the construction forcing `K_k` with `r` colors, next to the
/// ceiling `4(k−2)²r²`.
pub fn semisat_upper_bound(k: u32, r: u32) -> Result<SemisatBound, SemisatError> {
    if k < 3 {
        return Err(SemisatError::Degenerate(format!(
            "k = {k}: the ceiling 4(k-2)^2 r^2 is 0 and the construction needs k >= 3"
        )));
    }
    if r < 2 {
        return Err(SemisatError::Degenerate("r must be at least 2".into()));
    }
    let lo = (k as u64 - 2) * r as u64;
    let q = smallest_prime_between(lo, 2 * lo).ok_or(SemisatError::NoPrime { lo, hi: 2 * lo })?;
    let d = (k as u64 - 2) * r as u64;
    Ok(SemisatBound {
        k,
        r,
        q,
        n: q * q,
        ceiling: 4 * d * d,
    })
}
