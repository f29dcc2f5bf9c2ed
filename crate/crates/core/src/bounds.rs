//! Large `K_k`-free subsets of `K_{k+1}`-free graphs, and the lower-bound
//! recursion `P_r(k) ≥ P_{r−1}(k) + ⌈½√(k·P_r(k))⌉` with its closed form
//! `kr²/16`.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{bitset_of, Graph};
use crate::rng;

/// Sampling attempts before [`kfree_subset`] gives up.
pub const MAX_ATTEMPTS: u32 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("k must be at least 2 (got {0})")]
    K(usize),
    #[error("graph contains K_{}: {clique:?}", clique.len())]
    NotKFree { clique: Vec<usize> },
    #[error("no K_k-free set of size {target} after {attempts} attempts (largest found: {best})")]
    AttemptsExhausted { target: usize, attempts: u32, best: usize },
    #[error("returned set fails verification: {0}")]
    Verification(String),
    #[error("table needs k >= 3 and r_max >= 3 (got k = {k}, r_max = {r_max})")]
    Table { k: u64, r_max: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetBranch {
    /// No edges: any vertices do.
    Edgeless,
    /// Neighborhood of a vertex of large degree.
    Neighborhood { vertex: usize, degree: usize },
    /// Random sample with one vertex removed per surviving `K_k`.
    Sampled { attempt: u32, probability: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KFreeSubset {
    pub vertices: Vec<usize>,
    /// `⌈½√(kn)⌉`.
    pub target: usize,
    pub branch: SubsetBranch,
}

/// Smallest `t` with `t ≥ ½√(kn)`, i.e. `4t² ≥ kn`.
pub fn subset_target(k: usize, n: usize) -> usize {
    let kn = (k * n) as u128;
    let mut t = ((kn as f64).sqrt() / 2.0).floor() as u128;
    while 4 * t * t < kn {
        t += 1;
    }
    while t > 0 && 4 * (t - 1) * (t - 1) >= kn {
        t -= 1;
    }
    t as usize
}

/// A vertex set of size at least `⌈½√(kn)⌉` inducing no `K_k` in a
/// `K_{k+1}`-free graph.
///
/// If some vertex has degree at least the target its neighborhood is
/// returned. Otherwise each attempt samples vertices with probability
/// `(k−1)/d` (`d` the maximum degree) from substream `attempt` of `seed` and
/// deletes the largest vertex of each remaining `K_k`. Attempts run in
/// parallel; the lowest successful attempt index wins. The result is checked
/// by a separate exhaustive `K_k` enumeration before it is returned.
pub fn kfree_subset(graph: &Graph, k: usize, seed: u64) -> Result<KFreeSubset, BoundsError> {
    if k < 2 {
        return Err(BoundsError::K(k));
    }
    if let Some(clique) = graph.find_clique(k + 1) {
        return Err(BoundsError::NotKFree { clique });
    }
    let n = graph.vertex_count();
    let target = subset_target(k, n);
    let result = match graph.max_degree() {
        None | Some((_, 0)) => KFreeSubset {
            vertices: (0..target.min(n)).collect(),
            target,
            branch: SubsetBranch::Edgeless,
        },
        Some((vertex, degree)) if degree >= target => KFreeSubset {
            vertices: graph.neighbors(vertex).ones().collect(),
            target,
            branch: SubsetBranch::Neighborhood { vertex, degree },
        },
        Some((_, degree)) => {
            let p = ((k - 1) as f64 / degree as f64).min(1.0);
            let attempts: Vec<Vec<usize>> = (0..MAX_ATTEMPTS)
                .into_par_iter()
                .map(|a| sample_attempt(graph, k, p, seed, a))
                .collect();
            match attempts.iter().position(|s| s.len() >= target) {
                Some(a) => KFreeSubset {
                    vertices: attempts[a].clone(),
                    target,
                    branch: SubsetBranch::Sampled {
                        attempt: a as u32,
                        probability: p,
                    },
                },
                None => {
                    return Err(BoundsError::AttemptsExhausted {
                        target,
                        attempts: MAX_ATTEMPTS,
                        best: attempts.iter().map(Vec::len).max().unwrap_or(0),
                    })
                }
            }
        }
    };
    verify_kfree(graph, k, &result.vertices, target)?;
    Ok(result)
}

fn sample_attempt(graph: &Graph, k: usize, p: f64, seed: u64, attempt: u32) -> Vec<usize> {
    let n = graph.vertex_count();
    let mut rng = rng::substream(seed, attempt as u64);
    let mut set = bitset_of(n, (0..n).filter(|_| rng.gen_bool(p)));
    while let Some(clique) = graph.find_clique_in(k, &set) {
        let last = *clique.iter().max().expect("k >= 2");
        set.set(last, false);
    }
    set.ones().collect()
}

/// Size and `K_k`-freeness of `vertices`, the latter by enumerating every
/// `k`-subset that is a clique.
pub fn verify_kfree(graph: &Graph, k: usize, vertices: &[usize], target: usize) -> Result<(), BoundsError> {
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != vertices.len() || sorted.iter().any(|&v| v >= graph.vertex_count()) {
        return Err(BoundsError::Verification("vertex list invalid".into()));
    }
    if sorted.len() < target {
        return Err(BoundsError::Verification(format!(
            "size {} below target {target}",
            sorted.len()
        )));
    }
    let mut found = None;
    graph.for_each_clique_in(k, &bitset_of(graph.vertex_count(), sorted), |c| {
        found = Some(c.to_vec());
        true
    });
    match found {
        Some(c) => Err(BoundsError::Verification(format!("contains K_{k}: {c:?}"))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRow {
    pub r: u64,
    /// `⌈kr²/16⌉`.
    pub closed_form: u64,
    /// Smallest value allowed by the recursion from `P_2(k) = k²`.
    pub recursion_value: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundTable {
    pub k: u64,
    pub rows: Vec<BoundRow>,
}

impl BoundTable {
    /// `r,closed_form,recursion_value` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,closed_form,recursion_value\n");
        for row in &self.rows {
            out.push_str(&format!("{},{},{}\n", row.r, row.closed_form, row.recursion_value));
        }
        out
    }

    pub fn row(&self, r: u64) -> Option<&BoundRow> {
        self.rows.iter().find(|row| row.r == r)
    }
}

/// `⌈√x⌉` for integers.
fn ceil_sqrt(x: u64) -> u64 {
    let mut s = (x as f64).sqrt() as u64;
    while s * s > x {
        s -= 1;
    }
    while s * s < x {
        s += 1;
    }
    s
}

/// `⌈½√(kx)⌉`, i.e. `⌈√(kx)/2⌉`: the smallest `t` with `4t² ≥ kx`.
pub fn half_sqrt_ceil(k: u64, x: u64) -> u64 {
    let t = ceil_sqrt(k * x);
    // ⌈s/2⌉ where s = √(kx) may be irrational; 4t² ≥ kx ⇔ 2t ≥ √(kx)
    let mut h = t.div_ceil(2);
    while h > 0 && 4 * (h - 1) * (h - 1) >= k * x {
        h -= 1;
    }
    h
}

/// Least `x` with `x − ⌈½√(kx)⌉ ≥ prev`.
///
/// The left side is nondecreasing in `x`, so the answer sits at or just
/// above the real root of `y² − (√k/2)·y − prev = 0` in `y = √x`.
pub fn recursion_step(k: u64, prev: u64) -> u64 {
    let kf = k as f64;
    let y = kf.sqrt() / 4.0 + (kf / 16.0 + prev as f64).sqrt();
    let mut x = (y * y).floor() as u64;
    x = x.saturating_sub(2).max(prev);
    while x < prev + half_sqrt_ceil(k, x) {
        x += 1;
    }
    x
}

/// Rows `r = 2..=r_max`: the base `P_2(k) = k²`, `P_3(k) ≥ P_2(k)`, and the
/// recursion for `r ≥ 4`, next to `⌈kr²/16⌉`.
pub fn lower_bound_table(k: u64, r_max: u64) -> Result<BoundTable, BoundsError> {
    if k < 3 || r_max < 3 {
        return Err(BoundsError::Table { k, r_max });
    }
    let mut rows = Vec::new();
    let mut prev = k * k;
    for r in 2..=r_max {
        let value = if r <= 3 { k * k } else { recursion_step(k, prev) };
        rows.push(BoundRow {
            r,
            closed_form: (k * r * r).div_ceil(16),
            recursion_value: value,
        });
        prev = value;
    }
    Ok(BoundTable { k, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn targets() {
        assert_eq!(subset_target(3, 50), 7);
        assert_eq!(subset_target(4, 100), 10);
        assert_eq!(subset_target(4, 0), 0);
        assert_eq!(half_sqrt_ceil(4, 100), 10);
        assert_eq!(half_sqrt_ceil(3, 50), 7);
    }

    #[test]
    fn recursion_minimal() {
        for k in 3..=20u64 {
            for prev in [0u64, 1, 9, 16, 100, 12345] {
                let x = recursion_step(k, prev);
                assert!(x >= prev + half_sqrt_ceil(k, x));
                assert!(x == 0 || x - 1 < prev + half_sqrt_ceil(k, x - 1));
            }
        }
    }

    #[test]
    fn table_examples() {
        let t = lower_bound_table(3, 5).unwrap();
        let r3 = t.row(3).unwrap();
        assert_eq!((r3.closed_form, r3.recursion_value), (2, 9));
        let t = lower_bound_table(4, 4).unwrap();
        assert_eq!(t.row(4).unwrap().closed_form, 4);
        assert_eq!(t.row(4).unwrap().recursion_value, 21);
        assert!(t.to_csv().starts_with("r,closed_form,recursion_value\n2,"));
        assert!(lower_bound_table(2, 5).is_err());
    }

    #[test]
    fn rejects_dense_input() {
        let g = Graph::turan(12, 4);
        assert!(matches!(kfree_subset(&g, 3, 0), Err(BoundsError::NotKFree { .. })));
    }

    #[test]
    fn edgeless() {
        let g = Graph::new(30);
        let s = kfree_subset(&g, 3, 0).unwrap();
        assert_eq!(s.branch, SubsetBranch::Edgeless);
        assert_eq!(s.vertices.len(), subset_target(3, 30));
    }

    #[test]
    fn sampling_branch() {
        // disjoint triangles: max degree 2 below the target, so sampling runs
        let n = 60;
        let g = Graph::from_edges(n, (0..n / 3).flat_map(|t| {
            let b = 3 * t;
            [(b, b + 1), (b + 1, b + 2), (b, b + 2)]
        }));
        let s = kfree_subset(&g, 3, 5).unwrap();
        assert!(matches!(s.branch, SubsetBranch::Sampled { .. }));
        assert!(s.vertices.len() >= s.target);
    }
}
