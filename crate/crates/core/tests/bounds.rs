use proptest::prelude::*;
use unital::bounds::{
    half_sqrt_ceil, kfree_subset, lower_bound_table, subset_target, BoundsError, SubsetBranch,
};
use unital::coloring::sample_coloring;
use unital::graph::Graph;
use unital::pattern::build_pattern;
use unital::pencil::build_pencil;
use unital::sparsify::{scan_seeds, sparsify, SparsifyParams};

/// Any K_size among `within`, by backtracking.
fn has_clique_among(g: &Graph, within: &[usize], size: usize) -> bool {
    fn grow(g: &Graph, within: &[usize], chosen: &mut Vec<usize>, start: usize, size: usize) -> bool {
        if chosen.len() == size {
            return true;
        }
        for i in start..within.len() {
            let v = within[i];
            if chosen.iter().all(|&u| g.has_edge(u, v)) {
                chosen.push(v);
                if grow(g, within, chosen, i + 1, size) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    grow(g, within, &mut Vec::new(), 0, size)
}

fn assert_subset(g: &Graph, k: usize, seed: u64) -> SubsetBranch {
    let n = g.vertex_count();
    let s = kfree_subset(g, k, seed).unwrap();
    let target = ((k * n) as f64).sqrt() / 2.0;
    assert!(s.vertices.len() as f64 >= target.ceil(), "n={n} k={k}");
    assert_eq!(s.target, target.ceil() as usize);
    assert!(!has_clique_among(g, &s.vertices, k));
    s.branch
}

#[test]
fn turan_graphs() {
    for n in [50, 100, 200] {
        for k in [3, 4] {
            let g = Graph::turan(n, k);
            if n == 50 {
                assert!(!has_clique_among(&g, &(0..n).collect::<Vec<_>>(), k + 1));
            }
            let s = kfree_subset(&g, k, 0).unwrap();
            // oracle: a K_k-free vertex set of T(n, k) misses a whole part
            let mut parts: Vec<usize> = s.vertices.iter().map(|v| v % k).collect();
            parts.sort_unstable();
            parts.dedup();
            assert!(parts.len() < k);
            assert_subset(&g, k, 0);
        }
    }
}

#[test]
fn sparsified_pattern_fixture() {
    let pencil = build_pencil(3, None).unwrap();
    let coloring = sample_coloring(&pencil, 1, 7).unwrap();
    let base = build_pattern(&pencil, &coloring).graphs.remove(0);
    let seed = scan_seeds(&base, 3, 0.5, 0..50).unwrap().first_free.unwrap();
    let sparse = sparsify(&base, SparsifyParams::new(3, 0.5, seed).unwrap());
    assert_subset(&sparse.kept, 3, 0);
}

#[test]
fn rejects_graphs_with_big_cliques() {
    let g = Graph::turan(10, 4);
    assert!(matches!(kfree_subset(&g, 3, 0), Err(BoundsError::NotKFree { .. })));
    assert_eq!(kfree_subset(&g, 1, 0).unwrap_err(), BoundsError::K(1));
}

#[test]
fn edgeless_and_sampled_branches() {
    assert_eq!(assert_subset(&Graph::new(40), 3, 0), SubsetBranch::Edgeless);
    // disjoint triangles: max degree 2 is below the target of 11
    let n = 150;
    let g = Graph::from_edges(n, (0..n / 3).flat_map(|t| {
        let b = 3 * t;
        [(b, b + 1), (b + 1, b + 2), (b, b + 2)]
    }));
    assert!(matches!(assert_subset(&g, 3, 5), SubsetBranch::Sampled { .. }));
    assert_eq!(kfree_subset(&g, 3, 5).unwrap(), kfree_subset(&g, 3, 5).unwrap());
}

fn random_k_partite() -> impl Strategy<Value = (Graph, usize)> {
    (20usize..70, 2usize..5, any::<u64>(), 0.05f64..0.9).prop_map(|(n, k, seed, p)| {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let part: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if part[u] != part[v] && rng.gen_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        (g, k)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kfree_subset_postconditions((g, k) in random_k_partite(), seed in any::<u64>()) {
        let n = g.vertex_count();
        let s = kfree_subset(&g, k, seed).unwrap();
        prop_assert!(4 * s.vertices.len() * s.vertices.len() >= k * n);
        prop_assert!(!has_clique_among(&g, &s.vertices, k));
    }
}

#[test]
fn targets_are_smallest_integers() {
    for k in 2..8usize {
        for n in 0..500usize {
            let t = subset_target(k, n);
            assert!(4 * t * t >= k * n);
            assert!(t == 0 || 4 * (t - 1) * (t - 1) < k * n);
            assert_eq!(half_sqrt_ceil(k as u64, n as u64), t as u64);
        }
    }
}

#[test]
fn recursion_dominates_closed_form() {
    for k in 3..=20u64 {
        let table = lower_bound_table(k, 20).unwrap();
        assert_eq!(table.rows.len(), 19);
        let mut prev = None;
        for row in &table.rows {
            assert!(row.recursion_value >= row.closed_form, "k={k} r={}", row.r);
            if let Some(p) = prev {
                let x = row.recursion_value;
                if row.r >= 4 {
                    // least x with x ≥ p + ⌈½√(kx)⌉, by linear scan
                    let least = (p..).find(|&y| y >= p + half_sqrt_ceil(k, y)).unwrap();
                    assert_eq!(x, least, "k={k} r={}", row.r);
                }
                assert!(x >= p);
            }
            prev = Some(row.recursion_value);
        }
    }
}

#[test]
fn documented_table() {
    let t = lower_bound_table(4, 10).unwrap();
    let values: Vec<u64> = t.rows.iter().map(|r| r.recursion_value).collect();
    assert_eq!(values, vec![16, 16, 21, 27, 33, 40, 47, 55, 63]);
    assert_eq!(t.row(4).unwrap().closed_form, 4);
    assert!(t.to_csv().starts_with("r,closed_form,recursion_value\n2,1,16\n"));
    assert!(lower_bound_table(2, 10).is_err());
}
