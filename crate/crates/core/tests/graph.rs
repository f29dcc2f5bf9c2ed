use proptest::prelude::*;
use unital::graph::{bitset_of, Graph};

fn random_graph() -> impl Strategy<Value = Graph> {
    (1usize..18).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            Graph::from_edges(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e))
        })
    })
}

fn clique_number(g: &Graph) -> usize {
    let n = g.vertex_count();
    (0u32..1 << n)
        .filter(|&mask| {
            let vs: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            g.is_clique(&vs)
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #[test]
    fn clique_search_matches_subset_scan(g in random_graph(), size in 1usize..7) {
        let omega = clique_number(&g);
        let found = g.find_clique(size);
        prop_assert_eq!(found.is_some(), size <= omega);
        if let Some(c) = found {
            prop_assert_eq!(c.len(), size);
            prop_assert!(g.is_clique(&c));
        }
    }

    #[test]
    fn clique_counts_match_subset_scan(g in random_graph(), size in 1usize..6) {
        let n = g.vertex_count();
        let mut brute = 0;
        for mask in 0u32..1 << n {
            if mask.count_ones() as usize == size {
                let vs: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
                if g.is_clique(&vs) {
                    brute += 1;
                }
            }
        }
        prop_assert_eq!(g.count_cliques(size), brute);
    }

    #[test]
    fn maximal_cliques_are_maximal(g in random_graph()) {
        let n = g.vertex_count();
        let mut seen = 0;
        g.maximal_cliques(1, |c| {
            seen += 1;
            assert!(g.is_clique(c));
            assert!((0..n).all(|v| c.contains(&v) || !c.iter().all(|&u| g.has_edge(u, v))));
            false
        });
        prop_assert!(seen >= 1);
    }
}

#[test]
fn turan_structure() {
    let g = Graph::turan(12, 3);
    assert_eq!(g.edge_count(), 48);
    assert_eq!(g.count_cliques(3), 64);
    assert!(g.find_clique(4).is_none());
    let complete = Graph::turan(6, 6);
    assert_eq!(complete.count_cliques(4), binomial(6, 4));
    let within = bitset_of(12, [0, 1, 3, 4]);
    assert!(g.find_clique_in(3, &within).is_none());
    assert_eq!(g.find_clique_in(2, &within).map(|c| c.len()), Some(2));
}
