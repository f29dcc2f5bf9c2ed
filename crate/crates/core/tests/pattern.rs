use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unital::coloring::{sample_coloring, PointColoring};
use unital::pattern::io::{read_pattern_dir, write_pattern_dir};
use unital::pattern::{
    build_pattern, classify_all_cliques, classify_kplus1_clique, count_fans_through_edge,
    fan_count_within_bound, verify_pattern, PatternError, PatternSet,
};
use unital::pencil::{build_pencil, PencilStructure};

fn fixture(q: u64, c: u32, seed: u64) -> (PencilStructure, PointColoring, PatternSet) {
    let pencil = build_pencil(q, None).unwrap();
    let coloring = sample_coloring(&pencil, c, seed).unwrap();
    let pattern = build_pattern(&pencil, &coloring);
    (pencil, coloring, pattern)
}

#[test]
fn colors_are_edge_disjoint() {
    for (q, c) in [(3u64, 2u32), (5, 2), (5, 3)] {
        let (_, _, pattern) = fixture(q, c, 1);
        let n = pattern.vertex_count();
        for u in 0..n {
            for v in u + 1..n {
                let owners = pattern
                    .graphs
                    .iter()
                    .filter(|g| g.graph().has_edge(u, v))
                    .count();
                assert!(owners <= 1, "q={q} c={c} edge {u}-{v} in {owners} colors");
            }
        }
        assert!(verify_pattern(&pattern).get("pattern.edge_disjoint").unwrap().passed());
    }
}

#[test]
fn every_edge_is_in_exactly_one_point_clique() {
    let (_, _, pattern) = fixture(3, 1, 7);
    for g in &pattern.graphs {
        for (u, v) in g.graph().edges() {
            let holders = g
                .cliques()
                .iter()
                .filter(|k| k.members.contains(&(u as u32)) && k.members.contains(&(v as u32)))
                .count();
            assert_eq!(holders, 1);
        }
    }
}

/// Geometry oracle: the largest number of clique vertices whose lines pass
/// through one point of the color class.
fn max_concurrence(
    pencil: &PencilStructure,
    pattern: &PatternSet,
    class: &[u32],
    vertices: &[u32],
) -> usize {
    class
        .iter()
        .map(|&p| {
            vertices
                .iter()
                .filter(|&&v| pencil.plane().incident(p, pattern.vertex_lines[v as usize]))
                .count()
        })
        .max()
        .unwrap_or(0)
}

#[test]
fn every_k4_is_a_fan_or_degenerate() {
    let k = 3;
    for q in [2u64, 3] {
        for c in [1u32, 2] {
            for seed in 0..3 {
                let (pencil, coloring, pattern) = fixture(q, c, seed);
                for g in &pattern.graphs {
                    let census = classify_all_cliques(g, k).unwrap();
                    assert!(census.violations.is_empty(), "q={q} c={c} seed={seed}");
                    let class = coloring.class(g.color());
                    let (mut fans, mut degenerate) = (0, 0);
                    g.graph().for_each_clique(k + 1, |vs| {
                        let vs: Vec<u32> = vs.iter().map(|&v| v as u32).collect();
                        match max_concurrence(&pencil, &pattern, &class, &vs) {
                            4 => degenerate += 1,
                            3 => fans += 1,
                            m => panic!("q={q} c={c}: K_4 {vs:?} has concurrence {m}"),
                        }
                        false
                    });
                    assert_eq!((census.fans, census.degenerate), (fans, degenerate));
                }
            }
        }
    }
}

#[test]
fn classify_rejects_bad_input() {
    let (_, _, pattern) = fixture(3, 1, 7);
    let g = &pattern.graphs[0];
    assert_eq!(
        classify_kplus1_clique(g, &[0, 1, 2, 3], 2).unwrap_err(),
        PatternError::KTooSmall(2)
    );
    assert!(matches!(
        classify_kplus1_clique(g, &[0, 1, 2], 3),
        Err(PatternError::WrongSize { expected: 4, got: 3 })
    ));
    let non_edge = (1..pattern.vertex_count() as u32)
        .find(|&v| !g.graph().has_edge(0, v as usize))
        .unwrap();
    assert!(matches!(
        count_fans_through_edge(g, 0, non_edge, 3),
        Err(PatternError::MissingEdge(..))
    ));
}

/// Fans containing `uv`, by listing every K_{k+1} through the edge.
fn brute_force_fans(
    pencil: &PencilStructure,
    pattern: &PatternSet,
    class: &[u32],
    color: usize,
    (u, v): (usize, usize),
    k: usize,
) -> u64 {
    let g = pattern.graphs[color].graph();
    let common: Vec<usize> = (0..g.vertex_count())
        .filter(|&w| g.has_edge(u, w) && g.has_edge(v, w))
        .collect();
    let mut fans = 0;
    let mut pick = Vec::new();
    fn extend(
        start: usize,
        need: usize,
        common: &[usize],
        pick: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
        g: &unital::Graph,
    ) {
        if pick.len() == need {
            visit(pick);
            return;
        }
        for i in start..common.len() {
            let w = common[i];
            if pick.iter().all(|&x| g.has_edge(x, w)) {
                pick.push(w);
                extend(i + 1, need, common, pick, visit, g);
                pick.pop();
            }
        }
    }
    extend(0, k - 1, &common, &mut pick, &mut |rest| {
        let mut vs = vec![u as u32, v as u32];
        vs.extend(rest.iter().map(|&w| w as u32));
        if max_concurrence(pencil, pattern, class, &vs) == k {
            fans += 1;
        }
    }, g);
    fans
}

#[test]
fn fan_counts_match_brute_force_and_bound() {
    let (q, c, k) = (3u64, 1u32, 3usize);
    let (pencil, coloring, pattern) = fixture(q, c, 7);
    let g = &pattern.graphs[0];
    let edges: Vec<(usize, usize)> = g.graph().edges().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let class = coloring.class(0);
    for i in sample(&mut rng, edges.len(), 100) {
        let (u, v) = edges[i];
        let count = count_fans_through_edge(g, u as u32, v as u32, k).unwrap();
        let brute = brute_force_fans(&pencil, &pattern, &class, 0, (u, v), k);
        assert_eq!(count, brute, "edge {u}-{v}");
        assert!(fan_count_within_bound(count, q as u32, c, k), "edge {u}-{v}: {count}");
        assert!(count as f64 <= 2.0 * (2.0 * q as f64 / c as f64).powi(k as i32));
    }
}

#[test]
fn fan_bound_is_exact_at_the_edge() {
    // 2·(2·3/1)³ = 432
    assert!(fan_count_within_bound(432, 3, 1, 3));
    assert!(!fan_count_within_bound(433, 3, 1, 3));
    // 2·(10/3)³ = 74.07…
    assert!(fan_count_within_bound(74, 5, 3, 3));
    assert!(!fan_count_within_bound(75, 5, 3, 3));
}

fn scratch_dir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("unital-pattern-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn pattern_dir_round_trip() {
    let (_, _, pattern) = fixture(3, 2, 4);
    let dir = scratch_dir("roundtrip");
    let written = write_pattern_dir(&pattern, &dir).unwrap();
    assert_eq!(written.len(), 1 + 2 * pattern.graphs.len());
    let back = read_pattern_dir(&dir).unwrap();
    assert_eq!(back, pattern);
    for (a, b) in back.graphs.iter().zip(&pattern.graphs) {
        assert_eq!(a.content_hash(), b.content_hash());
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn tampered_edges_fail_verification() {
    let (_, _, pattern) = fixture(3, 1, 7);
    let dir = scratch_dir("tamper");
    write_pattern_dir(&pattern, &dir).unwrap();
    let path = dir.join("color_0.edges");
    let text = std::fs::read_to_string(&path).unwrap();
    let g = pattern.graphs[0].graph();
    let (u, v) = (0..g.vertex_count())
        .flat_map(|u| (u + 1..g.vertex_count()).map(move |v| (u, v)))
        .find(|&(u, v)| !g.has_edge(u, v))
        .unwrap();
    std::fs::write(&path, format!("{text}{u} {v}\n")).unwrap();
    let back = read_pattern_dir(&dir).unwrap();
    let cert = verify_pattern(&back);
    assert!(!cert.passed());
    assert!(!cert.get("pattern.clique_decomposition").unwrap().passed());
    assert_ne!(back.graphs[0].content_hash(), pattern.graphs[0].content_hash());
    std::fs::remove_dir_all(&dir).unwrap();
}
