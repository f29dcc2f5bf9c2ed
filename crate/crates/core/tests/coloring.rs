use unital::coloring::{check_quality, find_good_coloring, sample_coloring, ColoringError};
use unital::pencil::{build_pencil, PencilStructure};

fn fixture(q: u64, lambda: usize) -> PencilStructure {
    build_pencil(q, Some(lambda)).unwrap()
}

#[test]
fn every_point_gets_one_color_from_its_block() {
    for (q, lambda, c) in [(3u64, 1usize, 1u32), (3, 1, 2), (5, 2, 2), (5, 2, 3)] {
        let pencil = fixture(q, lambda);
        let coloring = sample_coloring(&pencil, c, 11).unwrap();
        assert_eq!(coloring.colors, c * lambda as u32);
        assert_eq!(coloring.assignment.len(), pencil.points().len());
        assert!(coloring.color_of(pencil.p_inf()).is_none());
        for j in 0..lambda {
            for p in pencil.unital(j).iter().filter(|&p| p != pencil.p_inf()) {
                let color = coloring.color_of(p).unwrap();
                assert_eq!(color / c, j as u32, "q={q} p={p}");
            }
        }
        let total: usize = (0..coloring.colors).map(|i| coloring.class(i).len()).sum();
        assert_eq!(total, pencil.points().len());
    }
}

#[test]
fn same_seed_same_coloring() {
    let pencil = fixture(5, 2);
    assert_eq!(
        sample_coloring(&pencil, 2, 3).unwrap(),
        sample_coloring(&pencil, 2, 3).unwrap()
    );
    assert_ne!(
        sample_coloring(&pencil, 2, 3).unwrap(),
        sample_coloring(&pencil, 2, 4).unwrap()
    );
}

#[test]
fn quality_tallies_match_a_direct_count() {
    let pencil = fixture(5, 2);
    let coloring = sample_coloring(&pencil, 2, 5).unwrap();
    let quality = check_quality(&coloring, &pencil);
    let (q, c) = (5.0f64, 2.0f64);
    for i in 0..coloring.colors {
        let size = coloring.class(i).len();
        assert_eq!(quality.class_sizes[i as usize], size);
    }
    let mut violations = 0;
    for (v, &line) in pencil.common_secants().iter().enumerate() {
        let bits = pencil.plane().line_bits(line);
        for i in 0..coloring.colors {
            let count = coloring.class(i).iter().filter(|&&p| bits[p as usize]).count();
            assert_eq!(quality.line_count(v, i as usize) as usize, count);
            let x = count as f64;
            if x < q / (2.0 * c) || x > 2.0 * q / c {
                violations += 1;
            }
        }
    }
    assert_eq!(quality.line_violation_count, violations);
    assert_eq!(quality.line_counts_ok, violations == 0);
}

#[test]
fn one_color_per_unital_is_always_good() {
    for q in [3u64, 5] {
        let pencil = fixture(q, (q / 2) as usize);
        let search = find_good_coloring(&pencil, 1, 0, 1, false).unwrap();
        assert_eq!(search.attempts, 1);
        assert!(search.quality.passed());
    }
}

#[test]
fn c_above_q_needs_relaxed() {
    let pencil = fixture(3, 1);
    assert_eq!(
        find_good_coloring(&pencil, 4, 0, 5, false).unwrap_err(),
        ColoringError::CTooLarge { c: 4, q: 3 }
    );
    let best = find_good_coloring(&pencil, 4, 0, 5, true).unwrap();
    assert_eq!(best.attempts, 5);
    assert!(!best.quality.passed());
}

/// Backtracking search for a 2-coloring of `P` with no monochromatic line of
/// L. At q = 3, c = 2 the line window is [0.75, 3], so such a coloring is
/// exactly what a quality coloring needs.
fn two_colorable(pencil: &PencilStructure) -> (bool, u64) {
    let points: Vec<u32> = pencil.points().iter().collect();
    let index = |p: u32| points.iter().position(|&x| x == p);
    let lines: Vec<Vec<usize>> = pencil
        .common_secants()
        .iter()
        .map(|&l| pencil.plane().points_on(l).iter().filter_map(|&p| index(p)).collect())
        .collect();
    let mut by_point = vec![Vec::new(); points.len()];
    for (i, line) in lines.iter().enumerate() {
        for &p in line {
            by_point[p].push(i);
        }
    }

    fn search(
        i: usize,
        colors: &mut [Option<u8>],
        lines: &[Vec<usize>],
        by_point: &[Vec<usize>],
        nodes: &mut u64,
    ) -> bool {
        *nodes += 1;
        if i == colors.len() {
            return true;
        }
        // symmetry: the first point takes color 0
        let options: &[u8] = if i == 0 { &[0] } else { &[0, 1] };
        for &c in options {
            colors[i] = Some(c);
            let monochromatic = by_point[i].iter().any(|&l| {
                lines[l].iter().all(|&p| colors[p] == Some(c))
            });
            if !monochromatic && search(i + 1, colors, lines, by_point, nodes) {
                return true;
            }
        }
        colors[i] = None;
        false
    }

    let mut colors = vec![None; points.len()];
    let mut nodes = 0;
    let found = search(0, &mut colors, &lines, &by_point, &mut nodes);
    (found, nodes)
}

#[test]
fn q3_two_colors_has_no_quality_coloring() {
    let pencil = fixture(3, 1);
    let (found, nodes) = two_colorable(&pencil);
    assert!(!found, "a proper 2-coloring exists after {nodes} nodes");
    match find_good_coloring(&pencil, 2, 0, 200, false) {
        Err(ColoringError::RetriesExhausted { attempts, best }) => {
            assert_eq!(attempts, 200);
            assert!(best.line_violation_count > 0);
            assert!(best.class_sizes_ok);
        }
        other => panic!("expected exhaustion, got {other:?}"),
    }
}

#[test]
fn q5_two_colors_sample_rate() {
    let pencil = fixture(5, 2);
    let passed = (0..200)
        .filter(|&s| check_quality(&sample_coloring(&pencil, 2, s).unwrap(), &pencil).passed())
        .count();
    // A line of L off p_∞ has 6 points in each unital, so a (line, color)
    // pair misses the [1.25, 5] window with probability
    // P(Bin(6, 1/2) ∈ {0, 1, 6}) = 8/64. Through p_∞ it is 6/32. Either way
    // the union bound over 4·400 pairs exceeds 1 and promises nothing.
    let per_pair = 8.0 / 64.0;
    let union_bound = 4.0 * 400.0 * per_pair;
    assert!(union_bound > 1.0);
    assert_eq!(passed, 0);
}
