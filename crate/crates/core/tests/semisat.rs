use unital::semisat::{
    build_semisat, find_witness, random_extension, semisat_upper_bound, verify_extension_property,
    verify_structure, witness_is_valid, SemisatColoring, SemisatError,
};

fn xy(c: &SemisatColoring, v: u32) -> (i64, i64) {
    let (x, y) = c.plane().coords(v);
    (x as i64, y as i64)
}

fn collinear(q: i64, a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> bool {
    ((b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)).rem_euclid(q) == 0
}

#[test]
fn classes_are_parallel_lines_of_one_color() {
    let c = build_semisat(3, 2, Some(5)).unwrap();
    let q = c.q() as i64;
    let n = c.vertex_count() as u32;
    let mut covered = vec![vec![0u32; n as usize]; n as usize];
    for (class, lines) in c.plane().parallel_classes().iter().enumerate() {
        let color = c.class_color(class);
        assert!((1..=c.r).contains(&color));
        for line in lines {
            assert_eq!(line.len(), 5);
            for (i, &a) in line.iter().enumerate() {
                for &b in &line[i + 1..] {
                    assert!(line.iter().all(|&p| collinear(q, xy(&c, a), xy(&c, b), xy(&c, p))));
                    assert_eq!(c.color(a, b), Some(color));
                    covered[a as usize][b as usize] += 1;
                }
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            assert_eq!(covered[a as usize][b as usize], 1, "pair {a} {b}");
        }
    }
    assert!(verify_structure(&c).passed());
}

/// Does color `color` contain a K_k on vertices the extension also paints
/// `color`? Plain search over the edge coloring.
fn monochromatic_kk(c: &SemisatColoring, ext: &[u32], color: u32) -> bool {
    let k = c.k as usize;
    let cand: Vec<u32> = (0..c.vertex_count() as u32)
        .filter(|&v| ext[v as usize] == color)
        .collect();
    fn grow(c: &SemisatColoring, cand: &[u32], chosen: &mut Vec<u32>, start: usize, k: usize, color: u32) -> bool {
        if chosen.len() == k {
            return true;
        }
        for i in start..cand.len() {
            let v = cand[i];
            if chosen.iter().all(|&u| c.color(u, v) == Some(color)) {
                chosen.push(v);
                if grow(c, cand, chosen, i + 1, k, color) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    grow(c, &cand, &mut Vec::new(), 0, k, color)
}

#[test]
fn extensions_always_create_a_clique() {
    let c = build_semisat(3, 2, Some(5)).unwrap();
    let (cert, outcomes) = verify_extension_property(&c, 10_000, 0);
    assert!(cert.passed());
    assert_eq!(outcomes.len(), 10_003);
    for (i, o) in outcomes.iter().enumerate().skip(3).step_by(50) {
        let ext = random_extension(&c, 0, i as u64 - 3);
        let w = o.witness.as_ref().unwrap();
        assert!(witness_is_valid(&c, &ext, w));
        assert!(monochromatic_kk(&c, &ext, w.color));
    }
}

#[test]
fn exhaustive_extensions_small_case() {
    // K_3 forced with two colors on AG(2, 3): every one of the 2⁹ extensions
    let c = build_semisat(2, 2, None).unwrap();
    assert_eq!(c.q(), 3);
    for mask in 0u32..1 << 9 {
        let ext: Vec<u32> = (0..9).map(|v| (mask >> v & 1) + 1).collect();
        let w = find_witness(&c, &ext, "mask").unwrap_or_else(|| panic!("mask {mask:09b}"));
        assert!(witness_is_valid(&c, &ext, &w));
        assert!(monochromatic_kk(&c, &ext, w.color));
    }
}

#[test]
fn forged_witness_is_rejected() {
    let c = build_semisat(3, 2, Some(5)).unwrap();
    let ext = random_extension(&c, 1, 0);
    let mut w = find_witness(&c, &ext, "x").unwrap();
    w.color = 3 - w.color;
    assert!(!witness_is_valid(&c, &ext, &w));
}

#[test]
fn upper_bound_is_below_ceiling() {
    for k in 3..=10 {
        for r in 2..=10 {
            let b = semisat_upper_bound(k, r).unwrap();
            let d = (k as u64 - 2) * r as u64;
            assert!(d < b.q && b.q < 2 * d, "k={k} r={r}");
            assert!(b.n < b.ceiling, "k={k} r={r}: {} vs {}", b.n, b.ceiling);
        }
    }
    let b = semisat_upper_bound(4, 3).unwrap();
    assert_eq!((b.q, b.n, b.ceiling), (7, 49, 144));
    assert!(matches!(semisat_upper_bound(2, 3), Err(SemisatError::Degenerate(_))));
}

#[test]
fn export_lists_every_pair() {
    let c = build_semisat(3, 2, Some(5)).unwrap();
    let text = c.export_text();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("25 2"));
    let rows: Vec<(u32, u32, u32)> = lines
        .map(|l| {
            let f: Vec<u32> = l.split(' ').map(|s| s.parse().unwrap()).collect();
            (f[0], f[1], f[2])
        })
        .collect();
    assert_eq!(rows.len(), 300);
    for (u, v, col) in rows {
        assert!(u < v);
        assert_eq!(c.color(u, v), Some(col));
    }
}

#[test]
fn too_many_colors() {
    assert!(matches!(
        build_semisat(3, 7, Some(5)),
        Err(SemisatError::TooManyColors { r: 7, q: 5 })
    ));
    assert!(build_semisat(1, 2, None).is_err());
}
