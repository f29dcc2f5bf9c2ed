//! Random refinement of the pencil: each unital of Λ gets its own block of
//! `c` colors and its points (minus `p_∞`) are colored uniformly at random
//! from that block.
//!
//! Unital `j` (the `j`-th member of Λ) owns colors `j·c .. (j+1)·c` and draws
//! from [`rng::substream`]`(seed, j)`, one `gen_range(0..c)` per point in
//! increasing point-id order.

use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::PointId;
use crate::pencil::PencilStructure;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ColoringError {
    #[error("need at least one color per unital")]
    NoColors,
    #[error("max_retries must be at least 1")]
    NoRetries,
    #[error("c too large for q (c = {c}, q = {q}); pass the relaxed-bounds flag to allow it")]
    CTooLarge { c: u32, q: u32 },
    #[error("no coloring within the size windows after {attempts} attempts (best had {} violations)", best.violation_count())]
    RetriesExhausted {
        attempts: u32,
        best: Box<ColoringQuality>,
    },
}

/// Assignment of colors to the points of P.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointColoring {
    pub seed: u64,
    /// Colors per unital.
    pub c: u32,
    /// Total colors `m = c·|Λ|`.
    pub colors: u32,
    /// Point id → color id. `p_∞` never appears.
    pub assignment: BTreeMap<PointId, u32>,
}

impl PointColoring {
    pub fn color_of(&self, p: PointId) -> Option<u32> {
        self.assignment.get(&p).copied()
    }

    /// The color class `P_i`, increasing.
    pub fn class(&self, color: u32) -> Vec<PointId> {
        self.assignment
            .iter()
            .filter(|&(_, &c)| c == color)
            .map(|(&p, _)| p)
            .collect()
    }
}

/// Samples a coloring of P with `c` fresh colors per unital.
pub fn sample_coloring(
    pencil: &PencilStructure,
    c: u32,
    seed: u64,
) -> Result<PointColoring, ColoringError> {
    if c == 0 {
        return Err(ColoringError::NoColors);
    }
    let blocks = pencil.lambda().len();
    let mut assignment = BTreeMap::new();
    for j in 0..blocks {
        let mut rng = rng::substream(seed, j as u64);
        let offset = j as u32 * c;
        for p in pencil.unital(j).iter().filter(|&p| p != pencil.p_inf()) {
            assignment.insert(p, offset + rng.gen_range(0..c));
        }
    }
    Ok(PointColoring {
        seed,
        c,
        colors: c * blocks as u32,
        assignment,
    })
}

/// A (line, color) pair whose intersection size is out of range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineCount {
    /// Vertex index in L.
    pub vertex: u32,
    pub line: u32,
    pub color: u32,
    pub count: u32,
}

/// Exact tallies behind the two size windows
/// `q³/2c ≤ |P_i| ≤ 2q³/c` and `q/2c ≤ |ℓ ∩ P_i| ≤ 2q/c` (ℓ ∈ L).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoringQuality {
    pub q: u32,
    pub c: u32,
    pub class_sizes: Vec<usize>,
    pub class_sizes_ok: bool,
    pub line_counts_ok: bool,
    /// Colors whose class size is outside its window.
    pub class_violations: Vec<u32>,
    pub line_violation_count: usize,
    /// The first few out-of-window (line, color) pairs.
    pub line_violations: Vec<LineCount>,
    /// Per color, the smallest and largest `|ℓ ∩ P_i|` over ℓ ∈ L.
    pub line_count_range: Vec<(u32, u32)>,
    /// Pairs whose verdict flips if `q` is replaced by `q + 1` in the line
    /// window (a line of L carries `q + 1` unital points, not `q`).
    pub near_boundary: Vec<LineCount>,
    #[serde(skip)]
    line_counts: Vec<Vec<u32>>,
}

const LISTED_VIOLATIONS: usize = 20;

impl ColoringQuality {
    pub fn passed(&self) -> bool {
        self.class_sizes_ok && self.line_counts_ok
    }

    pub fn violation_count(&self) -> usize {
        self.class_violations.len() + self.line_violation_count
    }

    /// `|ℓ ∩ P_color|` for the line with vertex index `vertex`.
    pub fn line_count(&self, vertex: usize, color: usize) -> u32 {
        self.line_counts[vertex][color]
    }
}

/// `lo/2c ≤ x ≤ 2·lo/c` in integers.
fn in_window(x: u64, scale: u64, c: u64) -> bool {
    2 * c * x >= scale && c * x <= 2 * scale
}

/// Recomputes both windows from the assignment.
pub fn check_quality(coloring: &PointColoring, pencil: &PencilStructure) -> ColoringQuality {
    let q = pencil.q() as u64;
    let c = coloring.c as u64;
    let m = coloring.colors as usize;
    let plane = pencil.plane();

    let mut class_sizes = vec![0usize; m];
    for &color in coloring.assignment.values() {
        class_sizes[color as usize] += 1;
    }
    let class_violations: Vec<u32> = (0..m as u32)
        .filter(|&i| !in_window(class_sizes[i as usize] as u64, q * q * q, c))
        .collect();

    let mut line_counts = Vec::with_capacity(pencil.common_secants().len());
    let mut line_violations = Vec::new();
    let mut line_violation_count = 0;
    let mut near_boundary = Vec::new();
    let mut range = vec![(u32::MAX, 0u32); m];
    for (vertex, &line) in pencil.common_secants().iter().enumerate() {
        let mut counts = vec![0u32; m];
        for &p in plane.points_on(line) {
            if let Some(color) = coloring.color_of(p) {
                counts[color as usize] += 1;
            }
        }
        for (color, &count) in counts.iter().enumerate() {
            let entry = LineCount {
                vertex: vertex as u32,
                line,
                color: color as u32,
                count,
            };
            let stated = in_window(count as u64, q, c);
            if !stated {
                line_violation_count += 1;
                if line_violations.len() < LISTED_VIOLATIONS {
                    line_violations.push(entry);
                }
            }
            if stated != in_window(count as u64, q + 1, c) {
                near_boundary.push(entry);
            }
            range[color].0 = range[color].0.min(count);
            range[color].1 = range[color].1.max(count);
        }
        line_counts.push(counts);
    }
    if pencil.common_secants().is_empty() {
        range.iter_mut().for_each(|r| *r = (0, 0));
    }

    ColoringQuality {
        q: q as u32,
        c: c as u32,
        class_sizes,
        class_sizes_ok: class_violations.is_empty(),
        line_counts_ok: line_violation_count == 0,
        class_violations,
        line_violation_count,
        line_violations,
        line_count_range: range,
        near_boundary,
        line_counts,
    }
}

/// Outcome of [`find_good_coloring`].
#[derive(Debug, Clone, PartialEq)]
pub struct ColoringSearch {
    pub coloring: PointColoring,
    pub quality: ColoringQuality,
    /// Samples drawn, including the accepted one.
    pub attempts: u32,
}

/// Samples with seeds `seed, seed+1, …` until both windows hold.
///
/// With `relaxed` set, `c > q` is allowed and, if no sample passes, the one
/// with the fewest violations is returned instead of an error.
pub fn find_good_coloring(
    pencil: &PencilStructure,
    c: u32,
    seed: u64,
    max_retries: u32,
    relaxed: bool,
) -> Result<ColoringSearch, ColoringError> {
    if max_retries == 0 {
        return Err(ColoringError::NoRetries);
    }
    if c > pencil.q() && !relaxed {
        return Err(ColoringError::CTooLarge { c, q: pencil.q() });
    }
    let mut best: Option<ColoringSearch> = None;
    for attempt in 0..max_retries {
        let coloring = sample_coloring(pencil, c, seed.wrapping_add(attempt as u64))?;
        let quality = check_quality(&coloring, pencil);
        let search = ColoringSearch {
            coloring,
            quality,
            attempts: attempt + 1,
        };
        if search.quality.passed() {
            return Ok(search);
        }
        let better = best
            .as_ref()
            .is_none_or(|b| search.quality.violation_count() < b.quality.violation_count());
        if better {
            best = Some(search);
        }
    }
    let mut best = best.expect("at least one attempt");
    if relaxed {
        best.attempts = max_retries;
        return Ok(best);
    }
    Err(ColoringError::RetriesExhausted {
        attempts: max_retries,
        best: Box::new(best.quality),
    })
}
