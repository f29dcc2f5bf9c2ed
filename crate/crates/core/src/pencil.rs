//! The pencil of Hermitian unitals `U_λ` sharing the tangent `ℓ_∞ : Z = 0` at
//! `p_∞ = (0, 1, 0)`, restricted to an index set `Λ ⊆ GF(q)`.
//!
//! Two derived sets drive everything downstream: the colored point set
//! `P = ⋃_{λ∈Λ} U_λ \ {p_∞}` and the vertex set `L` of lines secant to every
//! `U_λ` with `λ ∈ Λ`.

use serde::Serialize;
use thiserror::Error;

use crate::certificate::{Certificate, CheckRecord};
use crate::field::{FieldElement, FiniteField};
use crate::geometry::{
    classify_line, unital_points, GeometryError, LineId, LineKind, PointId, PointSet,
    ProjectivePlane, UnitalForm,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PencilError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("lambda size must lie in 1..={q} (got {got})")]
    LambdaSize { q: u32, got: usize },
    #[error("lambda values must be distinct residues below {q} (got {got:?})")]
    LambdaValues { q: u32, got: Vec<u32> },
    #[error("pencil invariant violated: {0}")]
    Invariant(String),
}

/// The Λ-restricted pencil with its derived sets.
#[derive(Debug, Clone)]
pub struct PencilStructure {
    plane: ProjectivePlane,
    /// Λ as prime-field elements, in the order given.
    lambda: Vec<FieldElement>,
    /// `U_λ` for every `λ ∈ GF(q)`, indexed by residue.
    all_unitals: Vec<PointSet>,
    p_inf: PointId,
    ell_inf: LineId,
    points: PointSet,
    common_secants: Vec<LineId>,
    vertex_of_line: Vec<Option<u32>>,
    build_checks: Certificate,
}

/// Builds the pencil over PG(2, q²) with Λ the first `lambda_size` residues
/// (default `⌊q/2⌋`).
pub fn build_pencil(q: u64, lambda_size: Option<usize>) -> Result<PencilStructure, PencilError> {
    let plane = ProjectivePlane::new(q)?;
    let q = plane.q();
    let size = lambda_size.unwrap_or(q as usize / 2);
    if size == 0 || size > q as usize {
        return Err(PencilError::LambdaSize { q, got: size });
    }
    let residues: Vec<u32> = (0..size as u32).collect();
    PencilStructure::from_plane(plane, &residues)
}

/// Builds the pencil with an explicit, nonempty Λ given as residues.
pub fn build_pencil_with_lambda(q: u64, lambda: &[u32]) -> Result<PencilStructure, PencilError> {
    let plane = ProjectivePlane::new(q)?;
    PencilStructure::from_plane(plane, lambda)
}

/// `U_λ` for every `λ ∈ GF(q)`, indexed by residue.
pub fn full_pencil(plane: &ProjectivePlane) -> Result<Vec<PointSet>, GeometryError> {
    plane
        .field()
        .base()
        .enumerate()
        .into_iter()
        .map(|lambda| unital_points(plane, &UnitalForm::new(lambda)?))
        .collect()
}

/// Lines secant to every set in `unitals`, increasing. With no unitals every
/// line qualifies.
pub fn common_secants(
    plane: &ProjectivePlane,
    unitals: &[&PointSet],
) -> Result<Vec<LineId>, GeometryError> {
    let mut out = Vec::new();
    'lines: for line in 0..plane.line_count() as LineId {
        for u in unitals {
            if classify_line(plane, line, u)? != LineKind::Secant {
                continue 'lines;
            }
        }
        out.push(line);
    }
    Ok(out)
}

impl PencilStructure {
    fn from_plane(plane: ProjectivePlane, residues: &[u32]) -> Result<Self, PencilError> {
        let q = plane.q();
        let mut sorted = residues.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if residues.is_empty() {
            return Err(PencilError::LambdaSize { q, got: 0 });
        }
        if sorted.len() != residues.len() || sorted.iter().any(|&r| r >= q) {
            return Err(PencilError::LambdaValues {
                q,
                got: residues.to_vec(),
            });
        }
        let base = *plane.field().base();
        let lambda: Vec<FieldElement> = residues.iter().map(|&r| base.element(r as u64)).collect();
        let all_unitals = full_pencil(&plane)?;
        let p_inf = plane.point_at_infinity();
        let ell_inf = plane.line_at_infinity();

        let mut points = PointSet::empty(plane.point_count());
        for &r in residues {
            points.union_with(&all_unitals[r as usize]);
        }
        points.remove(p_inf);

        let chosen: Vec<&PointSet> = residues.iter().map(|&r| &all_unitals[r as usize]).collect();
        let common = common_secants(&plane, &chosen)?;
        let mut vertex_of_line = vec![None; plane.line_count()];
        for (i, &l) in common.iter().enumerate() {
            vertex_of_line[l as usize] = Some(i as u32);
        }

        let mut pencil = Self {
            plane,
            lambda,
            all_unitals,
            p_inf,
            ell_inf,
            points,
            common_secants: common,
            vertex_of_line,
            build_checks: Certificate::new(),
        };
        pencil.build_checks = pencil.invariant_checks();
        if let Some(bad) = pencil.build_checks.failures().next() {
            return Err(PencilError::Invariant(bad.check.clone()));
        }
        Ok(pencil)
    }

    fn invariant_checks(&self) -> Certificate {
        let q = self.q() as u64;
        let q3 = q * q * q;
        let q4 = q3 * q;
        let lam = self.lambda.len() as u64;
        let mut cert = Certificate::new();

        // Full pencil minus p_inf, plus the line at infinity, covers every point once.
        let mut cover = vec![0u32; self.plane.point_count()];
        for u in &self.all_unitals {
            for p in u.iter().filter(|&p| p != self.p_inf) {
                cover[p as usize] += 1;
            }
        }
        for &p in self.plane.points_on(self.ell_inf) {
            cover[p as usize] += 1;
        }
        let bad: Vec<u32> = (0..cover.len() as u32)
            .filter(|&p| cover[p as usize] != 1)
            .collect();
        cert.push(
            CheckRecord::new(
                "pencil.point_partition",
                "the unitals U_λ \\ {p_∞} over all λ ∈ GF(q), together with ℓ_∞, partition the points",
                bad.is_empty(),
            )
            .tally("points", cover.len())
            .witnesses_capped(bad.iter().map(|&p| p.into()), 10),
        );

        let mut pair_bad = Vec::new();
        for (i, a) in self.all_unitals.iter().enumerate() {
            for (j, b) in self.all_unitals.iter().enumerate().skip(i + 1) {
                let common: Vec<PointId> = a.iter().filter(|&p| b.contains(p)).collect();
                if common != [self.p_inf] {
                    pair_bad.push(serde_json::json!({"lambda": [i, j], "common": common}));
                }
            }
        }
        cert.push(
            CheckRecord::new(
                "pencil.pairwise_intersection",
                "any two unitals of the pencil meet exactly in p_∞",
                pair_bad.is_empty(),
            )
            .witnesses_capped(pair_bad, 10),
        );

        let p_size = self.points.len() as u64;
        cert.push(
            CheckRecord::new("pencil.p_size", "|P| = |Λ|·q³", p_size == lam * q3)
                .tally("observed", p_size)
                .tally("expected", lam * q3),
        );
        let l_size = self.common_secants.len() as u64;
        let expected_l = q4 + q * q - lam * q3;
        cert.push(
            CheckRecord::new(
                "pencil.common_secant_count",
                "|L| = q⁴ − |Λ|·q³ + q²",
                l_size == expected_l,
            )
            .tally("observed", l_size)
            .tally("expected", expected_l),
        );

        // Size windows; they only apply to the default |Λ| = ⌊q/2⌋.
        let in_window = 2 * p_size + 2 * q3 >= q4
            && 2 * p_size <= q4
            && 2 * l_size >= q4
            && l_size <= q4;
        let window = if lam == q / 2 {
            CheckRecord::new(
                "pencil.size_windows",
                "q⁴/2 − q³ ≤ |P| ≤ q⁴/2 and q⁴/2 ≤ |L| ≤ q⁴",
                in_window,
            )
        } else {
            CheckRecord::info(
                "pencil.size_windows",
                "q⁴/2 − q³ ≤ |P| ≤ q⁴/2 and q⁴/2 ≤ |L| ≤ q⁴ (applies to |Λ| = ⌊q/2⌋ only)",
            )
            .tally("holds", in_window)
        };
        cert.push(window.tally("p", p_size).tally("l", l_size));

        let mut secancy_bad = Vec::new();
        for &l in &self.common_secants {
            for &r in self.lambda_residues().iter() {
                let n = self.all_unitals[r as usize].intersection_len(self.plane.line_bits(l));
                if n != q as usize + 1 {
                    secancy_bad.push(serde_json::json!({"line": l, "lambda": r, "size": n}));
                }
            }
        }
        cert.push(
            CheckRecord::new(
                "pencil.common_secancy",
                "every line of L meets every U_λ, λ ∈ Λ, in exactly q+1 points",
                secancy_bad.is_empty(),
            )
            .witnesses_capped(secancy_bad, 10),
        );
        cert
    }

    pub fn plane(&self) -> &ProjectivePlane {
        &self.plane
    }

    pub fn q(&self) -> u32 {
        self.plane.q()
    }

    pub fn lambda(&self) -> &[FieldElement] {
        &self.lambda
    }

    pub fn lambda_residues(&self) -> Vec<u32> {
        self.lambda.iter().map(|l| l.c0()).collect()
    }

    /// `U_λ` for the `j`-th member of Λ.
    pub fn unital(&self, j: usize) -> &PointSet {
        &self.all_unitals[self.lambda[j].c0() as usize]
    }

    /// `U_λ` for every `λ ∈ GF(q)`, indexed by residue.
    pub fn all_unitals(&self) -> &[PointSet] {
        &self.all_unitals
    }

    pub fn p_inf(&self) -> PointId {
        self.p_inf
    }

    pub fn ell_inf(&self) -> LineId {
        self.ell_inf
    }

    /// The point set P.
    pub fn points(&self) -> &PointSet {
        &self.points
    }

    /// The vertex set L (line ids, increasing). Vertex `i` is `common_secants()[i]`.
    pub fn common_secants(&self) -> &[LineId] {
        &self.common_secants
    }

    /// Vertex index of a line, if it is in L.
    pub fn vertex_of(&self, line: LineId) -> Option<u32> {
        self.vertex_of_line[line as usize]
    }

    /// Invariant checks run when the pencil was built.
    pub fn build_checks(&self) -> &Certificate {
        &self.build_checks
    }

    pub fn summary(&self) -> PencilSummary {
        PencilSummary {
            q: self.q(),
            lambda: self.lambda_residues(),
            p_size: self.points.len(),
            l_size: self.common_secants.len(),
            unital_sizes: (0..self.lambda.len()).map(|j| self.unital(j).len()).collect(),
            checks: self.build_checks.clone(),
        }
    }
}

/// JSON dump of a built pencil.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PencilSummary {
    pub q: u32,
    pub lambda: Vec<u32>,
    pub p_size: usize,
    pub l_size: usize,
    pub unital_sizes: Vec<usize>,
    pub checks: Certificate,
}

/// Every line missing `p_∞` is tangent to exactly one unital of the full
/// pencil and secant to the other `q − 1`.
pub fn verify_tangency_partition(pencil: &PencilStructure) -> Certificate {
    let plane = pencil.plane();
    let q = pencil.q() as usize;
    let mut histogram = std::collections::BTreeMap::<String, usize>::new();
    let mut bad = Vec::new();
    let mut checked = 0usize;
    for line in 0..plane.line_count() as LineId {
        if plane.incident(pencil.p_inf(), line) {
            continue;
        }
        checked += 1;
        let (mut t, mut s, mut other) = (0usize, 0usize, 0usize);
        for u in pencil.all_unitals() {
            match classify_line(plane, line, u) {
                Ok(LineKind::Tangent) => t += 1,
                Ok(LineKind::Secant) => s += 1,
                Err(_) => other += 1,
            }
        }
        *histogram.entry(format!("({t},{s})")).or_default() += 1;
        if (t, s, other) != (1, q - 1, 0) {
            bad.push(serde_json::json!({"line": line, "tangent": t, "secant": s, "other": other}));
        }
    }
    let mut cert = Certificate::new();
    cert.push(
        CheckRecord::new(
            "pencil.tangency_partition",
            "every line not through p_∞ is tangent to exactly one U_λ and secant to the other q−1",
            bad.is_empty(),
        )
        .tally("lines_checked", checked)
        .tally("tally_histogram", histogram)
        .witnesses_capped(bad, 10),
    );
    cert
}
