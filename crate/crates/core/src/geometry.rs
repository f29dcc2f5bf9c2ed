//! The projective plane PG(2, q²), Hermitian unitals inside it, and the affine
//! plane AG(2, q).
//!
//! Points and lines are normalized homogeneous triples (first nonzero
//! coordinate equal to 1). Ids are ranks in lexicographic order of the
//! normalized triple, compared coordinate-wise by canonical field index, so
//! `(0,0,1)` is point 0 and `(0,1,0)` is point 1. Lines use the same scheme
//! on their dual coordinates `[a, b, c]` (meaning `aX + bY + cZ = 0`); the
//! line `Z = 0` is line 0.

use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::field::{FieldElement, FieldError, FiniteField, PrimeField, QuadExtField};

pub type PointId = u32;
pub type LineId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("not a unital: line {line} meets the point set in {size} points")]
    NotAUnital { line: LineId, size: usize },
    #[error("not pairwise intersecting in U: {0}")]
    NotPairwiseIntersecting(String),
    #[error("concurrence check needs k >= 3 and exactly k secants (k = {k}, got {got})")]
    FamilySize { k: usize, got: usize },
    #[error("no unital point lies on {needed} of the given secants; best was {best}")]
    NoConcurrencePoint { needed: usize, best: usize },
}

/// A point of PG(2, q²).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    pub id: PointId,
    pub coords: [FieldElement; 3],
}

/// A line of PG(2, q²) given by normalized dual coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProjLine {
    pub id: LineId,
    pub coeffs: [FieldElement; 3],
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.coords;
        write!(f, "({x}, {y}, {z})")
    }
}

impl fmt::Display for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.coeffs;
        write!(f, "[{a}, {b}, {c}]")
    }
}

/// A set of points of a fixed plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    bits: FixedBitSet,
}

impl PointSet {
    pub fn empty(point_count: usize) -> Self {
        Self {
            bits: FixedBitSet::with_capacity(point_count),
        }
    }

    pub fn from_ids(point_count: usize, ids: impl IntoIterator<Item = PointId>) -> Self {
        let mut s = Self::empty(point_count);
        for id in ids {
            s.insert(id);
        }
        s
    }

    pub fn insert(&mut self, id: PointId) {
        self.bits.insert(id as usize);
    }

    pub fn remove(&mut self, id: PointId) {
        self.bits.set(id as usize, false);
    }

    pub fn contains(&self, id: PointId) -> bool {
        self.bits.contains(id as usize)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Members in increasing id order.
    pub fn iter(&self) -> impl Iterator<Item = PointId> + '_ {
        self.bits.ones().map(|i| i as PointId)
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn intersection_len(&self, other: &FixedBitSet) -> usize {
        self.bits.intersection_count(other)
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub fn union_with(&mut self, other: &PointSet) {
        self.bits.union_with(&other.bits);
    }
}

/// The desarguesian plane PG(2, q²) with full incidence tables.
#[derive(Debug, Clone)]
pub struct ProjectivePlane {
    q: u32,
    field: QuadExtField,
    points: Vec<ProjPoint>,
    lines: Vec<ProjLine>,
    line_points: Vec<Vec<PointId>>,
    line_bits: Vec<FixedBitSet>,
    point_lines: Vec<Vec<LineId>>,
}

impl ProjectivePlane {
    /// Builds PG(2, q²) for prime `q`.
    pub fn new(q: u64) -> Result<Self, GeometryError> {
        let field = QuadExtField::new(q)?;
        let q = field.characteristic();
        let triples = normalized_triples(&field);
        let points: Vec<ProjPoint> = triples
            .iter()
            .enumerate()
            .map(|(id, &coords)| ProjPoint {
                id: id as PointId,
                coords,
            })
            .collect();
        let lines: Vec<ProjLine> = triples
            .iter()
            .enumerate()
            .map(|(id, &coeffs)| ProjLine {
                id: id as LineId,
                coeffs,
            })
            .collect();

        let n = points.len();
        let mut line_points = vec![Vec::new(); n];
        let mut line_bits = vec![FixedBitSet::with_capacity(n); n];
        let mut point_lines = vec![Vec::new(); n];
        for line in &lines {
            for point in &points {
                if dot(&field, &line.coeffs, &point.coords)?.is_zero() {
                    line_points[line.id as usize].push(point.id);
                    line_bits[line.id as usize].insert(point.id as usize);
                    point_lines[point.id as usize].push(line.id);
                }
            }
        }
        Ok(Self {
            q,
            field,
            points,
            lines,
            line_points,
            line_bits,
            point_lines,
        })
    }

    /// The prime `q` (the plane is over GF(q²)).
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn field(&self) -> &QuadExtField {
        &self.field
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn lines(&self) -> &[ProjLine] {
        &self.lines
    }

    pub fn point(&self, id: PointId) -> &ProjPoint {
        &self.points[id as usize]
    }

    pub fn line(&self, id: LineId) -> &ProjLine {
        &self.lines[id as usize]
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    /// Points on `line`, increasing.
    pub fn points_on(&self, line: LineId) -> &[PointId] {
        &self.line_points[line as usize]
    }

    /// Lines through `point`, increasing.
    pub fn lines_through(&self, point: PointId) -> &[LineId] {
        &self.point_lines[point as usize]
    }

    pub fn line_bits(&self, line: LineId) -> &FixedBitSet {
        &self.line_bits[line as usize]
    }

    pub fn incident(&self, point: PointId, line: LineId) -> bool {
        self.line_bits[line as usize].contains(point as usize)
    }

    /// Id of the point with the given (not necessarily normalized) coordinates.
    pub fn point_id(&self, coords: [FieldElement; 3]) -> Option<PointId> {
        let normalized = normalize(&self.field, coords).ok()??;
        Some(rank(&normalized, self.q))
    }

    /// Id of the line with the given dual coordinates.
    pub fn line_id(&self, coeffs: [FieldElement; 3]) -> Option<LineId> {
        self.point_id(coeffs)
    }

    /// The common point of two distinct lines.
    pub fn meet(&self, a: LineId, b: LineId) -> Option<PointId> {
        if a == b {
            return None;
        }
        let p = cross(&self.field, &self.line(a).coeffs, &self.line(b).coeffs).ok()?;
        self.point_id(p)
    }

    /// The line through two distinct points.
    pub fn join(&self, a: PointId, b: PointId) -> Option<LineId> {
        if a == b {
            return None;
        }
        let l = cross(&self.field, &self.point(a).coords, &self.point(b).coords).ok()?;
        self.line_id(l)
    }

    /// `p_∞ = (0, 1, 0)`.
    pub fn point_at_infinity(&self) -> PointId {
        let f = &self.field;
        self.point_id([f.zero(), f.one(), f.zero()])
            .expect("(0,1,0) is a point")
    }

    /// `ℓ_∞ : Z = 0`.
    pub fn line_at_infinity(&self) -> LineId {
        let f = &self.field;
        self.line_id([f.zero(), f.zero(), f.one()])
            .expect("[0,0,1] is a line")
    }

    /// Incidence as text: one row per line (in id order) listing its point
    /// ids, increasing, separated by single spaces.
    pub fn incidence_text(&self) -> String {
        let mut out = String::new();
        for pts in &self.line_points {
            let row: Vec<String> = pts.iter().map(|p| p.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

fn dot(
    f: &QuadExtField,
    a: &[FieldElement; 3],
    b: &[FieldElement; 3],
) -> Result<FieldElement, FieldError> {
    let mut acc = f.zero();
    for i in 0..3 {
        acc = f.add(acc, f.mul(a[i], b[i])?)?;
    }
    Ok(acc)
}

fn cross(
    f: &QuadExtField,
    a: &[FieldElement; 3],
    b: &[FieldElement; 3],
) -> Result<[FieldElement; 3], FieldError> {
    let term = |i: usize, j: usize| -> Result<FieldElement, FieldError> {
        f.sub(f.mul(a[i], b[j])?, f.mul(a[j], b[i])?)
    };
    Ok([term(1, 2)?, term(2, 0)?, term(0, 1)?])
}

/// Scales a nonzero triple so that its first nonzero entry is 1. `None` for
/// the zero triple.
pub fn normalize(
    f: &QuadExtField,
    t: [FieldElement; 3],
) -> Result<Option<[FieldElement; 3]>, FieldError> {
    let Some(lead) = t.iter().find(|e| !e.is_zero()) else {
        return Ok(None);
    };
    let s = f.inv(*lead)?;
    Ok(Some([f.mul(t[0], s)?, f.mul(t[1], s)?, f.mul(t[2], s)?]))
}

fn rank(t: &[FieldElement; 3], q: u32) -> u32 {
    let big_q = q * q;
    match (t[0].index(), t[1].index()) {
        (0, 0) => 0,
        (0, _) => 1 + t[2].index(),
        _ => 1 + big_q + t[1].index() * big_q + t[2].index(),
    }
}

fn normalized_triples(f: &QuadExtField) -> Vec<[FieldElement; 3]> {
    let els = f.enumerate();
    let (zero, one) = (f.zero(), f.one());
    let mut out = Vec::with_capacity(els.len() * els.len() + els.len() + 1);
    out.push([zero, zero, one]);
    out.extend(els.iter().map(|&z| [zero, one, z]));
    for &y in &els {
        out.extend(els.iter().map(|&z| [one, y, z]));
    }
    out
}

/// `X^{q+1} + Y·Z^q + Y^q·Z + λ·Z^{q+1}` for `λ ∈ GF(q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitalForm {
    pub lambda: FieldElement,
}

impl UnitalForm {
    /// `lambda` must be a prime-field element.
    pub fn new(lambda: FieldElement) -> Result<Self, GeometryError> {
        if lambda.is_extension() {
            return Err(FieldError::Mismatch.into());
        }
        Ok(Self { lambda })
    }

    /// Value of the form at `coords`; always lies in GF(q), returned embedded.
    pub fn evaluate(
        &self,
        f: &QuadExtField,
        [x, y, z]: [FieldElement; 3],
    ) -> Result<FieldElement, FieldError> {
        let nx = f.embed(f.norm(x)?)?;
        let nz = f.embed(f.norm(z)?)?;
        let y_zq = f.mul(y, f.frobenius(z)?)?;
        let yq_z = f.mul(f.frobenius(y)?, z)?;
        let lambda = f.embed(self.lambda)?;
        let mut acc = f.add(nx, y_zq)?;
        acc = f.add(acc, yq_z)?;
        f.add(acc, f.mul(lambda, nz)?)
    }
}

/// Zeros of `form` in the plane.
pub fn unital_points(plane: &ProjectivePlane, form: &UnitalForm) -> Result<PointSet, GeometryError> {
    if form.lambda.characteristic() != plane.q() {
        return Err(FieldError::Mismatch.into());
    }
    let mut set = PointSet::empty(plane.point_count());
    for p in plane.points() {
        if form.evaluate(plane.field(), p.coords)?.is_zero() {
            set.insert(p.id);
        }
    }
    Ok(set)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum LineKind {
    Tangent,
    Secant,
}

/// Tangent iff the line meets `unital` once, secant iff `q + 1` times; any
/// other intersection size is reported as corruption.
pub fn classify_line(
    plane: &ProjectivePlane,
    line: LineId,
    unital: &PointSet,
) -> Result<LineKind, GeometryError> {
    let size = unital.intersection_len(plane.line_bits(line));
    match size {
        1 => Ok(LineKind::Tangent),
        s if s == plane.q() as usize + 1 => Ok(LineKind::Secant),
        _ => Err(GeometryError::NotAUnital { line, size }),
    }
}

/// Given `k ≥ 3` secants of `unital` meeting pairwise inside it, returns a
/// unital point lying on at least `k − 1` of them.
///
/// The smallest such point id is returned. Not finding one means the input
/// was not a Hermitian unital or something upstream is broken.
pub fn fan_concurrence_check(
    plane: &ProjectivePlane,
    secants: &[LineId],
    unital: &PointSet,
    k: usize,
) -> Result<PointId, GeometryError> {
    if k < 3 || secants.len() != k {
        return Err(GeometryError::FamilySize {
            k,
            got: secants.len(),
        });
    }
    for &l in secants {
        if classify_line(plane, l, unital)? != LineKind::Secant {
            return Err(GeometryError::NotPairwiseIntersecting(format!(
                "line {l} is not a secant"
            )));
        }
    }
    let mut candidates = Vec::new();
    for (i, &a) in secants.iter().enumerate() {
        for &b in &secants[i + 1..] {
            let p = plane.meet(a, b).ok_or_else(|| {
                GeometryError::NotPairwiseIntersecting(format!("line {a} is repeated"))
            })?;
            if !unital.contains(p) {
                return Err(GeometryError::NotPairwiseIntersecting(format!(
                    "lines {a} and {b} meet at point {p} outside U"
                )));
            }
            candidates.push(p);
        }
    }
    candidates.sort_unstable();
    candidates.dedup();
    let tally = |p: PointId| secants.iter().filter(|&&l| plane.incident(p, l)).count();
    let best = candidates
        .iter()
        .map(|&p| (tally(p), std::cmp::Reverse(p)))
        .max()
        .expect("at least three pairwise meets");
    if best.0 >= k - 1 {
        Ok(best.1 .0)
    } else {
        Err(GeometryError::NoConcurrencePoint {
            needed: k - 1,
            best: best.0,
        })
    }
}

/// AG(2, q): points `(x, y)` with id `x·q + y`; lines grouped into `q + 1`
/// parallel classes. Class `s < q` holds the lines `y = s·x + b` (ordered by
/// `b`), class `q` holds the verticals `x = a` (ordered by `a`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffinePlane {
    q: u32,
    classes: Vec<Vec<Vec<u32>>>,
    /// `line_index[class][point]`: which line of the class holds the point.
    line_index: Vec<Vec<u32>>,
}

impl AffinePlane {
    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn point_count(&self) -> usize {
        (self.q * self.q) as usize
    }

    pub fn line_count(&self) -> usize {
        self.classes.iter().map(Vec::len).sum()
    }

    pub fn parallel_classes(&self) -> &[Vec<Vec<u32>>] {
        &self.classes
    }

    pub fn coords(&self, point: u32) -> (u32, u32) {
        (point / self.q, point % self.q)
    }

    /// `(class, line)` of the unique line through two distinct points.
    pub fn line_through(&self, a: u32, b: u32) -> Option<(usize, usize)> {
        if a == b {
            return None;
        }
        self.line_index
            .iter()
            .enumerate()
            .find(|(_, idx)| idx[a as usize] == idx[b as usize])
            .map(|(class, idx)| (class, idx[a as usize] as usize))
    }
}

pub fn build_affine_plane(q: u64) -> Result<AffinePlane, GeometryError> {
    let field = PrimeField::new(q)?;
    let q = field.characteristic();
    let mut classes = Vec::with_capacity(q as usize + 1);
    let mut line_index = Vec::with_capacity(q as usize + 1);
    for slope in 0..q {
        let mut lines = vec![Vec::with_capacity(q as usize); q as usize];
        let mut idx = vec![0u32; (q * q) as usize];
        for x in 0..q {
            for y in 0..q {
                // y = s·x + b  ⇒  b = y − s·x
                let b = (y + q * q - slope * x % q) % q;
                lines[b as usize].push(x * q + y);
                idx[(x * q + y) as usize] = b;
            }
        }
        classes.push(lines);
        line_index.push(idx);
    }
    let verticals: Vec<Vec<u32>> = (0..q).map(|x| (0..q).map(|y| x * q + y).collect()).collect();
    line_index.push((0..q * q).map(|p| p / q).collect());
    classes.push(verticals);
    Ok(AffinePlane {
        q,
        classes,
        line_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_follow_canonical_order() {
        let plane = ProjectivePlane::new(2).unwrap();
        assert_eq!(plane.point_count(), 21);
        assert_eq!(plane.point_at_infinity(), 1);
        assert_eq!(plane.line_at_infinity(), 0);
        for p in plane.points() {
            assert_eq!(plane.point_id(p.coords), Some(p.id));
        }
        let f = plane.field();
        assert_eq!(plane.point_id([f.zero(); 3]), None);
    }

    #[test]
    fn meet_and_join_are_consistent() {
        let plane = ProjectivePlane::new(2).unwrap();
        for a in 0..plane.line_count() as LineId {
            for b in 0..plane.line_count() as LineId {
                match plane.meet(a, b) {
                    None => assert_eq!(a, b),
                    Some(p) => {
                        let common: Vec<PointId> = plane
                            .points_on(a)
                            .iter()
                            .copied()
                            .filter(|&x| plane.incident(x, b))
                            .collect();
                        assert_eq!(common, vec![p]);
                    }
                }
            }
        }
        for p in 0..plane.point_count() as PointId {
            for r in p + 1..plane.point_count() as PointId {
                let l = plane.join(p, r).unwrap();
                assert!(plane.incident(p, l) && plane.incident(r, l));
            }
        }
    }

    #[test]
    fn infinity_elements() {
        let plane = ProjectivePlane::new(3).unwrap();
        let f = plane.field();
        let p_inf = plane.point_at_infinity();
        assert_eq!(plane.point(p_inf).coords, [f.zero(), f.one(), f.zero()]);
        assert!(plane.incident(p_inf, plane.line_at_infinity()));
        let base = f.base();
        for lambda in base.enumerate() {
            let form = UnitalForm::new(lambda).unwrap();
            assert!(form
                .evaluate(f, plane.point(p_inf).coords)
                .unwrap()
                .is_zero());
        }
    }

    #[test]
    fn unital_form_rejects_extension_lambda() {
        let f = QuadExtField::new(3).unwrap();
        assert!(UnitalForm::new(f.generator()).is_err());
    }

    #[test]
    fn classify_rejects_non_unitals() {
        let plane = ProjectivePlane::new(2).unwrap();
        let line = plane.line_at_infinity();
        let set = PointSet::from_ids(plane.point_count(), plane.points_on(line).iter().copied());
        assert_eq!(
            classify_line(&plane, line, &set),
            Err(GeometryError::NotAUnital { line, size: 5 })
        );
    }

    #[test]
    fn concurrence_check_preconditions() {
        let plane = ProjectivePlane::new(2).unwrap();
        let lambda = plane.field().base().zero();
        let u = unital_points(&plane, &UnitalForm::new(lambda).unwrap()).unwrap();
        let secants: Vec<LineId> = (0..plane.line_count() as LineId)
            .filter(|&l| classify_line(&plane, l, &u).unwrap() == LineKind::Secant)
            .collect();
        assert!(matches!(
            fan_concurrence_check(&plane, &secants[..2], &u, 2),
            Err(GeometryError::FamilySize { .. })
        ));
        // three secants through one unital point
        let p = u.iter().next().unwrap();
        let through: Vec<LineId> = plane
            .lines_through(p)
            .iter()
            .copied()
            .filter(|l| secants.contains(l))
            .take(3)
            .collect();
        assert_eq!(fan_concurrence_check(&plane, &through, &u, 3), Ok(p));
        // the tangent line is not a secant
        let tangent = plane.line_at_infinity();
        let bad = [through[0], through[1], tangent];
        assert!(matches!(
            fan_concurrence_check(&plane, &bad, &u, 3),
            Err(GeometryError::NotPairwiseIntersecting(_))
        ));
    }

    #[test]
    fn affine_plane_counts() {
        for (q, pts, lines) in [(3u64, 9, 12), (5, 25, 30)] {
            let ag = build_affine_plane(q).unwrap();
            assert_eq!(ag.point_count(), pts);
            assert_eq!(ag.line_count(), lines);
            assert_eq!(ag.parallel_classes().len(), q as usize + 1);
        }
        assert!(build_affine_plane(4).is_err());
    }
}
