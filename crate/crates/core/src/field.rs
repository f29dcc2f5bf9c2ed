//! Exact arithmetic in a prime field GF(q) and its quadratic extension GF(q²).
//!
//! Elements carry a small tag (the characteristic and whether they live in the
//! extension) so that mixing operands from different fields is caught at
//! runtime instead of silently producing garbage.
//!
//! The extension is always built from the lexicographically smallest monic
//! irreducible quadratic `x² + b·x + c`, scanning `(b, c)` in increasing
//! order, so two `QuadExtField`s over the same `q` are identical.
//!
//! Canonical element order (used by [`FiniteField::enumerate`] and by every
//! id that is derived from it): residues `0..q` for the prime field, and
//! `c1·x + c0` ordered lexicographically by `(c1, c0)` for the extension. In
//! both cases the index of an element is `c1·q + c0`, so `0` comes first and
//! `1` second.

use std::fmt;

use thiserror::Error;

/// Largest supported characteristic. Keeps `q²` inside `u32` and every
/// intermediate product inside `u64`.
pub const MAX_CHARACTERISTIC: u32 = 1 << 15;

/// Log/antilog tables are built when the multiplicative group is this small.
const TABLE_LIMIT: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("q must be prime (got {0})")]
    NotPrime(u64),
    #[error("q = {0} exceeds the supported maximum {MAX_CHARACTERISTIC}")]
    TooLarge(u64),
    #[error("field mismatch")]
    Mismatch,
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("operation requires an element of the quadratic extension")]
    NotExtension,
}

/// An element of GF(q) or GF(q²) in reduced coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    q: u32,
    ext: bool,
    c0: u32,
    c1: u32,
}

impl FieldElement {
    /// Constant coefficient.
    pub fn c0(&self) -> u32 {
        self.c0
    }

    /// Coefficient of `x` (always zero in the prime field).
    pub fn c1(&self) -> u32 {
        self.c1
    }

    pub fn characteristic(&self) -> u32 {
        self.q
    }

    pub fn is_extension(&self) -> bool {
        self.ext
    }

    pub fn is_zero(&self) -> bool {
        self.c0 == 0 && self.c1 == 0
    }

    /// Position in the canonical order of its field.
    pub fn index(&self) -> u32 {
        self.c1 * self.q + self.c0
    }

    /// True when the element lies in the prime subfield.
    pub fn in_base_field(&self) -> bool {
        self.c1 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.c1, self.c0) {
            (0, c0) => write!(f, "{c0}"),
            (1, 0) => write!(f, "x"),
            (c1, 0) => write!(f, "{c1}x"),
            (1, c0) => write!(f, "x+{c0}"),
            (c1, c0) => write!(f, "{c1}x+{c0}"),
        }
    }
}

/// Operations shared by [`PrimeField`] and [`QuadExtField`].
pub trait FiniteField {
    /// Number of elements.
    fn order(&self) -> u32;

    /// Whether `a` is an element of this field (tag match).
    fn contains(&self, a: &FieldElement) -> bool;

    /// The element with canonical index `index`, reduced modulo the order.
    fn element_at(&self, index: u32) -> FieldElement;

    fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError>;
    fn neg(&self, a: FieldElement) -> Result<FieldElement, FieldError>;
    fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError>;
    fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError>;

    fn zero(&self) -> FieldElement {
        self.element_at(0)
    }

    fn one(&self) -> FieldElement {
        self.element_at(1)
    }

    fn sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        let nb = self.neg(b)?;
        self.add(a, nb)
    }

    /// `a^e` by square-and-multiply.
    fn pow(&self, a: FieldElement, mut e: u64) -> Result<FieldElement, FieldError> {
        if !self.contains(&a) {
            return Err(FieldError::Mismatch);
        }
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base)?;
            }
            base = self.mul(base, base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Every element exactly once, in canonical order.
    fn enumerate(&self) -> Vec<FieldElement> {
        (0..self.order()).map(|i| self.element_at(i)).collect()
    }
}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// GF(q) for a prime `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    q: u32,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self, FieldError> {
        if !is_prime(q) {
            return Err(FieldError::NotPrime(q));
        }
        if q > MAX_CHARACTERISTIC as u64 {
            return Err(FieldError::TooLarge(q));
        }
        Ok(Self { q: q as u32 })
    }

    pub fn characteristic(&self) -> u32 {
        self.q
    }

    /// The residue `v mod q`.
    pub fn element(&self, v: u64) -> FieldElement {
        FieldElement {
            q: self.q,
            ext: false,
            c0: (v % self.q as u64) as u32,
            c1: 0,
        }
    }

    #[inline]
    fn check(&self, a: &FieldElement) -> Result<(), FieldError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(FieldError::Mismatch)
        }
    }
}

impl FiniteField for PrimeField {
    fn order(&self) -> u32 {
        self.q
    }

    fn contains(&self, a: &FieldElement) -> bool {
        a.q == self.q && !a.ext
    }

    fn element_at(&self, index: u32) -> FieldElement {
        self.element(index as u64)
    }

    fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(&a)?;
        self.check(&b)?;
        Ok(self.element(a.c0 as u64 + b.c0 as u64))
    }

    fn neg(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(&a)?;
        Ok(self.element((self.q - a.c0) as u64))
    }

    fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(&a)?;
        self.check(&b)?;
        Ok(self.element(a.c0 as u64 * b.c0 as u64))
    }

    fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(&a)?;
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        self.pow(a, self.q as u64 - 2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct LogTables {
    /// `exp[i] = g^i` as canonical indices, `i < q² − 1`.
    exp: Vec<u32>,
    /// `log[index]` for nonzero indices; entry 0 unused.
    log: Vec<u32>,
}

/// GF(q²) = GF(q)[x] / (x² + b·x + c).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadExtField {
    base: PrimeField,
    b: u32,
    c: u32,
    tables: Option<LogTables>,
}

impl QuadExtField {
    /// Builds GF(q²) with the canonical modulus for prime `q`.
    pub fn new(q: u64) -> Result<Self, FieldError> {
        let base = PrimeField::new(q)?;
        let q = base.q as u64;
        let (b, c) = (0..q)
            .flat_map(|b| (0..q).map(move |c| (b, c)))
            .find(|&(b, c)| (0..q).all(|x| (x * x + b * x + c) % q != 0))
            .expect("an irreducible monic quadratic exists over every prime field");
        let mut field = Self {
            base,
            b: b as u32,
            c: c as u32,
            tables: None,
        };
        if field.order() <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        Ok(field)
    }

    pub fn base(&self) -> &PrimeField {
        &self.base
    }

    pub fn characteristic(&self) -> u32 {
        self.base.q
    }

    /// Modulus coefficients `(b, c)` of `x² + b·x + c`.
    pub fn modulus(&self) -> (u32, u32) {
        (self.b, self.c)
    }

    /// `c1·x + c0`, both reduced.
    pub fn element(&self, c0: u64, c1: u64) -> FieldElement {
        let q = self.base.q as u64;
        FieldElement {
            q: self.base.q,
            ext: true,
            c0: (c0 % q) as u32,
            c1: (c1 % q) as u32,
        }
    }

    /// The generator `x` of the extension.
    pub fn generator(&self) -> FieldElement {
        self.element(0, 1)
    }

    /// Embeds a prime-field element.
    pub fn embed(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        self.base.check(&a)?;
        Ok(self.element(a.c0 as u64, 0))
    }

    /// Projects an extension element lying in the prime subfield back down.
    pub fn restrict(&self, a: FieldElement) -> Option<FieldElement> {
        (self.contains(&a) && a.c1 == 0).then(|| self.base.element(a.c0 as u64))
    }

    /// The Frobenius map `a ↦ a^q`.
    ///
    /// The two roots of the modulus sum to `−b`, so `x^q = −b − x` and the map
    /// is a linear conjugation on coordinates.
    pub fn frobenius(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if !a.ext {
            return Err(FieldError::NotExtension);
        }
        self.check(&a)?;
        let q = self.base.q as u64;
        let c0 = (a.c0 as u64 + (q - self.b as u64) * a.c1 as u64) % q;
        let c1 = (q - a.c1 as u64) % q;
        Ok(self.element(c0, c1))
    }

    /// The norm `a^(q+1) = a · a^q`, returned as an element of GF(q).
    pub fn norm(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        let conj = self.frobenius(a)?;
        let n = self.mul(a, conj)?;
        debug_assert_eq!(n.c1, 0);
        Ok(self.base.element(n.c0 as u64))
    }

    fn check(&self, a: &FieldElement) -> Result<(), FieldError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(FieldError::Mismatch)
        }
    }

    fn mul_direct(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let q = self.base.q as u64;
        let (a0, a1) = (a.c0 as u64, a.c1 as u64);
        let (b0, b1) = (b.c0 as u64, b.c1 as u64);
        // x² = −b·x − c
        let hi = a1 * b1 % q;
        let c0 = (a0 * b0 + (q - self.c as u64) * hi) % q;
        let c1 = (a0 * b1 + a1 * b0 + (q - self.b as u64) * hi) % q;
        self.element(c0, c1)
    }

    fn build_tables(&self) -> LogTables {
        let n = self.order();
        let group = n - 1;
        let candidates = (1..n).map(|i| self.element_at(i));
        for g in candidates {
            let mut exp = Vec::with_capacity(group as usize);
            let mut cur = self.one();
            let mut period = 0;
            loop {
                exp.push(cur.index());
                cur = self.mul_direct(cur, g);
                period += 1;
                if cur == self.one() || period > group {
                    break;
                }
            }
            if period == group {
                let mut log = vec![0u32; n as usize];
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                return LogTables { exp, log };
            }
        }
        unreachable!("the multiplicative group of a finite field is cyclic")
    }
}

impl FiniteField for QuadExtField {
    fn order(&self) -> u32 {
        self.base.q * self.base.q
    }

    fn contains(&self, a: &FieldElement) -> bool {
        a.q == self.base.q && a.ext
    }

    fn element_at(&self, index: u32) -> FieldElement {
        let q = self.base.q;
        let index = index % self.order();
        self.element((index % q) as u64, (index / q) as u64)
    }

    fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(&a)?;
        self.check(&b)?;
        Ok(self.element(a.c0 as u64 + b.c0 as u64, a.c1 as u64 + b.c1 as u64))
    }

    fn neg(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(&a)?;
        let q = self.base.q as u64;
        Ok(self.element(q - a.c0 as u64, q - a.c1 as u64))
    }

    fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(&a)?;
        self.check(&b)?;
        match &self.tables {
            Some(t) => {
                if a.is_zero() || b.is_zero() {
                    return Ok(self.zero());
                }
                let group = t.exp.len() as u32;
                let l = (t.log[a.index() as usize] + t.log[b.index() as usize]) % group;
                Ok(self.element_at(t.exp[l as usize]))
            }
            None => Ok(self.mul_direct(a, b)),
        }
    }

    fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(&a)?;
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        match &self.tables {
            Some(t) => {
                let group = t.exp.len() as u32;
                let l = (group - t.log[a.index() as usize]) % group;
                Ok(self.element_at(t.exp[l as usize]))
            }
            None => self.pow(a, self.order() as u64 - 2),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf9() -> QuadExtField {
        QuadExtField::new(3).unwrap()
    }

    #[test]
    fn prime_field_examples() {
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(f3.add(f3.element(2), f3.element(2)).unwrap(), f3.element(1));
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(f5.mul(f5.element(3), f5.element(4)).unwrap(), f5.element(2));
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(f7.inv(f7.element(3)).unwrap(), f7.element(5));
        assert_eq!(f7.inv(f7.one()).unwrap(), f7.one());
        assert_eq!(f7.inv(f7.zero()), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn rejects_composites() {
        assert_eq!(PrimeField::new(4), Err(FieldError::NotPrime(4)));
        assert_eq!(QuadExtField::new(1).unwrap_err(), FieldError::NotPrime(1));
        assert_eq!(
            QuadExtField::new(9).unwrap_err().to_string(),
            "q must be prime (got 9)"
        );
    }

    #[test]
    fn canonical_moduli() {
        assert_eq!(QuadExtField::new(2).unwrap().modulus(), (1, 1));
        assert_eq!(gf9().modulus(), (0, 1));
        assert_eq!(QuadExtField::new(5).unwrap().modulus(), (0, 2));
    }

    #[test]
    fn gf9_examples() {
        let f = gf9();
        let x = f.generator();
        let a = f.element(1, 1);
        let b = f.element(2, 2);
        assert_eq!(f.add(a, b).unwrap(), f.zero());
        assert_eq!(f.mul(x, x).unwrap(), f.element(2, 0));
        assert_eq!(f.inv(x).unwrap(), f.element(0, 2));
        assert_eq!(f.frobenius(x).unwrap(), f.element(0, 2));
        assert_eq!(f.frobenius(f.zero()).unwrap(), f.zero());
        assert_eq!(f.norm(f.one()).unwrap(), f.base().one());
        assert_eq!(f.norm(f.zero()).unwrap(), f.base().zero());
    }

    #[test]
    fn mixed_fields_are_rejected() {
        let f = gf9();
        let p = PrimeField::new(3).unwrap();
        assert_eq!(f.add(f.one(), p.one()), Err(FieldError::Mismatch));
        assert_eq!(p.mul(f.one(), p.one()), Err(FieldError::Mismatch));
        let f25 = QuadExtField::new(5).unwrap();
        assert_eq!(f.mul(f.one(), f25.one()), Err(FieldError::Mismatch));
        assert_eq!(f.frobenius(p.one()), Err(FieldError::NotExtension));
    }

    #[test]
    fn enumeration_order() {
        let p = PrimeField::new(3).unwrap();
        assert_eq!(
            p.enumerate(),
            vec![p.element(0), p.element(1), p.element(2)]
        );
        let els = gf9().enumerate();
        assert_eq!(els.len(), 9);
        assert!(els[0].is_zero());
        assert_eq!(els[1], gf9().one());
        // (c1, c0) lexicographic
        assert_eq!(els[3], gf9().element(0, 1));
        let mut sorted = els.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), 9);
    }

    #[test]
    fn table_and_direct_multiplication_agree() {
        for q in [2u64, 3, 5, 7] {
            let f = QuadExtField::new(q).unwrap();
            assert!(f.tables.is_some());
            for a in f.enumerate() {
                for b in f.enumerate() {
                    assert_eq!(f.mul(a, b).unwrap(), f.mul_direct(a, b));
                }
            }
        }
    }

    #[test]
    fn display() {
        let f = gf9();
        assert_eq!(f.element(2, 1).to_string(), "x+2");
        assert_eq!(f.element(0, 2).to_string(), "2x");
        assert_eq!(f.element(1, 0).to_string(), "1");
    }
}
