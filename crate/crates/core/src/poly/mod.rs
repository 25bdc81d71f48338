//! Sparse multivariate polynomials over prime fields with the standard
//! grading, plus the text grammar used by every input file.
//!
//! A [`PolyRing`] is the ambient ring `F_p[x_1, .., x_n]` with a monomial
//! order. A [`GradedRing`] adds a (possibly empty) list of homogeneous
//! relations and stands for the quotient `S/(relations)`. Polynomials always
//! live in the ambient ring; quotient computations adjoin the relations.

mod monomial;
mod parse;

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::field::{FieldError, PrimeField};

pub use monomial::{monomials_of_degree, Monomial, MonomialOrder};
pub use parse::parse_polynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("operands belong to different rings")]
    RingMismatch,
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("exponent at position {pos} does not fit in 64 bits")]
    ExponentTooLarge { pos: usize },
    #[error("invalid variable name `{0}`")]
    InvalidVariableName(String),
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("a ring needs at least one variable")]
    NoVariables,
    #[error("relation {index} (`{text}`) is not homogeneous")]
    NonHomogeneousRelation { index: usize, text: String },
}

/// The ambient ring `F_p[x_1..x_n]` together with its monomial order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyRing {
    field: PrimeField,
    vars: Vec<String>,
    order: MonomialOrder,
}

pub(crate) fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl PolyRing {
    pub fn new(
        field: PrimeField,
        vars: impl IntoIterator<Item = impl Into<String>>,
        order: MonomialOrder,
    ) -> Result<Arc<Self>, PolyError> {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        if vars.is_empty() {
            return Err(PolyError::NoVariables);
        }
        for (i, v) in vars.iter().enumerate() {
            if !valid_identifier(v) {
                return Err(PolyError::InvalidVariableName(v.clone()));
            }
            if vars[..i].contains(v) {
                return Err(PolyError::DuplicateVariable(v.clone()));
            }
        }
        Ok(Arc::new(PolyRing { field, vars, order }))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn characteristic(&self) -> u64 {
        self.field.characteristic()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// The same ring with a different monomial order.
    pub fn with_order(&self, order: MonomialOrder) -> Arc<PolyRing> {
        Arc::new(PolyRing {
            field: self.field,
            vars: self.vars.clone(),
            order,
        })
    }

    pub fn parse(self: &Arc<Self>, text: &str) -> Result<Polynomial, PolyError> {
        parse_polynomial(text, self)
    }
}

/// Number of degree-`degree` monomials in an `nvars`-variable polynomial ring,
/// `C(degree + n - 1, n - 1)`.
pub fn graded_piece_dimension(nvars: usize, degree: u64) -> u128 {
    assert!(nvars >= 1, "graded_piece_dimension needs at least one variable");
    let k = (nvars - 1) as u128;
    let n = degree as u128 + k;
    // C(n, k) built incrementally: each partial product is itself a binomial.
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) / i;
    }
    acc
}

/// A standard graded ring `S/(relations)` with `S` a polynomial ring over `F_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedRing {
    ambient: Arc<PolyRing>,
    relations: Vec<Polynomial>,
}

impl GradedRing {
    pub fn polynomial_ring(ambient: Arc<PolyRing>) -> Self {
        GradedRing {
            ambient,
            relations: Vec::new(),
        }
    }

    /// Relations must be homogeneous; zero relations are dropped.
    pub fn quotient(ambient: Arc<PolyRing>, relations: Vec<Polynomial>) -> Result<Self, PolyError> {
        let mut kept = Vec::new();
        for (index, r) in relations.into_iter().enumerate() {
            if !r.same_ring(&ambient) {
                return Err(PolyError::RingMismatch);
            }
            if r.is_zero() {
                continue;
            }
            if !r.is_homogeneous() {
                return Err(PolyError::NonHomogeneousRelation {
                    index,
                    text: r.to_string(),
                });
            }
            if !kept.contains(&r) {
                kept.push(r);
            }
        }
        Ok(GradedRing {
            ambient,
            relations: kept,
        })
    }

    /// Build from textual data, the form used by ring files.
    pub fn from_text(
        characteristic: u64,
        vars: &[impl AsRef<str>],
        relations: &[impl AsRef<str>],
        order: MonomialOrder,
    ) -> Result<Self, PolyError> {
        let field = PrimeField::new(characteristic)?;
        let ambient = PolyRing::new(field, vars.iter().map(|v| v.as_ref().to_string()), order)?;
        let rels = relations
            .iter()
            .map(|r| ambient.parse(r.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        GradedRing::quotient(ambient, rels)
    }

    pub fn ambient(&self) -> &Arc<PolyRing> {
        &self.ambient
    }

    pub fn relations(&self) -> &[Polynomial] {
        &self.relations
    }

    pub fn has_relations(&self) -> bool {
        !self.relations.is_empty()
    }

    pub fn characteristic(&self) -> u64 {
        self.ambient.characteristic()
    }

    pub fn nvars(&self) -> usize {
        self.ambient.nvars()
    }

    pub fn parse(&self, text: &str) -> Result<Polynomial, PolyError> {
        self.ambient.parse(text)
    }

    /// Canonical text form, stable across runs; used for content digests.
    pub fn canonical_print(&self) -> String {
        let mut rels: Vec<String> = self.relations.iter().map(|r| r.monic().to_string()).collect();
        rels.sort();
        format!(
            "char={};vars={};order={};relations=[{}]",
            self.ambient.characteristic(),
            self.ambient.vars.join(","),
            self.ambient.order.name(),
            rels.join(";")
        )
    }
}

/// A polynomial in the ambient ring. Terms are kept sorted in descending
/// monomial order with nonzero canonical coefficients.
#[derive(Clone, Debug)]
pub struct Polynomial {
    ring: Arc<PolyRing>,
    terms: Vec<(Monomial, u32)>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.same_ring(&other.ring)
    }
}

impl Eq for Polynomial {}

impl std::hash::Hash for Polynomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl Polynomial {
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(ring: &Arc<PolyRing>) -> Self {
        Polynomial::constant(ring, 1)
    }

    pub fn constant(ring: &Arc<PolyRing>, c: i64) -> Self {
        let c = ring.field.from_i64(c);
        Polynomial::term(ring, Monomial::one(ring.nvars()), c)
    }

    pub fn var(ring: &Arc<PolyRing>, i: usize) -> Self {
        Polynomial::term(ring, Monomial::var(ring.nvars(), i, 1), 1)
    }

    pub fn term(ring: &Arc<PolyRing>, m: Monomial, c: u32) -> Self {
        debug_assert_eq!(m.nvars(), ring.nvars());
        let c = ring.field.from_u64(c as u64);
        let terms = if c == 0 { Vec::new() } else { vec![(m, c)] };
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    /// Collects arbitrary (monomial, coefficient) pairs: sums duplicates,
    /// reduces coefficients and sorts.
    pub fn from_terms(ring: &Arc<PolyRing>, terms: impl IntoIterator<Item = (Monomial, u64)>) -> Self {
        let field = ring.field;
        let mut acc: HashMap<Monomial, u32> = HashMap::new();
        for (m, c) in terms {
            let c = field.from_u64(c);
            let e = acc.entry(m).or_insert(0);
            *e = field.add(*e, c);
        }
        let mut terms: Vec<(Monomial, u32)> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        let order = ring.order;
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    /// Terms must already be sorted descending, distinct and nonzero.
    pub(crate) fn from_sorted_terms(ring: &Arc<PolyRing>, terms: Vec<(Monomial, u32)>) -> Self {
        debug_assert!(terms.iter().all(|(_, c)| *c != 0));
        debug_assert!(terms
            .windows(2)
            .all(|w| ring.order.cmp(&w[0].0, &w[1].0) == std::cmp::Ordering::Greater));
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn same_ring(&self, ring: &Arc<PolyRing>) -> bool {
        Arc::ptr_eq(&self.ring, ring) || *self.ring == **ring
    }

    pub fn terms(&self) -> &[(Monomial, u32)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1 == 1
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn leading_term(&self) -> Option<&(Monomial, u32)> {
        self.terms.first()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    /// Largest total degree of a term; `None` for zero.
    pub fn degree(&self) -> Option<u64> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some((m, _)) => self.terms.iter().all(|(t, _)| t.degree() == m.degree()),
        }
    }

    pub fn monic(&self) -> Polynomial {
        match self.terms.first() {
            None => self.clone(),
            Some((_, c)) => self.scale(self.ring.field.inv(*c)),
        }
    }

    pub fn scale(&self, c: u32) -> Polynomial {
        let f = self.ring.field;
        if c == 0 {
            return Polynomial::zero(&self.ring);
        }
        let terms = self.terms.iter().map(|(m, a)| (m.clone(), f.mul(*a, c))).collect();
        Polynomial {
            ring: self.ring.clone(),
            terms,
        }
    }

    /// `c * m * self`. Panics on exponent overflow.
    pub fn mul_term(&self, m: &Monomial, c: u32) -> Polynomial {
        let f = self.ring.field;
        if c == 0 {
            return Polynomial::zero(&self.ring);
        }
        // multiplying by a monomial preserves the order of terms
        let terms = self
            .terms
            .iter()
            .map(|(t, a)| (t.mul(m), f.mul(*a, c)))
            .collect();
        Polynomial {
            ring: self.ring.clone(),
            terms,
        }
    }

    /// Re-express in the same variables under another ring (usually a
    /// different monomial order).
    pub fn reorder(&self, ring: &Arc<PolyRing>) -> Polynomial {
        assert_eq!(ring.nvars(), self.ring.nvars());
        let mut terms = self.terms.clone();
        let order = ring.order;
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    fn check_ring(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.same_ring(&other.ring) {
            Ok(())
        } else {
            Err(PolyError::RingMismatch)
        }
    }

    /// `self + c * other`, merging sorted term lists.
    pub(crate) fn add_scaled(&self, other: &Polynomial, c: u32) -> Polynomial {
        let f = self.ring.field;
        let order = self.ring.order;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match order.cmp(&a[i].0, &b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let v = f.mul(b[j].1, c);
                    if v != 0 {
                        out.push((b[j].0.clone(), v));
                    }
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let v = f.add(a[i].1, f.mul(b[j].1, c));
                    if v != 0 {
                        out.push((a[i].0.clone(), v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        for (m, v) in &b[j..] {
            let v = f.mul(*v, c);
            if v != 0 {
                out.push((m.clone(), v));
            }
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: out,
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ring(other)?;
        Ok(self.add_scaled(other, 1))
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ring(other)?;
        Ok(self.add_scaled(other, self.ring.field.neg(1)))
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ring(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Polynomial::zero(&self.ring));
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_term_checked(m, *c);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_term_checked(m, *c);
        }
        let f = self.ring.field;
        let mut acc: HashMap<Monomial, u32> = HashMap::with_capacity(self.len() * other.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.checked_mul(mb).ok_or(PolyError::ExponentOverflow)?;
                let e = acc.entry(m).or_insert(0);
                *e = f.add(*e, f.mul(*ca, *cb));
            }
        }
        let mut terms: Vec<(Monomial, u32)> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        let order = self.ring.order;
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        Ok(Polynomial {
            ring: self.ring.clone(),
            terms,
        })
    }

    fn mul_term_checked(&self, m: &Monomial, c: u32) -> Result<Polynomial, PolyError> {
        let f = self.ring.field;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (t, a) in &self.terms {
            terms.push((t.checked_mul(m).ok_or(PolyError::ExponentOverflow)?, f.mul(*a, c)));
        }
        Ok(Polynomial {
            ring: self.ring.clone(),
            terms,
        })
    }

    /// `self^k` by repeated squaring; `self^0 = 1`.
    pub fn checked_pow(&self, mut k: u64) -> Result<Polynomial, PolyError> {
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            let m = m.checked_pow(k).ok_or(PolyError::ExponentOverflow)?;
            return Ok(Polynomial::term(&self.ring, m, self.ring.field.pow(*c, k)));
        }
        let mut acc = Polynomial::one(&self.ring);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `self^q` for `q` a power of the characteristic, computed termwise via
    /// the Frobenius endomorphism. Returns `None` if `q` is not a power of `p`
    /// or an exponent overflows.
    pub fn frobenius_power(&self, q: u64) -> Option<Polynomial> {
        self.ring.field.log_p(q)?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            // c^q = c in F_p, and raising to a power preserves the order
            terms.push((m.checked_pow(q)?, *c));
        }
        Some(Polynomial {
            ring: self.ring.clone(),
            terms,
        })
    }
}

pub fn poly_add(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, PolyError> {
    a.checked_add(b)
}

pub fn poly_mul(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, PolyError> {
    a.checked_mul(b)
}

pub fn poly_pow(a: &Polynomial, k: u64) -> Result<Polynomial, PolyError> {
    a.checked_pow(k)
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial addition")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial subtraction")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial multiplication")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(self.ring.field.neg(1))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let mut first = true;
            if *c != 1 || m.is_one() {
                write!(f, "{c}")?;
                first = false;
            }
            for (v, &e) in self.ring.vars.iter().zip(m.exponents()) {
                if e == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                f.write_str(v)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}
