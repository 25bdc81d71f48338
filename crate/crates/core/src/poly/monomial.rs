use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

/// Exponent vector of a monomial with its cached total degree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: SmallVec<[u64; 4]>,
    degree: u64,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial {
            exps: SmallVec::from_elem(0, nvars),
            degree: 0,
        }
    }

    /// Panics if the total degree overflows `u64`.
    pub fn new(exps: impl Into<SmallVec<[u64; 4]>>) -> Self {
        let exps = exps.into();
        let degree = exps
            .iter()
            .try_fold(0u64, |acc: u64, &e| acc.checked_add(e))
            .expect("monomial degree overflows u64");
        Monomial { exps, degree }
    }

    pub fn try_new(exps: &[u64]) -> Option<Self> {
        let degree = exps.iter().try_fold(0u64, |acc: u64, &e| acc.checked_add(e))?;
        Some(Monomial {
            exps: SmallVec::from_slice(exps),
            degree,
        })
    }

    pub fn var(nvars: usize, i: usize, e: u64) -> Self {
        let mut m = Monomial::one(nvars);
        m.exps[i] = e;
        m.degree = e;
        m
    }

    #[inline]
    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    #[inline]
    pub fn degree(&self) -> u64 {
        self.degree
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn checked_mul(&self, other: &Monomial) -> Option<Monomial> {
        debug_assert_eq!(self.nvars(), other.nvars());
        let mut exps = SmallVec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            exps.push(a.checked_add(*b)?);
        }
        Some(Monomial {
            exps,
            degree: self.degree.checked_add(other.degree)?,
        })
    }

    /// Panics on exponent overflow.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.checked_mul(other).expect("monomial exponent overflow")
    }

    pub fn checked_pow(&self, k: u64) -> Option<Monomial> {
        let mut exps = SmallVec::with_capacity(self.exps.len());
        for a in &self.exps {
            exps.push(a.checked_mul(k)?);
        }
        Some(Monomial {
            exps,
            degree: self.degree.checked_mul(k)?,
        })
    }

    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        self.degree <= other.degree && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        let exps: SmallVec<[u64; 4]> = self.exps.iter().zip(&other.exps).map(|(a, b)| b - a).collect();
        Some(Monomial {
            exps,
            degree: other.degree - self.degree,
        })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let exps: SmallVec<[u64; 4]> = self.exps.iter().zip(&other.exps).map(|(a, b)| *a.max(b)).collect();
        Monomial::new(exps)
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Index of the single variable if this is a pure power `x_i^k`, k >= 1.
    pub fn pure_power_var(&self) -> Option<usize> {
        let mut found = None;
        for (i, &e) in self.exps.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            }
        }
        found
    }
}

/// Monomial orders supported by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonomialOrder {
    #[default]
    Grevlex,
    Lex,
}

impl MonomialOrder {
    /// Compare two monomials; `Greater` means `a` comes first.
    #[inline]
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => a.exps.cmp(&b.exps),
            MonomialOrder::Grevlex => a.degree.cmp(&b.degree).then_with(|| {
                for (x, y) in a.exps.iter().zip(&b.exps).rev() {
                    match x.cmp(y) {
                        Ordering::Equal => continue,
                        o => return o.reverse(),
                    }
                }
                Ordering::Equal
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MonomialOrder::Grevlex => "grevlex",
            MonomialOrder::Lex => "lex",
        }
    }
}

/// All exponent vectors of total degree `degree` in `nvars` variables, in
/// descending lexicographic order of the exponent vector.
pub fn monomials_of_degree(nvars: usize, degree: u64) -> Vec<Monomial> {
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(Monomial::one(0));
        }
        return out;
    }
    let mut exps = vec![0u64; nvars];
    fill(&mut exps, 0, degree, &mut out);
    out
}

fn fill(exps: &mut [u64], i: usize, remaining: u64, out: &mut Vec<Monomial>) {
    if i + 1 == exps.len() {
        exps[i] = remaining;
        out.push(Monomial::new(SmallVec::from_slice(exps)));
        return;
    }
    for e in (0..=remaining).rev() {
        exps[i] = e;
        fill(exps, i + 1, remaining - e, out);
    }
    exps[i] = 0;
}
