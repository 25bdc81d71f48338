//! Gröbner bases over prime fields.
//!
//! Buchberger's algorithm with the normal selection strategy and the
//! Gebauer–Möller installation of the product and chain criteria. Inputs are
//! homogeneous, so completion proceeds degree by degree and an optional
//! degree cap yields a truncated basis that is exact below the cap.
//!
//! [`IdealHandle`] is the ideal type used everywhere else: generators in the
//! ambient ring of a [`GradedRing`], with the ring relations adjoined whenever
//! a basis is computed.

mod reduce;
mod standard;

use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::poly::{GradedRing, Monomial, MonomialOrder, PolyRing, Polynomial};

pub use reduce::normal_form_by;
pub use standard::{count_standard_monomials, standard_monomials};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GbError {
    #[error("Gröbner basis budget exhausted: {0}")]
    ResourceLimit(String),
    #[error("polynomials belong to different rings")]
    RingMismatch,
    #[error("no generators given")]
    Empty,
    #[error("generator {index} (`{text}`) is not homogeneous")]
    NotHomogeneous { index: usize, text: String },
    #[error("quotient is not Artinian: no pure power of `{var}` among the leading terms")]
    NotArtinian { var: String },
    #[error("the ideal is the unit ideal")]
    UnitIdeal,
}

/// Limits for a single basis computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_reductions: u64,
    pub max_time: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_reductions: 1_000_000,
            max_time: Duration::from_secs(300),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GbStats {
    pub spairs: u64,
    pub pairs_pruned: u64,
    pub reductions: u64,
    pub zero_reductions: u64,
    pub wall_ms: u64,
}

/// A reduced Gröbner basis: monic elements, sorted by ascending leading
/// monomial, no leading monomial dividing any term of another element.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    ring: Arc<PolyRing>,
    elements: Vec<Polynomial>,
    stats: GbStats,
    truncated_at: Option<u64>,
}

impl GroebnerBasis {
    pub fn elements(&self) -> &[Polynomial] {
        &self.elements
    }

    pub fn order(&self) -> MonomialOrder {
        self.ring.order()
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn stats(&self) -> &GbStats {
        &self.stats
    }

    /// `Some(d)` if pairs above degree `d` were skipped; normal forms are then
    /// only exact for homogeneous input of degree at most `d`.
    pub fn truncated_at(&self) -> Option<u64> {
        self.truncated_at
    }

    pub fn leading_monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.elements.iter().filter_map(|g| g.leading_monomial())
    }

    pub fn is_unit(&self) -> bool {
        self.elements.iter().any(|g| g.is_one())
    }

    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial, GbError> {
        normal_form(f, self)
    }
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GbConfig {
    pub budget: Budget,
    pub degree_limit: Option<u64>,
}

/// Reduced Gröbner basis of `gens` with respect to `order`.
pub fn buchberger(gens: &[Polynomial], order: MonomialOrder, budget: Budget) -> Result<GroebnerBasis, GbError> {
    buchberger_with(gens, order, GbConfig { budget, degree_limit: None })
}

pub fn buchberger_with(gens: &[Polynomial], order: MonomialOrder, config: GbConfig) -> Result<GroebnerBasis, GbError> {
    let start = Instant::now();
    let first = gens.first().ok_or(GbError::Empty)?;
    let source_ring = first.ring().clone();
    let ring = if source_ring.order() == order {
        source_ring.clone()
    } else {
        source_ring.with_order(order)
    };
    let mut input = Vec::with_capacity(gens.len());
    for (index, g) in gens.iter().enumerate() {
        if !g.same_ring(&source_ring) {
            return Err(GbError::RingMismatch);
        }
        if !g.is_homogeneous() {
            return Err(GbError::NotHomogeneous {
                index,
                text: g.to_string(),
            });
        }
        if !g.is_zero() {
            input.push(g.reorder(&ring).monic());
        }
    }
    let mut stats = GbStats::default();
    if input.is_empty() {
        return Ok(GroebnerBasis {
            ring,
            elements: Vec::new(),
            stats,
            truncated_at: None,
        });
    }
    if input.iter().any(|g| g.is_one()) {
        stats.wall_ms = start.elapsed().as_millis() as u64;
        return Ok(GroebnerBasis {
            elements: vec![Polynomial::one(&ring)],
            ring,
            stats,
            truncated_at: None,
        });
    }
    // Lower degrees first keeps the working set small.
    input.sort_by(|a, b| order.cmp(a.leading_monomial().unwrap(), b.leading_monomial().unwrap()));
    input.dedup();

    let mut basis: Vec<Polynomial> = Vec::new();
    let mut active: Vec<bool> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();
    let mut truncated = false;
    for g in input {
        let g = reduce::normal_form_active(&g, &basis, &active);
        if !g.is_zero() {
            install(&mut basis, &mut active, &mut pairs, g.monic(), &mut stats);
        }
    }

    while !pairs.is_empty() {
        // normal strategy: smallest lcm first
        let mut best = 0;
        for k in 1..pairs.len() {
            if order.cmp(&pairs[k].lcm, &pairs[best].lcm) == std::cmp::Ordering::Less {
                best = k;
            }
        }
        let pair = pairs.swap_remove(best);
        if let Some(limit) = config.degree_limit {
            if pair.lcm.degree() > limit {
                truncated = true;
                continue;
            }
        }
        stats.spairs += 1;
        if stats.reductions >= config.budget.max_reductions {
            return Err(GbError::ResourceLimit(format!(
                "{} S-pair reductions",
                config.budget.max_reductions
            )));
        }
        if start.elapsed() > config.budget.max_time {
            return Err(GbError::ResourceLimit(format!("{:?} wall time", config.budget.max_time)));
        }
        let s = s_polynomial(&basis[pair.i], &basis[pair.j], &pair.lcm);
        let h = reduce::normal_form_active(&s, &basis, &active);
        stats.reductions += 1;
        if h.is_zero() {
            stats.zero_reductions += 1;
            continue;
        }
        if h.is_one() || h.degree() == Some(0) {
            stats.wall_ms = start.elapsed().as_millis() as u64;
            return Ok(GroebnerBasis {
                elements: vec![Polynomial::one(&ring)],
                ring,
                stats,
                truncated_at: None,
            });
        }
        install(&mut basis, &mut active, &mut pairs, h.monic(), &mut stats);
    }

    let survivors: Vec<Polynomial> = basis
        .into_iter()
        .zip(active)
        .filter_map(|(g, a)| a.then_some(g))
        .collect();
    let elements = interreduce(survivors, order);
    stats.wall_ms = start.elapsed().as_millis() as u64;
    Ok(GroebnerBasis {
        ring,
        elements,
        stats,
        truncated_at: if truncated { config.degree_limit } else { None },
    })
}

fn s_polynomial(f: &Polynomial, g: &Polynomial, lcm: &Monomial) -> Polynomial {
    // both monic
    let uf = f.leading_monomial().unwrap().quotient_of(lcm).unwrap();
    let ug = g.leading_monomial().unwrap().quotient_of(lcm).unwrap();
    let a = f.mul_term(&uf, 1);
    let b = g.mul_term(&ug, 1);
    a.add_scaled(&b, f.ring().field().neg(1))
}

/// Gebauer–Möller update: install `h` and prune the pair set.
fn install(basis: &mut Vec<Polynomial>, active: &mut Vec<bool>, pairs: &mut Vec<Pair>, h: Polynomial, stats: &mut GbStats) {
    let hl = h.leading_monomial().unwrap().clone();
    let k = basis.len();

    let mut candidates: Vec<(usize, Monomial, bool)> = (0..k)
        .filter(|&i| active[i])
        .map(|i| {
            let gl = basis[i].leading_monomial().unwrap();
            (i, hl.lcm(gl), hl.is_coprime(gl))
        })
        .collect();

    // chain criterion among the new pairs
    let mut kept: Vec<(usize, Monomial, bool)> = Vec::new();
    while let Some((i, lcm, coprime)) = candidates.pop() {
        let dominated = !coprime
            && (candidates.iter().any(|(_, l, _)| l.divides(&lcm))
                || kept.iter().any(|(_, l, _)| l.divides(&lcm)));
        if dominated {
            stats.pairs_pruned += 1;
        } else {
            kept.push((i, lcm, coprime));
        }
    }

    // old pairs made redundant by h
    let before = pairs.len();
    pairs.retain(|p| {
        let li = hl.lcm(basis[p.i].leading_monomial().unwrap());
        let lj = hl.lcm(basis[p.j].leading_monomial().unwrap());
        !(hl.divides(&p.lcm) && li != p.lcm && lj != p.lcm)
    });
    stats.pairs_pruned += (before - pairs.len()) as u64;

    // product criterion
    for (i, lcm, coprime) in kept {
        if coprime {
            stats.pairs_pruned += 1;
        } else {
            pairs.push(Pair { i, j: k, lcm });
        }
    }

    for i in 0..k {
        if active[i] && hl.divides(basis[i].leading_monomial().unwrap()) {
            active[i] = false;
        }
    }
    basis.push(h);
    active.push(true);
}

/// Reduce a minimal basis to the reduced one, sorted by ascending leading
/// monomial.
fn interreduce(mut elems: Vec<Polynomial>, order: MonomialOrder) -> Vec<Polynomial> {
    elems.sort_by(|a, b| order.cmp(a.leading_monomial().unwrap(), b.leading_monomial().unwrap()));
    let mut minimal: Vec<Polynomial> = Vec::new();
    for g in elems {
        let lm = g.leading_monomial().unwrap();
        if !minimal.iter().any(|m| m.leading_monomial().unwrap().divides(lm)) {
            minimal.push(g);
        }
    }
    let n = minimal.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let others: Vec<bool> = (0..n).map(|j| j != i).collect();
        let g = &minimal[i];
        let (lead, tail) = g.terms().split_first().unwrap();
        let tail = Polynomial::from_sorted_terms(g.ring(), tail.to_vec());
        let tail = reduce::normal_form_active(&tail, &minimal, &others);
        let lead = Polynomial::from_sorted_terms(g.ring(), vec![lead.clone()]);
        out.push(lead.add_scaled(&tail, 1).monic());
    }
    out
}

/// Remainder of `f` modulo a Gröbner basis.
pub fn normal_form(f: &Polynomial, gb: &GroebnerBasis) -> Result<Polynomial, GbError> {
    if f.ring().nvars() != gb.ring.nvars() || !f.ring().field().eq(&gb.ring.field()) || f.ring().vars() != gb.ring.vars() {
        return Err(GbError::RingMismatch);
    }
    if f.ring().order() == gb.order() {
        Ok(normal_form_by(f, &gb.elements))
    } else {
        let g = f.reorder(&gb.ring);
        Ok(normal_form_by(&g, &gb.elements).reorder(f.ring()))
    }
}

/// A homogeneous ideal of a graded ring, given by generators in the ambient
/// ring. The ring relations count as implicit generators.
#[derive(Debug)]
pub struct IdealHandle {
    ring: GradedRing,
    generators: Vec<Polynomial>,
    gb_cache: OnceLock<GroebnerBasis>,
}

impl Clone for IdealHandle {
    fn clone(&self) -> Self {
        let gb_cache = OnceLock::new();
        if let Some(gb) = self.gb_cache.get() {
            let _ = gb_cache.set(gb.clone());
        }
        IdealHandle {
            ring: self.ring.clone(),
            generators: self.generators.clone(),
            gb_cache,
        }
    }
}

impl IdealHandle {
    /// Generators are made monic and deduplicated; zero generators are dropped.
    pub fn new(ring: &GradedRing, gens: Vec<Polynomial>) -> Result<Self, GbError> {
        let mut out: Vec<Polynomial> = Vec::with_capacity(gens.len());
        let mut seen = std::collections::HashSet::with_capacity(gens.len());
        for (index, g) in gens.into_iter().enumerate() {
            if !g.same_ring(ring.ambient()) {
                return Err(GbError::RingMismatch);
            }
            if !g.is_homogeneous() {
                return Err(GbError::NotHomogeneous {
                    index,
                    text: g.to_string(),
                });
            }
            if g.is_zero() {
                continue;
            }
            let g = g.monic();
            if seen.insert(g.clone()) {
                out.push(g);
            }
        }
        Ok(IdealHandle {
            ring: ring.clone(),
            generators: out,
            gb_cache: OnceLock::new(),
        })
    }

    pub fn parse(ring: &GradedRing, gens: &[impl AsRef<str>]) -> Result<Self, crate::Error> {
        let polys = gens
            .iter()
            .map(|g| ring.parse(g.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IdealHandle::new(ring, polys)?)
    }

    /// The homogeneous maximal ideal `(x_1, .., x_n)`.
    pub fn maximal(ring: &GradedRing) -> Self {
        let gens = (0..ring.nvars()).map(|i| Polynomial::var(ring.ambient(), i)).collect();
        IdealHandle::new(ring, gens).expect("variables are homogeneous")
    }

    pub fn unit(ring: &GradedRing) -> Self {
        IdealHandle::new(ring, vec![Polynomial::one(ring.ambient())]).expect("constants are homogeneous")
    }

    pub fn ring(&self) -> &GradedRing {
        &self.ring
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    /// True when the generators are exactly the ring variables.
    pub fn is_maximal_by_generators(&self) -> bool {
        let n = self.ring.nvars();
        self.generators.len() == n
            && (0..n).all(|i| self.generators.contains(&Polynomial::var(self.ring.ambient(), i)))
    }

    pub fn all_monomial(&self) -> bool {
        self.generators.iter().all(|g| g.is_monomial())
    }

    /// Generators followed by the ring relations: the ideal in the ambient ring.
    pub fn lifted_generators(&self) -> Vec<Polynomial> {
        let mut all = self.generators.clone();
        for r in self.ring.relations() {
            let r = r.monic();
            if !all.contains(&r) {
                all.push(r);
            }
        }
        all
    }

    pub fn cached_groebner(&self) -> Option<&GroebnerBasis> {
        self.gb_cache.get()
    }

    /// Reduced Gröbner basis of generators and relations in the ring's order,
    /// computed at most once per handle.
    pub fn groebner(&self, budget: Budget) -> Result<&GroebnerBasis, GbError> {
        if let Some(gb) = self.gb_cache.get() {
            return Ok(gb);
        }
        let gens = self.lifted_generators();
        let gb = if gens.is_empty() {
            GroebnerBasis {
                ring: self.ring.ambient().clone(),
                elements: Vec::new(),
                stats: GbStats::default(),
                truncated_at: None,
            }
        } else {
            buchberger(&gens, self.ring.ambient().order(), budget)?
        };
        // a concurrent fill computed the same unique basis
        let _ = self.gb_cache.set(gb);
        Ok(self.gb_cache.get().expect("just set"))
    }

    /// The `standard_monomial_count` contract: dimension of the degree-`degree`
    /// piece of the quotient by this ideal.
    pub fn standard_monomial_count(&self, degree: u64, budget: Budget) -> Result<u64, GbError> {
        let gb = self.groebner(budget)?;
        let leads: Vec<Monomial> = gb.leading_monomials().cloned().collect();
        Ok(count_standard_monomials(self.ring.nvars(), &leads, degree))
    }

    /// Largest degree in which the quotient is nonzero (its socle degree).
    pub fn top_nonzero_degree(&self, budget: Budget) -> Result<u64, GbError> {
        let gb = self.groebner(budget)?;
        if gb.is_unit() {
            return Err(GbError::UnitIdeal);
        }
        let leads: Vec<Monomial> = gb.leading_monomials().cloned().collect();
        let caps = standard::pure_power_caps(self.ring.nvars(), &leads).map_err(|i| GbError::NotArtinian {
            var: self.ring.ambient().vars()[i].clone(),
        })?;
        let top: u64 = caps.iter().map(|c| c - 1).sum();
        for d in (0..=top).rev() {
            if count_standard_monomials(self.ring.nvars(), &leads, d) > 0 {
                return Ok(d);
            }
        }
        unreachable!("degree 0 is standard in a proper ideal")
    }
}

pub fn ideal_membership(f: &Polynomial, target: &IdealHandle, budget: Budget) -> Result<bool, GbError> {
    let gb = target.groebner(budget)?;
    Ok(normal_form(f, gb)?.is_zero())
}

#[cfg(test)]
mod tests;
