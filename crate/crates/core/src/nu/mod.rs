//! Frobenius powers and the invariants `nu_e(I, J) = max{ r : I^r ⊄ J^[p^e] }`.
//!
//! Containment `I^r ⊆ K` is decided by one of three kernels:
//!
//! * [`Method::Groebner`]: reduce every generator of `I^r` by a Gröbner basis
//!   of `K` (with the ring relations adjoined).
//! * [`Method::LinearAlgebra`]: per graded degree, echelonize the multiples
//!   of the generators of `K` and test the generators of `I^r` against the
//!   row space.
//! * [`Method::SocleFastpath`]: only for `I = m`; `m^r ⊆ K` exactly when the
//!   quotient by `K` vanishes in degree `r`, read off the standard monomials.
//!
//! `nu` runs a binary search over `r` in `[0, n(t p^e - 1)]`, where `t` is the
//! least power of `m` inside `J`; every monomial past that degree has some
//! exponent `>= t p^e` and so lies in `(m^t)^[p^e] ⊆ J^[p^e]`.

mod cache;
mod linalg;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::groebner::{buchberger, normal_form, Budget, GbError, GroebnerBasis, IdealHandle};
use crate::poly::{GradedRing, Polynomial};

pub use cache::{CacheError, CacheStore};

#[derive(Debug, Error)]
pub enum NuError {
    #[error(transparent)]
    Groebner(GbError),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("{q} is not a power of the characteristic {p}")]
    NotPowerOfP { q: u64, p: u64 },
    #[error("ideals belong to different rings")]
    RingMismatch,
    #[error("J is not primary to the maximal ideal: {0}")]
    NotMPrimary(String),
    #[error("I is not contained in the radical of J: I^{bound} is still not inside J^[q]")]
    RadicalViolation { bound: u64 },
    #[error("J^[q] is the unit ideal, nu is undefined")]
    UnitTarget,
    #[error("engine bug: containment not monotone (I^{contained} inside, I^{not_contained} outside)")]
    Monotonicity { contained: u64, not_contained: u64 },
    #[error("engine bug: nu_{next_e} = {next} < p * nu_{e} = {bound} in a polynomial ring")]
    FrobeniusWitness { e: u32, next_e: u32, next: u64, bound: u64 },
    #[error("records are not a consecutive sequence for one (ring, I, J)")]
    InconsistentRecords,
    #[error(transparent)]
    Cache(#[from] CacheError),
}

impl From<GbError> for NuError {
    fn from(e: GbError) -> Self {
        match e {
            GbError::ResourceLimit(s) => NuError::ResourceLimit(s),
            other => NuError::Groebner(other),
        }
    }
}

impl NuError {
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, NuError::ResourceLimit(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Groebner,
    LinearAlgebra,
    SocleFastpath,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Groebner => "groebner",
            Method::LinearAlgebra => "linear_algebra",
            Method::SocleFastpath => "socle_fastpath",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "groebner" => Ok(Method::Groebner),
            "linear_algebra" | "linear-algebra" => Ok(Method::LinearAlgebra),
            "socle_fastpath" | "socle-fastpath" => Ok(Method::SocleFastpath),
            _ => Err(format!("unknown method `{s}` (expected groebner, linear_algebra or socle_fastpath)")),
        }
    }
}

/// One computed value `nu_e(I, J)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuRecord {
    pub ring_digest: String,
    #[serde(rename = "I_digest")]
    pub i_digest: String,
    #[serde(rename = "J_digest")]
    pub j_digest: String,
    pub e: u32,
    pub q: u64,
    pub nu: u64,
    pub method: Method,
    pub wall_ms: u64,
}

fn sha_hex(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

pub fn ring_digest(ring: &GradedRing) -> String {
    sha_hex(&ring.canonical_print())
}

/// Digest of the sorted canonical (monic) generator prints.
pub fn ideal_digest(ideal: &IdealHandle) -> String {
    let mut gens: Vec<String> = ideal.generators().iter().map(|g| g.monic().to_string()).collect();
    gens.sort();
    sha_hex(&gens.join(";"))
}

/// `J^[q] = (g^q : g a generator of J)`.
pub fn bracket_power(j: &IdealHandle, q: u64) -> Result<IdealHandle, NuError> {
    let p = j.ring().characteristic();
    let ring = j.ring().ambient();
    if ring.field().log_p(q).is_none() {
        return Err(NuError::NotPowerOfP { q, p });
    }
    let gens = j
        .generators()
        .iter()
        .map(|g| {
            g.frobenius_power(q)
                .ok_or_else(|| NuError::ResourceLimit(format!("exponent overflow raising to the power {q}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IdealHandle::new(j.ring(), gens)?)
}

/// Exponent vectors `(a_1..a_k)` with `sum = r`, in lexicographically
/// descending order.
fn compositions(k: usize, r: u64) -> Vec<Vec<u64>> {
    fn go(k: usize, i: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i + 1 == k {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in (0..=left).rev() {
            cur.push(a);
            go(k, i + 1, left - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        go(k, 0, r, &mut Vec::new(), &mut out);
    }
    out
}

fn power_products(gens: &[Polynomial], r: u64) -> Vec<Polynomial> {
    let ring = gens[0].ring();
    if r == 0 {
        return vec![Polynomial::one(ring)];
    }
    // powers g_i^a for a <= r, built once
    let powers: Vec<Vec<Polynomial>> = gens
        .iter()
        .map(|g| {
            let mut v = vec![Polynomial::one(ring)];
            for a in 1..=r as usize {
                let next = &v[a - 1] * g;
                v.push(next);
            }
            v
        })
        .collect();
    compositions(gens.len(), r)
        .into_iter()
        .map(|exps| {
            let mut acc = Polynomial::one(ring);
            for (i, &a) in exps.iter().enumerate() {
                if a > 0 {
                    acc = &acc * &powers[i][a as usize];
                }
            }
            acc
        })
        .collect()
}

/// `I^r`, generated by the products over multisets of `r` generators.
/// `I^0` is the unit ideal.
pub fn ideal_power(i: &IdealHandle, r: u64) -> IdealHandle {
    if r == 0 || i.generators().is_empty() {
        if r == 0 {
            return IdealHandle::unit(i.ring());
        }
        return IdealHandle::new(i.ring(), Vec::new()).unwrap();
    }
    let gens = power_products(i.generators(), r);
    IdealHandle::new(i.ring(), gens).expect("products of homogeneous generators are homogeneous")
}

/// The predicate `I^r ⊆ K`, with `K` carrying the ring relations.
#[derive(Debug, Clone, Copy)]
pub struct ContainmentQuery<'a> {
    pub base: &'a IdealHandle,
    pub power: u64,
    pub target: &'a IdealHandle,
}

/// Tunables for the engine.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    /// Forced kernel; `None` picks per query (see [`NuEngine::default_method`]).
    pub method: Option<Method>,
    pub budget: Budget,
    /// Number of concurrent probes during the search (1 = plain bisection).
    pub threads: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            method: None,
            budget: Budget::default(),
            threads: 1,
        }
    }
}

/// Counters, shared across threads.
#[derive(Debug, Default)]
pub struct EngineStats {
    pub probes: AtomicU64,
    pub cache_hits: AtomicU64,
    pub nu_computed: AtomicU64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StatsSnapshot {
    pub probes: u64,
    pub cache_hits: u64,
    pub nu_computed: u64,
}

/// Bracket-power targets at or above this `q` go to the linear-algebra
/// kernel when `I` is not the maximal ideal.
pub const LINEAR_ALGEBRA_MIN_Q: u64 = 16;

#[derive(Debug, Default)]
pub struct NuEngine {
    pub config: EngineConfig,
    stats: EngineStats,
}

/// State shared by all probes of one search.
struct Prepared<'a> {
    base: &'a IdealHandle,
    target: &'a IdealHandle,
    rel_gb: GroebnerBasis,
    i_is_maximal: bool,
}

impl NuEngine {
    pub fn new(config: EngineConfig) -> Self {
        NuEngine {
            config,
            stats: EngineStats::default(),
        }
    }

    pub fn stats(&self) -> StatsSnapshot {
        StatsSnapshot {
            probes: self.stats.probes.load(Ordering::Relaxed),
            cache_hits: self.stats.cache_hits.load(Ordering::Relaxed),
            nu_computed: self.stats.nu_computed.load(Ordering::Relaxed),
        }
    }

    /// socle fastpath for `I = m`, linear algebra for large bracket
    /// powers, Gröbner otherwise.
    pub fn default_method(i: &IdealHandle, q: u64) -> Method {
        if i.is_maximal_by_generators() {
            Method::SocleFastpath
        } else if q >= LINEAR_ALGEBRA_MIN_Q {
            Method::LinearAlgebra
        } else {
            Method::Groebner
        }
    }

    fn relations_gb(&self, ring: &GradedRing) -> Result<GroebnerBasis, NuError> {
        if ring.has_relations() {
            Ok(buchberger(ring.relations(), ring.ambient().order(), self.config.budget)?)
        } else {
            // empty basis in the ring's order
            let m = IdealHandle::new(ring, Vec::new())?;
            Ok(m.groebner(self.config.budget)?.clone())
        }
    }

    fn prepare<'a>(&self, base: &'a IdealHandle, target: &'a IdealHandle) -> Result<Prepared<'a>, NuError> {
        if base.ring() != target.ring() {
            return Err(NuError::RingMismatch);
        }
        Ok(Prepared {
            base,
            target,
            rel_gb: self.relations_gb(base.ring())?,
            i_is_maximal: base.is_maximal_by_generators(),
        })
    }

    /// Decide `I^r ⊆ K` with the given kernel.
    pub fn contains_power(&self, query: ContainmentQuery<'_>, method: Method) -> Result<bool, NuError> {
        let prep = self.prepare(query.base, query.target)?;
        self.probe(&prep, query.power, method)
    }

    fn probe(&self, prep: &Prepared<'_>, r: u64, method: Method) -> Result<bool, NuError> {
        self.stats.probes.fetch_add(1, Ordering::Relaxed);
        let budget = self.config.budget;
        match method {
            Method::SocleFastpath => {
                if !prep.i_is_maximal {
                    // the shortcut is only sound for the maximal ideal
                    return self.probe(prep, r, Method::Groebner);
                }
                Ok(prep.target.standard_monomial_count(r, budget)? == 0)
            }
            Method::Groebner => {
                let gb = prep.target.groebner(budget)?;
                if gb.is_unit() {
                    return Ok(true);
                }
                let deadline = Instant::now() + budget.max_time;
                for f in self.pruned_power(prep, r)? {
                    if Instant::now() > deadline {
                        return Err(NuError::ResourceLimit("Gröbner containment time budget".into()));
                    }
                    if !normal_form(&f, gb)?.is_zero() {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Method::LinearAlgebra => self.probe_linear_algebra(prep, r),
        }
    }

    /// Generators of `I^r` that are nonzero modulo the relations.
    fn pruned_power(&self, prep: &Prepared<'_>, r: u64) -> Result<Vec<Polynomial>, NuError> {
        let pow = ideal_power(prep.base, r);
        if !prep.base.ring().has_relations() {
            return Ok(pow.generators().to_vec());
        }
        let mut out = Vec::with_capacity(pow.generators().len());
        for f in pow.generators() {
            if !normal_form(f, &prep.rel_gb)?.is_zero() {
                out.push(f.clone());
            }
        }
        Ok(out)
    }

    fn probe_linear_algebra(&self, prep: &Prepared<'_>, r: u64) -> Result<bool, NuError> {
        let deadline = Some(Instant::now() + self.config.budget.max_time);
        let target_gens = prep.target.generators();
        if prep.i_is_maximal {
            let sys = linalg::DegreeSystem::build(target_gens, &prep.rel_gb, r, deadline)?;
            return Ok(sys.quotient_dimension() == 0);
        }
        let mut by_degree: BTreeMap<u64, Vec<Polynomial>> = BTreeMap::new();
        for f in ideal_power(prep.base, r).generators() {
            by_degree.entry(f.degree().unwrap_or(0)).or_default().push(f.clone());
        }
        for (d, gens) in by_degree {
            let mut sys = linalg::DegreeSystem::build(target_gens, &prep.rel_gb, d, deadline)?;
            for f in &gens {
                if !sys.contains(f) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Dimension of the degree-`d` piece of `S / (K + relations)` computed by
    /// the linear-algebra kernel.
    pub fn quotient_dimension_linear_algebra(&self, target: &IdealHandle, d: u64) -> Result<usize, NuError> {
        let rel_gb = self.relations_gb(target.ring())?;
        let deadline = Some(Instant::now() + self.config.budget.max_time);
        Ok(linalg::DegreeSystem::build(target.generators(), &rel_gb, d, deadline)?.quotient_dimension())
    }

    /// `t = min{ s : m^s ⊆ J }` (with the relations adjoined).
    pub fn maximal_power_in(&self, j: &IdealHandle) -> Result<u64, NuError> {
        match j.top_nonzero_degree(self.config.budget) {
            Ok(d) => Ok(d + 1),
            Err(GbError::UnitIdeal) => Ok(0),
            Err(GbError::NotArtinian { var }) => Err(NuError::NotMPrimary(format!(
                "no power of `{var}` lies in J"
            ))),
            Err(e) => Err(e.into()),
        }
    }

    /// The certified search ceiling `n (t q - 1)`.
    pub fn search_ceiling(&self, j: &IdealHandle, q: u64) -> Result<u64, NuError> {
        let t = self.maximal_power_in(j)?;
        if t == 0 {
            return Err(NuError::UnitTarget);
        }
        let n = j.ring().nvars() as u64;
        t.checked_mul(q)
            .and_then(|tq| n.checked_mul(tq - 1))
            .ok_or_else(|| NuError::ResourceLimit("search ceiling overflows".into()))
    }

    /// Compute `nu_e(I, J)`.
    pub fn nu(&self, i: &IdealHandle, j: &IdealHandle, e: u32) -> Result<NuRecord, NuError> {
        let start = Instant::now();
        if i.ring() != j.ring() {
            return Err(NuError::RingMismatch);
        }
        let p = i.ring().characteristic();
        let q = p
            .checked_pow(e)
            .ok_or_else(|| NuError::ResourceLimit(format!("p^{e} overflows")))?;
        let ceiling = self.search_ceiling(j, q)?;
        let target = bracket_power(j, q)?;
        let method = self.config.method.unwrap_or_else(|| Self::default_method(i, q));
        let prep = self.prepare(i, &target)?;

        if self.probe(&prep, 0, method)? {
            return Err(NuError::UnitTarget);
        }
        if !self.probe(&prep, ceiling + 1, method)? {
            return Err(NuError::RadicalViolation { bound: ceiling + 1 });
        }
        let nu = self.search(&prep, method, 0, ceiling + 1)?;
        self.stats.nu_computed.fetch_add(1, Ordering::Relaxed);
        Ok(NuRecord {
            ring_digest: ring_digest(i.ring()),
            i_digest: ideal_digest(i),
            j_digest: ideal_digest(j),
            e,
            q,
            nu,
            method,
            wall_ms: start.elapsed().as_millis() as u64,
        })
    }

    /// Largest `r` in `[lo, hi)` with containment false, given false at `lo`
    /// and true at `hi`. Probes may run in parallel; every round checks that
    /// all failing exponents sit below all succeeding ones.
    fn search(&self, prep: &Prepared<'_>, method: Method, mut lo: u64, mut hi: u64) -> Result<u64, NuError> {
        let k = self.config.threads.max(1) as u64;
        while hi - lo > 1 {
            let gap = hi - lo;
            let points: Vec<u64> = if k == 1 || gap <= 2 {
                vec![lo + gap / 2]
            } else {
                let mut v: Vec<u64> = (1..=k).map(|s| lo + s * gap / (k + 1)).filter(|&r| r > lo && r < hi).collect();
                v.dedup();
                v
            };
            let outcomes: Vec<(u64, bool)> = if points.len() == 1 {
                vec![(points[0], self.probe(prep, points[0], method)?)]
            } else {
                let results: Vec<Result<bool, NuError>> = std::thread::scope(|s| {
                    let handles: Vec<_> = points
                        .iter()
                        .map(|&r| s.spawn(move || self.probe(prep, r, method)))
                        .collect();
                    handles.into_iter().map(|h| h.join().expect("probe thread panicked")).collect()
                });
                points
                    .iter()
                    .zip(results)
                    .map(|(&r, res)| res.map(|b| (r, b)))
                    .collect::<Result<_, _>>()?
            };
            let max_false = outcomes.iter().filter(|(_, b)| !b).map(|(r, _)| *r).max();
            let min_true = outcomes.iter().filter(|(_, b)| *b).map(|(r, _)| *r).min();
            if let (Some(f), Some(t)) = (max_false, min_true) {
                if f > t {
                    return Err(NuError::Monotonicity {
                        contained: t,
                        not_contained: f,
                    });
                }
            }
            if let Some(f) = max_false {
                lo = lo.max(f);
            }
            if let Some(t) = min_true {
                hi = hi.min(t);
            }
        }
        Ok(lo)
    }

    /// `nu_1 .. nu_{e_max}`, reusing and extending `cache`. In a polynomial
    /// ring each consecutive pair must satisfy `nu_{e+1} >= p nu_e`.
    pub fn nu_sequence(
        &self,
        i: &IdealHandle,
        j: &IdealHandle,
        e_max: u32,
        cache: &mut CacheStore,
    ) -> Result<Vec<NuRecord>, NuError> {
        let rd = ring_digest(i.ring());
        let id = ideal_digest(i);
        let jd = ideal_digest(j);
        let mut out = Vec::with_capacity(e_max as usize);
        for e in 1..=e_max {
            let rec = match cache.lookup(&rd, &id, &jd, e) {
                Some(r) => {
                    self.stats.cache_hits.fetch_add(1, Ordering::Relaxed);
                    r.clone()
                }
                None => {
                    let r = self.nu(i, j, e)?;
                    cache.append(r.clone())?;
                    r
                }
            };
            out.push(rec);
        }
        if !i.ring().has_relations() {
            let p = i.ring().characteristic();
            for w in out.windows(2) {
                let bound = p * w[0].nu;
                if w[1].nu < bound {
                    return Err(NuError::FrobeniusWitness {
                        e: w[0].e,
                        next_e: w[1].e,
                        next: w[1].nu,
                        bound,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Time budget as a duration.
    pub fn budget_time(&self) -> Duration {
        self.config.budget.max_time
    }
}

/// One check of `nu_{e+1} >= p nu_e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessCheck {
    pub e: u32,
    pub nu_e: u64,
    pub nu_next: u64,
    pub holds: bool,
}

/// Report the Frobenius-witness inequality on consecutive records without
/// assuming it (quotient rings).
pub fn frobenius_witness_checks(records: &[NuRecord], p: u64) -> Vec<WitnessCheck> {
    records
        .windows(2)
        .filter(|w| w[1].e == w[0].e + 1)
        .map(|w| WitnessCheck {
            e: w[0].e,
            nu_e: w[0].nu,
            nu_next: w[1].nu,
            holds: w[1].nu >= p * w[0].nu,
        })
        .collect()
}

/// Convenience wrapper with the default engine.
pub fn nu(i: &IdealHandle, j: &IdealHandle, e: u32) -> Result<NuRecord, NuError> {
    NuEngine::default().nu(i, j, e)
}

pub fn nu_sequence(i: &IdealHandle, j: &IdealHandle, e_max: u32, cache: &mut CacheStore) -> Result<Vec<NuRecord>, NuError> {
    NuEngine::default().nu_sequence(i, j, e_max, cache)
}

pub fn contains_power(query: ContainmentQuery<'_>, method: Method) -> Result<bool, NuError> {
    NuEngine::default().contains_power(query, method)
}

#[cfg(test)]
mod tests;
