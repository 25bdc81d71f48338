//! Per-degree linear algebra containment kernel.
//!
//! For a homogeneous target `K` and a degree `D`, the degree-`D` piece of `K`
//! is the row space of the multiples `u * g` of its generators. The ring
//! relations are handled by working in the normal-form basis of their
//! Gröbner basis (for a hypersurface this is the relation itself): columns
//! are the degree-`D` monomials standard for the relations, and each row is
//! the relation-normal form of `u * g` for a standard `u`. Rows are brought
//! to echelon form over `F_p` one at a time; membership of a candidate is a
//! reduction to zero against the echelon rows.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

use crate::field::PrimeField;
use crate::groebner::{standard_monomials, GroebnerBasis};
use crate::poly::{monomials_of_degree, Monomial, MonomialOrder, Polynomial};

use super::NuError;

/// Relation-aware indexing of the degree-`D` monomials.
struct DegreeIndex {
    /// All degree-D monomials in descending monomial order.
    monomials: Vec<Monomial>,
    lookup: HashMap<Monomial, u32>,
    /// For each monomial: the column index if it is standard for the
    /// relations, else the relation whose leading monomial divides it.
    role: Vec<Role>,
    ncols: usize,
}

#[derive(Clone, Copy)]
enum Role {
    Column(u32),
    Reducer(u32),
}

impl DegreeIndex {
    fn new(nvars: usize, degree: u64, order: MonomialOrder, relations: &[Polynomial]) -> Self {
        let mut monomials = monomials_of_degree(nvars, degree);
        monomials.sort_by(|a, b| order.cmp(b, a));
        let lookup = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i as u32))
            .collect();
        let mut ncols = 0u32;
        let role = monomials
            .iter()
            .map(|m| {
                match relations
                    .iter()
                    .position(|g| g.leading_monomial().is_some_and(|l| l.divides(m)))
                {
                    Some(k) => Role::Reducer(k as u32),
                    None => {
                        ncols += 1;
                        Role::Column(ncols - 1)
                    }
                }
            })
            .collect();
        DegreeIndex {
            monomials,
            lookup,
            role,
            ncols: ncols as usize,
        }
    }
}

/// Sparse row-echelon store with monic pivot rows.
struct Echelon {
    field: PrimeField,
    pivot_of: Vec<u32>,
    rows: Vec<Vec<(u32, u32)>>,
    scratch: Vec<u64>,
}

const NO_PIVOT: u32 = u32::MAX;

impl Echelon {
    fn new(field: PrimeField, ncols: usize) -> Self {
        Echelon {
            field,
            pivot_of: vec![NO_PIVOT; ncols],
            rows: Vec::new(),
            scratch: vec![0; ncols],
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` (sparse, sorted by column); returns the residual, empty if
    /// `v` lies in the row space.
    fn reduce(&mut self, v: &[(u32, u32)]) -> Vec<(u32, u32)> {
        if v.is_empty() {
            return Vec::new();
        }
        let p = self.field.characteristic();
        let lo = v[0].0 as usize;
        let mut hi = lo;
        for &(c, x) in v {
            self.scratch[c as usize] = x as u64;
            hi = hi.max(c as usize);
        }
        let mut out = Vec::new();
        let mut c = lo;
        while c <= hi {
            let x = self.scratch[c] % p;
            self.scratch[c] = 0;
            if x == 0 {
                c += 1;
                continue;
            }
            let piv = self.pivot_of[c];
            if piv == NO_PIVOT {
                out.push((c as u32, x as u32));
                c += 1;
                continue;
            }
            let factor = p - x;
            for &(cc, y) in &self.rows[piv as usize][1..] {
                let cc = cc as usize;
                self.scratch[cc] = (self.scratch[cc] + factor * y as u64) % p;
                hi = hi.max(cc);
            }
            c += 1;
        }
        out
    }

    /// Insert a row; returns true if the rank grew.
    fn insert(&mut self, v: &[(u32, u32)]) -> bool {
        let mut r = self.reduce(v);
        if r.is_empty() {
            return false;
        }
        let inv = self.field.inv(r[0].1);
        for e in r.iter_mut() {
            e.1 = self.field.mul(e.1, inv);
        }
        self.pivot_of[r[0].0 as usize] = self.rows.len() as u32;
        self.rows.push(r);
        true
    }
}

/// The degree-`D` piece of a target ideal as an echelonized row space.
pub(crate) struct DegreeSystem {
    field: PrimeField,
    index: DegreeIndex,
    relations: Vec<Polynomial>,
    echelon: Echelon,
}

impl DegreeSystem {
    /// `target_gens` excludes the relations; `rel_gb` is the Gröbner basis
    /// of the relations (empty in a polynomial ring).
    pub(crate) fn build(
        target_gens: &[Polynomial],
        rel_gb: &GroebnerBasis,
        degree: u64,
        deadline: Option<Instant>,
    ) -> Result<Self, NuError> {
        let ring = rel_gb.ring();
        let field = ring.field();
        let relations = rel_gb.elements().to_vec();
        let index = DegreeIndex::new(ring.nvars(), degree, ring.order(), &relations);
        let echelon = Echelon::new(field, index.ncols);
        let mut sys = DegreeSystem {
            field,
            index,
            relations,
            echelon,
        };
        if sys.index.ncols == 0 {
            return Ok(sys);
        }
        let rel_leads: Vec<Monomial> = sys.relations.iter().filter_map(|g| g.leading_monomial().cloned()).collect();
        for g in target_gens {
            let Some(dg) = g.degree() else { continue };
            if dg > degree {
                continue;
            }
            for (k, u) in standard_monomials(ring.nvars(), &rel_leads, degree - dg).into_iter().enumerate() {
                if k % 256 == 0 {
                    if let Some(t) = deadline {
                        if Instant::now() > t {
                            return Err(NuError::ResourceLimit("linear-algebra time budget".into()));
                        }
                    }
                }
                let row = sys.coordinates_of_product(&u, g);
                sys.echelon.insert(&row);
                if sys.echelon.rank() == sys.index.ncols {
                    return Ok(sys);
                }
            }
        }
        Ok(sys)
    }

    pub(crate) fn ncols(&self) -> usize {
        self.index.ncols
    }

    pub(crate) fn rank(&self) -> usize {
        self.echelon.rank()
    }

    /// Dimension of the degree-`D` piece of the quotient.
    pub(crate) fn quotient_dimension(&self) -> usize {
        self.ncols() - self.rank()
    }

    /// Relation-normal form of `u * g` in column coordinates.
    fn coordinates_of_product(&self, u: &Monomial, g: &Polynomial) -> Vec<(u32, u32)> {
        let seed = g.terms().iter().map(|(t, c)| (t.mul(u), *c));
        self.normal_coordinates(seed)
    }

    /// Sweep in descending monomial order, replacing relation-leading
    /// monomials by the relation tails.
    fn normal_coordinates(&self, seed: impl Iterator<Item = (Monomial, u32)>) -> Vec<(u32, u32)> {
        let f = self.field;
        let mut vals: HashMap<u32, u32> = HashMap::new();
        let mut heap: BinaryHeap<Reverse<u32>> = BinaryHeap::new();
        for (m, c) in seed {
            let i = self.index.lookup[&m];
            let e = vals.entry(i).or_insert_with(|| {
                heap.push(Reverse(i));
                0
            });
            *e = f.add(*e, c);
        }
        let mut out = Vec::new();
        while let Some(Reverse(i)) = heap.pop() {
            let c = vals.remove(&i).unwrap_or(0);
            if c == 0 {
                continue;
            }
            match self.index.role[i as usize] {
                Role::Column(col) => out.push((col, c)),
                Role::Reducer(k) => {
                    let g = &self.relations[k as usize];
                    let m = &self.index.monomials[i as usize];
                    let (lead, lc) = g.leading_term().unwrap();
                    let u = lead.quotient_of(m).unwrap();
                    let factor = f.neg(f.mul(c, f.inv(*lc)));
                    for (t, a) in &g.terms()[1..] {
                        let j = self.index.lookup[&t.mul(&u)];
                        let e = vals.entry(j).or_insert_with(|| {
                            heap.push(Reverse(j));
                            0
                        });
                        *e = f.add(*e, f.mul(*a, factor));
                    }
                }
            }
        }
        // columns were produced in increasing index order
        out
    }

    /// Membership of a homogeneous degree-`D` polynomial.
    pub(crate) fn contains(&mut self, f: &Polynomial) -> bool {
        if self.rank() == self.ncols() {
            return true;
        }
        let v = self.normal_coordinates(f.terms().iter().cloned());
        self.echelon.reduce(&v).is_empty()
    }
}
