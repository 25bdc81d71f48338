use std::cmp::Ordering;

use crate::poly::{Monomial, Polynomial};

/// `a - c * u * b`, with both inputs sorted descending.
fn merge_sub(a: &[(Monomial, u32)], b: &[(Monomial, u32)], u: &Monomial, c: u32, poly: &Polynomial) -> Vec<(Monomial, u32)> {
    let field = poly.ring().field();
    let order = poly.ring().order();
    let negc = field.neg(c);
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut i = 0;
    let mut bj = b.iter().map(|(m, v)| (m.mul(u), field.mul(*v, negc))).peekable();
    while i < a.len() {
        match bj.peek() {
            None => break,
            Some((mb, vb)) => match order.cmp(&a[i].0, mb) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let (mb, vb) = bj.next().unwrap();
                    out.push((mb, vb));
                }
                Ordering::Equal => {
                    let v = field.add(a[i].1, *vb);
                    if v != 0 {
                        out.push((a[i].0.clone(), v));
                    }
                    i += 1;
                    bj.next();
                }
            },
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend(bj);
    out
}

fn reduce_with(f: &Polynomial, reducers: &[&Polynomial]) -> Polynomial {
    let field = f.ring().field();
    let leads: Vec<(&Monomial, u32)> = reducers
        .iter()
        .map(|g| {
            let (m, c) = g.leading_term().expect("nonzero reducer");
            (m, field.inv(*c))
        })
        .collect();
    let mut rest: Vec<(Monomial, u32)> = f.terms().to_vec();
    let mut pos = 0;
    while pos < rest.len() {
        let found = leads.iter().position(|(lm, _)| lm.divides(&rest[pos].0));
        match found {
            None => pos += 1,
            Some(k) => {
                let (lm, inv) = leads[k];
                let u = lm.quotient_of(&rest[pos].0).unwrap();
                let c = field.mul(rest[pos].1, inv);
                let tail = merge_sub(&rest[pos + 1..], &reducers[k].terms()[1..], &u, c, f);
                rest.truncate(pos);
                rest.extend(tail);
            }
        }
    }
    Polynomial::from_sorted_terms(f.ring(), rest)
}

pub(super) fn normal_form_active(f: &Polynomial, basis: &[Polynomial], active: &[bool]) -> Polynomial {
    let reducers: Vec<&Polynomial> = basis
        .iter()
        .zip(active)
        .filter_map(|(g, a)| a.then_some(g))
        .collect();
    reduce_with(f, &reducers)
}

/// Full reduction of `f` by a list of polynomials (not necessarily a basis).
/// All inputs must share `f`'s ring and order.
pub fn normal_form_by(f: &Polynomial, reducers: &[Polynomial]) -> Polynomial {
    let refs: Vec<&Polynomial> = reducers.iter().filter(|g| !g.is_zero()).collect();
    reduce_with(f, &refs)
}
