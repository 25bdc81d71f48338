use std::time::Duration;

use proptest::prelude::*;

use super::*;
use crate::poly::{GradedRing, MonomialOrder};

fn ring(p: u64, vars: &[&str]) -> GradedRing {
    GradedRing::from_text(p, vars, &[] as &[&str], MonomialOrder::Grevlex).unwrap()
}

fn polys(r: &GradedRing, gens: &[&str]) -> Vec<Polynomial> {
    gens.iter().map(|g| r.parse(g).unwrap()).collect()
}

fn gb_strings(gb: &GroebnerBasis) -> Vec<String> {
    gb.elements().iter().map(|g| g.to_string()).collect()
}

/// Independent check of the Buchberger criterion: every S-polynomial of the
/// basis reduces to zero by plain division.
fn is_groebner(elems: &[Polynomial]) -> bool {
    for i in 0..elems.len() {
        for j in i + 1..elems.len() {
            let (a, b) = (&elems[i], &elems[j]);
            let l = a.leading_monomial().unwrap().lcm(b.leading_monomial().unwrap());
            let s = s_polynomial(a, b, &l);
            if !normal_form_by(&s, elems).is_zero() {
                return false;
            }
        }
    }
    true
}

#[test]
fn coprime_squares_are_already_a_basis() {
    let r = ring(3, &["x", "y"]);
    let gb = buchberger(&polys(&r, &["x^2", "y^2"]), MonomialOrder::Grevlex, Budget::default()).unwrap();
    assert_eq!(gb_strings(&gb), vec!["y^2", "x^2"]);
    let gb = buchberger(&polys(&r, &["x^4", "y^6"]), MonomialOrder::Grevlex, Budget::default()).unwrap();
    assert_eq!(gb_strings(&gb), vec!["x^4", "y^6"]);
}

#[test]
fn hand_computed_char_two_basis() {
    let r = ring(2, &["x", "y"]);
    let gb = buchberger(&polys(&r, &["x - y", "y^2"]), MonomialOrder::Grevlex, Budget::default()).unwrap();
    assert_eq!(gb_strings(&gb), vec!["x + y", "y^2"]);
    assert!(normal_form(&r.parse("x^2").unwrap(), &gb).unwrap().is_zero());
    assert_eq!(normal_form(&r.parse("x").unwrap(), &gb).unwrap().to_string(), "y");
}

#[test]
fn normal_forms_and_membership() {
    let r = ring(2, &["x", "y"]);
    let k = IdealHandle::parse(&r, &["x^2", "y^2"]).unwrap();
    let gb = k.groebner(Budget::default()).unwrap();
    assert!(normal_form(&r.parse("x^2").unwrap(), gb).unwrap().is_zero());
    assert_eq!(normal_form(&r.parse("x*y").unwrap(), gb).unwrap().to_string(), "x*y");
    let sq = r.parse("x + y").unwrap().checked_pow(2).unwrap();
    assert!(normal_form(&sq, gb).unwrap().is_zero());
    assert!(ideal_membership(&r.parse("x^2").unwrap(), &k, Budget::default()).unwrap());
    assert!(!ideal_membership(&r.parse("x*y").unwrap(), &k, Budget::default()).unwrap());
    assert!(ideal_membership(&sq, &k, Budget::default()).unwrap());
}

#[test]
fn standard_counts_and_socle_degrees() {
    let r3 = ring(3, &["x", "y"]);
    let k = IdealHandle::parse(&r3, &["x^2", "y^2"]).unwrap();
    assert_eq!(k.standard_monomial_count(2, Budget::default()).unwrap(), 1);
    assert_eq!(k.standard_monomial_count(3, Budget::default()).unwrap(), 0);
    assert_eq!(k.top_nonzero_degree(Budget::default()).unwrap(), 2);

    let k = IdealHandle::parse(&r3, &["x^4", "y^6"]).unwrap();
    assert_eq!(k.standard_monomial_count(8, Budget::default()).unwrap(), 1);
    assert_eq!(k.top_nonzero_degree(Budget::default()).unwrap(), 8);

    let r = ring(5, &["x", "y", "z"]);
    let m = IdealHandle::maximal(&r);
    assert_eq!(m.top_nonzero_degree(Budget::default()).unwrap(), 0);
}

#[test]
fn non_artinian_and_unit_are_errors() {
    let r = ring(5, &["x", "y"]);
    let k = IdealHandle::parse(&r, &["x^3", "x*y"]).unwrap();
    assert_eq!(
        k.top_nonzero_degree(Budget::default()),
        Err(GbError::NotArtinian { var: "y".into() })
    );
    let u = IdealHandle::unit(&r);
    assert_eq!(u.top_nonzero_degree(Budget::default()), Err(GbError::UnitIdeal));
    assert_eq!(u.standard_monomial_count(0, Budget::default()).unwrap(), 0);
}

#[test]
fn relations_are_adjoined() {
    let r = GradedRing::from_text(7, &["x", "y"], &["x*y"], MonomialOrder::Grevlex).unwrap();
    let k = IdealHandle::parse(&r, &["x^2", "y^3"]).unwrap();
    // quotient k[x,y]/(x^2, y^3, xy) has basis 1, x, y, y^2
    assert_eq!(k.standard_monomial_count(1, Budget::default()).unwrap(), 2);
    assert_eq!(k.standard_monomial_count(2, Budget::default()).unwrap(), 1);
    assert_eq!(k.top_nonzero_degree(Budget::default()).unwrap(), 2);
}

#[test]
fn nontrivial_basis_satisfies_criterion() {
    let r = ring(101, &["x", "y", "z"]);
    for order in [MonomialOrder::Grevlex, MonomialOrder::Lex] {
        let gens = polys(&r, &["x^2 + y*z", "x*y + z^2", "y^3 - x*z^2"]);
        let gb = buchberger(&gens, order, Budget::default()).unwrap();
        assert!(is_groebner(gb.elements()));
        // generators reduce to zero
        for g in &gens {
            assert!(normal_form(g, &gb).unwrap().is_zero());
        }
        // reducedness and monicity
        for (i, g) in gb.elements().iter().enumerate() {
            assert_eq!(g.leading_term().unwrap().1, 1);
            for (j, h) in gb.elements().iter().enumerate() {
                if i != j {
                    let lm = h.leading_monomial().unwrap();
                    assert!(g.terms().iter().all(|(t, _)| !lm.divides(t)));
                }
            }
        }
    }
}

#[test]
fn budget_exhaustion_is_reported() {
    let r = ring(101, &["x", "y", "z"]);
    let gens = polys(&r, &["x^2 + y*z", "x*y + z^2", "y^3 - x*z^2"]);
    let tight = Budget {
        max_reductions: 1,
        max_time: Duration::from_secs(10),
    };
    assert!(matches!(
        buchberger(&gens, MonomialOrder::Grevlex, tight),
        Err(GbError::ResourceLimit(_))
    ));
}

#[test]
fn rejects_inhomogeneous_input() {
    let r = ring(5, &["x", "y"]);
    let err = IdealHandle::new(&r, polys(&r, &["x^2 + y"])).unwrap_err();
    assert!(matches!(err, GbError::NotHomogeneous { index: 0, .. }));
}

#[test]
fn truncated_basis_is_exact_below_the_cap() {
    let r = ring(31, &["x", "y", "z"]);
    let gens = polys(&r, &["x^2 + y*z", "x*y + z^2", "y^3 - x*z^2"]);
    let full = buchberger(&gens, MonomialOrder::Grevlex, Budget::default()).unwrap();
    let cut = buchberger_with(
        &gens,
        MonomialOrder::Grevlex,
        GbConfig {
            budget: Budget::default(),
            degree_limit: Some(4),
        },
    )
    .unwrap();
    for d in 0..=4 {
        for u in crate::poly::monomials_of_degree(3, d) {
            let f = Polynomial::term(r.ambient(), u, 1);
            assert_eq!(normal_form(&f, &full).unwrap(), normal_form(&f, &cut).unwrap());
        }
    }
}

fn arb_homogeneous(deg: u64) -> impl Strategy<Value = Vec<(Vec<u64>, u64)>> {
    let monos = crate::poly::monomials_of_degree(3, deg);
    prop::collection::vec((0..monos.len(), 1u64..5), 1..4).prop_map(move |picks| {
        picks
            .into_iter()
            .map(|(i, c)| (monos[i].exponents().to_vec(), c))
            .collect()
    })
}

fn build(r: &GradedRing, terms: &[(Vec<u64>, u64)]) -> Polynomial {
    Polynomial::from_terms(
        r.ambient(),
        terms.iter().map(|(e, c)| (crate::poly::Monomial::try_new(e).unwrap(), *c)),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduced_basis_is_permutation_invariant(
        a in arb_homogeneous(2), b in arb_homogeneous(2), c in arb_homogeneous(3)
    ) {
        let r = ring(5, &["x", "y", "z"]);
        let gens = vec![build(&r, &a), build(&r, &b), build(&r, &c)];
        let g1 = buchberger(&gens, MonomialOrder::Grevlex, Budget::default()).unwrap();
        let rev: Vec<_> = gens.iter().rev().cloned().collect();
        let g2 = buchberger(&rev, MonomialOrder::Grevlex, Budget::default()).unwrap();
        prop_assert_eq!(g1.elements(), g2.elements());
        prop_assert!(is_groebner(g1.elements()));
    }

    #[test]
    fn normal_form_is_idempotent(
        a in arb_homogeneous(2), b in arb_homogeneous(3), f in arb_homogeneous(4)
    ) {
        let r = ring(7, &["x", "y", "z"]);
        let gb = buchberger(&[build(&r, &a), build(&r, &b)], MonomialOrder::Grevlex, Budget::default()).unwrap();
        let f = build(&r, &f);
        let once = normal_form(&f, &gb).unwrap();
        prop_assert_eq!(normal_form(&once, &gb).unwrap(), once.clone());
        let leads: Vec<_> = gb.leading_monomials().cloned().collect();
        prop_assert!(once.terms().iter().all(|(t, _)| !leads.iter().any(|l| l.divides(t))));
    }

    #[test]
    fn monomial_membership_matches_divisibility(
        gens in prop::collection::vec(prop::collection::vec(0u64..4, 3), 1..5),
        f in arb_homogeneous(4)
    ) {
        let r = ring(3, &["x", "y", "z"]);
        let mons: Vec<_> = gens.iter().map(|e| crate::poly::Monomial::try_new(e).unwrap()).collect();
        let k = IdealHandle::new(&r, mons.iter().map(|m| Polynomial::term(r.ambient(), m.clone(), 1)).collect()).unwrap();
        let f = build(&r, &f);
        let oracle = f.terms().iter().all(|(t, _)| mons.iter().any(|m| m.divides(t)));
        prop_assert_eq!(ideal_membership(&f, &k, Budget::default()).unwrap(), oracle);
    }
}
