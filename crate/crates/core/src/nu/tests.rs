use proptest::prelude::*;

use super::*;
use crate::poly::{Monomial, MonomialOrder};

fn ring(p: u64, vars: &[&str]) -> GradedRing {
    GradedRing::from_text(p, vars, &[] as &[&str], MonomialOrder::Grevlex).unwrap()
}

fn ideal(r: &GradedRing, gens: &[&str]) -> IdealHandle {
    IdealHandle::parse(r, gens).unwrap()
}

fn gen_strings(i: &IdealHandle) -> Vec<String> {
    let mut v: Vec<String> = i.generators().iter().map(|g| g.to_string()).collect();
    v.sort();
    v
}

/// Exhaustive oracle for `I = m` against a monomial `J`: the largest degree
/// of a monomial outside `J^[q]`, scanning the whole box of exponents.
fn oracle_nu_maximal(nvars: usize, j_gens: &[Vec<u64>], q: u64) -> u64 {
    let k: Vec<Vec<u64>> = j_gens.iter().map(|g| g.iter().map(|e| e * q).collect()).collect();
    // every variable has a pure power in J, so exponents stay below its cap
    let caps: Vec<u64> = (0..nvars)
        .map(|i| {
            k.iter()
                .filter(|g| g.iter().enumerate().all(|(v, &e)| v == i || e == 0))
                .map(|g| g[i])
                .min()
                .unwrap()
        })
        .collect();
    let mut best = 0;
    let mut exps = vec![0u64; nvars];
    loop {
        if !k.iter().any(|g| g.iter().zip(&exps).all(|(a, b)| a <= b)) {
            best = best.max(exps.iter().sum());
        }
        let mut i = 0;
        loop {
            if i == nvars {
                return best;
            }
            exps[i] += 1;
            if exps[i] < caps[i] {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn bracket_powers() {
    let r = ring(157, &["x", "y", "z"]);
    let b = bracket_power(&IdealHandle::maximal(&r), 157).unwrap();
    assert_eq!(gen_strings(&b), vec!["x^157", "y^157", "z^157"]);
    let r2 = ring(2, &["x", "y"]);
    assert_eq!(gen_strings(&bracket_power(&ideal(&r2, &["x+y"]), 2).unwrap()), vec!["x^2 + y^2"]);
    assert_eq!(gen_strings(&bracket_power(&ideal(&r2, &["x^2", "y^3"]), 2).unwrap()), vec!["x^4", "y^6"]);
    assert!(matches!(
        bracket_power(&ideal(&r2, &["x"]), 6),
        Err(NuError::NotPowerOfP { q: 6, p: 2 })
    ));
}

#[test]
fn bracket_power_composes() {
    let r = ring(3, &["x", "y", "z"]);
    let j = ideal(&r, &["x^2 + y*z", "x*y - z^2", "y"]);
    let twice = bracket_power(&bracket_power(&j, 3).unwrap(), 3).unwrap();
    let once = bracket_power(&j, 9).unwrap();
    assert_eq!(gen_strings(&twice), gen_strings(&once));
}

#[test]
fn ideal_powers() {
    let r = ring(5, &["x", "y", "z"]);
    let m2 = ideal_power(&ideal(&r, &["x", "y"]), 2);
    assert_eq!(gen_strings(&m2), vec!["x*y", "x^2", "y^2"]);
    assert!(ideal_power(&ideal(&r, &["x^2 + y^2"]), 0).generators()[0].is_one());
    assert_eq!(ideal_power(&IdealHandle::maximal(&r), 3).generators().len(), 10);
    assert_eq!(compositions(3, 3).len(), 10);
}

#[test]
fn containment_examples_all_kernels() {
    let r = ring(3, &["x", "y"]);
    let m = IdealHandle::maximal(&r);
    let k = ideal(&r, &["x^2", "y^2"]);
    let k2 = ideal(&r, &["x^4", "y^6"]);
    let eng = NuEngine::default();
    for method in [Method::Groebner, Method::LinearAlgebra, Method::SocleFastpath] {
        let q = |power, target| eng.contains_power(ContainmentQuery { base: &m, power, target }, method).unwrap();
        assert!(q(3, &k), "{method:?}");
        assert!(!q(2, &k), "{method:?}");
        assert!(!q(8, &k2), "{method:?}");
        assert!(q(9, &k2), "{method:?}");
    }
}

#[test]
fn nu_examples() {
    let r2 = ring(2, &["x", "y"]);
    let m2 = IdealHandle::maximal(&r2);
    assert_eq!(nu(&m2, &m2, 1).unwrap().nu, 2);
    let r3 = ring(3, &["x", "y"]);
    let m3 = IdealHandle::maximal(&r3);
    let rec = nu(&m3, &m3, 2).unwrap();
    assert_eq!((rec.nu, rec.q, rec.e), (16, 9, 2));
    assert_eq!(rec.method, Method::SocleFastpath);
    let j = ideal(&r2, &["x^2", "y^3"]);
    assert_eq!(nu(&m2, &j, 1).unwrap().nu, 8);
    // oracle check of the same value
    assert_eq!(oracle_nu_maximal(2, &[vec![2, 0], vec![0, 3]], 2), 8);
}

#[test]
fn nu_sequence_examples() {
    let mut cache = CacheStore::in_memory();
    let r2 = ring(2, &["x", "y"]);
    let m2 = IdealHandle::maximal(&r2);
    let seq: Vec<u64> = nu_sequence(&m2, &m2, 3, &mut cache).unwrap().iter().map(|r| r.nu).collect();
    assert_eq!(seq, vec![2, 6, 14]);
    let r1 = ring(3, &["x"]);
    let x = ideal(&r1, &["x"]);
    let seq: Vec<u64> = nu_sequence(&x, &x, 2, &mut cache).unwrap().iter().map(|r| r.nu).collect();
    assert_eq!(seq, vec![2, 8]);
    let j = ideal(&r2, &["x^2", "y^3"]);
    let seq: Vec<u64> = nu_sequence(&m2, &j, 2, &mut cache).unwrap().iter().map(|r| r.nu).collect();
    assert_eq!(seq, vec![8, 18]);
    assert_eq!(
        seq,
        (1..=2).map(|e| oracle_nu_maximal(2, &[vec![2, 0], vec![0, 3]], 1 << e)).collect::<Vec<_>>()
    );
}

#[test]
fn warm_cache_performs_no_probes() {
    let mut cache = CacheStore::in_memory();
    let r = ring(3, &["x", "y", "z"]);
    let m = IdealHandle::maximal(&r);
    let eng = NuEngine::default();
    eng.nu_sequence(&m, &m, 2, &mut cache).unwrap();
    let cold = eng.stats().probes;
    assert!(cold > 0);
    let again = eng.nu_sequence(&m, &m, 2, &mut cache).unwrap();
    assert_eq!(eng.stats().probes, cold);
    assert_eq!(eng.stats().cache_hits, 2);
    assert_eq!(again.iter().map(|r| r.nu).collect::<Vec<_>>(), vec![6, 24]);
}

#[test]
fn parallel_probing_agrees() {
    let r = ring(5, &["x", "y", "z"]);
    let m = IdealHandle::maximal(&r);
    let j = ideal(&r, &["x^2", "y^2", "z^3", "x*y*z"]);
    let serial = NuEngine::default().nu(&m, &j, 1).unwrap().nu;
    let par = NuEngine::new(EngineConfig {
        threads: 4,
        ..EngineConfig::default()
    })
    .nu(&m, &j, 1)
    .unwrap()
    .nu;
    assert_eq!(serial, par);
    let oracle = oracle_nu_maximal(3, &[vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 3], vec![1, 1, 1]], 5);
    assert_eq!(serial, oracle);
}

#[test]
fn principal_ideal_threshold_numerators() {
    // fpt of the node xy in char p is 1: nu_e((xy), m) = p^e - 1
    let r = ring(5, &["x", "y"]);
    let f = ideal(&r, &["x*y"]);
    let m = IdealHandle::maximal(&r);
    for method in [Method::Groebner, Method::LinearAlgebra] {
        let eng = NuEngine::new(EngineConfig {
            method: Some(method),
            ..EngineConfig::default()
        });
        assert_eq!(eng.nu(&f, &m, 1).unwrap().nu, 4);
        assert_eq!(eng.nu(&f, &m, 2).unwrap().nu, 24);
    }
}

#[test]
fn j_must_be_m_primary() {
    let r = ring(3, &["x", "y"]);
    let m = IdealHandle::maximal(&r);
    let j = ideal(&r, &["x"]);
    assert!(matches!(nu(&m, &j, 1), Err(NuError::NotMPrimary(_))));
    let u = IdealHandle::unit(&r);
    assert!(matches!(nu(&m, &u, 1), Err(NuError::UnitTarget)));
}

#[test]
fn witness_checks_report_without_asserting() {
    let mk = |e, nu| NuRecord {
        ring_digest: String::new(),
        i_digest: String::new(),
        j_digest: String::new(),
        e,
        q: 0,
        nu,
        method: Method::Groebner,
        wall_ms: 0,
    };
    let checks = frobenius_witness_checks(&[mk(1, 5), mk(2, 9), mk(3, 40)], 2);
    assert_eq!(checks.iter().map(|c| c.holds).collect::<Vec<_>>(), vec![false, true]);
}

#[test]
fn digests_ignore_generator_order_and_scaling() {
    let r = ring(7, &["x", "y"]);
    let a = ideal(&r, &["x^2", "3*y^3"]);
    let b = ideal(&r, &["y^3", "x^2"]);
    assert_eq!(ideal_digest(&a), ideal_digest(&b));
    assert_ne!(ideal_digest(&a), ideal_digest(&ideal(&r, &["x^2"])));
    assert_eq!(ring_digest(&r).len(), 64);
}

#[test]
fn quotient_ring_kernels_agree() {
    // a cubic cone, small characteristic
    let r = GradedRing::from_text(5, &["x", "y", "z"], &["x^3 + y^3 + z^3"], MonomialOrder::Grevlex).unwrap();
    let m = IdealHandle::maximal(&r);
    let target = bracket_power(&m, 5).unwrap();
    let eng = NuEngine::default();
    for d in 0..16 {
        let sm = target.standard_monomial_count(d, Budget::default()).unwrap() as usize;
        assert_eq!(eng.quotient_dimension_linear_algebra(&target, d).unwrap(), sm, "degree {d}");
    }
    let la = NuEngine::new(EngineConfig {
        method: Some(Method::LinearAlgebra),
        ..EngineConfig::default()
    });
    let gb = NuEngine::new(EngineConfig {
        method: Some(Method::Groebner),
        ..EngineConfig::default()
    });
    let a = la.nu(&m, &m, 1).unwrap().nu;
    assert_eq!(a, gb.nu(&m, &m, 1).unwrap().nu);
    assert_eq!(a, eng.nu(&m, &m, 1).unwrap().nu);
    let i = IdealHandle::parse(&r, &["x^2", "y*z"]).unwrap();
    assert_eq!(la.nu(&i, &m, 1).unwrap().nu, gb.nu(&i, &m, 1).unwrap().nu);
}

fn arb_poly(deg: u64, nvars: usize) -> impl Strategy<Value = Vec<(Vec<u64>, u64)>> {
    let monos = crate::poly::monomials_of_degree(nvars, deg);
    prop::collection::vec((0..monos.len(), 1u64..7), 1..4)
        .prop_map(move |picks| picks.into_iter().map(|(i, c)| (monos[i].exponents().to_vec(), c)).collect())
}

fn build(r: &GradedRing, terms: &[(Vec<u64>, u64)]) -> Polynomial {
    Polynomial::from_terms(r.ambient(), terms.iter().map(|(e, c)| (Monomial::try_new(e).unwrap(), *c)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernels_agree_on_random_queries(
        p in prop::sample::select(vec![2u64, 3, 5]),
        i1 in arb_poly(1, 3), i2 in arb_poly(2, 3),
        k1 in arb_poly(2, 3), k2 in arb_poly(3, 3),
        power in 0u64..5,
    ) {
        let r = ring(p, &["x", "y", "z"]);
        let base = IdealHandle::new(&r, vec![build(&r, &i1), build(&r, &i2)]).unwrap();
        prop_assume!(!base.generators().is_empty());
        let mut kg = vec![build(&r, &k1), build(&r, &k2)];
        kg.extend(["x^4", "y^4", "z^4"].iter().map(|s| r.parse(s).unwrap()));
        let target = IdealHandle::new(&r, kg).unwrap();
        let eng = NuEngine::default();
        let query = ContainmentQuery { base: &base, power, target: &target };
        let a = eng.contains_power(query, Method::Groebner).unwrap();
        let b = eng.contains_power(query, Method::LinearAlgebra).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn containment_is_monotone(
        i1 in arb_poly(1, 2), i2 in arb_poly(2, 2), k1 in arb_poly(3, 2),
    ) {
        let r = ring(3, &["x", "y"]);
        let base = IdealHandle::new(&r, vec![build(&r, &i1), build(&r, &i2)]).unwrap();
        let mut kg = vec![build(&r, &k1)];
        kg.extend(["x^5", "y^5"].iter().map(|s| r.parse(s).unwrap()));
        let target = IdealHandle::new(&r, kg).unwrap();
        let eng = NuEngine::default();
        let mut seen_true = false;
        for power in 0..10 {
            let c = eng.contains_power(ContainmentQuery { base: &base, power, target: &target }, Method::Groebner).unwrap();
            prop_assert!(!(seen_true && !c));
            seen_true |= c;
        }
    }
}
