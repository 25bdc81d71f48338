//! Certified brackets for `c^J(I) = lim nu_e / p^e`, denominator-shaped
//! rational reconstruction, and the Klein-type cone verification harness.
//!
//! The upper end of a bracket is always certified: if `I^(nu+1) ⊆ J^[q]` and
//! `I` has `μ` generators, then `I^(μ(q'-1) + (nu+1)q') ⊆ (I^(nu+1))^[q'] ⊆
//! J^[q q']` for every `q'`, hence `c <= (nu + 1 + μ)/q`. The lower end
//! `nu/q` is certified only in a polynomial ring, where `nu_e/p^e` increases
//! with `e`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::field::is_prime;
use crate::groebner::IdealHandle;
use crate::nu::{CacheStore, NuEngine, NuError, NuRecord};
use crate::poly::{GradedRing, MonomialOrder};
use crate::rational::{self, Rational};

#[derive(Debug, Error)]
pub enum ThresholdError {
    #[error("no records supplied")]
    NoRecords,
    #[error("records: {0}")]
    InconsistentRecords(String),
    #[error("inconsistent bracket: lower bound {lo} exceeds upper bound {hi}")]
    Inverted { lo: String, hi: String },
    #[error("{field}: {msg}")]
    Precondition { field: &'static str, msg: String },
    #[error(transparent)]
    Nu(#[from] NuError),
}

fn precondition(field: &'static str, msg: impl Into<String>) -> ThresholdError {
    ThresholdError::Precondition { field, msg: msg.into() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalInterval {
    #[serde(with = "rational::text")]
    pub lo: Rational,
    #[serde(with = "rational::text")]
    pub hi: Rational,
    pub lo_certified: bool,
    pub hi_certified: bool,
    /// Level whose record gives the upper end.
    pub e_used: u32,
}

impl RationalInterval {
    pub fn contains(&self, x: &Rational) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

/// Bracket `c^J(I)` from `nu` records of one `(ring, I, J)` at increasing
/// levels. `mu_i` is the number of generators of `I`; `lo_certified` should
/// be true only for a ring without relations.
pub fn bracket_threshold(records: &[NuRecord], mu_i: u64, lo_certified: bool) -> Result<RationalInterval, ThresholdError> {
    let first = records.first().ok_or(ThresholdError::NoRecords)?;
    for w in records.windows(2) {
        if w[1].e <= w[0].e {
            return Err(ThresholdError::InconsistentRecords("levels must increase".into()));
        }
        if (&w[1].ring_digest, &w[1].i_digest, &w[1].j_digest) != (&w[0].ring_digest, &w[0].i_digest, &w[0].j_digest) {
            return Err(ThresholdError::InconsistentRecords("records describe different (ring, I, J)".into()));
        }
    }
    let q = |r: &NuRecord| BigInt::from(r.q);
    let lo = records
        .iter()
        .map(|r| Rational::new(BigInt::from(r.nu), q(r)))
        .max()
        .expect("nonempty");
    let (hi, e_used) = records
        .iter()
        .map(|r| (Rational::new(BigInt::from(r.nu) + 1 + mu_i, q(r)), r.e))
        .min_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
        .unwrap_or((Rational::zero(), first.e));
    if hi < lo {
        return Err(ThresholdError::Inverted {
            lo: rational::to_text(&lo),
            hi: rational::to_text(&hi),
        });
    }
    Ok(RationalInterval {
        lo,
        hi,
        lo_certified,
        hi_certified: true,
        e_used,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DenominatorForm {
    /// Reduced denominator prime to `p`.
    IntegerOrPFree,
    /// `a/(p b)` in lowest terms, `gcd(a, p) = 1`.
    PTimesB,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReconstructionResult {
    #[serde(with = "rational::text_opt")]
    pub value: Option<Rational>,
    pub form: Option<DenominatorForm>,
    #[serde(serialize_with = "opt_int")]
    pub a: Option<BigInt>,
    #[serde(serialize_with = "opt_int")]
    pub b: Option<BigInt>,
    /// Distinct candidates seen, capped at 2.
    pub candidates: usize,
}

fn opt_int<S: serde::Serializer>(n: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    n.as_ref().map(|n| n.to_string()).serialize(s)
}

/// The unique rational in `interval` with denominator `b` or `p b`,
/// `b <= b_bound`; `None` if there is none or more than one.
pub fn reconstruct(interval: &RationalInterval, p: u64, b_bound: u64) -> ReconstructionResult {
    let mut found: Option<Rational> = None;
    let mut count = 0usize;
    let dens = (1..=b_bound).flat_map(|b| [BigInt::from(b), BigInt::from(b) * p]);
    'outer: for den in dens {
        let low = (&interval.lo * &den).ceil().to_integer();
        let high = (&interval.hi * &den).floor().to_integer();
        let mut n = low;
        while n <= high {
            let cand = Rational::new(n.clone(), den.clone());
            if found.as_ref() != Some(&cand) {
                count += 1;
                if count > 1 {
                    break 'outer;
                }
                found = Some(cand);
            }
            n += 1;
        }
    }
    match found {
        Some(v) if count == 1 => {
            let (a, den) = (v.numer().clone(), v.denom().clone());
            let pb = BigInt::from(p);
            let (form, b) = if (&den % &pb).is_zero() {
                (DenominatorForm::PTimesB, den / pb)
            } else {
                (DenominatorForm::IntegerOrPFree, den)
            };
            ReconstructionResult {
                value: Some(v),
                form: Some(form),
                a: Some(a),
                b: Some(b),
                candidates: 1,
            }
        }
        _ => ReconstructionResult {
            value: None,
            form: None,
            a: None,
            b: None,
            candidates: count,
        },
    }
}

/// `(3pd + d^2 - 9d + 15) / (2pd)`, the closed form for `c^m(m)` on the cone
/// over `x^(d-1) y + y^(d-1) z + z^(d-1) x`.
pub fn klein_cone_value(d: u64, p: u64) -> Rational {
    let (d, p) = (BigInt::from(d), BigInt::from(p));
    let num = BigInt::from(3) * &p * &d + &d * &d - BigInt::from(9) * &d + 15;
    Rational::new(num, BigInt::from(2) * p * d)
}

/// Side conditions of the closed form: `d >= 7` odd, `p` prime, `p >= d^2`,
/// `p ≡ ±2 (mod d^2 - 3d + 3)`.
pub fn klein_cone_preconditions(d: u64, p: u64) -> Result<(), ThresholdError> {
    if d < 7 || d.is_multiple_of(2) {
        return Err(precondition("d", format!("must be an odd integer >= 7, got {d}")));
    }
    if !is_prime(p) || p >= 1 << 31 {
        return Err(precondition("p", format!("{p} is not a supported prime")));
    }
    if p < d * d {
        return Err(precondition("p", format!("must satisfy p >= d^2 = {}, got {p}", d * d)));
    }
    let modulus = d * d - 3 * d + 3;
    let r = p % modulus;
    if r != 2 && r != modulus - 2 {
        return Err(precondition(
            "p",
            format!("{p} ≡ {r} (mod {modulus}), expected ±2"),
        ));
    }
    Ok(())
}

/// `F_p[x,y,z] / (x^(d-1) y + y^(d-1) z + z^(d-1) x)`.
pub fn klein_cone_ring(d: u64, p: u64) -> Result<GradedRing, crate::Error> {
    let k = d - 1;
    let h = format!("x^{k}*y + y^{k}*z + z^{k}*x");
    Ok(GradedRing::from_text(p, &["x", "y", "z"], &[h], MonomialOrder::Grevlex)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NuWindow {
    pub e: u32,
    pub nu: u64,
    /// `⌈c* p^e⌉ - 1 - μ`, forced by the certified upper bound.
    pub lower: i64,
    /// `⌊c* p^e⌋`, forced only when `nu_e/p^e <= c` is known.
    pub upper: i64,
    pub upper_certified: bool,
    pub meets_lower: bool,
    pub meets_upper: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalReport {
    #[serde(with = "rational::text")]
    pub lo: Rational,
    #[serde(with = "rational::text")]
    pub hi: Rational,
    pub lo_certified: bool,
    pub hi_certified: bool,
    pub contains_closed_form: bool,
    pub closed_form_below_hi: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DenominatorSummary {
    #[serde(with = "rational::int_text")]
    pub a: BigInt,
    #[serde(with = "rational::int_text")]
    pub b: BigInt,
    pub p_divides: bool,
    pub p_power: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Every computed quantity agrees with the closed form.
    Consistent,
    /// Only the uncertified side (`nu_e/p^e <= c`) disagrees.
    HeuristicWindowViolated,
    /// A certified bound excludes the closed form.
    CertifiedBoundViolated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KleinConeReport {
    pub d: u64,
    pub p: u64,
    #[serde(rename = "paper_value", with = "rational::text")]
    pub closed_form: Rational,
    pub interval: IntervalReport,
    pub nu_windows: Vec<NuWindow>,
    pub denominator: DenominatorSummary,
    pub verdict: Verdict,
}

/// Assemble the report from computed records for `I = J = m`.
pub fn klein_cone_report(d: u64, p: u64, records: &[NuRecord]) -> Result<KleinConeReport, ThresholdError> {
    klein_cone_preconditions(d, p)?;
    let c = klein_cone_value(d, p);
    let mu = 3u64;
    let lo_certified = false;
    let bracket = bracket_threshold(records, mu, lo_certified)?;
    let to_i64 = |r: Rational| r.to_integer().to_i64().expect("window fits i64");
    let nu_windows: Vec<NuWindow> = records
        .iter()
        .map(|r| {
            let scaled = &c * Rational::from_integer(BigInt::from(r.q));
            let lower = to_i64(scaled.ceil()) - 1 - mu as i64;
            let upper = to_i64(scaled.floor());
            NuWindow {
                e: r.e,
                nu: r.nu,
                lower,
                upper,
                upper_certified: lo_certified,
                meets_lower: r.nu as i64 >= lower,
                meets_upper: r.nu as i64 <= upper,
            }
        })
        .collect();
    let (num, den) = (c.numer().clone(), c.denom().clone());
    let denominator = DenominatorSummary {
        p_divides: (&den % BigInt::from(p)).is_zero(),
        p_power: rational::is_power_of(&den, p),
        a: num,
        b: den,
    };
    let interval = IntervalReport {
        contains_closed_form: bracket.contains(&c),
        closed_form_below_hi: c <= bracket.hi,
        lo: bracket.lo,
        hi: bracket.hi,
        lo_certified: bracket.lo_certified,
        hi_certified: bracket.hi_certified,
    };
    let certified_ok = interval.closed_form_below_hi && nu_windows.iter().all(|w| w.meets_lower);
    let heuristic_ok = interval.contains_closed_form && nu_windows.iter().all(|w| w.meets_upper);
    let verdict = match (certified_ok, heuristic_ok) {
        (false, _) => Verdict::CertifiedBoundViolated,
        (true, false) => Verdict::HeuristicWindowViolated,
        (true, true) => Verdict::Consistent,
    };
    Ok(KleinConeReport {
        d,
        p,
        closed_form: c,
        interval,
        nu_windows,
        denominator,
        verdict,
    })
}

/// Compute `nu_1 .. nu_{e_max}` for `I = J = m` on the Klein-type cone and report
/// against the closed form.
pub fn verify_klein_cone(
    engine: &NuEngine,
    d: u64,
    p: u64,
    e_max: u32,
    cache: &mut CacheStore,
) -> Result<KleinConeReport, ThresholdError> {
    klein_cone_preconditions(d, p)?;
    if e_max == 0 {
        return Err(precondition("e_max", "must be at least 1"));
    }
    let ring = klein_cone_ring(d, p).map_err(|e| precondition("d", e.to_string()))?;
    let m = IdealHandle::maximal(&ring);
    let records = engine.nu_sequence(&m, &m, e_max, cache)?;
    klein_cone_report(d, p, &records)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum DenominatorReport {
    Equal,
    Defect {
        #[serde(with = "rational::text")]
        difference: Rational,
        #[serde(with = "rational::int_text")]
        a: BigInt,
        #[serde(with = "rational::int_text")]
        b: BigInt,
        gcd_a_p_is_one: bool,
        #[serde(with = "rational::text")]
        a_over_b: Rational,
        bound: u64,
        within_bound: bool,
        /// `max(4(g-1) r^3, r!)`; the prime must exceed it for the
        /// decomposition argument.
        claim_prime_bound: u64,
        p_exceeds_claim_bound: bool,
    },
}

/// Write `c_p - c_inf = a/(p b)` with the power of `p` pulled out of the
/// denominator, and test `0 < a/b <= 4(g-1)(r-1)`.
pub fn denominator_structure_check(
    c_p: &Rational,
    c_inf: &Rational,
    p: u64,
    g: u64,
    r: u64,
) -> Result<DenominatorReport, ThresholdError> {
    if g < 2 {
        return Err(precondition("g", format!("must be >= 2, got {g}")));
    }
    if r < 1 {
        return Err(precondition("r", format!("must be >= 1, got {r}")));
    }
    if c_p < c_inf {
        return Err(precondition(
            "c_p",
            format!("{} is below c_inf = {}", rational::to_text(c_p), rational::to_text(c_inf)),
        ));
    }
    if c_p == c_inf {
        return Ok(DenominatorReport::Equal);
    }
    let diff = c_p - c_inf;
    let (a, b) = p_times_b(&diff, p);
    let bound = 4 * (g - 1) * (r - 1);
    let a_over_b = Rational::new(a.clone(), b.clone());
    let claim_prime_bound = claim_prime_bound(g, r);
    Ok(DenominatorReport::Defect {
        gcd_a_p_is_one: a.gcd(&BigInt::from(p)).is_one(),
        within_bound: a_over_b.is_positive() && a_over_b <= Rational::from_integer(BigInt::from(bound)),
        difference: diff,
        a,
        b,
        a_over_b,
        bound,
        claim_prime_bound,
        p_exceeds_claim_bound: p > claim_prime_bound,
    })
}

/// `x = a/(p b)` with `b` an integer: `b = den/p` when `p` divides the
/// reduced denominator, else `a = p num`, `b = den`.
pub fn p_times_b(x: &Rational, p: u64) -> (BigInt, BigInt) {
    let pb = BigInt::from(p);
    let (num, den) = (x.numer().clone(), x.denom().clone());
    if (&den % &pb).is_zero() {
        (num, den / pb)
    } else {
        (num * pb, den)
    }
}

/// `max(4(g-1) r^3, r!)`, saturating.
pub fn claim_prime_bound(g: u64, r: u64) -> u64 {
    let cube = r.saturating_pow(3).saturating_mul(4 * (g - 1));
    let fact = (1..=r).fold(1u64, |acc, k| acc.saturating_mul(k));
    cube.max(fact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nu::Method;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn rec(e: u32, q: u64, nu: u64) -> NuRecord {
        NuRecord {
            ring_digest: "r".into(),
            i_digest: "i".into(),
            j_digest: "j".into(),
            e,
            q,
            nu,
            method: Method::SocleFastpath,
            wall_ms: 0,
        }
    }

    #[test]
    fn bracket_examples() {
        let b = bracket_threshold(&[rec(1, 3, 4), rec(2, 9, 16)], 2, true).unwrap();
        assert_eq!((b.lo.clone(), b.hi.clone()), (rat(16, 9), rat(19, 9)));
        assert!(b.contains(&int(2)));
        assert_eq!(b.e_used, 2);
        let b = bracket_threshold(&[rec(1, 2, 8), rec(2, 4, 18)], 2, true).unwrap();
        assert_eq!((b.lo.clone(), b.hi.clone()), (rat(18, 4), rat(21, 4)));
        assert!(b.contains(&int(5)));
        let b = bracket_threshold(&[rec(1, 7, 0)], 1, true).unwrap();
        assert_eq!((b.lo, b.hi), (int(0), rat(2, 7)));
    }

    #[test]
    fn bracket_errors() {
        assert!(matches!(bracket_threshold(&[], 1, true), Err(ThresholdError::NoRecords)));
        assert!(matches!(
            bracket_threshold(&[rec(2, 4, 6), rec(1, 2, 2)], 2, true),
            Err(ThresholdError::InconsistentRecords(_))
        ));
        // nu_2 far above the pigeonhole ceiling of nu_1
        assert!(matches!(
            bracket_threshold(&[rec(1, 2, 2), rec(2, 4, 40)], 2, true),
            Err(ThresholdError::Inverted { .. })
        ));
    }

    #[test]
    fn reconstruct_examples() {
        let b = bracket_threshold(&[rec(1, 3, 4), rec(2, 9, 16)], 2, true).unwrap();
        let r = reconstruct(&b, 3, 1);
        assert_eq!(r.value, Some(int(2)));
        assert_eq!(r.form, Some(DenominatorForm::IntegerOrPFree));
        // 15/8 and 9/5 also fit once denominators up to 8 are allowed
        assert_eq!(reconstruct(&b, 3, 8).value, None);

        let c = rat(1649, 1099);
        let w = rat(1, 2 * 157 * 1099 + 2);
        let tight = RationalInterval {
            lo: &c - &w,
            hi: &c + &w,
            lo_certified: true,
            hi_certified: true,
            e_used: 2,
        };
        assert!(tight.width() < rat(1, 157 * 1099));
        let r = reconstruct(&tight, 157, 8);
        assert_eq!(r.value, Some(c));
        assert_eq!(r.form, Some(DenominatorForm::PTimesB));
        assert_eq!((r.a, r.b), (Some(BigInt::from(1649)), Some(BigInt::from(7))));

        let coarse = RationalInterval {
            lo: int(0),
            hi: rat(1, 2),
            lo_certified: true,
            hi_certified: true,
            e_used: 1,
        };
        let r = reconstruct(&coarse, 2, 1);
        assert_eq!(r.value, None);
        assert_eq!(r.candidates, 2);
    }

    #[test]
    fn klein_cone_closed_form() {
        let c = klein_cone_value(7, 157);
        assert_eq!(c, rat(3298, 2198));
        assert_eq!(c, rat(1649, 1099));
        assert!(klein_cone_preconditions(7, 157).is_ok());
        assert!(klein_cone_preconditions(7, 151).is_err());
        assert!(klein_cone_preconditions(8, 157).is_err());
        assert!(klein_cone_preconditions(7, 29).is_err());
        // 157 ≡ 2 (mod 31)
        assert_eq!(157 % 31, 2);
    }

    #[test]
    fn klein_cone_report_windows() {
        let within = klein_cone_report(7, 157, &[rec(1, 157, 234)]).unwrap();
        assert_eq!(within.nu_windows[0].lower, 232);
        assert_eq!(within.nu_windows[0].upper, 235);
        assert_eq!(within.verdict, Verdict::Consistent);
        assert!(within.denominator.p_divides && !within.denominator.p_power);
        let above = klein_cone_report(7, 157, &[rec(1, 157, 238)]).unwrap();
        assert_eq!(above.verdict, Verdict::HeuristicWindowViolated);
        assert!(above.interval.closed_form_below_hi);
        let below = klein_cone_report(7, 157, &[rec(1, 157, 231)]).unwrap();
        assert_eq!(below.verdict, Verdict::CertifiedBoundViolated);
    }

    #[test]
    fn denominator_examples() {
        let r = denominator_structure_check(&rat(109, 72), &rat(3, 2), 2, 3, 2).unwrap();
        match r {
            DenominatorReport::Defect {
                a,
                b,
                bound,
                within_bound,
                gcd_a_p_is_one,
                ..
            } => {
                assert_eq!((a, b, bound), (BigInt::from(1), BigInt::from(36), 8));
                assert!(within_bound && gcd_a_p_is_one);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            denominator_structure_check(&rat(3, 2), &rat(3, 2), 5, 2, 2).unwrap(),
            DenominatorReport::Equal
        );
        match denominator_structure_check(&rat(1649, 1099), &rat(3, 2), 157, 2, 2).unwrap() {
            DenominatorReport::Defect { difference, a, b, .. } => {
                assert_eq!(difference, rat(1, 2198));
                assert_eq!((a, b), (BigInt::from(1), BigInt::from(14)));
            }
            other => panic!("{other:?}"),
        }
        assert!(denominator_structure_check(&rat(1, 1), &rat(3, 2), 2, 3, 2).is_err());
        assert!(denominator_structure_check(&rat(2, 1), &rat(3, 2), 2, 1, 2).is_err());
        // p prime to the reduced denominator: a picks up the factor p
        match denominator_structure_check(&rat(5, 3), &rat(3, 2), 5, 2, 2).unwrap() {
            DenominatorReport::Defect { a, b, gcd_a_p_is_one, .. } => {
                assert_eq!((a, b), (BigInt::from(5), BigInt::from(6)));
                assert!(!gcd_a_p_is_one);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn claim_bound() {
        assert_eq!(claim_prime_bound(3, 2), 64);
        assert_eq!(claim_prime_bound(2, 7), 5040);
    }

    proptest! {
        #[test]
        fn decomposition_reassembles(n in 1i64..10_000, d in 1i64..10_000, p in prop::sample::select(vec![2u64, 3, 5, 7, 157])) {
            let c_inf = rat(3, 2);
            let c_p = &c_inf + rat(n, d);
            if let DenominatorReport::Defect { a, b, .. } = denominator_structure_check(&c_p, &c_inf, p, 3, 2).unwrap() {
                prop_assert_eq!(&c_inf + Rational::new(a, b * p), c_p);
            } else {
                prop_assert!(false);
            }
        }

        #[test]
        fn reconstruction_is_sound(lo_n in 0i64..200, w in 1i64..50, den in 1i64..60, p in prop::sample::select(vec![2u64, 3, 5]), bb in 1u64..6) {
            let interval = RationalInterval {
                lo: rat(lo_n, den),
                hi: rat(lo_n, den) + rat(w, den * 7),
                lo_certified: true,
                hi_certified: true,
                e_used: 1,
            };
            let r = reconstruct(&interval, p, bb);
            if let Some(v) = r.value {
                prop_assert!(interval.contains(&v));
                let (a, b) = (r.a.unwrap(), r.b.unwrap());
                match r.form.unwrap() {
                    DenominatorForm::PTimesB => {
                        prop_assert_eq!(Rational::new(a.clone(), b * p), v);
                        prop_assert!(a.gcd(&BigInt::from(p)).is_one());
                    }
                    DenominatorForm::IntegerOrPFree => prop_assert_eq!(Rational::new(a, b), v),
                }
            }
        }
    }
}
