//! Slope arithmetic on Harder–Narasimhan data.
//!
//! A bundle enters only through its HN quotients `(rank, degree)`, listed
//! from the maximal destabilizing piece down, so slopes strictly decrease.
//! Degrees are rational to carry Frobenius-normalized data.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HnError {
    #[error("quotients: at least one quotient is required")]
    Empty,
    #[error("quotients[{index}]: rank must be positive")]
    ZeroRank { index: usize },
    #[error("quotients[{index}]: slope {slope} is not below the previous slope {previous}")]
    NotDecreasing { index: usize, slope: String, previous: String },
    #[error("frobenius_pullback: the pullback is HN data only under a declared assumption")]
    AssumptionNotDeclared,
    #[error("strong: a_min needs data marked as a strong HN filtration")]
    NotStrong,
    #[error("p: {0} is not a prime")]
    NotPrime(u64),
    #[error("v_filtration: length {v} differs from m_filtration length {m}")]
    LengthMismatch { m: usize, v: usize },
    #[error("v_filtration[{index}]: mu_min(V_i) = {v} exceeds mu_min(M_i) = {m}")]
    SlopeAboveAmbient { index: usize, v: String, m: String },
    #[error("d: must be positive")]
    ZeroDegree,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HnQuotient {
    pub rank: u64,
    pub degree: Rational,
}

impl HnQuotient {
    pub fn new(rank: u64, degree: Rational) -> Self {
        HnQuotient { rank, degree }
    }

    pub fn slope(&self) -> Rational {
        &self.degree / Rational::from_integer(BigInt::from(self.rank))
    }
}

/// HN quotients of `F^{m*} V` at Frobenius level `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HNData {
    quotients: Vec<HnQuotient>,
    frobenius_level: u32,
    is_strong: bool,
}

impl HNData {
    pub fn new(quotients: Vec<HnQuotient>, frobenius_level: u32, is_strong: bool) -> Result<Self, HnError> {
        if quotients.is_empty() {
            return Err(HnError::Empty);
        }
        for (i, q) in quotients.iter().enumerate() {
            if q.rank == 0 {
                return Err(HnError::ZeroRank { index: i });
            }
        }
        for i in 1..quotients.len() {
            let (prev, cur) = (quotients[i - 1].slope(), quotients[i].slope());
            if cur >= prev {
                return Err(HnError::NotDecreasing {
                    index: i,
                    slope: rational::to_text(&cur),
                    previous: rational::to_text(&prev),
                });
            }
        }
        Ok(HNData {
            quotients,
            frobenius_level,
            is_strong,
        })
    }

    /// Convenience constructor from `(rank, degree)` pairs.
    pub fn from_pairs(pairs: &[(u64, Rational)], frobenius_level: u32, is_strong: bool) -> Result<Self, HnError> {
        let qs = pairs.iter().map(|(r, d)| HnQuotient::new(*r, d.clone())).collect();
        HNData::new(qs, frobenius_level, is_strong)
    }

    /// A semistable bundle of the given rank and degree.
    pub fn semistable(rank: u64, degree: Rational, frobenius_level: u32, is_strong: bool) -> Result<Self, HnError> {
        HNData::new(vec![HnQuotient::new(rank, degree)], frobenius_level, is_strong)
    }

    pub fn quotients(&self) -> &[HnQuotient] {
        &self.quotients
    }

    pub fn frobenius_level(&self) -> u32 {
        self.frobenius_level
    }

    pub fn is_strong(&self) -> bool {
        self.is_strong
    }

    pub fn rank(&self) -> u64 {
        self.quotients.iter().map(|q| q.rank).sum()
    }

    pub fn degree(&self) -> Rational {
        self.quotients.iter().map(|q| q.degree.clone()).sum()
    }

    pub fn slopes(&self) -> Vec<Rational> {
        self.quotients.iter().map(HnQuotient::slope).collect()
    }

    pub fn is_semistable(&self) -> bool {
        self.quotients.len() == 1
    }

    pub fn mu_min(&self) -> Rational {
        self.quotients.last().expect("nonempty").slope()
    }

    pub fn mu_max(&self) -> Rational {
        self.quotients[0].slope()
    }

    /// Tensor with a line bundle of degree `ell`.
    pub fn twist(&self, ell: &Rational) -> HNData {
        let quotients = self
            .quotients
            .iter()
            .map(|q| HnQuotient::new(q.rank, &q.degree + ell * Rational::from_integer(BigInt::from(q.rank))))
            .collect();
        HNData::new(quotients, self.frobenius_level, self.is_strong).expect("twist preserves slope order")
    }

    /// Dual bundle: quotients reversed, degrees negated.
    pub fn dual(&self) -> HNData {
        let quotients = self
            .quotients
            .iter()
            .rev()
            .map(|q| HnQuotient::new(q.rank, -q.degree.clone()))
            .collect();
        HNData::new(quotients, self.frobenius_level, self.is_strong).expect("dual preserves slope order")
    }

    /// Frobenius pullback: degrees scale by `p`. Only meaningful if the
    /// caller asserts the pulled-back filtration is still the HN filtration.
    pub fn frobenius_pullback(&self, p: u64, assume_remains_hn: bool) -> Result<HNData, HnError> {
        if !assume_remains_hn {
            return Err(HnError::AssumptionNotDeclared);
        }
        check_prime(p)?;
        let pr = Rational::from_integer(BigInt::from(p));
        let quotients = self
            .quotients
            .iter()
            .map(|q| HnQuotient::new(q.rank, &q.degree * &pr))
            .collect();
        HNData::new(quotients, self.frobenius_level + 1, self.is_strong)
    }

    /// `mu_min / p^m` for strong data at level `m`.
    pub fn a_min(&self, p: u64) -> Result<Rational, HnError> {
        if !self.is_strong {
            return Err(HnError::NotStrong);
        }
        check_prime(p)?;
        Ok(self.mu_min() / Rational::from_integer(num_traits::pow(BigInt::from(p), self.frobenius_level as usize)))
    }
}

fn check_prime(p: u64) -> Result<(), HnError> {
    if crate::field::is_prime(p) {
        Ok(())
    } else {
        Err(HnError::NotPrime(p))
    }
}

/// On-disk form: `{"quotients": [[rank, "num/den"], ...], "level": m, "strong": bool}`.
#[derive(Serialize, Deserialize)]
struct HnScenario {
    quotients: Vec<(u64, String)>,
    level: u32,
    strong: bool,
}

impl Serialize for HNData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        HnScenario {
            quotients: self.quotients.iter().map(|q| (q.rank, rational::to_text(&q.degree))).collect(),
            level: self.frobenius_level,
            strong: self.is_strong,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HNData {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = HnScenario::deserialize(d)?;
        let mut qs = Vec::with_capacity(raw.quotients.len());
        for (i, (rank, deg)) in raw.quotients.into_iter().enumerate() {
            let degree = rational::parse(&deg).map_err(|e| D::Error::custom(format!("quotients[{i}]: {e}")))?;
            qs.push(HnQuotient::new(rank, degree));
        }
        HNData::new(qs, raw.level, raw.strong).map_err(D::Error::custom)
    }
}

/// Minimal slopes along the filtration `M_i` of `M_0` and the induced
/// `V_i = M_i ∩ V_0`, with the exactness of `0 -> V_i -> M_i -> L -> 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuReductionInput {
    #[serde(with = "rational::text_vec")]
    pub m_filtration: Vec<Rational>,
    pub v_filtration: Vec<VStep>,
    pub d: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VStep {
    #[serde(with = "rational::text")]
    pub mu_min: Rational,
    pub exact_sequence_holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionKind {
    Reduction,
    NoneFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MuReduction {
    pub t: usize,
    pub kind: ReductionKind,
}

/// Least `t` with equal minimal slopes and exact sequences before `t` and a
/// strict drop `mu_min(V_t) < mu_min(M_t)` at `t`. An equal step without the
/// exactness flag ends the scan with `NoneFound`, as does running out.
pub fn mu_reduction_index(input: &MuReductionInput) -> Result<MuReduction, HnError> {
    let (m, v) = (&input.m_filtration, &input.v_filtration);
    if m.len() != v.len() {
        return Err(HnError::LengthMismatch { m: m.len(), v: v.len() });
    }
    if m.is_empty() {
        return Err(HnError::Empty);
    }
    if input.d == 0 {
        return Err(HnError::ZeroDegree);
    }
    for (i, (mi, vi)) in m.iter().zip(v).enumerate() {
        if vi.mu_min > *mi {
            return Err(HnError::SlopeAboveAmbient {
                index: i,
                v: rational::to_text(&vi.mu_min),
                m: rational::to_text(mi),
            });
        }
        if vi.mu_min < *mi {
            return Ok(MuReduction {
                t: i,
                kind: ReductionKind::Reduction,
            });
        }
        if !vi.exact_sequence_holds {
            return Ok(MuReduction {
                t: i,
                kind: ReductionKind::NoneFound,
            });
        }
    }
    Ok(MuReduction {
        t: m.len(),
        kind: ReductionKind::NoneFound,
    })
}

/// `1 - a/d`.
pub fn threshold_from_amin(a: &Rational, d: u64) -> Result<Rational, HnError> {
    if d == 0 {
        return Err(HnError::ZeroDegree);
    }
    Ok(Rational::one() - a / Rational::from_integer(BigInt::from(d)))
}

/// Threshold in characteristic `p` and its characteristic-zero counterpart
/// evaluated from one reduction bundle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdPair {
    #[serde(with = "rational::text")]
    pub c_p: Rational,
    #[serde(with = "rational::text")]
    pub c_inf: Rational,
}

/// Input for one candidate bundle: its `a_min` and `mu_min` mod `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleSlopes {
    pub a_min: Rational,
    pub mu_min: Rational,
}

/// Both candidate evaluations, from `V_t` and from `V_{t-1}`. Which one
/// occurs is not decided here.
pub fn reduction_alternatives(
    at_t: &BundleSlopes,
    at_t_minus_one: Option<&BundleSlopes>,
    d: u64,
) -> Result<(ThresholdPair, Option<ThresholdPair>), HnError> {
    let eval = |b: &BundleSlopes| -> Result<ThresholdPair, HnError> {
        Ok(ThresholdPair {
            c_p: threshold_from_amin(&b.a_min, d)?,
            c_inf: threshold_from_amin(&b.mu_min, d)?,
        })
    };
    Ok((eval(at_t)?, at_t_minus_one.map(eval).transpose()?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaTReport {
    #[serde(rename = "C", with = "rational::text")]
    pub c: Rational,
    pub c_bound: u64,
    pub c_positive: bool,
    pub c_within_bound: bool,
    #[serde(with = "rational::text")]
    pub integrality_value: Rational,
    pub integral: bool,
    pub claim_prime_bound: u64,
    pub p_exceeds_claim_bound: bool,
    /// `mu_min(V) - a_min = a/(p b)` when the checks on `C` pass and `p`
    /// divides the reduced denominator.
    pub decomposition: Option<Decomposition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    #[serde(with = "rational::int_text")]
    pub a: BigInt,
    #[serde(with = "rational::int_text")]
    pub b: BigInt,
    pub gcd_a_p_is_one: bool,
}

/// Check `mu_min(F^{m*} V)/p^m + C/p = mu_min(V)` for `0 < C <= 4(g-1)(r-1)`
/// and `C p^(m-1) r!` integral.
pub fn lemma_t_consistency(
    mu_min_v: &Rational,
    mu_min_fmv: &Rational,
    p: u64,
    m: u32,
    g: u64,
    r: u64,
) -> Result<LemmaTReport, HnError> {
    check_prime(p)?;
    let pr = Rational::from_integer(BigInt::from(p));
    let pm = Rational::from_integer(num_traits::pow(BigInt::from(p), m as usize));
    let a_min = mu_min_fmv / &pm;
    let c = &pr * (mu_min_v - &a_min);
    let c_bound = 4 * g.saturating_sub(1) * r.saturating_sub(1);
    let c_positive = c.is_positive();
    let c_within_bound = c_positive && c <= Rational::from_integer(BigInt::from(c_bound));
    let fact: BigInt = (1..=r).map(BigInt::from).product();
    let pm1 = Rational::from_integer(num_traits::pow(BigInt::from(p), m.saturating_sub(1) as usize));
    let integrality_value = &c * pm1 * Rational::from_integer(fact);
    let integral = integrality_value.is_integer();
    let claim_prime_bound = crate::fthreshold::claim_prime_bound(g.max(2), r);
    let defect = mu_min_v - &a_min;
    let decomposition = if c_within_bound && integral && (defect.denom() % BigInt::from(p)).is_zero() {
        let (a, b) = crate::fthreshold::p_times_b(&defect, p);
        Some(Decomposition {
            gcd_a_p_is_one: a.gcd(&BigInt::from(p)).is_one(),
            a,
            b,
        })
    } else {
        None
    };
    Ok(LemmaTReport {
        c,
        c_bound,
        c_positive,
        c_within_bound,
        integrality_value,
        integral,
        claim_prime_bound,
        p_exceeds_claim_bound: p > claim_prime_bound,
        decomposition,
    })
}

impl HNData {
    /// Sum of the quotient degrees is zero.
    pub fn has_trivial_determinant_degree(&self) -> bool {
        self.degree().is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn hn(pairs: &[(u64, i64)], level: u32, strong: bool) -> HNData {
        let pairs: Vec<(u64, Rational)> = pairs.iter().map(|&(r, d)| (r, int(d))).collect();
        HNData::from_pairs(&pairs, level, strong).unwrap()
    }

    #[test]
    fn mu_min_examples() {
        assert_eq!(hn(&[(1, 3), (1, -1)], 0, false).mu_min(), int(-1));
        assert_eq!(hn(&[(2, 0)], 0, false).mu_min(), int(0));
        let g = 3;
        assert_eq!(hn(&[(1, g - 1), (1, -(g - 1))], 0, false).mu_min(), int(-2));
        assert_eq!(hn(&[(1, 3), (1, -1)], 0, false).mu_max(), int(3));
    }

    #[test]
    fn validation() {
        assert_eq!(HNData::new(vec![], 0, false), Err(HnError::Empty));
        assert!(matches!(
            HNData::from_pairs(&[(1, int(-1)), (1, int(3))], 0, false),
            Err(HnError::NotDecreasing { index: 1, .. })
        ));
        assert!(matches!(
            HNData::from_pairs(&[(2, int(2)), (1, int(1))], 0, false),
            Err(HnError::NotDecreasing { index: 1, .. })
        ));
        assert_eq!(HNData::from_pairs(&[(0, int(1))], 0, false), Err(HnError::ZeroRank { index: 0 }));
    }

    #[test]
    fn twist_dual_pullback() {
        let v = hn(&[(1, 3), (1, -1)], 0, false);
        assert_eq!(v.twist(&int(2)), hn(&[(1, 5), (1, 1)], 0, false));
        assert_eq!(v.twist(&int(0)), v);
        assert_eq!(v.dual(), hn(&[(1, 1), (1, -3)], 0, false));
        // (E ⊗ L)^∨ for E = [(1,1),(1,-1)] and deg L = 36
        let e = hn(&[(1, 1), (1, -1)], 1, true);
        assert_eq!(e.twist(&int(36)).dual(), hn(&[(1, -35), (1, -37)], 1, true));
        assert_eq!(e.twist(&int(-36)).dual(), e.twist(&int(36)).dual().twist(&int(72)));

        let p = hn(&[(1, 1), (1, -1)], 2, false).frobenius_pullback(2, true).unwrap();
        assert_eq!(p, hn(&[(1, 2), (1, -2)], 3, false));
        let s = hn(&[(2, 0)], 0, true).frobenius_pullback(5, true).unwrap();
        assert_eq!(s.quotients(), hn(&[(2, 0)], 1, true).quotients());
        assert_eq!(
            hn(&[(2, 0)], 0, true).frobenius_pullback(5, false),
            Err(HnError::AssumptionNotDeclared)
        );
    }

    #[test]
    fn a_min_examples() {
        assert_eq!(hn(&[(1, 2), (1, -2)], 1, true).a_min(3).unwrap(), rat(-2, 3));
        assert_eq!(hn(&[(2, 0)], 0, true).a_min(7).unwrap(), int(0));
        assert_eq!(hn(&[(2, 0)], 0, false).a_min(7), Err(HnError::NotStrong));
        // (E ⊗ L)^∨ with deg L = 36 from level-0 data [(1,1),(1,-1)]
        let level0 = hn(&[(1, 1), (1, -1)], 0, true);
        assert_eq!(level0.twist(&int(36)).dual().a_min(2).unwrap(), int(-37));
        // at level 1 the twist is by p deg L
        let level1 = hn(&[(1, 1), (1, -1)], 1, true);
        assert_eq!(level1.twist(&int(2 * 36)).dual().a_min(2).unwrap(), rat(-73, 2));
    }

    #[test]
    fn mu_reduction_examples() {
        let step = |s: i64, exact| VStep {
            mu_min: int(s),
            exact_sequence_holds: exact,
        };
        let input = |m: Vec<i64>, v: Vec<VStep>| MuReductionInput {
            m_filtration: m.into_iter().map(int).collect(),
            v_filtration: v,
            d: 4,
        };
        let r = mu_reduction_index(&input(vec![-3], vec![step(-5, true)])).unwrap();
        assert_eq!(r, MuReduction { t: 0, kind: ReductionKind::Reduction });
        let r = mu_reduction_index(&input(vec![-3, -1], vec![step(-3, true), step(-2, false)])).unwrap();
        assert_eq!(r, MuReduction { t: 1, kind: ReductionKind::Reduction });
        let r = mu_reduction_index(&input(vec![-3, -1], vec![step(-3, true), step(-1, true)])).unwrap();
        assert_eq!(r.kind, ReductionKind::NoneFound);
        let r = mu_reduction_index(&input(vec![-3, -1], vec![step(-3, false), step(-2, true)])).unwrap();
        assert_eq!(r, MuReduction { t: 0, kind: ReductionKind::NoneFound });
        assert!(matches!(
            mu_reduction_index(&input(vec![-3], vec![step(-1, true)])),
            Err(HnError::SlopeAboveAmbient { index: 0, .. })
        ));
        assert!(matches!(
            mu_reduction_index(&input(vec![-3, -1], vec![step(-3, true)])),
            Err(HnError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_from_amin(&int(-37), 72).unwrap(), rat(109, 72));
        assert_eq!(threshold_from_amin(&int(0), 5).unwrap(), int(1));
        assert_eq!(threshold_from_amin(&int(-9), 9).unwrap(), int(2));
        assert_eq!(threshold_from_amin(&int(1), 0), Err(HnError::ZeroDegree));
        let (t, t1) = reduction_alternatives(
            &BundleSlopes { a_min: int(-37), mu_min: int(-36) },
            Some(&BundleSlopes { a_min: int(-36), mu_min: int(-36) }),
            72,
        )
        .unwrap();
        assert_eq!((t.c_p, t.c_inf), (rat(109, 72), rat(3, 2)));
        assert_eq!(t1.unwrap().c_p, rat(3, 2));
    }

    #[test]
    fn lemma_t_examples() {
        let r = lemma_t_consistency(&int(0), &int(-2), 3, 1, 2, 2).unwrap();
        assert_eq!(r.c, int(2));
        assert_eq!(r.c_bound, 4);
        assert!(r.c_within_bound && r.integral);
        assert_eq!(r.integrality_value, int(4));
        assert!(!r.p_exceeds_claim_bound);
        let d = r.decomposition.unwrap();
        assert_eq!((d.a, d.b), (BigInt::from(2), BigInt::from(1)));

        let r = lemma_t_consistency(&int(0), &int(0), 3, 1, 2, 2).unwrap();
        assert_eq!(r.c, int(0));
        assert!(!r.c_positive && r.decomposition.is_none());

        let r = lemma_t_consistency(&int(-36), &int(-74), 2, 1, 3, 2).unwrap();
        assert_eq!(r.c, int(2));
        assert_eq!(r.c_bound, 8);
        assert!(r.c_within_bound && r.integral);
        // defect C/p = 1 has no factor p in its denominator
        assert!(r.decomposition.is_none());
    }

    #[test]
    fn scenario_json() {
        let v: HNData = serde_json::from_str(r#"{"quotients": [[1, "1/2"], [1, "-1/2"]], "level": 1, "strong": true}"#).unwrap();
        assert_eq!(v.mu_min(), rat(-1, 2));
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"quotients":[[1,"1/2"],[1,"-1/2"]],"level":1,"strong":true}"#
        );
        let err = serde_json::from_str::<HNData>(r#"{"quotients": [[1, "-1"], [1, "1"]], "level": 0, "strong": false}"#)
            .unwrap_err();
        assert!(err.to_string().contains("quotients[1]"));
    }

    fn arb_hn() -> impl Strategy<Value = HNData> {
        prop::collection::vec((1u64..5, -50i64..50, 1i64..6), 1..5).prop_map(|raw| {
            let mut qs: Vec<HnQuotient> = raw.into_iter().map(|(r, n, d)| HnQuotient::new(r, rat(n, d))).collect();
            qs.sort_by_key(|q| std::cmp::Reverse(q.slope()));
            qs.dedup_by(|a, b| a.slope() == b.slope());
            HNData::new(qs, 0, true).unwrap()
        })
    }

    proptest! {
        #[test]
        fn slope_identities(v in arb_hn(), n in -30i64..30, d in 1i64..7, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let ell = rat(n, d);
            let t = v.twist(&ell);
            prop_assert_eq!(t.mu_min(), v.mu_min() + &ell);
            prop_assert_eq!(t.rank(), v.rank());
            let f = v.frobenius_pullback(p, true).unwrap();
            prop_assert_eq!(f.mu_min(), v.mu_min() * Rational::from_integer(BigInt::from(p)));
            prop_assert_eq!(f.a_min(p).unwrap(), v.mu_min());
            prop_assert_eq!(v.dual().dual(), v.clone());
            prop_assert_eq!(v.dual().mu_min(), -v.mu_max());
        }
    }
}
