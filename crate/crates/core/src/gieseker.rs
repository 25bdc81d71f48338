//! Closed-form model of a family of cones whose F-thresholds of `m` strictly
//! decrease to `3/2`.
//!
//! The input data are a genus-`g` curve in characteristic `p` carrying rank-2,
//! trivial-determinant bundles `E_m` such that `F^{m*} E_m` is the first
//! unstable pullback, destabilized by a line subbundle of degree
//! `(g-1)/p^{m0}`, and the polarization `L = O_X(n0) = K_X^{3 n0}` with
//! `deg L = 3 n0 (2g - 2)`. The threshold of `m` at the ideal attached to
//! `E_m` is `1 - a_min((E_m ⊗ L)^∨)/d` with `d = deg L^2`, which works out to
//! `3/2 + (g-1)/(p^(m+m0) d)`. Both routes are evaluated and compared.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hnslope::{threshold_from_amin, HNData, HnError, HnQuotient};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GiesekerError {
    #[error("p: {0} is not a prime")]
    NotPrime(u64),
    #[error("g: genus must be at least 2, got {0}")]
    GenusTooSmall(u64),
    #[error("n0: must be at least 3, got {0}")]
    N0TooSmall(u64),
    #[error("m0: p^m0 = {pm0} must be below g = {g}")]
    M0TooLarge { pm0: String, g: u64 },
    #[error("m0: p^m0 = {pm0} must divide g - 1 = {gm1}")]
    M0NotDividing { pm0: String, gm1: u64 },
    #[error("mmax: must be at least {min}, got {got}")]
    MmaxTooSmall { min: u32, got: u32 },
    #[error("epsilon: must be positive")]
    NonPositiveEpsilon,
    #[error("engine bug: closed form {closed} and slope route {via_slopes} disagree at m = {m}")]
    RouteDisagreement { m: u32, closed: String, via_slopes: String },
    #[error(transparent)]
    Hn(#[from] HnError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GiesekerParams {
    pub p: u64,
    pub g: u64,
    pub m0: u32,
    pub n0: u64,
}

impl GiesekerParams {
    pub fn new(p: u64, g: u64, m0: u32, n0: u64) -> Result<Self, GiesekerError> {
        let params = GiesekerParams { p, g, m0, n0 };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), GiesekerError> {
        if !crate::field::is_prime(self.p) {
            return Err(GiesekerError::NotPrime(self.p));
        }
        if self.g < 2 {
            return Err(GiesekerError::GenusTooSmall(self.g));
        }
        if self.n0 < 3 {
            return Err(GiesekerError::N0TooSmall(self.n0));
        }
        let pm0 = self.p_pow(self.m0);
        if pm0 >= BigInt::from(self.g) {
            return Err(GiesekerError::M0TooLarge {
                pm0: pm0.to_string(),
                g: self.g,
            });
        }
        if !(BigInt::from(self.g - 1) % &pm0).is_zero() {
            return Err(GiesekerError::M0NotDividing {
                pm0: pm0.to_string(),
                gm1: self.g - 1,
            });
        }
        Ok(())
    }

    fn p_pow(&self, k: u32) -> BigInt {
        num_traits::pow(BigInt::from(self.p), k as usize)
    }

    /// `deg L = 3 n0 (2g - 2)`.
    pub fn deg_l(&self) -> u64 {
        3 * self.n0 * (2 * self.g - 2)
    }

    /// `d = e_0(R, m) = deg L^2`.
    pub fn multiplicity(&self) -> u64 {
        2 * self.deg_l()
    }

    /// Destabilizing degree `(g-1)/p^m0` at the first unstable level.
    pub fn destabilizing_degree(&self) -> Rational {
        Rational::new(BigInt::from(self.g - 1), self.p_pow(self.m0))
    }
}

/// Strong HN data of `F^{m*} E_m`: `[(1, δ), (1, -δ)]`, `δ = (g-1)/p^m0`.
pub fn em_strong_hn(params: &GiesekerParams, m: u32) -> Result<HNData, GiesekerError> {
    params.validate()?;
    let delta = params.destabilizing_degree();
    Ok(HNData::new(
        vec![HnQuotient::new(1, delta.clone()), HnQuotient::new(1, -delta)],
        m,
        true,
    )?)
}

/// HN data of `F^{k*} E_m`: semistable of degree 0 below level `m`, the
/// destabilized pair scaled by `p^(k-m)` from level `m` on.
pub fn em_hn_at_level(params: &GiesekerParams, m: u32, k: u32) -> Result<HNData, GiesekerError> {
    if k < m {
        params.validate()?;
        return Ok(HNData::semistable(2, Rational::zero(), k, false)?);
    }
    let mut data = em_strong_hn(params, m)?;
    for _ in m..k {
        data = data.frobenius_pullback(params.p, true)?;
    }
    Ok(data)
}

/// Least `k` for which `F^{k*} E_m` is not semistable.
pub fn minimal_unstable_level(params: &GiesekerParams, m: u32) -> Result<u32, GiesekerError> {
    for k in 0..=m {
        if !em_hn_at_level(params, m, k)?.is_semistable() {
            return Ok(k);
        }
    }
    unreachable!("level m is unstable by construction")
}

/// `a_min((E_m ⊗ L)^∨)` via slopes: twist the level-`m` data by
/// `deg F^{m*} L = p^m deg L`, dualize, normalize by `p^m`.
pub fn syzygy_dual_amin(params: &GiesekerParams, m: u32) -> Result<Rational, GiesekerError> {
    let level_m = em_strong_hn(params, m)?;
    let pm_deg_l = Rational::from_integer(params.p_pow(m) * BigInt::from(params.deg_l()));
    Ok(level_m.twist(&pm_deg_l).dual().a_min(params.p)?)
}

/// `-deg L - (g-1)/p^(m+m0)`.
pub fn syzygy_dual_amin_closed(params: &GiesekerParams, m: u32) -> Result<Rational, GiesekerError> {
    params.validate()?;
    let deg_l = Rational::from_integer(BigInt::from(params.deg_l()));
    Ok(-deg_l - Rational::new(BigInt::from(params.g - 1), params.p_pow(m + params.m0)))
}

/// `3/2 + (g-1)/(p^(m+m0) d)`.
pub fn threshold_closed_form(params: &GiesekerParams, m: u32) -> Result<Rational, GiesekerError> {
    params.validate()?;
    let d = BigInt::from(params.multiplicity());
    Ok(three_halves() + Rational::new(BigInt::from(params.g - 1), params.p_pow(m + params.m0) * d))
}

pub fn three_halves() -> Rational {
    rational::rat(3, 2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub params: GiesekerParams,
    pub d: u64,
    pub deg_l: u64,
    #[serde(with = "rational::text_vec")]
    pub thresholds: Vec<Rational>,
    pub strictly_decreasing: bool,
    #[serde(with = "rational::text")]
    pub limit: Rational,
    pub limit_attained: bool,
}

/// Thresholds for `m = 0 .. m_max - 1`, each computed by the closed form and
/// by the slope route, which must agree exactly.
pub fn threshold_sequence(params: &GiesekerParams, m_max: u32) -> Result<FamilyReport, GiesekerError> {
    params.validate()?;
    if m_max < 1 {
        return Err(GiesekerError::MmaxTooSmall { min: 1, got: m_max });
    }
    let d = params.multiplicity();
    let mut thresholds = Vec::with_capacity(m_max as usize);
    for m in 0..m_max {
        let closed = threshold_closed_form(params, m)?;
        let amin = syzygy_dual_amin(params, m)?;
        let via_slopes = threshold_from_amin(&amin, d)?;
        if closed != via_slopes || amin != syzygy_dual_amin_closed(params, m)? {
            return Err(GiesekerError::RouteDisagreement {
                m,
                closed: rational::to_text(&closed),
                via_slopes: rational::to_text(&via_slopes),
            });
        }
        thresholds.push(closed);
    }
    let limit = three_halves();
    Ok(FamilyReport {
        params: *params,
        d,
        deg_l: params.deg_l(),
        strictly_decreasing: thresholds.windows(2).all(|w| w[0] > w[1]),
        limit_attained: thresholds.contains(&limit),
        thresholds,
        limit,
    })
}

/// Least `m` with `c_m - 3/2 < epsilon`.
pub fn tail_index(params: &GiesekerParams, epsilon: &Rational) -> Result<u32, GiesekerError> {
    if *epsilon <= Rational::zero() {
        return Err(GiesekerError::NonPositiveEpsilon);
    }
    let mut m = 0;
    while threshold_closed_form(params, m)? - three_halves() >= *epsilon {
        m += 1;
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TailEntry {
    #[serde(with = "rational::text")]
    pub epsilon: Rational,
    pub m: u32,
    #[serde(with = "rational::text")]
    pub gap: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DifferenceEntry {
    pub m: u32,
    #[serde(with = "rational::text")]
    pub difference: Rational,
    pub p_divides_denominator: bool,
    pub minimal_unstable_level: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AccumulationReport {
    pub family: FamilyReport,
    pub tails: Vec<TailEntry>,
    pub differences: Vec<DifferenceEntry>,
    pub limit_in_list: bool,
    /// The minimal unstable level of `E_m` equals `m` for every listed `m`.
    pub unbounded_levels: bool,
}

/// Decrease, accumulation at `3/2` (tail indices for `ε = 10^-k`,
/// `k = 0..=6`), and the `p`-divisibility of each gap's denominator.
pub fn accumulation_report(params: &GiesekerParams, m_max: u32) -> Result<AccumulationReport, GiesekerError> {
    if m_max < 2 {
        return Err(GiesekerError::MmaxTooSmall { min: 2, got: m_max });
    }
    let family = threshold_sequence(params, m_max)?;
    let tails = (0..=6)
        .map(|k| {
            let epsilon = Rational::new(BigInt::from(1), num_traits::pow(BigInt::from(10), k));
            let m = tail_index(params, &epsilon)?;
            let gap = threshold_closed_form(params, m)? - three_halves();
            Ok(TailEntry { epsilon, m, gap })
        })
        .collect::<Result<Vec<_>, GiesekerError>>()?;
    let differences = family
        .thresholds
        .iter()
        .enumerate()
        .map(|(m, c)| {
            let difference = c - three_halves();
            Ok(DifferenceEntry {
                m: m as u32,
                p_divides_denominator: (difference.denom() % BigInt::from(params.p)).is_zero(),
                minimal_unstable_level: minimal_unstable_level(params, m as u32)?,
                difference,
            })
        })
        .collect::<Result<Vec<_>, GiesekerError>>()?;
    Ok(AccumulationReport {
        limit_in_list: family.thresholds.contains(&family.limit),
        unbounded_levels: differences.iter().all(|d| d.minimal_unstable_level == d.m),
        family,
        tails,
        differences,
    })
}

/// CSV with header `m,c_num,c_den,c_decimal_20dp`.
pub fn family_csv(report: &FamilyReport) -> String {
    let mut out = String::from("m,c_num,c_den,c_decimal_20dp\n");
    for (m, c) in report.thresholds.iter().enumerate() {
        out.push_str(&format!("{m},{},{},{}\n", c.numer(), c.denom(), rational::to_decimal(c, 20)));
    }
    out
}
