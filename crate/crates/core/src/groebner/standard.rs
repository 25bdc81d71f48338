//! Standard monomials: monomials outside a monomial (leading-term) ideal.

use crate::poly::Monomial;

/// For each variable, the smallest `k` with `x_i^k` among `leads`;
/// `Err(i)` names the first variable without a pure power.
pub(crate) fn pure_power_caps(nvars: usize, leads: &[Monomial]) -> Result<Vec<u64>, usize> {
    let mut caps = vec![None::<u64>; nvars];
    for m in leads {
        if let Some(i) = m.pure_power_var() {
            let e = m.exponents()[i];
            caps[i] = Some(caps[i].map_or(e, |c| c.min(e)));
        }
    }
    caps.into_iter().enumerate().map(|(i, c)| c.ok_or(i)).collect()
}

fn visit(exps: &mut [u64], i: usize, remaining: u64, caps: &[u64], leads: &[Monomial], f: &mut impl FnMut(&[u64])) {
    let n = exps.len();
    if i + 1 == n {
        if remaining >= caps[i] {
            return;
        }
        exps[i] = remaining;
        let divisible = leads.iter().any(|l| l.exponents().iter().zip(exps.iter()).all(|(a, b)| a <= b));
        if !divisible {
            f(exps);
        }
        exps[i] = 0;
        return;
    }
    let hi = remaining.min(caps[i].saturating_sub(1));
    for e in (0..=hi).rev() {
        exps[i] = e;
        visit(exps, i + 1, remaining - e, caps, leads, f);
    }
    exps[i] = 0;
}

fn for_each_standard(nvars: usize, leads: &[Monomial], degree: u64, mut f: impl FnMut(&[u64])) {
    if leads.iter().any(|l| l.is_one()) {
        return;
    }
    let mut caps = vec![degree + 1; nvars];
    for m in leads {
        if let Some(i) = m.pure_power_var() {
            caps[i] = caps[i].min(m.exponents()[i]);
        }
    }
    let mut exps = vec![0u64; nvars];
    visit(&mut exps, 0, degree, &caps, leads, &mut f);
}

/// Number of degree-`degree` monomials divisible by none of `leads`.
pub fn count_standard_monomials(nvars: usize, leads: &[Monomial], degree: u64) -> u64 {
    let mut count = 0u64;
    for_each_standard(nvars, leads, degree, |_| count += 1);
    count
}

/// The degree-`degree` standard monomials, in descending lex order of exponents.
pub fn standard_monomials(nvars: usize, leads: &[Monomial], degree: u64) -> Vec<Monomial> {
    let mut out = Vec::new();
    for_each_standard(nvars, leads, degree, |e| out.push(Monomial::try_new(e).unwrap()));
    out
}
