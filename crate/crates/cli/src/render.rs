//! Human-readable tables and CSV.

use std::fmt::Write;

use fthresh::fthreshold::{KleinConeReport, RationalInterval, ReconstructionResult};
use fthresh::gieseker::FamilyReport;
use fthresh::nu::NuRecord;
use fthresh::rational::{to_decimal, to_text};

pub fn nu_csv(records: &[NuRecord]) -> String {
    let mut out = String::from("e,q,nu,method\n");
    for r in records {
        let _ = writeln!(out, "{},{},{},{}", r.e, r.q, r.nu, r.method.as_str());
    }
    out
}

pub fn nu_table(records: &[NuRecord]) -> String {
    let mut out = format!("{:>3} {:>12} {:>14}  {}\n", "e", "q", "nu", "method");
    for r in records {
        let _ = writeln!(out, "{:>3} {:>12} {:>14}  {}", r.e, r.q, r.nu, r.method.as_str());
    }
    out
}

pub fn estimate_table(records: &[NuRecord], interval: &RationalInterval, rec: &ReconstructionResult) -> String {
    let mut out = nu_table(records);
    let _ = writeln!(
        out,
        "bracket  [{}, {}]  ({} .. {})  lower {}, upper certified",
        to_text(&interval.lo),
        to_text(&interval.hi),
        to_decimal(&interval.lo, 6),
        to_decimal(&interval.hi, 6),
        if interval.lo_certified { "certified" } else { "heuristic" },
    );
    match &rec.value {
        Some(v) => {
            let _ = writeln!(out, "value    {}", to_text(v));
        }
        None => {
            let _ = writeln!(out, "value    not determined ({} candidates)", rec.candidates);
        }
    }
    out
}

pub fn klein_table(r: &KleinConeReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "d = {}, p = {}", r.d, r.p);
    let _ = writeln!(out, "closed form      {}  ({})", to_text(&r.closed_form), to_decimal(&r.closed_form, 8));
    let _ = writeln!(
        out,
        "bracket          [{}, {}]  lower {}",
        to_text(&r.interval.lo),
        to_text(&r.interval.hi),
        if r.interval.lo_certified { "certified" } else { "heuristic" }
    );
    let _ = writeln!(out, "{:>3} {:>8} {:>8} {:>8}  status", "e", "nu", "lower", "upper");
    for w in &r.nu_windows {
        let status = match (w.meets_lower, w.meets_upper) {
            (true, true) => "inside window",
            (false, _) => "below certified lower end",
            (true, false) => "above heuristic upper end",
        };
        let _ = writeln!(out, "{:>3} {:>8} {:>8} {:>8}  {status}", w.e, w.nu, w.lower, w.upper);
    }
    let _ = writeln!(
        out,
        "denominator      {} (divisible by p: {}, power of p: {})",
        r.denominator.b, r.denominator.p_divides, r.denominator.p_power
    );
    let _ = writeln!(out, "verdict          {}", serde_json::to_value(r.verdict).expect("verdict").as_str().unwrap_or(""));
    out
}

pub fn family_table(r: &FamilyReport) -> String {
    let mut out = format!("d = {}, limit {}\n{:>3}  {:<28} {}\n", r.d, to_text(&r.limit), "m", "c_m", "decimal");
    for (m, c) in r.thresholds.iter().enumerate() {
        let _ = writeln!(out, "{m:>3}  {:<28} {}", to_text(c), to_decimal(c, 20));
    }
    out
}
