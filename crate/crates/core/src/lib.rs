//! F-thresholds of graded rings over prime fields, and the slope data of
//! bundles on curves that produce them.
//!
//! See the guide in `book/` for a walk-through.

pub mod field;
pub mod fthreshold;
pub mod gieseker;
pub mod groebner;
pub mod hnslope;
pub mod nu;
pub mod poly;
pub mod rational;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] poly::PolyError),
    #[error(transparent)]
    Groebner(#[from] groebner::GbError),
    #[error(transparent)]
    Nu(#[from] nu::NuError),
    #[error(transparent)]
    Threshold(#[from] fthreshold::ThresholdError),
    #[error(transparent)]
    Hn(#[from] hnslope::HnError),
    #[error(transparent)]
    Gieseker(#[from] gieseker::GiesekerError),
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/rings.md")]
    mod rings {}
    #[doc = include_str!("../../../book/src/nu.md")]
    mod nu {}
    #[doc = include_str!("../../../book/src/threshold.md")]
    mod threshold {}
    #[doc = include_str!("../../../book/src/slopes.md")]
    mod slopes {}
    #[doc = include_str!("../../../book/src/family.md")]
    mod family {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
