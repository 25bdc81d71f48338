//! Ring and ideal files.
//!
//! ```json
//! {"vars": ["x", "y", "z"], "char": 157, "relations": ["x^6*y + y^6*z + z^6*x"], "order": "grevlex"}
//! {"gens": ["x", "y", "z"]}
//! ```

use std::path::Path;

use fthresh::field::PrimeField;
use fthresh::groebner::IdealHandle;
use fthresh::poly::{GradedRing, MonomialOrder, PolyError, PolyRing};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RingFile {
    vars: Vec<String>,
    #[serde(rename = "char")]
    characteristic: u64,
    #[serde(default)]
    relations: Vec<String>,
    #[serde(default)]
    order: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IdealFile {
    gens: Vec<String>,
}

fn read_json<T: for<'de> Deserialize<'de>>(flag: &str, path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("{flag} {}: cannot read file: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation(format!("{flag} {}: {e}", path.display())))
}

pub fn load_ring(path: &Path) -> Result<GradedRing, CliError> {
    let raw: RingFile = read_json("--ring", path)?;
    let field_err = |field: &str, msg: String| CliError::validation(format!("--ring {}: field `{field}`: {msg}", path.display()));
    let order = match raw.order.as_deref() {
        None | Some("grevlex") => MonomialOrder::Grevlex,
        Some("lex") => MonomialOrder::Lex,
        Some(other) => return Err(field_err("order", format!("unknown order `{other}` (expected grevlex or lex)"))),
    };
    let field = PrimeField::new(raw.characteristic).map_err(|e| field_err("char", e.to_string()))?;
    let ambient = PolyRing::new(field, raw.vars.iter().cloned(), order).map_err(|e| field_err("vars", e.to_string()))?;
    let mut rels = Vec::with_capacity(raw.relations.len());
    for (i, r) in raw.relations.iter().enumerate() {
        rels.push(
            ambient
                .parse(r)
                .map_err(|e| field_err(&format!("relations[{i}]"), e.to_string()))?,
        );
    }
    GradedRing::quotient(ambient, rels).map_err(|e| match e {
        PolyError::NonHomogeneousRelation { index, .. } => field_err(&format!("relations[{index}]"), e.to_string()),
        other => field_err("relations", other.to_string()),
    })
}

/// The ideal in `path`, or the maximal ideal if no path is given.
pub fn load_ideal(flag: &str, path: Option<&Path>, ring: &GradedRing) -> Result<IdealHandle, CliError> {
    let Some(path) = path else {
        return Ok(IdealHandle::maximal(ring));
    };
    let raw: IdealFile = read_json(flag, path)?;
    let field_err = |field: &str, msg: String| CliError::validation(format!("{flag} {}: field `{field}`: {msg}", path.display()));
    let mut gens = Vec::with_capacity(raw.gens.len());
    for (i, g) in raw.gens.iter().enumerate() {
        gens.push(ring.parse(g).map_err(|e| field_err(&format!("gens[{i}]"), e.to_string()))?);
    }
    IdealHandle::new(ring, gens).map_err(|e| match e {
        fthresh::groebner::GbError::NotHomogeneous { index, .. } => field_err(&format!("gens[{index}]"), e.to_string()),
        other => field_err("gens", other.to_string()),
    })
}
