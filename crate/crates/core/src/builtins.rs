//! Builtin map grammar: `tent:<slope>`, `logistic:<a>`, `identity`,
//! `tangency:<r>`. Parameters parse as exact rationals ("2", "9/5", "1.8").

use crate::error::{Error, Result};
use crate::maps::{identity, logistic, tent, PiecewiseMonotoneMap};
use crate::perturb::tangency_family;
use crate::scalar::Scalar;

/// Resolves a builtin name, with or without the `builtin:` prefix.
pub fn builtin_map(spec: &str) -> Result<PiecewiseMonotoneMap> {
    let body = spec.strip_prefix("builtin:").unwrap_or(spec);
    let mut parts = body.splitn(2, ':');
    let family = parts.next().unwrap_or("");
    let param = parts.next();
    match (family, param) {
        ("identity", None) => Ok(identity()),
        ("tent", Some(p)) => {
            let s = Scalar::parse_exact(p)
                .ok_or_else(|| Error::UnknownBuiltin(spec.to_string()))?;
            tent(s)
        }
        ("logistic", Some(p)) => {
            let a = Scalar::parse_exact(p)
                .ok_or_else(|| Error::UnknownBuiltin(spec.to_string()))?;
            logistic(a)
        }
        ("tangency", Some(p)) => {
            let r: u32 = p
                .parse()
                .map_err(|_| Error::UnknownBuiltin(spec.to_string()))?;
            tangency_family(r)
        }
        _ => Err(Error::UnknownBuiltin(spec.to_string())),
    }
}
