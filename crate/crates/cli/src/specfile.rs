//! Group-spec files: a small JSON schema that maps onto `GroupSpec`.
//!
//! ```json
//! {
//!   "name": "a2",
//!   "geometry": "spherical",
//!   "cartan": [[2, -1], [-1, 2]],
//!   "backend": "exact",
//!   "epsilon": 1e-9
//! }
//! ```
//!
//! Exactly one of `cartan`, `coxeter`, `gram` must be present. Gram entries
//! may be integers, floats (float backend only), or `"p/q"` strings. The
//! `CHAMBERFOLD_EPSILON` environment variable overrides the float tolerance
//! from anywhere.

use chamberfold_core::group::{Geometry, GroupSource, GroupSpec};
use chamberfold_core::linalg::Matrix;
use chamberfold_core::scalar::{Backend, ScalarValue};
use serde::Deserialize;
use std::path::Path;

use crate::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: String,
    geometry: String,
    #[serde(default)]
    cartan: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    coxeter: Option<Vec<Vec<u32>>>,
    #[serde(default)]
    gram: Option<Vec<Vec<serde_json::Value>>>,
    #[serde(default)]
    backend: Option<String>,
    #[serde(default)]
    epsilon: Option<f64>,
}

pub fn load_spec(path: &Path) -> Result<GroupSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Malformed(format!("cannot read {}: {e}", path.display())))?;
    let raw: RawSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?;
    spec_from_raw(raw)
}

fn spec_from_raw(raw: RawSpec) -> Result<GroupSpec, CliError> {
    let geometry = match raw.geometry.as_str() {
        "spherical" => Geometry::Spherical,
        "affine" => Geometry::Affine,
        "hyperbolic" => Geometry::Hyperbolic,
        other => {
            return Err(CliError::Malformed(format!(
                "unknown geometry '{other}' (expected spherical, affine, or hyperbolic)"
            )))
        }
    };
    let sources = raw.cartan.is_some() as u8 + raw.coxeter.is_some() as u8 + raw.gram.is_some() as u8;
    if sources != 1 {
        return Err(CliError::Malformed(
            "exactly one of 'cartan', 'coxeter', 'gram' must be given".into(),
        ));
    }
    let epsilon = resolve_epsilon(raw.epsilon)?;
    let backend = match raw.backend.as_deref() {
        Some("exact") => Backend::Exact,
        Some("float") => Backend::Approx { eps: epsilon },
        Some(other) => {
            return Err(CliError::Malformed(format!(
                "unknown backend '{other}' (expected exact or float)"
            )))
        }
        None => default_backend(&raw, epsilon),
    };

    if let Some(rows) = raw.cartan {
        return Ok(GroupSpec {
            name: raw.name,
            geometry,
            source: GroupSource::Cartan(rows),
            backend,
        });
    }
    if let Some(rows) = raw.coxeter {
        return Ok(GroupSpec {
            name: raw.name,
            geometry,
            source: GroupSource::Coxeter(rows),
            backend,
        });
    }
    let rows = raw.gram.expect("counted above");
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if nrows == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(CliError::Malformed("gram matrix must be rectangular and nonempty".into()));
    }
    let mut entries: Vec<Vec<ScalarValue>> = Vec::with_capacity(nrows);
    for row in &rows {
        let mut out = Vec::with_capacity(ncols);
        for cell in row {
            out.push(parse_gram_entry(backend, cell)?);
        }
        entries.push(out);
    }
    Ok(GroupSpec {
        name: raw.name,
        geometry,
        source: GroupSource::Gram(Matrix::from_rows(backend, entries)),
        backend,
    })
}

fn resolve_epsilon(file_value: Option<f64>) -> Result<f64, CliError> {
    let base = match file_value {
        Some(e) if e > 0.0 && e.is_finite() => e,
        Some(e) => {
            return Err(CliError::Malformed(format!("epsilon must be positive and finite, got {e}")))
        }
        None => chamberfold_core::DEFAULT_EPSILON,
    };
    match std::env::var("CHAMBERFOLD_EPSILON") {
        Ok(text) => text
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|e| *e > 0.0 && e.is_finite())
            .ok_or_else(|| {
                CliError::Malformed(format!("CHAMBERFOLD_EPSILON='{text}' is not a positive float"))
            }),
        Err(_) => Ok(base),
    }
}

/// Cartan inputs default to exact arithmetic; Coxeter tables stay exact only
/// when every bond is rational-representable; explicit gram matrices default
/// to exact unless a float literal appears.
fn default_backend(raw: &RawSpec, epsilon: f64) -> Backend {
    let float = Backend::Approx { eps: epsilon };
    if raw.cartan.is_some() {
        return Backend::Exact;
    }
    if let Some(rows) = &raw.coxeter {
        let exact_ok = rows
            .iter()
            .flatten()
            .all(|&m| matches!(m, 0 | 1 | 2 | 3));
        return if exact_ok { Backend::Exact } else { float };
    }
    if let Some(rows) = &raw.gram {
        let exact_ok = rows.iter().flatten().all(|v| match v {
            serde_json::Value::Number(n) => n.is_i64(),
            serde_json::Value::String(_) => true,
            _ => false,
        });
        return if exact_ok { Backend::Exact } else { float };
    }
    Backend::Exact
}

fn parse_gram_entry(backend: Backend, value: &serde_json::Value) -> Result<ScalarValue, CliError> {
    match value {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(backend.from_i64(i))
            } else if backend.is_exact() {
                Err(CliError::Malformed(format!(
                    "gram entry {n} is not rational; exact backend needs integers or \"p/q\" strings"
                )))
            } else {
                Ok(backend.from_f64(n.as_f64().unwrap_or(f64::NAN)))
            }
        }
        serde_json::Value::String(s) => parse_scalar(backend, s),
        other => Err(CliError::Malformed(format!("gram entry {other} is not a number"))),
    }
}

/// Parses "3", "-1/2", or "0.25" into the backend's scalar type.
pub fn parse_scalar(backend: Backend, text: &str) -> Result<ScalarValue, CliError> {
    let text = text.trim();
    let bad = || CliError::Malformed(format!("cannot parse scalar '{text}'"));
    if let Some((num, den)) = text.split_once('/') {
        let p: i64 = num.trim().parse().map_err(|_| bad())?;
        let q: i64 = den.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(CliError::Malformed(format!("zero denominator in '{text}'")));
        }
        return Ok(backend.from_ratio(p, q));
    }
    if let Ok(i) = text.parse::<i64>() {
        return Ok(backend.from_i64(i));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        // Decimal literals stay exact on the exact backend.
        if backend.is_exact() {
            let sign = if whole.trim_start().starts_with('-') { -1 } else { 1 };
            let whole_val: i64 = if whole.is_empty() || whole == "-" {
                0
            } else {
                whole.parse().map_err(|_| bad())?
            };
            if frac.len() > 12 || frac.chars().any(|c| !c.is_ascii_digit()) {
                return Err(bad());
            }
            let scale = 10i64.pow(frac.len() as u32);
            let frac_val: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
            return Ok(backend
                .from_i64(whole_val)
                .add(&backend.from_ratio(sign * frac_val, scale)));
        }
    }
    if !backend.is_exact() {
        if let Ok(f) = text.parse::<f64>() {
            if f.is_finite() {
                return Ok(backend.from_f64(f));
            }
        }
    }
    Err(bad())
}

/// Parses a comma-separated coordinate vector.
pub fn parse_vector(
    backend: Backend,
    dim: usize,
    text: &str,
) -> Result<chamberfold_core::linalg::Vector, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != dim {
        return Err(CliError::Malformed(format!(
            "expected {dim} comma-separated coordinates, got {}",
            parts.len()
        )));
    }
    let entries: Result<Vec<ScalarValue>, CliError> =
        parts.iter().map(|p| parse_scalar(backend, p)).collect();
    Ok(chamberfold_core::linalg::Vector::new(backend, entries?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(json: &str) -> Result<GroupSpec, CliError> {
        spec_from_raw(serde_json::from_str(json).unwrap())
    }

    #[test]
    fn cartan_spec_parses_exact() {
        let spec = raw(r#"{"name":"a2","geometry":"spherical","cartan":[[2,-1],[-1,2]]}"#)
            .unwrap();
        assert!(spec.backend.is_exact());
        assert!(matches!(spec.source, GroupSource::Cartan(_)));
    }

    #[test]
    fn coxeter_backend_defaults_follow_bonds() {
        let exact = raw(r#"{"name":"x","geometry":"spherical","coxeter":[[1,2],[2,1]]}"#).unwrap();
        assert!(exact.backend.is_exact());
        let float = raw(r#"{"name":"x","geometry":"hyperbolic","coxeter":[[1,2,3],[2,1,7],[3,7,1]]}"#)
            .unwrap();
        assert!(!float.backend.is_exact());
    }

    #[test]
    fn gram_strings_are_exact_rationals() {
        let spec = raw(r#"{"name":"x","geometry":"spherical","gram":[["1","-1/2"],["-1/2","1"]]}"#)
            .unwrap();
        let GroupSource::Gram(m) = &spec.source else { panic!() };
        assert_eq!(*m.get(0, 1), Backend::Exact.from_ratio(-1, 2));
    }

    #[test]
    fn conflicting_sources_rejected() {
        assert!(raw(
            r#"{"name":"x","geometry":"spherical","cartan":[[2]],"coxeter":[[1]]}"#
        )
        .is_err());
        assert!(raw(r#"{"name":"x","geometry":"spherical"}"#).is_err());
        assert!(raw(r#"{"name":"x","geometry":"flat","cartan":[[2]]}"#).is_err());
    }

    #[test]
    fn scalar_forms_parse() {
        let b = Backend::Exact;
        assert_eq!(parse_scalar(b, "3").unwrap(), b.from_i64(3));
        assert_eq!(parse_scalar(b, "-1/2").unwrap(), b.from_ratio(-1, 2));
        assert_eq!(parse_scalar(b, "0.25").unwrap(), b.from_ratio(1, 4));
        assert_eq!(parse_scalar(b, "-1.5").unwrap(), b.from_ratio(-3, 2));
        assert!(parse_scalar(b, "1/0").is_err());
        assert!(parse_scalar(b, "abc").is_err());
    }
}
