//! JSON report shapes. Exact rationals serialize as integers when integral
//! and `"p/q"` strings otherwise, so exact runs stay byte-stable and never
//! pass through floats.

use chamberfold_core::chamber::TileSolution;
use chamberfold_core::element::GroupElement;
use chamberfold_core::group::{Geometry, ReflectionGroup};
use chamberfold_core::linalg::{Matrix, Vector};
use chamberfold_core::scalar::ScalarValue;
use chamberfold_core::solver::AffineSolve;
use chamberfold_core::verify::VerifyReport;
use num::ToPrimitive;
use serde_json::{json, Value};

pub fn scalar_json(s: &ScalarValue) -> Value {
    match s.as_exact() {
        Some(r) => {
            if r.is_integer() {
                match r.to_integer().to_i64() {
                    Some(i) => json!(i),
                    None => json!(r.to_string()),
                }
            } else {
                json!(format!("{}/{}", r.numer(), r.denom()))
            }
        }
        None => json!(s.to_f64()),
    }
}

pub fn vector_json(v: &Vector) -> Value {
    Value::Array(v.entries.iter().map(scalar_json).collect())
}

pub fn matrix_json(m: &Matrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| vector_json(&m.row(i))).collect())
}

/// External word form: generators print as 1..d, and the affine wall
/// reflection prints as 0.
pub fn display_word(group: &ReflectionGroup, word: &[u16]) -> Vec<u16> {
    let affine_letter = group.dim() as u16;
    word.iter()
        .map(|&l| {
            if group.geometry == Geometry::Affine && l == affine_letter {
                0
            } else {
                l + 1
            }
        })
        .collect()
}

/// Inverse of [`display_word`]; rejects letters outside the group.
pub fn internal_word(group: &ReflectionGroup, display: &[u16]) -> Result<Vec<u16>, String> {
    let d = group.dim() as u16;
    display
        .iter()
        .map(|&l| {
            if l == 0 {
                if group.geometry == Geometry::Affine {
                    Ok(d)
                } else {
                    Err("letter 0 denotes the affine wall; this group has none".to_string())
                }
            } else if l <= d {
                Ok(l - 1)
            } else {
                Err(format!("letter {l} exceeds the {d} generators"))
            }
        })
        .collect()
}

pub fn word_json(group: &ReflectionGroup, word: &[u16]) -> Value {
    Value::Array(display_word(group, word).into_iter().map(|l| json!(l)).collect())
}

fn element_fields(group: &ReflectionGroup, sol: &TileSolution, out: &mut serde_json::Map<String, Value>) {
    let word = sol.element.word.clone().unwrap_or_default();
    out.insert("w_word".into(), word_json(group, &word));
    out.insert("w_matrix".into(), matrix_json(&sol.element.linear));
    if group.geometry == Geometry::Affine {
        out.insert("w_translation".into(), vector_json(&sol.element.translation));
    }
    out.insert("witness".into(), vector_json(&sol.witness));
    out.insert("tile_dim".into(), json!(sol.tile_dim));
}

pub fn solve_report(group: &ReflectionGroup, variant: &str, sol: &TileSolution, unique: bool) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("group".into(), json!(group.name));
    map.insert("variant".into(), json!(variant));
    element_fields(group, sol, &mut map);
    map.insert("unique".into(), json!(unique));
    Value::Object(map)
}

pub fn affine_solve_report(group: &ReflectionGroup, solve: &AffineSolve) -> Value {
    let first = solve.solutions.first().expect("solver returns at least one tile");
    let mut report = solve_report(group, "affine", first, solve.unique);
    if solve.solutions.len() > 1 {
        let candidates: Vec<Value> = solve
            .solutions
            .iter()
            .map(|s| {
                json!({
                    "w_word": word_json(group, s.element.word.as_deref().unwrap_or(&[])),
                    "tile_dim": s.tile_dim,
                })
            })
            .collect();
        report["candidates"] = Value::Array(candidates);
    }
    report
}

pub fn verify_report_json(group: &ReflectionGroup, report: &VerifyReport, samples: usize, seed: u64) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("group".into(), json!(group.name));
    map.insert("suite".into(), json!(report.suite));
    map.insert("samples".into(), json!(samples));
    map.insert("seed".into(), json!(seed));
    map.insert("checked".into(), json!(report.checked));
    map.insert("violations".into(), json!(report.violations));
    map.insert("ambiguous".into(), json!(report.ambiguous));
    if let Some(v) = &report.value {
        map.insert("value".into(), json!(v));
    }
    Value::Object(map)
}

pub fn info_report(group: &ReflectionGroup) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("name".into(), json!(group.name));
    map.insert(
        "geometry".into(),
        json!(match group.geometry {
            Geometry::Spherical => "spherical",
            Geometry::Affine => "affine",
            Geometry::Hyperbolic => "hyperbolic",
        }),
    );
    map.insert(
        "backend".into(),
        json!(if group.backend().is_exact() { "exact" } else { "float" }),
    );
    if !group.backend().is_exact() {
        map.insert("epsilon".into(), json!(group.backend().eps()));
    }
    map.insert(
        "order".into(),
        match group.order() {
            Some(n) => json!(n),
            None => json!("infinite"),
        },
    );
    map.insert("simple_normals".into(), json!(group.dim()));
    let (pos, neg, _zero) = chamberfold_core::linalg::inertia(group.space.gram());
    map.insert("signature".into(), json!([pos, neg]));
    if group.geometry == Geometry::Spherical {
        if let Ok(inv) = chamberfold_core::structure::enumerate_roots(group) {
            map.insert("roots".into(), json!(inv.roots.len()));
        }
        if let Ok(elements) = group.elements() {
            let regular = elements
                .iter()
                .filter(|e| chamberfold_core::enumerate::is_regular(group, e))
                .count();
            map.insert("regular_elements".into(), json!(regular));
        }
    }
    if let Some(aff) = &group.affine {
        map.insert("highest_root".into(), vector_json(&aff.highest_root));
        map.insert(
            "alcove_vertices".into(),
            Value::Array(aff.alcove_vertices.iter().map(vector_json).collect()),
        );
    }
    if !group.warnings.is_empty() {
        map.insert("warnings".into(), json!(group.warnings));
    }
    Value::Object(map)
}

pub fn element_from_display_word(
    group: &ReflectionGroup,
    display: &[u16],
) -> Result<GroupElement, crate::CliError> {
    let internal = internal_word(group, display).map_err(crate::CliError::Malformed)?;
    chamberfold_core::enumerate::element_from_word(group, &internal).map_err(crate::CliError::Core)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chamberfold_core::group::{build_group, GroupSpec};
    use chamberfold_core::scalar::Backend;

    #[test]
    fn scalars_serialize_without_floats_on_exact() {
        let b = Backend::Exact;
        assert_eq!(scalar_json(&b.from_i64(3)), json!(3));
        assert_eq!(scalar_json(&b.from_ratio(-1, 2)), json!("-1/2"));
        let f = Backend::approx_default();
        assert_eq!(scalar_json(&f.from_f64(0.5)), json!(0.5));
    }

    #[test]
    fn affine_display_words_use_zero_for_the_wall() {
        let g = build_group(&GroupSpec::cartan(
            "a2aff",
            Geometry::Affine,
            &[&[2, -1], &[-1, 2]],
            Backend::Exact,
        ))
        .unwrap();
        assert_eq!(display_word(&g, &[0, 1, 2]), vec![1, 2, 0]);
        assert_eq!(internal_word(&g, &[1, 2, 0]).unwrap(), vec![0, 1, 2]);
        assert!(internal_word(&g, &[3]).is_err());

        let s = build_group(&GroupSpec::cartan(
            "a2",
            Geometry::Spherical,
            &[&[2, -1], &[-1, 2]],
            Backend::Exact,
        ))
        .unwrap();
        assert_eq!(display_word(&s, &[1, 0]), vec![2, 1]);
        assert!(internal_word(&s, &[0]).is_err());
    }
}
