//! End-to-end runs of the installed binary: exit codes, report shapes, and
//! flag handling, against the catalog spec files shipped in `specs/`.

use std::path::PathBuf;
use std::process::{Command, Output};

use chamberfold_core::enumerate::{enumerate_to, is_regular};
use chamberfold_core::group::{build_group, Geometry, GroupSpec, ReflectionGroup};
use chamberfold_core::linalg::Vector;
use chamberfold_core::scalar::Backend;
use serde_json::{json, Value};

fn spec(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("specs");
    p.push(format!("{name}.json"));
    p.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chamberfold"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

#[test]
fn solve_spherical_reports_the_full_tile() {
    let out = run(&["solve", "--spec", &spec("a2"), "--variant", "spherical", "--u", "1,2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["w_word"], json!([2, 1]));
    assert_eq!(v["w_matrix"], json!([[-1, 1], [-1, 0]]));
    assert_eq!(v["witness"], json!([1, 1]));
    assert_eq!(v["tile_dim"], json!(2));
    assert_eq!(v["unique"], json!(true));
    assert_eq!(v["group"], json!("a2"));
}

#[test]
fn solve_spherical_origin_is_the_identity_tile() {
    let out = run(&["solve", "--spec", &spec("a2"), "--variant", "spherical", "--u", "0,0"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["w_word"], json!([]));
    assert_eq!(v["tile_dim"], json!(0));
}

#[test]
fn solve_affine_reflection_band() {
    // u = 3 sits in the reflection band (2, 4): w is x -> -2 - x.
    let out = run(&["solve", "--spec", &spec("a1aff"), "--variant", "affine", "--u", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["w_word"], json!([1, 0, 1]));
    assert_eq!(v["w_matrix"], json!([[-1]]));
    assert_eq!(v["w_translation"], json!([-2]));
    assert_eq!(v["witness"], json!(["1/2"]));
    assert_eq!(v["tile_dim"], json!(1));
    assert_eq!(v["unique"], json!(true));
}

#[test]
fn solve_affine_even_integer_is_a_point_tile() {
    let out = run(&["solve", "--spec", &spec("a1aff"), "--variant", "affine", "--u", "2"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["w_matrix"], json!([[1]]));
    assert_eq!(v["w_translation"], json!([-2]));
    assert_eq!(v["tile_dim"], json!(0));
    assert_eq!(v["unique"], json!(true));
}

#[test]
fn solve_affine_twist_by_a_generator() {
    // h = s1: the element with (h - w) D° containing 0 is w = s1 itself.
    let out = run(&[
        "solve", "--spec", &spec("a2aff"), "--variant", "affine", "--u", "0,0", "--h-word", "1",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["w_word"], json!([1]));
    assert_eq!(v["tile_dim"], json!(0));
    assert_eq!(v["unique"], json!(true));
}

#[test]
fn solve_affine_contraction_reports_candidates() {
    let out = run(&[
        "solve", "--spec", &spec("a1aff"), "--variant", "affine", "--u", "3", "--h-scale", "1/2",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    // A contraction only covers: the report still leads with one tile, and
    // the defining identity (h - w)v = u must hold for it.
    let w: f64 = match &v["witness"][0] {
        Value::Number(n) => n.as_f64().unwrap(),
        Value::String(s) => {
            let (p, q) = s.split_once('/').unwrap();
            p.parse::<f64>().unwrap() / q.parse::<f64>().unwrap()
        }
        other => panic!("unexpected witness entry {other}"),
    };
    let a = v["w_matrix"][0][0].as_f64().unwrap();
    let t = v["w_translation"][0].as_f64().unwrap();
    let residual = (0.5 * w - (a * w + t) - 3.0).abs();
    assert!(residual < 1e-9, "residual {residual}");
}

#[test]
fn solve_exit_codes_follow_the_contract() {
    // Outside the dual cone: a precondition failure.
    let out = run(&["solve", "--spec", &spec("a2"), "--variant", "spherical", "--u", "1,-1"]);
    assert_eq!(code(&out), 2);

    // Unparsable point, wrong arity, unknown variant: malformed input.
    for args in [
        vec!["solve", "--spec", &spec("a2"), "--variant", "spherical", "--u", "abc"],
        vec!["solve", "--spec", &spec("a2"), "--variant", "spherical", "--u", "1"],
        vec!["solve", "--spec", &spec("a2"), "--variant", "mystery", "--u", "1,2"],
        vec!["solve", "--spec", &spec("t246"), "--variant", "spherical", "--u", "1,1,1"],
        vec!["solve", "--spec", &spec("a2"), "--variant", "affine", "--u", "1,2"],
    ] {
        let out = run(&args);
        assert_eq!(code(&out), 1, "args {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }

    let help = run(&["--help"]);
    assert_eq!(code(&help), 0);
    let nonsense = run(&["frobnicate"]);
    assert_eq!(code(&nonsense), 1);
}

fn t246_library_group() -> ReflectionGroup {
    build_group(&GroupSpec::coxeter(
        "t246",
        Geometry::Hyperbolic,
        &[&[1, 4, 2], &[4, 1, 6], &[2, 6, 1]],
        Backend::Approx { eps: 1e-9 },
    ))
    .unwrap()
}

#[test]
fn hyperbolic_budget_exhaustion_is_exit_3() {
    // Build a point deep in the fan — the tile of a regular length-5
    // element — then search with a horizon of 2.
    let g = t246_library_group();
    let w = enumerate_to(&g, 5)
        .unwrap()
        .into_iter()
        .find(|e| e.word.as_ref().map(|w| w.len()) == Some(5) && is_regular(&g, e))
        .expect("a regular element of length 5");
    let b = g.backend();
    let gram_inv = chamberfold_core::linalg::inverse(g.space.gram()).unwrap();
    let mut chamber_point = Vector::zeros(b, 3);
    for i in 0..3 {
        chamber_point = chamber_point.add(&gram_inv.col(i));
    }
    let u = chamber_point.sub(&w.linear.mul_vec(&chamber_point));
    let u_text = (0..3).map(|i| format!("{:.17e}", u.get(i).to_f64())).collect::<Vec<_>>().join(",");

    let out = run(&[
        "solve", "--spec", &spec("t246"), "--variant", "hyperbolic-plus", "--u", &u_text,
        "--max-length", "2",
    ]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));

    // The same point resolves once the horizon covers it.
    let ok = run(&[
        "solve", "--spec", &spec("t246"), "--variant", "hyperbolic-plus", "--u", &u_text,
        "--max-length", "6",
    ]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    let v = stdout_json(&ok);
    assert_eq!(v["w_word"].as_array().unwrap().len(), 5);
}

#[test]
fn verify_detsum_reports_the_group_order() {
    let out = run(&["verify", "--spec", &spec("b3"), "--suite", "detsum", "--samples", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["value"], json!("48"));
    assert_eq!(v["violations"], json!([]));
    assert_eq!(v["suite"], json!("detsum"));
}

#[test]
fn verify_geometry_gates_are_exit_1() {
    let signs_on_finite = run(&["verify", "--spec", &spec("a2"), "--suite", "theorem3-signs"]);
    assert_eq!(code(&signs_on_finite), 1);
    let kostant_on_hyperbolic = run(&["verify", "--spec", &spec("t246"), "--suite", "kostant"]);
    assert_eq!(code(&kostant_on_hyperbolic), 1);
    let unknown = run(&["verify", "--spec", &spec("a2"), "--suite", "nonsense"]);
    assert_eq!(code(&unknown), 1);
}

#[test]
fn verify_partition_runs_on_every_geometry() {
    for (name, samples) in [("a2", "50"), ("a2aff", "10"), ("t246", "10")] {
        let out = run(&["verify", "--spec", &spec(name), "--suite", "partition", "--samples", samples]);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let v = stdout_json(&out);
        assert_eq!(v["violations"], json!([]), "{name}");
        assert!(v["checked"].as_u64().unwrap() > 0, "{name}");
    }
}

#[test]
fn epsilon_env_variable_overrides_the_spec() {
    let plain = run(&["info", "--spec", &spec("t246")]);
    assert_eq!(stdout_json(&plain)["epsilon"], json!(1e-9));

    let out = Command::new(env!("CARGO_BIN_EXE_chamberfold"))
        .args(["info", "--spec", &spec("t246")])
        .env("CHAMBERFOLD_EPSILON", "1e-6")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["epsilon"], json!(1e-6));

    let bad = Command::new(env!("CARGO_BIN_EXE_chamberfold"))
        .args(["info", "--spec", &spec("t246")])
        .env("CHAMBERFOLD_EPSILON", "-3")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 1);
}

#[test]
fn info_reports_catalog_facts() {
    let a2 = stdout_json(&run(&["info", "--spec", &spec("a2")]));
    assert_eq!(a2["order"], json!(6));
    assert_eq!(a2["roots"], json!(3));
    assert_eq!(a2["regular_elements"], json!(2));
    assert_eq!(a2["signature"], json!([2, 0]));
    assert_eq!(a2["backend"], json!("exact"));
    assert!(a2.get("epsilon").is_none());

    let aff = stdout_json(&run(&["info", "--spec", &spec("a2aff")]));
    assert_eq!(aff["order"], json!("infinite"));
    assert_eq!(aff["alcove_vertices"].as_array().unwrap().len(), 3);
    assert!(aff.get("highest_root").is_some());

    let t237 = stdout_json(&run(&["info", "--spec", &spec("t237")]));
    assert_eq!(t237["signature"], json!([2, 1]));
    assert_eq!(t237["order"], json!("infinite"));
}

#[test]
fn render_section_writes_svg_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a2.svg");
    let out = run(&[
        "render-section", "--spec", &spec("a2"), "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("<g id=\"dual-cone-fan\">"));
    assert_eq!(svg.matches("<polygon").count(), 2);
    assert_eq!(svg.matches("<line").count(), 3);

    // Without --out the document goes to stdout.
    let to_stdout = run(&["render-section", "--spec", &spec("a2"), "--region", "chamber-fan"]);
    assert_eq!(code(&to_stdout), 0);
    let svg = String::from_utf8(to_stdout.stdout).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polygon").count(), 6);

    let no_labels = run(&["render-section", "--spec", &spec("a2"), "--no-labels"]);
    assert!(!String::from_utf8(no_labels.stdout).unwrap().contains("<text"));
}

#[test]
fn render_section_rejects_unsupported_inputs() {
    // Hyperbolic groups have no spherical fan section.
    let hyp = run(&["render-section", "--spec", &spec("t237")]);
    assert_eq!(code(&hyp), 1);
    // Slice planes only make sense for rank 3.
    let plane = run(&["render-section", "--spec", &spec("a2"), "--plane", "1,1=1"]);
    assert_eq!(code(&plane), 1);
    let region = run(&["render-section", "--spec", &spec("a2"), "--region", "nonsense"]);
    assert_eq!(code(&region), 1);
}

#[test]
fn malformed_spec_files_are_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &str); 4] = [
        ("syntax.json", "{not json"),
        ("unknown.json", r#"{"name":"x","geometry":"spherical","cartan":[[2]],"extra":1}"#),
        (
            "twosource.json",
            r#"{"name":"x","geometry":"spherical","cartan":[[2]],"coxeter":[[1]]}"#,
        ),
        ("asym.json", r#"{"name":"x","geometry":"spherical","gram":[[1,0],["1/2",1]]}"#),
    ];
    for (name, text) in cases {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        let out = run(&["info", "--spec", path.to_str().unwrap()]);
        assert_eq!(code(&out), 1, "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let missing = run(&["info", "--spec", "/nonexistent/nope.json"]);
    assert_eq!(code(&missing), 1);
}
