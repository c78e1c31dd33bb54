//! End-to-end round trips through the tiling solvers on representative
//! groups of all three geometries, plus the shared-face implication between
//! chamber adjacency and tile adjacency.

use chamberfold_core::chamber::{lightcone_classify, LightConeClass};
use chamberfold_core::enumerate::{canonical_word, element_from_word, enumerate_to};
use chamberfold_core::group::{build_group, Geometry, GroupSpec, ReflectionGroup};
use chamberfold_core::linalg::{rank, rank_and_kernel, Matrix, Vector};
use chamberfold_core::polyhedron::{
    relative_interior_point, AffineSubspace, Constraint, ConstraintKind, PolyhedronSpec,
};
use chamberfold_core::scalar::Backend;
use chamberfold_core::solver::{
    solve_affine, solve_hyperbolic_minus, solve_hyperbolic_plus, solve_spherical, SolverBudget,
};
use chamberfold_core::structure::{det_sum, kostant_decompose, minimal_length_oracle};
use chamberfold_core::verify::witness_residual;

fn spherical(name: &str, cartan: &[&[i64]]) -> ReflectionGroup {
    build_group(&GroupSpec::cartan(name, Geometry::Spherical, cartan, Backend::Exact)).unwrap()
}

#[test]
fn b2_tiles_recover_their_elements() {
    let g = spherical("b2", &[&[2, -1], &[-2, 2]]);
    let v = g.chamber_point();
    for w in g.elements().unwrap() {
        let u = v.sub(&w.apply(&v));
        let sol = solve_spherical(&g, &u).unwrap();
        assert!(sol.element.same_isometry(w), "tile of {:?} lost", w.word);
        assert!(witness_residual(&sol.element, &sol.witness, &u) == 0.0);
    }
    // A small grid across the dual cone always lands in exactly one tile.
    let b = Backend::Exact;
    for i in 0..=6i64 {
        for j in 0..=6i64 {
            let u = Vector::new(b, vec![b.from_ratio(i, 2), b.from_ratio(j, 2)]);
            solve_spherical(&g, &u).unwrap();
        }
    }
}

#[test]
fn b2_minimal_factorizations_match_oracle() {
    let g = spherical("b2", &[&[2, -1], &[-2, 2]]);
    for w in g.elements().unwrap() {
        let dec = kostant_decompose(&g, w).unwrap();
        assert!(dec.verify(&g).unwrap());
        assert_eq!(dec.len(), minimal_length_oracle(&g, w).unwrap());
    }
}

#[test]
fn determinant_sums_match_group_orders() {
    let a1a1 = build_group(&GroupSpec::coxeter(
        "a1xa1",
        Geometry::Spherical,
        &[&[1, 2], &[2, 1]],
        Backend::Exact,
    ))
    .unwrap();
    assert_eq!(det_sum(&a1a1, None).unwrap(), Backend::Exact.from_i64(4));
    let g2 = spherical("g2", &[&[2, -1], &[-3, 2]]);
    assert_eq!(det_sum(&g2, None).unwrap(), Backend::Exact.from_i64(12));
}

#[test]
fn affine_a2_round_trips_words() {
    let g = build_group(&GroupSpec::cartan(
        "a2aff",
        Geometry::Affine,
        &[&[2, -1], &[-1, 2]],
        Backend::Exact,
    ))
    .unwrap();
    let budget = SolverBudget::default();
    let v = g.base_point();
    let words: [&[u16]; 7] =
        [&[], &[0], &[2], &[0, 1], &[2, 0], &[0, 1, 2], &[2, 0, 1, 2]];
    for word in words {
        let w = element_from_word(&g, word).unwrap();
        let u = v.sub(&w.apply(&v));
        let solve = solve_affine(&g, None, &u, &budget).unwrap();
        assert!(solve.unique);
        assert_eq!(solve.solutions.len(), 1);
        let got = &solve.solutions[0];
        assert!(got.element.same_isometry(&w), "word {word:?} not recovered");
        assert_eq!(
            got.element.word.clone().unwrap(),
            canonical_word(&g, &w).unwrap()
        );
    }
}

#[test]
fn hyperbolic_round_trips_both_cones() {
    let g = build_group(&GroupSpec::coxeter(
        "t237",
        Geometry::Hyperbolic,
        &[&[1, 2, 3], &[2, 1, 7], &[3, 7, 1]],
        Backend::approx_default(),
    ))
    .unwrap();
    let budget = SolverBudget { max_word_length: 6, ..SolverBudget::default() };
    let v = g.chamber_point();
    for w in enumerate_to(&g, 5).unwrap() {
        let u = v.sub(&w.apply(&v));
        let sol = solve_hyperbolic_plus(&g, &u, &budget).unwrap();
        assert!(
            sol.element.same_isometry(&w),
            "forward tile of {:?} lost",
            w.word
        );
        assert!(witness_residual(&sol.element, &sol.witness, &u) < 1e-9);

        let u_minus = v.neg().sub(&w.apply(&v));
        assert_eq!(
            lightcone_classify(&g, &u_minus).unwrap(),
            LightConeClass::KMinusInterior
        );
        let sol = solve_hyperbolic_minus(&g, &u_minus, &budget).unwrap();
        assert!(
            sol.element.same_isometry(&w),
            "mirrored tile of {:?} lost",
            w.word
        );
    }
}

/// Whether the cone {x : rows x >= 0, eq x = 0} maps to something nonzero
/// under `image` (None = identity): relative-interior active rows span the
/// cone's orthogonal complement, so the image is nonzero exactly when the
/// map has positive rank on the kernel of the active rows.
fn cone_image_nonzero(spec: &PolyhedronSpec, image: Option<&Matrix>, dim: usize) -> bool {
    let backend = spec.constraints[0].coeffs.backend;
    let rp = relative_interior_point(spec, &AffineSubspace::full(backend, dim))
        .expect("homogeneous system is feasible");
    let mut rows: Vec<Vector> = rp
        .active
        .iter()
        .map(|&i| spec.constraints[i].coeffs.clone())
        .collect();
    rows.extend(
        spec.constraints
            .iter()
            .filter(|c| c.kind == ConstraintKind::Equality)
            .map(|c| c.coeffs.clone()),
    );
    let span = if rows.is_empty() {
        (0..dim).map(|i| Vector::unit(backend, dim, i)).collect::<Vec<_>>()
    } else {
        let mut m = Matrix::zeros(backend, rows.len(), dim);
        for (i, r) in rows.iter().enumerate() {
            for j in 0..dim {
                m.set(i, j, r.get(j).clone());
            }
        }
        rank_and_kernel(&m).kernel_basis
    };
    if span.is_empty() {
        return false;
    }
    match image {
        None => true,
        Some(map) => {
            let mut img = Matrix::zeros(backend, map.nrows(), span.len());
            for (j, k) in span.iter().enumerate() {
                let mapped = map.mul_vec(k);
                for i in 0..map.nrows() {
                    img.set(i, j, mapped.get(i).clone());
                }
            }
            rank(&img) > 0
        }
    }
}

#[test]
fn shared_chamber_faces_force_shared_tile_points() {
    let g = spherical("a2", &[&[2, -1], &[-1, 2]]);
    let b = Backend::Exact;
    let d = g.dim();
    let gram = g.space.gram().clone();
    let id = Matrix::identity(b, d);
    let elements = g.elements().unwrap();
    let mut hypotheses = 0;
    for w in elements {
        for w_prime in elements {
            if w.is_identity() || w_prime.is_identity() {
                continue;
            }
            // Hypothesis: the chambers wC and w'C share a nonzero point.
            let mut rows = Vec::new();
            for e in [w, w_prime] {
                let pulled = gram.mul_mat(&e.inverse().linear);
                for i in 0..d {
                    rows.push(Constraint::new(pulled.row(i), b.zero(), ConstraintKind::NonStrict));
                }
            }
            let chamber_spec = PolyhedronSpec::new(d, rows);
            if !cone_image_nonzero(&chamber_spec, None, d) {
                continue;
            }
            hypotheses += 1;
            // Conclusion: the tiles (1-w)C and (1-w')C share one too. Joint
            // variables (a, b) with (1-w)a = (1-w')b, both in the chamber.
            let t = id.sub(&w.linear);
            let t_prime = id.sub(&w_prime.linear);
            let mut joint = Vec::new();
            for i in 0..d {
                let mut row = vec![b.zero(); 2 * d];
                for j in 0..d {
                    row[j] = gram.get(i, j).clone();
                }
                joint.push(Constraint::new(
                    Vector::new(b, row),
                    b.zero(),
                    ConstraintKind::NonStrict,
                ));
                let mut row = vec![b.zero(); 2 * d];
                for j in 0..d {
                    row[d + j] = gram.get(i, j).clone();
                }
                joint.push(Constraint::new(
                    Vector::new(b, row),
                    b.zero(),
                    ConstraintKind::NonStrict,
                ));
                let mut row = vec![b.zero(); 2 * d];
                for j in 0..d {
                    row[j] = t.get(i, j).clone();
                    row[d + j] = t_prime.get(i, j).neg();
                }
                joint.push(Constraint::new(
                    Vector::new(b, row),
                    b.zero(),
                    ConstraintKind::Equality,
                ));
            }
            let joint_spec = PolyhedronSpec::new(2 * d, joint);
            let mut first_block = Matrix::zeros(b, d, 2 * d);
            for i in 0..d {
                for j in 0..d {
                    first_block.set(i, j, t.get(i, j).clone());
                }
            }
            assert!(
                cone_image_nonzero(&joint_spec, Some(&first_block), 2 * d),
                "chambers of {:?} and {:?} touch but their tiles do not",
                w.word,
                w_prime.word
            );
        }
    }
    // The A2 fan has plenty of touching chamber pairs; make sure the sweep
    // actually exercised the implication.
    assert!(hypotheses >= 10, "only {hypotheses} touching pairs found");
}
