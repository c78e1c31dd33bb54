//! Inverse tiling maps: given a vector u (and an affine map h in the
//! Euclidean case), find the group element whose open tile contains u,
//! together with the interior witness. Solving is scan-based: membership is
//! tested element by element, and the uniqueness of the tiling turns the
//! scan into a certificate — a second member is reported as an internal
//! inconsistency, never silently dropped.

use crate::chamber::{
    lightcone_classify, open_domain_spec, tile_membership, LightConeClass, TileMembership,
    TileSolution, TileVariant,
};
use crate::element::GroupElement;
use crate::enumerate::{canonical_word, enumerate_to, fixed_subspace};
use crate::error::{Error, Result};
use crate::group::{Geometry, ReflectionGroup};
use crate::linalg::Vector;
use crate::polyhedron::{feasible_interior, relative_interior_point, Feasibility};
use crate::scalar::ScalarValue;

#[derive(Clone, Copy, Debug)]
pub struct SolverBudget {
    /// Horizon for breadth-first scans over infinite groups.
    pub max_word_length: usize,
    /// Extra ring of lattice points around the affine search box.
    pub affine_margin: i64,
}

impl Default for SolverBudget {
    fn default() -> SolverBudget {
        SolverBudget { max_word_length: 12, affine_margin: 2 }
    }
}

/// Result of an affine solve: all members found (several only possible for
/// contracting h, where tiles may overlap on lower-dimensional sets).
#[derive(Clone, Debug)]
pub struct AffineSolve {
    pub solutions: Vec<TileSolution>,
    pub unique: bool,
}

fn scan_members(
    group: &ReflectionGroup,
    elements: &[GroupElement],
    u: &Vector,
    variant: TileVariant<'_>,
) -> Result<(Vec<TileSolution>, usize)> {
    let mut members = Vec::new();
    let mut ambiguous = 0usize;
    for w in elements {
        match tile_membership(group, w, u, variant.clone())? {
            TileMembership::Member(sol) => members.push(*sol),
            TileMembership::Ambiguous => ambiguous += 1,
            TileMembership::NotMember => {}
        }
    }
    Ok((members, ambiguous))
}

fn certify_unique(
    mut members: Vec<TileSolution>,
    ambiguous: usize,
    exhausted_msg: Option<String>,
) -> Result<TileSolution> {
    match members.len() {
        1 => Ok(members.pop().unwrap()),
        0 if ambiguous > 0 => Err(Error::NotFound(format!(
            "u sits within the tolerance band of a tile wall ({ambiguous} ambiguous \
             candidates); tighten epsilon or use the exact backend"
        ))),
        0 => match exhausted_msg {
            Some(msg) => Err(Error::BudgetExhausted(msg)),
            None => Err(Error::UniquenessViolation(
                "no tile contains u — the partition property failed internally".into(),
            )),
        },
        n => Err(Error::UniquenessViolation(format!(
            "{n} tiles claim u — the partition property failed internally"
        ))),
    }
}

/// Spherical solve: the unique w of a finite group with u in (1-w)C°.
pub fn solve_spherical(group: &ReflectionGroup, u: &Vector) -> Result<TileSolution> {
    if group.geometry != Geometry::Spherical {
        return Err(Error::PreconditionViolated("spherical solve needs a finite group".into()));
    }
    if !crate::chamber::dual_cone_contains(group, u)? {
        return Err(Error::NotInDualCone(
            "u has a negative coordinate on the simple normals".into(),
        ));
    }
    let (members, ambiguous) = scan_members(group, group.elements()?, u, TileVariant::OneMinus)?;
    certify_unique(members, ambiguous, None)
}

/// Affine solve: w = (A, b) with u in (h-w)D°, h an isometry or a
/// contraction (None = identity). For each finite-part A the translation b
/// is confined to a compact box by the alcove geometry; its lattice points
/// are enumerated outright.
pub fn solve_affine(
    group: &ReflectionGroup,
    h: Option<&GroupElement>,
    u: &Vector,
    budget: &SolverBudget,
) -> Result<AffineSolve> {
    let aff = group.affine.as_ref().ok_or_else(|| {
        Error::PreconditionViolated("affine solve needs an affine group".into())
    })?;
    let backend = group.backend();
    let d = group.dim();
    let identity = GroupElement::identity(backend, d);
    let h = h.unwrap_or(&identity);
    let factor = group.space.scaled_isometry_factor(&h.linear).ok_or_else(|| {
        Error::PreconditionViolated("h must have a scaled-isometry linear part".into())
    })?;
    let one = backend.one();
    if factor.gt(&one) {
        return Err(Error::PreconditionViolated(
            "h must be non-expanding (scale factor <= 1)".into(),
        ));
    }
    let isometric = factor.sub(&one).is_zero();

    let mut members: Vec<TileSolution> = Vec::new();
    let mut ambiguous = 0usize;
    for a in group.elements()? {
        // b = (R - A)v + t_h - u over v in the closed alcove: bound per
        // coordinate by the vertex images, then widen by the search margin.
        let m = h.linear.sub(&a.linear);
        let shift = h.translation.sub(u);
        let mut lo: Vec<ScalarValue> = vec![backend.zero(); d];
        let mut hi: Vec<ScalarValue> = vec![backend.zero(); d];
        for (k, vertex) in aff.alcove_vertices.iter().enumerate() {
            let img = m.mul_vec(vertex).add(&shift);
            for i in 0..d {
                let c = img.get(i);
                if k == 0 {
                    lo[i] = c.clone();
                    hi[i] = c.clone();
                } else {
                    lo[i] = lo[i].min_raw(c);
                    hi[i] = hi[i].max_raw(c);
                }
            }
        }
        // Lattice coordinates: b = sum n_i coroot_i with coroot_i = (2/G_ii) e_i,
        // so n_i = b_i G_ii / 2.
        let mut ranges: Vec<(i64, i64)> = Vec::with_capacity(d);
        for i in 0..d {
            let s = group.space.gram().get(i, i).div(&backend.from_i64(2));
            let (a_end, b_end) = (lo[i].mul(&s), hi[i].mul(&s));
            let lo_n = floor_i64(&a_end.min_raw(&b_end)) - budget.affine_margin;
            let hi_n = ceil_i64(&a_end.max_raw(&b_end)) + budget.affine_margin;
            ranges.push((lo_n, hi_n));
        }
        let mut counters: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        'lattice: loop {
            let mut b = Vector::zeros(backend, d);
            for i in 0..d {
                b = b.add(&aff.coroots[i].scale(&backend.from_i64(counters[i])));
            }
            let w = GroupElement::from_affine(a.linear.clone(), b);
            match tile_membership(group, &w, u, TileVariant::HMinus(h))? {
                TileMembership::Member(sol) => members.push(*sol),
                TileMembership::Ambiguous => ambiguous += 1,
                TileMembership::NotMember => {}
            }
            // Advance the mixed-radix counter over the box.
            for i in 0..=d {
                if i == d {
                    break 'lattice;
                }
                counters[i] += 1;
                if counters[i] <= ranges[i].1 {
                    break;
                }
                counters[i] = ranges[i].0;
            }
        }
    }

    // Attach canonical words (the scan produces raw (A, b) pairs).
    for sol in members.iter_mut() {
        let word = canonical_word(group, &sol.element)?;
        sol.element = sol.element.clone().with_word(word);
    }
    members.sort_by_key(|s| {
        (std::cmp::Reverse(s.tile_dim), s.element.word.clone().unwrap_or_default())
    });

    if isometric {
        match members.len() {
            1 => Ok(AffineSolve { solutions: members, unique: true }),
            0 if ambiguous > 0 => Err(Error::NotFound(format!(
                "u sits within the tolerance band of a tile wall ({ambiguous} ambiguous \
                 candidates)"
            ))),
            // Isometric h tiles every point: an empty scan is a hard
            // failure, not a budget artifact.
            0 => Err(Error::NotFound(
                "no tile contains u; with exact arithmetic this indicates an internal \
                 failure of the covering"
                    .into(),
            )),
            n => Err(Error::UniquenessViolation(format!(
                "{n} tiles claim u — the partition property failed internally"
            ))),
        }
    } else {
        if members.is_empty() {
            return Err(if ambiguous > 0 {
                Error::NotFound(format!("{ambiguous} ambiguous candidates, no certain member"))
            } else {
                Error::NotFound("no tile contains u within the searched box".into())
            });
        }
        let unique = members.len() == 1;
        Ok(AffineSolve { solutions: members, unique })
    }
}

/// Hyperbolic solve on C^* \ K_-: breadth-first scan by word length.
pub fn solve_hyperbolic_plus(
    group: &ReflectionGroup,
    u: &Vector,
    budget: &SolverBudget,
) -> Result<TileSolution> {
    if group.geometry != Geometry::Hyperbolic {
        return Err(Error::PreconditionViolated("needs a hyperbolic group".into()));
    }
    if !crate::chamber::dual_cone_contains(group, u)? {
        return Err(Error::PreconditionViolated(
            "u is outside the dual cone".into(),
        ));
    }
    let class = lightcone_classify(group, u)?;
    if class.in_k_minus() {
        return Err(Error::PreconditionViolated(
            "u lies in the past cone; use the (-1-w) solver".into(),
        ));
    }
    if !u.is_zero() && !group.space.norm(u).is_positive() {
        return Err(Error::PreconditionViolated(
            "nonzero u in the dual cone away from the past cone must be spacelike"
                .into(),
        ));
    }
    let elements = enumerate_to(group, budget.max_word_length)?;
    let (members, ambiguous) = scan_members(group, &elements, u, TileVariant::OneMinus)?;
    certify_unique(
        members,
        ambiguous,
        Some(format!(
            "no member within word length {}; inconclusive, not a disproof",
            budget.max_word_length
        )),
    )
}

/// Hyperbolic solve on the open past cone K_-°.
pub fn solve_hyperbolic_minus(
    group: &ReflectionGroup,
    u: &Vector,
    budget: &SolverBudget,
) -> Result<TileSolution> {
    if group.geometry != Geometry::Hyperbolic {
        return Err(Error::PreconditionViolated("needs a hyperbolic group".into()));
    }
    if lightcone_classify(group, u)? != LightConeClass::KMinusInterior {
        return Err(Error::PreconditionViolated(
            "u must be strictly timelike in the past cone (lightlike boundary \
             inputs are outside the certified domain)"
                .into(),
        ));
    }
    let elements = enumerate_to(group, budget.max_word_length)?;
    let (members, ambiguous) = scan_members(group, &elements, u, TileVariant::MinusOneMinus)?;
    certify_unique(
        members,
        ambiguous,
        Some(format!(
            "no member within word length {}; inconclusive, not a disproof",
            budget.max_word_length
        )),
    )
}

/// Fixed-point resolution: the unique w such that w^{-1} g fixes a point of the
/// open fundamental domain, together with that fixed point. g must be an
/// isometry of the form, or (affine geometry) a non-expanding affine map.
pub fn resolve_fixed_point(
    group: &ReflectionGroup,
    g: &GroupElement,
    budget: &SolverBudget,
) -> Result<(GroupElement, Vector)> {
    let factor = group.space.scaled_isometry_factor(&g.linear).ok_or_else(|| {
        Error::PreconditionViolated("g must have a scaled-isometry linear part".into())
    })?;
    let one = group.backend().one();
    let isometric = factor.sub(&one).is_zero();
    if group.geometry == Geometry::Affine {
        if factor.gt(&one) {
            return Err(Error::PreconditionViolated("g must be non-expanding".into()));
        }
    } else if !isometric {
        return Err(Error::PreconditionViolated(
            "g must preserve the form in linear geometries".into(),
        ));
    }

    let candidates: Vec<GroupElement> = match group.geometry {
        Geometry::Spherical => group.elements()?.to_vec(),
        _ => enumerate_to(group, budget.max_word_length)?,
    };
    let open_spec = open_domain_spec(group);
    let closed_spec = crate::chamber::closed_domain_spec(group);
    let mut interior: Vec<(GroupElement, Vector)> = Vec::new();
    let mut boundary: Vec<String> = Vec::new();
    let mut saw_ambiguous = false;
    for w in &candidates {
        let m = w.inverse().mul(g);
        let Some(fixed) = fixed_subspace(&m) else { continue };
        match feasible_interior(&open_spec, &fixed) {
            Feasibility::Feasible(wit) => interior.push((w.clone(), wit.point)),
            Feasibility::Ambiguous => saw_ambiguous = true,
            Feasibility::Infeasible => {
                if relative_interior_point(&closed_spec, &fixed).is_some() {
                    boundary.push(format!("{:?}", w.word.clone().unwrap_or_default()));
                }
            }
        }
    }
    if interior.len() == 1 {
        return Ok(interior.pop().unwrap());
    }
    if interior.len() > 1 {
        return Err(Error::UniquenessViolation(format!(
            "{} elements have interior fixed points; the uniqueness guarantee failed",
            interior.len()
        )));
    }
    if saw_ambiguous {
        Err(Error::NotFound("fixed sets graze the domain walls within tolerance".into()))
    } else if group.geometry != Geometry::Spherical && boundary.is_empty() {
        Err(Error::BudgetExhausted(format!(
            "no fixed point found within word length {}",
            budget.max_word_length
        )))
    } else {
        Err(Error::NoInteriorFixedPoint { candidates: boundary })
    }
}

fn floor_i64(v: &ScalarValue) -> i64 {
    match v.as_exact() {
        Some(r) => num::ToPrimitive::to_i64(&r.floor().to_integer()).expect("box fits i64"),
        None => v.to_f64().floor() as i64,
    }
}

fn ceil_i64(v: &ScalarValue) -> i64 {
    match v.as_exact() {
        Some(r) => num::ToPrimitive::to_i64(&r.ceil().to_integer()).expect("box fits i64"),
        None => v.to_f64().ceil() as i64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::reflection_in_vector;
    use crate::enumerate::element_from_word;
    use crate::group::{build_group, GroupSpec};
    use crate::linalg::Matrix;
    use crate::scalar::Backend;

    fn a2() -> ReflectionGroup {
        build_group(&GroupSpec::cartan(
            "a2",
            Geometry::Spherical,
            &[&[2, -1], &[-1, 2]],
            Backend::Exact,
        ))
        .unwrap()
    }

    fn a1_affine() -> ReflectionGroup {
        build_group(&GroupSpec::gram(
            "a1-affine",
            Geometry::Affine,
            Matrix::from_i64_rows(Backend::Exact, &[&[1]]),
        ))
        .unwrap()
    }

    #[test]
    fn spherical_solve_pins() {
        let g = a2();
        let b = Backend::Exact;
        // u = 0: identity, point tile.
        let sol = solve_spherical(&g, &Vector::zeros(b, 2)).unwrap();
        assert!(sol.element.is_identity());
        assert_eq!(sol.tile_dim, 0);
        // u = e_1: the wall reflection s_1.
        let sol = solve_spherical(&g, &Vector::from_i64(b, &[1, 0])).unwrap();
        assert_eq!(sol.element.word, Some(vec![0]));
        // u = (1,2): the rotation s_2 s_1 with witness (1,1).
        let sol = solve_spherical(&g, &Vector::from_i64(b, &[1, 2])).unwrap();
        assert_eq!(sol.element.word, Some(vec![1, 0]));
        assert_eq!(sol.witness, Vector::from_i64(b, &[1, 1]));
        assert_eq!(sol.tile_dim, 2);
        // Outside the dual cone: rejected up front.
        assert!(matches!(
            solve_spherical(&g, &Vector::from_i64(b, &[1, -1])),
            Err(Error::NotInDualCone(_))
        ));
    }

    #[test]
    fn affine_line_tiling() {
        let g = a1_affine();
        let b = Backend::Exact;
        let budget = SolverBudget::default();
        // u = 3 lives in the open interval (2, 4) = image of the reflection
        // at -1, i.e. x -> -2 - x; witness v = 1/2.
        let sol = solve_affine(&g, None, &Vector::from_i64(b, &[3]), &budget).unwrap();
        assert!(sol.unique);
        let s = &sol.solutions[0];
        assert_eq!(s.element.word, Some(vec![0, 1, 0]));
        assert_eq!(s.witness, Vector::new(b, vec![b.from_ratio(1, 2)]));
        let x = Vector::from_i64(b, &[5]);
        assert_eq!(s.element.apply(&x), Vector::from_i64(b, &[-7]));
        // u = 2: the point tile of the translation by -2.
        let sol = solve_affine(&g, None, &Vector::from_i64(b, &[2]), &budget).unwrap();
        let s = &sol.solutions[0];
        assert_eq!(s.tile_dim, 0);
        assert!(s.element.is_translation());
        assert_eq!(s.element.translation, Vector::from_i64(b, &[-2]));
        assert_eq!(s.witness, Vector::new(b, vec![b.from_ratio(1, 2)]));
        // u = 0: the identity.
        let sol = solve_affine(&g, None, &Vector::zeros(b, 1), &budget).unwrap();
        assert!(sol.solutions[0].element.is_identity());
    }

    #[test]
    fn affine_contraction_has_solutions() {
        let g = a1_affine();
        let b = Backend::Exact;
        let budget = SolverBudget::default();
        let h = GroupElement::from_linear(Matrix::from_rows(b, vec![vec![b.from_ratio(1, 2)]]));
        // Contraction regime: every u is covered; interior solutions unique.
        let sol = solve_affine(&g, Some(&h), &Vector::from_i64(b, &[3]), &budget).unwrap();
        assert!(!sol.solutions.is_empty());
        for s in &sol.solutions {
            // (h - w)v = u must hold at the witness.
            let lhs = h.apply(&s.witness).sub(&s.element.apply(&s.witness));
            assert!(lhs.linf_distance(&Vector::from_i64(b, &[3])).is_zero());
        }
    }

    #[test]
    fn hyperbolic_round_trip() {
        let g = build_group(&GroupSpec::coxeter(
            "t246",
            Geometry::Hyperbolic,
            &[&[1, 4, 2], &[4, 1, 6], &[2, 6, 1]],
            Backend::approx_default(),
        ))
        .unwrap();
        let b = g.backend();
        let budget = SolverBudget { max_word_length: 6, affine_margin: 2 };
        // Forward-construct u = (1-w)v for an interior v, then recover w.
        let w = element_from_word(&g, &[0, 1, 2, 1]).unwrap();
        let v = g.chamber_point().add(&g.coweights[0]);
        let u = v.sub(&w.apply(&v));
        let sol = solve_hyperbolic_plus(&g, &u, &budget).unwrap();
        assert_eq!(sol.element.word, Some(canonical_word(&g, &w).unwrap()));
        // The witness solves the defining equation; it equals v itself
        // exactly when the tile is full-dimensional.
        let residual = sol.witness.sub(&sol.element.apply(&sol.witness)).sub(&u);
        assert!(residual.entries.iter().all(|c| c.to_f64().abs() < 1e-9));
        if crate::enumerate::is_regular(&g, &sol.element) {
            assert!(sol.witness.linf_distance(&v).to_f64() < 1e-9);
        }
        // Past-cone input: identity tile of the minus variant.
        let tau = g.time_orientation.clone().unwrap();
        let u = tau.scale(&b.from_i64(-2));
        let sol = solve_hyperbolic_minus(&g, &u, &budget).unwrap();
        assert!(sol.element.is_identity());
        assert!(sol.witness.linf_distance(&tau).to_f64() < 1e-9);
        // Wrong-cone inputs are rejected.
        assert!(matches!(
            solve_hyperbolic_plus(&g, &u, &budget),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(matches!(
            solve_hyperbolic_minus(&g, &tau, &budget),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn fixed_point_resolution() {
        let g = a2();
        let b = Backend::Exact;
        let budget = SolverBudget::default();
        // g = identity: w = identity, an interior point of the chamber.
        let id = GroupElement::identity(b, 2);
        let (w, x) = resolve_fixed_point(&g, &id, &budget).unwrap();
        assert!(w.is_identity());
        assert_eq!(
            crate::chamber::classify_chamber_point(&g, &x),
            crate::chamber::ChamberClassification::Interior
        );
        // g in W: w = g itself.
        let s1s2 = element_from_word(&g, &[0, 1]).unwrap();
        let (w, _) = resolve_fixed_point(&g, &s1s2, &budget).unwrap();
        assert!(w.same_isometry(&s1s2));
        // The reflection fixing the interior wall e_1 + e_2 resolves to the
        // element whose tile is that ray: s_1 s_2 s_1.
        let su = reflection_in_vector(&g.space, &Vector::from_i64(b, &[1, 1])).unwrap();
        let (w, x) = resolve_fixed_point(&g, &su, &budget).unwrap();
        assert_eq!(canonical_word(&g, &w).unwrap(), vec![0, 1, 0]);
        // Consistency with the solver on the matching ray.
        let sol = solve_spherical(&g, &Vector::from_i64(b, &[1, 1])).unwrap();
        assert!(sol.element.same_isometry(&w));
        // x is an interior point fixed by w^{-1} g (here the identity).
        let m = w.inverse().mul(&su);
        assert!(m.apply(&x).linf_distance(&x).is_zero());
    }

    #[test]
    fn no_interior_fixed_point_reported() {
        let g = a2();
        let b = Backend::Exact;
        let budget = SolverBudget::default();
        // A contraction is out of scope in linear geometries.
        let half = GroupElement::from_linear(
            Matrix::identity(b, 2).scale(&b.from_ratio(1, 2)),
        );
        assert!(matches!(
            resolve_fixed_point(&g, &half, &budget),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
