//! Element enumeration and word normal forms.
//!
//! The canonical word of an element is computed geometrically: push the
//! image of a fixed interior base point back into the fundamental domain,
//! always folding through the lowest-indexed violated wall. The sequence of
//! walls crossed, in discovery order, is the ShortLex-least reduced word.
//! This underlies three independent consumers: word normal forms for
//! reporting, float-safe deduplication keys for breadth-first enumeration,
//! and length computations for the structure checks.

use std::collections::HashSet;

use num::BigRational;

use crate::element::GroupElement;
use crate::error::{Error, Result};
use crate::group::{Geometry, ReflectionGroup};
use crate::linalg::{rank, solve_affine_system, Matrix, Vector};
use crate::polyhedron::AffineSubspace;
use crate::scalar::ScalarValue;

const WALK_STEP_CAP: usize = 100_000;
const BOUNDED_ENUM_CAP: usize = 1_000_000;

/// Slack of every wall of the fundamental domain at y: (Gy)_i for the linear
/// walls, plus 1 - B(theta, y) for the affine wall when there is one. All
/// slacks are non-negative exactly on the closed domain.
pub(crate) fn wall_slacks(group: &ReflectionGroup, y: &Vector) -> Vec<ScalarValue> {
    let mut slacks = group.space.wall_values(y).entries;
    if let Some(aff) = &group.affine {
        slacks.push(group.backend().one().sub(&group.space.form(&aff.highest_root, y)));
    }
    slacks
}

/// The folding walk: the word w such that g = s_{w_1} ... s_{w_k}, read off
/// from the walls crossed while folding g(base) back into the fundamental
/// domain. Termination is guaranteed for isometries of the group; the cap
/// only guards against maps that are not.
pub(crate) fn gallery_word(group: &ReflectionGroup, g: &GroupElement) -> Result<Vec<u16>> {
    let gens = group.generator_elements();
    let mut y = g.apply(&group.base_point());
    let mut word = Vec::new();
    for _ in 0..WALK_STEP_CAP {
        let mut crossed = None;
        for (i, s) in wall_slacks(group, &y).iter().enumerate() {
            if s.is_negative() {
                crossed = Some(i);
                break;
            }
        }
        match crossed {
            Some(i) => {
                y = gens[i].apply(&y);
                word.push(i as u16);
            }
            None => return Ok(word),
        }
    }
    Err(Error::NotInGroup(
        "folding walk did not terminate; the map does not move the base point \
         within the tiling"
            .into(),
    ))
}

/// ShortLex-least reduced word for g, verified by remultiplication. Fails
/// with NotInGroup when g does not belong to the group (wrong pairing, or a
/// translation outside the coroot lattice).
pub fn canonical_word(group: &ReflectionGroup, g: &GroupElement) -> Result<Vec<u16>> {
    if !group.space.preserves_form(&g.linear) {
        return Err(Error::NotInGroup(
            "linear part does not preserve the pairing".into(),
        ));
    }
    let word = gallery_word(group, g)?;
    let rebuilt = element_from_word(group, &word)?;
    if rebuilt.same_isometry(g) {
        Ok(word)
    } else {
        Err(Error::NotInGroup(
            "the map folds onto a different element; it is not in the group".into(),
        ))
    }
}

pub fn element_from_word(group: &ReflectionGroup, word: &[u16]) -> Result<GroupElement> {
    let gens = group.generator_elements();
    let mut g = GroupElement::identity(group.backend(), group.dim()).with_word(Vec::new());
    for &i in word {
        let gen = gens.get(i as usize).ok_or_else(|| {
            Error::InvalidSpec(format!(
                "word letter {i} out of range for {} generators",
                gens.len()
            ))
        })?;
        g = g.mul(gen);
    }
    Ok(g)
}

pub fn element_length(group: &ReflectionGroup, g: &GroupElement) -> Result<usize> {
    Ok(canonical_word(group, g)?.len())
}

/// Deduplication key: exact matrices hash by their rational entries; float
/// elements by their canonical word, which is discrete and immune to dust.
#[derive(Hash, PartialEq, Eq)]
enum ElementKey {
    Exact(Vec<BigRational>),
    Word(Vec<u16>),
}

fn element_key(group: &ReflectionGroup, e: &GroupElement) -> Result<ElementKey> {
    if group.backend().is_exact() {
        let mut parts: Vec<BigRational> = Vec::with_capacity(e.dim() * (e.dim() + 1));
        for i in 0..e.dim() {
            for j in 0..e.dim() {
                parts.push(e.linear.get(i, j).as_exact().unwrap().clone());
            }
        }
        for t in &e.translation.entries {
            parts.push(t.as_exact().unwrap().clone());
        }
        Ok(ElementKey::Exact(parts))
    } else {
        Ok(ElementKey::Word(gallery_word(group, e)?))
    }
}

/// Breadth-first closure over the given generators. Parents are expanded in
/// discovery order and generators in ascending index, so the stored word of
/// each element is its ShortLex-least reduced word and the table is sorted
/// by (length, word).
fn bfs_elements(
    group: &ReflectionGroup,
    gens: &[GroupElement],
    max_layers: Option<usize>,
    cap: usize,
) -> Result<Vec<GroupElement>> {
    let id = GroupElement::identity(group.backend(), group.dim()).with_word(Vec::new());
    let mut seen: HashSet<ElementKey> = HashSet::new();
    seen.insert(element_key(group, &id)?);
    let mut out = vec![id];
    let mut frontier: Vec<usize> = vec![0];
    let mut layer = 0usize;
    while !frontier.is_empty() && max_layers.map_or(true, |m| layer < m) {
        let mut next = Vec::new();
        for &idx in &frontier {
            let base = out[idx].clone();
            for gen in gens {
                let cand = base.mul(gen);
                if seen.insert(element_key(group, &cand)?) {
                    if out.len() >= cap {
                        return Err(Error::BudgetExhausted(format!(
                            "enumeration exceeded {cap} elements"
                        )));
                    }
                    next.push(out.len());
                    out.push(cand);
                }
            }
        }
        frontier = next;
        layer += 1;
    }
    Ok(out)
}

/// Full table of the finite group generated by the linear reflections.
pub(crate) fn finite_closure(group: &ReflectionGroup, cap: usize) -> Result<Vec<GroupElement>> {
    let gens: Vec<GroupElement> = group
        .generators
        .iter()
        .enumerate()
        .map(|(i, m)| GroupElement::from_linear(m.clone()).with_word(vec![i as u16]))
        .collect();
    bfs_elements(group, &gens, None, cap).map_err(|e| match e {
        Error::BudgetExhausted(_) => Error::InvalidSpec(format!(
            "the linear group did not close within {cap} elements; the pairing \
             generates a non-discrete group"
        )),
        other => other,
    })
}

/// Every element of length at most max_len, in ShortLex order. Spherical
/// groups filter their full table; infinite groups grow a fresh ball.
pub fn enumerate_to(group: &ReflectionGroup, max_len: usize) -> Result<Vec<GroupElement>> {
    match group.geometry {
        Geometry::Spherical => Ok(group
            .elements()?
            .iter()
            .filter(|e| e.word.as_ref().map_or(false, |w| w.len() <= max_len))
            .cloned()
            .collect()),
        _ => bfs_elements(group, &group.generator_elements(), Some(max_len), BOUNDED_ENUM_CAP),
    }
}

pub fn rank_one_minus(e: &GroupElement) -> usize {
    let id = Matrix::identity(e.backend(), e.dim());
    rank(&id.sub(&e.linear))
}

/// Regular elements: 1 - w invertible on the effective (non-fixed) part of
/// the space. Only these own a full-dimensional tile.
pub fn is_regular(group: &ReflectionGroup, e: &GroupElement) -> bool {
    rank_one_minus(e) == group.dim() - group.invariant_dim
}

/// Generators fixing the given point of the closed fundamental domain;
/// errors if the point is outside.
pub fn stabilizer_generators(
    group: &ReflectionGroup,
    x: &Vector,
) -> Result<Vec<GroupElement>> {
    let slacks = wall_slacks(group, x);
    if slacks.iter().any(|s| s.is_negative()) {
        return Err(Error::PreconditionViolated(
            "point lies outside the closed fundamental domain".into(),
        ));
    }
    let gens = group.generator_elements();
    Ok(slacks
        .iter()
        .zip(gens)
        .filter(|(s, _)| s.is_zero())
        .map(|(_, g)| g)
        .collect())
}

/// Fixed-point set of an affine map as an affine subspace; None when the
/// map has no fixed points (a nontrivial glide or translation).
pub fn fixed_subspace(e: &GroupElement) -> Option<AffineSubspace> {
    let id = Matrix::identity(e.backend(), e.dim());
    let sol = solve_affine_system(&id.sub(&e.linear), &e.translation);
    sol.particular.map(|p| AffineSubspace { particular: p, basis: sol.kernel_basis })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, GroupSpec};
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

    #[test]
    fn canonical_word_of_longest_element() {
        let g = a2();
        let w0 = element_from_word(&g, &[0, 1, 0]).unwrap();
        // s1 s2 s1 = s2 s1 s2; the walk must return the ShortLex-least form.
        let alt = element_from_word(&g, &[1, 0, 1]).unwrap();
        assert!(w0.same_isometry(&alt));
        assert_eq!(canonical_word(&g, &alt).unwrap(), vec![0, 1, 0]);
        assert_eq!(element_length(&g, &w0).unwrap(), 3);
    }

    #[test]
    fn words_in_the_table_are_shortlex_sorted() {
        let g = a2();
        let words: Vec<Vec<u16>> = g
            .elements()
            .unwrap()
            .iter()
            .map(|e| e.word.clone().unwrap())
            .collect();
        assert_eq!(
            words,
            vec![vec![], vec![0], vec![1], vec![0, 1], vec![1, 0], vec![0, 1, 0]]
        );
    }

    #[test]
    fn non_member_is_rejected() {
        let g = a2();
        // A translation is an isometry of the form but not a group element.
        let shift = GroupElement::from_affine(
            Matrix::identity(Backend::Exact, 2),
            Vector::from_i64(Backend::Exact, &[1, 0]),
        );
        assert!(matches!(canonical_word(&g, &shift), Err(Error::NotInGroup(_))));
        // A non-orthogonal matrix is rejected before any walking.
        let stretch =
            GroupElement::from_linear(Matrix::from_i64_rows(Backend::Exact, &[&[2, 0], &[0, 1]]));
        assert!(matches!(canonical_word(&g, &stretch), Err(Error::NotInGroup(_))));
    }

    #[test]
    fn affine_ball_and_translation_word() {
        let g = build_group(&GroupSpec::gram(
            "a1-affine",
            Geometry::Affine,
            Matrix::from_i64_rows(Backend::Exact, &[&[1]]),
        ))
        .unwrap();
        let ball = enumerate_to(&g, 3).unwrap();
        // Words over {s1, s0} with no repeats: 1, s1, s0, s1s0, s0s1, s1s0s1, s0s1s0.
        assert_eq!(ball.len(), 7);
        // x -> x - 2 is s1 s0 (first fold through 0, then through 1).
        let b = Backend::Exact;
        let shift = GroupElement::from_affine(
            Matrix::identity(b, 1),
            Vector::from_i64(b, &[-2]),
        );
        assert_eq!(canonical_word(&g, &shift).unwrap(), vec![0, 1]);
        // x -> x + 1 is not in the group: translations live on 2Z.
        let half = GroupElement::from_affine(
            Matrix::identity(b, 1),
            Vector::from_i64(b, &[1]),
        );
        assert!(matches!(canonical_word(&g, &half), Err(Error::NotInGroup(_))));
    }

    #[test]
    fn hyperbolic_ball_grows() {
        let g = build_group(&GroupSpec::coxeter(
            "t237",
            Geometry::Hyperbolic,
            &[&[1, 2, 3], &[2, 1, 7], &[3, 7, 1]],
            Backend::approx_default(),
        ))
        .unwrap();
        let b3 = enumerate_to(&g, 3).unwrap();
        let b4 = enumerate_to(&g, 4).unwrap();
        assert!(b3.len() > 3 && b4.len() > b3.len());
        // Deduplication by canonical word: braid pair s1 s2 of order 2 collapses.
        let dup = element_from_word(&g, &[0, 1, 0, 1]).unwrap();
        assert_eq!(canonical_word(&g, &dup).unwrap(), Vec::<u16>::new());
    }

    #[test]
    fn regularity_and_fixed_sets() {
        let g = a2();
        let rot = element_from_word(&g, &[0, 1]).unwrap();
        let refl = element_from_word(&g, &[0]).unwrap();
        assert!(is_regular(&g, &rot));
        assert!(!is_regular(&g, &refl));
        assert_eq!(rank_one_minus(&refl), 1);
        let fixed = fixed_subspace(&refl).unwrap();
        assert_eq!(fixed.coset_dim(), 1);
        // The rotation fixes only the origin.
        assert_eq!(fixed_subspace(&rot).unwrap().coset_dim(), 0);
    }

    #[test]
    fn stabilizers_on_walls() {
        let g = a2();
        let interior = g.chamber_point();
        assert!(stabilizer_generators(&g, &interior).unwrap().is_empty());
        let on_wall = g.coweights[1].clone(); // B(e_1, pi_2) = 0
        let stab = stabilizer_generators(&g, &on_wall).unwrap();
        assert_eq!(stab.len(), 1);
        assert_eq!(stab[0].word, Some(vec![0]));
        let outside = interior.neg();
        assert!(stabilizer_generators(&g, &outside).is_err());
    }
}
