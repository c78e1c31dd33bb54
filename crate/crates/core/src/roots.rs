//! Root bookkeeping: orbit saturation of the simple normals and recovery of
//! a root from a reflection matrix.

use std::collections::VecDeque;

use num::BigRational;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::Sign;
use crate::space::BilinearSpace;

/// Orbit of the simple normals under the generators, one representative per
/// +/- pair (the one with non-negative coordinates). Every vector in the
/// orbit of a root system is a signed combination of simple normals with
/// uniform sign; a mixed-sign image means the input was not a root system
/// (or float error has grown past the tolerance), and is reported as such.
pub fn saturate_positive_roots(
    space: &BilinearSpace,
    generators: &[Matrix],
    cap: usize,
) -> Result<Vec<Vector>> {
    let backend = space.backend;
    let d = space.dim();
    let mut found: Vec<Vector> = Vec::new();
    let mut exact_keys: std::collections::HashSet<Vec<BigRational>> =
        std::collections::HashSet::new();
    let mut queue: VecDeque<Vector> = VecDeque::new();

    let push = |v: Vector,
                    found: &mut Vec<Vector>,
                    queue: &mut VecDeque<Vector>,
                    keys: &mut std::collections::HashSet<Vec<BigRational>>|
     -> Result<()> {
        let pos = positive_representative(&v)?;
        let fresh = if backend.is_exact() {
            keys.insert(pos.entries.iter().map(|e| e.as_exact().unwrap().clone()).collect())
        } else {
            !found.iter().any(|r| r.linf_distance(&pos).is_zero())
        };
        if fresh {
            found.push(pos.clone());
            queue.push_back(pos);
        }
        Ok(())
    };

    for i in 0..d {
        push(Vector::unit(backend, d, i), &mut found, &mut queue, &mut exact_keys)?;
    }
    while let Some(r) = queue.pop_front() {
        if found.len() > cap {
            return Err(Error::InvalidSpec(format!(
                "root orbit did not close within {cap} vectors; the pairing does not \
                 describe a finite root system"
            )));
        }
        for g in generators {
            push(g.mul_vec(&r), &mut found, &mut queue, &mut exact_keys)?;
        }
    }
    Ok(found)
}

fn positive_representative(v: &Vector) -> Result<Vector> {
    let mut saw_pos = false;
    let mut saw_neg = false;
    for e in &v.entries {
        match e.sign() {
            Sign::Positive => saw_pos = true,
            Sign::Negative => saw_neg = true,
            Sign::Zero => {}
        }
    }
    if saw_pos && saw_neg {
        return Err(Error::InvalidSpec(
            "orbit of the simple normals produced a mixed-sign vector; not a root system"
                .into(),
        ));
    }
    Ok(if saw_neg { v.neg() } else { v.clone() })
}

/// True when the linear map is a reflection of the space: it preserves the
/// form and fixes a hyperplane (rank(1 - M) = 1).
pub fn is_reflection(space: &BilinearSpace, m: &Matrix) -> bool {
    space.preserves_form(m) && rank_one_defect(m) == 1
}

fn rank_one_defect(m: &Matrix) -> usize {
    let id = Matrix::identity(m.backend, m.nrows());
    crate::linalg::rank(&id.sub(m))
}

/// A vector spanning the (-1)-eigenline of a reflection matrix: the root up
/// to scale. Returns None if the map is not a reflection or its root is
/// lightlike.
pub fn root_of_reflection(space: &BilinearSpace, m: &Matrix) -> Option<Vector> {
    let backend = m.backend;
    let id = Matrix::identity(backend, m.nrows());
    let defect = id.sub(m);
    // im(1 - s_u) is spanned by u; take any nonzero column.
    let col = (0..m.ncols()).map(|j| defect.col(j)).find(|c| !c.is_zero())?;
    let minus_one = backend.from_i64(-1);
    let reflected = m.mul_vec(&col);
    if reflected.linf_distance(&col.scale(&minus_one)).is_zero() && !space.norm(&col).is_zero() {
        Some(col)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::reflection_in_vector;
    use crate::scalar::Backend;
    use crate::space::SpaceKind;

    fn a2_space() -> BilinearSpace {
        BilinearSpace::new(
            Matrix::from_i64_rows(Backend::Exact, &[&[2, -1], &[-1, 2]]),
            SpaceKind::PositiveDefinite,
        )
        .unwrap()
    }

    fn simple_reflections(space: &BilinearSpace) -> Vec<Matrix> {
        (0..space.dim())
            .map(|i| {
                reflection_in_vector(space, &Vector::unit(space.backend, space.dim(), i))
                    .unwrap()
                    .linear
            })
            .collect()
    }

    #[test]
    fn a2_positive_roots() {
        let space = a2_space();
        let gens = simple_reflections(&space);
        let roots = saturate_positive_roots(&space, &gens, 100).unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots.contains(&Vector::from_i64(Backend::Exact, &[1, 1])));
    }

    #[test]
    fn b2_and_g2_root_counts() {
        for (rows, expect) in [
            (vec![vec![4i64, -2], vec![-2, 2]], 4usize),
            (vec![vec![6, -3], vec![-3, 2]], 6),
        ] {
            let rows_ref: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            let space = BilinearSpace::new(
                Matrix::from_i64_rows(Backend::Exact, &rows_ref),
                SpaceKind::PositiveDefinite,
            )
            .unwrap();
            let gens = simple_reflections(&space);
            assert_eq!(saturate_positive_roots(&space, &gens, 100).unwrap().len(), expect);
        }
    }

    #[test]
    fn recovering_the_root_of_a_reflection() {
        let space = a2_space();
        let u = Vector::from_i64(Backend::Exact, &[1, 1]);
        let s = reflection_in_vector(&space, &u).unwrap().linear;
        assert!(is_reflection(&space, &s));
        let r = root_of_reflection(&space, &s).unwrap();
        // Proportional to (1, 1).
        assert!(r.get(0).sub(r.get(1)).is_zero());
        // A rotation is not a reflection.
        let gens = simple_reflections(&space);
        let rot = gens[0].mul_mat(&gens[1]);
        assert!(!is_reflection(&space, &rot));
        assert!(root_of_reflection(&space, &rot).is_none());
    }
}
