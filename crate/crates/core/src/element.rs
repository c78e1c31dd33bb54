//! Group elements as affine pairs (A, t): x |-> Ax + t in the coordinates of
//! the simple normals. Linear groups keep t = 0. Words, when present, list
//! generator indices whose left-to-right product reproduces the element.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::Backend;
use crate::space::BilinearSpace;

#[derive(Clone, Debug)]
pub struct GroupElement {
    pub linear: Matrix,
    pub translation: Vector,
    pub word: Option<Vec<u16>>,
}

impl GroupElement {
    pub fn identity(backend: Backend, dim: usize) -> GroupElement {
        GroupElement {
            linear: Matrix::identity(backend, dim),
            translation: Vector::zeros(backend, dim),
            word: Some(Vec::new()),
        }
    }

    pub fn from_linear(linear: Matrix) -> GroupElement {
        let t = Vector::zeros(linear.backend, linear.nrows());
        GroupElement { linear, translation: t, word: None }
    }

    pub fn from_affine(linear: Matrix, translation: Vector) -> GroupElement {
        assert_eq!(linear.nrows(), translation.dim());
        GroupElement { linear, translation, word: None }
    }

    pub fn with_word(mut self, word: Vec<u16>) -> GroupElement {
        self.word = Some(word);
        self
    }

    pub fn dim(&self) -> usize {
        self.linear.nrows()
    }

    pub fn backend(&self) -> Backend {
        self.linear.backend
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        self.linear.mul_vec(x).add(&self.translation)
    }

    pub fn apply_linear(&self, x: &Vector) -> Vector {
        self.linear.mul_vec(x)
    }

    /// Composition self followed-by-applying other first:
    /// (A1,t1)(A2,t2) = (A1 A2, A1 t2 + t1).
    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        let linear = self.linear.mul_mat(&other.linear);
        let translation = self.linear.mul_vec(&other.translation).add(&self.translation);
        let word = match (&self.word, &other.word) {
            (Some(a), Some(b)) => {
                let mut w = a.clone();
                w.extend_from_slice(b);
                Some(w)
            }
            _ => None,
        };
        GroupElement { linear, translation, word }
    }

    pub fn inverse(&self) -> GroupElement {
        let inv = crate::linalg::inverse(&self.linear).expect("group element is invertible");
        let translation = inv.mul_vec(&self.translation).neg();
        // Valid whenever the word consists of involutions, which is the only
        // way words are produced here.
        let word = self.word.as_ref().map(|w| w.iter().rev().copied().collect());
        GroupElement { linear: inv, translation, word }
    }

    pub fn is_identity(&self) -> bool {
        self.translation.is_zero()
            && self.linear.linf_distance(&Matrix::identity(self.backend(), self.dim())).is_zero()
    }

    pub fn is_translation(&self) -> bool {
        self.linear.linf_distance(&Matrix::identity(self.backend(), self.dim())).is_zero()
    }

    /// Same map within backend tolerance (exact equality on the exact
    /// backend; on floats, entrywise within 10 eps as befits values that
    /// have been through a few arithmetic steps).
    pub fn same_isometry(&self, other: &GroupElement) -> bool {
        if self.backend().is_exact() {
            return self.linear.linf_distance(&other.linear).is_zero()
                && self.translation.linf_distance(&other.translation).is_zero();
        }
        let tol = 10.0 * self.backend().eps();
        self.linear.linf_distance(&other.linear).to_f64().abs() <= tol
            && self.translation.linf_distance(&other.translation).to_f64().abs() <= tol
    }
}

/// The reflection x |-> x - 2 B(x,u)/B(u,u) u. An involution preserving B;
/// not necessarily a member of any particular group.
pub fn reflection_in_vector(space: &BilinearSpace, u: &Vector) -> Result<GroupElement> {
    let q = space.norm(u);
    if q.is_zero() {
        return Err(Error::LightlikeVector(format!(
            "cannot reflect in a vector with [u,u] = 0 (u = {u:?})"
        )));
    }
    let backend = space.backend;
    let d = space.dim();
    let gu = space.gram().mul_vec(u);
    let factor = backend.from_i64(2).div(&q);
    let mut m = Matrix::identity(backend, d);
    for i in 0..d {
        for j in 0..d {
            let v = m.get(i, j).sub(&factor.mul(&u.entries[i]).mul(&gu.entries[j]));
            m.set(i, j, v);
        }
    }
    Ok(GroupElement::from_linear(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SpaceKind;

    fn a2_space() -> BilinearSpace {
        let gram = Matrix::from_i64_rows(Backend::Exact, &[&[2, -1], &[-1, 2]]);
        BilinearSpace::new(gram, SpaceKind::PositiveDefinite).unwrap()
    }

    #[test]
    fn simple_reflection_matrix() {
        let space = a2_space();
        let e1 = Vector::unit(Backend::Exact, 2, 0);
        let s1 = reflection_in_vector(&space, &e1).unwrap();
        let expected = Matrix::from_i64_rows(Backend::Exact, &[&[-1, 1], &[0, 1]]);
        assert!(s1.linear.linf_distance(&expected).is_zero());
        assert!(s1.mul(&s1).is_identity());
        assert!(space.preserves_form(&s1.linear));
    }

    #[test]
    fn lightlike_reflection_rejected() {
        let gram = Matrix::from_i64_rows(Backend::Exact, &[&[1, 0], &[0, -1]]);
        let space = BilinearSpace::new(gram, SpaceKind::Lorentzian).unwrap();
        let null = Vector::from_i64(Backend::Exact, &[1, 1]);
        assert!(matches!(
            reflection_in_vector(&space, &null),
            Err(Error::LightlikeVector(_))
        ));
    }

    #[test]
    fn affine_composition_order_matters() {
        let b = Backend::Exact;
        let flip = Matrix::from_i64_rows(b, &[&[-1]]);
        let a = GroupElement::from_linear(flip);
        let t = GroupElement::from_affine(
            Matrix::identity(b, 1),
            Vector::from_i64(b, &[2]),
        );
        let ta = t.mul(&a); // x -> -x + 2
        let at = a.mul(&t); // x -> -(x + 2)
        let x = Vector::from_i64(b, &[1]);
        assert_eq!(ta.apply(&x), Vector::from_i64(b, &[1]));
        assert_eq!(at.apply(&x), Vector::from_i64(b, &[-3]));
        assert!(ta.mul(&ta.inverse()).is_identity());
    }

    #[test]
    fn inverse_reverses_word() {
        let space = a2_space();
        let s1 = reflection_in_vector(&space, &Vector::unit(Backend::Exact, 2, 0))
            .unwrap()
            .with_word(vec![0]);
        let s2 = reflection_in_vector(&space, &Vector::unit(Backend::Exact, 2, 1))
            .unwrap()
            .with_word(vec![1]);
        let w = s1.mul(&s2);
        assert_eq!(w.word.as_deref(), Some(&[0u16, 1][..]));
        let inv = w.inverse();
        assert_eq!(inv.word.as_deref(), Some(&[1u16, 0][..]));
        assert!(w.mul(&inv).is_identity());
    }
}
