//! A finite-dimensional real vector space equipped with a symmetric bilinear
//! form, given by its Gram matrix in the working basis. Coordinates
//! throughout the crate are taken in the basis of simple normals, so the
//! Gram matrix is exactly the pairing table of those normals.

use crate::error::{Error, Result};
use crate::linalg::{congruence_diagonalize, inertia, Matrix, Vector};
use crate::scalar::{Backend, ScalarValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// Positive definite: spherical geometry (and the linear part of the
    /// Euclidean/affine case).
    PositiveDefinite,
    /// Signature (dim-1, 1): Lorentzian, for hyperbolic geometry.
    Lorentzian,
}

#[derive(Clone, Debug)]
pub struct BilinearSpace {
    pub backend: Backend,
    pub kind: SpaceKind,
    gram: Matrix,
}

impl BilinearSpace {
    /// Validates the signature against `kind` via Sylvester inertia.
    pub fn new(gram: Matrix, kind: SpaceKind) -> Result<BilinearSpace> {
        if gram.nrows() != gram.ncols() {
            return Err(Error::InvalidSpec("Gram matrix must be square".into()));
        }
        if !gram.is_symmetric() {
            return Err(Error::InvalidSpec("Gram matrix must be symmetric".into()));
        }
        let n = gram.nrows();
        let (pos, neg, zero) = inertia(&gram);
        let ok = match kind {
            SpaceKind::PositiveDefinite => pos == n,
            SpaceKind::Lorentzian => neg == 1 && pos == n - 1,
        };
        if !ok {
            return Err(Error::SignatureMismatch(format!(
                "inertia (+{pos}, -{neg}, 0:{zero}) incompatible with {kind:?}"
            )));
        }
        Ok(BilinearSpace { backend: gram.backend, kind, gram })
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    /// B(x, y).
    pub fn form(&self, x: &Vector, y: &Vector) -> ScalarValue {
        assert_eq!(x.dim(), self.dim());
        assert_eq!(y.dim(), self.dim());
        x.dot(&self.gram.mul_vec(y))
    }

    /// B(x, x).
    pub fn norm(&self, x: &Vector) -> ScalarValue {
        self.form(x, x)
    }

    /// The vector of pairings (B(e_1, x), ..., B(e_d, x)) against the basis
    /// of simple normals, i.e. `G x`. Row i is the wall functional of the
    /// i-th simple reflection, so this is the chamber-membership profile.
    pub fn wall_values(&self, x: &Vector) -> Vector {
        self.gram.mul_vec(x)
    }

    /// True when `m` preserves the form: m^T G m = G, entrywise within 10x
    /// the backend tolerance on the float backend, exactly otherwise.
    pub fn preserves_form(&self, m: &Matrix) -> bool {
        let mtm = m.transpose().mul_mat(&self.gram).mul_mat(m);
        let diff = mtm.linf_distance(&self.gram);
        match self.backend {
            Backend::Exact => diff.is_zero(),
            Backend::Approx { eps } => diff.to_f64() <= 10.0 * eps,
        }
    }

    /// If m is a scaled isometry (m^T G m = c G for a scalar c > 0), the
    /// factor c (the square of the Lipschitz constant); None otherwise.
    pub fn scaled_isometry_factor(&self, m: &Matrix) -> Option<ScalarValue> {
        let mtm = m.transpose().mul_mat(&self.gram).mul_mat(m);
        let i = (0..self.dim()).find(|&i| !self.gram.get(i, i).is_zero())?;
        let c = mtm.get(i, i).div(self.gram.get(i, i));
        if !c.is_positive() {
            return None;
        }
        let diff = mtm.linf_distance(&self.gram.scale(&c));
        let ok = match self.backend {
            Backend::Exact => diff.is_zero(),
            Backend::Approx { eps } => diff.to_f64() <= 10.0 * eps,
        };
        ok.then_some(c)
    }

    /// A vector of strictly negative norm, read off the congruence basis.
    /// `None` when the form has no negative directions.
    pub fn timelike_vector(&self) -> Option<Vector> {
        let (diag, p) = congruence_diagonalize(&self.gram);
        diag.iter().position(|d| d.is_negative()).map(|i| p.col(i))
    }
}
