//! Reflection-group construction from declarative specs.
//!
//! A group lives in the coordinate system of its simple normals: the
//! bilinear form is the Gram matrix of those normals, the fundamental
//! chamber is `{x : Gx >= 0}`, and generator matrices are exact whenever the
//! Gram matrix is rational. Three spec sources are accepted:
//!
//! * `Cartan`: an integer (generalized) Cartan matrix, symmetrized by the
//!   minimal positive integer weights — the crystallographic route, exact.
//! * `Coxeter`: a matrix of braid orders m_ij (0 = infinity); the Gram
//!   entries are -cos(pi/m_ij), which is rational only for m in {2, 3} and
//!   infinity, so other orders require the float backend.
//! * `Gram`: the pairing table itself.
//!
//! Affine groups are specified by the finite linear part (which must be
//! positive definite and irreducible); the affine wall, alcove, and coroot
//! translation lattice are derived here.

use std::collections::VecDeque;
use std::sync::OnceLock;

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::element::{reflection_in_vector, GroupElement};
use crate::enumerate;
use crate::error::{Error, Result};
use crate::linalg::{inverse, rank_and_kernel, Matrix, Vector};
use crate::roots;
use crate::scalar::{Backend, ScalarValue, Sign};
use crate::space::{BilinearSpace, SpaceKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    Spherical,
    Affine,
    Hyperbolic,
}

#[derive(Clone, Debug)]
pub enum GroupSource {
    /// Integer Cartan matrix (2 on the diagonal, non-positive integers off
    /// it, symmetrizable).
    Cartan(Vec<Vec<i64>>),
    /// Coxeter braid-order matrix (1 on the diagonal, orders >= 2 off it,
    /// 0 standing for an infinite order).
    Coxeter(Vec<Vec<u32>>),
    /// The Gram matrix of the simple normals, verbatim.
    Gram(Matrix),
}

#[derive(Clone, Debug)]
pub struct GroupSpec {
    pub name: String,
    pub geometry: Geometry,
    pub source: GroupSource,
    pub backend: Backend,
}

impl GroupSpec {
    pub fn cartan(name: &str, geometry: Geometry, rows: &[&[i64]], backend: Backend) -> GroupSpec {
        GroupSpec {
            name: name.to_string(),
            geometry,
            source: GroupSource::Cartan(rows.iter().map(|r| r.to_vec()).collect()),
            backend,
        }
    }

    pub fn coxeter(name: &str, geometry: Geometry, rows: &[&[u32]], backend: Backend) -> GroupSpec {
        GroupSpec {
            name: name.to_string(),
            geometry,
            source: GroupSource::Coxeter(rows.iter().map(|r| r.to_vec()).collect()),
            backend,
        }
    }

    pub fn gram(name: &str, geometry: Geometry, gram: Matrix) -> GroupSpec {
        GroupSpec {
            name: name.to_string(),
            geometry,
            backend: gram.backend,
            source: GroupSource::Gram(gram),
        }
    }
}

/// Derived data of an affine group beyond its finite linear part.
#[derive(Clone, Debug)]
pub struct AffineData {
    /// Simple coroots 2 e_i / B(e_i, e_i): a basis of the translation
    /// lattice.
    pub coroots: Vec<Vector>,
    /// Highest root theta of the (irreducible) finite part.
    pub highest_root: Vector,
    /// The affine generator: reflection in the wall B(theta, x) = 1.
    pub affine_reflection: GroupElement,
    /// Alcove vertices: the origin and coweight_i / theta_i.
    pub alcove_vertices: Vec<Vector>,
    /// Barycenter of the alcove — the canonical interior point.
    pub alcove_center: Vector,
}

#[derive(Debug)]
pub struct ReflectionGroup {
    pub name: String,
    pub geometry: Geometry,
    pub space: BilinearSpace,
    /// Linear parts of the simple reflections s_1 .. s_d.
    pub generators: Vec<Matrix>,
    /// Fundamental coweights: B(coweight_i, e_j) = delta_ij; the extreme
    /// rays of the fundamental chamber.
    pub coweights: Vec<Vector>,
    /// dim of the subspace fixed by the whole group (kernel of the Gram
    /// matrix; zero for all nondegenerate forms).
    pub invariant_dim: usize,
    pub warnings: Vec<String>,
    pub affine: Option<AffineData>,
    /// Hyperbolic only: a timelike vector on the chamber side, fixing the
    /// orientation of the two light-cone components.
    pub time_orientation: Option<Vector>,
    /// Cached full enumeration of the finite linear group (the whole group
    /// when spherical, the finite part W_0 when affine).
    table: OnceLock<Vec<GroupElement>>,
}

impl ReflectionGroup {
    pub fn backend(&self) -> Backend {
        self.space.backend
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Number of generators as seen by word indices: d for linear
    /// geometries, d+1 for affine (index d is the affine reflection).
    pub fn num_generators(&self) -> usize {
        self.generators.len() + usize::from(self.geometry == Geometry::Affine)
    }

    /// The cached table of the finite linear group, in breadth-first
    /// ShortLex order starting with the identity.
    pub fn elements(&self) -> Result<&[GroupElement]> {
        self.table.get().map(|v| v.as_slice()).ok_or_else(|| {
            Error::PreconditionViolated(format!(
                "group '{}' is not finite; use bounded enumeration",
                self.name
            ))
        })
    }

    pub fn order(&self) -> Option<usize> {
        match self.geometry {
            Geometry::Spherical => self.table.get().map(|t| t.len()),
            _ => None,
        }
    }

    /// Generators as group elements carrying their one-letter words; affine
    /// geometry appends the affine reflection at index d.
    pub fn generator_elements(&self) -> Vec<GroupElement> {
        let mut gens: Vec<GroupElement> = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, m)| GroupElement::from_linear(m.clone()).with_word(vec![i as u16]))
            .collect();
        if let Some(aff) = &self.affine {
            gens.push(aff.affine_reflection.clone().with_word(vec![self.generators.len() as u16]));
        }
        gens
    }

    /// Canonical interior point of the fundamental chamber (sum of the
    /// coweights).
    pub fn chamber_point(&self) -> Vector {
        let mut x = Vector::zeros(self.backend(), self.dim());
        for c in &self.coweights {
            x = x.add(c);
        }
        x
    }

    /// Interior point of the walking domain: the alcove barycenter for
    /// affine groups, the chamber point otherwise.
    pub fn base_point(&self) -> Vector {
        match &self.affine {
            Some(aff) => aff.alcove_center.clone(),
            None => self.chamber_point(),
        }
    }
}

const FINITE_CLOSURE_CAP: usize = 200_000;
const ROOT_SATURATION_CAP: usize = 10_000;

pub fn build_group(spec: &GroupSpec) -> Result<ReflectionGroup> {
    let backend = spec.backend;
    let (gram, braid_orders) = match &spec.source {
        GroupSource::Cartan(rows) => (gram_from_cartan(rows, backend)?, cartan_orders(rows)),
        GroupSource::Coxeter(rows) => {
            validate_coxeter(rows)?;
            (gram_from_coxeter(rows, backend)?, Some(rows.clone()))
        }
        GroupSource::Gram(m) => {
            if m.backend != backend {
                return Err(Error::InvalidSpec(
                    "gram matrix backend disagrees with the spec backend".into(),
                ));
            }
            (m.clone(), None)
        }
    };
    let d = gram.nrows();
    if d == 0 {
        return Err(Error::InvalidSpec("empty generator set".into()));
    }
    let kind = match spec.geometry {
        Geometry::Hyperbolic => SpaceKind::Lorentzian,
        _ => SpaceKind::PositiveDefinite,
    };
    let space = BilinearSpace::new(gram, kind)?;

    let mut warnings = Vec::new();
    if spec.geometry == Geometry::Hyperbolic {
        for i in 0..d {
            if !space.gram().get(i, i).is_positive() {
                return Err(Error::SignatureMismatch(format!(
                    "simple normal {} is not spacelike ([e,e] <= 0)",
                    i + 1
                )));
            }
        }
        for i in 0..d {
            for j in (i + 1)..d {
                let gij = space.gram().get(i, j);
                let cross = gij.mul(gij);
                let diag = space.gram().get(i, i).mul(space.gram().get(j, j));
                if gij.is_negative() && !cross.lt(&diag) {
                    warnings.push(format!(
                        "walls {} and {} diverge ([e_i,e_j]^2 >= [e_i,e_i][e_j,e_j]): the \
                         group is not cocompact, and the tiling statements are not \
                         guaranteed to hold",
                        i + 1,
                        j + 1
                    ));
                }
            }
        }
    }

    let generators: Vec<Matrix> = (0..d)
        .map(|i| {
            reflection_in_vector(&space, &Vector::unit(backend, d, i)).map(|e| e.linear)
        })
        .collect::<Result<_>>()?;

    if let Some(orders) = &braid_orders {
        verify_braid_orders(&generators, orders, backend, d)?;
    }

    let gram_inv = inverse(space.gram()).ok_or_else(|| {
        Error::NonSimplicialChamber("degenerate pairing of the simple normals".into())
    })?;
    let coweights: Vec<Vector> = (0..d).map(|j| gram_inv.col(j)).collect();
    let invariant_dim = rank_and_kernel(space.gram()).kernel_basis.len();

    let affine = match spec.geometry {
        Geometry::Affine => Some(build_affine_data(&space, &generators, &coweights)?),
        _ => None,
    };

    let time_orientation = match spec.geometry {
        Geometry::Hyperbolic => {
            let mut tau = Vector::zeros(backend, d);
            for c in &coweights {
                tau = tau.add(c);
            }
            if space.norm(&tau).is_negative() {
                Some(tau)
            } else {
                // Only reachable for non-cocompact pairings: the chamber is
                // not contained in the light cone, so fall back to any
                // timelike axis, oriented toward the chamber when the form
                // can still tell.
                let t = space
                    .timelike_vector()
                    .expect("Lorentzian form has a timelike direction");
                if space.form(&t, &tau).is_positive() {
                    Some(t.neg())
                } else {
                    Some(t)
                }
            }
        }
        _ => None,
    };

    let group = ReflectionGroup {
        name: spec.name.clone(),
        geometry: spec.geometry,
        space,
        generators,
        coweights,
        invariant_dim,
        warnings,
        affine,
        time_orientation,
        table: OnceLock::new(),
    };

    if matches!(spec.geometry, Geometry::Spherical | Geometry::Affine) {
        let table = enumerate::finite_closure(&group, FINITE_CLOSURE_CAP)?;
        let _ = group.table.set(table);
    }
    Ok(group)
}

// ---------------------------------------------------------------------------
// Sources
// ---------------------------------------------------------------------------

fn big_ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn gram_from_cartan(rows: &[Vec<i64>], backend: Backend) -> Result<Matrix> {
    let d = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != d {
            return Err(Error::InvalidSpec("cartan matrix must be square".into()));
        }
        if row[i] != 2 {
            return Err(Error::InvalidSpec("cartan matrix needs 2s on the diagonal".into()));
        }
        for (j, &a) in row.iter().enumerate() {
            if j != i {
                if a > 0 {
                    return Err(Error::InvalidSpec(
                        "off-diagonal cartan entries must be non-positive".into(),
                    ));
                }
                if (a == 0) != (rows[j][i] == 0) {
                    return Err(Error::InvalidSpec(
                        "cartan zero pattern must be symmetric".into(),
                    ));
                }
            }
        }
    }
    // Symmetrizing weights: positive d_i with d_i a_ij = d_j a_ji, propagated
    // over the graph of nonzero pairs and then scaled to least positive
    // integers. Failure on a cycle means the matrix is not symmetrizable.
    let mut weights: Vec<Option<BigRational>> = vec![None; d];
    for start in 0..d {
        if weights[start].is_some() {
            continue;
        }
        weights[start] = Some(BigRational::one());
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let wi = weights[i].clone().unwrap();
            for j in 0..d {
                if j == i || rows[i][j] == 0 {
                    continue;
                }
                let cand = &wi * big_ratio(rows[i][j], rows[j][i]);
                match &weights[j] {
                    None => {
                        weights[j] = Some(cand);
                        queue.push_back(j);
                    }
                    Some(existing) => {
                        if *existing != cand {
                            return Err(Error::InvalidSpec(
                                "cartan matrix is not symmetrizable".into(),
                            ));
                        }
                    }
                }
            }
        }
    }
    let weights: Vec<BigRational> = weights.into_iter().map(Option::unwrap).collect();
    let mut den_lcm = BigInt::one();
    for w in &weights {
        den_lcm = den_lcm.lcm(w.denom());
    }
    let mut ints: Vec<BigInt> = weights.iter().map(|w| (w * &den_lcm).to_integer()).collect();
    let mut g = BigInt::zero();
    for v in &ints {
        g = g.gcd(v);
    }
    for v in ints.iter_mut() {
        *v = &*v / &g;
        debug_assert!(v.is_positive());
    }
    let mut gram = Matrix::zeros(backend, d, d);
    for i in 0..d {
        for j in 0..d {
            let entry = BigRational::from(&ints[i] * BigInt::from(rows[i][j]));
            let v = match backend {
                Backend::Exact => backend.from_big(entry),
                Backend::Approx { .. } => backend.from_f64(entry.to_f64().unwrap()),
            };
            gram.set(i, j, v);
        }
    }
    Ok(gram)
}

/// Braid orders encoded in a Cartan matrix: a_ij a_ji in {0,1,2,3} map to
/// orders {2,3,4,6}; anything larger is infinite (returned as 0).
fn cartan_orders(rows: &[Vec<i64>]) -> Option<Vec<Vec<u32>>> {
    let d = rows.len();
    let mut m = vec![vec![1u32; d]; d];
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            m[i][j] = match rows[i][j].checked_mul(rows[j][i])? {
                0 => 2,
                1 => 3,
                2 => 4,
                3 => 6,
                _ => 0,
            };
        }
    }
    Some(m)
}

fn validate_coxeter(rows: &[Vec<u32>]) -> Result<()> {
    let d = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != d {
            return Err(Error::InvalidSpec("coxeter matrix must be square".into()));
        }
        if row[i] != 1 {
            return Err(Error::InvalidSpec("coxeter matrix needs 1s on the diagonal".into()));
        }
        for (j, &m) in row.iter().enumerate() {
            if j != i {
                if m == 1 {
                    return Err(Error::InvalidSpec(
                        "off-diagonal coxeter order 1 would collapse two generators".into(),
                    ));
                }
                if rows[j][i] != m {
                    return Err(Error::InvalidSpec("coxeter matrix must be symmetric".into()));
                }
            }
        }
    }
    Ok(())
}

fn gram_from_coxeter(rows: &[Vec<u32>], backend: Backend) -> Result<Matrix> {
    let d = rows.len();
    let mut gram = Matrix::zeros(backend, d, d);
    for i in 0..d {
        for j in 0..d {
            let v = if i == j {
                backend.one()
            } else {
                match rows[i][j] {
                    0 => backend.from_i64(-1),
                    2 => backend.zero(),
                    3 => backend.from_ratio(-1, 2),
                    m => match backend {
                        Backend::Exact => {
                            return Err(Error::InvalidSpec(format!(
                                "-cos(pi/{m}) is irrational; use the float backend or give \
                                 the pairing as a cartan/gram matrix"
                            )))
                        }
                        Backend::Approx { .. } => {
                            backend.from_f64(-(std::f64::consts::PI / f64::from(m)).cos())
                        }
                    },
                }
            };
            gram.set(i, j, v);
        }
    }
    Ok(gram)
}

fn verify_braid_orders(
    generators: &[Matrix],
    orders: &[Vec<u32>],
    backend: Backend,
    d: usize,
) -> Result<()> {
    let id = Matrix::identity(backend, d);
    let matches_id = |m: &Matrix| -> bool {
        let diff = m.linf_distance(&id);
        if backend.is_exact() {
            diff.is_zero()
        } else {
            diff.to_f64() <= 10.0 * backend.eps()
        }
    };
    for i in 0..d {
        for j in (i + 1)..d {
            let m = orders[i][j];
            if m == 0 {
                continue; // declared infinite: nothing finite to verify
            }
            let step = generators[i].mul_mat(&generators[j]);
            let mut acc = step.clone();
            for k in 1..=m {
                if k < m && matches_id(&acc) {
                    return Err(Error::InvalidSpec(format!(
                        "product s_{}s_{} has order {k}, less than the declared {m}",
                        i + 1,
                        j + 1
                    )));
                }
                if k == m {
                    if !matches_id(&acc) {
                        return Err(Error::InvalidSpec(format!(
                            "product s_{}s_{} does not close at the declared order {m}",
                            i + 1,
                            j + 1
                        )));
                    }
                } else {
                    acc = acc.mul_mat(&step);
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Affine data
// ---------------------------------------------------------------------------

fn build_affine_data(
    space: &BilinearSpace,
    generators: &[Matrix],
    coweights: &[Vector],
) -> Result<AffineData> {
    let backend = space.backend;
    let d = space.dim();
    // Irreducibility of the finite part: the highest root is only unique
    // (and the alcove a simplex) for connected diagrams.
    let mut seen = vec![false; d];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for j in 0..d {
            if !seen[j] && !space.gram().get(i, j).is_zero() {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidSpec(
            "affine groups are built from an irreducible finite part; the given \
             diagram is disconnected"
                .into(),
        ));
    }

    let positive_roots = roots::saturate_positive_roots(space, generators, ROOT_SATURATION_CAP)?;
    let height = |r: &Vector| -> ScalarValue {
        let mut h = backend.zero();
        for e in &r.entries {
            h = h.add(e);
        }
        h
    };
    let mut theta: Option<(Vector, ScalarValue)> = None;
    let mut tie = false;
    for r in &positive_roots {
        let h = height(r);
        match &theta {
            None => theta = Some((r.clone(), h)),
            Some((_, best)) => match h.cmp_sign(best) {
                Sign::Positive => {
                    theta = Some((r.clone(), h));
                    tie = false;
                }
                Sign::Zero => tie = true,
                Sign::Negative => {}
            },
        }
    }
    let (theta, _) = theta.expect("irreducible system has roots");
    if tie {
        return Err(Error::InvalidSpec(
            "no unique highest root; the finite part is not irreducible".into(),
        ));
    }

    let coroots: Vec<Vector> = (0..d)
        .map(|i| {
            let scale = backend.from_i64(2).div(space.gram().get(i, i));
            Vector::unit(backend, d, i).scale(&scale)
        })
        .collect();

    let theta_covector = backend.from_i64(2).div(&space.norm(&theta));
    let s_theta = reflection_in_vector(space, &theta)?;
    let affine_reflection =
        GroupElement::from_affine(s_theta.linear, theta.scale(&theta_covector));

    let mut vertices = vec![Vector::zeros(backend, d)];
    for (i, cw) in coweights.iter().enumerate() {
        let ci = &theta.entries[i];
        if !ci.is_positive() {
            return Err(Error::InvalidSpec(
                "highest root must have positive coefficients on an irreducible system".into(),
            ));
        }
        vertices.push(cw.scale(&backend.one().div(ci)));
    }
    let mut center = Vector::zeros(backend, d);
    for v in &vertices {
        center = center.add(v);
    }
    let center = center.scale(&backend.one().div(&backend.from_i64(vertices.len() as i64)));

    Ok(AffineData {
        coroots,
        highest_root: theta,
        affine_reflection,
        alcove_vertices: vertices,
        alcove_center: center,
    })
}
