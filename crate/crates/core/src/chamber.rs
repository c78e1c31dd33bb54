//! Chamber and alcove geometry: point classification, the dual cone, the
//! light cone of Lorentzian groups, distances in the three model spaces, and
//! the central membership test "does u lie in the tile of w, and with which
//! witness v".

use crate::element::GroupElement;
use crate::enumerate::wall_slacks;
use crate::error::{Error, Result};
use crate::group::{Geometry, ReflectionGroup};
use crate::linalg::{solve_affine_system, Vector};
use crate::polyhedron::{
    feasible_interior, AffineSubspace, Constraint, ConstraintKind, Feasibility, PolyhedronSpec,
};
use crate::scalar::{Backend, ScalarValue, Sign};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChamberClassification {
    Interior,
    /// On the boundary; carries the ascending indices of the active walls
    /// (the affine wall, when present, is index d).
    Boundary(Vec<usize>),
    Outside,
}

/// Where a vector of a Lorentzian space sits relative to the light cone
/// [x,x] <= 0 and its two components; the positive component is the one
/// containing the fundamental chamber.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LightConeClass {
    KPlusInterior,
    KPlusBoundary,
    KMinusInterior,
    KMinusBoundary,
    Spacelike,
    Zero,
}

impl LightConeClass {
    pub fn in_k_minus(self) -> bool {
        matches!(self, LightConeClass::KMinusInterior | LightConeClass::KMinusBoundary)
    }

    pub fn in_k_plus(self) -> bool {
        matches!(self, LightConeClass::KPlusInterior | LightConeClass::KPlusBoundary)
    }
}

/// Classify a point against the walls of the fundamental domain (chamber, or
/// alcove for affine groups: the affine wall is tested as one more slack).
pub fn classify_chamber_point(group: &ReflectionGroup, x: &Vector) -> ChamberClassification {
    let slacks = wall_slacks(group, x);
    let mut active = Vec::new();
    for (i, s) in slacks.iter().enumerate() {
        match s.sign() {
            Sign::Negative => return ChamberClassification::Outside,
            Sign::Zero => active.push(i),
            Sign::Positive => {}
        }
    }
    if active.is_empty() {
        ChamberClassification::Interior
    } else {
        ChamberClassification::Boundary(active)
    }
}

/// Membership in the dual cone C^* = cone(simple normals); since the simple
/// normals are the coordinate basis this is a sign check on coordinates.
pub fn dual_cone_contains(group: &ReflectionGroup, u: &Vector) -> Result<bool> {
    if group.dim() != u.dim() {
        return Err(Error::NonSimplicialChamber(
            "dual cone test requires as many simple normals as dimensions".into(),
        ));
    }
    Ok(u.entries.iter().all(|c| c.sign().is_nonnegative()))
}

pub fn lightcone_classify(group: &ReflectionGroup, u: &Vector) -> Result<LightConeClass> {
    let tau = group.time_orientation.as_ref().ok_or_else(|| {
        Error::PreconditionViolated("light cone classification needs a Lorentzian group".into())
    })?;
    if u.is_zero() {
        return Ok(LightConeClass::Zero);
    }
    let norm = group.space.norm(u);
    if norm.is_positive() {
        return Ok(LightConeClass::Spacelike);
    }
    // Same component as the chamber-side reference tau iff [u, tau] < 0.
    let time = group.space.form(u, tau);
    let positive_side = if time.is_zero() {
        // Exactly orthogonal to a timelike vector is spacelike, so this is
        // float dust on a nearly-zero vector; fall back to the raw sign.
        time.to_f64() < 0.0
    } else {
        time.is_negative()
    };
    Ok(match (norm.sign(), positive_side) {
        (Sign::Negative, true) => LightConeClass::KPlusInterior,
        (Sign::Negative, false) => LightConeClass::KMinusInterior,
        (_, true) => LightConeClass::KPlusBoundary,
        (_, false) => LightConeClass::KMinusBoundary,
    })
}

/// Distance between two model points. The float backend returns the genuine
/// distance (arc length / Euclidean / hyperbolic). The exact backend never
/// evaluates transcendental functions; it returns the standard monotone
/// surrogate instead: cos of the angle (decreasing in distance) on the
/// sphere, the squared distance in Euclidean space, and ch of the distance
/// (increasing) on the hyperboloid. Model membership is enforced: sphere
/// points need [x,x] = 1 (float: any positive norm, normalized internally),
/// hyperboloid points need [x,x] = -1 (float: timelike) on the chamber side
/// of the light cone.
pub fn distance(group: &ReflectionGroup, x: &Vector, y: &Vector) -> Result<ScalarValue> {
    let backend = group.backend();
    match group.geometry {
        Geometry::Affine => {
            let d2 = group.space.norm(&x.sub(y));
            Ok(match backend {
                Backend::Exact => d2,
                Backend::Approx { .. } => backend.from_f64(d2.to_f64().max(0.0).sqrt()),
            })
        }
        Geometry::Spherical => {
            let nx = group.space.norm(x);
            let ny = group.space.norm(y);
            let prod = group.space.form(x, y);
            match backend {
                Backend::Exact => {
                    if !nx.sub(&backend.one()).is_zero() || !ny.sub(&backend.one()).is_zero() {
                        return Err(Error::ModelViolation(
                            "exact spherical distance needs unit vectors ([x,x] = 1)".into(),
                        ));
                    }
                    Ok(prod)
                }
                Backend::Approx { .. } => {
                    if !nx.is_positive() || !ny.is_positive() {
                        return Err(Error::ModelViolation(
                            "spherical points must have positive norm".into(),
                        ));
                    }
                    let c = prod.to_f64() / (nx.to_f64() * ny.to_f64()).sqrt();
                    Ok(backend.from_f64(c.clamp(-1.0, 1.0).acos()))
                }
            }
        }
        Geometry::Hyperbolic => {
            for p in [x, y] {
                let class = lightcone_classify(group, p)?;
                if class != LightConeClass::KPlusInterior {
                    return Err(Error::ModelViolation(
                        "hyperbolic points must be timelike on the chamber side".into(),
                    ));
                }
            }
            let prod = group.space.form(x, y).neg();
            match backend {
                Backend::Exact => {
                    let minus_one = backend.from_i64(-1);
                    if !group.space.norm(x).sub(&minus_one).is_zero()
                        || !group.space.norm(y).sub(&minus_one).is_zero()
                    {
                        return Err(Error::ModelViolation(
                            "exact hyperbolic distance needs [x,x] = -1".into(),
                        ));
                    }
                    Ok(prod)
                }
                Backend::Approx { .. } => {
                    let nx = group.space.norm(x).to_f64();
                    let ny = group.space.norm(y).to_f64();
                    let c = prod.to_f64() / (nx * ny).sqrt();
                    Ok(backend.from_f64(c.max(1.0).acosh()))
                }
            }
        }
    }
}

/// A quantity increasing in the distance between x and y, defined without
/// any model normalization: -[x,y] on the sphere and the hyperboloid (valid
/// for comparisons with matching norms, e.g. against images under the
/// group), the squared distance in Euclidean space.
pub fn separation_surrogate(group: &ReflectionGroup, x: &Vector, y: &Vector) -> ScalarValue {
    match group.geometry {
        Geometry::Affine => group.space.norm(&x.sub(y)),
        _ => group.space.form(x, y).neg(),
    }
}

// ---------------------------------------------------------------------------
// Tiles
// ---------------------------------------------------------------------------

/// Which defining map cuts the tile: (1-w)C°, (-1-w)C°, or (h-w)D° for an
/// affine map h.
#[derive(Clone, Debug)]
pub enum TileVariant<'a> {
    OneMinus,
    MinusOneMinus,
    HMinus(&'a GroupElement),
}

#[derive(Clone, Debug)]
pub struct TileSolution {
    pub element: GroupElement,
    /// Canonical interior witness v with (variant)v = u.
    pub witness: Vector,
    /// Rank of the defining map; dim of the tile as a subset of the space.
    pub tile_dim: usize,
    /// All solutions of the linear system, before the interior restriction:
    /// witness non-uniqueness is exposed here rather than hidden.
    pub kernel_coset: AffineSubspace,
    /// Minimum wall slack at the witness.
    pub margin: ScalarValue,
}

#[derive(Clone, Debug)]
pub enum TileMembership {
    Member(Box<TileSolution>),
    NotMember,
    /// Float backend only: u sits within the tolerance band of a tile wall.
    Ambiguous,
}

impl TileMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, TileMembership::Member(_))
    }
}

/// Strict-inequality system cutting the open fundamental domain: the open
/// chamber (Gx > 0), plus the open affine wall B(theta, x) < 1 for affine
/// groups.
pub(crate) fn open_domain_spec(group: &ReflectionGroup) -> PolyhedronSpec {
    domain_spec(group, ConstraintKind::Strict)
}

pub(crate) fn closed_domain_spec(group: &ReflectionGroup) -> PolyhedronSpec {
    domain_spec(group, ConstraintKind::NonStrict)
}

fn domain_spec(group: &ReflectionGroup, kind: ConstraintKind) -> PolyhedronSpec {
    let backend = group.backend();
    let d = group.dim();
    let mut constraints: Vec<Constraint> = (0..d)
        .map(|i| Constraint::new(group.space.gram().row(i), backend.zero(), kind))
        .collect();
    if let Some(aff) = &group.affine {
        // B(theta, x) <= 1 encoded as -B(theta, x) >= -1.
        constraints.push(Constraint::new(
            group.space.wall_values(&aff.highest_root).neg(),
            backend.from_i64(-1),
            kind,
        ));
    }
    PolyhedronSpec::new(d, constraints)
}

/// Does u lie in the open tile of w, i.e. is there v in the open fundamental
/// domain with (1-w)v = u (resp. (-1-w)v = u, (h-w)v = u)? Returns the
/// canonical witness and the solution coset on success. On the float
/// backend, a verdict that would flip within the tolerance band is returned
/// as `Ambiguous` instead of being silently classified.
pub fn tile_membership(
    group: &ReflectionGroup,
    w: &GroupElement,
    u: &Vector,
    variant: TileVariant<'_>,
) -> Result<TileMembership> {
    let backend = group.backend();
    let d = group.dim();
    if u.dim() != d {
        return Err(Error::InvalidSpec("vector dimension mismatch".into()));
    }
    let id = crate::linalg::Matrix::identity(backend, d);
    // (a - w)v = u with affine translation bookkeeping: the linear system is
    // (A_a - A_w)v = u - t_a + t_w.
    let (matrix, rhs) = match variant {
        TileVariant::OneMinus => (id.sub(&w.linear), u.add(&w.translation)),
        TileVariant::MinusOneMinus => {
            (id.scale(&backend.from_i64(-1)).sub(&w.linear), u.add(&w.translation))
        }
        TileVariant::HMinus(h) => (
            h.linear.sub(&w.linear),
            u.sub(&h.translation).add(&w.translation),
        ),
    };
    let sol = solve_affine_system(&matrix, &rhs);
    let tile_dim = sol.rank;
    let Some(particular) = sol.particular else {
        return Ok(TileMembership::NotMember);
    };
    let coset = AffineSubspace { particular, basis: sol.kernel_basis };
    let spec = open_domain_spec(group);

    if coset.coset_dim() == 0 {
        // Unique solution: a direct sign check is both faster and exact.
        let slacks = wall_slacks(group, &coset.particular);
        let mut margin: Option<ScalarValue> = None;
        let mut dusty = false;
        for s in &slacks {
            match s.sign() {
                Sign::Negative => return Ok(TileMembership::NotMember),
                Sign::Zero => dusty = true,
                Sign::Positive => {}
            }
            margin = Some(match margin {
                None => s.clone(),
                Some(m) => m.min_raw(s),
            });
        }
        if dusty {
            // Exactly on a wall: certainly outside the open tile when exact,
            // within the tolerance band when float.
            return Ok(if backend.is_exact() {
                TileMembership::NotMember
            } else {
                TileMembership::Ambiguous
            });
        }
        return Ok(TileMembership::Member(Box::new(TileSolution {
            element: w.clone(),
            witness: coset.particular.clone(),
            tile_dim,
            kernel_coset: coset,
            margin: margin.expect("positive-dimensional space has walls"),
        })));
    }

    match feasible_interior(&spec, &coset) {
        Feasibility::Feasible(wit) => Ok(TileMembership::Member(Box::new(TileSolution {
            element: w.clone(),
            witness: wit.point,
            tile_dim,
            kernel_coset: coset,
            margin: wit.margin,
        }))),
        Feasibility::Infeasible => Ok(TileMembership::NotMember),
        Feasibility::Ambiguous => Ok(TileMembership::Ambiguous),
    }
}
