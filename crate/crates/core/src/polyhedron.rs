//! Polyhedral feasibility with strict/non-strict/equality rows, restricted to
//! an affine subspace, by Fourier-Motzkin elimination.
//!
//! The witness of a feasible system is canonical and deterministic: equality
//! rows are folded into the subspace parametrization first, then variables
//! are eliminated in reverse index order and re-assigned in forward order,
//! each from the midpoint of its feasible interval (a half-bounded interval
//! takes bound +/- 1, a free variable takes 0). On the exact backend the
//! witness of a strictly feasible system is strictly interior; on the float
//! backend answers whose deciding slacks fall inside the tolerance band are
//! reported as [`Feasibility::Ambiguous`] rather than silently classified.
//!
//! The same midpoint rule applied to a closed system lands in the relative
//! interior of the solution set (the relative interior of a fiber over a
//! relative-interior point of a projection is relative-interior in the
//! total set), which is what [`relative_interior_point`] exposes: a point
//! whose set of active rows is exactly the implicit-equality set.

use crate::linalg::{solve_affine_system, Matrix, Vector};
use crate::scalar::{Backend, ScalarValue, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    /// a.x = rhs
    Equality,
    /// a.x >= rhs
    NonStrict,
    /// a.x > rhs
    Strict,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vector,
    pub rhs: ScalarValue,
    pub kind: ConstraintKind,
}

impl Constraint {
    pub fn new(coeffs: Vector, rhs: ScalarValue, kind: ConstraintKind) -> Constraint {
        Constraint { coeffs, rhs, kind }
    }

    /// Slack a.x - rhs.
    pub fn slack(&self, x: &Vector) -> ScalarValue {
        self.coeffs.dot(x).sub(&self.rhs)
    }
}

#[derive(Clone, Debug)]
pub struct PolyhedronSpec {
    pub dim: usize,
    pub constraints: Vec<Constraint>,
}

impl PolyhedronSpec {
    pub fn new(dim: usize, constraints: Vec<Constraint>) -> PolyhedronSpec {
        assert!(constraints.iter().all(|c| c.coeffs.dim() == dim), "constraint dimension mismatch");
        PolyhedronSpec { dim, constraints }
    }
}

/// Affine subspace x = particular + sum c_k basis_k used to restrict a
/// feasibility question to the solution coset of a linear system.
#[derive(Clone, Debug)]
pub struct AffineSubspace {
    pub particular: Vector,
    pub basis: Vec<Vector>,
}

impl AffineSubspace {
    pub fn full(backend: Backend, dim: usize) -> AffineSubspace {
        AffineSubspace {
            particular: Vector::zeros(backend, dim),
            basis: (0..dim).map(|i| Vector::unit(backend, dim, i)).collect(),
        }
    }

    pub fn point(p: Vector) -> AffineSubspace {
        AffineSubspace { particular: p, basis: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.particular.dim()
    }

    pub fn coset_dim(&self) -> usize {
        self.basis.len()
    }

    /// Map coset coordinates to an ambient point.
    pub fn embed(&self, coords: &[ScalarValue]) -> Vector {
        assert_eq!(coords.len(), self.basis.len());
        let mut x = self.particular.clone();
        for (c, b) in coords.iter().zip(&self.basis) {
            x = x.add(&b.scale(c));
        }
        x
    }
}

#[derive(Clone, Debug)]
pub struct InteriorWitness {
    pub point: Vector,
    /// Minimum slack over the strict rows at the witness (1 when there are
    /// no strict rows).
    pub margin: ScalarValue,
}

#[derive(Clone, Debug)]
pub enum Feasibility {
    Feasible(InteriorWitness),
    Infeasible,
    /// Float backend only: the verdict would flip within the tolerance band.
    Ambiguous,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

#[derive(Clone, Debug)]
pub struct RelintPoint {
    pub point: Vector,
    /// Indices of input constraints active (slack classified zero) at the
    /// point; since the point is relative-interior these are exactly the
    /// implicit equalities of the system.
    pub active: Vec<usize>,
}

// ---------------------------------------------------------------------------
// Fourier-Motzkin core
// ---------------------------------------------------------------------------

#[derive(Clone)]
struct FmRow {
    coeffs: Vec<ScalarValue>,
    rhs: ScalarValue,
    strict: bool,
}

enum FmOutcome {
    Feasible(Vec<ScalarValue>),
    Infeasible { marginal: bool },
}

const FM_ROW_CAP: usize = 100_000;

fn normalize_row(backend: Backend, row: &mut FmRow) {
    let mut scale = backend.zero();
    for c in &row.coeffs {
        scale = scale.max_raw(&c.abs());
    }
    if scale.is_zero() {
        return;
    }
    for c in row.coeffs.iter_mut() {
        *c = c.div(&scale);
    }
    row.rhs = row.rhs.div(&scale);
}

/// Check a coefficient-free row `0 (>=|>) rhs`. Returns `Some(marginal)` when
/// violated: `marginal` means the strict verdict hinged on a zero-classified
/// constant, i.e. the closed relaxation still passes.
fn constant_row_violation(row: &FmRow) -> Option<bool> {
    match (row.rhs.sign(), row.strict) {
        (Sign::Positive, _) => Some(false),
        (Sign::Zero, true) => Some(true),
        _ => None,
    }
}

/// Eliminate all variables, then re-assign them by the midpoint rule.
fn fm_solve(backend: Backend, nvars: usize, rows: Vec<FmRow>) -> FmOutcome {
    let mut marginal = false;
    let mut current: Vec<FmRow> = Vec::new();
    for row in rows {
        if row.coeffs.iter().all(|c| c.is_zero()) {
            match constant_row_violation(&row) {
                Some(false) => return FmOutcome::Infeasible { marginal: false },
                Some(true) => marginal = true,
                None => {}
            }
        } else {
            current.push(row);
        }
    }
    let mut stages: Vec<Vec<FmRow>> = vec![Vec::new(); nvars];
    for j in (0..nvars).rev() {
        let mut keep = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for row in current.drain(..) {
            match row.coeffs[j].sign() {
                Sign::Zero => keep.push(row),
                Sign::Positive => pos.push(row),
                Sign::Negative => neg.push(row),
            }
        }
        for p in &pos {
            for n in &neg {
                // cancel variable j: p * (-n_j) + n * (p_j), both multipliers positive
                let mp = n.coeffs[j].neg();
                let mn = p.coeffs[j].clone();
                let mut coeffs = Vec::with_capacity(j);
                for k in 0..j {
                    coeffs.push(p.coeffs[k].mul(&mp).add(&n.coeffs[k].mul(&mn)));
                }
                coeffs.resize(j, backend.zero());
                let mut row = FmRow {
                    coeffs,
                    rhs: p.rhs.mul(&mp).add(&n.rhs.mul(&mn)),
                    strict: p.strict || n.strict,
                };
                // entries for vars >= j are zero by construction
                row.coeffs.resize(nvars, backend.zero());
                normalize_row(backend, &mut row);
                if row.coeffs.iter().all(|c| c.is_zero()) {
                    match constant_row_violation(&row) {
                        Some(false) => return FmOutcome::Infeasible { marginal: false },
                        Some(true) => marginal = true,
                        None => {}
                    }
                } else {
                    keep.push(row);
                }
            }
        }
        assert!(keep.len() <= FM_ROW_CAP, "Fourier-Motzkin row blowup");
        stages[j] = pos;
        stages[j].extend(neg);
        current = keep;
    }
    debug_assert!(current.is_empty());
    if marginal {
        return FmOutcome::Infeasible { marginal: true };
    }
    // Back-substitute: assign variable j from its interval given values < j.
    let mut values: Vec<ScalarValue> = Vec::with_capacity(nvars);
    for j in 0..nvars {
        let mut lower: Option<ScalarValue> = None;
        let mut upper: Option<ScalarValue> = None;
        for row in &stages[j] {
            let mut rest = row.rhs.clone();
            for k in 0..j {
                rest = rest.sub(&row.coeffs[k].mul(&values[k]));
            }
            let bound = rest.div(&row.coeffs[j]);
            match row.coeffs[j].sign() {
                Sign::Positive => {
                    lower = Some(match lower {
                        None => bound,
                        Some(l) => l.max_raw(&bound),
                    });
                }
                Sign::Negative => {
                    upper = Some(match upper {
                        None => bound,
                        Some(u) => u.min_raw(&bound),
                    });
                }
                Sign::Zero => unreachable!("stage rows carry the eliminated variable"),
            }
        }
        let v = match (lower, upper) {
            (None, None) => backend.zero(),
            (Some(l), None) => l.add(&backend.one()),
            (None, Some(u)) => u.sub(&backend.one()),
            (Some(l), Some(u)) => l.add(&u).div(&backend.from_i64(2)),
        };
        values.push(v);
    }
    FmOutcome::Feasible(values)
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

/// Fold equality rows into the subspace. Returns the reduced subspace, or
/// `None` when the equalities are inconsistent on the coset.
fn fold_equalities(spec: &PolyhedronSpec, restrict: &AffineSubspace) -> Option<AffineSubspace> {
    let backend = restrict.particular.backend;
    let eqs: Vec<&Constraint> =
        spec.constraints.iter().filter(|c| c.kind == ConstraintKind::Equality).collect();
    if eqs.is_empty() {
        return Some(restrict.clone());
    }
    let k = restrict.coset_dim();
    let mut mat = Matrix::zeros(backend, eqs.len(), k);
    let mut rhs = Vector::zeros(backend, eqs.len());
    for (i, c) in eqs.iter().enumerate() {
        for (j, b) in restrict.basis.iter().enumerate() {
            mat.set(i, j, c.coeffs.dot(b));
        }
        rhs.entries[i] = c.rhs.sub(&c.coeffs.dot(&restrict.particular));
    }
    let sol = solve_affine_system(&mat, &rhs);
    let p = sol.particular?;
    let particular = restrict.embed(&p.entries);
    let basis = sol
        .kernel_basis
        .iter()
        .map(|kv| {
            let mut dir = Vector::zeros(backend, restrict.ambient_dim());
            for (c, b) in kv.entries.iter().zip(&restrict.basis) {
                dir = dir.add(&b.scale(c));
            }
            dir
        })
        .filter(|d| !d.is_zero())
        .collect();
    Some(AffineSubspace { particular, basis })
}

fn rows_in_coords(
    spec: &PolyhedronSpec,
    sub: &AffineSubspace,
    include: impl Fn(ConstraintKind) -> bool,
    force_nonstrict: bool,
) -> Vec<FmRow> {
    spec.constraints
        .iter()
        .filter(|c| include(c.kind))
        .map(|c| FmRow {
            coeffs: sub.basis.iter().map(|b| c.coeffs.dot(b)).collect(),
            rhs: c.rhs.sub(&c.coeffs.dot(&sub.particular)),
            strict: !force_nonstrict && c.kind == ConstraintKind::Strict,
        })
        .collect()
}

/// Decide whether the polyhedron meets the subspace in a point satisfying
/// every row (strict rows strictly), and return the canonical witness.
pub fn feasible_interior(spec: &PolyhedronSpec, restrict: &AffineSubspace) -> Feasibility {
    assert_eq!(spec.dim, restrict.ambient_dim(), "ambient dimension mismatch");
    let backend = restrict.particular.backend;
    let Some(sub) = fold_equalities(spec, restrict) else {
        return Feasibility::Infeasible;
    };
    let rows = rows_in_coords(spec, &sub, |k| k != ConstraintKind::Equality, false);
    let outcome = fm_solve(backend, sub.coset_dim(), rows);
    let values = match outcome {
        FmOutcome::Infeasible { marginal: false } => return Feasibility::Infeasible,
        FmOutcome::Infeasible { marginal: true } => {
            return if backend.is_exact() { Feasibility::Infeasible } else { Feasibility::Ambiguous }
        }
        FmOutcome::Feasible(v) => v,
    };
    let point = sub.embed(&values);
    // Classify the witness against the original rows.
    let mut margin = backend.one();
    let mut ambiguous = false;
    for c in &spec.constraints {
        let slack = c.slack(&point);
        match c.kind {
            ConstraintKind::Equality => {}
            ConstraintKind::NonStrict => {
                if slack.sign() == Sign::Negative {
                    // Only float dust can reach here; surface it.
                    ambiguous = true;
                }
            }
            ConstraintKind::Strict => match slack.sign() {
                Sign::Positive => margin = margin.min_raw(&slack),
                _ => ambiguous = true,
            },
        }
    }
    if ambiguous {
        if backend.is_exact() {
            // An exact witness from a feasible elimination satisfies every
            // row strictly; reaching here means the inputs were inconsistent.
            return Feasibility::Infeasible;
        }
        return Feasibility::Ambiguous;
    }
    Feasibility::Feasible(InteriorWitness { point, margin })
}

/// Canonical relative-interior point of a closed system (equality and
/// non-strict rows only), together with its active set.
pub fn relative_interior_point(
    spec: &PolyhedronSpec,
    restrict: &AffineSubspace,
) -> Option<RelintPoint> {
    assert!(
        spec.constraints.iter().all(|c| c.kind != ConstraintKind::Strict),
        "relative interior is a closed-system notion"
    );
    let backend = restrict.particular.backend;
    let sub = fold_equalities(spec, restrict)?;
    let rows = rows_in_coords(spec, &sub, |k| k == ConstraintKind::NonStrict, true);
    match fm_solve(backend, sub.coset_dim(), rows) {
        FmOutcome::Infeasible { .. } => None,
        FmOutcome::Feasible(values) => {
            let point = sub.embed(&values);
            let active = spec
                .constraints
                .iter()
                .enumerate()
                .filter(|(_, c)| c.slack(&point).is_zero())
                .map(|(i, _)| i)
                .collect();
            Some(RelintPoint { point, active })
        }
    }
}
