//! Randomized and exhaustive verification suites. Each suite re-checks one
//! of the identities or partition properties the library is built on, over
//! seeded random samples or full element sweeps, and reports violations and
//! tolerance-band ambiguities instead of panicking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chamber::{lightcone_classify, separation_surrogate, LightConeClass};
use crate::element::GroupElement;
use crate::enumerate::{element_from_word, enumerate_to, is_regular, rank_one_minus};
use crate::error::{Error, Result};
use crate::group::{Geometry, ReflectionGroup};
use crate::linalg::{rank_and_kernel, Matrix, Vector};
use crate::scalar::{Backend, ScalarValue};
use crate::solver::{
    solve_affine, solve_hyperbolic_minus, solve_hyperbolic_plus, solve_spherical, SolverBudget,
};
use crate::structure::{
    adjacency_full, det_sum, enumerate_roots, geometric_adjacency_oracle, kostant_decompose,
    lower_adjacency_oracle, minimal_length_oracle, v_vector,
};

/// The sign-test margin used by floating-point suites.
const FLOAT_MARGIN: f64 = 1e-9;
/// Relative tolerance for floating-point identity residuals.
const FLOAT_RESIDUAL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Every sampled point lies in exactly one tile.
    Partition,
    /// Group translates never get closer to the chamber: the distance from a
    /// fixed interior point to wx dominates the distance to x.
    DistanceMonotonic,
    /// form(x, (1-w)x0) >= 0 for x in the chamber, x0 interior.
    ConeInclusion,
    /// The pairing identities of the vectors v_u (six items).
    PairingIdentities,
    /// Minimal reflection factorizations match rank(1-w) and the BFS oracle.
    Factorizations,
    /// Algebraic adjacency criteria agree with the geometric oracles.
    Adjacency,
    /// Sum of det(1 - h w^{-1}) over the group equals the group order.
    DetSum,
    /// The hyperbolic norm recursion along canonical words, with its signs.
    SignRecursion,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Partition,
        Suite::DistanceMonotonic,
        Suite::ConeInclusion,
        Suite::PairingIdentities,
        Suite::Factorizations,
        Suite::Adjacency,
        Suite::DetSum,
        Suite::SignRecursion,
    ];

    /// Command-line token of the suite.
    pub fn token(&self) -> &'static str {
        match self {
            Suite::Partition => "partition",
            Suite::DistanceMonotonic => "lemma1",
            Suite::ConeInclusion => "lemma3",
            Suite::PairingIdentities => "lemma4",
            Suite::Factorizations => "kostant",
            Suite::Adjacency => "adjacency",
            Suite::DetSum => "detsum",
            Suite::SignRecursion => "theorem3-signs",
        }
    }

    pub fn parse(token: &str) -> Option<Suite> {
        Suite::ALL.iter().copied().find(|s| s.token() == token)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    /// Ball radius for suites that enumerate infinite groups.
    pub max_word_length: usize,
}

impl Default for VerifyOptions {
    fn default() -> VerifyOptions {
        VerifyOptions { samples: 1000, seed: 7, max_word_length: 8 }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub suite: String,
    pub checked: usize,
    pub violations: Vec<String>,
    pub ambiguous: Vec<String>,
    /// Suite-specific headline value (a determinant sum, a census, ...).
    pub value: Option<String>,
}

impl VerifyReport {
    fn new(suite: Suite) -> VerifyReport {
        VerifyReport {
            suite: suite.token().to_string(),
            checked: 0,
            violations: Vec::new(),
            ambiguous: Vec::new(),
            value: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn run_suite(
    group: &ReflectionGroup,
    suite: Suite,
    opts: &VerifyOptions,
) -> Result<VerifyReport> {
    match suite {
        Suite::Partition => partition_suite(group, opts),
        Suite::DistanceMonotonic => distance_suite(group, opts),
        Suite::ConeInclusion => inclusion_suite(group, opts),
        Suite::PairingIdentities => pairing_suite(group),
        Suite::Factorizations => factorization_suite(group),
        Suite::Adjacency => adjacency_suite(group),
        Suite::DetSum => det_sum_suite(group, opts),
        Suite::SignRecursion => sign_recursion_suite(group, opts),
    }
}

fn require_geometry(group: &ReflectionGroup, suite: Suite, allowed: &[Geometry]) -> Result<()> {
    if allowed.contains(&group.geometry) {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "suite '{}' does not apply to {:?} groups",
            suite.token(),
            group.geometry
        )))
    }
}

fn fmt_vec(v: &Vector) -> String {
    let parts: Vec<String> = v.entries.iter().map(|e| e.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn fmt_word(e: &GroupElement) -> String {
    match &e.word {
        Some(w) => format!("{w:?}"),
        None => "<no word>".into(),
    }
}

/// A scalar in [0, 1]: a small rational on the exact backend, uniform on the
/// float backend.
fn sample_unit(backend: Backend, rng: &mut ChaCha8Rng) -> ScalarValue {
    if backend.is_exact() {
        let q = rng.gen_range(1..=8i64);
        backend.from_ratio(rng.gen_range(0..=q), q)
    } else {
        backend.from_f64(rng.gen::<f64>())
    }
}

/// A scalar in (0, 1].
fn sample_positive_unit(backend: Backend, rng: &mut ChaCha8Rng) -> ScalarValue {
    if backend.is_exact() {
        let q = rng.gen_range(1..=8i64);
        backend.from_ratio(rng.gen_range(1..=q), q)
    } else {
        backend.from_f64(rng.gen_range(1e-3..=1.0f64))
    }
}

/// A point of the chamber: a nonnegative (strict: positive) combination of
/// the coweights, or of the alcove vertices in the affine case.
fn chamber_sample(group: &ReflectionGroup, rng: &mut ChaCha8Rng, strict: bool) -> Vector {
    let backend = group.backend();
    let d = group.dim();
    if let Some(aff) = &group.affine {
        // Convex combination of the alcove vertices; keep one weight
        // positive so the total never vanishes.
        let verts = &aff.alcove_vertices;
        let mut weights: Vec<ScalarValue> = verts
            .iter()
            .map(|_| {
                if strict {
                    sample_positive_unit(backend, rng)
                } else {
                    sample_unit(backend, rng)
                }
            })
            .collect();
        let pin = rng.gen_range(0..weights.len());
        weights[pin] = sample_positive_unit(backend, rng);
        let total = weights.iter().fold(backend.zero(), |a, b| a.add(b));
        let mut point = Vector::zeros(backend, d);
        for (wt, v) in weights.iter().zip(verts) {
            point = point.add(&v.scale(&wt.div(&total)));
        }
        point
    } else {
        let mut point = Vector::zeros(backend, d);
        let mut any = false;
        for pi in &group.coweights {
            let lambda = if strict {
                sample_positive_unit(backend, rng)
            } else {
                sample_unit(backend, rng)
            };
            any = any || lambda.is_positive();
            point = point.add(&pi.scale(&lambda));
        }
        if strict || !any {
            // Guarantee a nonzero point even in the nonstrict case.
            point = point.add(&group.coweights[0].scale(&sample_positive_unit(backend, rng)));
        }
        point
    }
}

/// A point of the dual cone: nonnegative coordinates, mixing exact lattice
/// values (to land on lower-dimensional tiles) with generic fractions.
fn dual_sample(group: &ReflectionGroup, rng: &mut ChaCha8Rng) -> Vector {
    let backend = group.backend();
    let coords = (0..group.dim())
        .map(|_| match rng.gen_range(0..8u8) {
            0 => backend.zero(),
            1 => backend.from_i64(rng.gen_range(1..=3)),
            _ => sample_unit(backend, rng).mul(&backend.from_i64(rng.gen_range(1..=4))),
        })
        .collect();
    Vector::new(backend, coords)
}

/// A signed ambient point for the affine partition scan.
fn ambient_sample(group: &ReflectionGroup, rng: &mut ChaCha8Rng) -> Vector {
    let backend = group.backend();
    let coords = (0..group.dim())
        .map(|_| {
            let mag = if backend.is_exact() {
                let q = rng.gen_range(1..=4i64);
                backend.from_ratio(rng.gen_range(0..=6 * q), q)
            } else {
                backend.from_f64(rng.gen_range(0.0..6.0f64))
            };
            if rng.gen::<bool>() {
                mag.neg()
            } else {
                mag
            }
        })
        .collect();
    Vector::new(backend, coords)
}

fn elements_for_sampling(
    group: &ReflectionGroup,
    opts: &VerifyOptions,
) -> Result<Vec<GroupElement>> {
    match group.geometry {
        Geometry::Spherical => Ok(group.elements()?.to_vec()),
        _ => enumerate_to(group, opts.max_word_length),
    }
}

fn partition_suite(group: &ReflectionGroup, opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut report = VerifyReport::new(Suite::Partition);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let budget = SolverBudget { max_word_length: opts.max_word_length, ..SolverBudget::default() };
    for i in 0..opts.samples {
        let outcome = match group.geometry {
            Geometry::Spherical => {
                let u = dual_sample(group, &mut rng);
                (u.clone(), solve_spherical(group, &u).map(|_| ()))
            }
            Geometry::Affine => {
                let u = ambient_sample(group, &mut rng);
                (u.clone(), solve_affine(group, None, &u, &budget).map(|_| ()))
            }
            Geometry::Hyperbolic => {
                let u = dual_sample(group, &mut rng);
                let run = match lightcone_classify(group, &u)? {
                    LightConeClass::KMinusBoundary => {
                        report.ambiguous.push(format!(
                            "sample {i}: u = {} is lightlike on the lower cone boundary; \
                             the decomposition is not claimed there",
                            fmt_vec(&u)
                        ));
                        report.checked += 1;
                        continue;
                    }
                    LightConeClass::KMinusInterior => {
                        solve_hyperbolic_minus(group, &u, &budget).map(|_| ())
                    }
                    _ => solve_hyperbolic_plus(group, &u, &budget).map(|_| ()),
                };
                (u, run)
            }
        };
        report.checked += 1;
        let (u, run) = outcome;
        match run {
            Ok(()) => {}
            Err(Error::BudgetExhausted(msg)) => {
                report.ambiguous.push(format!("sample {i}: u = {} — {msg}", fmt_vec(&u)));
            }
            Err(Error::NotFound(msg)) if !group.backend().is_exact() => {
                report.ambiguous.push(format!("sample {i}: u = {} — {msg}", fmt_vec(&u)));
            }
            Err(e) => {
                report.violations.push(format!("sample {i}: u = {} — {e}", fmt_vec(&u)));
            }
        }
    }
    Ok(report)
}

fn distance_suite(group: &ReflectionGroup, opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut report = VerifyReport::new(Suite::DistanceMonotonic);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let elements = elements_for_sampling(group, opts)?;
    let backend = group.backend();
    for i in 0..opts.samples {
        let x0 = chamber_sample(group, &mut rng, true);
        let x = chamber_sample(group, &mut rng, false);
        let w = &elements[rng.gen_range(0..elements.len())];
        let wx = w.apply(&x);
        let base = separation_surrogate(group, &x0, &x);
        let moved = separation_surrogate(group, &x0, &wx);
        let diff = moved.sub(&base);
        let fixes = wx.linf_distance(&x).is_zero();
        report.checked += 1;
        if fixes {
            if backend.is_exact() && !diff.is_zero() {
                report.violations.push(format!(
                    "sample {i}: w = {} fixes x = {} but shifts the separation by {diff}",
                    fmt_word(w),
                    fmt_vec(&x)
                ));
            }
            continue;
        }
        if backend.is_exact() {
            if !diff.is_positive() {
                report.violations.push(format!(
                    "sample {i}: separation to w x dropped by {} (w = {}, x = {}, x0 = {})",
                    diff.neg(),
                    fmt_word(w),
                    fmt_vec(&x),
                    fmt_vec(&x0)
                ));
            }
        } else {
            let df = diff.to_f64();
            if df <= -FLOAT_MARGIN {
                report.violations.push(format!(
                    "sample {i}: separation to w x dropped by {:.3e} (w = {}, x = {})",
                    -df,
                    fmt_word(w),
                    fmt_vec(&x)
                ));
            } else if df <= FLOAT_MARGIN {
                report.ambiguous.push(format!(
                    "sample {i}: separation increment {df:.3e} inside the tolerance band \
                     (w = {})",
                    fmt_word(w)
                ));
            }
        }
    }
    Ok(report)
}

fn inclusion_suite(group: &ReflectionGroup, opts: &VerifyOptions) -> Result<VerifyReport> {
    require_geometry(
        group,
        Suite::ConeInclusion,
        &[Geometry::Spherical, Geometry::Hyperbolic],
    )?;
    let mut report = VerifyReport::new(Suite::ConeInclusion);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let elements = elements_for_sampling(group, opts)?;
    for i in 0..opts.samples {
        let x0 = chamber_sample(group, &mut rng, true);
        let x = chamber_sample(group, &mut rng, false);
        let w = &elements[rng.gen_range(0..elements.len())];
        let moved = x0.sub(&w.apply(&x0));
        let value = group.space.form(&x, &moved);
        report.checked += 1;
        if group.backend().is_exact() {
            if value.is_negative() {
                report.violations.push(format!(
                    "sample {i}: form(x, (1-w)x0) = {value} < 0 for w = {}, x = {}, x0 = {}",
                    fmt_word(w),
                    fmt_vec(&x),
                    fmt_vec(&x0)
                ));
            }
        } else {
            let vf = value.to_f64();
            if vf < -FLOAT_MARGIN {
                report.violations.push(format!(
                    "sample {i}: form(x, (1-w)x0) = {vf:.3e} < 0 for w = {}",
                    fmt_word(w)
                ));
            } else if vf < 0.0 {
                report
                    .ambiguous
                    .push(format!("sample {i}: form value {vf:.3e} inside the tolerance band"));
            }
        }
    }
    Ok(report)
}

/// Checks one scalar identity, ε-aware on the float backend.
fn residual_ok(lhs: &ScalarValue, rhs: &ScalarValue) -> bool {
    if lhs.backend().is_exact() {
        lhs.sub(rhs).as_exact().map(|r| r == &num::BigRational::from_integer(0.into())).unwrap_or(false)
    } else {
        let scale = lhs.to_f64().abs().max(rhs.to_f64().abs()).max(1.0);
        (lhs.to_f64() - rhs.to_f64()).abs() <= FLOAT_RESIDUAL * scale
    }
}

fn pairing_suite(group: &ReflectionGroup) -> Result<VerifyReport> {
    require_geometry(group, Suite::PairingIdentities, &[Geometry::Spherical])?;
    let mut report = VerifyReport::new(Suite::PairingIdentities);
    let backend = group.backend();
    let d = group.dim();
    let inv = enumerate_roots(group)?;
    let id = Matrix::identity(backend, d);
    let half = backend.from_ratio(1, 2);
    let regulars: Vec<&GroupElement> =
        group.elements()?.iter().filter(|e| is_regular(group, e)).collect();
    for w in regulars {
        let v: Vec<Vector> = inv
            .roots
            .iter()
            .map(|u| v_vector(group, w, u))
            .collect::<Result<_>>()?;
        let mut fail = |item: &str, detail: String| {
            report.violations.push(format!("w = {}: item {item}: {detail}", fmt_word(w)));
        };
        // (1) B(v_u, r) + B(v_r, u) = -B(u, r) over all root pairs.
        for (iu, u) in inv.roots.iter().enumerate() {
            for (ir, r) in inv.roots.iter().enumerate() {
                report.checked += 1;
                let lhs = group.space.form(&v[iu], r).add(&group.space.form(&v[ir], u));
                let rhs = group.space.form(u, r).neg();
                if !residual_ok(&lhs, &rhs) {
                    fail("1", format!("{lhs} != {rhs} for u = {}, r = {}", fmt_vec(u), fmt_vec(r)));
                }
            }
        }
        for (iu, u) in inv.roots.iter().enumerate() {
            // (2) B(v_u, u) = -1/2 B(u, u).
            report.checked += 1;
            let lhs = group.space.form(&v[iu], u);
            let rhs = group.space.norm(u).mul(&half).neg();
            if !residual_ok(&lhs, &rhs) {
                fail("2", format!("{lhs} != {rhs} for u = {}", fmt_vec(u)));
            }
            // (3) v_u is fixed by w s_u.
            report.checked += 1;
            let ws_u = w.mul(&inv.reflections[iu]);
            let image = ws_u.apply(&v[iu]);
            if !image.linf_distance(&v[iu]).is_zero() {
                fail("3", format!("w s_u moves v_u for u = {}", fmt_vec(u)));
            }
            // (4) B(v_u, (1-w)x) = 0 on a basis of the wall of u.
            let wall_row = group.space.gram().mul_vec(u);
            let mut row = Matrix::zeros(backend, 1, d);
            for j in 0..d {
                row.set(0, j, wall_row.get(j).clone());
            }
            let one_minus_w = id.sub(&w.linear);
            for x in rank_and_kernel(&row).kernel_basis {
                report.checked += 1;
                let val = group.space.form(&v[iu], &one_minus_w.mul_vec(&x));
                if !val.is_zero() {
                    fail("4", format!("pairing {val} != 0 on the wall of u = {}", fmt_vec(u)));
                }
            }
            // (5) ker(1 - w s_u) is exactly the line through v_u.
            report.checked += 1;
            let defect = id.sub(&ws_u.linear);
            let kernel_dim = rank_and_kernel(&defect).kernel_basis.len();
            let annihilates = defect.mul_vec(&v[iu]).is_zero();
            if kernel_dim != 1 || !annihilates {
                fail(
                    "5",
                    format!(
                        "kernel dim {kernel_dim}, v_u annihilated: {annihilates} for u = {}",
                        fmt_vec(u)
                    ),
                );
            }
        }
        // (6) B(v_e, (1-w) pi_e) < 0 for the simple normals.
        let one_minus_w = id.sub(&w.linear);
        for e in 0..d {
            report.checked += 1;
            let unit = Vector::unit(backend, d, e);
            let v_e = v_vector(group, w, &unit)?;
            let val = group.space.form(&v_e, &one_minus_w.mul_vec(&group.coweights[e]));
            let ok = if backend.is_exact() {
                val.is_negative()
            } else {
                val.to_f64() < -FLOAT_MARGIN
            };
            if !ok {
                fail("6", format!("B(v_e, (1-w) pi_e) = {val} not < 0 for e = {e}"));
            }
        }
    }
    Ok(report)
}

fn factorization_suite(group: &ReflectionGroup) -> Result<VerifyReport> {
    require_geometry(group, Suite::Factorizations, &[Geometry::Spherical])?;
    let mut report = VerifyReport::new(Suite::Factorizations);
    for w in group.elements()? {
        report.checked += 1;
        let label = fmt_word(w);
        let dec = match kostant_decompose(group, w) {
            Ok(d) => d,
            Err(e) => {
                report.violations.push(format!("w = {label}: {e}"));
                continue;
            }
        };
        if !dec.verify(group)? {
            report.violations.push(format!("w = {label}: factors do not remultiply to w"));
        }
        if !dec.roots_independent() {
            report.violations.push(format!("w = {label}: factor normals are dependent"));
        }
        let r = rank_one_minus(w);
        if dec.len() != r {
            report
                .violations
                .push(format!("w = {label}: length {} != rank {r}", dec.len()));
        }
        let oracle = minimal_length_oracle(group, w)?;
        if dec.len() != oracle {
            report
                .violations
                .push(format!("w = {label}: length {} != oracle distance {oracle}", dec.len()));
        }
    }
    Ok(report)
}

fn adjacency_suite(group: &ReflectionGroup) -> Result<VerifyReport> {
    require_geometry(group, Suite::Adjacency, &[Geometry::Spherical])?;
    let mut report = VerifyReport::new(Suite::Adjacency);
    let elements = group.elements()?;
    let regulars: Vec<&GroupElement> =
        elements.iter().filter(|e| is_regular(group, e)).collect();
    let singulars: Vec<&GroupElement> =
        elements.iter().filter(|e| !is_regular(group, e)).collect();
    report.value = Some(regulars.len().to_string());
    for w in &regulars {
        for w_prime in &regulars {
            report.checked += 1;
            let (claimed, _) = adjacency_full(group, w, w_prime)?;
            let oracle = geometric_adjacency_oracle(group, w, w_prime)?;
            if claimed != oracle {
                report.violations.push(format!(
                    "full pair (w = {}, w' = {}): criterion {claimed}, geometry {oracle}",
                    fmt_word(w),
                    fmt_word(w_prime)
                ));
            }
        }
    }
    for w_prime in &singulars {
        for w in &regulars {
            report.checked += 1;
            let verdict = crate::structure::adjacency_lower(group, w_prime, w)?;
            let oracle = lower_adjacency_oracle(group, w_prime, w)?;
            if verdict.adjacent != oracle {
                report.violations.push(format!(
                    "lower pair (w' = {}, w = {}): criterion {}, geometry {oracle}",
                    fmt_word(w_prime),
                    fmt_word(w),
                    verdict.adjacent
                ));
            }
            if verdict.adjacent && !verdict.rank_split {
                report.violations.push(format!(
                    "lower pair (w' = {}, w = {}): adjacency without the rank split",
                    fmt_word(w_prime),
                    fmt_word(w)
                ));
            }
        }
    }
    Ok(report)
}

fn det_sum_suite(group: &ReflectionGroup, opts: &VerifyOptions) -> Result<VerifyReport> {
    require_geometry(group, Suite::DetSum, &[Geometry::Spherical])?;
    let mut report = VerifyReport::new(Suite::DetSum);
    let backend = group.backend();
    let order = backend.from_i64(group.elements()?.len() as i64);
    let plain = det_sum(group, None)?;
    report.checked += 1;
    report.value = Some(plain.to_string());
    if !residual_ok(&plain, &order) {
        report.violations.push(format!("plain sum {plain} != group order {order}"));
    }
    let half = backend.from_ratio(1, 2);
    for r in group.elements()?.iter().take(opts.samples) {
        for lambda in [backend.one(), half.clone()] {
            report.checked += 1;
            let h = GroupElement::from_linear(r.linear.scale(&lambda));
            let twisted = det_sum(group, Some(&h))?;
            if !residual_ok(&twisted, &order) {
                report.violations.push(format!(
                    "twist h = {lambda} * {}: sum {twisted} != {order}",
                    fmt_word(r)
                ));
            }
        }
    }
    Ok(report)
}

fn sign_recursion_suite(group: &ReflectionGroup, opts: &VerifyOptions) -> Result<VerifyReport> {
    require_geometry(group, Suite::SignRecursion, &[Geometry::Hyperbolic])?;
    let mut report = VerifyReport::new(Suite::SignRecursion);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let backend = group.backend();
    let elements = enumerate_to(group, opts.max_word_length)?;
    let nontrivial: Vec<&GroupElement> =
        elements.iter().filter(|e| !e.is_identity()).collect();
    if nontrivial.is_empty() {
        return Ok(report);
    }
    let four = backend.from_i64(4);
    let points_per_element = (opts.samples / nontrivial.len()).max(1);
    for w in nontrivial {
        let word = w.word.as_ref().expect("ball enumeration attaches words");
        let e = word[0] as usize;
        let shorter = element_from_word(group, &word[1..])?;
        let normal = Vector::unit(backend, group.dim(), e);
        let normal_norm = group.space.norm(&normal);
        for _ in 0..points_per_element {
            let x = chamber_sample(group, &mut rng, true);
            let wx = w.apply(&x);
            let sx = shorter.apply(&x);
            let plus_step =
                group.space.norm(&x.sub(&wx)).sub(&group.space.norm(&x.sub(&sx)));
            let minus_step =
                group.space.norm(&x.add(&wx)).sub(&group.space.norm(&x.add(&sx)));
            let predicted = four
                .mul(&group.space.form(&sx, &normal))
                .mul(&group.space.form(&x, &normal))
                .div(&normal_norm);
            report.checked += 1;
            let mut problems: Vec<String> = Vec::new();
            if !residual_ok(&plus_step, &predicted) {
                problems.push(format!("step {plus_step} != predicted {predicted}"));
            }
            if !residual_ok(&minus_step, &predicted.neg()) {
                problems.push(format!("mirrored step {minus_step} != {}", predicted.neg()));
            }
            let (pos_ok, neg_ok) = if backend.is_exact() {
                (plus_step.is_positive(), minus_step.is_negative())
            } else {
                (plus_step.to_f64() > FLOAT_MARGIN, minus_step.to_f64() < -FLOAT_MARGIN)
            };
            if !pos_ok {
                problems.push(format!("step {plus_step} not positive beyond the margin"));
            }
            if !neg_ok {
                problems.push(format!("mirrored step {minus_step} not negative beyond the margin"));
            }
            if !problems.is_empty() {
                report.violations.push(format!(
                    "w = {}, x = {}: {}",
                    fmt_word(w),
                    fmt_vec(&x),
                    problems.join("; ")
                ));
            }
        }
    }
    Ok(report)
}

/// Convenience used by tests and the command line: u ∈ (1-w)C° membership
/// residual |(1-w)v - u| for a claimed witness, as f64.
pub fn witness_residual(w: &GroupElement, v: &Vector, u: &Vector) -> f64 {
    let image = v.sub(&w.apply(v));
    image
        .sub(u)
        .entries
        .iter()
        .fold(0.0f64, |acc, e| acc.max(e.to_f64().abs()))
}
