//! Dense vectors and matrices over [`ScalarValue`], with the elimination
//! routines the rest of the crate leans on: reduced row echelon, kernel
//! bases, affine solves, determinants, inverses, and Sylvester inertia.
//!
//! Pivoting is deterministic: the exact backend takes the first usable pivot,
//! the float backend the entry of largest magnitude, rejecting candidates
//! that classify as zero. Ambient dimensions stay in the single digits, so
//! everything here is plain O(n^3) elimination.

use crate::scalar::{Backend, ScalarValue, Sign};

#[derive(Clone, PartialEq)]
pub struct Vector {
    pub backend: Backend,
    pub entries: Vec<ScalarValue>,
}

impl std::fmt::Debug for Vector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(&self.entries).finish()
    }
}

impl Vector {
    pub fn new(backend: Backend, entries: Vec<ScalarValue>) -> Vector {
        Vector { backend, entries }
    }

    pub fn zeros(backend: Backend, dim: usize) -> Vector {
        Vector { backend, entries: (0..dim).map(|_| backend.zero()).collect() }
    }

    pub fn unit(backend: Backend, dim: usize, i: usize) -> Vector {
        let mut v = Vector::zeros(backend, dim);
        v.entries[i] = backend.one();
        v
    }

    pub fn from_i64(backend: Backend, entries: &[i64]) -> Vector {
        Vector { backend, entries: entries.iter().map(|&n| backend.from_i64(n)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize) -> &ScalarValue {
        &self.entries[i]
    }

    pub fn add(&self, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim());
        Vector {
            backend: self.backend,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Vector {
        Vector { backend: self.backend, entries: self.entries.iter().map(|a| a.neg()).collect() }
    }

    pub fn scale(&self, c: &ScalarValue) -> Vector {
        Vector { backend: self.backend, entries: self.entries.iter().map(|a| a.mul(c)).collect() }
    }

    /// Plain coordinate dot product (no bilinear form).
    pub fn dot(&self, other: &Vector) -> ScalarValue {
        assert_eq!(self.dim(), other.dim());
        let mut acc = self.backend.zero();
        for (a, b) in self.entries.iter().zip(&other.entries) {
            acc = acc.add(&a.mul(b));
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Max |entry| difference, as a scalar; used for float assertions.
    pub fn linf_distance(&self, other: &Vector) -> ScalarValue {
        assert_eq!(self.dim(), other.dim());
        let mut best = self.backend.zero();
        for (a, b) in self.entries.iter().zip(&other.entries) {
            best = best.max_raw(&a.sub(b).abs());
        }
        best
    }
}

#[derive(Clone, PartialEq)]
pub struct Matrix {
    pub backend: Backend,
    rows: usize,
    cols: usize,
    data: Vec<ScalarValue>, // row-major
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(backend: Backend, rows: usize, cols: usize) -> Matrix {
        Matrix { backend, rows, cols, data: (0..rows * cols).map(|_| backend.zero()).collect() }
    }

    pub fn identity(backend: Backend, n: usize) -> Matrix {
        let mut m = Matrix::zeros(backend, n, n);
        for i in 0..n {
            m.set(i, i, backend.one());
        }
        m
    }

    pub fn from_rows(backend: Backend, rows: Vec<Vec<ScalarValue>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix rows");
        Matrix { backend, rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(backend: Backend, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            backend,
            rows.iter().map(|r| r.iter().map(|&n| backend.from_i64(n)).collect()).collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &ScalarValue {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ScalarValue) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vector {
        Vector {
            backend: self.backend,
            entries: self.data[i * self.cols..(i + 1) * self.cols].to_vec(),
        }
    }

    pub fn col(&self, j: usize) -> Vector {
        Vector {
            backend: self.backend,
            entries: (0..self.rows).map(|i| self.get(i, j).clone()).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.backend, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_mat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Matrix::zeros(self.backend, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = self.backend.zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        assert_eq!(self.cols, v.dim(), "dimension mismatch in matrix-vector product");
        Vector {
            backend: self.backend,
            entries: (0..self.rows)
                .map(|i| {
                    let mut acc = self.backend.zero();
                    for k in 0..self.cols {
                        acc = acc.add(&self.get(i, k).mul(v.get(k)));
                    }
                    acc
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert!(self.rows == other.rows && self.cols == other.cols);
        Matrix {
            backend: self.backend,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert!(self.rows == other.rows && self.cols == other.cols);
        Matrix {
            backend: self.backend,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, c: &ScalarValue) -> Matrix {
        Matrix {
            backend: self.backend,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.get(i, j).cmp_sign(self.get(j, i)) != Sign::Zero {
                    return false;
                }
            }
        }
        true
    }

    /// Max |entry| of the difference; float-backend assertion helper.
    pub fn linf_distance(&self, other: &Matrix) -> ScalarValue {
        assert!(self.rows == other.rows && self.cols == other.cols);
        let mut best = self.backend.zero();
        for (a, b) in self.data.iter().zip(&other.data) {
            best = best.max_raw(&a.sub(b).abs());
        }
        best
    }
}

/// Output of the elimination routines. `rank` is the matrix rank,
/// `kernel_basis` spans the nullspace, and `particular` (when solving
/// `A x = b`) is the solution with all free variables set to zero, or `None`
/// if the system is inconsistent.
#[derive(Clone, Debug)]
pub struct LinearSolveResult {
    pub rank: usize,
    pub particular: Option<Vector>,
    pub kernel_basis: Vec<Vector>,
}

fn pick_pivot(m: &Matrix, col: usize, start_row: usize) -> Option<usize> {
    match m.backend {
        Backend::Exact => (start_row..m.nrows()).find(|&i| !m.get(i, col).is_zero()),
        Backend::Approx { .. } => {
            let mut best: Option<usize> = None;
            for i in start_row..m.nrows() {
                if m.get(i, col).is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(i),
                    Some(b) => {
                        if m.get(i, col).abs_gt_raw(m.get(b, col)) {
                            best = Some(i);
                        }
                    }
                }
            }
            best
        }
    }
}

fn swap_rows(m: &mut Matrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    let cols = m.ncols();
    for j in 0..cols {
        let x = m.get(a, j).clone();
        let y = m.get(b, j).clone();
        m.set(a, j, y);
        m.set(b, j, x);
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
/// Only the first `active_cols` columns are eligible as pivots (the rest ride
/// along, which is how augmented systems are solved).
fn rref(m: &mut Matrix, active_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..active_cols {
        if row >= m.nrows() {
            break;
        }
        let Some(p) = pick_pivot(m, col, row) else { continue };
        swap_rows(m, p, row);
        let inv = m.backend.one().div(m.get(row, col));
        for j in 0..m.ncols() {
            let v = m.get(row, j).mul(&inv);
            m.set(row, j, v);
        }
        for i in 0..m.nrows() {
            if i == row || m.get(i, col).is_zero() {
                continue;
            }
            let factor = m.get(i, col).clone();
            for j in 0..m.ncols() {
                let v = m.get(i, j).sub(&factor.mul(m.get(row, j)));
                m.set(i, j, v);
            }
            // Force the eliminated entry to a hard zero so float dust cannot
            // resurface as a later pivot.
            m.set(i, col, m.backend.zero());
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

fn kernel_from_rref(m: &Matrix, pivots: &[usize], ncols: usize) -> Vec<Vector> {
    let backend = m.backend;
    let mut basis = Vec::new();
    let pivot_set: Vec<Option<usize>> = {
        let mut v = vec![None; ncols];
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = Some(r);
        }
        v
    };
    for free in 0..ncols {
        if pivot_set[free].is_some() {
            continue;
        }
        let mut vec = Vector::zeros(backend, ncols);
        vec.entries[free] = backend.one();
        for (r, &c) in pivots.iter().enumerate() {
            vec.entries[c] = m.get(r, free).neg();
        }
        basis.push(vec);
    }
    basis
}

/// Rank and kernel basis of `a`.
pub fn rank_and_kernel(a: &Matrix) -> LinearSolveResult {
    let mut m = a.clone();
    let pivots = rref(&mut m, a.ncols());
    let kernel = kernel_from_rref(&m, &pivots, a.ncols());
    LinearSolveResult { rank: pivots.len(), particular: None, kernel_basis: kernel }
}

pub fn rank(a: &Matrix) -> usize {
    rank_and_kernel(a).rank
}

/// Solve `A x = b`: particular solution (free variables zero) plus kernel
/// basis. `particular` is `None` when the system is inconsistent; on the
/// float backend inconsistency means a residual beyond the tolerance.
pub fn solve_affine_system(a: &Matrix, b: &Vector) -> LinearSolveResult {
    assert_eq!(a.nrows(), b.dim());
    let backend = a.backend;
    let mut aug = Matrix::zeros(backend, a.nrows(), a.ncols() + 1);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, a.ncols(), b.get(i).clone());
    }
    let pivots = rref(&mut aug, a.ncols());
    // Inconsistent iff some row is 0 = nonzero.
    let mut consistent = true;
    for i in pivots.len()..aug.nrows() {
        if !aug.get(i, a.ncols()).is_zero() {
            consistent = false;
            break;
        }
    }
    let particular = if consistent {
        let mut x = Vector::zeros(backend, a.ncols());
        for (r, &c) in pivots.iter().enumerate() {
            x.entries[c] = aug.get(r, a.ncols()).clone();
        }
        Some(x)
    } else {
        None
    };
    let kernel = kernel_from_rref(&aug, &pivots, a.ncols());
    LinearSolveResult { rank: pivots.len(), particular, kernel_basis: kernel }
}

/// Determinant by elimination with the backend's pivoting rule.
pub fn determinant(a: &Matrix) -> ScalarValue {
    assert_eq!(a.nrows(), a.ncols(), "determinant of non-square matrix");
    let n = a.nrows();
    let backend = a.backend;
    let mut m = a.clone();
    let mut det = backend.one();
    for col in 0..n {
        let Some(p) = pick_pivot(&m, col, col) else {
            return backend.zero();
        };
        if p != col {
            swap_rows(&mut m, p, col);
            det = det.neg();
        }
        det = det.mul(m.get(col, col));
        let inv = backend.one().div(m.get(col, col));
        for i in (col + 1)..n {
            if m.get(i, col).is_zero() {
                continue;
            }
            let factor = m.get(i, col).mul(&inv);
            for j in col..n {
                let v = m.get(i, j).sub(&factor.mul(m.get(col, j)));
                m.set(i, j, v);
            }
        }
    }
    det
}

/// Inverse, or `None` if singular (under sign classification).
pub fn inverse(a: &Matrix) -> Option<Matrix> {
    assert_eq!(a.nrows(), a.ncols());
    let n = a.nrows();
    let backend = a.backend;
    let mut aug = Matrix::zeros(backend, n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, n + i, backend.one());
    }
    let pivots = rref(&mut aug, n);
    if pivots.len() < n {
        return None;
    }
    let mut out = Matrix::zeros(backend, n, n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, aug.get(i, n + j).clone());
        }
    }
    Some(out)
}

/// Congruence diagonalization of a symmetric matrix: returns (diag, p) with
/// p invertible and p^T a p diagonal; `diag` lists the diagonal entries
/// (hard zeros for the null block). Works over both backends.
pub fn congruence_diagonalize(a: &Matrix) -> (Vec<ScalarValue>, Matrix) {
    assert!(a.is_symmetric(), "congruence on non-symmetric matrix");
    let n = a.nrows();
    let backend = a.backend;
    let mut m = a.clone();
    let mut p = Matrix::identity(backend, n);
    let mut handled = vec![false; n];
    // Each pass either classifies a pivot or folds one off-diagonal entry
    // onto the diagonal, so 2n passes always suffice.
    for _ in 0..2 * n {
        // Deterministic pivot: the unhandled diagonal entry of largest
        // magnitude (raw order), if any classifies nonzero.
        let mut pivot: Option<usize> = None;
        for i in 0..n {
            if handled[i] || m.get(i, i).is_zero() {
                continue;
            }
            match pivot {
                None => pivot = Some(i),
                Some(p) => {
                    if m.get(i, i).abs_gt_raw(m.get(p, p)) {
                        pivot = Some(i);
                    }
                }
            }
        }
        let pivot = match pivot {
            Some(p) => p,
            None => {
                // All unhandled diagonal entries vanish. If some off-diagonal
                // entry between unhandled indices survives, fold it onto the
                // diagonal (x -> x + y trick) and retry; otherwise the rest
                // is the zero block.
                let mut folded = false;
                'search: for i in 0..n {
                    if handled[i] {
                        continue;
                    }
                    for j in 0..n {
                        if handled[j] || j == i || m.get(i, j).is_zero() {
                            continue;
                        }
                        // row_i += row_j; col_i += col_j
                        for k in 0..n {
                            let v = m.get(i, k).add(m.get(j, k));
                            m.set(i, k, v);
                        }
                        for k in 0..n {
                            let v = m.get(k, i).add(m.get(k, j));
                            m.set(k, i, v);
                        }
                        for k in 0..n {
                            let v = p.get(k, i).add(p.get(k, j));
                            p.set(k, i, v);
                        }
                        folded = true;
                        break 'search;
                    }
                }
                if !folded {
                    break;
                }
                continue;
            }
        };
        handled[pivot] = true;
        // Clear row/col `pivot` against all unhandled indices by congruence.
        let d_inv = backend.one().div(m.get(pivot, pivot));
        for i in 0..n {
            if handled[i] || m.get(i, pivot).is_zero() {
                continue;
            }
            let factor = m.get(i, pivot).mul(&d_inv);
            for k in 0..n {
                let v = m.get(i, k).sub(&factor.mul(m.get(pivot, k)));
                m.set(i, k, v);
            }
            for k in 0..n {
                let v = m.get(k, i).sub(&factor.mul(m.get(k, pivot)));
                m.set(k, i, v);
            }
            for k in 0..n {
                let v = p.get(k, i).sub(&factor.mul(p.get(k, pivot)));
                p.set(k, i, v);
            }
        }
    }
    let diag = (0..n)
        .map(|i| if handled[i] { m.get(i, i).clone() } else { backend.zero() })
        .collect();
    (diag, p)
}

/// Sylvester inertia (positives, negatives, zeros) of a symmetric matrix.
pub fn inertia(a: &Matrix) -> (usize, usize, usize) {
    let (diag, _) = congruence_diagonalize(a);
    let mut pos = 0;
    let mut neg = 0;
    let mut zero = 0;
    for d in &diag {
        match d.sign() {
            Sign::Positive => pos += 1,
            Sign::Negative => neg += 1,
            Sign::Zero => zero += 1,
        }
    }
    (pos, neg, zero)
}
