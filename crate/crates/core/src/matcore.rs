//! Dense complex matrix kernel.
//!
//! [`CMatrix`] is a square, row-major matrix of `Complex64`. Everything in the
//! crate is built on it: arithmetic, the Kronecker product and partial trace
//! under one fixed index convention, the Hilbert-Schmidt geometry, and a
//! cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Kronecker convention: `(A ⊗ B)[(a, b), (c, d)] = A[a, c] * B[b, d]` with the
//! composite index `a * dim_b + b`.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GpcError, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative Hermiticity tolerance accepted by the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

/// Wire form: `{"dim": n, "data": [[[re, im], ...], ...]}`, rows outermost.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    data: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = GpcError;

    fn try_from(raw: MatrixJson) -> Result<Self> {
        if raw.dim == 0 {
            return Err(GpcError::MalformedMatrix("dim must be positive".into()));
        }
        if raw.data.len() != raw.dim {
            return Err(GpcError::MalformedMatrix(format!(
                "expected {} rows, found {}",
                raw.dim,
                raw.data.len()
            )));
        }
        let mut data = Vec::with_capacity(raw.dim * raw.dim);
        for (r, row) in raw.data.iter().enumerate() {
            if row.len() != raw.dim {
                return Err(GpcError::MalformedMatrix(format!(
                    "row {r} has {} entries, expected {}",
                    row.len(),
                    raw.dim
                )));
            }
            for &[re, im] in row {
                if !re.is_finite() || !im.is_finite() {
                    return Err(GpcError::NonFinite);
                }
                data.push(C64::new(re, im));
            }
        }
        Ok(CMatrix { dim: raw.dim, data })
    }
}

impl From<CMatrix> for MatrixJson {
    fn from(m: CMatrix) -> Self {
        let data = m
            .data
            .chunks(m.dim)
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        MatrixJson { dim: m.dim, data }
    }
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        CMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        CMatrix { dim, data }
    }

    /// Builds a matrix from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(GpcError::EmptyInput("matrix rows"));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(GpcError::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            if row.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(GpcError::NonFinite);
            }
            data.extend_from_slice(row);
        }
        Ok(CMatrix { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: C64, other: &CMatrix) {
        assert_eq!(self.dim, other.dim, "add_scaled dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for r in 0..n {
            let out_row = &mut out[r * n..(r + 1) * n];
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        CMatrix { dim: n, data: out }
    }

    /// `self† · other · self`, the conjugation used by every Kraus-type sum.
    pub fn sandwich(&self, inner: &CMatrix) -> Self {
        self.adjoint().matmul(&inner.matmul(self))
    }

    pub fn commutator(&self, other: &CMatrix) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Max-norm distance to another matrix of the same dimension.
    pub fn max_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "max_diff dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Copies the `size × size` block starting at `(offset, offset)`.
    pub fn principal_block(&self, offset: usize, size: usize) -> Result<Self> {
        if offset + size > self.dim || size == 0 {
            return Err(GpcError::DimensionMismatch {
                expected: self.dim,
                found: offset + size,
            });
        }
        Ok(Self::from_fn(size, |r, c| self[(offset + r, offset + c)]))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

/// Matrix unit `E_ij` of `M_n`, zero-based indices.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> Result<CMatrix> {
    if n == 0 || i >= n || j >= n {
        return Err(GpcError::IndexOutOfRange {
            row: i,
            col: j,
            dim: n,
        });
    }
    let mut m = CMatrix::zeros(n);
    m[(i, j)] = ONE;
    Ok(m)
}

/// Hilbert-Schmidt inner product `Tr(A† B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<C64> {
    if a.dim != b.dim {
        return Err(GpcError::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok(hs_inner_unchecked(a, b))
}

pub(crate) fn hs_inner_unchecked(a: &CMatrix, b: &CMatrix) -> C64 {
    a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (na, nb) = (a.dim, b.dim);
    CMatrix::from_fn(na * nb, |r, c| a[(r / nb, c / nb)] * b[(r % nb, c % nb)])
}

/// Traces out the first tensor factor: the sum of the `n1` diagonal
/// `n2 × n2` blocks of `x`.
pub fn partial_trace_first(x: &CMatrix, n1: usize, n2: usize) -> Result<CMatrix> {
    if n1 == 0 || n2 == 0 || n1 * n2 != x.dim {
        return Err(GpcError::NotFactorable {
            dim: x.dim,
            left: n1,
            right: n2,
        });
    }
    Ok(CMatrix::from_fn(n2, |r, c| {
        (0..n1).map(|a| x[(a * n2 + r, a * n2 + c)]).sum()
    }))
}

/// Eigenvalues of a Hermitian matrix in nondecreasing order.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigh(h)?.0)
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns ascending eigenvalues and the unitary whose columns are
/// the matching eigenvectors.
pub fn hermitian_eigh(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !h.is_finite() {
        return Err(GpcError::NonFinite);
    }
    let scale = h.max_abs();
    let deviation = h.hermitian_deviation();
    if deviation > HERMITIAN_TOL * scale.max(1.0) {
        return Err(GpcError::NotHermitian { deviation });
    }
    let n = h.dim;
    // Work on the exact Hermitian part.
    let mut a = CMatrix::from_fn(n, |r, c| (h[(r, c)] + h[(c, r)].conj()) * 0.5);
    let mut v = CMatrix::identity(n);

    let total: f64 = a.hs_norm();
    if total > 0.0 {
        let target = f64::EPSILON * total;
        for _sweep in 0..100 {
            let off: f64 = off_diagonal_norm(&a);
            if off <= target {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let g = a[(p, q)];
                    let r = g.norm();
                    if r <= f64::MIN_POSITIVE || r < f64::EPSILON * 1e-3 * total {
                        a[(p, q)] = ZERO;
                        a[(q, p)] = ZERO;
                        continue;
                    }
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let values = pairs.iter().map(|&(val, _)| val).collect();
    let vectors = CMatrix::from_fn(n, |r, c| v[(r, pairs[c].1)]);
    Ok((values, vectors))
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim;
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[p][q]` with the unitary `U = diag(1, e^{-iφ}) · R(θ)` acting
/// on coordinates `p, q`, where `a[p][q] = |a[p][q]| e^{iφ}`.
fn jacobi_rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let n = a.dim;
    let g = a[(p, q)];
    let r = g.norm();
    let phase = g / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let pc = phase.conj();

    // Columns: A ← A U.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * pc * s;
        a[(k, q)] = akp * s + akq * pc * c;
    }
    // Rows: A ← U† A.
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * pc * s;
        v[(k, q)] = vkp * s + vkq * pc * c;
    }
}

/// Number of Gram-matrix eigenvalues of `elements` above `threshold`.
pub fn gram_rank(elements: &[CMatrix], threshold: f64) -> Result<usize> {
    if elements.is_empty() {
        return Ok(0);
    }
    let dim = elements[0].dim;
    if let Some(bad) = elements.iter().find(|e| e.dim != dim) {
        return Err(GpcError::DimensionMismatch {
            expected: dim,
            found: bad.dim,
        });
    }
    let gram = CMatrix::from_fn(elements.len(), |s, t| {
        hs_inner_unchecked(&elements[s], &elements[t])
    });
    let values = hermitian_eigenvalues(&gram)?;
    Ok(values.iter().filter(|&&v| v > threshold).count())
}

/// Basis of the null space of a dense `rows × ncols` system, found by
/// Gauss-Jordan elimination with partial pivoting. Columns whose best pivot
/// falls below `threshold` (relative to the largest entry) are free.
pub fn null_space(mut rows: Vec<Vec<C64>>, ncols: usize, threshold: f64) -> Vec<Vec<C64>> {
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let cutoff = threshold * scale;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut free = Vec::new();
    let mut next_row = 0;
    for col in 0..ncols {
        let best = (next_row..rows.len())
            .map(|r| (r, rows[r][col].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((r, mag)) if mag > cutoff && mag > 0.0 => {
                rows.swap(next_row, r);
                let inv = rows[next_row][col].inv();
                rows[next_row].iter_mut().for_each(|z| *z *= inv);
                let pivot_row = rows[next_row].clone();
                for (ri, row) in rows.iter_mut().enumerate() {
                    if ri == next_row {
                        continue;
                    }
                    let f = row[col];
                    if f == ZERO {
                        continue;
                    }
                    for (z, &p) in row.iter_mut().zip(&pivot_row) {
                        *z -= f * p;
                    }
                }
                pivots.push((next_row, col));
                next_row += 1;
            }
            _ => free.push(col),
        }
    }
    free.iter()
        .map(|&f| {
            let mut x = vec![ZERO; ncols];
            x[f] = ONE;
            for &(r, pc) in &pivots {
                x[pc] = -rows[r][f];
            }
            x
        })
        .collect()
}

/// Matrix with entries uniform in the unit square of the complex plane,
/// real and imaginary parts in `[-1, 1)`.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_fn(n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let m = random_matrix(rng, n);
    (&m + &m.adjoint()).scale_real(0.5)
}

/// Random unitary from Gram-Schmidt on the columns of a random matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    loop {
        let m = random_matrix(rng, n);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        let mut ok = true;
        for c in 0..n {
            let mut col: Vec<C64> = (0..n).map(|r| m[(r, c)]).collect();
            for _ in 0..2 {
                for prev in &cols {
                    let proj: C64 = prev.iter().zip(&col).map(|(p, x)| p.conj() * x).sum();
                    for (x, p) in col.iter_mut().zip(prev) {
                        *x -= proj * p;
                    }
                }
            }
            let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            col.iter_mut().for_each(|x| *x /= norm);
            cols.push(col);
        }
        if ok {
            return CMatrix::from_fn(n, |r, c| cols[c][r]);
        }
    }
}
