//! Dense complex linear algebra on `C^d`.
//!
//! Everything here is small-dimensional (a few hundred rows at most) and
//! written for accuracy rather than speed: Hermitian eigenproblems use cyclic
//! two-sided Jacobi, singular values come from one-sided (Hestenes) Jacobi,
//! and pseudoinverses, solves and rank tests are all built on that SVD.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative threshold on singular values used when no tolerance is given.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Relative Hermitian defect `‖A − A*‖_F / ‖A‖_F` accepted by [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

fn check_finite(values: &[C64]) -> Result<()> {
    match values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// Vectors
// ---------------------------------------------------------------------------

/// A vector of `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector(Vec<C64>);

impl CVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain("vector must have positive dimension".into()));
        }
        check_finite(&entries)?;
        Ok(CVector(entries))
    }

    /// Builds a vector without validation; callers guarantee finiteness.
    pub(crate) fn from_raw(entries: Vec<C64>) -> Self {
        CVector(entries)
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        CVector(vec![ZERO; dim])
    }

    /// The `k`-th canonical unit vector of `C^dim` (zero-based).
    pub fn unit(dim: usize, k: usize) -> Self {
        let mut v = vec![ZERO; dim];
        v[k] = ONE;
        CVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C64> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }

    /// `⟨self, other⟩ = Σ self_i · conj(other_i)`, linear in the first slot.
    pub fn inner(&self, other: &CVector) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C64) -> CVector {
        CVector(self.0.iter().map(|z| z * s).collect())
    }

    pub fn conj(&self) -> CVector {
        CVector(self.0.iter().map(|z| z.conj()).collect())
    }

    /// `self += alpha · x`
    pub fn axpy(&mut self, alpha: C64, x: &CVector) {
        debug_assert_eq!(self.dim(), x.dim());
        for (y, xi) in self.0.iter_mut().zip(&x.0) {
            *y += alpha * xi;
        }
    }

    pub fn max_abs_diff(&self, other: &CVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for CVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl Add for &CVector {
    type Output = CVector;
    fn add(self, rhs: &CVector) -> CVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimensions differ");
        CVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CVector {
    type Output = CVector;
    fn sub(self, rhs: &CVector) -> CVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimensions differ");
        CVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Serialize for CVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().map(|z| [z.re, z.im]))
    }
}

impl<'de> Deserialize<'de> for CVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(deserializer)?;
        CVector::new(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .map_err(de::Error::custom)
    }
}

/// The orthonormal basis `e_1, …, e_d` of `C^d`.
pub fn standard_basis(d: usize) -> Result<Vec<CVector>> {
    if d == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    Ok((0..d).map(|k| CVector::unit(d, k)).collect())
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Domain("matrix must have positive shape".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        check_finite(&data)?;
        Ok(CMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(rows, cols, values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[CVector]) -> Result<Self> {
        let first = columns
            .first()
            .ok_or_else(|| Error::Domain("no columns given".into()))?;
        let rows = first.dim();
        if let Some(bad) = columns.iter().find(|c| c.dim() != rows) {
            return Err(Error::DimensionMismatch { expected: rows, found: bad.dim() });
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn columns(&self) -> Vec<CVector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> CVector {
        CVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn mul_vec(&self, x: &CVector) -> CVector {
        assert_eq!(self.cols, x.dim(), "matrix-vector dimensions differ");
        CVector(
            (0..self.rows)
                .map(|i| {
                    self.data[i * self.cols..(i + 1) * self.cols]
                        .iter()
                        .zip(x.iter())
                        .map(|(a, b)| a * b)
                        .sum()
                })
                .collect(),
        )
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖self − other‖_F`
    pub fn distance(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "matrix shapes differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖self − I‖_F` for a square matrix.
    pub fn distance_to_identity(&self) -> f64 {
        assert!(self.is_square(), "matrix is not square");
        self.distance(&Self::identity(self.rows))
    }

    /// `‖A − A*‖_F / ‖A‖_F` (zero for the zero matrix).
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        self.distance(&self.adjoint()) / norm
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        }))
    }

    pub fn to_nested(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }

    pub fn from_nested(rows: Vec<Vec<C64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch { expected: c, found: bad.len() });
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimensions differ");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix shapes differ");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix shapes differ");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(
            (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()),
        )
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        CMatrix::from_nested(rows).map_err(de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Jacobi rotations
// ---------------------------------------------------------------------------

/// Unitary 2x2 rotation `J = [[c, s], [-s·conj(u), c·conj(u)]]` that
/// annihilates the off-diagonal entry `apq` of the Hermitian block
/// `[[app, apq], [conj(apq), aqq]]` under `J* · block · J`.
#[derive(Clone, Copy, Debug)]
struct Rotation {
    c: f64,
    s: f64,
    /// conj(u), where u is the phase of apq
    phase_conj: C64,
}

impl Rotation {
    fn annihilating(app: f64, aqq: f64, apq: C64) -> Rotation {
        let r = apq.norm();
        let u = apq / r;
        let zeta = (aqq - app) / (2.0 * r);
        let t = if zeta >= 0.0 {
            1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
        } else {
            -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        Rotation { c, s: t * c, phase_conj: u.conj() }
    }

    /// Columns `p, q` of `m` ← `m · J`.
    fn apply_right(&self, m: &mut CMatrix, p: usize, q: usize) {
        let (c, s, w) = (self.c, self.s, self.phase_conj);
        for i in 0..m.rows {
            let ap = m[(i, p)];
            let aq = m[(i, q)];
            m[(i, p)] = ap * c - aq * w * s;
            m[(i, q)] = ap * s + aq * w * c;
        }
    }

    /// Rows `p, q` of `m` ← `J* · m`.
    fn apply_left_adjoint(&self, m: &mut CMatrix, p: usize, q: usize) {
        let (c, s, u) = (self.c, self.s, self.phase_conj.conj());
        for j in 0..m.cols {
            let ap = m[(p, j)];
            let aq = m[(q, j)];
            m[(p, j)] = ap * c - aq * u * s;
            m[(q, j)] = ap * s + aq * u * c;
        }
    }
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition
// ---------------------------------------------------------------------------

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the unit eigenvector for `eigenvalues[k]`.
    pub eigenvectors: CMatrix,
}

impl HermitianEig {
    pub fn reconstruct(&self) -> CMatrix {
        let lambda: Vec<C64> = self.eigenvalues.iter().map(|&x| C64::new(x, 0.0)).collect();
        &(&self.eigenvectors * &CMatrix::diag(&lambda)) * &self.eigenvectors.adjoint()
    }
}

/// Cyclic complex Jacobi eigensolver.
pub fn hermitian_eig(a: &CMatrix) -> Result<HermitianEig> {
    if !a.is_square() {
        return Err(Error::NonSquare { rows: a.rows, cols: a.cols });
    }
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: defect });
    }
    let n = a.rows;
    let half = C64::new(0.5, 0.0);
    let mut work = (a + &a.adjoint()).scale(half);
    let mut vecs = CMatrix::identity(n);
    let norm = work.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| work[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-17 * norm || norm == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = work[(p, q)];
                if apq.norm() <= 1e-300 {
                    continue;
                }
                let rot = Rotation::annihilating(work[(p, p)].re, work[(q, q)].re, apq);
                rot.apply_right(&mut work, p, q);
                rot.apply_left_adjoint(&mut work, p, q);
                work[(p, q)] = ZERO;
                work[(q, p)] = ZERO;
                work[(p, p)].im = 0.0;
                work[(q, q)].im = 0.0;
                rot.apply_right(&mut vecs, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| work[(i, i)].re.total_cmp(&work[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| work[(i, i)].re).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, k| vecs[(i, order[k])]);
    Ok(HermitianEig { eigenvalues, eigenvectors })
}

// ---------------------------------------------------------------------------
// Singular value decomposition
// ---------------------------------------------------------------------------

/// Thin SVD `A = U · diag(σ) · V*` with `σ` descending.
#[derive(Clone, Debug)]
pub struct Svd {
    /// `m × k`, `k = min(m, n)`
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    /// `n × k`
    pub v: CMatrix,
}

impl Svd {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `tol · σ_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let cutoff = tol * self.sigma_max();
        self.singular_values.iter().filter(|&&s| s > cutoff && s > 0.0).count()
    }

    /// `σ_min / σ_max`, zero for the zero matrix.
    pub fn inverse_condition(&self) -> f64 {
        let smax = self.sigma_max();
        if smax == 0.0 {
            0.0
        } else {
            self.sigma_min() / smax
        }
    }
}

/// One-sided Jacobi SVD of a tall-or-square matrix.
fn svd_tall(a: &CMatrix) -> Svd {
    let (m, n) = a.shape();
    debug_assert!(m >= n);
    let mut work = a.clone();
    let mut v = CMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                for i in 0..m {
                    let wp = work[(i, p)];
                    let wq = work[(i, q)];
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let rot = Rotation::annihilating(alpha, beta, gamma);
                rot.apply_right(&mut work, p, q);
                rot.apply_right(&mut v, p, q);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| work.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let u = CMatrix::from_fn(m, n, |i, k| {
        let j = order[k];
        if norms[j] > 0.0 {
            work[(i, j)] / norms[j]
        } else {
            ZERO
        }
    });
    let v = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Svd { u, singular_values, v }
}

pub fn svd(a: &CMatrix) -> Svd {
    if a.rows >= a.cols {
        svd_tall(a)
    } else {
        let t = svd_tall(&a.adjoint());
        Svd { u: t.v, singular_values: t.singular_values, v: t.u }
    }
}

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    svd(a).singular_values
}

/// Moore–Penrose pseudoinverse, discarding singular values `≤ tol · σ_max`.
pub fn pinv(a: &CMatrix, tol: f64) -> Result<CMatrix> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Domain(format!("tolerance must be non-negative, got {tol}")));
    }
    let dec = svd(a);
    let cutoff = tol * dec.sigma_max();
    let mut out = CMatrix::zeros(a.cols, a.rows);
    for (k, &s) in dec.singular_values.iter().enumerate() {
        if s <= cutoff || s == 0.0 {
            continue;
        }
        let inv = 1.0 / s;
        for i in 0..a.cols {
            let vik = dec.v[(i, k)] * inv;
            for j in 0..a.rows {
                out[(i, j)] += vik * dec.u[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

/// Number of singular values above `tol · σ_max`.
pub fn rank(a: &CMatrix, tol: f64) -> Result<usize> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("rank tolerance must be positive, got {tol}")));
    }
    Ok(svd(a).rank(tol))
}

/// Inverse of a square matrix; singular (within [`DEFAULT_RANK_TOL`]) input is an error.
pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::NonSquare { rows: a.rows, cols: a.cols });
    }
    let dec = svd(a);
    if dec.sigma_min() <= DEFAULT_RANK_TOL * dec.sigma_max() {
        return Err(Error::SingularMatrix { condition: condition_of(&dec) });
    }
    pinv(a, 0.0)
}

fn condition_of(dec: &Svd) -> f64 {
    let ic = dec.inverse_condition();
    if ic == 0.0 {
        f64::INFINITY
    } else {
        1.0 / ic
    }
}

/// Solves `A x = b` for square, non-singular `A`.
pub fn solve(a: &CMatrix, b: &CVector) -> Result<CVector> {
    if !a.is_square() {
        return Err(Error::NonSquare { rows: a.rows, cols: a.cols });
    }
    if b.dim() != a.rows {
        return Err(Error::DimensionMismatch { expected: a.rows, found: b.dim() });
    }
    let dec = svd(a);
    if dec.sigma_min() <= DEFAULT_RANK_TOL * dec.sigma_max() {
        return Err(Error::SingularMatrix { condition: condition_of(&dec) });
    }
    // x = V Σ⁻¹ U* b
    let coeffs: Vec<C64> = (0..dec.singular_values.len())
        .map(|k| dec.u.column(k).iter().zip(b.iter()).map(|(u, bi)| u.conj() * bi).sum::<C64>() / dec.singular_values[k])
        .collect();
    Ok(dec.v.mul_vec(&CVector(coeffs)))
}

/// `R(A) ⊆ R(B)`, decided as `rank([B | A]) == rank(B)`.
pub fn column_space_leq(a: &CMatrix, b: &CMatrix, tol: f64) -> Result<bool> {
    if a.rows != b.rows {
        return Err(Error::DimensionMismatch { expected: b.rows, found: a.rows });
    }
    let joint = b.hstack(a)?;
    Ok(rank(&joint, tol)? == rank(b, tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::SeededRng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(rng: &mut SeededRng, n: usize) -> CMatrix {
        let g = rng.gaussian_matrix(n, n);
        (&g + &g.adjoint()).scale(c(0.5, 0.0))
    }

    #[test]
    fn standard_basis_is_identity_columns() {
        let b = standard_basis(2).unwrap();
        assert_eq!(b[0], CVector::from_real(&[1.0, 0.0]).unwrap());
        assert_eq!(b[1], CVector::from_real(&[0.0, 1.0]).unwrap());
        assert_eq!(standard_basis(1).unwrap(), vec![CVector::from_real(&[1.0]).unwrap()]);
        let b3 = standard_basis(3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { ONE } else { ZERO };
                assert_eq!(b3[i].inner(&b3[j]), want);
            }
        }
        assert!(matches!(standard_basis(0), Err(Error::Domain(_))));
    }

    #[test]
    fn vector_rejects_non_finite_and_empty() {
        assert_eq!(CVector::new(vec![c(1.0, f64::NAN)]), Err(Error::NonFinite(0)));
        assert!(CVector::new(vec![]).is_err());
        assert!(CMatrix::new(1, 2, vec![ONE, c(f64::INFINITY, 0.0)]).is_err());
        assert!(CMatrix::new(2, 2, vec![ONE]).is_err());
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_second_slot() {
        let h = CVector::new(vec![c(1.0, 1.0), c(0.0, 2.0)]).unwrap();
        let g = CVector::new(vec![c(0.0, 1.0), c(1.0, 0.0)]).unwrap();
        // (1+i)(-i) + 2i·1 = 1 - i + 2i = 1 + i
        assert_eq!(h.inner(&g), c(1.0, 1.0));
        assert_eq!(h.inner(&g.scale(c(0.0, 1.0))), h.inner(&g) * c(0.0, -1.0));
    }

    #[test]
    fn eig_of_identity_and_diagonal() {
        let e = hermitian_eig(&CMatrix::identity(2)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);

        let e = hermitian_eig(&CMatrix::diag(&[c(3.0, 0.0), c(2.0, 0.0)])).unwrap();
        assert_eq!(e.eigenvalues, vec![2.0, 3.0]);
        // eigenvectors are identity columns up to phase (here permuted by sorting)
        assert!((e.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((e.eigenvectors[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eig_rejects_non_hermitian_and_non_square() {
        let a = CMatrix::new(2, 2, vec![ONE, ONE, ZERO, ONE]).unwrap();
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian { .. })));
        assert!(matches!(hermitian_eig(&CMatrix::zeros(2, 3)), Err(Error::NonSquare { .. })));
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = SeededRng::new(11);
        for n in [1, 2, 5, 16, 40] {
            let a = random_hermitian(&mut rng, n);
            let e = hermitian_eig(&a).unwrap();
            let err = a.distance(&e.reconstruct()) / a.frobenius_norm().max(1.0);
            assert!(err <= 1e-10, "n={n} err={err:e}");
            let gram = &e.eigenvectors.adjoint() * &e.eigenvectors;
            assert!(gram.distance_to_identity() <= 1e-12);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn pinv_examples() {
        let i3 = CMatrix::identity(3);
        assert!(pinv(&i3, 1e-12).unwrap().distance(&i3) < 1e-15);

        let a = CMatrix::diag(&[c(2.0, 0.0), ZERO]);
        let p = pinv(&a, 1e-12).unwrap();
        assert!(p.distance(&CMatrix::diag(&[c(0.5, 0.0), ZERO])) < 1e-15);

        let mut rng = SeededRng::new(3);
        let a = rng.gaussian_matrix(6, 4);
        let p = pinv(&a, DEFAULT_RANK_TOL).unwrap();
        assert!((&p * &a).distance_to_identity() <= 1e-9);
        assert!(pinv(&a, -1.0).is_err());
    }

    #[test]
    fn penrose_identities_hold_on_rank_deficient_input() {
        let mut rng = SeededRng::new(5);
        for (m, n, r) in [(8, 5, 3), (4, 9, 2), (12, 12, 7)] {
            let a = &rng.gaussian_matrix(m, r) * &rng.gaussian_matrix(r, n);
            let p = pinv(&a, DEFAULT_RANK_TOL).unwrap();
            assert!((&(&a * &p) * &a).distance(&a) <= 1e-9);
            assert!((&(&p * &a) * &p).distance(&p) <= 1e-9);
            let ap = &a * &p;
            let pa = &p * &a;
            assert!(ap.distance(&ap.adjoint()) <= 1e-9);
            assert!(pa.distance(&pa.adjoint()) <= 1e-9);
            assert_eq!(rank(&a, DEFAULT_RANK_TOL).unwrap(), r);
        }
    }

    #[test]
    fn svd_reconstructs_and_orders() {
        let mut rng = SeededRng::new(8);
        for (m, n) in [(5, 3), (3, 5), (7, 7)] {
            let a = rng.gaussian_matrix(m, n);
            let d = svd(&a);
            let s: Vec<C64> = d.singular_values.iter().map(|&x| c(x, 0.0)).collect();
            let back = &(&d.u * &CMatrix::diag(&s)) * &d.v.adjoint();
            assert!(back.distance(&a) <= 1e-12 * a.frobenius_norm());
            assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&CMatrix::identity(3), 1e-10).unwrap(), 3);
        assert_eq!(rank(&CMatrix::zeros(3, 3), 1e-10).unwrap(), 0);
        let a = CMatrix::from_real(3, 2, &[1.0, 1.0, 2.0, 2.0, -1.0, -1.0]).unwrap();
        assert_eq!(rank(&a, 1e-10).unwrap(), 1);
        assert!(rank(&a, 0.0).is_err());
    }

    #[test]
    fn solve_and_singular_error() {
        let mut rng = SeededRng::new(21);
        let a = rng.gaussian_matrix(6, 6);
        let b = rng.gaussian_vector(6);
        let x = solve(&a, &b).unwrap();
        let res = (&a.mul_vec(&x) - &b).norm();
        assert!(res <= 1e-9 * (a.frobenius_norm() * x.norm() + b.norm()));

        let s = CMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        match solve(&s, &CVector::from_real(&[1.0, 1.0]).unwrap()) {
            Err(Error::SingularMatrix { condition }) => assert!(condition > 1e10),
            other => panic!("expected singular error, got {other:?}"),
        }
        assert!(matches!(inverse(&s), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn column_space_examples() {
        let mut rng = SeededRng::new(2);
        let b = rng.gaussian_matrix(4, 3);
        assert!(column_space_leq(&b, &b, 1e-10).unwrap());

        let e1 = CMatrix::from_real(2, 1, &[1.0, 0.0]).unwrap();
        let e2 = CMatrix::from_real(2, 1, &[0.0, 1.0]).unwrap();
        assert!(!column_space_leq(&e1, &e2, 1e-10).unwrap());

        // oracle: rank([B | b_1]) = rank(B) = 3
        let first = CMatrix::from_columns(&[b.column(0)]).unwrap();
        assert_eq!(rank(&b.hstack(&first).unwrap(), 1e-10).unwrap(), 3);
        assert!(column_space_leq(&first, &b, 1e-10).unwrap());
        assert!(!column_space_leq(&b, &first, 1e-10).unwrap());
        assert!(column_space_leq(&e1, &b.adjoint(), 1e-10).is_err());
    }

    #[test]
    fn matrix_json_is_row_major_pairs() {
        let m = CMatrix::new(1, 2, vec![c(1.0, 2.0), c(3.0, -4.0)]).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, "[[[1.0,2.0],[3.0,-4.0]]]");
        let back: CMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<CMatrix>("[[[1,0]],[[1,0],[2,0]]]").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn rank_invariant_under_unitary(seed in 0u64..10_000, m in 2usize..8, n in 2usize..8, r in 1usize..4) {
                let mut rng = SeededRng::new(seed);
                let r = r.min(m).min(n);
                let a = &rng.gaussian_matrix(m, r) * &rng.gaussian_matrix(r, n);
                let q = rng.unitary(m);
                prop_assert_eq!(rank(&(&q * &a), 1e-10).unwrap(), rank(&a, 1e-10).unwrap());
            }

            #[test]
            fn mutual_inclusion_iff_equal_ranks(seed in 0u64..10_000, m in 2usize..7, ra in 1usize..4, rb in 1usize..4) {
                let mut rng = SeededRng::new(seed);
                let basis = rng.gaussian_matrix(m, 3);
                // columns drawn from a common 3-dim space, sometimes sharing a subspace
                let a = &basis * &rng.gaussian_matrix(3, ra);
                let b = if seed % 2 == 0 { &a * &rng.gaussian_matrix(ra, rb) } else { &basis * &rng.gaussian_matrix(3, rb) };
                let both = column_space_leq(&a, &b, 1e-10).unwrap() && column_space_leq(&b, &a, 1e-10).unwrap();
                let ra_ = rank(&a, 1e-10).unwrap();
                let rb_ = rank(&b, 1e-10).unwrap();
                let rab = rank(&a.hstack(&b).unwrap(), 1e-10).unwrap();
                prop_assert_eq!(both, ra_ == rb_ && rb_ == rab);
            }
        }
    }
}
