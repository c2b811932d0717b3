//! Dense complex and real matrices, structure predicates, a cyclic Jacobi
//! eigensolver for Hermitian matrices and seeded Haar-unitary sampling.
//!
//! Matrices here are small (n <= 64) and have entries bounded by one, so every
//! tolerance in this module is absolute.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type C64 = Complex64;

const HERMITIAN_INPUT_TOL: f64 = 1e-9;
const JACOBI_OFF_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Square matrix of complex doubles stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn new(n: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| if i == j { values[i] } else { C64::new(0.0, 0.0) })
    }

    /// Matrix unit `E_ij`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m.set(i, j, C64::new(1.0, 0.0));
        m
    }

    /// Build from real rows. Panics if the rows are ragged or not square.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "rows must form a square matrix");
        Self::from_fn(n, |i, j| C64::new(rows[i][j], 0.0))
    }

    /// Outer product `u v*`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        assert_eq!(u.len(), v.len());
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.n + j] = value;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn conj(&self) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Real part as a [`RealMatrix`].
    pub fn real_part(&self) -> RealMatrix {
        RealMatrix { rows: self.n, cols: self.n, data: self.data.iter().map(|z| z.re).collect() }
    }

    /// Entrywise squared modulus `A ∘ Ā`.
    pub fn abs_squared(&self) -> RealMatrix {
        RealMatrix { rows: self.n, cols: self.n, data: self.data.iter().map(|z| z.norm_sqr()).collect() }
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev = 0.0_f64;
        for i in 0..self.n {
            for j in i..self.n {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn unitary_deviation(&self) -> f64 {
        (self * &self.adjoint()).max_abs_diff(&Self::identity(self.n))
    }

    /// Conjugate by a permutation: entry `(σ(i), σ(j))` of the result is entry `(i, j)` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(perm[i], perm[j], self.get(i, j));
            }
        }
        out
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "matrix product dimension mismatch");
        let n = self.n;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        ComplexMatrix { n, data: out }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "matrix sum dimension mismatch");
        ComplexMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "matrix difference dimension mismatch");
        ComplexMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

// {"n": 3, "entries": [[re, im], ...]} row-major; plain numbers accepted for real entries.
#[derive(Deserialize)]
#[serde(untagged)]
enum EntryRepr {
    Real(f64),
    Pair([f64; 2]),
}

#[derive(Deserialize)]
struct MatrixRepr {
    n: usize,
    entries: Vec<EntryRepr>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<[f64; 2]> = self.data.iter().map(|z| [z.re, z.im]).collect();
        let mut st = serializer.serialize_struct("ComplexMatrix", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        let data = repr
            .entries
            .into_iter()
            .map(|e| match e {
                EntryRepr::Real(x) => C64::new(x, 0.0),
                EntryRepr::Pair([re, im]) => C64::new(re, im),
            })
            .collect();
        ComplexMatrix::new(repr.n, data).map_err(de::Error::custom)
    }
}

/// Dense real matrix, row-major, not necessarily square.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch { expected: c, found: bad.len() });
        }
        Self::new(r, c, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * factor).collect() }
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j)).sum()).collect()
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest entrywise absolute difference; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn symmetry_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev = 0.0_f64;
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        dev
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        assert!(self.is_square(), "only square real matrices convert to ComplexMatrix");
        ComplexMatrix { n: self.rows, data: self.data.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    /// Conjugate a square matrix by a permutation (see [`ComplexMatrix::permute`]).
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert!(self.is_square() && perm.len() == self.rows);
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(perm[i], perm[j], self.get(i, j));
            }
        }
        out
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(blocks: &[RealMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j));
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Numerical rank by Gaussian elimination with partial pivoting.
    pub fn rank(&self, tol: f64) -> usize {
        let mut work = self.data.clone();
        row_echelon(&mut work, self.rows, self.cols, self.cols, tol).len()
    }

    /// Solve `self · x = b` when the solution exists and is unique
    /// (full column rank and consistent right-hand side), else `None`.
    pub fn solve_unique(&self, b: &[f64], tol: f64) -> Option<Vec<f64>> {
        assert_eq!(b.len(), self.rows);
        let (r, c) = (self.rows, self.cols);
        let w = c + 1;
        let mut aug = Vec::with_capacity(r * w);
        for i in 0..r {
            aug.extend_from_slice(self.row(i));
            aug.push(b[i]);
        }
        let pivots = row_echelon(&mut aug, r, w, c, tol);
        if pivots.len() != c {
            return None;
        }
        // rows beyond the rank must be consistent
        for i in pivots.len()..r {
            if aug[i * w + c].abs() > tol {
                return None;
            }
        }
        let mut x = vec![0.0; c];
        for (row, &col) in pivots.iter().enumerate().rev() {
            let mut acc = aug[row * w + c];
            for j in col + 1..c {
                acc -= aug[row * w + j] * x[j];
            }
            x[col] = acc / aug[row * w + col];
        }
        Some(x)
    }
}

/// Reduce the first `pivot_cols` columns of a row-major `rows × width` buffer
/// to row-echelon form. Returns the pivot columns in row order.
fn row_echelon(a: &mut [f64], rows: usize, width: usize, pivot_cols: usize, tol: f64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows {
            break;
        }
        let (best, best_val) = (r..rows)
            .map(|i| (i, a[i * width + c].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_val <= tol {
            continue;
        }
        if best != r {
            for j in 0..width {
                a.swap(r * width + j, best * width + j);
            }
        }
        let p = a[r * width + c];
        for i in r + 1..rows {
            let f = a[i * width + c] / p;
            if f != 0.0 {
                for j in c..width {
                    a[i * width + j] -= f * a[r * width + j];
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

impl Serialize for RealMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RealMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        RealMatrix::from_rows(&rows).map_err(de::Error::custom)
    }
}

/// Real square matrices in the repo-wide `{"n", "entries"}` encoding.
pub mod square_json {
    use super::*;

    pub fn serialize<S: Serializer>(m: &RealMatrix, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Matrix", 2)?;
        st.serialize_field("n", &m.rows)?;
        st.serialize_field("entries", &m.data)?;
        st.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> std::result::Result<RealMatrix, D::Error> {
        let c = ComplexMatrix::deserialize(deserializer)?;
        real_from_complex(&c).map_err(de::Error::custom)
    }

    pub fn real_from_complex(c: &ComplexMatrix) -> Result<RealMatrix> {
        if c.max_imag() > 0.0 {
            return Err(Error::Input("expected a real matrix but found imaginary parts".into()));
        }
        Ok(c.real_part())
    }
}

/// Entrywise (Schur) product.
pub fn schur_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { expected: a.n, found: b.n });
    }
    Ok(ComplexMatrix { n: a.n, data: a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect() })
}

/// Kronecker product; `(A ⊗ B)[(i·nb + k), (j·nb + l)] = a_ij · b_kl`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let nb = b.n;
    ComplexMatrix::from_fn(a.n * nb, |r, c| a.get(r / nb, c / nb) * b.get(r % nb, c % nb))
}

/// Unitary Fourier matrix with `(j, k)` entry `n^{-1/2} e^{2πi jk / n}` (0-based).
pub fn fourier_matrix(n: usize) -> ComplexMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, |j, k| {
        // reduce the exponent first so large n keeps full accuracy
        let e = ((j * k) % n) as f64;
        C64::from_polar(scale, 2.0 * std::f64::consts::PI * e / n as f64)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureFlags {
    pub hermitian: bool,
    pub unitary: bool,
    pub hermitian_unitary: bool,
    pub positive_semidefinite: bool,
    pub tolerance_used: f64,
}

pub fn classify(a: &ComplexMatrix, tol: f64) -> StructureFlags {
    let hermitian = a.hermitian_deviation() <= tol;
    let unitary = a.unitary_deviation() <= tol;
    let positive_semidefinite = hermitian
        && hermitian_eig(a).map(|s| s.eigenvalues.last().copied().unwrap_or(0.0) >= -tol).unwrap_or(false);
    StructureFlags {
        hermitian,
        unitary,
        hermitian_unitary: hermitian && unitary,
        positive_semidefinite,
        tolerance_used: tol,
    }
}

/// Eigen-decomposition `H = V diag(λ) V*` with eigenvalues nonincreasing.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let d = ComplexMatrix::diag(&self.eigenvalues.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        &(v * &d) * &v.adjoint()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Hermitian eigensolver (cyclic complex Jacobi).
///
/// Each eigenvector's first component with modulus above `1e-10` is made real
/// and positive so identical inputs give identical outputs.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<Spectrum> {
    let n = h.n;
    let deviation = h.hermitian_deviation();
    if deviation > HERMITIAN_INPUT_TOL * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let mut a = ComplexMatrix::from_fn(n, |i, j| (h.get(i, j) + h.get(j, i).conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_OFF_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut a, &mut v, p, q, scale);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a.get(y, y).re.total_cmp(&a.get(x, x).re));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a.get(k, k).re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        let phase = (0..n)
            .map(|i| v.get(i, k))
            .find(|z| z.norm() > 1e-10)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(C64::new(1.0, 0.0));
        for i in 0..n {
            eigenvectors.set(i, col, v.get(i, k) * phase);
        }
    }
    Ok(Spectrum { eigenvalues, eigenvectors })
}

fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, scale: f64) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r <= 1e-300 || r <= f64::EPSILON * 1e-3 * scale {
        return;
    }
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    // phase e^{-iα} turns a_pq real, then a real symmetric rotation zeroes it
    let phase = apq.conj() / r;
    let zeta = (aqq - app) / (2.0 * r);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let j_pp = C64::new(c, 0.0);
    let j_pq = C64::new(s, 0.0);
    let j_qp = phase * (-s);
    let j_qq = phase * c;
    let n = a.n;
    // A <- A J, V <- V J
    for m in [&mut *a, &mut *v] {
        for k in 0..n {
            let kp = m.get(k, p);
            let kq = m.get(k, q);
            m.set(k, p, kp * j_pp + kq * j_qp);
            m.set(k, q, kp * j_pq + kq * j_qq);
        }
    }
    // A <- J* A
    for k in 0..n {
        let pk = a.get(p, k);
        let qk = a.get(q, k);
        a.set(p, k, j_pp.conj() * pk + j_qp.conj() * qk);
        a.set(q, k, j_pq.conj() * pk + j_qq.conj() * qk);
    }
    a.set(p, q, C64::new(0.0, 0.0));
    a.set(q, p, C64::new(0.0, 0.0));
    let dp = a.get(p, p).re;
    let dq = a.get(q, q).re;
    a.set(p, p, C64::new(dp, 0.0));
    a.set(q, q, C64::new(dq, 0.0));
}

/// The crate's random generator: ChaCha8 keyed by a 64-bit seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Split a base seed into independent per-index seeds (SplitMix64 finaliser).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Haar-distributed unitary.
///
/// Gram–Schmidt (with one re-orthogonalisation pass) of a complex Ginibre
/// matrix; the implied triangular factor has a positive real diagonal, which
/// is the phase correction that makes the result unitarily invariant.
pub fn random_unitary(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = seeded_rng(seed);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut col: Vec<C64> = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                C64::new(re * inv_sqrt2, im * inv_sqrt2)
            })
            .collect();
        for _pass in 0..2 {
            for q in &cols {
                let proj: C64 = q.iter().zip(&col).map(|(a, b)| a.conj() * b).sum();
                for (c, a) in col.iter_mut().zip(q) {
                    *c -= proj * a;
                }
            }
        }
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for c in &mut col {
            *c /= norm;
        }
        cols.push(col);
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

/// Random Hermitian matrix with entries of order one (test and sampling helper).
pub fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = seeded_rng(seed);
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        let d: f64 = StandardNormal.sample(&mut rng);
        m.set(i, i, C64::new(d, 0.0));
        for j in i + 1..n {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            m.set(i, j, C64::new(re, im));
            m.set(j, i, C64::new(re, -im));
        }
    }
    m
}
