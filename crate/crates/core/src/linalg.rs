//! Dense complex linear algebra.
//!
//! Everything in this crate is carried by [`ComplexMatrix`]: square, row-major, `Complex64`
//! entries. Dimensions stay small (the three-fold tensor space of an `N = 8` braid matrix is
//! 512 wide), so there is no sparse format. Products skip zero entries of the left operand,
//! which is where the sparsity of projector sums pays off.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

/// Largest side length [`kron`] will produce.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Above this 1-norm [`matrix_exponential`] refuses to run.
pub const EXPM_MAX_NORM: f64 = 1024.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("entry count {len} does not match dim {dim} (expected {expected})")]
    LengthMismatch {
        dim: usize,
        len: usize,
        expected: usize,
    },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("result dimension {dim} exceeds limit {max}")]
    SizeLimit { dim: usize, max: usize },
    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },
    #[error("1-norm {norm:e} exceeds the accuracy limit {max:e} for the exponential")]
    NormTooLarge { norm: f64, max: f64 },
    #[error("vector of length {len} cannot be reshaped to {rows}x{cols}")]
    ReshapeMismatch {
        len: usize,
        rows: usize,
        cols: usize,
    },
}

pub type Result<T> = std::result::Result<T, LinalgError>;

fn check_finite(entries: &[C64]) -> Result<()> {
    match entries
        .iter()
        .position(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        Some(index) => Err(LinalgError::NonFinite { index }),
        None => Ok(()),
    }
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

/// Wire form: `{"dim": d, "entries": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = LinalgError;

    fn try_from(value: MatrixJson) -> Result<Self> {
        let entries = value
            .entries
            .into_iter()
            .map(|[re, im]| C64::new(re, im))
            .collect();
        ComplexMatrix::new(value.dim, entries)
    }
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        MatrixJson {
            dim: m.dim,
            entries: m.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let z = self[(r, c)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.entries[r * self.dim + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.entries[r * self.dim + c]
    }
}

impl ComplexMatrix {
    /// Validating constructor: `entries.len() == dim²`, all entries finite.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(LinalgError::ZeroDimension);
        }
        if entries.len() != dim * dim {
            return Err(LinalgError::LengthMismatch {
                dim,
                len: entries.len(),
                expected: dim * dim,
            });
        }
        check_finite(&entries)?;
        Ok(ComplexMatrix { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        ComplexMatrix {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = d;
        }
        m
    }

    /// Builds a matrix from a zero-based `(row, col)` closure.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn is_finite(&self) -> bool {
        check_finite(&self.entries).is_ok()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest |imaginary part| over all entries.
    pub fn max_imag(&self) -> f64 {
        self.entries.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.dim)
            .map(|c| (0..self.dim).map(|r| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn count_nonzero(&self, tol: f64) -> usize {
        self.entries.iter().filter(|z| z.norm() > tol).count()
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: C64, other: &Self) -> Result<()> {
        same_dim(self, other)?;
        for (a, &b) in self.entries.iter_mut().zip(&other.entries) {
            *a += s * b;
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        same_dim(self, other)?;
        Ok(ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if v.dim() != self.dim {
            return Err(LinalgError::DimensionMismatch {
                left: self.dim,
                right: v.dim(),
            });
        }
        let out = (0..self.dim)
            .map(|r| {
                (0..self.dim)
                    .map(|c| self[(r, c)] * v.entries()[c])
                    .sum::<C64>()
            })
            .collect();
        ComplexVector::new(out)
    }
}

fn same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(LinalgError::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    Ok(())
}

/// Kronecker product with the default size limit.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_with_limit(a, b, DEFAULT_MAX_DIM)
}

/// Entry `(i*db + k, j*db + l)` of the result is `a(i,j) * b(k,l)`.
pub fn kron_with_limit(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    max_dim: usize,
) -> Result<ComplexMatrix> {
    let dim = a
        .dim
        .checked_mul(b.dim)
        .filter(|&d| d <= max_dim)
        .ok_or(LinalgError::SizeLimit {
            dim: a.dim.saturating_mul(b.dim),
            max: max_dim,
        })?;
    let db = b.dim;
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..a.dim {
        for j in 0..a.dim {
            let s = a[(i, j)];
            if s == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = s * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Standard product. Each output entry accumulates over the inner index in increasing order;
/// zero entries of `a` contribute nothing and are skipped.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    same_dim(a, b)?;
    let n = a.dim;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        let row = &mut out.entries[i * n..(i + 1) * n];
        for k in 0..n {
            let s = a.entries[i * n + k];
            if s == C64::new(0.0, 0.0) {
                continue;
            }
            let brow = &b.entries[k * n..(k + 1) * n];
            for (o, &x) in row.iter_mut().zip(brow) {
                *o += s * x;
            }
        }
    }
    check_finite(&out.entries)?;
    Ok(out)
}

/// Conjugate transpose.
pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.dim, |r, c| a[(c, r)].conj())
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    same_dim(a, b)?;
    Ok(a.entries
        .iter()
        .zip(&b.entries)
        .map(|(&x, &y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// `max_abs_diff(a, b) / max(1, max|a|, max|b|)`.
pub fn normalized_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let d = max_abs_diff(a, b)?;
    Ok(d / a.max_abs().max(b.max_abs()).max(1.0))
}

/// `e^A` by scaling and squaring around a truncated Taylor kernel.
///
/// `A` is scaled by `2^-s` until its 1-norm is at most 1/2, the series is summed until the
/// next term falls below 2^-60 of the partial sum, and the result is squared `s` times.
pub fn matrix_exponential(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_finite(&a.entries)?;
    let norm = a.norm_one();
    if norm > EXPM_MAX_NORM {
        return Err(LinalgError::NormTooLarge {
            norm,
            max: EXPM_MAX_NORM,
        });
    }
    let mut squarings = 0u32;
    while norm / 2f64.powi(squarings as i32) > 0.5 {
        squarings += 1;
    }
    let scaled = a.scale_real(2f64.powi(-(squarings as i32)));

    let mut sum = ComplexMatrix::identity(a.dim);
    let mut term = ComplexMatrix::identity(a.dim);
    for k in 1..=40 {
        term = matmul(&term, &scaled)?.scale_real(1.0 / k as f64);
        sum.add_scaled(C64::new(1.0, 0.0), &term)?;
        if term.norm_one() <= f64::EPSILON * 2f64.powi(-8) * sum.norm_one() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum)?;
    }
    Ok(sum)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(a: &ComplexMatrix) -> C64 {
    let n = a.dim;
    let mut m = a.entries.clone();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[x * n + col].norm().total_cmp(&m[y * n + col].norm()))
            .expect("non-empty range");
        let p = m[pivot * n + col];
        if p == C64::new(0.0, 0.0) {
            return C64::new(0.0, 0.0);
        }
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        det *= p;
        for r in (col + 1)..n {
            let f = m[r * n + col] / p;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for k in col..n {
                let v = m[col * n + k];
                m[r * n + k] -= f * v;
            }
        }
    }
    det
}

/// Complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<C64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(LinalgError::ZeroDimension);
        }
        check_finite(&entries)?;
        Ok(ComplexVector { entries })
    }

    /// Standard basis vector `e_k` (zero-based) of length `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dim {dim}");
        let mut entries = vec![C64::new(0.0, 0.0); dim];
        entries[k] = C64::new(1.0, 0.0);
        ComplexVector { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Tensor product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let entries = self
            .entries
            .iter()
            .flat_map(|&a| other.entries.iter().map(move |&b| a * b))
            .collect();
        ComplexVector { entries }
    }
}

/// Singular values, descending, of the `dim_a × dim_b` reshape of `v`
/// (entry `(a, b)` is `v[a * dim_b + b]`).
///
/// One-sided Jacobi: columns are rotated pairwise until mutually orthogonal, and the
/// singular values are the final column norms.
pub fn schmidt_decompose(v: &ComplexVector, dim_a: usize, dim_b: usize) -> Result<Vec<f64>> {
    if dim_a == 0 || dim_b == 0 || v.dim() != dim_a * dim_b {
        return Err(LinalgError::ReshapeMismatch {
            len: v.dim(),
            rows: dim_a,
            cols: dim_b,
        });
    }
    // Orient so that the number of columns is min(dim_a, dim_b).
    let (rows, cols) = (dim_a.max(dim_b), dim_a.min(dim_b));
    let mut columns: Vec<Vec<C64>> = (0..cols)
        .map(|c| {
            (0..rows)
                .map(|r| {
                    if dim_b <= dim_a {
                        v.entries()[r * dim_b + c]
                    } else {
                        v.entries()[c * dim_b + r]
                    }
                })
                .collect()
        })
        .collect();

    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha: f64 = columns[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = columns[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = columns[p]
                    .iter()
                    .zip(&columns[q])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                // Rotate the phase out of column q, then apply a real Jacobi rotation.
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..rows {
                    let x = columns[p][r];
                    let y = columns[q][r] * phase;
                    columns[p][r] = x * c - y * s;
                    columns[q][r] = x * s + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut values: Vec<f64> = columns
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}
