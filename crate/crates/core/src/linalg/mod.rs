//! Small dense linear algebra over `f64` and over jets.
//!
//! Everything here works on matrices of at most a few dozen rows, so the
//! routines favour accuracy and determinism over blocking or vectorisation.

mod eigen;
mod jet_vec;
mod mgs;

use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

use crate::jet::JetError;

pub(crate) use eigen::canonical_sign;
pub use eigen::{rank_positive, sym_eigen, SymEigen};
pub use jet_vec::JetVec;
pub use mgs::{mgs_pivoted, mgs_pivoted_jets, mgs_pivoted_jets_graded, JetFrame, MgsOutcome};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix asymmetry {asymmetry:e} exceeds {allowed:e}")]
    Asymmetric { asymmetry: f64, allowed: f64 },
    #[error("singular linear system")]
    Singular,
    #[error("rank tolerance must lie in (0, 1), got {0}")]
    BadTolerance(f64),
    #[error("degenerate frame field: {0}")]
    DegenerateFrame(#[from] JetError),
}

/// Relative threshold used for every rank decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankTolerance(f64);

impl RankTolerance {
    pub const DEFAULT: f64 = 1e-8;

    pub fn new(rel_tol: f64) -> Result<Self, LinalgError> {
        if rel_tol > 0.0 && rel_tol < 1.0 {
            Ok(Self(rel_tol))
        } else {
            Err(LinalgError::BadTolerance(rel_tol))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// True when `quantity` lies within a factor of ten of `threshold`.
    pub fn near_threshold(quantity: f64, threshold: f64) -> bool {
        threshold > 0.0 && quantity > threshold / 10.0 && quantity < threshold * 10.0
    }
}

impl Default for RankTolerance {
    fn default() -> Self {
        Self(Self::DEFAULT)
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Matrix whose columns are `columns`, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(LinalgError::DimensionMismatch {
                    expected: rows,
                    got: c.len(),
                });
            }
            for (i, &x) in c.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// Adds `w w^T` in place.
    pub fn add_outer(&mut self, w: &[f64]) {
        debug_assert_eq!(self.rows, w.len());
        debug_assert_eq!(self.cols, w.len());
        for i in 0..self.rows {
            for j in 0..self.cols {
                self[(i, j)] += w[i] * w[j];
            }
        }
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn check_basis_dims(v: &[f64], basis: &[Vec<f64>]) -> Result<(), LinalgError> {
    match basis.iter().find(|b| b.len() != v.len()) {
        Some(b) => Err(LinalgError::DimensionMismatch {
            expected: v.len(),
            got: b.len(),
        }),
        None => Ok(()),
    }
}

/// `sum_i (v . b_i) b_i` for an orthonormal `basis`.
pub fn project_onto(v: &[f64], basis: &[Vec<f64>]) -> Result<Vec<f64>, LinalgError> {
    check_basis_dims(v, basis)?;
    let mut out = vec![0.0; v.len()];
    for b in basis {
        let c = dot(v, b);
        for (o, x) in out.iter_mut().zip(b) {
            *o += c * x;
        }
    }
    Ok(out)
}

/// `v - project_onto(v, basis)`, applied one basis vector at a time.
pub fn project_off(v: &[f64], basis: &[Vec<f64>]) -> Result<Vec<f64>, LinalgError> {
    check_basis_dims(v, basis)?;
    let mut out = v.to_vec();
    for b in basis {
        let c = dot(&out, b);
        for (o, x) in out.iter_mut().zip(b) {
            *o -= c * x;
        }
    }
    Ok(out)
}

/// Orthogonal projector onto the span of an orthonormal basis.
pub fn projector(dim: usize, basis: &[Vec<f64>]) -> Result<Mat, LinalgError> {
    let mut p = Mat::zeros(dim, dim);
    for b in basis {
        if b.len() != dim {
            return Err(LinalgError::DimensionMismatch {
                expected: dim,
                got: b.len(),
            });
        }
        p.add_outer(b);
    }
    Ok(p)
}

/// Frobenius distance between the orthogonal projectors onto two spans.
///
/// Both lists must be orthonormal; empty lists are allowed when `dim` is
/// given through the other list, and two empty lists are at distance zero.
pub fn span_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64, LinalgError> {
    let dim = match (a.first(), b.first()) {
        (Some(x), _) => x.len(),
        (None, Some(y)) => y.len(),
        (None, None) => return Ok(0.0),
    };
    let pa = projector(dim, a)?;
    let pb = projector(dim, b)?;
    Ok(pa.sub(&pb)?.norm_frobenius())
}

/// Orthonormal basis of the orthogonal complement of `basis` in `R^dim`.
///
/// Pivoted Gram-Schmidt over the coordinate axes, keeping exactly
/// `dim - basis.len()` directions.
pub fn orthonormal_complement(
    dim: usize,
    basis: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>, LinalgError> {
    let wanted = dim.saturating_sub(basis.len());
    let axes: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            e
        })
        .collect();
    // The axes have unit norm, so any surviving residual is far above this.
    let tol = RankTolerance::new(1e-6)?;
    let outcome = mgs_pivoted(&axes, basis, tol)?;
    let mut out = outcome.basis;
    out.truncate(wanted);
    Ok(out)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &Mat, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))
            .expect("non-empty range");
        if m[(pivot, col)].abs() <= 1e-14 * scale {
            return Err(LinalgError::Singular);
        }
        if pivot != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(pivot, j)];
                m[(pivot, j)] = tmp;
            }
            x.swap(col, pivot);
        }
        for i in col + 1..n {
            let f = m[(i, col)] / m[(col, col)];
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                m[(i, j)] -= f * m[(col, j)];
            }
            x[i] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for j in col + 1..n {
            acc -= m[(col, j)] * x[j];
        }
        x[col] = acc / m[(col, col)];
    }
    Ok(x)
}

/// Max-entry deviation of `B^T B` from the identity.
pub fn orthonormality_defect(basis: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(a, b) - target).abs());
        }
    }
    worst
}
