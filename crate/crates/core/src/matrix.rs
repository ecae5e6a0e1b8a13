//! Dense matrices over an arbitrary commutative ring, with the exact
//! kernels the rest of the crate relies on: polynomial determinants,
//! exact rank over the rationals, and small numeric inverses.

use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::traits::{One, Zero};
use thiserror::Error;

use crate::poly::{rat_to_f64, MPoly, Rat};
use crate::vars::VarId;
use crate::C64;

/// Ring scalar: the common bound for exact rationals, complex doubles
/// and polynomials.
pub trait Ring:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// Field scalar with a crude magnitude, used for pivot selection. The
/// magnitude never influences exact results, only the choice of pivot.
pub trait FieldScalar: Ring + Div<Output = Self> {
    fn magnitude(&self) -> f64;
}

impl FieldScalar for Rat {
    fn magnitude(&self) -> f64 {
        rat_to_f64(self).abs()
    }
}

impl FieldScalar for C64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatError {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch")]
    DimMismatch,
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Mat<T> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat<T> {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Ring>(&self, mut f: impl FnMut(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| f(x)).collect(),
        }
    }

    pub fn add(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + other[(i, j)].clone()
        })
    }

    pub fn sub(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - other[(i, j)].clone()
        })
    }

    pub fn neg(&self) -> Mat<T> {
        self.map(|x| -x.clone())
    }

    pub fn mul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out: Mat<T> = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let term = a.clone() * other[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + term;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.cols {
                    acc = acc + self[(i, j)].clone() * v[j].clone();
                }
                acc
            })
            .collect()
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self[(i, j)] != self[(j, i)] {
                    return false;
                }
            }
        }
        true
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.rows, other.rows);
        Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    /// The `n x n` block with top-left corner at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat<T> {
        Mat::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    /// Rows and columns restricted to the given index sets.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Mat<T> {
        Mat::from_fn(rows.len(), cols.len(), |i, j| {
            self[(rows[i], cols[j])].clone()
        })
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Exact determinant of a polynomial matrix: cofactor expansion up to
/// 3x3, Bareiss fraction-free elimination beyond.
pub fn poly_det(m: &Mat<MPoly>) -> Result<MPoly, MatError> {
    if !m.is_square() {
        return Err(MatError::NonSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    Ok(match m.rows {
        0 => MPoly::int(1),
        1 => m[(0, 0)].clone(),
        2 => m[(0, 0)].clone() * m[(1, 1)].clone() - m[(0, 1)].clone() * m[(1, 0)].clone(),
        3 => det3(m),
        _ => bareiss_det(m),
    })
}

fn det3(m: &Mat<MPoly>) -> MPoly {
    let minor = |r: usize, c: usize| {
        let rs: Vec<usize> = (0..3).filter(|&i| i != r).collect();
        let cs: Vec<usize> = (0..3).filter(|&j| j != c).collect();
        m[(rs[0], cs[0])].clone() * m[(rs[1], cs[1])].clone()
            - m[(rs[0], cs[1])].clone() * m[(rs[1], cs[0])].clone()
    };
    m[(0, 0)].clone() * minor(0, 0) - m[(0, 1)].clone() * minor(0, 1)
        + m[(0, 2)].clone() * minor(0, 2)
}

fn bareiss_det(m: &Mat<MPoly>) -> MPoly {
    let n = m.rows;
    let mut a = m.clone();
    let mut sign = false;
    let mut prev = MPoly::int(1);
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&r| !a[(r, k)].is_zero()) {
                Some(r) => {
                    for j in 0..n {
                        let tmp = a[(k, j)].clone();
                        a[(k, j)] = a[(r, j)].clone();
                        a[(r, j)] = tmp;
                    }
                    sign = !sign;
                }
                None => return MPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[(i, j)].clone() * a[(k, k)].clone()
                    - a[(i, k)].clone() * a[(k, j)].clone();
                a[(i, j)] = num
                    .div_exact(&prev)
                    .expect("Bareiss pivot divides exactly");
            }
            a[(i, k)] = MPoly::zero();
        }
        prev = a[(k, k)].clone();
    }
    let det = a[(n - 1, n - 1)].clone();
    if sign {
        -det
    } else {
        det
    }
}

/// Exact rank over the rationals. No tolerances anywhere.
pub fn exact_rank(m: &Mat<Rat>) -> usize {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut rank = 0;
    let mut col = 0;
    while rank < rows && col < cols {
        let pivot = (rank..rows).find(|&r| !a[(r, col)].is_zero());
        let Some(p) = pivot else {
            col += 1;
            continue;
        };
        if p != rank {
            for j in col..cols {
                let tmp = a[(rank, j)].clone();
                a[(rank, j)] = a[(p, j)].clone();
                a[(p, j)] = tmp;
            }
        }
        for r in rank + 1..rows {
            if a[(r, col)].is_zero() {
                continue;
            }
            let factor = a[(r, col)].clone() / a[(rank, col)].clone();
            for j in col..cols {
                let sub = factor.clone() * a[(rank, j)].clone();
                a[(r, j)] = a[(r, j)].clone() - sub;
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

/// Inverse over a field, Gaussian elimination with partial pivoting by
/// magnitude.
pub fn field_inverse<T: FieldScalar>(m: &Mat<T>) -> Result<Mat<T>, MatError> {
    if !m.is_square() {
        return Err(MatError::NonSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut inv = Mat::<T>::identity(n);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&r, &s| {
                a[(r, k)]
                    .magnitude()
                    .partial_cmp(&a[(s, k)].magnitude())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if a[(p, k)].is_zero() {
            return Err(MatError::Singular);
        }
        if p != k {
            for j in 0..n {
                let t = a[(k, j)].clone();
                a[(k, j)] = a[(p, j)].clone();
                a[(p, j)] = t;
                let t = inv[(k, j)].clone();
                inv[(k, j)] = inv[(p, j)].clone();
                inv[(p, j)] = t;
            }
        }
        let piv = a[(k, k)].clone();
        for j in 0..n {
            a[(k, j)] = a[(k, j)].clone() / piv.clone();
            inv[(k, j)] = inv[(k, j)].clone() / piv.clone();
        }
        for r in 0..n {
            if r == k || a[(r, k)].is_zero() {
                continue;
            }
            let f = a[(r, k)].clone();
            for j in 0..n {
                let s = f.clone() * a[(k, j)].clone();
                a[(r, j)] = a[(r, j)].clone() - s;
                let s = f.clone() * inv[(k, j)].clone();
                inv[(r, j)] = inv[(r, j)].clone() - s;
            }
        }
    }
    Ok(inv)
}

/// Frobenius norm of a complex matrix.
pub fn frobenius(m: &Mat<C64>) -> f64 {
    m.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Entrywise maximum modulus.
pub fn max_abs(m: &Mat<C64>) -> f64 {
    m.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Evaluate a polynomial matrix at a rational point.
pub fn eval_mat_rat(m: &Mat<MPoly>, values: &BTreeMap<VarId, Rat>) -> Mat<Rat> {
    m.map(|p| p.eval_rat(values))
}
