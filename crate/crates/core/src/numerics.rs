//! Dense least squares and quadrature shared by the solvers.
//!
//! Least-squares problems are solved with a Householder QR factorization
//! with column pivoting. Pivot magnitudes below [`RANK_TOLERANCE`] times the
//! leading pivot count as zero; any such pivot makes the system rank
//! deficient and the solve fails instead of returning a minimum-norm answer.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative pivot threshold for numerical rank.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Field element usable by the factorization: `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + 'static
{
    fn zero() -> Self;
    fn from_real(re: f64) -> Self;
    fn conj(self) -> Self;
    fn modulus(self) -> f64;
    fn norm_sqr(self) -> f64;
    fn is_finite(self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_real(re: f64) -> Self {
        re
    }
    fn conj(self) -> Self {
        self
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(re: f64) -> Self {
        Complex64::new(re, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
}

/// Dense column-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type ComplexMatrix = Matrix<Complex64>;
pub type RealMatrix = Matrix<f64>;

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from its columns; all columns must share one length.
    pub fn from_columns(columns: &[Vec<T>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::invalid("columns have unequal lengths"));
        }
        let data = columns.iter().flatten().copied().collect();
        Ok(Self {
            rows,
            cols: columns.len(),
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[j * self.rows + i] = v;
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Submatrix made of the listed columns, in the listed order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &j in idx {
            data.extend_from_slice(self.column(j));
        }
        Self {
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols, "mul_vec dimension mismatch");
        let mut out = vec![T::zero(); self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj == T::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.column(j)) {
                *o += a * xj;
            }
        }
        out
    }

    /// `Aᴴ v`.
    pub fn adjoint_mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows, "adjoint_mul_vec dimension mismatch");
        (0..self.cols)
            .map(|j| dot_conj(self.column(j), v))
            .collect()
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        norm2(self.column(j))
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// `Σ conj(a_i) b_i`.
pub fn dot_conj<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + x.conj() * y)
}

pub fn norm2<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Elementwise `a − b`.
pub fn sub_vec<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

/// Householder QR with column pivoting, `A P = Q R`.
#[derive(Debug, Clone)]
pub struct PivotedQr<T> {
    /// Upper triangle holds R; reflectors are kept separately.
    r: Matrix<T>,
    reflectors: Vec<Option<Vec<T>>>,
    perm: Vec<usize>,
    rank: usize,
}

impl<T: Scalar> PivotedQr<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        let (m, n) = (a.rows(), a.cols());
        if m == 0 || n == 0 {
            return Err(Error::invalid("empty matrix in QR"));
        }
        if !a.is_finite() {
            return Err(Error::invalid("non-finite matrix entry in QR"));
        }
        let mut r = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let steps = m.min(n);
        let mut reflectors = Vec::with_capacity(steps);

        for k in 0..steps {
            // Pivot on the largest remaining column norm; lowest index on ties.
            let mut best = k;
            let mut best_norm = -1.0;
            for j in k..n {
                let s: f64 = r.column(j)[k..].iter().map(|v| v.norm_sqr()).sum();
                if s > best_norm {
                    best_norm = s;
                    best = j;
                }
            }
            if best != k {
                for i in 0..m {
                    let tmp = r.get(i, k);
                    r.set(i, k, r.get(i, best));
                    r.set(i, best, tmp);
                }
                perm.swap(k, best);
            }

            let sigma = best_norm.max(0.0).sqrt();
            if sigma == 0.0 {
                reflectors.push(None);
                continue;
            }
            let x0 = r.get(k, k);
            let x0_abs = x0.modulus();
            let phase = if x0_abs == 0.0 {
                T::from_real(1.0)
            } else {
                x0 / T::from_real(x0_abs)
            };
            let alpha = -(phase * T::from_real(sigma));
            let mut v: Vec<T> = r.column(k)[k..].to_vec();
            v[0] -= alpha;
            let vnorm_sqr: f64 = v.iter().map(|x| x.norm_sqr()).sum();
            if vnorm_sqr == 0.0 {
                reflectors.push(None);
                continue;
            }
            let scale = T::from_real(2.0 / vnorm_sqr);
            for j in k..n {
                let col = &mut r.column_mut(j)[k..];
                let f = dot_conj(&v, col) * scale;
                for (c, &vi) in col.iter_mut().zip(&v) {
                    *c -= vi * f;
                }
            }
            // Exact zeros below the diagonal.
            r.set(k, k, alpha);
            for i in k + 1..m {
                r.set(i, k, T::zero());
            }
            reflectors.push(Some(v));
        }

        let lead = r.get(0, 0).modulus();
        let rank = if lead == 0.0 {
            0
        } else {
            (0..steps)
                .take_while(|&k| r.get(k, k).modulus() > RANK_TOLERANCE * lead)
                .count()
        };

        Ok(Self {
            r,
            reflectors,
            perm,
            rank,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Diagonal of R in pivot order.
    pub fn r_diagonal(&self) -> Vec<T> {
        (0..self.r.rows().min(self.r.cols()))
            .map(|k| self.r.get(k, k))
            .collect()
    }

    /// Applies `Qᴴ` to `b` in place.
    fn apply_qh(&self, b: &mut [T]) {
        for (k, refl) in self.reflectors.iter().enumerate() {
            if let Some(v) = refl {
                let vnorm_sqr: f64 = v.iter().map(|x| x.norm_sqr()).sum();
                let f = dot_conj(v, &b[k..]) * T::from_real(2.0 / vnorm_sqr);
                for (bi, &vi) in b[k..].iter_mut().zip(v) {
                    *bi -= vi * f;
                }
            }
        }
    }

    /// Least-squares solution of `A x ≈ b`; requires full column rank.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let (m, n) = (self.r.rows(), self.r.cols());
        if b.len() != m {
            return Err(Error::invalid(format!(
                "right-hand side has length {}, expected {m}",
                b.len()
            )));
        }
        if self.rank < n {
            return Err(Error::RankDeficient {
                rank: self.rank,
                cols: n,
            });
        }
        let mut qb = b.to_vec();
        self.apply_qh(&mut qb);
        let mut z = vec![T::zero(); n];
        for k in (0..n).rev() {
            let mut s = qb[k];
            for j in k + 1..n {
                s -= self.r.get(k, j) * z[j];
            }
            z[k] = s / self.r.get(k, k);
        }
        let mut x = vec![T::zero(); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = z[k];
        }
        Ok(x)
    }
}

/// `argmin ‖b − A f‖₂` over complex `f`.
pub fn lstsq_complex(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    if a.rows() < a.cols() {
        return Err(Error::invalid(format!(
            "underdetermined least squares: {} rows < {} columns",
            a.rows(),
            a.cols()
        )));
    }
    PivotedQr::new(a)?.solve(b)
}

/// `argmin ‖b − A η‖₂` over REAL `η`, solved as the stacked real system
/// `[Re A; Im A] η ≈ [Re b; Im b]`.
pub fn lstsq_real_constrained(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<f64>> {
    let (m, p) = (a.rows(), a.cols());
    if m == 0 || p == 0 {
        return Err(Error::invalid("empty system"));
    }
    if b.len() != m {
        return Err(Error::invalid("right-hand side length mismatch"));
    }
    let stacked = RealMatrix::from_fn(2 * m, p, |i, j| {
        if i < m {
            a.get(i, j).re
        } else {
            a.get(i - m, j).im
        }
    });
    let rhs: Vec<f64> = b
        .iter()
        .map(|v| v.re)
        .chain(b.iter().map(|v| v.im))
        .collect();
    if stacked.rows() < p {
        return Err(Error::invalid("underdetermined real least squares"));
    }
    PivotedQr::new(&stacked)?.solve(&rhs)
}

/// Composite trapezoidal rule over ordered abscissae `x`.
pub fn trapezoid(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(
            "trapezoid: abscissae and values differ in length",
        ));
    }
    if x.len() < 2 {
        return Err(Error::invalid("trapezoid needs at least 2 samples"));
    }
    Ok(x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum())
}
