//! Exact integer and rational linear algebra.
//!
//! Everything here is dense and arbitrary precision. The matrices that show
//! up in this crate are tiny (a handful of rows and columns), so the
//! algorithms favour clarity over asymptotics.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
pub type Rat = BigRational;

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<Rat>;

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = (0..self.rows)
            .map(|i| &self.data[i * self.cols..(i + 1) * self.cols])
            .collect();
        f.debug_struct("Matrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("data", &rows)
            .finish()
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

impl<T> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
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

    /// Row-major entries.
    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        })
    }

    /// Columns `start..end` as a new matrix.
    pub fn column_block(&self, start: usize, end: usize) -> Self {
        let mut data = Vec::with_capacity(self.rows * (end - start));
        for i in 0..self.rows {
            data.extend_from_slice(&self.row(i)[start..end]);
        }
        Matrix {
            rows: self.rows,
            cols: end - start,
            data,
        }
    }
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// `diag(block, block, ..., block)` with `copies` copies.
    pub fn block_diag(block: &Self, copies: usize) -> Self {
        let mut out = Self::zeros(block.rows * copies, block.cols * copies);
        for k in 0..copies {
            for i in 0..block.rows {
                for j in 0..block.cols {
                    out[(k * block.rows + i, k * block.cols + j)] = block[(i, j)].clone();
                }
            }
        }
        out
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        Self::scalar(n, T::one())
    }

    pub fn scalar(n: usize, value: T) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = value.clone();
        }
        m
    }
}

impl<T: Clone + Zero + PartialEq> Matrix<T> {
    /// `Some(λ)` when the matrix equals `λ·I`.
    pub fn scalar_value(&self) -> Option<T> {
        if !self.is_square() {
            return None;
        }
        if self.rows == 0 {
            return None;
        }
        let lambda = self[(0, 0)].clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expected = if i == j { &lambda } else { &T::zero() };
                if &self[(i, j)] != expected {
                    return None;
                }
            }
        }
        Some(lambda)
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T>,
{
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, x)| acc + a.clone() * x.clone())
            })
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }
}

impl<T: Clone + Neg<Output = T>> Neg for &Matrix<T> {
    type Output = Matrix<T>;

    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl IntMatrix {
    /// Build from machine integers; mostly a convenience for tests and presets.
    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn to_rat(&self) -> RatMatrix {
        self.map(|x| Rat::from_integer(x.clone()))
    }
}

/// Reduced row echelon form over Q together with the pivot columns.
pub fn rref(m: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&i| !a[(i, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(row, p);
        let inv = a[(row, col)].recip();
        for j in col..a.cols {
            let v = &a[(row, j)] * &inv;
            a[(row, j)] = v;
        }
        for i in 0..a.rows {
            if i == row || a[(i, col)].is_zero() {
                continue;
            }
            let factor = a[(i, col)].clone();
            for j in col..a.cols {
                let v = &a[(i, j)] - &factor * &a[(row, j)];
                a[(i, j)] = v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

/// Rank over Q.
pub fn rank(m: &RatMatrix) -> usize {
    rref(m).1.len()
}

/// Express `v` as a rational combination of `basis`.
///
/// Returns the coefficient vector (one entry per basis vector) or `None`
/// when `v` lies outside the span. The span of the empty set is `{0}`.
/// When the basis is dependent the returned combination sets every
/// non-pivot coefficient to zero.
pub fn in_span(v: &[Rat], basis: &[Vec<Rat>]) -> Result<Option<Vec<Rat>>> {
    if let Some(bad) = basis.iter().find(|b| b.len() != v.len()) {
        return Err(Error::DimensionMismatch(format!(
            "basis vector of length {} against target of length {}",
            bad.len(),
            v.len()
        )));
    }
    if basis.is_empty() {
        return Ok(v.iter().all(Zero::is_zero).then(Vec::new));
    }
    let n = v.len();
    let k = basis.len();
    let mut aug = RatMatrix::zeros(n, k + 1);
    for (j, b) in basis.iter().enumerate() {
        for i in 0..n {
            aug[(i, j)] = b[i].clone();
        }
    }
    for i in 0..n {
        aug[(i, k)] = v[i].clone();
    }
    let (r, pivots) = rref(&aug);
    if pivots.last() == Some(&k) {
        return Ok(None);
    }
    let mut coeffs = vec![Rat::zero(); k];
    for (row, &col) in pivots.iter().enumerate() {
        coeffs[col] = r[(row, k)].clone();
    }
    Ok(Some(coeffs))
}

/// Smith normal form `left · A · right = diag` with unimodular `left` and
/// `right`. Diagonal entries are non-negative and each divides the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub left: IntMatrix,
    pub diag: IntMatrix,
    pub right: IntMatrix,
    pub rank: usize,
}

impl SmithForm {
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.diag[(i, i)].clone()).collect()
    }
}

fn row_axpy(m: &mut IntMatrix, target: usize, source: usize, factor: &BigInt) {
    for j in 0..m.cols {
        let v = &m[(target, j)] - factor * &m[(source, j)];
        m[(target, j)] = v;
    }
}

fn col_axpy(m: &mut IntMatrix, target: usize, source: usize, factor: &BigInt) {
    for i in 0..m.rows {
        let v = &m[(i, target)] - factor * &m[(i, source)];
        m[(i, target)] = v;
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (r, c) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut left = IntMatrix::identity(r);
    let mut right = IntMatrix::identity(c);
    let mut rank = 0;
    for t in 0..r.min(c) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    if d[(i, j)].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return SmithForm {
                    left,
                    diag: d,
                    right,
                    rank,
                };
            };
            d.swap_rows(t, pi);
            left.swap_rows(t, pi);
            d.swap_cols(t, pj);
            right.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..r {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = d[(i, t)].div_floor(&d[(t, t)]);
                row_axpy(&mut d, i, t, &q);
                row_axpy(&mut left, i, t, &q);
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..c {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = d[(t, j)].div_floor(&d[(t, t)]);
                col_axpy(&mut d, j, t, &q);
                col_axpy(&mut right, j, t, &q);
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..r).find(|&i| {
                (t + 1..c).any(|j| !d[(i, j)].is_multiple_of(&d[(t, t)]))
            });
            match offender {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut d, t, i, &minus_one);
                    row_axpy(&mut left, t, i, &minus_one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            for j in 0..c {
                let v = -&d[(t, j)];
                d[(t, j)] = v;
            }
            for j in 0..r {
                let v = -&left[(t, j)];
                left[(t, j)] = v;
            }
        }
        rank += 1;
    }
    SmithForm {
        left,
        diag: d,
        right,
        rank,
    }
}

/// Outcome of deciding integer solvability of `A·x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntegerSolvability {
    Solvable(Vec<BigInt>),
    /// No solution even over Q.
    Inconsistent,
    /// Solvable over Q, but the Smith form shows that invariant factor
    /// `divisor` at position `index` does not divide the transformed
    /// right-hand side `value`.
    Obstructed {
        index: usize,
        divisor: BigInt,
        value: BigInt,
    },
}

impl IntegerSolvability {
    pub fn solution(&self) -> Option<&[BigInt]> {
        match self {
            IntegerSolvability::Solvable(x) => Some(x),
            _ => None,
        }
    }

    pub fn into_solution(self) -> Option<Vec<BigInt>> {
        match self {
            IntegerSolvability::Solvable(x) => Some(x),
            _ => None,
        }
    }
}

/// Decide whether `A·x = b` has an integer solution, via the Smith form.
pub fn integer_solvability(a: &IntMatrix, b: &[BigInt]) -> Result<IntegerSolvability> {
    if a.rows != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows against right-hand side of length {}",
            a.rows,
            b.len()
        )));
    }
    let snf = smith_normal_form(a);
    let transformed = snf.left.mul_vec(b)?;
    if transformed[snf.rank..].iter().any(|x| !x.is_zero()) {
        return Ok(IntegerSolvability::Inconsistent);
    }
    let mut y = vec![BigInt::zero(); a.cols];
    let mut obstruction = None;
    for i in 0..snf.rank {
        let divisor = &snf.diag[(i, i)];
        let (q, rem) = transformed[i].div_rem(divisor);
        if !rem.is_zero() && obstruction.is_none() {
            obstruction = Some(IntegerSolvability::Obstructed {
                index: i,
                divisor: divisor.clone(),
                value: transformed[i].clone(),
            });
        }
        y[i] = q;
    }
    if let Some(o) = obstruction {
        return Ok(o);
    }
    Ok(IntegerSolvability::Solvable(snf.right.mul_vec(&y)?))
}

/// Some integer solution of `A·x = b`, or `None`.
pub fn solve_integer_linear(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    Ok(integer_solvability(a, b)?.into_solution())
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.clone();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(i) => {
                    a.swap_rows(k, i);
                    negate = !negate;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                a[(i, j)] = v;
            }
        }
        prev = a[(k, k)].clone();
    }
    let det = a[(n - 1, n - 1)].clone();
    Ok(if negate { -det } else { det })
}

/// Index of `c(Z^d)` in `Z^d`: `|det c|` when finite, `None` when infinite.
pub fn index_of_image(c: &IntMatrix) -> Result<Option<BigInt>> {
    let det = determinant(c)?;
    Ok((!det.is_zero()).then(|| det.abs()))
}

/// Least common multiple of the denominators.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub(crate) fn vec_add<T: Clone + Add<Output = T>>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

#[allow(dead_code)]
pub(crate) fn vec_sub<T: Clone + Sub<Output = T>>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}
