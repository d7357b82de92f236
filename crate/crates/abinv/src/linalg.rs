//! Exact linear algebra over the integers and rationals.
//!
//! Everything here is arbitrary precision: integer matrices hold `BigInt`
//! entries, rational matrices hold `BigRational` entries, and no operation
//! ever rounds. The module provides the four computations the rest of the
//! crate is built on:
//!
//! * Smith normal form with its unimodular transforms, `u * m * v = diag(d)`,
//!   which presents the cokernel of an integer matrix as a direct sum of
//!   cyclic groups;
//! * the signature of a symmetric integer matrix, computed by rational
//!   congruence diagonalization (Sylvester's law of inertia), never by
//!   floating-point eigenvalues, because the signature enters phase exponents;
//! * exact inversion of rational matrices;
//! * the number of solutions of `m * x = 0` over `Z_n`, read off the Smith
//!   divisors as `n^(cols - rank) * prod gcd(d_i, n)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Errors from exact linear algebra operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    /// The operation needs a square symmetric matrix.
    #[error("matrix must be square and symmetric")]
    NonSymmetric,
    /// The matrix has no inverse.
    #[error("matrix is singular")]
    Singular,
    /// Solution counting needs a modulus n >= 1.
    #[error("modulus must be a positive integer")]
    InvalidModulus,
}

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    /// Zero matrix of the given shape. Either dimension may be zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = IntegerMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix from machine-integer rows. Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntegerMatrix {
            rows: r,
            cols: c,
            data: rows
                .iter()
                .flat_map(|row| row.iter().map(|&x| BigInt::from(x)))
                .collect(),
        }
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = IntegerMatrix::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn transpose(&self) -> IntegerMatrix {
        let mut t = IntegerMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.get(k, j);
                    let cur = out.get(i, j) + add;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }

    /// Block-diagonal concatenation `self (+) other`.
    pub fn block_diagonal(&self, other: &IntegerMatrix) -> IntegerMatrix {
        let mut out = IntegerMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Exact determinant by rational elimination. Panics on non-square input.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square(), "determinant needs a square matrix");
        let det = RationalMatrix::from_integer(self).determinant();
        debug_assert!(det.is_integer());
        det.to_integer()
    }

    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix::from_integer(self)
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

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.get(r, j);
            self.set(r, j, v);
        }
    }

    /// row[target] += factor * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(target, j) + factor * self.get(source, j);
            self.set(target, j, v);
        }
    }

    /// col[target] += factor * col[source]
    fn add_col_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, target) + factor * self.get(i, source);
            self.set(i, target, v);
        }
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Dense row-major matrix of arbitrary-precision rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_integer(m: &IntegerMatrix) -> Self {
        RationalMatrix {
            rows: m.rows,
            cols: m.cols,
            data: m
                .data
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigRational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = RationalMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.get(k, j);
                    let cur = out.get(i, j) + add;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    /// Exact determinant by Gaussian elimination (product of pivots).
    pub fn determinant(&self) -> BigRational {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = BigRational::one();
        for t in 0..n {
            let pivot_row = match (t..n).find(|&i| !a.get(i, t).is_zero()) {
                Some(r) => r,
                None => return BigRational::zero(),
            };
            if pivot_row != t {
                for j in 0..n {
                    let tmp = a.get(t, j).clone();
                    a.set(t, j, a.get(pivot_row, j).clone());
                    a.set(pivot_row, j, tmp);
                }
                det = -det;
            }
            let pivot = a.get(t, t).clone();
            det *= &pivot;
            for i in (t + 1)..n {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let factor = a.get(i, t) / &pivot;
                for j in t..n {
                    let v = a.get(i, j) - &factor * a.get(t, j);
                    a.set(i, j, v);
                }
            }
        }
        det
    }
}

/// Smith normal form of an integer matrix: unimodular `u`, `v` with
/// `u * m * v = diag(d)`, the divisors nonnegative and each dividing the next.
#[derive(Debug, Clone)]
pub struct SnfResult {
    /// Elementary divisors, length `min(rows, cols)`; nonzero entries first,
    /// each dividing the next, then zeros.
    pub d: Vec<BigInt>,
    /// Left transform, `rows x rows`, determinant +-1.
    pub u: IntegerMatrix,
    /// Right transform, `cols x cols`, determinant +-1.
    pub v: IntegerMatrix,
    /// Number of nonzero divisors.
    pub rank: usize,
}

impl SnfResult {
    /// The divisors > 1, i.e. the torsion part of the cokernel presentation.
    pub fn torsion_divisors(&self) -> Vec<BigInt> {
        self.d
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .cloned()
            .collect()
    }

    /// diag(d) embedded in the shape of the original matrix.
    pub fn diagonal_matrix(&self, rows: usize, cols: usize) -> IntegerMatrix {
        let mut m = IntegerMatrix::zeros(rows, cols);
        for (i, di) in self.d.iter().enumerate() {
            m.set(i, i, di.clone());
        }
        m
    }
}

/// Smith normal form by elementary row/column reduction.
///
/// Pivot selection is by minimal absolute value in the remaining submatrix;
/// after each pivot position is cleaned, the pivot is forced to divide every
/// entry of the remaining submatrix by folding a bad row into the pivot row
/// and re-reducing, so the divisor chain holds by construction.
pub fn smith_normal_form(m: &IntegerMatrix) -> SnfResult {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut v = IntegerMatrix::identity(cols);
    let steps = rows.min(cols);

    for t in 0..steps {
        if !reduce_pivot_position(&mut a, &mut u, &mut v, t) {
            break;
        }
    }

    let mut d = Vec::with_capacity(steps);
    for i in 0..steps {
        d.push(a.get(i, i).clone());
    }
    let rank = d.iter().filter(|x| !x.is_zero()).count();

    #[cfg(debug_assertions)]
    {
        let product = u.mul(m).mul(&v);
        let mut expect = IntegerMatrix::zeros(rows, cols);
        for (i, di) in d.iter().enumerate() {
            expect.set(i, i, di.clone());
        }
        debug_assert_eq!(product, expect, "snf transform identity violated");
    }

    SnfResult { d, u, v, rank }
}

/// Clears row and column `t`, leaving a pivot that divides the remaining
/// submatrix. Returns false when the submatrix from `(t, t)` on is zero.
fn reduce_pivot_position(
    a: &mut IntegerMatrix,
    u: &mut IntegerMatrix,
    v: &mut IntegerMatrix,
    t: usize,
) -> bool {
    let rows = a.rows();
    let cols = a.cols();
    loop {
        let (pi, pj) = match min_abs_nonzero(a, t) {
            Some(p) => p,
            None => return false,
        };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);

        // Euclidean elimination of column t and row t. A nonzero remainder is
        // strictly smaller than the pivot, so swapping it in terminates.
        let mut dirty = false;
        for i in (t + 1)..rows {
            if a.get(i, t).is_zero() {
                continue;
            }
            let q = a.get(i, t).div_floor(a.get(t, t));
            if !q.is_zero() {
                let f = -q;
                a.add_row_multiple(i, t, &f);
                u.add_row_multiple(i, t, &f);
            }
            if !a.get(i, t).is_zero() {
                a.swap_rows(t, i);
                u.swap_rows(t, i);
                dirty = true;
                break;
            }
        }
        if dirty {
            continue;
        }
        for j in (t + 1)..cols {
            if a.get(t, j).is_zero() {
                continue;
            }
            let q = a.get(t, j).div_floor(a.get(t, t));
            if !q.is_zero() {
                let f = -q;
                a.add_col_multiple(j, t, &f);
                v.add_col_multiple(j, t, &f);
            }
            if !a.get(t, j).is_zero() {
                a.swap_cols(t, j);
                v.swap_cols(t, j);
                dirty = true;
                break;
            }
        }
        if dirty {
            continue;
        }

        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }

        // Divisor chain: fold any non-divisible entry into row t and restart.
        let pivot = a.get(t, t).clone();
        let mut fixed = true;
        'scan: for i in (t + 1)..rows {
            for j in (t + 1)..cols {
                if !a.get(i, j).mod_floor(&pivot).is_zero() {
                    a.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if fixed {
            return true;
        }
    }
}

fn min_abs_nonzero(a: &IntegerMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            let abs = x.abs();
            match &best {
                Some((_, cur)) if *cur <= abs => {}
                _ => best = Some(((i, j), abs)),
            }
        }
    }
    best.map(|(pos, _)| pos)
}

/// Signature `(n_plus, n_minus, n_zero)` of a symmetric integer matrix by
/// exact congruence diagonalization over the rationals.
pub fn signature(m: &IntegerMatrix) -> Result<(usize, usize, usize), LinalgError> {
    if !m.is_symmetric() {
        return Err(LinalgError::NonSymmetric);
    }
    let n = m.rows();
    let mut a = RationalMatrix::from_integer(m);
    let mut n_plus = 0;
    let mut n_minus = 0;
    let mut n_zero = 0;

    for t in 0..n {
        if a.get(t, t).is_zero() {
            if let Some(j) = ((t + 1)..n).find(|&j| !a.get(j, j).is_zero()) {
                rational_swap_symmetric(&mut a, t, j);
            } else if let Some(j) = ((t + 1)..n).find(|&j| !a.get(t, j).is_zero()) {
                // Zero diagonal block: row/col t picks up 2*a[t][j] != 0.
                rational_add_symmetric(&mut a, t, j);
            } else {
                n_zero += 1;
                continue;
            }
        }
        let pivot = a.get(t, t).clone();
        if pivot.is_positive() {
            n_plus += 1;
        } else {
            n_minus += 1;
        }
        for j in (t + 1)..n {
            if a.get(t, j).is_zero() {
                continue;
            }
            let factor = -(a.get(t, j) / &pivot);
            for k in 0..n {
                let vr = a.get(j, k) + &factor * a.get(t, k);
                a.set(j, k, vr);
            }
            for k in 0..n {
                let vc = a.get(k, j) + &factor * a.get(k, t);
                a.set(k, j, vc);
            }
        }
    }

    Ok((n_plus, n_minus, n_zero))
}

fn rational_swap_symmetric(a: &mut RationalMatrix, i: usize, j: usize) {
    let n = a.rows();
    for k in 0..n {
        let tmp = a.get(i, k).clone();
        a.set(i, k, a.get(j, k).clone());
        a.set(j, k, tmp);
    }
    for k in 0..n {
        let tmp = a.get(k, i).clone();
        a.set(k, i, a.get(k, j).clone());
        a.set(k, j, tmp);
    }
}

fn rational_add_symmetric(a: &mut RationalMatrix, i: usize, j: usize) {
    let n = a.rows();
    for k in 0..n {
        let v = a.get(i, k) + a.get(j, k);
        a.set(i, k, v);
    }
    for k in 0..n {
        let v = a.get(k, i) + a.get(k, j);
        a.set(k, i, v);
    }
}

/// Exact inverse of a rational matrix by Gauss-Jordan elimination.
pub fn rational_inverse(m: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
    if m.rows() != m.cols() {
        return Err(LinalgError::Singular);
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut inv = RationalMatrix::identity(n);

    for t in 0..n {
        let pivot_row = (t..n)
            .find(|&i| !a.get(i, t).is_zero())
            .ok_or(LinalgError::Singular)?;
        if pivot_row != t {
            for j in 0..n {
                let tmp = a.get(t, j).clone();
                a.set(t, j, a.get(pivot_row, j).clone());
                a.set(pivot_row, j, tmp);
                let tmp = inv.get(t, j).clone();
                inv.set(t, j, inv.get(pivot_row, j).clone());
                inv.set(pivot_row, j, tmp);
            }
        }
        let pivot = a.get(t, t).clone();
        for j in 0..n {
            let va = a.get(t, j) / &pivot;
            a.set(t, j, va);
            let vi = inv.get(t, j) / &pivot;
            inv.set(t, j, vi);
        }
        for i in 0..n {
            if i == t || a.get(i, t).is_zero() {
                continue;
            }
            let factor = a.get(i, t).clone();
            for j in 0..n {
                let va = a.get(i, j) - &factor * a.get(t, j);
                a.set(i, j, va);
                let vi = inv.get(i, j) - &factor * inv.get(t, j);
                inv.set(i, j, vi);
            }
        }
    }

    Ok(inv)
}

/// Exact integer inverse of a matrix with determinant +-1; errors on
/// anything else.
pub fn unimodular_inverse(m: &IntegerMatrix) -> Result<IntegerMatrix, LinalgError> {
    let inv = rational_inverse(&RationalMatrix::from_integer(m))?;
    let n = m.rows();
    let mut out = IntegerMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let entry = inv.get(i, j);
            if !entry.is_integer() {
                return Err(LinalgError::Singular);
            }
            out.set(i, j, entry.to_integer());
        }
    }
    Ok(out)
}

/// Number of solutions of `m * x = 0` with `x` in `(Z_n)^cols`.
///
/// From the Smith divisors: `n^(cols - rank) * prod_{i < rank} gcd(d_i, n)`.
pub fn solution_count_mod_n(m: &IntegerMatrix, n: u64) -> Result<BigInt, LinalgError> {
    if n == 0 {
        return Err(LinalgError::InvalidModulus);
    }
    let snf = smith_normal_form(m);
    let big_n = BigInt::from(n);
    let mut count = big_n.pow((m.cols() - snf.rank) as u32);
    for d in snf.d.iter().take(snf.rank) {
        count *= d.gcd(&big_n);
    }
    Ok(count)
}
