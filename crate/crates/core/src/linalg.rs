//! Dense exact linear algebra over a finite field.

use std::fmt;

use thiserror::Error;

use crate::field::Field;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ragged rows: row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
}

/// Row-major matrix over `F`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FMatrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

/// Output of [`FMatrix::rref`].
#[derive(Clone, PartialEq, Eq)]
pub struct Rref<F> {
    pub matrix: FMatrix<F>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl<F: Field> FMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FMatrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { F::one() } else { F::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        FMatrix { rows, cols, data }
    }

    /// Builds a matrix from rows; `cols` fixes the width when `rows` is empty.
    pub fn from_rows(cols: usize, rows: &[Vec<F>]) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(LinalgError::Ragged { row: i, expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(FMatrix { rows: rows.len(), cols, data })
    }

    /// Convenience constructor from small integers, reduced into the field.
    pub fn from_u32_rows(rows: &[&[u32]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<F>> = rows.iter().map(|r| r.iter().map(|&v| F::from_index(v)).collect()).collect();
        Self::from_rows(cols, &rows).expect("ragged literal matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> F {
        self.data[r * self.cols + c]
    }

    fn set(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn row_mut(&mut self, r: usize) -> &mut [F] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[F]> + '_ {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        self.row_iter().map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn mul(&self, rhs: &FMatrix<F>) -> Result<Self, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let v = out.get(r, c) + a * rhs.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// `self · vᵀ`.
    pub fn mul_vec(&self, v: &[F]) -> Result<Vec<F>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok(self.row_iter().map(|r| dot(r, v)).collect())
    }

    pub fn vstack(&self, other: &FMatrix<F>) -> Result<Self, LinalgError> {
        if self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: other.cols });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FMatrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn hstack(&self, other: &FMatrix<F>) -> Result<Self, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.get(r, c)
            } else {
                other.get(r, c - self.cols)
            }
        }))
    }

    /// New matrix whose `j`-th column is column `cols[j]` of `self`.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |r, c| self.get(r, cols[c]))
    }

    /// Reduced row echelon form. Pivots are chosen in the lowest column and,
    /// within it, the lowest row, so the result is deterministic.
    pub fn rref(&self) -> Rref<F> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for k in 0..m.cols {
                    m.data.swap(p * m.cols + k, r * m.cols + k);
                }
            }
            let inv = m.get(r, c).inv().expect("pivot is nonzero");
            for v in m.row_mut(r) {
                *v = *v * inv;
            }
            let pivot_row = m.row(r).to_vec();
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c);
                if f.is_zero() {
                    continue;
                }
                for (v, &pv) in m.row_mut(i).iter_mut().zip(&pivot_row) {
                    *v = *v - f * pv;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, rank: r, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Reduced row echelon form with zero rows removed: the unique normal
    /// form of the row space.
    pub fn canonical(&self) -> Self {
        let Rref { matrix, rank, .. } = self.rref();
        FMatrix { rows: rank, cols: self.cols, data: matrix.data[..rank * self.cols].to_vec() }
    }

    /// Basis of `{v : self · vᵀ = 0}`, one row per free column.
    pub fn kernel(&self) -> Self {
        let Rref { matrix, rank, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Self::zeros(free.len(), self.cols);
        for (k, &f) in free.iter().enumerate() {
            out.set(k, f, F::one());
            for (i, &pc) in pivots.iter().enumerate().take(rank) {
                out.set(k, pc, -matrix.get(i, f));
            }
        }
        out
    }

    /// Some `x` with `self · xᵀ = rhsᵀ`, or `None` when the system is
    /// inconsistent. Free variables are set to zero.
    pub fn solve(&self, rhs: &[F]) -> Result<Option<Vec<F>>, LinalgError> {
        if rhs.len() != self.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.rows, found: rhs.len() });
        }
        let aug = Self::from_fn(self.rows, self.cols + 1, |r, c| if c < self.cols { self.get(r, c) } else { rhs[r] });
        let Rref { matrix, rank, pivots } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![F::zero(); self.cols];
        for (i, &pc) in pivots.iter().enumerate().take(rank) {
            x[pc] = matrix.get(i, self.cols);
        }
        Ok(Some(x))
    }

    pub fn row_space_equal(&self, other: &FMatrix<F>) -> Result<bool, LinalgError> {
        if self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: other.cols });
        }
        Ok(self.canonical() == other.canonical())
    }

    /// Whether `v` lies in the row space.
    pub fn spans(&self, v: &[F]) -> bool {
        if v.len() != self.cols {
            return false;
        }
        let canon = self.canonical();
        reduce_against(&canon, v).iter().all(|x| x.is_zero())
    }
}

/// Residue of `v` after eliminating the pivots of a matrix already in
/// canonical (reduced, zero-row-free) form.
pub(crate) fn reduce_against<F: Field>(canon: &FMatrix<F>, v: &[F]) -> Vec<F> {
    let mut out = v.to_vec();
    for r in 0..canon.rows() {
        let row = canon.row(r);
        let Some(pc) = row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        let f = out[pc];
        if f.is_zero() {
            continue;
        }
        for (o, &rv) in out.iter_mut().zip(row) {
            *o = *o - f * rv;
        }
    }
    out
}

pub fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

impl<F: fmt::Display> fmt::Debug for Rref<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rref")
            .field("matrix", &self.matrix)
            .field("rank", &self.rank)
            .field("pivots", &self.pivots)
            .finish()
    }
}

impl<F: fmt::Display> fmt::Debug for FMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FMatrix {}x{} [", self.rows, self.cols)?;
        for r in self.data.chunks(self.cols.max(1)).take(self.rows) {
            let s: Vec<String> = r.iter().map(|v| v.to_string()).collect();
            writeln!(f, "  {}", s.join(" "))?;
        }
        write!(f, "]")
    }
}
