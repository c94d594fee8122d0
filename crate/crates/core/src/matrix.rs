//! Matrices over the exact rings of [`crate::ring`].
//!
//! Row-major storage. The Kronecker product pairs indices with the left
//! factor's index major and the right factor's minor, so the basis of
//! `k^m ⊗ k^n` is ordered `e1⊗e1, …, e1⊗en, e2⊗e1, …`. Every strict equality
//! of tensor products downstream depends on this ordering.

use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{same_ring, Ring, RingElem, RingHom};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    entries: Vec<RingElem>,
}

impl Matrix {
    pub fn new(ring: &Ring, rows: usize, cols: usize, entries: Vec<RingElem>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        if let Some(e) = entries.iter().find(|e| !same_ring(e.ring(), ring)) {
            return Err(Error::RingMismatch(format!("entry {e} not in {ring}")));
        }
        Ok(Matrix { ring: ring.clone(), rows, cols, entries })
    }

    pub fn from_rows(ring: &Ring, rows: Vec<Vec<RingElem>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(ring, r, c, rows.into_iter().flatten().collect())
    }

    /// Parses entries given as canonical strings, row-major.
    pub fn parse(ring: &Ring, rows: usize, cols: usize, entries: &[&str]) -> Result<Self> {
        let e = entries.iter().map(|s| RingElem::parse(ring, s)).collect::<Result<Vec<_>>>()?;
        Self::new(ring, rows, cols, e)
    }

    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> Self {
        Matrix { ring: ring.clone(), rows, cols, entries: vec![RingElem::zero(ring); rows * cols] }
    }

    pub fn identity(ring: &Ring, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.entries[i * n + i] = RingElem::one(ring);
        }
        m
    }

    pub fn scalar(e: RingElem) -> Self {
        Matrix { ring: e.ring().clone(), rows: 1, cols: 1, entries: vec![e] }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
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

    pub fn entries(&self) -> &[RingElem] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElem {
        &self.entries[i * self.cols + j]
    }

    /// Panics if `v` is over a different ring.
    pub fn set(&mut self, i: usize, j: usize, v: RingElem) {
        assert!(same_ring(v.ring(), &self.ring), "entry over the wrong ring");
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    fn check_ring(&self, other: &Matrix) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch(format!("{} vs {}", self.ring, other.ring)))
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = Matrix::zeros(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).try_add(&a.try_mul(b)?)?;
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Applies a ring homomorphism to every entry.
    pub fn hom_entrywise(&self, h: &RingHom) -> Result<Matrix> {
        let entries = self.entries.iter().map(|e| h.apply(e)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { ring: h.target().clone(), rows: self.rows, cols: self.cols, entries })
    }

    /// `hom(A) · B`: pushes `a` through `h` into `b`'s ring, then multiplies.
    pub fn matmul_along(h: &RingHom, a: &Matrix, b: &Matrix) -> Result<Matrix> {
        a.hom_entrywise(h)?.matmul(b)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension("shape mismatch in addition".into()));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.try_add(b)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { ring: self.ring.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn neg(&self) -> Matrix {
        Matrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.neg())
    }

    pub fn kron(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..self.rows {
            for k in 0..other.rows {
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    for l in 0..other.cols {
                        entries.push(a.try_mul(other.get(k, l))?);
                    }
                }
            }
        }
        Ok(Matrix { ring: self.ring.clone(), rows, cols, entries })
    }

    pub fn block_diag(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        let mut out = Matrix::zeros(&self.ring, self.rows + other.rows, self.cols + other.cols);
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
        Ok(out)
    }

    /// Stacks `self` above `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        if self.cols != other.cols {
            return Err(Error::Dimension("column mismatch in vstack".into()));
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(Matrix { ring: self.ring.clone(), rows: self.rows + other.rows, cols: self.cols, entries })
    }

    /// Places `self` left of `other`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        if self.rows != other.rows {
            return Err(Error::Dimension("row mismatch in hstack".into()));
        }
        let cols = self.cols + other.cols;
        let mut entries = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            entries.extend((0..self.cols).map(|j| self.get(i, j).clone()));
            entries.extend((0..other.cols).map(|j| other.get(i, j).clone()));
        }
        Ok(Matrix { ring: self.ring.clone(), rows: self.rows, cols, entries })
    }

    /// Determinant by cofactor expansion, memoized over column subsets.
    pub fn det(&self) -> Result<RingElem> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n > 20 {
            return Err(Error::Dimension(format!("determinant of a {n}x{n} matrix is out of range")));
        }
        let mut dp: Vec<Option<RingElem>> = vec![None; 1 << n];
        dp[0] = Some(RingElem::one(&self.ring));
        for mask in 0usize..(1 << n) {
            let Some(val) = dp[mask].take() else { continue };
            let row = mask.count_ones() as usize;
            if row == n {
                dp[mask] = Some(val);
                continue;
            }
            for j in 0..n {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let a = self.get(row, j);
                if a.is_zero() {
                    continue;
                }
                let inversions = (mask >> (j + 1)).count_ones();
                let mut term = val.try_mul(a)?;
                if inversions % 2 == 1 {
                    term = -&term;
                }
                let slot = &mut dp[mask | (1 << j)];
                *slot = Some(match slot.take() {
                    Some(s) => s.try_add(&term)?,
                    None => term,
                });
            }
        }
        Ok(dp[(1 << n) - 1].take().unwrap_or_else(|| RingElem::zero(&self.ring)))
    }

    pub fn invertible(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        if self.unit_pivot_inverse().is_some() {
            return true;
        }
        self.det().map(|d| d.is_unit()).unwrap_or(false)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NotInvertible);
        }
        if let Some(inv) = self.unit_pivot_inverse() {
            return Ok(inv);
        }
        let d = self.det()?;
        if !d.is_unit() {
            return Err(Error::NotInvertible);
        }
        let dinv = d.inverse()?;
        let n = self.rows;
        let mut out = Matrix::zeros(&self.ring, n, n);
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(i, j).det()?;
                let mut c = minor.try_mul(&dinv)?;
                if (i + j) % 2 == 1 {
                    c = -&c;
                }
                out.set(j, i, c);
            }
        }
        Ok(out)
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Matrix {
        let mut entries = Vec::new();
        for i in (0..self.rows).filter(|&i| i != skip_row) {
            for j in (0..self.cols).filter(|&j| j != skip_col) {
                entries.push(self.get(i, j).clone());
            }
        }
        Matrix { ring: self.ring.clone(), rows: self.rows - 1, cols: self.cols - 1, entries }
    }

    /// Gauss–Jordan elimination that only ever divides by units. Returns
    /// `None` when some column has no unit pivot; the inverse (if any) is
    /// then found by the adjugate.
    fn unit_pivot_inverse(&self) -> Option<Matrix> {
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(&self.ring, n);
        for col in 0..n {
            let piv = (col..n).find(|&r| {
                let e = a.get(r, col);
                !e.is_zero() && e.is_unit()
            });
            let piv = match piv {
                Some(p) => p,
                None if self.ring.is_zero_ring() => col,
                None => return None,
            };
            if piv != col {
                for j in 0..n {
                    a.entries.swap(piv * n + j, col * n + j);
                    inv.entries.swap(piv * n + j, col * n + j);
                }
            }
            let pinv = a.get(col, col).inverse().ok()?;
            for j in 0..n {
                let v = a.get(col, j).try_mul(&pinv).ok()?;
                a.set(col, j, v);
                let w = inv.get(col, j).try_mul(&pinv).ok()?;
                inv.set(col, j, w);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = a.get(r, j).try_sub(&f.try_mul(a.get(col, j)).ok()?).ok()?;
                    a.set(r, j, v);
                    let w = inv.get(r, j).try_sub(&f.try_mul(inv.get(col, j)).ok()?).ok()?;
                    inv.set(r, j, w);
                }
            }
        }
        Some(inv)
    }

    pub fn transpose(&self) -> Matrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        Matrix { ring: self.ring.clone(), rows: self.cols, cols: self.rows, entries }
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &[RingElem]) -> Result<Vec<RingElem>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        let col = Matrix::new(&self.ring, v.len(), 1, v.to_vec())?;
        Ok(self.matmul(&col)?.entries)
    }

    pub fn max_abs_exponent(&self) -> i32 {
        self.entries.iter().map(|e| e.max_abs_exponent()).max().unwrap_or(0)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]({}x{})", self.rows, self.cols)
    }
}
