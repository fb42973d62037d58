use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// A dense matrix over GF(2), stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVector>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub rows: Vec<BitVector>,
    pub pivots: Vec<usize>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of equal length; `cols` is needed to express
    /// matrices with zero rows.
    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        for r in &rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[BitVector]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: c.len(),
                });
            }
            for i in c.ones_positions() {
                m.set(i, j, true);
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

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i].set(j, value);
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.data[i]
    }

    pub fn row_vectors(&self) -> &[BitVector] {
        &self.data
    }

    pub fn column(&self, j: usize) -> BitVector {
        let mut c = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                c.set(i, true);
            }
        }
        c
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.data[i].ones_positions() {
                t.set(j, i, true);
            }
        }
        t
    }

    /// `M · v`, with `result[i] = ⊕_j M[i][j] v[j]`.
    pub fn mat_vec_mul(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut out = BitVector::zeros(self.rows);
        for (i, r) in self.data.iter().enumerate() {
            if r.dot(v)? {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let mut acc = BitVector::zeros(other.cols);
            for k in self.data[i].ones_positions() {
                acc ^= &other.data[k];
            }
            out.data[i] = acc;
        }
        Ok(out)
    }

    /// `(self | other)`.
    pub fn hconcat(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.concat(b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        })
    }

    /// `self` stacked above `other`.
    pub fn vconcat(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn echelon(&self) -> Echelon {
        reduce_rows(self.data.clone(), self.cols)
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// A basis of `{v : M v = 0}`; one vector per free column of the echelon form.
    pub fn kernel_basis(&self) -> Vec<BitVector> {
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - ech.pivots.len());
        for free in (0..self.cols).filter(|&j| !is_pivot[j]) {
            let mut v = BitVector::unit(self.cols, free);
            for (r, &p) in ech.rows.iter().zip(&ech.pivots) {
                if r.get(free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Some `u` with `M u = v`, or `None` when `v ∉ Im M`.
    pub fn solve(&self, v: &BitVector) -> Result<Option<BitVector>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        let augmented = self.hconcat(&Self::from_columns(self.rows, std::slice::from_ref(v))?)?;
        let ech = augmented.echelon();
        if ech.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut u = BitVector::zeros(self.cols);
        for (r, &p) in ech.rows.iter().zip(&ech.pivots) {
            if r.get(self.cols) {
                u.set(p, true);
            }
        }
        Ok(Some(u))
    }

    /// Whether `v` lies in the column space of `M`.
    pub fn image_membership(&self, v: &BitVector) -> Result<bool> {
        Ok(self.solve(v)?.is_some())
    }

    /// Inverse of a square matrix, or `None` if it is singular.
    pub fn inverse(&self) -> Result<Option<Self>> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Some(Self::zeros(0, 0)));
        }
        let ech = self.hconcat(&Self::identity(n))?.echelon();
        if ech.pivots.len() < n || ech.pivots[n - 1] >= n {
            return Ok(None);
        }
        let rows = ech.rows.iter().map(|r| r.slice(n, n)).collect();
        Ok(Some(Self::from_rows(n, rows)?))
    }

    /// Sub-matrix of the listed columns, in the order given.
    pub fn select_columns(&self, columns: &[usize]) -> Self {
        let data = self.data.iter().map(|r| r.select(columns)).collect();
        Self {
            rows: self.rows,
            cols: columns.len(),
            data,
        }
    }

    /// A basis of the dual of the row space of `M`, i.e. of the code generated by its rows.
    pub fn dual_code_basis(&self) -> Vec<BitVector> {
        self.kernel_basis()
    }
}

/// Gauss-Jordan elimination. Pivot rows come first, in increasing pivot
/// column order, and every pivot column is zero outside its pivot row.
pub(crate) fn reduce_rows(mut rows: Vec<BitVector>, cols: usize) -> Echelon {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        let Some(found) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(next, found);
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row.get(col) {
                *row ^= &pivot_row;
            }
        }
        pivots.push(col);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    rows.truncate(next);
    Echelon { rows, pivots }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for (i, r) in self.data.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.data.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    /// Rows separated by `;` or newlines, e.g. `"110;011"`.
    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<BitVector> = s
            .split([';', '\n'])
            .map(str::trim)
            .filter(|r| !r.is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        let cols = rows.first().map_or(0, BitVector::len);
        Self::from_rows(cols, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> BitMatrix {
        s.parse().unwrap()
    }

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn mat_vec_examples() {
        assert_eq!(BitMatrix::identity(3).mat_vec_mul(&bv("101")).unwrap(), bv("101"));
        assert_eq!(m("11;01").mat_vec_mul(&bv("11")).unwrap(), bv("01"));
        assert!(BitMatrix::zeros(3, 4).mat_vec_mul(&bv("1111")).unwrap().is_zero());
        assert!(m("11;01").mat_vec_mul(&bv("1")).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::identity(4).rank(), 4);
        assert_eq!(m("11;11").rank(), 1);
        assert_eq!(BitMatrix::zeros(3, 3).rank(), 0);
    }

    #[test]
    fn kernel_examples() {
        assert!(BitMatrix::identity(2).kernel_basis().is_empty());
        assert_eq!(m("11").kernel_basis(), vec![bv("11")]);
        assert_eq!(BitMatrix::zeros(2, 3).kernel_basis().len(), 3);
    }

    #[test]
    fn image_examples() {
        let col = m("1;1");
        assert!(col.image_membership(&bv("00")).unwrap());
        assert!(col.image_membership(&bv("11")).unwrap());
        assert!(!col.image_membership(&bv("10")).unwrap());
        assert!(BitMatrix::identity(3).image_membership(&bv("011")).unwrap());
        assert!(col.image_membership(&bv("1")).is_err());
    }

    #[test]
    fn dual_examples() {
        assert!(m("10;11").dual_code_basis().is_empty());
        assert_eq!(m("11").dual_code_basis(), vec![bv("11")]);
        assert_eq!(BitMatrix::zeros(1, 2).dual_code_basis().len(), 2);
    }

    #[test]
    fn solve_returns_a_preimage() {
        let a = m("101;011;110");
        let v = bv("110");
        let u = a.solve(&v).unwrap().unwrap();
        assert_eq!(a.mat_vec_mul(&u).unwrap(), v);
    }

    #[test]
    fn inverse_round_trips() {
        let a = m("110;011;001");
        let inv = a.inverse().unwrap().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), BitMatrix::identity(3));
        assert!(m("11;11").inverse().unwrap().is_none());
        assert!(BitMatrix::zeros(0, 0).inverse().unwrap().is_some());
    }

    #[test]
    fn products_and_concatenation() {
        let a = m("10;11");
        assert_eq!(a.mul(&a).unwrap(), BitMatrix::identity(2));
        assert_eq!(a.transpose(), m("11;01"));
        assert_eq!(a.hconcat(&BitMatrix::identity(2)).unwrap(), m("1010;1101"));
        assert_eq!(a.vconcat(&a).unwrap().rows(), 4);
    }
}
