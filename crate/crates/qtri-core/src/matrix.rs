//! Dense integer matrices, just large enough for seed bookkeeping.

use crate::{Error, Result};

/// A dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Input("ragged matrix rows".into()));
        }
        Ok(IntMat { rows: r, cols: c, data: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }

    pub fn is_skew_symmetric(&self) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::Input("matrix is not square".into()));
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self[(i, j)] != -self[(j, i)] {
                    return Err(Error::NotSkew(i + 1, j + 1));
                }
            }
        }
        Ok(())
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl std::fmt::Debug for IntMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skew_check_reports_entry() {
        let m = IntMat::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(m.is_skew_symmetric(), Err(Error::NotSkew(_, _))));
        let ok = IntMat::from_rows(&[vec![0, -3], vec![3, 0]]).unwrap();
        assert!(ok.is_skew_symmetric().is_ok());
    }

    #[test]
    fn mul_vec_matches_by_hand() {
        let m = IntMat::from_rows(&[vec![0, -3], vec![3, 0]]).unwrap();
        assert_eq!(m.mul_vec(&[1, 4]), vec![-12, 3]);
    }
}
