use super::{BitMatrix, BitVec, Gf2Error};

/// Column-sparse GF(2) matrix: every column has exactly `k` set rows.
///
/// Columns are stored as sorted lists of distinct row indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseMatrix {
    rows: usize,
    k: usize,
    columns: Vec<Vec<u32>>,
}

impl SparseMatrix {
    /// Validates and sorts each column.
    ///
    /// # Errors
    /// Fails when a column has the wrong weight, a repeated index, or an
    /// index `>= rows`.
    pub fn new(rows: usize, k: usize, mut columns: Vec<Vec<u32>>) -> Result<Self, Gf2Error> {
        for (j, col) in columns.iter_mut().enumerate() {
            if col.len() != k {
                return Err(Gf2Error::BadSparseColumn {
                    column: j,
                    reason: format!("has {} entries, expected {k}", col.len()),
                });
            }
            col.sort_unstable();
            if col.windows(2).any(|w| w[0] == w[1]) {
                return Err(Gf2Error::BadSparseColumn {
                    column: j,
                    reason: "repeated row index".into(),
                });
            }
            if col.last().is_some_and(|&r| r as usize >= rows) {
                return Err(Gf2Error::BadSparseColumn {
                    column: j,
                    reason: format!("row index out of range (rows {rows})"),
                });
            }
        }
        Ok(Self { rows, k, columns })
    }

    /// Re-sparsifies a dense matrix whose columns all have weight `k`.
    pub fn from_dense(a: &BitMatrix, k: usize) -> Result<Self, Gf2Error> {
        let t = a.transpose();
        let columns = t
            .row_vecs()
            .iter()
            .map(|c| c.iter_ones().map(|i| i as u32).collect())
            .collect();
        Self::new(a.rows(), k, columns)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn column_indices(&self, j: usize) -> &[u32] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<u32>] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> BitVec {
        BitVec::from_indices(self.rows, self.columns[j].iter().map(|&i| i as usize))
    }

    pub fn densify(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows, self.cols());
        for (j, col) in self.columns.iter().enumerate() {
            for &i in col {
                out.set(i as usize, j, true);
            }
        }
        out
    }

    /// `M · x`: XOR of the columns selected by `x`.
    pub fn mul_vec(&self, x: &BitVec) -> Result<BitVec, Gf2Error> {
        if x.len() != self.cols() {
            return Err(Gf2Error::DimMismatch {
                op: "sparse mul_vec",
                expected: self.cols(),
                found: x.len(),
            });
        }
        let mut out = BitVec::zeros(self.rows);
        for j in x.iter_ones() {
            for &i in &self.columns[j] {
                out.flip(i as usize);
            }
        }
        Ok(out)
    }

    /// `D · M` for a dense `D` with `D.cols == M.rows`, built column by column.
    pub fn left_mul(&self, d: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if d.cols() != self.rows {
            return Err(Gf2Error::DimMismatch {
                op: "sparse left_mul",
                expected: self.rows,
                found: d.cols(),
            });
        }
        let dt = d.transpose();
        let mut out_t = Vec::with_capacity(self.cols());
        for col in &self.columns {
            let mut acc = BitVec::zeros(d.rows());
            for &i in col {
                acc.xor_in_place(dt.row(i as usize));
            }
            out_t.push(acc);
        }
        Ok(BitMatrix::from_rows(d.rows(), out_t)?.transpose())
    }

    /// Submatrix made of the listed columns.
    pub fn select_columns(&self, cols: &[usize]) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            k: self.k,
            columns: cols.iter().map(|&j| self.columns[j].clone()).collect(),
        }
    }

    /// Pairs `(a, b)` with `a < b` of identical columns, one per duplicate.
    pub fn duplicate_pairs(&self) -> Vec<(usize, usize)> {
        let mut order: Vec<usize> = (0..self.cols()).collect();
        order.sort_by(|&a, &b| self.columns[a].cmp(&self.columns[b]).then(a.cmp(&b)));
        order
            .windows(2)
            .filter(|w| self.columns[w[0]] == self.columns[w[1]])
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_columns() {
        assert!(SparseMatrix::new(4, 2, vec![vec![1, 1]]).is_err());
        assert!(SparseMatrix::new(4, 2, vec![vec![1]]).is_err());
        assert!(SparseMatrix::new(4, 2, vec![vec![1, 4]]).is_err());
        let m = SparseMatrix::new(4, 2, vec![vec![3, 1]]).unwrap();
        assert_eq!(m.column_indices(0), &[1, 3]);
    }

    #[test]
    fn unit_selects_column() {
        let m = SparseMatrix::new(6, 3, vec![vec![0, 2, 4], vec![1, 2, 5]]).unwrap();
        assert_eq!(m.mul_vec(&BitVec::unit(2, 1)).unwrap(), m.column(1));
        assert!(m.mul_vec(&BitVec::zeros(2)).unwrap().is_zero());
        assert_eq!(m.mul_vec(&BitVec::ones(2)).unwrap().to_string(), "110011");
    }

    #[test]
    fn duplicates_found() {
        let m = SparseMatrix::new(5, 2, vec![vec![0, 1], vec![2, 3], vec![1, 0], vec![2, 3]])
            .unwrap();
        assert_eq!(m.duplicate_pairs(), vec![(0, 2), (1, 3)]);
    }
}
