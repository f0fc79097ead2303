use std::fmt;

use rand::Rng;

use super::{BitVec, Gf2Error};

/// Dense row-major matrix over GF(2).
///
/// Products are computed by XOR-accumulating the rows of the right operand
/// selected by each row of the left operand.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

/// Row-echelon form produced by [`BitMatrix::reduce`].
struct Echelon {
    /// Fully reduced matrix (every pivot column is a unit column).
    reduced: BitMatrix,
    /// `pivots[i]` is the pivot column of row `i`, for `i < rank`.
    pivots: Vec<usize>,
    /// Row operations applied, as a `rows × rows` matrix `P` with `P·A = reduced`.
    transform: Option<BitMatrix>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let data = (0..n).map(|i| BitVec::unit(n, i)).collect();
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows).map(|_| BitVec::random(cols, rng)).collect();
        Self { rows, cols, data }
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self, Gf2Error> {
        for r in &rows {
            if r.len() != cols {
                return Err(Gf2Error::DimMismatch {
                    op: "from_rows",
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

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[BitVec]) -> Result<Self, Gf2Error> {
        Ok(Self::from_rows(rows, columns.to_vec())?.transpose())
    }

    /// Parses rows of `0`/`1` characters, one row per string.
    pub fn from_bit_rows(rows: &[&str]) -> Self {
        let data: Vec<BitVec> = rows.iter().map(|r| BitVec::from_bit_str(r)).collect();
        let cols = data.first().map_or(0, BitVec::len);
        Self::from_rows(cols, data).expect("ragged bit rows")
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &BitVec {
        &self.data[i]
    }

    pub fn row_vecs(&self) -> &[BitVec] {
        &self.data
    }

    pub fn into_rows(self) -> Vec<BitVec> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i].set(j, value);
    }

    pub fn set_row(&mut self, i: usize, row: BitVec) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.data[i] = row;
    }

    pub fn column(&self, j: usize) -> BitVec {
        assert!(j < self.cols, "column index out of range");
        let mut out = BitVec::zeros(self.rows);
        for (i, r) in self.data.iter().enumerate() {
            if r.get(j) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for j in r.iter_ones() {
                out.data[j].set(i, true);
            }
        }
        out
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != rhs.rows {
            return Err(Gf2Error::DimMismatch {
                op: "mul",
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut acc = BitVec::zeros(rhs.cols);
                for j in r.iter_ones() {
                    acc.xor_in_place(&rhs.data[j]);
                }
                acc
            })
            .collect();
        Ok(BitMatrix {
            rows: self.rows,
            cols: rhs.cols,
            data,
        })
    }

    /// `self · x` for a column vector `x`.
    pub fn mul_vec(&self, x: &BitVec) -> Result<BitVec, Gf2Error> {
        if x.len() != self.cols {
            return Err(Gf2Error::DimMismatch {
                op: "mul_vec",
                expected: self.cols,
                found: x.len(),
            });
        }
        let mut out = BitVec::zeros(self.rows);
        for (i, r) in self.data.iter().enumerate() {
            if r.dot(x) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// `xᵀ · self` for a row vector `x`: the XOR of the rows selected by `x`.
    pub fn vec_mul(&self, x: &BitVec) -> Result<BitVec, Gf2Error> {
        if x.len() != self.rows {
            return Err(Gf2Error::DimMismatch {
                op: "vec_mul",
                expected: self.rows,
                found: x.len(),
            });
        }
        let mut out = BitVec::zeros(self.cols);
        for i in x.iter_ones() {
            out.xor_in_place(&self.data[i]);
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Gf2Error::ShapeMismatch {
                op: "add",
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a ^ b).collect();
        Ok(BitMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Submatrix made of the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut out = BitVec::zeros(cols.len());
                for (dst, &src) in cols.iter().enumerate() {
                    if r.get(src) {
                        out.set(dst, true);
                    }
                }
                out
            })
            .collect();
        BitMatrix {
            rows: self.rows,
            cols: cols.len(),
            data,
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        BitMatrix {
            rows: rows.len(),
            cols: self.cols,
            data: rows.iter().map(|&i| self.data[i].clone()).collect(),
        }
    }

    /// `[self | rhs]`.
    pub fn hstack(&self, rhs: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.rows != rhs.rows {
            return Err(Gf2Error::DimMismatch {
                op: "hstack",
                expected: self.rows,
                found: rhs.rows,
            });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a.concat(b)).collect();
        Ok(BitMatrix {
            rows: self.rows,
            cols: self.cols + rhs.cols,
            data,
        })
    }

    pub fn vstack(&self, rhs: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != rhs.cols {
            return Err(Gf2Error::DimMismatch {
                op: "vstack",
                expected: self.cols,
                found: rhs.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend(rhs.data.iter().cloned());
        Ok(BitMatrix {
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        })
    }

    /// Gauss-Jordan elimination. The pivot for each column is the first
    /// nonzero row at or below the current row.
    fn reduce(&self, track: bool) -> Echelon {
        let mut m = self.clone();
        let mut transform = track.then(|| BitMatrix::identity(self.rows));
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| m.data[i].get(c)) else {
                continue;
            };
            m.data.swap(r, p);
            if let Some(t) = transform.as_mut() {
                t.data.swap(r, p);
            }
            let pivot_row = m.data[r].clone();
            let pivot_t = transform.as_ref().map(|t| t.data[r].clone());
            for i in 0..self.rows {
                if i != r && m.data[i].get(c) {
                    m.data[i].xor_in_place(&pivot_row);
                    if let (Some(t), Some(pt)) = (transform.as_mut(), pivot_t.as_ref()) {
                        t.data[i].xor_in_place(pt);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon {
            reduced: m,
            pivots,
            transform,
        }
    }

    pub fn rank(&self) -> usize {
        // Cheaper than `reduce`: forward elimination only, on a scratch copy.
        let mut rows: Vec<BitVec> = self.data.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for row in rows.iter_mut().skip(rank + 1) {
                if row.get(c) {
                    row.xor_in_place(&pivot);
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Basis of the right kernel `{x : self·x = 0}`, one vector per free
    /// column in increasing column order.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let ech = self.reduce(false);
        let mut is_pivot = vec![false; self.cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVec::unit(self.cols, f);
                for (i, &p) in ech.pivots.iter().enumerate() {
                    if ech.reduced.data[i].get(f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Basis of the left kernel `{z : zᵀ·self = 0}`.
    pub fn left_kernel_basis(&self) -> Vec<BitVec> {
        self.transpose().kernel_basis()
    }

    /// Inverse of a square matrix; `Ok(None)` when singular.
    ///
    /// # Errors
    /// Returns [`Gf2Error::NotSquare`] for non-square input.
    pub fn invert(&self) -> Result<Option<BitMatrix>, Gf2Error> {
        if self.rows != self.cols {
            return Err(Gf2Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let ech = self.reduce(true);
        if ech.pivots.len() < self.rows {
            return Ok(None);
        }
        Ok(ech.transform)
    }

    /// Some `x` with `self·x = y`, or `Ok(None)` when the system is inconsistent.
    pub fn solve(&self, y: &BitVec) -> Result<Option<BitVec>, Gf2Error> {
        if y.len() != self.rows {
            return Err(Gf2Error::DimMismatch {
                op: "solve",
                expected: self.rows,
                found: y.len(),
            });
        }
        let ech = self.reduce(true);
        let transform = ech.transform.expect("tracked reduction");
        let py = transform.mul_vec(y)?;
        let rank = ech.pivots.len();
        if (rank..self.rows).any(|i| py.get(i)) {
            return Ok(None);
        }
        let mut x = BitVec::zeros(self.cols);
        for (i, &p) in ech.pivots.iter().enumerate() {
            if py.get(i) {
                x.set(p, true);
            }
        }
        Ok(Some(x))
    }

    /// Number of set entries.
    pub fn weight(&self) -> usize {
        self.data.iter().map(BitVec::weight).sum()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        if self.rows <= 32 && self.cols <= 128 {
            for r in &self.data {
                writeln!(f, "  {r}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_row_hand_product() {
        let a = BitMatrix::from_bit_rows(&["11", "01"]);
        let b = BitMatrix::from_bit_rows(&["1", "1"]);
        assert_eq!(a.mul(&b).unwrap(), BitMatrix::from_bit_rows(&["0", "1"]));
    }

    #[test]
    fn identity_and_zero_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = BitMatrix::random(3, 70, &mut rng);
        assert_eq!(BitMatrix::identity(3).mul(&b).unwrap(), b);
        let a = BitMatrix::random(5, 3, &mut rng);
        assert!(a.mul(&BitMatrix::zeros(3, 9)).unwrap().is_zero());
        assert!(a.mul(&BitMatrix::zeros(4, 9)).is_err());
    }

    #[test]
    fn rank_kernel_edge_cases() {
        assert_eq!(BitMatrix::identity(70).rank(), 70);
        assert_eq!(BitMatrix::zeros(5, 9).rank(), 0);
        assert!(BitMatrix::identity(9).kernel_basis().is_empty());
        assert_eq!(BitMatrix::zeros(4, 9).kernel_basis().len(), 9);
    }

    #[test]
    fn kernel_basis_orders_free_columns() {
        let a = BitMatrix::from_bit_rows(&["1100", "0011"]);
        let basis = a.kernel_basis();
        assert_eq!(basis, vec![BitVec::from_bit_str("1100"), BitVec::from_bit_str("0011")]);
    }

    #[test]
    fn invert_and_solve_trivial() {
        assert_eq!(BitMatrix::identity(8).invert().unwrap(), Some(BitMatrix::identity(8)));
        assert_eq!(BitMatrix::zeros(8, 8).invert().unwrap(), None);
        assert!(BitMatrix::zeros(3, 4).invert().is_err());
        let y = BitVec::from_bit_str("10110");
        assert_eq!(BitMatrix::identity(5).solve(&y).unwrap(), Some(y.clone()));
        assert_eq!(BitMatrix::zeros(5, 5).solve(&y).unwrap(), None);
    }
}
