use std::fmt;

use super::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not skew-symmetric at ({row}, {col})")]
    NonSkew { row: usize, col: usize },
    #[error("matrix is not nilpotent: its {0}-th power is nonzero")]
    NotNilpotent(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Dense row-major matrix over an exact field.
#[derive(Clone, PartialEq)]
pub struct Mat<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds from row vectors; `cols` is needed when `rows` is empty.
    pub fn from_rows(rows: Vec<Vec<F>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        Mat {
            rows: n,
            cols,
            data,
        }
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(columns: &[Vec<F>], rows: usize) -> Self {
        Mat::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, c: &F) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "incompatible product");
        let mut out: Mat<F> = Mat::zeros(self.rows, other.cols);
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
                    let v = out.get(i, j).clone() + a.clone() * b.clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.rows, v.len());
        (0..self.cols)
            .map(|j| {
                v.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .fold(F::zero(), |acc, (i, x)| acc + x.clone() * self.get(i, j).clone())
            })
            .collect()
    }

    /// Submatrix on the given row and column indices, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Mat::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Fraction-free Gauss-Jordan reduction.
    ///
    /// Every pivot row ends with the same diagonal value `scale` in its pivot
    /// column and zeros in the other pivot columns. Over polynomial entries
    /// all divisions are exact (entries are minors of the input).
    pub fn echelon(&self) -> Echelon<F> {
        let mut a = self.to_rows();
        let mut pivots = Vec::new();
        let mut prev = F::one();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(p, r);
            let piv = a[r][c].clone();
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = a[i][c].clone();
                for j in 0..self.cols {
                    let lhs = piv.clone() * a[i][j].clone();
                    let v = if f.is_zero() || a[r][j].is_zero() {
                        lhs
                    } else {
                        lhs - f.clone() * a[r][j].clone()
                    };
                    a[i][j] = if prev.is_one() { v } else { v / prev.clone() };
                }
            }
            prev = piv;
            pivots.push(c);
            r += 1;
        }
        a.truncate(r);
        Echelon {
            rows: a,
            pivots,
            scale: prev,
            cols: self.cols,
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Rank and a basis of the right kernel `{v : M v = 0}`.
    pub fn rank_and_kernel(&self) -> (usize, Vec<Vec<F>>) {
        let ech = self.echelon();
        let kernel = ech.kernel();
        (ech.pivots.len(), kernel)
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> Result<F, LinalgError> {
        self.require_square()?;
        let n = self.rows;
        if n == 0 {
            return Ok(F::one());
        }
        let mut a = self.to_rows();
        let mut prev = F::one();
        let mut sign = F::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(F::zero());
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[k][k].clone() * a[i][j].clone() - a[i][k].clone() * a[k][j].clone();
                    a[i][j] = v / prev.clone();
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * a[n - 1][n - 1].clone())
    }

    fn require_square(&self) -> Result<(), LinalgError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn check_skew(&self) -> Result<(), LinalgError> {
        self.require_square()?;
        for i in 0..self.rows {
            for j in i..self.cols {
                let ok = if i == j {
                    self.get(i, i).is_zero()
                } else {
                    (self.get(i, j).clone() + self.get(j, i).clone()).is_zero()
                };
                if !ok {
                    return Err(LinalgError::NonSkew { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// Pfaffian of a skew-symmetric matrix; zero in odd dimension.
    ///
    /// Row expansion up to size 8, skew Gaussian elimination above.
    pub fn pfaffian(&self) -> Result<F, LinalgError> {
        self.check_skew()?;
        if self.rows % 2 == 1 {
            return Ok(F::zero());
        }
        if self.rows <= 8 {
            Ok(pfaffian_expansion(self))
        } else {
            Ok(pfaffian_elimination(self))
        }
    }

    /// Pfaffian by row expansion regardless of size.
    pub fn pfaffian_by_expansion(&self) -> Result<F, LinalgError> {
        self.check_skew()?;
        if self.rows % 2 == 1 {
            return Ok(F::zero());
        }
        Ok(pfaffian_expansion(self))
    }

    /// Pfaffian by Parlett-Reid style skew elimination regardless of size.
    pub fn pfaffian_by_elimination(&self) -> Result<F, LinalgError> {
        self.check_skew()?;
        if self.rows % 2 == 1 {
            return Ok(F::zero());
        }
        Ok(pfaffian_elimination(self))
    }

    /// `sum_k M^k / k!` for nilpotent `M`; a finite exact sum.
    pub fn nilpotent_exponential(&self) -> Result<Self, LinalgError> {
        self.require_square()?;
        let n = self.rows;
        let mut out = Mat::identity(n);
        let mut term = Mat::identity(n);
        for k in 1..=n {
            term = term.mul(self).scale(&F::from_scalar(&Scalar::from(k as i64).recip()));
            if term.is_zero() {
                return Ok(out);
            }
            out = out.add(&term);
        }
        if term.is_zero() {
            Ok(out)
        } else {
            Err(LinalgError::NotNilpotent(n))
        }
    }
}

pub fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(F::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Result of [`Mat::echelon`].
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    /// Nonzero reduced rows, one per pivot.
    pub rows: Vec<Vec<F>>,
    /// Pivot column of each row, increasing.
    pub pivots: Vec<usize>,
    /// Common pivot value of the reduced rows.
    pub scale: F,
    cols: usize,
}

impl<F: Field> Echelon<F> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Kernel basis, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![F::zero(); self.cols];
                v[f] = self.scale.clone();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    v[p] = -row[f].clone();
                }
                v
            })
            .collect()
    }
}

fn pfaffian_expansion<F: Field>(m: &Mat<F>) -> F {
    let idx: Vec<usize> = (0..m.nrows()).collect();
    pf_rec(m, &idx)
}

fn pf_rec<F: Field>(m: &Mat<F>, idx: &[usize]) -> F {
    if idx.is_empty() {
        return F::one();
    }
    let first = idx[0];
    let mut acc = F::zero();
    for k in 1..idx.len() {
        let a = m.get(first, idx[k]);
        if a.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..]
            .iter()
            .enumerate()
            .filter(|(i, _)| *i + 1 != k)
            .map(|(_, &v)| v)
            .collect();
        let term = a.clone() * pf_rec(m, &rest);
        // sign (-1)^(k+1) for the k-th partner, zero-based k >= 1
        acc = if k % 2 == 1 { acc + term } else { acc - term };
    }
    acc
}

fn pfaffian_elimination<F: Field>(m: &Mat<F>) -> F {
    let n = m.nrows();
    let mut a = m.to_rows();
    let mut pf = F::one();
    let mut k = 0;
    while k + 1 < n {
        let Some(p) = (k + 1..n).find(|&j| !a[k][j].is_zero()) else {
            return F::zero();
        };
        if p != k + 1 {
            a.swap(p, k + 1);
            for row in a.iter_mut() {
                row.swap(p, k + 1);
            }
            pf = -pf;
        }
        let piv = a[k][k + 1].clone();
        pf = pf * piv.clone();
        let taus: Vec<(usize, F)> = (k + 2..n)
            .filter(|&i| !a[k][i].is_zero())
            .map(|i| (i, a[k][i].clone() / piv.clone()))
            .collect();
        let pivot_row = a[k + 1].clone();
        for (i, tau) in &taus {
            for j in 0..n {
                if !pivot_row[j].is_zero() {
                    a[*i][j] = a[*i][j].clone() - tau.clone() * pivot_row[j].clone();
                }
            }
        }
        let pivot_col: Vec<F> = (0..n).map(|j| a[j][k + 1].clone()).collect();
        for (i, tau) in &taus {
            for (j, pc) in pivot_col.iter().enumerate() {
                if !pc.is_zero() {
                    a[j][*i] = a[j][*i].clone() - tau.clone() * pc.clone();
                }
            }
        }
        k += 2;
    }
    pf
}

impl<F: Field> fmt::Debug for Mat<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymScalar;

    fn q(n: i64) -> Scalar {
        Scalar::from(n)
    }

    fn int_mat(rows: &[&[i64]]) -> Mat<Scalar> {
        let cols = rows.first().map_or(0, |r| r.len());
        Mat::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect(),
            cols,
        )
    }

    #[test]
    fn zero_matrix_kernel_is_standard_basis() {
        let (rank, kernel) = Mat::<Scalar>::zeros(3, 3).rank_and_kernel();
        assert_eq!(rank, 0);
        assert_eq!(kernel.len(), 3);
        for (i, v) in kernel.iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                assert_eq!(x.is_zero(), i != j);
            }
        }
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let (rank, kernel) = Mat::<Scalar>::identity(2).rank_and_kernel();
        assert_eq!(rank, 2);
        assert!(kernel.is_empty());
    }

    #[test]
    fn empty_matrix_rank_zero() {
        let m = Mat::<Scalar>::zeros(0, 0);
        assert_eq!(m.rank_and_kernel(), (0, vec![]));
        let wide = Mat::<Scalar>::zeros(0, 2);
        assert_eq!(wide.rank_and_kernel().1.len(), 2);
    }

    #[test]
    fn symbolic_rank_one_kernel() {
        let u1 = SymScalar::var(0);
        let u2 = SymScalar::var(1);
        let two = SymScalar::from_scalar(&q(2));
        let m = Mat::from_rows(
            vec![
                vec![u1.clone(), u2.clone()],
                vec![two.clone() * u1.clone(), two * u2.clone()],
            ],
            2,
        );
        let (rank, kernel) = m.rank_and_kernel();
        assert_eq!(rank, 1);
        assert_eq!(kernel.len(), 1);
        let v = &kernel[0];
        // proportional to (u2, -u1)
        assert_eq!(v[0].clone() * (-u1.clone()), v[1].clone() * u2.clone());
        assert!(m.mul_vec(v).iter().all(SymScalar::is_zero));
    }

    #[test]
    fn kernel_vectors_annihilated() {
        let m = int_mat(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let (rank, kernel) = m.rank_and_kernel();
        assert_eq!(rank, 2);
        assert_eq!(kernel.len(), 2);
        for v in &kernel {
            assert!(m.mul_vec(v).iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn pfaffian_small_cases() {
        let m = int_mat(&[&[0, 1], &[-1, 0]]);
        assert_eq!(m.pfaffian().unwrap(), q(1));
        let (a, b) = (q(3), q(-5));
        let mut blk = Mat::<Scalar>::zeros(4, 4);
        blk.set(0, 1, a.clone());
        blk.set(1, 0, -a.clone());
        blk.set(2, 3, b.clone());
        blk.set(3, 2, -b.clone());
        assert_eq!(blk.pfaffian().unwrap(), a * b);
        assert_eq!(Mat::<Scalar>::zeros(3, 3).pfaffian().unwrap(), q(0));
        assert_eq!(Mat::<Scalar>::zeros(0, 0).pfaffian().unwrap(), q(1));
    }

    #[test]
    fn pfaffian_rejects_non_skew() {
        let m = int_mat(&[&[0, 1], &[1, 0]]);
        assert_eq!(m.pfaffian(), Err(LinalgError::NonSkew { row: 0, col: 1 }));
        let d = int_mat(&[&[1, 0], &[0, 0]]);
        assert_eq!(d.pfaffian(), Err(LinalgError::NonSkew { row: 0, col: 0 }));
    }

    #[test]
    fn pfaffian_routes_agree_with_pivoting() {
        // zero in the (0,1) slot forces a swap in the elimination route
        let m = int_mat(&[
            &[0, 0, 2, 1],
            &[0, 0, 3, -1],
            &[-2, -3, 0, 4],
            &[-1, 1, -4, 0],
        ]);
        let e = m.pfaffian_by_expansion().unwrap();
        assert_eq!(e, m.pfaffian_by_elimination().unwrap());
        assert_eq!(e.clone() * e, m.det().unwrap());
    }

    #[test]
    fn exponential_of_zero_and_shift() {
        assert_eq!(
            Mat::<Scalar>::zeros(3, 3).nilpotent_exponential().unwrap(),
            Mat::identity(3)
        );
        let t = Scalar::new(7, 3);
        let mut m = Mat::<Scalar>::zeros(2, 2);
        m.set(0, 1, t.clone());
        let e = m.nilpotent_exponential().unwrap();
        let mut expect = Mat::identity(2);
        expect.set(0, 1, t);
        assert_eq!(e, expect);
    }

    #[test]
    fn exponential_rejects_non_nilpotent() {
        let m = int_mat(&[&[0, 1], &[1, 0]]);
        assert_eq!(m.nilpotent_exponential(), Err(LinalgError::NotNilpotent(2)));
    }

    #[test]
    fn det_known_values() {
        assert_eq!(int_mat(&[&[2, 1], &[7, 4]]).det().unwrap(), q(1));
        assert_eq!(
            int_mat(&[&[0, 2, 1], &[1, 0, 0], &[0, 0, 3]]).det().unwrap(),
            q(-6)
        );
        assert!(int_mat(&[&[1, 2, 3]]).det().is_err());
    }
}
