use super::mat::{Echelon, Mat};
use super::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubspaceError {
    #[error("spanning set is linearly dependent ({given} vectors, rank {rank})")]
    DependentSpanningSet { given: usize, rank: usize },
    #[error("vector of length {found} in a {ambient}-dimensional space")]
    WrongLength { ambient: usize, found: usize },
}

/// Linear subspace of `F^ambient`, held as a list of independent vectors.
#[derive(Clone, Debug)]
pub struct Subspace<F = Scalar> {
    ambient: usize,
    basis: Vec<Vec<F>>,
}

impl<F: Field> Subspace<F> {
    /// Wraps an independent list of vectors; fails if they are dependent.
    pub fn new(ambient: usize, basis: Vec<Vec<F>>) -> Result<Self, SubspaceError> {
        check_lengths(ambient, &basis)?;
        let rank = rows_matrix(ambient, &basis).rank();
        if rank != basis.len() {
            return Err(SubspaceError::DependentSpanningSet {
                given: basis.len(),
                rank,
            });
        }
        Ok(Subspace { ambient, basis })
    }

    /// Span of arbitrary vectors; a basis is extracted.
    pub fn span(ambient: usize, vectors: &[Vec<F>]) -> Self {
        let mut basis: Vec<Vec<F>> = Vec::new();
        for v in vectors {
            assert_eq!(v.len(), ambient, "vector length mismatch");
            if v.iter().all(F::is_zero) {
                continue;
            }
            let mut candidate = basis.clone();
            candidate.push(v.clone());
            if rows_matrix(ambient, &candidate).rank() == candidate.len() {
                basis = candidate;
            }
        }
        Subspace { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn whole(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: (0..ambient).map(|i| unit(ambient, i)).collect(),
        }
    }

    /// Span of the coordinate vectors with the given indices.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Self {
        Subspace::span(
            ambient,
            &indices.iter().map(|&i| unit(ambient, i)).collect::<Vec<_>>(),
        )
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    pub fn contains(&self, v: &[F]) -> bool {
        if v.iter().all(F::is_zero) {
            return true;
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        rows_matrix(self.ambient, &rows).rank() == self.dim()
    }

    pub fn contains_subspace(&self, other: &Subspace<F>) -> bool {
        self.sum(other).dim() == self.dim()
    }

    pub fn sum(&self, other: &Subspace<F>) -> Subspace<F> {
        assert_eq!(self.ambient, other.ambient);
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, &all)
    }

    pub fn intersection_dim(&self, other: &Subspace<F>) -> usize {
        self.dim() + other.dim() - self.sum(other).dim()
    }

    /// `self ∩ other` computed from the kernel of `[A | -B]`.
    pub fn intersection(&self, other: &Subspace<F>) -> Subspace<F> {
        let (a, b) = (self.dim(), other.dim());
        if a == 0 || b == 0 {
            return Subspace::zero(self.ambient);
        }
        let m = Mat::from_fn(self.ambient, a + b, |i, j| {
            if j < a {
                self.basis[j][i].clone()
            } else {
                -other.basis[j - a][i].clone()
            }
        });
        let (_, kernel) = m.rank_and_kernel();
        let vectors: Vec<Vec<F>> = kernel
            .iter()
            .map(|k| combine(&self.basis, &k[..a], self.ambient))
            .collect();
        Subspace::span(self.ambient, &vectors)
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Row-reduced basis; equal subspaces have equal canonical bases up to scaling.
    pub fn echelon(&self) -> Echelon<F> {
        rows_matrix(self.ambient, &self.basis).echelon()
    }

    /// Coordinates of `v` in this basis, if `v` lies in the subspace.
    pub fn coordinates_of(&self, v: &[F]) -> Option<Vec<F>> {
        let n = self.dim();
        let mut cols = self.basis.clone();
        cols.push(v.iter().map(|x| -x.clone()).collect());
        let m = Mat::from_columns(&cols, self.ambient);
        let (_, kernel) = m.rank_and_kernel();
        let k = kernel.into_iter().find(|k| !k[n].is_zero())?;
        let s = k[n].clone();
        Some(k[..n].iter().map(|x| x.clone() / s.clone()).collect())
    }
}

impl<F: Field> PartialEq for Subspace<F> {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient
            && self.dim() == other.dim()
            && self.contains_subspace(other)
    }
}

pub fn unit<F: Field>(n: usize, i: usize) -> Vec<F> {
    let mut v = vec![F::zero(); n];
    v[i] = F::one();
    v
}

/// `sum_k coeffs[k] * vectors[k]`.
pub fn combine<F: Field>(vectors: &[Vec<F>], coeffs: &[F], ambient: usize) -> Vec<F> {
    let mut out = vec![F::zero(); ambient];
    for (v, c) in vectors.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            if !x.is_zero() {
                *o = o.clone() + c.clone() * x.clone();
            }
        }
    }
    out
}

fn rows_matrix<F: Field>(ambient: usize, rows: &[Vec<F>]) -> Mat<F> {
    Mat::from_rows(rows.to_vec(), ambient)
}

fn check_lengths<F>(ambient: usize, vectors: &[Vec<F>]) -> Result<(), SubspaceError> {
    match vectors.iter().find(|v| v.len() != ambient) {
        Some(v) => Err(SubspaceError::WrongLength {
            ambient,
            found: v.len(),
        }),
        None => Ok(()),
    }
}
