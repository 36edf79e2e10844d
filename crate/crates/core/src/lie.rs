//! Structure-constant Lie algebras, Jordan-Hölder flags, quotients and
//! semidirect splits.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::linalg::{combine, unit, Field, Mat, Scalar, Subspace, SubspaceError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LieError {
    #[error("bracket index out of range or repeated: [{0}, {1}]")]
    BadBracket(usize, usize),
    #[error("structure constants of length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Jacobi identity fails for {} triple(s)", .0.len())]
    JacobiViolated(Vec<(usize, usize, usize)>),
    #[error("algebra is not nilpotent")]
    NotNilpotent,
    #[error("flag vectors do not form a basis")]
    NotABasis,
    #[error("flag is not Jordan-Hölder: [n, n_{0}] is not contained in n_{prev}", prev = .0 - 1)]
    NotJordanHolder(usize),
    #[error("subspace is not an ideal")]
    NotAnIdeal,
    #[error("subspace is not a subalgebra")]
    NotSubalgebra,
    #[error("no flag subspace equals the given subspace")]
    FlagMismatch,
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
}

/// Finite-dimensional Lie algebra given by structure constants on a labelled basis.
///
/// Only brackets `[X_i, X_j]` with `i < j` are stored; the rest follow by
/// antisymmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    name: String,
    labels: Vec<String>,
    brackets: BTreeMap<(usize, usize), Vec<Scalar>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub jacobi_ok: bool,
    /// Least `c` with the `(c+1)`-th lower central term zero; `None` if not nilpotent.
    pub nilpotency_class: Option<usize>,
    /// Zero-based basis triples `i < j < k` violating Jacobi.
    pub violations: Vec<(usize, usize, usize)>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.jacobi_ok && self.nilpotency_class.is_some()
    }
}

#[derive(Debug, Clone)]
pub struct SeriesAndCenter {
    pub center: Subspace,
    /// `C^1 = L ⊋ C^2 ⊋ ... ⊋ {0}`; for a non-nilpotent algebra the chain ends at its stable term.
    pub lower_central: Vec<Subspace>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub subalgebra: bool,
    pub ideal: bool,
    pub compatible: bool,
}

impl LieAlgebra {
    /// Abelian algebra on the given labels; add brackets with [`LieAlgebra::with_bracket`].
    pub fn abelian(name: impl Into<String>, labels: Vec<String>) -> Self {
        LieAlgebra {
            name: name.into(),
            labels,
            brackets: BTreeMap::new(),
        }
    }

    /// Abelian algebra with labels `X1..Xm`.
    pub fn abelian_standard(name: impl Into<String>, dim: usize) -> Self {
        LieAlgebra::abelian(name, (1..=dim).map(|i| format!("X{i}")).collect())
    }

    /// Sets `[X_i, X_j] = value` (zero-based indices; `i > j` stores the negation).
    pub fn set_bracket(&mut self, i: usize, j: usize, value: Vec<Scalar>) -> Result<(), LieError> {
        let m = self.dim();
        if i == j || i >= m || j >= m {
            return Err(LieError::BadBracket(i, j));
        }
        if value.len() != m {
            return Err(LieError::DimensionMismatch {
                expected: m,
                found: value.len(),
            });
        }
        let (key, value) = if i < j {
            ((i, j), value)
        } else {
            ((j, i), value.into_iter().map(|x| -x).collect())
        };
        if value.iter().all(Scalar::is_zero) {
            self.brackets.remove(&key);
        } else {
            self.brackets.insert(key, value);
        }
        Ok(())
    }

    pub fn with_bracket(mut self, i: usize, j: usize, value: Vec<Scalar>) -> Result<Self, LieError> {
        self.set_bracket(i, j, value)?;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Nonzero stored brackets `(i, j) -> [X_i, X_j]` with `i < j`.
    pub fn stored_brackets(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<Scalar>)> {
        self.brackets.iter()
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<Scalar> {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self
                .brackets
                .get(&(i, j))
                .cloned()
                .unwrap_or_else(|| vec![Scalar::zero(); self.dim()]),
            std::cmp::Ordering::Greater => self
                .bracket_basis(j, i)
                .into_iter()
                .map(|x| -x)
                .collect(),
            std::cmp::Ordering::Equal => vec![Scalar::zero(); self.dim()],
        }
    }

    /// Bracket of two coordinate vectors, extended bilinearly.
    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let m = self.dim();
        let mut out = vec![Scalar::zero(); m];
        for (&(i, j), c) in &self.brackets {
            let coeff = x[i].clone() * y[j].clone() - x[j].clone() * y[i].clone();
            if coeff.is_zero() {
                continue;
            }
            for (o, ck) in out.iter_mut().zip(c) {
                if !ck.is_zero() {
                    *o = o.clone() + coeff.clone() * ck.clone();
                }
            }
        }
        out
    }

    /// Matrix of `ad x = [x, ·]`; column `j` holds `[x, X_j]`.
    pub fn ad_matrix(&self, x: &[Scalar]) -> Mat<Scalar> {
        let m = self.dim();
        let cols: Vec<Vec<Scalar>> = (0..m).map(|j| self.bracket(x, &unit(m, j))).collect();
        Mat::from_columns(&cols, m)
    }

    pub fn validate_structure(&self) -> StructureReport {
        let m = self.dim();
        let mut violations = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let (xi, xj, xk) = (unit(m, i), unit(m, j), unit(m, k));
                    let a = self.bracket(&xi, &self.bracket_basis(j, k));
                    let b = self.bracket(&xj, &self.bracket_basis(k, i));
                    let c = self.bracket(&xk, &self.bracket_basis(i, j));
                    let zero = a
                        .iter()
                        .zip(&b)
                        .zip(&c)
                        .all(|((p, q), r)| (p.clone() + q.clone() + r.clone()).is_zero());
                    if !zero {
                        violations.push((i, j, k));
                    }
                }
            }
        }
        let series = self.lower_central_series();
        let nilpotency_class = if series.last().is_some_and(Subspace::is_zero) {
            Some(series.len() - 1)
        } else {
            None
        };
        StructureReport {
            jacobi_ok: violations.is_empty(),
            nilpotency_class,
            violations,
        }
    }

    /// Fails unless Jacobi holds and the algebra is nilpotent.
    pub fn require_valid(&self) -> Result<StructureReport, LieError> {
        let report = self.validate_structure();
        if !report.jacobi_ok {
            return Err(LieError::JacobiViolated(report.violations));
        }
        if report.nilpotency_class.is_none() {
            return Err(LieError::NotNilpotent);
        }
        Ok(report)
    }

    /// `[L, V]` as a subspace.
    pub fn bracket_with_all(&self, v: &Subspace) -> Subspace {
        let m = self.dim();
        let mut vectors = Vec::new();
        for i in 0..m {
            let e = unit(m, i);
            for b in v.basis() {
                vectors.push(self.bracket(&e, b));
            }
        }
        Subspace::span(m, &vectors)
    }

    /// `[A, B]` as a subspace.
    pub fn bracket_subspaces(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let mut vectors = Vec::new();
        for x in a.basis() {
            for y in b.basis() {
                vectors.push(self.bracket(x, y));
            }
        }
        Subspace::span(self.dim(), &vectors)
    }

    /// Lower central series, ending at `{0}` or at the first repeated term.
    pub fn lower_central_series(&self) -> Vec<Subspace> {
        let mut series = vec![Subspace::whole(self.dim())];
        loop {
            let last = series.last().expect("nonempty");
            if last.is_zero() {
                break;
            }
            let next = self.bracket_with_all(last);
            if next.dim() == last.dim() {
                break;
            }
            series.push(next);
        }
        series
    }

    pub fn center(&self) -> Subspace {
        let m = self.dim();
        let mut rows = Vec::new();
        for i in 0..m {
            rows.extend(self.ad_matrix(&unit(m, i)).to_rows());
        }
        let (_, kernel) = Mat::from_rows(rows, m).rank_and_kernel();
        Subspace::span(m, &kernel)
    }

    pub fn series_and_center(&self) -> SeriesAndCenter {
        SeriesAndCenter {
            center: self.center(),
            lower_central: self.lower_central_series(),
        }
    }

    pub fn is_subalgebra(&self, v: &Subspace) -> bool {
        v.contains_subspace(&self.bracket_subspaces(v, v))
    }

    pub fn is_ideal(&self, v: &Subspace) -> bool {
        v.contains_subspace(&self.bracket_with_all(v))
    }

    /// Classifies the span of `vectors`, which must be independent.
    pub fn subspace_classify(
        &self,
        vectors: Vec<Vec<Scalar>>,
        flag: &Flag,
    ) -> Result<Classification, LieError> {
        let v = Subspace::new(self.dim(), vectors)?;
        Ok(Classification {
            subalgebra: self.is_subalgebra(&v),
            ideal: self.is_ideal(&v),
            compatible: flag.is_compatible(&v),
        })
    }

    /// The same algebra written in the basis given by `flag`.
    pub fn rebase(&self, flag: &Flag) -> Result<LieAlgebra, LieError> {
        let m = self.dim();
        if flag.len() != m {
            return Err(LieError::NotABasis);
        }
        let inverse = flag.inverse_matrix()?;
        let vectors = flag.vectors();
        let labels = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| match unit_index(v) {
                Some(k) => self.labels[k].clone(),
                None => format!("Y{}", i + 1),
            })
            .collect();
        let mut out = LieAlgebra::abelian(self.name.clone(), labels);
        for i in 0..m {
            for j in i + 1..m {
                let b = self.bracket(&vectors[i], &vectors[j]);
                out.set_bracket(i, j, inverse.mul_vec(&b))?;
            }
        }
        Ok(out)
    }

    /// The subalgebra spanned by `basis`, written in that basis.
    pub fn restrict(&self, basis: &Subspace, name: impl Into<String>) -> Result<LieAlgebra, LieError> {
        let r = basis.dim();
        let labels = basis
            .basis()
            .iter()
            .enumerate()
            .map(|(i, v)| match unit_index(v) {
                Some(k) => self.labels[k].clone(),
                None => format!("B{}", i + 1),
            })
            .collect();
        let mut out = LieAlgebra::abelian(name, labels);
        for a in 0..r {
            for b in a + 1..r {
                let br = self.bracket(&basis.basis()[a], &basis.basis()[b]);
                let coords = basis.coordinates_of(&br).ok_or(LieError::NotSubalgebra)?;
                out.set_bracket(a, b, coords)?;
            }
        }
        Ok(out)
    }

    /// Algebra on the first `k` basis vectors, which must span an ideal
    /// containing all their brackets.
    pub fn truncate(&self, k: usize) -> LieAlgebra {
        let mut out = LieAlgebra::abelian(self.name.clone(), self.labels[..k].to_vec());
        for (&(i, j), c) in &self.brackets {
            if j < k {
                debug_assert!(c[k..].iter().all(Scalar::is_zero));
                out.brackets.insert((i, j), c[..k].to_vec());
            }
        }
        out.brackets.retain(|_, c| !c.iter().all(Scalar::is_zero));
        out
    }

    /// Quotient by the span of the first `k` basis vectors (assumed an ideal).
    pub fn quotient_by_prefix(&self, k: usize) -> LieAlgebra {
        let m = self.dim();
        let mut out = LieAlgebra::abelian(self.name.clone(), self.labels[k..].to_vec());
        for (&(i, j), c) in &self.brackets {
            if i >= k && j >= k {
                let tail = c[k..m].to_vec();
                if !tail.iter().all(Scalar::is_zero) {
                    out.brackets.insert((i - k, j - k), tail);
                }
            }
        }
        out
    }
}

fn unit_index(v: &[Scalar]) -> Option<usize> {
    let mut found = None;
    for (i, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        if !x.is_one() || found.is_some() {
            return None;
        }
        found = Some(i);
    }
    found
}

/// Ordered basis `X_1..X_m` (as storage-coordinate vectors) defining `n_j = span(X_1..X_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Flag {
    vectors: Vec<Vec<Scalar>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FlagReport {
    pub ok: bool,
    /// One-based `j` of the first failing containment `[n, n_j] ⊆ n_{j-1}`.
    pub first_violation: Option<usize>,
}

impl Flag {
    pub fn new(vectors: Vec<Vec<Scalar>>) -> Self {
        Flag { vectors }
    }

    pub fn standard(dim: usize) -> Self {
        Flag::new((0..dim).map(|i| unit(dim, i)).collect())
    }

    /// Flag whose `j`-th vector is storage basis vector `order[j]` (zero-based).
    pub fn from_order(dim: usize, order: &[usize]) -> Self {
        Flag::new(order.iter().map(|&i| unit(dim, i)).collect())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<Scalar>] {
        &self.vectors
    }

    /// Storage index of each flag vector, when the flag is a permutation of the basis.
    pub fn as_order(&self) -> Option<Vec<usize>> {
        self.vectors.iter().map(|v| unit_index(v)).collect()
    }

    /// `n_j` for `j = 0..=m`.
    pub fn prefix(&self, j: usize) -> Subspace {
        let ambient = self.vectors.first().map_or(0, Vec::len);
        Subspace::span(ambient, &self.vectors[..j])
    }

    fn basis_matrix(&self) -> Mat<Scalar> {
        let m = self.vectors.len();
        Mat::from_columns(&self.vectors, m)
    }

    /// Matrix taking storage coordinates to flag coordinates.
    pub fn inverse_matrix(&self) -> Result<Mat<Scalar>, LieError> {
        let m = self.vectors.len();
        if self.vectors.iter().any(|v| v.len() != m) {
            return Err(LieError::NotABasis);
        }
        let p = self.basis_matrix();
        let mut aug = Mat::<Scalar>::zeros(m, 2 * m);
        for i in 0..m {
            for j in 0..m {
                aug.set(i, j, p.get(i, j).clone());
            }
            aug.set(i, m + i, Scalar::one());
        }
        let ech = aug.echelon();
        if ech.rank() < m || ech.pivots.iter().take(m).enumerate().any(|(i, &p)| p != i) {
            return Err(LieError::NotABasis);
        }
        Ok(Mat::from_fn(m, m, |i, j| {
            ech.rows[i][m + j].clone() / ech.scale.clone()
        }))
    }

    /// `V` is compatible iff the flag vectors lying in `V` span it.
    pub fn is_compatible(&self, v: &Subspace) -> bool {
        let inside = self.vectors.iter().filter(|x| v.contains(x)).count();
        inside == v.dim()
    }

    pub fn validate(&self, alg: &LieAlgebra) -> Result<FlagReport, LieError> {
        let m = alg.dim();
        if self.vectors.len() != m {
            return Err(LieError::NotABasis);
        }
        self.inverse_matrix()?;
        let mut prev = Subspace::zero(m);
        for j in 1..=m {
            let next = prev.sum(&Subspace::span(m, &self.vectors[j - 1..j]));
            let image = alg.bracket_with_all(&next);
            if !prev.contains_subspace(&image) {
                return Ok(FlagReport {
                    ok: false,
                    first_violation: Some(j),
                });
            }
            prev = next;
        }
        Ok(FlagReport {
            ok: true,
            first_violation: None,
        })
    }
}

/// Vector-space decomposition `whole = m_part ∔ n_part`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemidirectSplit {
    pub m_part: Subspace,
    pub n_part: Subspace,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SplitWitness {
    /// `[x, y] ∉ n_part` for basis `x` and `y ∈ n_part`.
    NotIdeal {
        x: Vec<Scalar>,
        y: Vec<Scalar>,
        bracket: Vec<Scalar>,
    },
    /// `[x, y] ∉ m_part` for `x, y ∈ m_part`.
    NotSubalgebra {
        x: Vec<Scalar>,
        y: Vec<Scalar>,
        bracket: Vec<Scalar>,
    },
    NotDirectSum {
        dim_m: usize,
        dim_n: usize,
        dim_sum: usize,
        ambient: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitReport {
    pub ok: bool,
    pub witnesses: Vec<SplitWitness>,
}

impl LieAlgebra {
    pub fn semidirect_split_check(&self, split: &SemidirectSplit) -> SplitReport {
        let m = self.dim();
        let mut witnesses = Vec::new();
        let sum = split.m_part.sum(&split.n_part);
        if sum.dim() != m || split.m_part.dim() + split.n_part.dim() != m {
            witnesses.push(SplitWitness::NotDirectSum {
                dim_m: split.m_part.dim(),
                dim_n: split.n_part.dim(),
                dim_sum: sum.dim(),
                ambient: m,
            });
        }
        'ideal: for i in 0..m {
            let x = unit(m, i);
            for y in split.n_part.basis() {
                let b = self.bracket(&x, y);
                if !split.n_part.contains(&b) {
                    witnesses.push(SplitWitness::NotIdeal {
                        x,
                        y: y.clone(),
                        bracket: b,
                    });
                    break 'ideal;
                }
            }
        }
        'sub: for (a, x) in split.m_part.basis().iter().enumerate() {
            for y in &split.m_part.basis()[a + 1..] {
                let b = self.bracket(x, y);
                if !split.m_part.contains(&b) {
                    witnesses.push(SplitWitness::NotSubalgebra {
                        x: x.clone(),
                        y: y.clone(),
                        bracket: b,
                    });
                    break 'sub;
                }
            }
        }
        SplitReport {
            ok: witnesses.is_empty(),
            witnesses,
        }
    }
}

/// A validated algebra together with a validated Jordan-Hölder flag, and the
/// algebra rewritten in flag coordinates.
///
/// Functionals, group elements and jump sets are all expressed in the flag
/// basis `Y_1..Y_m` of [`FlaggedAlgebra::adapted`].
#[derive(Debug, Clone)]
pub struct FlaggedAlgebra {
    original: LieAlgebra,
    flag: Flag,
    adapted: LieAlgebra,
    to_flag: Mat<Scalar>,
}

impl FlaggedAlgebra {
    pub fn new(original: LieAlgebra, flag: Flag) -> Result<Self, LieError> {
        original.require_valid()?;
        let report = flag.validate(&original)?;
        if let Some(j) = report.first_violation {
            return Err(LieError::NotJordanHolder(j));
        }
        let adapted = original.rebase(&flag)?;
        let to_flag = flag.inverse_matrix()?;
        Ok(FlaggedAlgebra {
            original,
            flag,
            adapted,
            to_flag,
        })
    }

    /// Algebra already written in a Jordan-Hölder basis (standard flag).
    pub fn standard(adapted: LieAlgebra) -> Result<Self, LieError> {
        let m = adapted.dim();
        FlaggedAlgebra::new(adapted, Flag::standard(m))
    }

    /// Skips validation; `adapted` must be nilpotent with the standard flag Jordan-Hölder.
    fn standard_unchecked(adapted: LieAlgebra) -> Self {
        let m = adapted.dim();
        FlaggedAlgebra {
            original: adapted.clone(),
            flag: Flag::standard(m),
            adapted,
            to_flag: Mat::identity(m),
        }
    }

    pub fn original(&self) -> &LieAlgebra {
        &self.original
    }

    pub fn flag(&self) -> &Flag {
        &self.flag
    }

    pub fn adapted(&self) -> &LieAlgebra {
        &self.adapted
    }

    pub fn dim(&self) -> usize {
        self.adapted.dim()
    }

    pub fn to_flag_coords(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.to_flag.mul_vec(v)
    }

    pub fn from_flag_coords(&self, v: &[Scalar]) -> Vec<Scalar> {
        combine(self.flag.vectors(), v, self.dim())
    }

    pub fn subspace_to_flag(&self, v: &Subspace) -> Subspace {
        let vectors: Vec<Vec<Scalar>> = v.basis().iter().map(|x| self.to_flag_coords(x)).collect();
        Subspace::span(self.dim(), &vectors)
    }

    pub fn subspace_from_flag(&self, v: &Subspace) -> Subspace {
        let vectors: Vec<Vec<Scalar>> = v.basis().iter().map(|x| self.from_flag_coords(x)).collect();
        Subspace::span(self.dim(), &vectors)
    }

    /// `n_k` with the truncated flag.
    pub fn truncate(&self, k: usize) -> FlaggedAlgebra {
        FlaggedAlgebra::standard_unchecked(self.adapted.truncate(k))
    }

    /// `n / n_k` with the induced flag.
    pub fn quotient(&self, k: usize) -> FlaggedAlgebra {
        FlaggedAlgebra::standard_unchecked(self.adapted.quotient_by_prefix(k))
    }

    /// Position `k` with `n_k = v` (`v` in flag coordinates).
    pub fn flag_position(&self, v: &Subspace) -> Option<usize> {
        let k = v.dim();
        (Subspace::coordinate(self.dim(), &(0..k).collect::<Vec<_>>()) == *v).then_some(k)
    }

    pub fn center(&self) -> Subspace {
        self.adapted.center()
    }
}

/// Quotient of `alg` by the ideal `ideal` (storage coordinates), which must be a flag subspace.
pub fn quotient(
    alg: &LieAlgebra,
    ideal: &Subspace,
    flag: &Flag,
) -> Result<(LieAlgebra, Flag), LieError> {
    if !alg.is_ideal(ideal) {
        return Err(LieError::NotAnIdeal);
    }
    let fa = FlaggedAlgebra::new(alg.clone(), flag.clone())?;
    let k = fa
        .flag_position(&fa.subspace_to_flag(ideal))
        .ok_or(LieError::FlagMismatch)?;
    let q = fa.adapted().quotient_by_prefix(k);
    let induced = Flag::standard(q.dim());
    Ok((q, induced))
}
