//! Coadjoint action, isotropy algebras, jump sets and the invariants built on
//! them: the generic jump set, flatness, strata and the square-integrability
//! constant.
//!
//! Everything here works in the flag basis `Y_1..Y_m` of a
//! [`FlaggedAlgebra`]: a functional is the vector `(ξ(Y_1), ..., ξ(Y_m))`
//! and jump-set indices are one-based flag positions.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::lie::FlaggedAlgebra;
use crate::linalg::{Field, LinalgError, Mat, Scalar, Subspace, SymScalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoadjointError {
    #[error("functional has {found} coordinates, algebra has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    NotNilpotent(#[from] LinalgError),
    #[error("sampled mode needs at least one trial")]
    SampleBudgetExhausted,
    #[error("Pfaffian on jump set {0} vanishes; it is not the jump set of the functional")]
    DegenerateOrbit(JumpSet),
    #[error("jump set {0} must have even size at least 2")]
    InvalidJumpSet(JumpSet),
}

/// Linear functional in the dual flag basis.
#[derive(Clone, PartialEq, Debug)]
pub struct Functional<F = Scalar> {
    coords: Vec<F>,
}

impl<F: Field> Functional<F> {
    pub fn new(coords: Vec<F>) -> Self {
        Functional { coords }
    }

    pub fn zero(dim: usize) -> Self {
        Functional::new(vec![F::zero(); dim])
    }

    pub fn coords(&self) -> &[F] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<F> {
        self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(F::is_zero)
    }

    pub fn apply(&self, x: &[Scalar]) -> F {
        self.coords
            .iter()
            .zip(x)
            .filter(|(_, c)| !c.is_zero())
            .fold(F::zero(), |acc, (f, c)| acc + f.clone() * F::from_scalar(c))
    }

    /// Restriction to `n_k = span(Y_1..Y_k)`.
    pub fn restrict(&self, k: usize) -> Functional<F> {
        Functional::new(self.coords[..k].to_vec())
    }

    pub fn tail(&self, k: usize) -> Functional<F> {
        Functional::new(self.coords[k..].to_vec())
    }
}

impl Functional<Scalar> {
    /// The generic functional `(u_1, ..., u_m)`.
    pub fn symbolic(dim: usize) -> Functional<SymScalar> {
        Functional::new((0..dim).map(SymScalar::var).collect())
    }
}

impl fmt::Display for Functional<Scalar> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Strictly increasing one-based flag positions.
///
/// `Ord` is the total order `≺`: `e1 ≺ e2` iff `min(e1 \ e2) < min(e2 \ e1)`
/// with `min ∅ = ∞`, so `∅` is the largest set and `{1..m}` the smallest.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(transparent)]
pub struct JumpSet(Vec<usize>);

impl JumpSet {
    /// Sorts and deduplicates.
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        JumpSet(indices)
    }

    pub fn empty() -> Self {
        JumpSet(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    pub fn shifted(&self, k: usize) -> JumpSet {
        JumpSet(self.0.iter().map(|j| j + k).collect())
    }

    /// Disjoint union; `None` if the sets overlap.
    pub fn disjoint_union(&self, other: &JumpSet) -> Option<JumpSet> {
        if self.0.iter().any(|j| other.contains(*j)) {
            return None;
        }
        let mut all = self.0.clone();
        all.extend_from_slice(&other.0);
        Some(JumpSet::new(all))
    }

    /// Zero-based positions, for indexing.
    pub fn zero_based(&self) -> Vec<usize> {
        self.0.iter().map(|j| j - 1).collect()
    }
}

impl Ord for JumpSet {
    fn cmp(&self, other: &Self) -> Ordering {
        let first_only = |a: &JumpSet, b: &JumpSet| a.0.iter().copied().find(|j| !b.contains(*j));
        match (first_only(self, other), first_only(other, self)) {
            (None, None) => Ordering::Equal,
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (Some(a), Some(b)) => a.cmp(&b),
        }
    }
}

impl PartialOrd for JumpSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for JumpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// `e1` versus `e2` in the `≺` order.
pub fn jumpset_compare(e1: &JumpSet, e2: &JumpSet) -> Ordering {
    e1.cmp(e2)
}

/// `exp(x_1) ··· exp(x_r)`, kept factored; factors are flag coordinates.
#[derive(Clone, PartialEq, Debug, Default, Serialize)]
pub struct GroupElement {
    factors: Vec<Vec<Scalar>>,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement::default()
    }

    pub fn new(factors: Vec<Vec<Scalar>>) -> Self {
        GroupElement { factors }
    }

    pub fn factors(&self) -> &[Vec<Scalar>] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// Reversed list with negated factors.
    pub fn inverse(&self) -> Self {
        GroupElement {
            factors: self
                .factors
                .iter()
                .rev()
                .map(|x| x.iter().map(|c| -c.clone()).collect())
                .collect(),
        }
    }

    /// `self · other`.
    pub fn compose(&self, other: &GroupElement) -> Self {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        GroupElement { factors }
    }
}

#[derive(Clone, Debug)]
pub struct Isotropy<F: Field = Scalar> {
    /// `B_ij = ξ([Y_i, Y_j])`.
    pub form: Mat<F>,
    pub isotropy: Subspace<F>,
}

fn check_dim(alg: &FlaggedAlgebra, found: usize) -> Result<(), CoadjointError> {
    if alg.dim() == found {
        Ok(())
    } else {
        Err(CoadjointError::DimensionMismatch {
            expected: alg.dim(),
            found,
        })
    }
}

/// The skew form `B_ξ(Y_i, Y_j) = ξ([Y_i, Y_j])`.
pub fn skew_form<F: Field>(alg: &FlaggedAlgebra, xi: &Functional<F>) -> Mat<F> {
    let m = alg.dim();
    let mut b = Mat::zeros(m, m);
    for (&(i, j), c) in alg.adapted().stored_brackets() {
        let v = xi.apply(c);
        if !v.is_zero() {
            b.set(j, i, -v.clone());
            b.set(i, j, v);
        }
    }
    b
}

pub fn isotropy<F: Field>(alg: &FlaggedAlgebra, xi: &Functional<F>) -> Result<Isotropy<F>, CoadjointError> {
    check_dim(alg, xi.dim())?;
    let form = skew_form(alg, xi);
    let (_, kernel) = form.rank_and_kernel();
    let isotropy = Subspace::span(alg.dim(), &kernel);
    Ok(Isotropy { form, isotropy })
}

/// `{x ∈ V : ξ([x, V]) = 0}` for `V = span(basis)`, the isotropy of `ξ|_V`
/// inside the subalgebra `V`.
pub fn relative_isotropy(alg: &FlaggedAlgebra, xi: &Functional<Scalar>, v: &Subspace) -> Subspace {
    let r = v.dim();
    let form = Mat::from_fn(r, r, |a, b| {
        xi.apply(&alg.adapted().bracket(&v.basis()[a], &v.basis()[b]))
    });
    let (_, kernel) = form.rank_and_kernel();
    let vectors: Vec<Vec<Scalar>> = kernel
        .iter()
        .map(|k| crate::linalg::combine(v.basis(), k, alg.dim()))
        .collect();
    Subspace::span(alg.dim(), &vectors)
}

/// Matrix of `exp(-ad x)` in the flag basis.
pub fn exp_neg_ad(alg: &FlaggedAlgebra, x: &[Scalar]) -> Result<Mat<Scalar>, LinalgError> {
    alg.adapted().ad_matrix(x).neg().nilpotent_exponential()
}

/// `Ad*(g) ξ = ξ ∘ exp(-ad x_1) ∘ ... ∘ exp(-ad x_r)` evaluated factor by
/// factor from the right.
pub fn coadjoint_act<F: Field>(
    alg: &FlaggedAlgebra,
    g: &GroupElement,
    xi: &Functional<F>,
) -> Result<Functional<F>, CoadjointError> {
    check_dim(alg, xi.dim())?;
    let mut coords = xi.coords.clone();
    for x in g.factors.iter().rev() {
        check_dim(alg, x.len())?;
        if x.iter().all(Scalar::is_zero) {
            continue;
        }
        let e = exp_neg_ad(alg, x)?;
        let lifted = Mat::from_fn(e.nrows(), e.ncols(), |i, j| F::from_scalar(e.get(i, j)));
        coords = lifted.vec_mul(&coords);
    }
    Ok(Functional::new(coords))
}

/// Jump set of `ξ`: `j` is included iff `Y_j ∉ n_{j-1} + n(ξ)`.
///
/// Uses `dim(n_j + n(ξ)) = m - rank B + rank B[:, 1..j]`, so the jump set is
/// the set of pivot columns of `B_ξ`.
pub fn jump_set<F: Field>(alg: &FlaggedAlgebra, xi: &Functional<F>) -> Result<JumpSet, CoadjointError> {
    check_dim(alg, xi.dim())?;
    Ok(pivot_jump_set(&skew_form(alg, xi)))
}

fn pivot_jump_set<F: Field>(form: &Mat<F>) -> JumpSet {
    JumpSet(form.echelon().pivots.iter().map(|p| p + 1).collect())
}

/// Integer-box sampling parameters for generic computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SamplingConfig {
    pub trials: usize,
    pub seed: u64,
    /// Coordinates are uniform integers in `[-bound, bound]`.
    pub bound: i64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            trials: 1000,
            seed: 0,
            bound: 1000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenericMode {
    Symbolic,
    Sampled(SamplingConfig),
}

/// Deterministic generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn random_vector(rng: &mut impl Rng, dim: usize, bound: i64) -> Vec<Scalar> {
    (0..dim)
        .map(|_| Scalar::from(rng.random_range(-bound..=bound)))
        .collect()
}

/// Uniform integer functional, resampled until nonzero.
pub fn random_functional(rng: &mut impl Rng, dim: usize, bound: i64) -> Functional {
    loop {
        let v = random_vector(rng, dim, bound);
        if dim == 0 || v.iter().any(|x| !x.is_zero()) {
            return Functional::new(v);
        }
    }
}

/// The `≺`-minimum jump set `e(n)`.
pub fn generic_jump_set(alg: &FlaggedAlgebra, mode: GenericMode) -> Result<JumpSet, CoadjointError> {
    match mode {
        GenericMode::Symbolic => jump_set(alg, &Functional::symbolic(alg.dim())),
        GenericMode::Sampled(cfg) => {
            if cfg.trials == 0 {
                return Err(CoadjointError::SampleBudgetExhausted);
            }
            let sets = (0..cfg.trials as u64)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(cfg.seed, t);
                    let xi = random_functional(&mut rng, alg.dim(), cfg.bound);
                    jump_set(alg, &xi)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(sets.into_iter().min().expect("at least one trial"))
        }
    }
}

/// Generic rank of the symbolic skew form.
pub fn generic_rank(alg: &FlaggedAlgebra) -> usize {
    skew_form(alg, &Functional::symbolic(alg.dim())).rank()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatReport {
    pub flat: bool,
    pub center_dim: usize,
    pub generic_isotropy_dim: usize,
    /// A functional with isotropy equal to the center, when flat.
    #[serde(serialize_with = "serialize_opt_functional")]
    pub witness: Option<Functional>,
}

fn serialize_opt_functional<S: serde::Serializer>(
    f: &Option<Functional>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match f {
        Some(f) => s.collect_seq(f.coords()),
        None => s.serialize_none(),
    }
}

/// Whether generic isotropy equals the center.
pub fn flat_orbit_test(alg: &FlaggedAlgebra) -> FlatReport {
    let m = alg.dim();
    let center = alg.center();
    let generic_isotropy_dim = m - generic_rank(alg);
    let flat = generic_isotropy_dim == center.dim();
    let witness = if flat { find_flat_witness(alg, &center) } else { None };
    FlatReport {
        flat,
        center_dim: center.dim(),
        generic_isotropy_dim,
        witness,
    }
}

const WITNESS_TRIALS: u64 = 256;

fn find_flat_witness(alg: &FlaggedAlgebra, center: &Subspace) -> Option<Functional> {
    let m = alg.dim();
    let is_witness = |xi: &Functional| {
        isotropy(alg, xi)
            .map(|iso| iso.isotropy.dim() == center.dim())
            .unwrap_or(false)
    };
    let simple = std::iter::once(Functional::zero(m))
        .chain((0..m).map(|i| Functional::new(crate::linalg::unit(m, i))));
    for xi in simple {
        if is_witness(&xi) {
            return Some(xi);
        }
    }
    (0..WITNESS_TRIALS)
        .map(|t| random_functional(&mut trial_rng(0, t), m, 1000))
        .find(|xi| is_witness(xi))
}

/// `(2π)^{d/2} / |Pf_e(ξ)|`, kept as the pair `(d/2, 1/|Pf_e(ξ)|)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SquareIntegrabilityData {
    pub jump_set: JumpSet,
    pub orbit_dim: usize,
    pub two_pi_power: usize,
    pub pfaffian_abs: Scalar,
    pub magnitude: Scalar,
}

/// Pfaffian of `B_ξ` on rows and columns `e`, in increasing flag order.
pub fn restricted_pfaffian<F: Field>(
    alg: &FlaggedAlgebra,
    xi: &Functional<F>,
    e: &JumpSet,
) -> Result<F, CoadjointError> {
    check_dim(alg, xi.dim())?;
    let idx = e.zero_based();
    Ok(skew_form(alg, xi).select(&idx, &idx).pfaffian()?)
}

pub fn square_integrability_constant(
    alg: &FlaggedAlgebra,
    xi: &Functional,
    e: &JumpSet,
) -> Result<SquareIntegrabilityData, CoadjointError> {
    if e.len() < 2 || e.len() % 2 == 1 || e.indices().iter().any(|&j| j == 0 || j > alg.dim()) {
        return Err(CoadjointError::InvalidJumpSet(e.clone()));
    }
    let pf = restricted_pfaffian(alg, xi, e)?;
    if pf.is_zero() {
        return Err(CoadjointError::DegenerateOrbit(e.clone()));
    }
    let pfaffian_abs = pf.abs();
    Ok(SquareIntegrabilityData {
        jump_set: e.clone(),
        orbit_dim: e.len(),
        two_pi_power: e.len() / 2,
        magnitude: pfaffian_abs.recip(),
        pfaffian_abs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StratumKind {
    /// `J(ξ) = e(n)`.
    Coarse,
    /// `J(ξ|n_j) = e(n_j)` for every `j = 1..m`.
    Fine,
}

/// Generic jump sets `e(n_j)` of every flag truncation, computed once.
#[derive(Clone, Debug)]
pub struct Strata {
    /// `generic[j - 1] = e(n_j)`.
    generic: Vec<JumpSet>,
}

impl Strata {
    pub fn new(alg: &FlaggedAlgebra) -> Self {
        let m = alg.dim();
        let generic = (1..=m)
            .into_par_iter()
            .map(|j| {
                generic_jump_set(&alg.truncate(j), GenericMode::Symbolic)
                    .expect("symbolic mode is infallible")
            })
            .collect();
        Strata { generic }
    }

    pub fn generic(&self) -> &JumpSet {
        self.generic.last().expect("dimension at least 1")
    }

    pub fn generic_of_prefix(&self, j: usize) -> &JumpSet {
        &self.generic[j - 1]
    }

    pub fn contains(&self, alg: &FlaggedAlgebra, xi: &Functional, kind: StratumKind) -> Result<bool, CoadjointError> {
        check_dim(alg, xi.dim())?;
        let m = alg.dim();
        match kind {
            StratumKind::Coarse => Ok(jump_set(alg, xi)? == *self.generic()),
            StratumKind::Fine => {
                for j in 1..=m {
                    let sub = alg.truncate(j);
                    if jump_set(&sub, &xi.restrict(j))? != self.generic[j - 1] {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

pub fn stratum_membership(
    alg: &FlaggedAlgebra,
    xi: &Functional,
    kind: StratumKind,
) -> Result<bool, CoadjointError> {
    Strata::new(alg).contains(alg, xi, kind)
}
