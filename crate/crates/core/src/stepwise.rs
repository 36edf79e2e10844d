//! Stepwise decompositions `n_1 ⊆ ... ⊆ n_q = n` with layers `m_j = z_j ∔ V_j`:
//! hypothesis checks, the set `X` of functionals with generic truncations,
//! canonical orbit representatives, and the isotropy and jump-set identities
//! for semidirect splits `ñ = m ⋉ n`.
//!
//! [`StepwiseData`] is stored in the algebra's own coordinates; [`Stepwise`]
//! converts it to flag coordinates once and answers every query there.

use rayon::prelude::*;
use serde::Serialize;

use crate::coadjoint::{
    coadjoint_act, flat_orbit_test, generic_jump_set, isotropy, jump_set, relative_isotropy,
    square_integrability_constant, CoadjointError, Functional, GenericMode, GroupElement, JumpSet,
    SquareIntegrabilityData,
};
use crate::lie::{Flag, FlaggedAlgebra, LieAlgebra, LieError, SemidirectSplit};
use crate::linalg::{combine, unit, Field, Scalar, Subspace};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StepwiseError {
    #[error("chain position {position} does not mark a subspace of the {dim}-dimensional flag")]
    ChainNotInFlag { position: usize, dim: usize },
    #[error("chain must increase strictly and end at the dimension {dim}")]
    ChainDoesNotReachTop { dim: usize },
    #[error("{chain} chain positions but {layers} layers")]
    LayerCount { chain: usize, layers: usize },
    #[error("layer subspace lives in dimension {found}, algebra has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("functional is not in X: truncation to n_{layer} has jump set {found}, generic is {generic}")]
    NotInX {
        layer: usize,
        found: JumpSet,
        generic: JumpSet,
    },
    #[error("elimination stuck at flag coordinate {coordinate} of layer {layer}")]
    EliminationStuck { layer: usize, coordinate: usize },
    #[error("canonical representative failed its own check: {0}")]
    CertificateFailed(String),
    #[error("functional does not vanish on [m, n]: value {value} on {bracket:?}")]
    HypothesisFailed { bracket: Vec<Scalar>, value: Scalar },
    #[error("n part is not a flag subspace")]
    FlagMismatch,
    #[error("not a semidirect split: {0}")]
    SplitInvalid(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error(transparent)]
    Coadjoint(#[from] CoadjointError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// One layer `m_j = z_j ∔ V_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub m: Subspace,
    pub z: Subspace,
    pub v: Subspace,
}

/// Chain positions `k_1 < ... < k_q = dim` in the flag and one layer per position.
#[derive(Debug, Clone, PartialEq)]
pub struct StepwiseData {
    pub chain: Vec<usize>,
    pub layers: Vec<Layer>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LayerReport {
    pub position: usize,
    pub center_dim_1: bool,
    pub direct_sum: bool,
    pub flat: bool,
    pub semidirect: bool,
    pub bracket_into_lower_v: bool,
    pub commutes_with_lower_z: bool,
    pub compatible: bool,
}

impl LayerReport {
    pub fn ok(&self) -> bool {
        self.center_dim_1
            && self.direct_sum
            && self.flat
            && self.semidirect
            && self.bracket_into_lower_v
            && self.commutes_with_lower_z
            && self.compatible
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    pub layers: Vec<LayerReport>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonicalRep {
    pub xi0: Vec<Scalar>,
    /// `coadjoint_act(certificate, ξ) = ξ₀`.
    pub certificate: GroupElement,
}

/// Stepwise data attached to a flagged algebra, in flag coordinates.
#[derive(Debug, Clone)]
pub struct Stepwise {
    alg: FlaggedAlgebra,
    chain: Vec<usize>,
    layers: Vec<Layer>,
    /// `e(n_{k_j})` on the truncated flag.
    generic: Vec<JumpSet>,
}

/// Basis of `v` in reduced echelon form, ordered by pivot position.
fn ordered_basis(v: &Subspace) -> Subspace {
    let ech = v.echelon();
    let rows = ech
        .rows
        .iter()
        .map(|r| r.iter().map(|x| x.clone() / ech.scale.clone()).collect())
        .collect();
    Subspace::new(v.ambient(), rows).expect("echelon rows are independent")
}

fn prefix(m: usize, k: usize) -> Subspace {
    Subspace::coordinate(m, &(0..k).collect::<Vec<_>>())
}

/// Flag positions (zero-based) of the unit vectors lying in `v`.
fn unit_positions(v: &Subspace) -> Vec<usize> {
    let m = v.ambient();
    (0..m).filter(|&i| v.contains(&unit(m, i))).collect()
}

fn sum_all<'a>(m: usize, parts: impl Iterator<Item = &'a Subspace>) -> Subspace {
    parts.fold(Subspace::zero(m), |acc, s| acc.sum(s))
}

/// `m_j` as a standalone algebra with the basis induced by flag order.
fn layer_algebra(adapted: &LieAlgebra, m_j: &Subspace) -> Result<(LieAlgebra, Subspace), LieError> {
    let basis = ordered_basis(m_j);
    let alg = adapted.restrict(&basis, "layer")?;
    Ok((alg, basis))
}

impl Stepwise {
    pub fn new(alg: FlaggedAlgebra, data: &StepwiseData) -> Result<Self, StepwiseError> {
        let m = alg.dim();
        if data.chain.len() != data.layers.len() {
            return Err(StepwiseError::LayerCount {
                chain: data.chain.len(),
                layers: data.layers.len(),
            });
        }
        let mut prev = 0;
        for &k in &data.chain {
            if k <= prev || k > m {
                return Err(StepwiseError::ChainNotInFlag { position: k, dim: m });
            }
            prev = k;
        }
        if prev != m {
            return Err(StepwiseError::ChainDoesNotReachTop { dim: m });
        }
        let mut layers = Vec::with_capacity(data.layers.len());
        for l in &data.layers {
            for s in [&l.m, &l.z, &l.v] {
                if s.ambient() != m {
                    return Err(StepwiseError::DimensionMismatch {
                        expected: m,
                        found: s.ambient(),
                    });
                }
            }
            layers.push(Layer {
                m: alg.subspace_to_flag(&l.m),
                z: alg.subspace_to_flag(&l.z),
                v: alg.subspace_to_flag(&l.v),
            });
        }
        let generic = data
            .chain
            .par_iter()
            .map(|&k| generic_jump_set(&alg.truncate(k), GenericMode::Symbolic))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Stepwise {
            alg,
            chain: data.chain.clone(),
            layers,
            generic,
        })
    }

    pub fn algebra(&self) -> &FlaggedAlgebra {
        &self.alg
    }

    pub fn chain(&self) -> &[usize] {
        &self.chain
    }

    /// Layers in flag coordinates.
    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.chain.len()
    }

    /// `e(n_{k_j})` for `j = 1..q`.
    pub fn generic_sets(&self) -> &[JumpSet] {
        &self.generic
    }

    /// `s = z_1 + ... + z_q`.
    pub fn s(&self) -> Subspace {
        sum_all(self.alg.dim(), self.layers.iter().map(|l| &l.z))
    }

    /// `V_1 ∔ ... ∔ V_q`.
    pub fn v_sum(&self) -> Subspace {
        sum_all(self.alg.dim(), self.layers.iter().map(|l| &l.v))
    }

    /// One-based flag positions of `V_1 ∔ ... ∔ V_q`.
    pub fn v_positions(&self) -> JumpSet {
        JumpSet::new(unit_positions(&self.v_sum()).into_iter().map(|i| i + 1).collect())
    }

    pub fn check_hypotheses(&self) -> HypothesisReport {
        let m = self.alg.dim();
        let adapted = self.alg.adapted();
        let std_flag = Flag::standard(m);
        let layers: Vec<LayerReport> = (0..self.depth())
            .map(|j| {
                let layer = &self.layers[j];
                let k = self.chain[j];
                let k_prev = if j == 0 { 0 } else { self.chain[j - 1] };
                let n_prev = prefix(m, k_prev);
                let lower_v = sum_all(m, self.layers[..j].iter().map(|l| &l.v));
                let lower_z = sum_all(m, self.layers[..j].iter().map(|l| &l.z));
                let inside = prefix(m, k).contains_subspace(&layer.m);

                let standalone = layer_algebra(adapted, &layer.m).ok();
                let center_dim_1 = layer.z.dim() == 1
                    && standalone.as_ref().is_some_and(|(a, basis)| {
                        let c = a.center();
                        let back: Vec<Vec<Scalar>> =
                            c.basis().iter().map(|x| combine(basis.basis(), x, m)).collect();
                        Subspace::span(m, &back) == layer.z
                    });
                let direct_sum = layer.z.dim() + layer.v.dim() == layer.m.dim()
                    && layer.m.contains_subspace(&layer.z)
                    && layer.m.contains_subspace(&layer.v)
                    && layer.z.sum(&layer.v).dim() == layer.m.dim();
                let flat = standalone.as_ref().is_some_and(|(a, _)| {
                    FlaggedAlgebra::standard(a.clone()).is_ok_and(|fa| flat_orbit_test(&fa).flat)
                });
                let semidirect = inside && {
                    let truncate = |v: &Subspace| {
                        let rows: Vec<Vec<Scalar>> = v.basis().iter().map(|x| x[..k].to_vec()).collect();
                        Subspace::span(k, &rows)
                    };
                    let split = SemidirectSplit {
                        m_part: truncate(&layer.m),
                        n_part: prefix(k, k_prev),
                    };
                    self.alg.truncate(k).adapted().semidirect_split_check(&split).ok
                };
                let bracket_into_lower_v =
                    lower_v.contains_subspace(&adapted.bracket_subspaces(&layer.m, &n_prev));
                let commutes_with_lower_z = adapted.bracket_subspaces(&layer.m, &lower_z).is_zero();
                let compatible = std_flag.is_compatible(&layer.v);
                LayerReport {
                    position: k,
                    center_dim_1,
                    direct_sum,
                    flat,
                    semidirect,
                    bracket_into_lower_v,
                    commutes_with_lower_z,
                    compatible,
                }
            })
            .collect();
        HypothesisReport {
            ok: layers.iter().all(LayerReport::ok),
            layers,
        }
    }

    fn membership_failure(&self, xi: &Functional) -> Result<Option<StepwiseError>, StepwiseError> {
        for (j, &k) in self.chain.iter().enumerate() {
            let found = jump_set(&self.alg.truncate(k), &xi.restrict(k))?;
            if found != self.generic[j] {
                return Ok(Some(StepwiseError::NotInX {
                    layer: j + 1,
                    found,
                    generic: self.generic[j].clone(),
                }));
            }
        }
        Ok(None)
    }

    /// `J(ξ|n_j) = e(n_j)` for every chain member.
    pub fn x_membership(&self, xi: &Functional) -> Result<bool, StepwiseError> {
        self.check_dim(xi)?;
        Ok(self.membership_failure(xi)?.is_none())
    }

    fn check_dim(&self, xi: &Functional) -> Result<(), StepwiseError> {
        if xi.dim() != self.alg.dim() {
            return Err(CoadjointError::DimensionMismatch {
                expected: self.alg.dim(),
                found: xi.dim(),
            }
            .into());
        }
        Ok(())
    }

    /// Coefficients `c_n = ξ(ad(Y_i)^n Y_k)` of `ξ ∘ exp(-t ad Y_i)` at `Y_k`,
    /// so that the new value is `Σ (-t)^n / n! · c_n`.
    fn orbit_coefficients(&self, xi: &Functional, i: usize, k: usize) -> Vec<Scalar> {
        let m = self.alg.dim();
        let adapted = self.alg.adapted();
        let y = unit(m, i);
        let mut cur: Vec<Scalar> = unit(m, k);
        let mut out = Vec::new();
        while !cur.iter().all(Scalar::is_zero) && out.len() <= m {
            out.push(xi.apply(&cur));
            cur = adapted.bracket(&y, &cur);
        }
        out
    }

    /// The unique element of the orbit of `ξ` vanishing on `V_1 ∔ ... ∔ V_q`.
    ///
    /// Layers are processed in chain order; inside a layer each nonzero
    /// coordinate `Y_k ∈ V_j` is cleared by `exp(t Y_i)` for a partner
    /// `Y_i ∈ V_j` whose value `ξ(Y_k) - t ξ([Y_i, Y_k])` is affine in `t`.
    pub fn canonical_representative(&self, xi: &Functional) -> Result<CanonicalRep, StepwiseError> {
        self.check_dim(xi)?;
        if let Some(err) = self.membership_failure(xi)? {
            return Err(err);
        }
        let m = self.alg.dim();
        let mut cur = xi.clone();
        let mut steps: Vec<Vec<Scalar>> = Vec::new();
        for (j, layer) in self.layers.iter().enumerate() {
            let positions = unit_positions(&layer.v);
            let mut cleared = false;
            for _pass in 0..m.max(1) {
                if positions.iter().all(|&k| cur.coords()[k].is_zero()) {
                    cleared = true;
                    break;
                }
                for &k in &positions {
                    if cur.coords()[k].is_zero() {
                        continue;
                    }
                    let step = positions.iter().find_map(|&i| {
                        let c = self.orbit_coefficients(&cur, i, k);
                        let affine = c.iter().skip(2).all(Scalar::is_zero);
                        let slope = c.get(1).cloned().unwrap_or_else(Scalar::zero);
                        // c_0 - t c_1 = 0
                        (affine && !slope.is_zero()).then(|| {
                            let t = c[0].clone() / slope;
                            let mut x = vec![Scalar::zero(); m];
                            x[i] = t;
                            x
                        })
                    });
                    let Some(x) = step else {
                        return Err(StepwiseError::EliminationStuck {
                            layer: j + 1,
                            coordinate: k + 1,
                        });
                    };
                    cur = coadjoint_act(&self.alg, &GroupElement::new(vec![x.clone()]), &cur)?;
                    steps.push(x);
                }
            }
            if !cleared && !positions.iter().all(|&k| cur.coords()[k].is_zero()) {
                let k = positions.iter().find(|&&k| !cur.coords()[k].is_zero()).copied().unwrap_or(0);
                return Err(StepwiseError::EliminationStuck {
                    layer: j + 1,
                    coordinate: k + 1,
                });
            }
        }
        steps.reverse();
        let certificate = GroupElement::new(steps);
        let rep = CanonicalRep {
            xi0: cur.into_coords(),
            certificate,
        };
        self.verify_canonical(xi, &rep)?;
        Ok(rep)
    }

    /// Checks `ξ₀|V = 0`, `n(ξ₀) = s` and the certificate.
    pub fn verify_canonical(&self, xi: &Functional, rep: &CanonicalRep) -> Result<(), StepwiseError> {
        let xi0 = Functional::new(rep.xi0.clone());
        if self.v_positions().zero_based().iter().any(|&k| !rep.xi0[k].is_zero()) {
            return Err(StepwiseError::CertificateFailed("ξ₀ does not vanish on V".into()));
        }
        if isotropy(&self.alg, &xi0)?.isotropy != self.s() {
            return Err(StepwiseError::CertificateFailed("isotropy of ξ₀ differs from s".into()));
        }
        if coadjoint_act(&self.alg, &rep.certificate, xi)? != xi0 {
            return Err(StepwiseError::CertificateFailed("certificate does not map ξ to ξ₀".into()));
        }
        Ok(())
    }

    /// Whether `X` coincides with the coarse stratum at `ξ`.
    pub fn main2_equivalence_check(&self, xi: &Functional) -> Result<EquivalenceOutcome, StepwiseError> {
        if self.depth() != 2 {
            return Err(StepwiseError::NotApplicable(format!(
                "needs exactly two layers, found {}",
                self.depth()
            )));
        }
        let center = self.alg.center().dim();
        if center != 1 {
            return Err(StepwiseError::NotApplicable(format!(
                "needs a 1-dimensional center, found dimension {center}"
            )));
        }
        let in_x = self.x_membership(xi)?;
        let coarse = jump_set(&self.alg, xi)? == *self.generic.last().expect("nonempty chain");
        Ok(EquivalenceOutcome {
            in_x,
            coarse,
            agree: in_x == coarse,
        })
    }

    /// Square-integrability constant at a functional vanishing on every `V_j`
    /// and nonzero on every `z_j`.
    pub fn main3_constant(&self, xi: &Functional) -> Result<SquareIntegrabilityData, StepwiseError> {
        self.check_dim(xi)?;
        for (j, layer) in self.layers.iter().enumerate() {
            if layer.v.basis().iter().any(|x| !xi.apply(x).is_zero()) {
                return Err(StepwiseError::PreconditionFailed(format!(
                    "ξ does not vanish on V_{}",
                    j + 1
                )));
            }
            if layer.z.basis().iter().all(|x| xi.apply(x).is_zero()) {
                return Err(StepwiseError::PreconditionFailed(format!("ξ vanishes on z_{}", j + 1)));
            }
        }
        if isotropy(&self.alg, xi)?.isotropy != self.s() {
            return Err(StepwiseError::PreconditionFailed(
                "isotropy of ξ differs from z_1 + ... + z_q".into(),
            ));
        }
        Ok(square_integrability_constant(&self.alg, xi, &self.v_positions())?)
    }

    /// The functional with `ξ(z_j) = 1` on each layer center and zero elsewhere.
    pub fn canonical_functional(&self) -> Functional {
        let m = self.alg.dim();
        let mut coords = vec![Scalar::zero(); m];
        for layer in &self.layers {
            for k in unit_positions(&layer.z) {
                coords[k] = Scalar::one();
            }
        }
        Functional::new(coords)
    }

    /// `n = m_q ⋉ n_{q-1}` for `q ≥ 2`; otherwise `span(Y_m) ⋉ n_{m-1}`.
    pub fn top_split(&self) -> Result<PrefixSplit, StepwiseError> {
        let m = self.alg.dim();
        if self.depth() >= 2 {
            let last = self.layers.last().expect("nonempty chain");
            PrefixSplit::new(self.alg.clone(), last.m.clone(), self.chain[self.depth() - 2])
        } else {
            PrefixSplit::new(self.alg.clone(), Subspace::coordinate(m, &[m - 1]), m - 1)
        }
    }
}

pub fn check_hypotheses(alg: &FlaggedAlgebra, data: &StepwiseData) -> Result<HypothesisReport, StepwiseError> {
    Ok(Stepwise::new(alg.clone(), data)?.check_hypotheses())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EquivalenceOutcome {
    pub in_x: bool,
    pub coarse: bool,
    pub agree: bool,
}

/// Outcome of an implication-shaped check: `informative` is false when the
/// premise fails and `holds` is then vacuous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ImplicationOutcome {
    pub applicable: bool,
    pub informative: bool,
    pub holds: bool,
}

impl ImplicationOutcome {
    fn not_applicable() -> Self {
        ImplicationOutcome {
            applicable: false,
            informative: false,
            holds: true,
        }
    }
}

/// For a 1-dimensional center `Z`: `J(ξ) = e(n)` implies `ξ|_Z ≠ 0`.
pub fn lemma_obv_check(alg: &FlaggedAlgebra, generic: &JumpSet, xi: &Functional) -> Result<ImplicationOutcome, StepwiseError> {
    let center = alg.center();
    if center.dim() != 1 || alg.dim() == 1 {
        return Ok(ImplicationOutcome::not_applicable());
    }
    let informative = jump_set(alg, xi)? == *generic;
    let nonzero_on_center = !xi.apply(&center.basis()[0]).is_zero();
    Ok(ImplicationOutcome {
        applicable: true,
        informative,
        holds: !informative || nonzero_on_center,
    })
}

/// A semidirect split `ñ = m ⋉ n` with `n = n_k` a flag prefix, in flag coordinates.
#[derive(Debug, Clone)]
pub struct PrefixSplit {
    alg: FlaggedAlgebra,
    k: usize,
    m_part: Subspace,
    n_part: Subspace,
    truncated: FlaggedAlgebra,
    quotient: FlaggedAlgebra,
    /// `lifts[i]` is the `m`-component of `Y_{k+1+i}`.
    lifts: Vec<Vec<Scalar>>,
    annihilator: Vec<Vec<Scalar>>,
    generic_full: JumpSet,
    generic_n: JumpSet,
    generic_m: JumpSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradOutcome {
    pub holds: bool,
    pub whole: Subspace,
    pub parts: Subspace,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcatOutcome {
    /// The isotropy decomposition holds at this functional.
    pub informative: bool,
    pub holds: bool,
    pub whole: JumpSet,
    pub n_part: JumpSet,
    pub m_part: JumpSet,
}

impl PrefixSplit {
    pub fn new(alg: FlaggedAlgebra, m_part: Subspace, k: usize) -> Result<Self, StepwiseError> {
        let m = alg.dim();
        if m_part.ambient() != m || k > m {
            return Err(StepwiseError::FlagMismatch);
        }
        let n_part = prefix(m, k);
        let split = SemidirectSplit {
            m_part: m_part.clone(),
            n_part: n_part.clone(),
        };
        let report = alg.adapted().semidirect_split_check(&split);
        if !report.ok {
            let first = serde_json::to_string(&report.witnesses[0]).unwrap_or_default();
            return Err(StepwiseError::SplitInvalid(first));
        }
        let mut basis = m_part.basis().to_vec();
        basis.extend(n_part.basis().iter().cloned());
        let whole = Subspace::new(m, basis).expect("direct sum checked");
        let lifts = (k..m)
            .map(|i| {
                let c = whole.coordinates_of(&unit(m, i)).expect("spans the algebra");
                combine(m_part.basis(), &c[..m_part.dim()], m)
            })
            .collect();
        let brackets = alg.adapted().bracket_subspaces(&m_part, &n_part);
        let annihilator = annihilator_basis(&brackets);
        let truncated = alg.truncate(k);
        let quotient = alg.quotient(k);
        let symbolic = |a: &FlaggedAlgebra| generic_jump_set(a, GenericMode::Symbolic);
        Ok(PrefixSplit {
            generic_full: symbolic(&alg)?,
            generic_n: symbolic(&truncated)?,
            generic_m: symbolic(&quotient)?,
            alg,
            k,
            m_part,
            n_part,
            truncated,
            quotient,
            lifts,
            annihilator,
        })
    }

    pub fn algebra(&self) -> &FlaggedAlgebra {
        &self.alg
    }

    pub fn position(&self) -> usize {
        self.k
    }

    pub fn m_part(&self) -> &Subspace {
        &self.m_part
    }

    pub fn n_part(&self) -> &Subspace {
        &self.n_part
    }

    /// Basis of the functionals vanishing on `[m, n]`.
    pub fn annihilator(&self) -> &[Vec<Scalar>] {
        &self.annihilator
    }

    /// `e(ñ)`, `e(n)` and `e(m)` (the last on the quotient flag).
    pub fn generic_sets(&self) -> (&JumpSet, &JumpSet, &JumpSet) {
        (&self.generic_full, &self.generic_n, &self.generic_m)
    }

    fn require_kills_brackets(&self, xi: &Functional) -> Result<(), StepwiseError> {
        let adapted = self.alg.adapted();
        for x in self.m_part.basis() {
            for y in self.n_part.basis() {
                let b = adapted.bracket(x, y);
                let value = xi.apply(&b);
                if !value.is_zero() {
                    return Err(StepwiseError::HypothesisFailed { bracket: b, value });
                }
            }
        }
        Ok(())
    }

    /// `ξ̃` restricted to `m`, written on the quotient flag.
    pub fn m_functional(&self, xi: &Functional) -> Functional {
        Functional::new(self.lifts.iter().map(|x| xi.apply(x)).collect())
    }

    /// Isotropy of `ξ̃` in `ñ` against the sum of the isotropies of its
    /// restrictions to `m` and to `n`.
    pub fn grad_check(&self, xi: &Functional) -> Result<GradOutcome, StepwiseError> {
        self.require_kills_brackets(xi)?;
        let whole = isotropy(&self.alg, xi)?.isotropy;
        let parts = relative_isotropy(&self.alg, xi, &self.m_part)
            .sum(&relative_isotropy(&self.alg, xi, &self.n_part));
        Ok(GradOutcome {
            holds: whole == parts,
            whole,
            parts,
        })
    }

    /// `J(ξ̃) = J(ξ̃|n) ⊔ (k + J(ξ̃|m))` wherever the isotropy decomposition holds.
    pub fn jump_concat_check(&self, xi: &Functional) -> Result<ConcatOutcome, StepwiseError> {
        let grad = self.grad_check(xi)?;
        let whole = jump_set(&self.alg, xi)?;
        let n_part = jump_set(&self.truncated, &xi.restrict(self.k))?;
        let m_part = jump_set(&self.quotient, &self.m_functional(xi))?;
        let holds = !grad.holds || n_part.disjoint_union(&m_part.shifted(self.k)).as_ref() == Some(&whole);
        Ok(ConcatOutcome {
            informative: grad.holds,
            holds,
            whole,
            n_part,
            m_part,
        })
    }

    /// If `J(ξ̃) = e(ñ)`, `ξ̃` kills `[m, n]` and `J(ξ̃|n) = e(n)`, then `J(ξ̃|m) = e(m)`.
    pub fn interm_check(&self, xi: &Functional) -> Result<ImplicationOutcome, StepwiseError> {
        let kills = match self.require_kills_brackets(xi) {
            Ok(()) => true,
            Err(StepwiseError::HypothesisFailed { .. }) => false,
            Err(e) => return Err(e),
        };
        let informative = kills
            && jump_set(&self.alg, xi)? == self.generic_full
            && jump_set(&self.truncated, &xi.restrict(self.k))? == self.generic_n;
        let holds = !informative || jump_set(&self.quotient, &self.m_functional(xi))? == self.generic_m;
        Ok(ImplicationOutcome {
            applicable: true,
            informative,
            holds,
        })
    }
}

/// Basis of `{ξ : ξ|_W = 0}` for `W` given in flag coordinates.
fn annihilator_basis(w: &Subspace) -> Vec<Vec<Scalar>> {
    let m = w.ambient();
    if w.is_zero() {
        return (0..m).map(|i| unit(m, i)).collect();
    }
    let rows = crate::linalg::Mat::from_rows(w.basis().to_vec(), m);
    rows.rank_and_kernel().1
}
