//! Randomized property suites over a bundle.
//!
//! Every trial draws its randomness from `trial_rng(seed, stream)` with a
//! stream determined by the suite and the trial index, so reports depend only
//! on `(bundle, trials, seed, bound)`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::AlgebraBundle;
use crate::coadjoint::{
    coadjoint_act, isotropy, jump_set, random_functional, random_vector, trial_rng, Functional,
    GroupElement, JumpSet, SamplingConfig, Strata, StratumKind,
};
use crate::lie::FlaggedAlgebra;
use crate::linalg::{combine, Field, Subspace};
use crate::stepwise::{lemma_obv_check, HypothesisReport, PrefixSplit, Stepwise, StepwiseError};

/// Sampling bound used by `selftest` unless overridden.
pub const SELFTEST_BOUND: i64 = 1_000_000_000;

/// Factors per random group element.
const GROUP_FACTORS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    Grad,
    JumpConcat,
    LemmaObv,
    Interm,
    Main2,
    OrbitInvariance,
    CanonicalUniqueness,
    Genericity,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 8] = [
        SuiteKind::Grad,
        SuiteKind::JumpConcat,
        SuiteKind::LemmaObv,
        SuiteKind::Interm,
        SuiteKind::Main2,
        SuiteKind::OrbitInvariance,
        SuiteKind::CanonicalUniqueness,
        SuiteKind::Genericity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Grad => "grad",
            SuiteKind::JumpConcat => "jump_concat",
            SuiteKind::LemmaObv => "lemma_obv",
            SuiteKind::Interm => "interm",
            SuiteKind::Main2 => "main2",
            SuiteKind::OrbitInvariance => "orbit_invariance",
            SuiteKind::CanonicalUniqueness => "canonical_uniqueness",
            SuiteKind::Genericity => "genericity",
        }
    }

    fn stream(self, trial: usize) -> u64 {
        let tag = SuiteKind::ALL.iter().position(|&k| k == self).expect("listed") as u64;
        (tag << 32) | trial as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub trials: usize,
    pub informative: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl SuiteResult {
    fn not_applicable(kind: SuiteKind, reason: impl Into<String>) -> Self {
        SuiteResult {
            name: kind.name(),
            applicable: false,
            reason: Some(reason.into()),
            trials: 0,
            informative: 0,
            failures: 0,
            first_failure: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub algebra: String,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub bound: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypotheses: Option<HypothesisReport>,
    pub suites: Vec<SuiteResult>,
    pub ok: bool,
}

impl SelftestReport {
    pub fn suite(&self, kind: SuiteKind) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == kind.name())
    }
}

enum Trial {
    Informative,
    Vacuous,
    Failure(String),
}

impl Trial {
    fn check(ok: bool, informative: bool, describe: impl FnOnce() -> String) -> Trial {
        match (ok, informative) {
            (false, _) => Trial::Failure(describe()),
            (true, true) => Trial::Informative,
            (true, false) => Trial::Vacuous,
        }
    }
}

impl From<StepwiseError> for Trial {
    fn from(e: StepwiseError) -> Self {
        Trial::Failure(e.to_string())
    }
}

/// Precomputed data shared by all suites of one bundle.
pub struct Selftest {
    alg: FlaggedAlgebra,
    stepwise: Option<Stepwise>,
    hypotheses: Option<HypothesisReport>,
    split: Option<PrefixSplit>,
    strata: Strata,
    cfg: SamplingConfig,
}

impl Selftest {
    pub fn new(bundle: &AlgebraBundle, cfg: SamplingConfig) -> Result<Self, StepwiseError> {
        let alg = bundle.flagged()?;
        let stepwise = match &bundle.stepwise {
            Some(data) => Some(Stepwise::new(alg.clone(), data)?),
            None => None,
        };
        let hypotheses = stepwise.as_ref().map(Stepwise::check_hypotheses);
        let m = alg.dim();
        let split = match &stepwise {
            Some(s) => Some(s.top_split()?),
            None if m >= 2 => Some(PrefixSplit::new(
                alg.clone(),
                Subspace::coordinate(m, &[m - 1]),
                m - 1,
            )?),
            None => None,
        };
        let strata = Strata::new(&alg);
        Ok(Selftest {
            alg,
            stepwise,
            hypotheses,
            split,
            strata,
            cfg,
        })
    }

    fn random_xi(&self, kind: SuiteKind, trial: usize) -> Functional {
        let mut rng = trial_rng(self.cfg.seed, kind.stream(trial));
        random_functional(&mut rng, self.alg.dim(), self.cfg.bound)
    }

    /// Random integer combination of the annihilator of `[m, n]`.
    fn projected_xi(&self, split: &PrefixSplit, kind: SuiteKind, trial: usize) -> Functional {
        let mut rng = trial_rng(self.cfg.seed, kind.stream(trial));
        let basis = split.annihilator();
        let coeffs = random_vector(&mut rng, basis.len(), self.cfg.bound);
        Functional::new(combine(basis, &coeffs, self.alg.dim()))
    }

    fn random_group(&self, rng: &mut impl Rng) -> GroupElement {
        GroupElement::new(
            (0..GROUP_FACTORS)
                .map(|_| random_vector(rng, self.alg.dim(), self.cfg.bound))
                .collect(),
        )
    }

    fn tally(&self, kind: SuiteKind, trials: usize, run: impl Fn(usize) -> Trial + Sync + Send) -> SuiteResult {
        let outcomes: Vec<Trial> = (0..trials).into_par_iter().map(run).collect();
        let mut informative = 0;
        let mut failures = 0;
        let mut first_failure = None;
        for (t, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Trial::Informative => informative += 1,
                Trial::Vacuous => {}
                Trial::Failure(msg) => {
                    failures += 1;
                    first_failure.get_or_insert_with(|| format!("trial {t}: {msg}"));
                }
            }
        }
        SuiteResult {
            name: kind.name(),
            applicable: true,
            reason: None,
            trials,
            informative,
            failures,
            first_failure,
        }
    }

    pub fn run(&self, kind: SuiteKind) -> SuiteResult {
        let n = self.cfg.trials;
        match kind {
            SuiteKind::Grad => {
                let Some(split) = &self.split else {
                    return SuiteResult::not_applicable(kind, "no semidirect split");
                };
                self.tally(kind, n, |t| {
                    let xi = self.projected_xi(split, kind, t);
                    match split.grad_check(&xi) {
                        Ok(g) => Trial::check(g.holds, true, || format!("isotropy mismatch at {xi}")),
                        Err(e) => e.into(),
                    }
                })
            }
            SuiteKind::JumpConcat => {
                let Some(split) = &self.split else {
                    return SuiteResult::not_applicable(kind, "no semidirect split");
                };
                let extra = self
                    .stepwise
                    .as_ref()
                    .filter(|s| s.depth() >= 2)
                    .map(Stepwise::canonical_functional);
                let total = n + usize::from(extra.is_some());
                self.tally(kind, total, |t| {
                    let xi = match (&extra, t == n) {
                        (Some(c), true) => c.clone(),
                        _ => self.projected_xi(split, kind, t),
                    };
                    match split.jump_concat_check(&xi) {
                        Ok(c) => Trial::check(c.holds, c.informative, || {
                            format!("J = {} but parts {} and {} at {xi}", c.whole, c.n_part, c.m_part)
                        }),
                        Err(e) => e.into(),
                    }
                })
            }
            SuiteKind::LemmaObv => {
                let center = self.alg.center().dim();
                if center != 1 || self.alg.dim() == 1 {
                    return SuiteResult::not_applicable(
                        kind,
                        format!("center has dimension {center} in dimension {}", self.alg.dim()),
                    );
                }
                let generic = self.strata.generic();
                self.tally(kind, n, |t| {
                    let xi = self.random_xi(kind, t);
                    match lemma_obv_check(&self.alg, generic, &xi) {
                        Ok(o) => Trial::check(o.holds, o.informative, || format!("ξ vanishes on the center at {xi}")),
                        Err(e) => e.into(),
                    }
                })
            }
            SuiteKind::Interm => {
                let Some(split) = &self.split else {
                    return SuiteResult::not_applicable(kind, "no semidirect split");
                };
                self.tally(kind, n, |t| {
                    let xi = self.projected_xi(split, kind, t);
                    match split.interm_check(&xi) {
                        Ok(o) => Trial::check(o.holds, o.informative, || format!("J(ξ|m) is not e(m) at {xi}")),
                        Err(e) => e.into(),
                    }
                })
            }
            SuiteKind::Main2 => {
                let Some(s) = self.usable_stepwise() else {
                    return SuiteResult::not_applicable(kind, "no stepwise data satisfying the hypotheses");
                };
                if let Err(e) = s.main2_equivalence_check(&Functional::zero(self.alg.dim())) {
                    return SuiteResult::not_applicable(kind, e.to_string());
                }
                let center = self.alg.center();
                let c = center.basis()[0].clone();
                let p = c.iter().position(|x| !x.is_zero()).expect("nonzero center vector");
                self.tally(kind, 2 * n, |t| {
                    let mut xi = self.random_xi(kind, t / 2);
                    if t % 2 == 1 {
                        // same sample, pushed onto the hyperplane ξ(z) = 0
                        let mut coords = xi.into_coords();
                        let shift = Functional::new(coords.clone()).apply(&c) / c[p].clone();
                        coords[p] = coords[p].clone() - shift;
                        xi = Functional::new(coords);
                    }
                    match s.main2_equivalence_check(&xi) {
                        Ok(o) => Trial::check(o.agree, o.in_x || o.coarse, || {
                            format!("X membership {} but coarse stratum {} at {xi}", o.in_x, o.coarse)
                        }),
                        Err(e) => e.into(),
                    }
                })
            }
            SuiteKind::OrbitInvariance => self.tally(kind, n, |t| {
                let mut rng = trial_rng(self.cfg.seed, kind.stream(t));
                let xi = random_functional(&mut rng, self.alg.dim(), self.cfg.bound);
                let g = self.random_group(&mut rng);
                match self.orbit_invariance_trial(&xi, &g) {
                    Ok(None) => Trial::Informative,
                    Ok(Some(msg)) => Trial::Failure(format!("{msg} at {xi}")),
                    Err(e) => e.into(),
                }
            }),
            SuiteKind::CanonicalUniqueness => {
                let Some(s) = self.usable_stepwise() else {
                    return SuiteResult::not_applicable(kind, "no stepwise data satisfying the hypotheses");
                };
                self.tally(kind, n, |t| {
                    let mut rng = trial_rng(self.cfg.seed, kind.stream(t));
                    let xi = random_functional(&mut rng, self.alg.dim(), self.cfg.bound);
                    let h = self.random_group(&mut rng);
                    match canonical_uniqueness_trial(s, &xi, &h) {
                        Ok(Some(true)) => Trial::Informative,
                        Ok(None) => Trial::Vacuous,
                        Ok(Some(false)) => Trial::Failure(format!("representatives differ at {xi}")),
                        Err(e) => e.into(),
                    }
                })
            }
            SuiteKind::Genericity => self.tally(kind, n, |t| {
                let xi = self.random_xi(kind, t);
                match self.strata.contains(&self.alg, &xi, StratumKind::Fine) {
                    Ok(inside) => Trial::check(inside, true, || format!("{xi} is outside the fine generic stratum")),
                    Err(e) => Trial::Failure(e.to_string()),
                }
            }),
        }
    }

    fn usable_stepwise(&self) -> Option<&Stepwise> {
        match (&self.stepwise, &self.hypotheses) {
            (Some(s), Some(h)) if h.ok => Some(s),
            _ => None,
        }
    }

    fn orbit_invariance_trial(&self, xi: &Functional, g: &GroupElement) -> Result<Option<String>, StepwiseError> {
        let moved = coadjoint_act(&self.alg, g, xi)?;
        let (j0, j1): (JumpSet, JumpSet) = (jump_set(&self.alg, xi)?, jump_set(&self.alg, &moved)?);
        if j0 != j1 {
            return Ok(Some(format!("jump set {j0} became {j1}")));
        }
        let (d0, d1) = (
            isotropy(&self.alg, xi)?.isotropy.dim(),
            isotropy(&self.alg, &moved)?.isotropy.dim(),
        );
        if d0 != d1 {
            return Ok(Some(format!("isotropy dimension {d0} became {d1}")));
        }
        if let Some(s) = &self.stepwise {
            let (x0, x1) = (s.x_membership(xi)?, s.x_membership(&moved)?);
            if x0 != x1 {
                return Ok(Some(format!("X membership {x0} became {x1}")));
            }
        }
        Ok(None)
    }

    pub fn run_all(&self) -> SelftestReport {
        let suites: Vec<SuiteResult> = SuiteKind::ALL.iter().map(|&k| self.run(k)).collect();
        let ok = suites.iter().all(SuiteResult::passed) && self.hypotheses.as_ref().is_none_or(|h| h.ok);
        SelftestReport {
            algebra: self.alg.original().name().to_string(),
            dim: self.alg.dim(),
            trials: self.cfg.trials,
            seed: self.cfg.seed,
            bound: self.cfg.bound,
            hypotheses: self.hypotheses.clone(),
            suites,
            ok,
        }
    }
}

/// `Some(equal)` when `ξ ∈ X`, `None` otherwise.
fn canonical_uniqueness_trial(s: &Stepwise, xi: &Functional, h: &GroupElement) -> Result<Option<bool>, StepwiseError> {
    if !s.x_membership(xi)? {
        return Ok(None);
    }
    let a = s.canonical_representative(xi)?;
    let moved = coadjoint_act(s.algebra(), h, xi)?;
    let b = s.canonical_representative(&moved)?;
    Ok(Some(a.xi0 == b.xi0))
}

pub fn selftest(bundle: &AlgebraBundle, cfg: SamplingConfig) -> Result<SelftestReport, StepwiseError> {
    Ok(Selftest::new(bundle, cfg)?.run_all())
}

/// Sampling configuration with the selftest default bound.
pub fn selftest_config(trials: usize, seed: u64) -> SamplingConfig {
    SamplingConfig {
        trials,
        seed,
        bound: SELFTEST_BOUND,
    }
}
