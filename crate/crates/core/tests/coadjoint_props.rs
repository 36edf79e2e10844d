use nilstrat_core::catalog;
use nilstrat_core::coadjoint::{
    coadjoint_act, flat_orbit_test, generic_jump_set, isotropy, jump_set, restricted_pfaffian,
    Functional, GenericMode, GroupElement, JumpSet, SamplingConfig, Strata, StratumKind,
};
use nilstrat_core::lie::FlaggedAlgebra;
use nilstrat_core::linalg::{unit, Field, Mat, Scalar, Subspace};
use proptest::prelude::*;

fn fixtures() -> Vec<FlaggedAlgebra> {
    vec![
        catalog::heisenberg(1).unwrap().flagged().unwrap(),
        catalog::heisenberg(2).unwrap().flagged().unwrap(),
        catalog::filiform4().flagged().unwrap(),
        catalog::upper_triangular(4).unwrap().flagged().unwrap(),
        catalog::upper_triangular(5).unwrap().flagged().unwrap(),
    ]
}

fn functional(v: &[i64], dim: usize) -> Functional {
    Functional::new(v[..dim].iter().map(|&x| Scalar::from(x)).collect())
}

fn group(v: &[i64], dim: usize) -> GroupElement {
    GroupElement::new(v.chunks(dim).take(2).map(|c| c.iter().map(|&x| Scalar::from(x)).collect()).collect())
}

/// `{j : Y_j ∉ n_{j-1} + n(ξ)}` by subspace arithmetic.
fn jump_set_by_definition(alg: &FlaggedAlgebra, xi: &Functional) -> JumpSet {
    let m = alg.dim();
    let iso = isotropy(alg, xi).unwrap().isotropy;
    let mut prev = iso.clone();
    let mut out = Vec::new();
    for j in 1..=m {
        let y = unit(m, j - 1);
        if !prev.contains(&y) {
            out.push(j);
        }
        prev = prev.sum(&Subspace::span(m, &[y]));
    }
    JumpSet::new(out)
}

fn sample() -> impl Strategy<Value = (usize, Vec<i64>, Vec<i64>)> {
    (
        0usize..5,
        prop::collection::vec(-3i64..=3, 10),
        prop::collection::vec(-3i64..=3, 20),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jump_set_matches_definition((k, xs, _) in sample()) {
        let alg = &fixtures()[k];
        let xi = functional(&xs, alg.dim());
        prop_assert_eq!(jump_set(alg, &xi).unwrap(), jump_set_by_definition(alg, &xi));
    }

    #[test]
    fn jump_set_size_is_even_rank((k, xs, _) in sample()) {
        let alg = &fixtures()[k];
        let xi = functional(&xs, alg.dim());
        let iso = isotropy(alg, &xi).unwrap();
        let j = jump_set(alg, &xi).unwrap();
        prop_assert_eq!(j.len(), iso.form.rank());
        prop_assert_eq!(j.len() % 2, 0);
        prop_assert_eq!(j.len() + iso.isotropy.dim(), alg.dim());
    }

    #[test]
    fn isotropy_contains_center((k, xs, _) in sample()) {
        let alg = &fixtures()[k];
        let xi = functional(&xs, alg.dim());
        prop_assert!(isotropy(alg, &xi).unwrap().isotropy.contains_subspace(&alg.center()));
    }

    #[test]
    fn orbit_invariance((k, xs, gs) in sample()) {
        let alg = &fixtures()[k];
        let m = alg.dim();
        let xi = functional(&xs, m);
        let g = group(&gs, m);
        let moved = coadjoint_act(alg, &g, &xi).unwrap();
        prop_assert_eq!(jump_set(alg, &moved).unwrap(), jump_set(alg, &xi).unwrap());
        prop_assert_eq!(
            isotropy(alg, &moved).unwrap().isotropy.dim(),
            isotropy(alg, &xi).unwrap().isotropy.dim()
        );
        prop_assert_eq!(coadjoint_act(alg, &g.inverse(), &moved).unwrap(), xi);
    }

    #[test]
    fn symbolic_generic_is_minimum((k, xs, _) in sample(), seed in 0u64..1000) {
        let alg = &fixtures()[k];
        let e = generic_jump_set(alg, GenericMode::Symbolic).unwrap();
        let xi = functional(&xs, alg.dim());
        prop_assert!(jump_set(alg, &xi).unwrap() >= e);
        let cfg = SamplingConfig { trials: 5, seed, bound: 3 };
        prop_assert!(generic_jump_set(alg, GenericMode::Sampled(cfg)).unwrap() >= e);
    }

    #[test]
    fn isotropy_complements_generic_positions((k, xs, _) in sample()) {
        let alg = &fixtures()[k];
        let m = alg.dim();
        let xi = functional(&xs, m);
        let e = generic_jump_set(alg, GenericMode::Symbolic).unwrap();
        prop_assume!(jump_set(alg, &xi).unwrap() == e);
        let n_e = Subspace::coordinate(m, &e.zero_based());
        let iso = isotropy(alg, &xi).unwrap().isotropy;
        prop_assert_eq!(iso.dim() + n_e.dim(), m);
        prop_assert_eq!(iso.sum(&n_e).dim(), m);
    }

    #[test]
    fn pfaffian_follows_symbolic_family((k, xs, _) in sample()) {
        let alg = &fixtures()[k];
        let m = alg.dim();
        let xi = functional(&xs, m);
        let e = generic_jump_set(alg, GenericMode::Symbolic).unwrap();
        let symbolic = restricted_pfaffian(alg, &Functional::symbolic(m), &e).unwrap();
        let numeric = restricted_pfaffian(alg, &xi, &e).unwrap();
        prop_assert_eq!(symbolic.evaluate(xi.coords()), Some(numeric.clone()));
        prop_assert_eq!(!numeric.is_zero(), jump_set(alg, &xi).unwrap() == e);
    }

    #[test]
    fn restriction_to_generic_positions_is_injective_on_orbits((k, xs, gs) in sample(), stab in -3i64..=3) {
        let alg = &fixtures()[k];
        let m = alg.dim();
        let xi = functional(&xs, m);
        let e = generic_jump_set(alg, GenericMode::Symbolic).unwrap();
        prop_assume!(jump_set(alg, &xi).unwrap() == e);
        // a stabilizer element, so that equal restrictions actually occur
        let iso = isotropy(alg, &xi).unwrap().isotropy;
        let x: Vec<Scalar> = iso.basis()[0].iter().map(|c| c.clone() * Scalar::from(stab)).collect();
        for g in [group(&gs, m), GroupElement::new(vec![x])] {
            let moved = coadjoint_act(alg, &g, &xi).unwrap();
            let same_on_n_e = e.zero_based().iter().all(|&i| moved.coords()[i] == xi.coords()[i]);
            prop_assert_eq!(same_on_n_e, moved == xi);
        }
    }
}

#[test]
fn heisenberg_orbits_are_flat() {
    for n in 1..=5 {
        let alg = catalog::heisenberg(n).unwrap().flagged().unwrap();
        let report = flat_orbit_test(&alg);
        assert!(report.flat, "heisenberg({n})");
        let w = report.witness.expect("flat algebras have a witness");
        assert_eq!(isotropy(&alg, &w).unwrap().isotropy, alg.center());
    }
}

#[test]
fn fine_stratum_refines_coarse() {
    for alg in fixtures() {
        let strata = Strata::new(&alg);
        let m = alg.dim();
        let xi = Functional::new((1..=m as i64).map(|i| Scalar::from(i * i + 1)).collect());
        if strata.contains(&alg, &xi, StratumKind::Fine).unwrap() {
            assert!(strata.contains(&alg, &xi, StratumKind::Coarse).unwrap());
        }
        assert!(!strata.contains(&alg, &Functional::zero(m), StratumKind::Coarse).unwrap());
    }
}

#[test]
fn skew_form_rank_agrees_with_symbolic_generic() {
    for alg in fixtures() {
        let e = generic_jump_set(&alg, GenericMode::Symbolic).unwrap();
        let form: Mat<_> = isotropy(&alg, &Functional::symbolic(alg.dim())).unwrap().form;
        assert_eq!(form.rank(), e.len());
    }
}
