use nilstrat_core::catalog;
use nilstrat_core::coadjoint::{
    coadjoint_act, generic_jump_set, isotropy, jump_set, Functional, GenericMode, GroupElement,
};
use nilstrat_core::linalg::{Field, Scalar, Subspace};
use nilstrat_core::stepwise::{lemma_obv_check, PrefixSplit, Stepwise, StepwiseError};
use proptest::prelude::*;

fn stepwise(k: usize) -> Stepwise {
    let bundle = match k {
        0 => catalog::heisenberg(1).unwrap(),
        1 => catalog::heisenberg(2).unwrap(),
        2 => catalog::filiform4(),
        3 => catalog::upper_triangular(4).unwrap(),
        _ => catalog::upper_triangular(5).unwrap(),
    };
    Stepwise::new(bundle.flagged().unwrap(), bundle.stepwise.as_ref().unwrap()).unwrap()
}

fn functional(v: &[i64], dim: usize) -> Functional {
    Functional::new(v[..dim].iter().map(|&x| Scalar::from(x)).collect())
}

fn group(v: &[i64], dim: usize) -> GroupElement {
    GroupElement::new(v.chunks(dim).take(3).map(|c| c.iter().map(|&x| Scalar::from(x)).collect()).collect())
}

/// A functional killing `[m, n]`, as a combination of annihilator vectors.
fn projected(split: &PrefixSplit, c: &[i64]) -> Functional {
    let m = split.algebra().dim();
    let mut coords = vec![Scalar::zero(); m];
    for (a, &k) in split.annihilator().iter().zip(c.iter().cycle()) {
        for (x, y) in coords.iter_mut().zip(a) {
            *x = x.clone() + y.clone() * Scalar::from(k);
        }
    }
    Functional::new(coords)
}

fn sample() -> impl Strategy<Value = (usize, Vec<i64>, Vec<i64>)> {
    (
        0usize..5,
        prop::collection::vec(-3i64..=3, 10),
        prop::collection::vec(-3i64..=3, 30),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn isotropy_splits_over_semidirect_parts((k, xs, _) in sample()) {
        let sw = stepwise(k);
        let split = sw.top_split().unwrap();
        let xi = projected(&split, &xs);
        prop_assert!(split.grad_check(&xi).unwrap().holds);
    }

    #[test]
    fn jump_sets_concatenate((k, xs, _) in sample()) {
        let sw = stepwise(k);
        let split = sw.top_split().unwrap();
        let xi = projected(&split, &xs);
        let out = split.jump_concat_check(&xi).unwrap();
        prop_assert!(out.holds, "{:?}", out);
    }

    #[test]
    fn split_hypothesis_is_annihilator_membership((k, xs, _) in sample()) {
        let sw = stepwise(k);
        let m = sw.algebra().dim();
        let split = sw.top_split().unwrap();
        let xi = functional(&xs, m);
        let kills = Subspace::span(m, split.annihilator()).contains(xi.coords());
        match split.grad_check(&xi) {
            Ok(_) => prop_assert!(kills),
            Err(e) => {
                let rejected = matches!(e, StepwiseError::HypothesisFailed { .. });
                prop_assert!(!kills && rejected);
            }
        }
    }

    #[test]
    fn intermediate_implication((k, xs, _) in sample()) {
        let sw = stepwise(k);
        let split = sw.top_split().unwrap();
        for xi in [projected(&split, &xs), functional(&xs, sw.algebra().dim())] {
            prop_assert!(split.interm_check(&xi).unwrap().holds);
        }
    }

    #[test]
    fn generic_functionals_are_nonzero_on_center((k, xs, _) in sample()) {
        let sw = stepwise(k);
        let alg = sw.algebra();
        let e = generic_jump_set(alg, GenericMode::Symbolic).unwrap();
        prop_assert!(lemma_obv_check(alg, &e, &functional(&xs, alg.dim())).unwrap().holds);
    }

    #[test]
    fn membership_is_orbit_invariant((k, xs, gs) in sample()) {
        let sw = stepwise(k);
        let m = sw.algebra().dim();
        let xi = functional(&xs, m);
        let moved = coadjoint_act(sw.algebra(), &group(&gs, m), &xi).unwrap();
        prop_assert_eq!(sw.x_membership(&xi).unwrap(), sw.x_membership(&moved).unwrap());
    }

    #[test]
    fn canonical_representative_is_unique((k, xs, gs) in sample()) {
        let sw = stepwise(k);
        let m = sw.algebra().dim();
        let xi = functional(&xs, m);
        prop_assume!(sw.x_membership(&xi).unwrap());
        let rep = sw.canonical_representative(&xi).unwrap();
        sw.verify_canonical(&xi, &rep).unwrap();
        let xi0 = Functional::new(rep.xi0.clone());
        prop_assert!(sw.v_positions().zero_based().iter().all(|&i| xi0.coords()[i].is_zero()));
        prop_assert_eq!(isotropy(sw.algebra(), &xi0).unwrap().isotropy, sw.s());
        prop_assert_eq!(sw.canonical_representative(&xi0).unwrap().xi0, rep.xi0.clone());

        let moved = coadjoint_act(sw.algebra(), &group(&gs, m), &xi).unwrap();
        prop_assert_eq!(sw.canonical_representative(&moved).unwrap().xi0, rep.xi0);
    }

    #[test]
    fn non_members_have_no_representative((k, xs, _) in sample()) {
        let sw = stepwise(k);
        let xi = functional(&xs, sw.algebra().dim());
        prop_assume!(!sw.x_membership(&xi).unwrap());
        prop_assert!(
            matches!(sw.canonical_representative(&xi), Err(StepwiseError::NotInX { .. })),
            "{:?}", sw.canonical_representative(&xi)
        );
    }

    #[test]
    fn two_layer_membership_is_coarse_stratum(k in 2usize..4, xs in prop::collection::vec(-3i64..=3, 10)) {
        let sw = stepwise(k);
        let xi = functional(&xs, sw.algebra().dim());
        prop_assert!(sw.main2_equivalence_check(&xi).unwrap().agree);
    }

    #[test]
    fn constant_on_layer_centers(k in 0usize..5, zs in prop::collection::vec(1i64..=4, 3)) {
        let sw = stepwise(k);
        let m = sw.algebra().dim();
        let mut coords = vec![Scalar::zero(); m];
        for (layer, z) in sw.layers().iter().zip(zs.iter().cycle()) {
            let basis = layer.z.basis();
            for (x, y) in coords.iter_mut().zip(&basis[0]) {
                *x = x.clone() + y.clone() * Scalar::from(*z);
            }
        }
        let xi = Functional::new(coords);
        let data = sw.main3_constant(&xi).unwrap();
        prop_assert_eq!(&data.jump_set, &sw.v_positions());
        prop_assert!(!data.pfaffian_abs.is_zero());
        prop_assert_eq!(jump_set(sw.algebra(), &xi).unwrap(), data.jump_set);
    }
}

#[test]
fn filiform4_canonical_example() {
    let sw = stepwise(2);
    let xi = Functional::new(vec![Scalar::from(1), Scalar::from(-1), Scalar::from(0), Scalar::new(1, 2)]);
    assert!(sw.x_membership(&xi).unwrap());
    let rep = sw.canonical_representative(&xi).unwrap();
    assert_eq!(rep.xi0, vec![Scalar::from(1), Scalar::from(0), Scalar::from(0), Scalar::from(0)]);
    sw.verify_canonical(&xi, &rep).unwrap();
}

#[test]
fn hypotheses_hold_on_catalog() {
    for k in 0..5 {
        let report = stepwise(k).check_hypotheses();
        assert!(report.ok, "{k}: {:?}", report.layers);
        assert!(report.layers.iter().all(|l| l.ok()));
    }
}

#[test]
fn equivalence_check_needs_two_layers() {
    assert!(matches!(
        stepwise(0).main2_equivalence_check(&Functional::zero(3)),
        Err(StepwiseError::NotApplicable(_))
    ));
}
