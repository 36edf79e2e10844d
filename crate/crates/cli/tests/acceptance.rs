//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::path::PathBuf;
use std::process::{Command, ExitCode};

use nilstrat_core::catalog::{self, AlgebraBundle};
use nilstrat_core::coadjoint::{
    coadjoint_act, flat_orbit_test, generic_jump_set, random_vector, square_integrability_constant,
    trial_rng, Functional, GenericMode, GroupElement, JumpSet, SamplingConfig,
};
use nilstrat_core::lie::{Flag, FlaggedAlgebra};
use nilstrat_core::linalg::{Field, Mat, Scalar};
use nilstrat_core::stepwise::Stepwise;
use nilstrat_core::suites::{selftest_config, SelftestReport, Selftest, SuiteKind};

const TRIALS: usize = 1000;
const SEED: u64 = 0;

type Check = Result<String, String>;

fn fixture_path(stem: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{stem}.{}", catalog::FILE_EXTENSION))
}

fn fixture(stem: &str) -> Result<AlgebraBundle, String> {
    catalog::load(fixture_path(stem)).map_err(|e| format!("{stem}: {e}"))
}

fn flagged(stem: &str) -> Result<FlaggedAlgebra, String> {
    fixture(stem)?.flagged().map_err(|e| e.to_string())
}

fn stepwise(stem: &str) -> Result<Stepwise, String> {
    let b = fixture(stem)?;
    let data = b.stepwise.as_ref().ok_or(format!("{stem} has no stepwise data"))?;
    Stepwise::new(b.flagged().map_err(|e| e.to_string())?, data).map_err(|e| e.to_string())
}

fn functional(coords: &[Scalar]) -> Functional {
    Functional::new(coords.to_vec())
}

fn ints(v: &[i64]) -> Vec<Scalar> {
    v.iter().map(|&x| Scalar::from(x)).collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture_invariants() -> Check {
    let expected = [
        ("heisenberg1", vec![2, 3]),
        ("filiform4", vec![2, 3]),
        ("upper_triangular4", vec![2, 3, 4, 5]),
    ];
    let cfg = SamplingConfig {
        trials: TRIALS,
        seed: SEED,
        ..SamplingConfig::default()
    };
    let mut parts = Vec::new();
    for (stem, e) in expected {
        let alg = flagged(stem)?;
        let symbolic = generic_jump_set(&alg, GenericMode::Symbolic).map_err(|e| e.to_string())?;
        let sampled = generic_jump_set(&alg, GenericMode::Sampled(cfg)).map_err(|e| e.to_string())?;
        ensure(symbolic == JumpSet::new(e.clone()), || format!("{stem}: symbolic e = {symbolic}"))?;
        ensure(sampled == symbolic, || format!("{stem}: sampled {sampled} vs symbolic {symbolic}"))?;
        parts.push(format!("{stem} {symbolic}"));
    }
    Ok(parts.join(", "))
}

fn flatness() -> Check {
    for n in 1..=3 {
        let stem = format!("heisenberg{n}");
        ensure(flat_orbit_test(&flagged(&stem)?).flat, || format!("{stem} not flat"))?;
    }

    let ut4 = fixture("upper_triangular4")?;
    let m1 = &ut4.stepwise.as_ref().ok_or("ut(4) has no layers")?.layers[0].m;
    let layer = ut4.algebra.restrict(m1, "m1").map_err(|e| e.to_string())?;
    let corner = layer.label_index("E14").ok_or("E14 is not in m_1")?;
    let order: Vec<usize> = std::iter::once(corner)
        .chain((0..layer.dim()).filter(|&i| i != corner))
        .collect();
    let dim = layer.dim();
    let layer = FlaggedAlgebra::new(layer, Flag::from_order(dim, &order)).map_err(|e| e.to_string())?;
    ensure(flat_orbit_test(&layer).flat, || "hook layer m_1 of ut(4) not flat".into())?;

    for stem in ["filiform4", "upper_triangular4"] {
        ensure(!flat_orbit_test(&flagged(stem)?).flat, || format!("{stem} reported flat"))?;
    }
    Ok(format!("heisenberg1..3 and m_1 (dim {dim}) flat; filiform4, ut(4) not flat"))
}

fn constants() -> Check {
    let h3 = flagged("heisenberg1")?;
    let e = JumpSet::new(vec![2, 3]);
    for lambda in [Scalar::from(1), Scalar::from(-2), Scalar::new(3, 7), Scalar::new(-5, 2)] {
        let xi = functional(&[lambda.clone(), Scalar::zero(), Scalar::zero()]);
        let c = square_integrability_constant(&h3, &xi, &e).map_err(|e| e.to_string())?;
        ensure(c.two_pi_power == 1 && c.magnitude == lambda.abs().recip(), || {
            format!("h3 at λ = {lambda}: power {}, magnitude {}", c.two_pi_power, c.magnitude)
        })?;
    }

    // flag order (E14, E13, E24, E12, E34, E23)
    let ut4 = stepwise("upper_triangular4")?;
    for (a, b) in [(1, 1), (3, -2), (-4, 5), (7, 1)] {
        let xi = functional(&ints(&[a, 0, 0, 0, 0, b]));
        let c = ut4.main3_constant(&xi).map_err(|e| e.to_string())?;
        ensure(c.two_pi_power == 2 && c.pfaffian_abs == Scalar::from(a * a), || {
            format!("ut(4) at a = {a}, b = {b}: power {}, |Pf| {}", c.two_pi_power, c.pfaffian_abs)
        })?;
    }

    for (stream, n) in [4usize, 6, 8].into_iter().enumerate() {
        for t in 0..100u64 {
            let mut rng = trial_rng(SEED, ((stream as u64) << 32) | t);
            let upper = random_vector(&mut rng, n * (n - 1) / 2, 1000);
            let mut m = Mat::zeros(n, n);
            let mut it = upper.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    let v = it.next().expect("enough entries");
                    m.set(j, i, -v.clone());
                    m.set(i, j, v);
                }
            }
            let pf = m.pfaffian().map_err(|e| e.to_string())?;
            let det = m.det().map_err(|e| e.to_string())?;
            ensure(pf.clone() * pf == det, || format!("Pf² ≠ det on a {n}x{n} sample {t}"))?;
        }
    }
    Ok("h3 power 1 with 1/|λ|; ut(4) power 2 with |Pf| = a²; Pf² = det on 300 skew matrices".into())
}

struct Reports {
    h3: SelftestReport,
    filiform4: SelftestReport,
    ut4: SelftestReport,
}

impl Reports {
    fn all(&self) -> [(&'static str, &SelftestReport); 3] {
        [("h3", &self.h3), ("filiform4", &self.filiform4), ("ut(4)", &self.ut4)]
    }
}

fn run_selftest(stem: &str) -> Result<SelftestReport, String> {
    let b = fixture(stem)?;
    Selftest::new(&b, selftest_config(TRIALS, SEED))
        .map(|s| s.run_all())
        .map_err(|e| format!("{stem}: {e}"))
}

fn suite_clean(name: &str, r: &SelftestReport, kind: SuiteKind, min_trials: usize) -> Result<(usize, usize), String> {
    let s = r.suite(kind).ok_or(format!("{name}: no {} suite", kind.name()))?;
    ensure(s.applicable, || format!("{name}: {} not applicable", kind.name()))?;
    ensure(s.trials >= min_trials, || format!("{name}: {} ran {} trials", kind.name(), s.trials))?;
    ensure(s.failures == 0, || {
        format!(
            "{name}: {} failed {}/{} ({})",
            kind.name(),
            s.failures,
            s.trials,
            s.first_failure.clone().unwrap_or_default()
        )
    })?;
    Ok((s.trials, s.informative))
}

fn grad_suite(r: &Reports) -> Check {
    let mut parts = Vec::new();
    for (name, report) in [("filiform4", &r.filiform4), ("ut(4)", &r.ut4)] {
        let (trials, informative) = suite_clean(name, report, SuiteKind::Grad, TRIALS)?;
        ensure(informative == trials, || format!("{name}: {informative}/{trials}"))?;
        parts.push(format!("{name} {informative}/{trials}"));
    }
    Ok(parts.join(", "))
}

fn jump_concat_suite(r: &Reports) -> Check {
    let mut parts = Vec::new();
    for (name, report) in [("filiform4", &r.filiform4), ("ut(4)", &r.ut4)] {
        let (trials, informative) = suite_clean(name, report, SuiteKind::JumpConcat, TRIALS)?;
        ensure(informative >= 1, || format!("{name}: no informative trial"))?;
        parts.push(format!("{name} {informative} informative of {trials}"));
    }
    Ok(parts.join(", "))
}

fn obv_interm_suites(r: &Reports) -> Check {
    let mut parts = Vec::new();
    let mut short = Vec::new();
    for kind in [SuiteKind::LemmaObv, SuiteKind::Interm] {
        for (name, report) in r.all() {
            let (trials, informative) = suite_clean(name, report, kind, TRIALS)?;
            parts.push(format!("{} {name} {informative}/{trials}", kind.name()));
            if name != "ut(4)" && informative < 100 {
                short.push(format!("{} on {name} has {informative} informative trials", kind.name()));
            }
        }
    }
    if short.is_empty() {
        Ok(parts.join(", "))
    } else {
        Err(format!("{} ({})", short.join("; "), parts.join(", ")))
    }
}

fn canonical_form() -> Check {
    let mut checked = 0;
    for (stem, _) in catalog::shipped_fixtures().map_err(|e| e.to_string())? {
        let report = stepwise(&stem)?.check_hypotheses();
        ensure(report.ok, || format!("{stem}: hypotheses fail"))?;
        checked += 1;
    }

    let f4 = stepwise("filiform4")?;
    let xi = functional(&[Scalar::from(1), Scalar::from(-1), Scalar::zero(), Scalar::new(1, 2)]);
    let rep = f4.canonical_representative(&xi).map_err(|e| e.to_string())?;
    ensure(rep.xi0 == ints(&[1, 0, 0, 0]), || format!("ξ₀ = {}", functional(&rep.xi0)))?;
    f4.verify_canonical(&xi, &rep).map_err(|e| e.to_string())?;
    let mapped = coadjoint_act(f4.algebra(), &rep.certificate, &xi).map_err(|e| e.to_string())?;
    ensure(mapped.coords() == rep.xi0.as_slice(), || "certificate does not reproduce ξ₀".into())?;

    let member = f4.x_membership(&xi).map_err(|e| e.to_string())?;
    for t in 0..100u64 {
        let mut rng = trial_rng(SEED, t);
        let h = GroupElement::new((0..3).map(|_| random_vector(&mut rng, 4, 1000)).collect());
        let moved = coadjoint_act(f4.algebra(), &h, &xi).map_err(|e| e.to_string())?;
        ensure(f4.x_membership(&moved).map_err(|e| e.to_string())? == member, || {
            format!("membership changed along the orbit at sample {t}")
        })?;
        let other = f4.canonical_representative(&moved).map_err(|e| e.to_string())?;
        ensure(other.xi0 == rep.xi0, || format!("sample {t} gives {}", functional(&other.xi0)))?;
    }
    Ok(format!(
        "hypotheses on {checked} fixtures; (1,-1,0,1/2) -> {}; 100 orbit samples agree",
        functional(&rep.xi0)
    ))
}

fn main2_suite(r: &Reports) -> Check {
    let (trials, informative) = suite_clean("filiform4", &r.filiform4, SuiteKind::Main2, 2 * TRIALS)?;
    Ok(format!("filiform4 {trials} trials ({TRIALS} random plus ξ(X1) = 0 partners), {informative} informative, 0 mismatches"))
}

fn genericity() -> Check {
    let mut parts = Vec::new();
    for (stem, _) in catalog::shipped_fixtures().map_err(|e| e.to_string())? {
        let b = fixture(&stem)?;
        let s = Selftest::new(&b, selftest_config(TRIALS, SEED))
            .map_err(|e| e.to_string())?
            .run(SuiteKind::Genericity);
        ensure(s.failures == 0 && s.informative == TRIALS, || {
            format!("{stem}: {}/{} ({})", s.informative, s.trials, s.first_failure.clone().unwrap_or_default())
        })?;
        parts.push(format!("{stem} {}/{}", s.informative, s.trials));
    }
    Ok(parts.join(", "))
}

fn determinism() -> Check {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_nilstrat"))
            .arg("selftest")
            .arg(fixture_path("filiform4"))
            .args(["--trials", "1000", "--seed", "0"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success(), || format!("selftest exited with {}", a.status))?;
    ensure(a.stdout == b.stdout, || "reports differ".into())?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() -> ExitCode {
    let reports = ["heisenberg1", "filiform4", "upper_triangular4"]
        .map(run_selftest);
    let reports = match reports {
        [Ok(h3), Ok(filiform4), Ok(ut4)] => Ok(Reports { h3, filiform4, ut4 }),
        [a, b, c] => Err([a.err(), b.err(), c.err()].into_iter().flatten().collect::<Vec<_>>().join("; ")),
    };
    let with_reports = |f: fn(&Reports) -> Check| reports.as_ref().map_err(Clone::clone).and_then(f);

    let results: Vec<Check> = vec![
        fixture_invariants(),
        flatness(),
        constants(),
        with_reports(grad_suite),
        with_reports(jump_concat_suite),
        with_reports(obv_interm_suites),
        canonical_form(),
        with_reports(main2_suite),
        genericity(),
        determinism(),
    ];
    let mut failed = 0;
    for (i, r) in results.iter().enumerate() {
        match r {
            Ok(detail) => println!("criterion {}: PASS  {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
