use bertini_core::gf::FieldSpec;
use bertini_core::harness::{fraction_f64, run_fraction, sample_ci, ExperimentPlan, Mode};
use bertini_core::scheme::{EmbeddedScheme, SectionEngine, SectionVerdict};

fn plane_f2() -> EmbeddedScheme {
    EmbeddedScheme::projective_space(&FieldSpec::of_order(2).unwrap(), 2).unwrap()
}

#[test]
fn sampled_estimates_cover_exhaustive_fraction() {
    for d in [2u32, 3] {
        let exact = run_fraction(&ExperimentPlan::new(plane_f2(), vec![d], Mode::Exhaustive, SectionEngine::Groebner).unwrap())
            .unwrap();
        let truth = fraction_f64(&exact.fraction);
        let mut covered = 0;
        for seed in 0..100 {
            let mode = Mode::Sample { count: 300, seed: 1000 * d as u64 + seed };
            let plan = ExperimentPlan::new(plane_f2(), vec![d], mode, SectionEngine::Groebner).unwrap().with_partitions(4);
            let (lo, hi) = sample_ci(&run_fraction(&plan).unwrap(), 0.05).unwrap();
            if lo <= truth && truth <= hi {
                covered += 1;
            }
        }
        assert!(covered >= 95, "d = {d}: {covered} of 100 intervals cover {truth}");
    }
}

#[test]
fn identical_plans_give_identical_results() {
    let mode = Mode::Sample { count: 400, seed: 42 };
    let plan = ExperimentPlan::new(plane_f2(), vec![3], mode, SectionEngine::Groebner).unwrap().with_partitions(6);
    let a = run_fraction(&plan).unwrap();
    let b = run_fraction(&plan).unwrap();
    assert_eq!(a.to_json().to_string(), b.to_json().to_string());
    let other = ExperimentPlan { mode: Mode::Sample { count: 400, seed: 43 }, ..plan };
    assert_eq!(run_fraction(&other).unwrap().total, 400);
}

#[test]
fn exhaustive_pointscan_is_not_exact() {
    let plan = ExperimentPlan::new(plane_f2(), vec![2], Mode::Exhaustive, SectionEngine::PointScan { e_max: 8 }).unwrap();
    let r = run_fraction(&plan).unwrap();
    assert!(!r.exact);
    assert_eq!(r.counts.get(SectionVerdict::SmoothOfExpectedDim), 0);
    assert_eq!(r.counts.get(SectionVerdict::Inconclusive), 28);
    assert_eq!(r.counts.total(), 64);
}

#[test]
fn complete_intersection_sections() {
    // Lines on a smooth conic: a line meets it in a reduced 0-dimensional
    // scheme unless tangent.
    let f3 = FieldSpec::of_order(3).unwrap();
    let x = EmbeddedScheme::parse("ci:2;x0^2+x1^2-x2^2", &f3).unwrap();
    let plan = ExperimentPlan::new(x, vec![1], Mode::Exhaustive, SectionEngine::Groebner).unwrap();
    let r = run_fraction(&plan).unwrap();
    assert_eq!(r.total, 27);
    assert_eq!(r.counts.get(SectionVerdict::WrongDimension), 1);
    // 13 lines in P^2(F_3): 4 tangent to the conic, each with two scalings.
    assert_eq!(r.counts.get(SectionVerdict::Singular), 8);
    assert_eq!(r.counts.get(SectionVerdict::SmoothOfExpectedDim), 18);
}

#[test]
fn plan_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plan.cfg");
    std::fs::write(&path, "x = pn:2   # the plane\ngf = 2\nd = 1\nmode = exhaustive\npartitions = 3\n").unwrap();
    let plan = ExperimentPlan::from_config(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(run_fraction(&plan).unwrap().fraction.to_string(), "7/8");
}
