use loccforge::analysis::is_reachable;
use loccforge::protocol::{build_paper_example, simulate, verify_deterministic, DeterminismClass};
use loccforge::Tolerances;

#[test]
fn example_runs_in_single_precision() {
    let tol = Tolerances::<f32>::for_precision();
    assert!(tol.is_valid() && tol.eq > 1e-9);
    let ex = build_paper_example(0.05f32, tol).unwrap();
    let sim = simulate(&ex.protocol, &ex.initial, tol).unwrap();
    assert_eq!(sim.leaves.len(), 4);
    assert!((sim.total_probability - 1.0).abs() < 1e-4);
    assert_eq!(sim.determinism_class, DeterminismClass::DeterministicWithProbabilisticSteps);
    assert!(verify_deterministic(&sim, &ex.target, 1e-4).unwrap().deterministic);
    let cert = is_reachable(ex.target.g(), ex.class.group(), tol).unwrap().unwrap();
    assert_eq!(cert.distinguished_party, 1);
}

#[test]
fn single_and_double_precision_agree() {
    let a = build_paper_example(0.03f32, Tolerances::for_precision()).unwrap();
    let b = build_paper_example(0.03f64, Tolerances::default()).unwrap();
    let sa = simulate(&a.protocol, &a.initial, Tolerances::for_precision()).unwrap();
    let sb = simulate(&b.protocol, &b.initial, Tolerances::default()).unwrap();
    for (x, y) in sa.leaves.iter().zip(&sb.leaves) {
        assert!((x.probability as f64 - y.probability).abs() < 1e-5);
    }
}
