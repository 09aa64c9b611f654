mod common;

use std::sync::Arc;

use common::{dist, gram, mul, raw};
use loccforge::analysis::{construct_reaching_protocol, is_reachable, lu_equivalent};
use loccforge::linalg::{
    bloch_to_operator, gram_from_bloch, matrix_sqrt_psd, operator_to_bloch, tensor_product, BlochVector,
    ProductOperator,
};
use loccforge::protocol::{build_paper_example, simulate, verify_deterministic, LoccNode};
use loccforge::sampler::{construct_reachable, ginibre, random_unitary, sample_product_operator, sample_rng};
use loccforge::seed::{build_l_state, pauli_group};
use loccforge::{Class, Complex, Operator, Tolerances, Tracked};
use proptest::prelude::*;

fn bloch() -> impl Strategy<Value = [f64; 3]> {
    (-0.28..0.28f64, -0.28..0.28f64, -0.28..0.28f64).prop_map(|(x, y, z)| [x, y, z])
}

fn l_class() -> Arc<Class> {
    Arc::new(Class::Concrete(build_l_state(1e-10).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bloch_round_trip(v in bloch()) {
        let g = bloch_to_operator(BlochVector::from_array(v)).unwrap();
        let back = operator_to_bloch(&g.gram(), 1e-9).unwrap().to_array();
        for k in 0..3 {
            prop_assert!((back[k] - v[k]).abs() < 1e-12);
        }
        // g is the positive root: Hermitian with g² = G
        prop_assert!(g.hermitian_residual() < 1e-12);
        let expected = raw(&gram_from_bloch(BlochVector::from_array(v)));
        prop_assert!(dist(&mul(&raw(&g), &raw(&g)), &expected) < 1e-12);
    }

    #[test]
    fn tensor_product_is_associative(seed in 0u64..1000) {
        let mut rng = sample_rng(seed, 0);
        let a: Operator = ginibre(2, &mut rng);
        let b: Operator = ginibre(3, &mut rng);
        let c: Operator = ginibre(2, &mut rng);
        let left = tensor_product(&[tensor_product(&[a.clone(), b.clone()]).unwrap(), c.clone()]).unwrap();
        let right = tensor_product(&[a.clone(), tensor_product(&[b.clone(), c.clone()]).unwrap()]).unwrap();
        let flat = tensor_product(&[a, b, c]).unwrap();
        prop_assert!(dist(&raw(&left), &raw(&right)) < 1e-12);
        prop_assert!(dist(&raw(&left), &raw(&flat)) < 1e-12);
    }

    #[test]
    fn psd_square_root_squares_back(seed in 0u64..1000, d in 2usize..5) {
        let mut rng = sample_rng(seed, 1);
        let m = ginibre::<f64, _>(d, &mut rng).gram();
        let r = matrix_sqrt_psd(&m, 1e-9).unwrap();
        prop_assert!(dist(&mul(&raw(&r), &raw(&r)), &raw(&m)) < 1e-9 * (1.0 + m.frobenius_norm()));
        prop_assert!(r.hermitian_residual() < 1e-10);
    }

    #[test]
    fn lu_equivalence_is_an_equivalence_relation(seed in 0u64..500) {
        let class = l_class();
        let group = class.group();
        let mut rng = sample_rng(seed, 2);
        let g = sample_product_operator::<f64, _>(&[2; 4], &mut rng).unwrap();
        let s1 = &group.element((seed % 12) as usize).operator;
        let s2 = &group.element(((seed / 12) % 12) as usize).operator;
        let unitaries: Vec<Operator> = (0..4).map(|_| random_unitary(2, &mut rng)).collect();
        let u = ProductOperator::new(unitaries).unwrap();
        let a = Tracked::new(g.clone(), class.clone(), 1e-10).unwrap();
        let b = Tracked::new(u.compose(&g).compose(s1), class.clone(), 1e-10).unwrap();
        let c = Tracked::new(g.compose(s1).compose(s2), class.clone(), 1e-10).unwrap();
        let eq = |x: &Tracked, y: &Tracked| lu_equivalent(x, y, 1e-9).unwrap().is_some();
        prop_assert!(eq(&a, &a));
        prop_assert!(eq(&a, &b) && eq(&b, &a));
        prop_assert!(eq(&b, &c) && eq(&a, &c));
        let other = Tracked::new(sample_product_operator(&[2; 4], &mut rng).unwrap(), class.clone(), 1e-10).unwrap();
        prop_assert_eq!(eq(&a, &other), eq(&other, &a));
    }

    #[test]
    fn witness_relates_grams(seed in 0u64..500) {
        let class = l_class();
        let group = class.group();
        let mut rng = sample_rng(seed, 3);
        let g = sample_product_operator::<f64, _>(&[2; 4], &mut rng).unwrap();
        let s = &group.element((seed % 12) as usize).operator;
        let a = Tracked::new(g.clone(), class.clone(), 1e-10).unwrap();
        let b = Tracked::new(g.compose(s), class.clone(), 1e-10).unwrap();
        let w = lu_equivalent(&a, &b, 1e-9).unwrap().expect("related by a symmetry");
        let sw = &group.element(w).operator;
        for k in 0..4 {
            let ga = gram(&raw(a.g().factor(k)));
            let gb = gram(&raw(b.g().factor(k)));
            let f = raw(sw.factor(k));
            prop_assert!(dist(&ga, &mul(&mul(&common::dagger(&f), &gb), &f)) < 1e-9);
        }
    }

    #[test]
    fn reachability_ignores_scale(seed in 0u64..500, scale in 0.01..100f64, phase in 0.0..std::f64::consts::TAU) {
        let class = l_class();
        let mut rng = sample_rng(seed, 4);
        let h = if seed % 2 == 0 {
            construct_reachable(class.group(), &mut rng, Tolerances::default()).unwrap()
        } else {
            sample_product_operator(&[2; 4], &mut rng).unwrap()
        };
        let z = Complex::from_polar(scale, phase);
        let scaled = h.with_factor(1, h.factor(1).scale(z));
        let key = |c: Option<loccforge::analysis::ReachabilityCertificate<f64>>| c.map(|c| (c.symmetry_index, c.distinguished_party));
        let a = key(is_reachable(&h, class.group(), Tolerances::default()).unwrap());
        let b = key(is_reachable(&scaled, class.group(), Tolerances::default()).unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn reachability_is_monotone_in_nz(seed in 0u64..300) {
        // raising the nonzero threshold can only remove certificates
        let group = pauli_group::<f64>(3, 1e-10).unwrap();
        let mut rng = sample_rng(seed, 5);
        let h = construct_reachable(&group, &mut rng, Tolerances::default()).unwrap();
        let mut last = true;
        for nz in [1e-6, 1e-4, 1e-2, 1e-1, 1.0, 10.0] {
            let found = is_reachable(&h, &group, Tolerances::new(1e-9, nz)).unwrap().is_some();
            prop_assert!(last || !found, "certificate reappeared at nz = {}", nz);
            last = found;
        }
        prop_assert!(!last);
    }
}

/// Reaching protocols on the abstract Pauli class: every built round is
/// deterministic onto the requested target.
#[test]
fn reaching_protocols_are_sound_on_pauli_class() {
    let group = pauli_group::<f64>(3, 1e-10).unwrap();
    let class = Arc::new(Class::Abstract(group.clone()));
    let tol = Tolerances::default();
    for i in 0..100 {
        let mut rng = sample_rng(11, i);
        let h = construct_reachable(&group, &mut rng, tol).unwrap();
        let cert = is_reachable(&h, &group, tol).unwrap().unwrap();
        let p = 0.1 + 0.8 * (i as f64 + 0.5) / 100.0;
        let (source, protocol) = construct_reaching_protocol(&h, &cert, p, class.clone(), tol).unwrap();
        let target = Tracked::new(h, class.clone(), 1e-10).unwrap();
        let sim = simulate(&protocol, &source, tol).unwrap();
        assert!(verify_deterministic(&sim, &target, 1e-9).unwrap().deterministic, "case {i}");
        assert!((sim.total_probability - 1.0).abs() < 1e-9);
    }
}

/// A σ_1 correction on party 2 ahead of its measurement changes the Grams
/// of all leaves below it; σ_1 on an idle party is a local unitary and leaves
/// every LU class intact.
#[test]
fn corrupted_correction_is_detected() {
    let tol = Tolerances::default();
    let ex = build_paper_example(0.05, tol).unwrap();
    let corrupt = |path: &[usize], party: usize| {
        let mut tree = ex.protocol.clone();
        let mut node = &mut tree;
        let (last, prefix) = path.split_last().unwrap();
        for &i in prefix {
            let LoccNode::Round(r) = node else { unreachable!() };
            node = &mut r.outcomes[i].child;
        }
        let LoccNode::Round(r) = node else { unreachable!() };
        r.outcomes[*last].corrections.insert(party, Operator::pauli(1));
        tree
    };
    let witnesses = |tree: &LoccNode<f64>| {
        let sim = simulate(tree, &ex.initial, tol).unwrap();
        verify_deterministic(&sim, &ex.target, 1e-9)
            .unwrap()
            .witnesses
            .iter()
            .map(|(_, w)| w.is_some())
            .collect::<Vec<_>>()
    };
    assert_eq!(witnesses(&ex.protocol), [true; 4]);
    assert_eq!(witnesses(&corrupt(&[1], 1)), [true, true, false, false]);
    assert_eq!(witnesses(&corrupt(&[0], 1)), [false, false, true, true]);
    assert_eq!(witnesses(&corrupt(&[1, 0], 2)), [true; 4]);
}
