mod common;

use common::{random_unitary, rng};
use lopforge::acceptance::reference_matrix;
use lopforge::circuit::CircuitJson;
use lopforge::linalg::{max_abs_diff, unitarity_deviation};
use lopforge::{decompose, element_matrix, lift_unitary, recompose, Circuit, CircuitElement, ModeUnitary};
use proptest::prelude::*;

#[test]
fn reference_circuit_recomposes_to_reference_matrix() {
    let c = Circuit::<f64>::bunching_reference();
    assert!(max_abs_diff(recompose(&c).matrix().view(), reference_matrix().view()) <= 1e-14);
}

#[test]
fn single_element_circuit_is_its_matrix() {
    let e = CircuitElement::beam_splitter(2, 3, 0.4, -1.1);
    let c = Circuit::new(3, vec![e]).unwrap();
    let m = element_matrix(&e, 3).unwrap();
    assert_eq!(recompose(&c).matrix(), m.matrix());
}

#[test]
fn decomposing_reference_matrix() {
    let m = ModeUnitary::new(reference_matrix()).unwrap();
    let c = decompose(&m, 1e-10).unwrap();
    assert!(max_abs_diff(recompose(&c).matrix().view(), m.matrix().view()) <= 1e-10);
    assert!(c.beam_splitter_count() <= 3);
}

#[test]
fn circuit_json_uses_documented_layout() {
    let text = r#"{"modes":3,"elements":[
        {"kind":"bs","modes":[1,2],"theta":0.5,"phi":0.25},
        {"kind":"ps","mode":3,"phase":1.0},
        {"kind":"swap","modes":[1,3]}]}"#;
    let json: CircuitJson = serde_json::from_str(text).unwrap();
    let c = Circuit::<f64>::from_json(&json).unwrap();
    assert_eq!(c.len(), 3);
    assert_eq!(c.elements()[1], CircuitElement::phase_shifter(3, 1.0));
    let bad: CircuitJson = serde_json::from_str(r#"{"modes":2,"elements":[{"kind":"swap","modes":[1,3]}]}"#).unwrap();
    assert!(Circuit::<f64>::from_json(&bad).is_err());
}

fn element_strategy(n: usize) -> impl Strategy<Value = CircuitElement<f64>> {
    let pair = (1..=n, 1..=n).prop_filter("distinct modes", |(i, j)| i != j);
    prop_oneof![
        (pair.clone(), -3.2f64..3.2, -3.2f64..3.2).prop_map(|((i, j), t, p)| CircuitElement::beam_splitter(i, j, t, p)),
        (1..=n, -3.2f64..3.2).prop_map(|(i, p)| CircuitElement::phase_shifter(i, p)),
        pair.prop_map(|(i, j)| CircuitElement::swap(i, j)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn round_trip(n in 2usize..5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_unitary(n, &mut r);
        let c = decompose(&m, 1e-10).unwrap();
        prop_assert!(c.beam_splitter_count() <= n * (n - 1) / 2);
        prop_assert!(c.len() <= n * (n - 1) / 2 + n);
        prop_assert!(max_abs_diff(recompose(&c).matrix().view(), m.matrix().view()) <= 1e-10);
    }

    #[test]
    fn element_matrices_are_unitary(e in element_strategy(4)) {
        let m = element_matrix(&e, 4).unwrap();
        prop_assert!(unitarity_deviation(m.matrix().view()) <= 1e-14);
    }

    #[test]
    fn lifting_commutes_with_composition(elements in prop::collection::vec(element_strategy(3), 0..6), n in 0usize..4) {
        let c = Circuit::new(3, elements.clone()).unwrap();
        let whole = lift_unitary(&recompose(&c), n).unwrap();
        let mut acc = lift_unitary(&ModeUnitary::identity(3), n).unwrap();
        for e in &elements {
            let step = lift_unitary(&element_matrix(e, 3).unwrap(), n).unwrap();
            acc = step.compose(&acc).unwrap();
        }
        prop_assert!(max_abs_diff(whole.matrix().view(), acc.matrix().view()) <= 1e-10);
    }
}
