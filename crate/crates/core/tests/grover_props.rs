use num_complex::Complex64;
use proptest::prelude::*;
use qsearch::grover::{
    build_grover, diffuser_circuit, grover_depth, grover_success_ideal, iteration_count, oracle_circuit, MczDepthCost,
};
use qsearch::statevector::{Gate, StateVector};
use qsearch::BitString;

// Amplitude of the target after k rounds, by the two-dimensional rotation
// picture evaluated with plain trigonometry.
fn rotation_picture(n: usize, k: usize) -> f64 {
    let theta = (1.0 / (1u64 << n) as f64).sqrt().asin();
    ((2 * k + 1) as f64 * theta).sin().powi(2)
}

proptest! {
    #[test]
    fn statevector_matches_closed_form(n in 1usize..=10, bits in any::<u64>()) {
        let target = BitString::new(bits & ((1 << n) - 1), n).unwrap();
        let plan = build_grover(&target).unwrap();
        let p = plan.final_state().unwrap().probability(&target).unwrap();
        let k = iteration_count(n);
        prop_assert!((p - rotation_picture(n, k)).abs() < 1e-10);
        prop_assert!((grover_success_ideal(n) - rotation_picture(n, k)).abs() < 1e-12);
    }
}

#[test]
fn iteration_schedule() {
    let expected = [(1, 1), (2, 1), (3, 2), (4, 3), (5, 4), (8, 12), (10, 25), (12, 50)];
    for (n, k) in expected {
        assert_eq!(iteration_count(n), k, "n={n}");
    }
}

#[test]
fn two_qubits_are_certain() {
    for t in ["00", "01", "10", "11"] {
        let target: BitString = t.parse().unwrap();
        let p = build_grover(&target).unwrap().final_state().unwrap().probability(&target).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }
}

#[test]
fn oracle_flips_only_the_target() {
    for n in 1..=6 {
        for target in BitString::all(n).unwrap() {
            let mut s = StateVector::uniform(n).unwrap();
            s.run(&oracle_circuit(&target).unwrap()).unwrap();
            let a = 1.0 / ((1u64 << n) as f64).sqrt();
            for (i, amp) in s.amplitudes().iter().enumerate() {
                let want = if i as u64 == target.index() { -a } else { a };
                assert!((amp - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn diffuser_reflects_about_uniform() {
    // 2|s><s| - I applied to a basis state |x> gives 2/N everywhere, minus 1 at x.
    for n in 2..=5 {
        let dim = 1usize << n;
        for x in BitString::all(n).unwrap() {
            let mut s = StateVector::basis(&x).unwrap();
            s.run(&diffuser_circuit(n).unwrap()).unwrap();
            // global phase of the H-X-MCZ form is -1
            let sign = -1.0;
            for (i, amp) in s.amplitudes().iter().enumerate() {
                let want = 2.0 / dim as f64 - if i as u64 == x.index() { 1.0 } else { 0.0 };
                assert!((amp.re - sign * want).abs() < 1e-12 && amp.im.abs() < 1e-12);
            }
        }
    }
}

#[test]
fn gate_count() {
    for n in 1..=8 {
        for target in [BitString::zeros(n).unwrap(), BitString::new((1 << n) - 1, n).unwrap()] {
            let plan = build_grover(&target).unwrap();
            let zeros = target.bits().filter(|b| !b).count();
            let oracle = 2 * zeros + 1;
            let diffuser = 4 * n + 1;
            assert_eq!(plan.circuit.len(), n + plan.iterations * (oracle + diffuser));
        }
    }
}

#[test]
fn depth_examples() {
    assert_eq!(grover_depth(2, MczDepthCost::Logical), 9);
    assert_eq!(grover_depth(8, MczDepthCost::Logical), 97);
    let plan = build_grover(&"01".parse().unwrap()).unwrap();
    assert_eq!(plan.depth(MczDepthCost::Logical), 9);
    let all_ones = build_grover(&"1111".parse().unwrap()).unwrap();
    assert_eq!(all_ones.depth(MczDepthCost::Logical), 1 + 3 * 6);
    assert_eq!(all_ones.circuit.count(|g| matches!(g, Gate::X(_))), 3 * 2 * 4);
}

#[test]
fn depth_doubles_every_two_qubits() {
    let ratio = |n| grover_depth(n + 2, MczDepthCost::Logical) as f64 / grover_depth(n, MczDepthCost::Logical) as f64;
    assert!((ratio(20) - 2.0).abs() < 0.01);
    assert!((ratio(12) - 2.0).abs() < ratio(4) - 2.0 + 0.05);
}
