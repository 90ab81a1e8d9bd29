// SPDX-License-Identifier: Apache-2.0

use std::time::Instant;

use qca_core::circuit::parse_circuit;
use qca_core::compiler::compile;
use qca_core::layout::build_layout;
use qca_core::verifier::{verify_program, Thresholds};

fn check(k: usize, gap: usize, text: &str) -> f64 {
    let t = Instant::now();
    let (_, layout) = build_layout(k, 6, gap).unwrap();
    let circuit = parse_circuit::<f64>(text, Some(k)).unwrap();
    let program = compile(&circuit, &layout).unwrap();
    program.check_invariants().unwrap();
    let outcome = verify_program(&circuit, &program, Thresholds::default()).unwrap();
    assert!(outcome.passed, "{text} on k={k}: {outcome}");
    t.elapsed().as_secs_f64()
}

#[test]
fn single_qubit_gates() {
    for g in ["X", "H", "T"] {
        check(1, 3, &format!("{g} 0"));
        check(2, 3, &format!("{g} 0"));
        check(2, 3, &format!("{g} 1"));
    }
}

#[test]
fn two_qubit_gates_on_two_qubits() {
    for text in ["CNOT 0 1", "CNOT 1 0", "CZ 0 1", "CZ 1 0", "H 0\nCNOT 0 1\nH 0"] {
        check(2, 3, text);
        check(2, 5, text);
    }
}

#[test]
fn three_qubit_timing() {
    for text in ["CNOT 0 2", "CZ 1 0"] {
        let s = check(3, 3, text);
        eprintln!("{text}: {s:.1}s");
    }
}

