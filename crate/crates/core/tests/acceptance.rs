// SPDX-License-Identifier: Apache-2.0

//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the lines always
//! reach the terminal.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qca_core::array::{fidelity, ArrayDescriptor, QuantumState};
use qca_core::circuit::parse_circuit;
use qca_core::collective::{apply_collective, gate_matrix, CollectiveGate, GateId, Orientation, Phase, PulseStep};
use qca_core::compiler::{compile, reverse_steps};
use qca_core::layout::{build_layout, track_step, validate_layout, Layout, Occupant, Padding, Positions};
use qca_core::linalg::{CMatrix, Mat2, Mat4, C};
use qca_core::synthesizer::{alphabet_from_ids, default_alphabet, synthesize, verify_kernel, KernelSpec};
use qca_core::verifier::{reference_unitary, verify_program, Thresholds};
use qca_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_unitary(rng: &mut impl Rng) -> Mat2<f64> {
    let (a, b, g, t): (f64, f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen(), rng.gen());
    let tau = std::f64::consts::TAU;
    let (a, b, g, t) = (a * tau, b * tau, g * tau, t * tau);
    let ph = |x: f64| C::from_polar(1.0, x);
    let mut m = Mat2::zeros();
    m.0[0][0] = ph(a + b) * t.cos();
    m.0[0][1] = ph(a + g) * t.sin();
    m.0[1][0] = -ph(a - g) * t.sin();
    m.0[1][1] = ph(a - b) * t.cos();
    m
}

fn random_gate(rng: &mut impl Rng) -> CollectiveGate<f64> {
    let id = GateId::ALL[rng.gen_range(0..GateId::ALL.len())];
    if !id.is_controlled() {
        return CollectiveGate::new(id, Orientation::Symmetric, None).unwrap();
    }
    let o = if rng.gen() { Orientation::CtrlLeft } else { Orientation::CtrlRight };
    let param = (id == GateId::CtrlU).then(|| random_unitary(rng));
    CollectiveGate::new(id, o, param).unwrap()
}

fn random_phase(rng: &mut impl Rng) -> Phase {
    if rng.gen() {
        Phase::Alpha
    } else {
        Phase::Beta
    }
}

fn normalized(mut amps: Vec<C<f64>>) -> Vec<C<f64>> {
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|z| *z /= norm);
    amps
}

fn random_state(rng: &mut impl Rng, d: ArrayDescriptor) -> QuantumState<f64> {
    let amps = (0..d.dim()).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    QuantumState::from_amplitudes(d, normalized(amps)).unwrap()
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("{what} took {t:?}, limit {limit:?}"))
}

fn verify_case(k: usize, text: &str, limit: Duration) -> Result<f64, String> {
    let start = Instant::now();
    let (d, layout) = build_layout(k, 6, 3).map_err(|e| e.to_string())?;
    let circuit = parse_circuit::<f64>(text, Some(k)).map_err(|e| e.to_string())?;
    let program = compile(&circuit, &layout).map_err(|e| format!("{text}: {e}"))?;
    let o = verify_program(&circuit, &program, Thresholds::default()).map_err(|e| e.to_string())?;
    within(start, limit, &format!("k={k} '{text}'"))?;
    ensure(o.passed, || format!("k={k} n={} '{text}': {o}", d.n_cells()))?;
    Ok(o.fidelity)
}

fn criterion_1() -> Outcome {
    let mut worst = 1.0f64;
    let mut cases = 0;
    for k in [1, 2] {
        for q in 0..k {
            for g in ["X", "H", "T"] {
                let (d, _) = build_layout(k, 6, 3).unwrap();
                ensure(d.n_cells() <= 17, || format!("k={k} uses {} cells", d.n_cells()))?;
                worst = worst.min(verify_case(k, &format!("{g} {q}"), Duration::from_secs(5))?);
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases, worst fidelity {worst:.15}"))
}

fn criterion_2() -> Outcome {
    let mut worst = 1.0f64;
    let mut cases = 0;
    let mut slowest = Duration::ZERO;
    let pairs: [(usize, &[(usize, usize)]); 2] =
        [(2, &[(0, 1), (1, 0)]), (3, &[(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)])];
    for (k, list) in pairs {
        let (d, _) = build_layout(k, 6, 3).unwrap();
        ensure(d.n_cells() <= 23, || format!("k={k} uses {} cells", d.n_cells()))?;
        for &(c, t) in list {
            for g in ["CNOT", "CZ"] {
                let start = Instant::now();
                worst = worst.min(verify_case(k, &format!("{g} {c} {t}"), Duration::from_secs(120))?);
                slowest = slowest.max(start.elapsed());
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases, worst fidelity {worst:.15}, slowest {slowest:.2?}"))
}

fn criterion_3() -> Outcome {
    let text = "H 0\nCNOT 0 1\nH 0";
    let f = verify_case(2, text, Duration::from_secs(60))?;
    // Independent product: (H⊗I)·CNOT·(H⊗I), qubit 0 most significant.
    let h = CMatrix::from_fixed(&Mat2::<f64>::hadamard());
    let h0 = h.kron(&CMatrix::identity(2));
    let mut cnot = CMatrix::zeros(4);
    for (r, c) in [(0, 0), (1, 1), (3, 2), (2, 3)] {
        cnot[(r, c)] = C::new(1.0, 0.0);
    }
    let expected = h0.matmul(&cnot).matmul(&h0);
    let reference = reference_unitary(&parse_circuit::<f64>(text, Some(2)).unwrap());
    let dev = reference.max_deviation(&expected);
    ensure(dev < 1e-12, || format!("reference differs from explicit product by {dev:e}"))?;
    Ok(format!("fidelity {f:.15}, reference cross-check deviation {dev:.1e}"))
}

/// Dense operator of one collective step, built from Kronecker products.
fn kron_oracle(n: usize, step: &PulseStep<f64>) -> CMatrix<f64> {
    let g = CMatrix::from_fixed::<4>(&gate_matrix(&step.gate));
    let first = match step.phase {
        Phase::Alpha => 0,
        Phase::Beta => 1,
    };
    let mut factors = Vec::new();
    let mut cell = 0;
    while cell < n {
        if cell >= first && (cell - first) % 2 == 0 && cell + 1 < n {
            factors.push(g.clone());
            cell += 2;
        } else {
            factors.push(CMatrix::identity(2));
            cell += 1;
        }
    }
    factors.iter().fold(CMatrix::identity(1), |acc, f| acc.kron(f))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(2..=6);
        let d = ArrayDescriptor::new(n).unwrap();
        let step = PulseStep::new(random_phase(&mut rng), random_gate(&mut rng));
        let state = random_state(&mut rng, d);
        let expected = kron_oracle(n, &step).apply(state.amplitudes());
        let mut got = state.clone();
        apply_collective(&mut got, &step).map_err(|e| e.to_string())?;
        let dev = got.amplitudes().iter().zip(&expected).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        worst = worst.max(dev);
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("100 cases, max deviation {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut sequences = 0;
    for _ in 0..50 {
        let n = rng.gen_range(2..=12);
        let d = ArrayDescriptor::new(n).unwrap();
        let index = rng.gen_range(0..d.dim());
        let occupied: Positions =
            (0..n).filter(|&c| index & d.cell_mask(c) != 0).enumerate().map(|(i, c)| (Occupant::Ghost(i), c)).collect();
        for len in 0..=8 {
            let steps: Vec<PulseStep<f64>> = (0..len).map(|_| PulseStep::swap(random_phase(&mut rng))).collect();
            let mut state = QuantumState::basis(d, index).unwrap();
            let mut pos = occupied.clone();
            for s in &steps {
                apply_collective(&mut state, s).unwrap();
                pos = track_step(&pos, s, n);
            }
            let predicted = pos.values().fold(0, |acc, &c| acc | d.cell_mask(c));
            let expected = QuantumState::basis(d, predicted).unwrap();
            ensure(state == expected, || format!("n={n} input {index:b}: tracking predicts {predicted:b}"))?;
            sequences += 1;
        }
    }
    // The CU and a qubit in one pair trade places: the qubit moves right
    // and the CU moves left.
    let d = ArrayDescriptor::new(6).unwrap();
    let mut s = QuantumState::<f64>::basis(d, d.cell_mask(2)).unwrap();
    apply_collective(&mut s, &PulseStep::swap(Phase::Beta)).unwrap();
    ensure(s.excitation(1) > 0.999, || "qubit at 2 did not pass to 1 under BETA".into())?;
    let mut s = QuantumState::<f64>::basis(d, d.cell_mask(2) | d.cell_mask(3)).unwrap();
    apply_collective(&mut s, &PulseStep::swap(Phase::Alpha)).unwrap();
    ensure(s.excitation(2) > 0.999 && s.excitation(3) > 0.999, || "pair exchange lost an excitation".into())?;
    Ok(format!("{sequences} sequences over 50 layouts, zero mismatches"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut cases = 0;
    while cases < 100 {
        let gate = random_gate(&mut rng);
        if !gate.id().is_controlled() {
            continue;
        }
        let n = rng.gen_range(2..=10);
        let d = ArrayDescriptor::new(n).unwrap();
        let step = PulseStep::new(random_phase(&mut rng), gate);
        let first = if step.phase == Phase::Alpha { 0 } else { 1 };
        let controls: usize = (first..n.saturating_sub(1))
            .step_by(2)
            .map(|left| d.cell_mask(step.control_cell(left).unwrap()))
            .fold(0, |a, m| a | m);
        let amps: Vec<C<f64>> = (0..d.dim())
            .map(|i| {
                if i & controls == 0 {
                    C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                } else {
                    C::new(0.0, 0.0)
                }
            })
            .collect();
        let state = QuantumState::from_amplitudes(d, normalized(amps)).unwrap();
        let mut after = state.clone();
        apply_collective(&mut after, &step).unwrap();
        worst = worst.max(after.max_deviation(&state));
        cases += 1;
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("100 cases, max deviation {worst:.1e}"))
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    for gate in default_alphabet() {
        let m = gate_matrix(&gate);
        worst = worst.max((m * m).max_deviation(&Mat4::identity()));
    }
    ensure(worst <= 1e-12, || format!("an alphabet gate squares to identity only within {worst:e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (d, layout) = build_layout(2, 6, 3).unwrap();
    let mnemonics = ["H", "X", "T", "S", "Y", "Z"];
    let mut lowest = 1.0f64;
    for _ in 0..20 {
        let mut text = String::new();
        for _ in 0..rng.gen_range(1..=3) {
            if rng.gen_bool(0.3) {
                let c = rng.gen_range(0..2);
                text.push_str(&format!("CNOT {c} {}\n", 1 - c));
            } else {
                text.push_str(&format!("{} {}\n", mnemonics[rng.gen_range(0..6)], rng.gen_range(0..2)));
            }
        }
        let program = compile(&parse_circuit::<f64>(&text, Some(2)).unwrap(), &layout).unwrap();
        let cut = rng.gen_range(0..=program.steps.len());
        let prefix = &program.steps[..cut];
        let input = random_state(&mut rng, d);
        let mut state = input.clone();
        for s in prefix.iter().chain(&reverse_steps(prefix)) {
            apply_collective(&mut state, s).unwrap();
        }
        lowest = lowest.min(fidelity(&input, &state).unwrap());
    }
    ensure(lowest >= 1.0 - 1e-10, || format!("lowest round-trip fidelity {lowest:.15}"))?;
    Ok(format!("involution deviation {worst:.1e}, 20 prefixes, lowest fidelity {lowest:.15}"))
}

fn criterion_8() -> Outcome {
    let spec = KernelSpec::default();
    ensure(spec.window_size == 10 && spec.max_len == 12, || "default spec drifted".into())?;
    let start = Instant::now();
    let found = synthesize(&spec).map_err(|e| e.to_string())?;
    within(start, Duration::from_secs(600), "synthesis")?;
    let elapsed = start.elapsed();
    let report = verify_kernel(&found.steps, &spec);
    ensure(report.passed(), || format!("synthesized kernel fails re-verification:\n{report}"))?;

    let swap_only = KernelSpec { alphabet: alphabet_from_ids(&[GateId::Swap]).unwrap(), ..KernelSpec::default() };
    ensure(matches!(synthesize(&swap_only), Err(Error::NotFound { .. })), || "SWAP-only alphabet found a kernel".into())?;
    let short = KernelSpec { max_len: 1, ..KernelSpec::default() };
    ensure(matches!(synthesize(&short), Err(Error::NotFound { .. })), || "max_len 1 found a kernel".into())?;

    let mut spec = KernelSpec::default();
    let not = CollectiveGate::ctrl_u(Orientation::CtrlRight, Mat2::pauli_x()).unwrap();
    spec.alphabet.push(not);
    let cnot = PulseStep::new(Phase::Alpha, CollectiveGate::controlled(GateId::Cnot, Orientation::CtrlLeft).unwrap());
    let r = verify_kernel(&[cnot, PulseStep::new(Phase::Beta, not)], &spec);
    let witness = r.spectator.witness.clone().unwrap_or_default();
    ensure(!r.spectator.passed && witness.contains("|{-1,0,1}⟩"), || {
        format!("CNOT-then-NOT should duplicate a spectator, got: {witness}")
    })?;
    Ok(format!("length {} in {elapsed:.2?} ({} nodes), negative controls NotFound", found.steps.len(), found.nodes_visited))
}

fn layout_with_gaps(gaps: &[usize]) -> Layout {
    let mut cells = vec![6];
    for g in gaps {
        cells.push(cells.last().unwrap() + g + 1);
    }
    let d = ArrayDescriptor::new(cells.last().unwrap() + 7).unwrap();
    Layout::new(d, cells, 5)
}

fn criterion_9() -> Outcome {
    let per_qubit = |k: usize| {
        let (_, l) = build_layout(k, 6, 3).unwrap();
        let cells = l.qubit_cells();
        (cells[k - 1] - cells[0]) as f64 / (k - 1) as f64
    };
    let at10 = per_qubit(10);
    ensure((at10 - 5.0).abs() <= 0.5, || format!("k=10 interior average {at10}"))?;
    let at1000 = per_qubit(1000);
    ensure((at1000 - 5.0).abs() < (at10 - 5.0).abs(), || format!("k=1000 average {at1000} not closer to 5"))?;

    let padding = Padding::default();
    for gaps in [[3, 5], [5, 3], [5, 5]] {
        ensure(validate_layout(&layout_with_gaps(&gaps), padding).is_ok(), || format!("gaps {gaps:?} rejected"))?;
    }
    for gaps in [[2, 5], [5, 2], [3, 3], [4, 4], [3, 4]] {
        ensure(validate_layout(&layout_with_gaps(&gaps), padding).is_err(), || format!("gaps {gaps:?} accepted"))?;
    }
    Ok(format!("k=10 average {at10:.3}, k=1000 average {at1000:.3}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("single-qubit gates", criterion_1),
        ("two-qubit gates", criterion_2),
        ("composite circuit", criterion_3),
        ("Kronecker oracle", criterion_4),
        ("transport law", criterion_5),
        ("spectator invariance", criterion_6),
        ("involution and reversal", criterion_7),
        ("kernel synthesis", criterion_8),
        ("layout density", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{:.2?}]", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} [{:.2?}]", i + 1, start.elapsed());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
