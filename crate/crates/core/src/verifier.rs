// SPDX-License-Identifier: Apache-2.0

//! Exact end-to-end checking: run a pulse program on every logical basis
//! input, read off the induced logical unitary, and compare it with the
//! circuit's reference unitary up to one global phase.

use std::fmt;

use num_traits::{One, Zero};

use crate::array::{ArrayDescriptor, QuantumState};
use crate::circuit::{CircuitIR, Instruction};
use crate::collective::{apply_collective, PreparedStep, PulseStep};
use crate::compiler::PulseProgram;
use crate::error::{Error, Result};
use crate::layout::{Occupant, Positions};
use crate::linalg::{CMatrix, Mat2, C};
use crate::scalar::Real;

/// Applies every step of `steps` in order.
pub fn run_steps<T: Real>(steps: &[PulseStep<T>], state: &mut QuantumState<T>) -> Result<()> {
    for s in steps {
        apply_collective(state, s)?;
    }
    Ok(())
}

fn prepare<T: Real>(descriptor: ArrayDescriptor, steps: &[PulseStep<T>]) -> Result<Vec<PreparedStep<T>>> {
    steps.iter().map(|s| PreparedStep::new(descriptor, s)).collect()
}

pub fn run_program<T: Real>(program: &PulseProgram<T>, mut state: QuantumState<T>) -> Result<QuantumState<T>> {
    if state.descriptor() != program.descriptor() {
        return Err(Error::Dimension(format!(
            "state over {} cells, program over {}",
            state.descriptor().n_cells(),
            program.n_cells()
        )));
    }
    run_steps(&program.steps, &mut state)?;
    Ok(state)
}

/// Basis index with logical bits `bits` (qubit 0 most significant) placed
/// at the qubit cells of `positions` and the CU set.
pub fn encode<T: Real>(descriptor: &ArrayDescriptor, positions: &Positions, k: usize, bits: usize) -> Result<usize> {
    let mut index = 0;
    for (o, &cell) in positions {
        if cell >= descriptor.n_cells() {
            return Err(Error::Index { index: cell, n_cells: descriptor.n_cells() });
        }
        let set = match *o {
            Occupant::Qubit(q) => q < k && (bits >> (k - 1 - q)) & 1 == 1,
            Occupant::Cu => true,
            Occupant::Ghost(_) => false,
        };
        if set {
            index |= descriptor.cell_mask(cell);
        }
    }
    Ok(index)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogicalExtraction<T> {
    pub u_logical: CMatrix<T>,
    /// Largest probability, over basis inputs, found outside the expected
    /// blank / CU / qubit occupancy at the final positions.
    pub leakage: T,
}

/// Runs the program on each of the `2^k` logical basis inputs.
pub fn logical_unitary<T: Real>(program: &PulseProgram<T>) -> Result<LogicalExtraction<T>> {
    let descriptor = *program.descriptor();
    let k = program.layout.n_qubits();
    let initial = program.layout.positions();
    let dim = 1usize << k;
    let mut u = CMatrix::zeros(dim);
    let mut leakage = T::zero();
    let outputs: Vec<usize> =
        (0..dim).map(|j| encode::<T>(&descriptor, &program.final_positions, k, j)).collect::<Result<_>>()?;
    let steps = prepare(descriptor, &program.steps)?;
    for j in 0..dim {
        let input = encode::<T>(&descriptor, &initial, k, j)?;
        let mut state = QuantumState::basis(descriptor, input)?;
        for s in &steps {
            s.apply(&mut state)?;
        }
        let col: Vec<C<T>> = outputs.iter().map(|&i| state.amplitude(i)).collect();
        let kept = col.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        leakage = leakage.max((T::one() - kept).max(T::zero()));
        u.set_column(j, &col);
    }
    Ok(LogicalExtraction { u_logical: u, leakage })
}

fn embed_single<T: Real>(k: usize, q: usize, g: &Mat2<T>) -> CMatrix<T> {
    let dim = 1usize << k;
    let shift = k - 1 - q;
    let mut m = CMatrix::zeros(dim);
    for col in 0..dim {
        let b = (col >> shift) & 1;
        for r in 0..2 {
            let row = (col & !(1 << shift)) | (r << shift);
            m[(row, col)] = g.0[r][b];
        }
    }
    m
}

fn embed_controlled<T: Real>(k: usize, c: usize, t: usize, g: &Mat2<T>) -> CMatrix<T> {
    let dim = 1usize << k;
    let (cs, ts) = (k - 1 - c, k - 1 - t);
    let mut m = CMatrix::zeros(dim);
    for col in 0..dim {
        if (col >> cs) & 1 == 0 {
            m[(col, col)] = C::one();
            continue;
        }
        let b = (col >> ts) & 1;
        for r in 0..2 {
            let row = (col & !(1 << ts)) | (r << ts);
            m[(row, col)] = g.0[r][b];
        }
    }
    m
}

/// Ordered product of the circuit's instruction matrices, qubit 0 most
/// significant.
pub fn reference_unitary<T: Real>(circuit: &CircuitIR<T>) -> CMatrix<T> {
    let k = circuit.n_qubits();
    circuit.instructions().iter().fold(CMatrix::identity(1 << k), |acc, ins| {
        let g = match &ins.instruction {
            Instruction::U1 { qubit, u } => embed_single(k, *qubit, u),
            Instruction::CU2 { control, target, u } => embed_controlled(k, *control, *target, u),
        };
        g.matmul(&acc)
    })
}

/// `|tr(u† v)| / d`: one exactly when `u` and `v` differ by a global phase.
pub fn phase_fidelity<T: Real>(u: &CMatrix<T>, v: &CMatrix<T>) -> Result<T> {
    if u.dim() != v.dim() {
        return Err(Error::Dimension(format!("{}x{} versus {}x{}", u.dim(), u.dim(), v.dim(), v.dim())));
    }
    let mut tr = C::<T>::zero();
    for i in 0..u.dim() {
        for j in 0..u.dim() {
            tr = tr + u[(j, i)].conj() * v[(j, i)];
        }
    }
    Ok(tr.norm() / T::from_usize(u.dim()).expect("dimension fits"))
}

/// Pass thresholds for [`verify_program`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub min_fidelity: f64,
    pub max_leakage: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { min_fidelity: 1.0 - 1e-9, max_leakage: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationOutcome {
    pub fidelity: f64,
    pub leakage: f64,
    pub steps: usize,
    pub passed: bool,
}

impl fmt::Display for VerificationOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "fidelity={:.15} leakage={:.3e} steps={} verdict={}",
            self.fidelity,
            self.leakage,
            self.steps,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

/// Compares `program` against `circuit`'s reference unitary. Logical
/// qubits present in the layout but unused by the circuit must be left
/// untouched.
pub fn verify_program<T: Real>(
    circuit: &CircuitIR<T>,
    program: &PulseProgram<T>,
    thresholds: Thresholds,
) -> Result<VerificationOutcome> {
    let extraction = logical_unitary(program)?;
    let k = program.layout.n_qubits();
    let mut padded = CircuitIR::new(k);
    for ins in circuit.instructions() {
        padded.push(ins.instruction.clone(), ins.label.clone())?;
    }
    let fidelity = phase_fidelity(&extraction.u_logical, &reference_unitary(&padded))?.to_f64_lossy();
    let leakage = extraction.leakage.to_f64_lossy();
    Ok(VerificationOutcome {
        fidelity,
        leakage,
        steps: program.steps.len(),
        passed: fidelity >= thresholds.min_fidelity && leakage <= thresholds.max_leakage,
    })
}
