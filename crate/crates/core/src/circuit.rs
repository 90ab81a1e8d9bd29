// SPDX-License-Identifier: Apache-2.0

//! Logical circuits: single-qubit unitaries and controlled unitaries over
//! `k` qubits, plus the line-based text format.

use std::fmt;

use crate::collective::parse_mat2;
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction<T> {
    U1 { qubit: usize, u: Mat2<T> },
    CU2 { control: usize, target: usize, u: Mat2<T> },
}

impl<T: Real> Instruction<T> {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Instruction::U1 { qubit, .. } => vec![qubit],
            Instruction::CU2 { control, target, .. } => vec![control, target],
        }
    }

    pub fn unitary(&self) -> &Mat2<T> {
        match self {
            Instruction::U1 { u, .. } | Instruction::CU2 { u, .. } => u,
        }
    }
}

/// An instruction plus the mnemonic it was written with.
#[derive(Debug, Clone, PartialEq)]
pub struct Labeled<T> {
    pub instruction: Instruction<T>,
    pub label: String,
}

impl<T: Real> fmt::Display for Labeled<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitIR<T> {
    k: usize,
    instructions: Vec<Labeled<T>>,
}

impl<T: Real> CircuitIR<T> {
    pub fn new(k: usize) -> Self {
        CircuitIR { k, instructions: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.k
    }

    pub fn instructions(&self) -> &[Labeled<T>] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Appends after checking indices and unitarity.
    pub fn push(&mut self, instruction: Instruction<T>, label: impl Into<String>) -> Result<()> {
        for q in instruction.qubits() {
            if q >= self.k {
                return Err(Error::Index { index: q, n_cells: self.k });
            }
        }
        if let Instruction::CU2 { control, target, .. } = instruction {
            if control == target {
                return Err(Error::MalformedGate(format!("control and target are both qubit {control}")));
            }
        }
        let err = instruction.unitary().unitarity_error();
        if err > T::tolerance() {
            return Err(Error::NonUnitaryGate(err.to_f64_lossy()));
        }
        self.instructions.push(Labeled { instruction, label: label.into() });
        Ok(())
    }

    pub fn u1(mut self, qubit: usize, u: Mat2<T>, label: &str) -> Result<Self> {
        self.push(Instruction::U1 { qubit, u }, format!("{label} {qubit}"))?;
        Ok(self)
    }

    pub fn cu(mut self, control: usize, target: usize, u: Mat2<T>, label: &str) -> Result<Self> {
        self.push(Instruction::CU2 { control, target, u }, format!("{label} {control} {target}"))?;
        Ok(self)
    }
}

/// Matrix for a named single-qubit gate.
pub fn named_gate<T: Real>(name: &str) -> Option<Mat2<T>> {
    Some(match name {
        "H" => Mat2::hadamard(),
        "X" => Mat2::pauli_x(),
        "Y" => Mat2::pauli_y(),
        "Z" => Mat2::pauli_z(),
        "S" => Mat2::phase_s(),
        "T" => Mat2::phase_t(),
        _ => return None,
    })
}

/// Parses the circuit format. With `k = None` the qubit count is one more
/// than the largest index used.
///
/// ```text
/// # comment
/// H 0
/// U1 1 re00 im00 re01 im01 re10 im10 re11 im11
/// CNOT 0 1
/// CZ 1 0
/// CU 0 1 <8 floats>
/// ```
pub fn parse_circuit<T: Real>(text: &str, k: Option<usize>) -> Result<CircuitIR<T>> {
    let mut parsed = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line, message };
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let mnemonic = tokens[0].to_ascii_uppercase();
        let index = |t: &str| t.parse::<usize>().map_err(|_| err(format!("bad qubit index '{t}'")));
        let arity = |n: usize| {
            if tokens.len() == n + 1 {
                Ok(())
            } else {
                Err(err(format!("{mnemonic} takes {n} operand(s), got {}", tokens.len() - 1)))
            }
        };
        let instruction = match mnemonic.as_str() {
            "H" | "X" | "Y" | "Z" | "S" | "T" => {
                arity(1)?;
                Instruction::U1 { qubit: index(tokens[1])?, u: named_gate(&mnemonic).expect("named gate") }
            }
            "U1" => {
                arity(9)?;
                Instruction::U1 { qubit: index(tokens[1])?, u: parse_mat2(&tokens[2..]).map_err(err)? }
            }
            "CNOT" | "CZ" => {
                arity(2)?;
                let u = if mnemonic == "CNOT" { Mat2::pauli_x() } else { Mat2::pauli_z() };
                Instruction::CU2 { control: index(tokens[1])?, target: index(tokens[2])?, u }
            }
            "CU" => {
                arity(10)?;
                Instruction::CU2 {
                    control: index(tokens[1])?,
                    target: index(tokens[2])?,
                    u: parse_mat2(&tokens[3..]).map_err(err)?,
                }
            }
            other => return Err(err(format!("unknown mnemonic '{other}'"))),
        };
        let label = match mnemonic.as_str() {
            "U1" | "CU" => format!("{mnemonic} {}", tokens[1..instruction.qubits().len() + 1].join(" ")),
            _ => body.split_whitespace().collect::<Vec<_>>().join(" "),
        };
        parsed.push((line, instruction, label));
    }
    let k = k.unwrap_or_else(|| {
        parsed.iter().flat_map(|(_, ins, _)| ins.qubits()).max().map_or(0, |m| m + 1)
    });
    let mut circuit = CircuitIR::new(k);
    for (line, instruction, label) in parsed {
        circuit.push(instruction, label).map_err(|e| {
            let message = match e {
                Error::Index { index, .. } => format!("qubit index {index} out of range for {k} qubit(s)"),
                other => other.to_string(),
            };
            Error::Parse { line, message }
        })?;
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_gates_desugar() {
        let c = parse_circuit::<f64>("H 0\n# note\nCNOT 0 1  # trailing\nCZ 1 0\n", None).unwrap();
        assert_eq!(c.n_qubits(), 2);
        assert_eq!(c.instructions()[0].instruction, Instruction::U1 { qubit: 0, u: Mat2::hadamard() });
        assert_eq!(
            c.instructions()[1].instruction,
            Instruction::CU2 { control: 0, target: 1, u: Mat2::pauli_x() }
        );
        assert_eq!(c.instructions()[2].label, "CZ 1 0");
    }

    #[test]
    fn out_of_range_reports_line() {
        let e = parse_circuit::<f64>("X 0\nH 5\n", Some(2)).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
    }

    #[test]
    fn malformed_lines() {
        for (text, line) in [("FOO 1", 1), ("H", 1), ("X 0\nCNOT 0 0", 2), ("U1 0 1 0 0 0 0 0 2 0", 1), ("H a", 1)] {
            match parse_circuit::<f64>(text, Some(2)) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn explicit_unitary() {
        let c = parse_circuit::<f64>("U1 0 0 0 1 0 1 0 0 0", None).unwrap();
        assert_eq!(c.instructions()[0].instruction.unitary(), &Mat2::pauli_x());
        assert_eq!(c.instructions()[0].label, "U1 0");
    }
}
