// SPDX-License-Identifier: Apache-2.0

//! Interaction phases, the collective gate alphabet, and application of one
//! global pulse step to every pair of the active phase.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::array::{ArrayDescriptor, PairKernel, QuantumState};
use crate::error::{Error, Result};
use crate::linalg::{Mat2, Mat4};
use crate::scalar::Real;

/// Which set of nearest-neighbour couplings is switched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    /// Only the A→B couplings: pairs `(0,1), (2,3), ...`.
    Alpha,
    /// Only the B→A couplings: pairs `(1,2), (3,4), ...`.
    Beta,
}

impl Phase {
    pub const ALL: [Phase; 2] = [Phase::Alpha, Phase::Beta];

    pub fn other(self) -> Phase {
        match self {
            Phase::Alpha => Phase::Beta,
            Phase::Beta => Phase::Alpha,
        }
    }

    /// Phase in which `left` and `left + 1` form a pair.
    pub fn pairing(left: usize) -> Phase {
        if left.is_multiple_of(2) {
            Phase::Alpha
        } else {
            Phase::Beta
        }
    }

    /// Offset of the first paired cell.
    fn start(self) -> usize {
        match self {
            Phase::Alpha => 0,
            Phase::Beta => 1,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Alpha => "ALPHA",
            Phase::Beta => "BETA",
        })
    }
}

impl FromStr for Phase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ALPHA" => Ok(Phase::Alpha),
            "BETA" => Ok(Phase::Beta),
            other => Err(format!("unknown phase '{other}'")),
        }
    }
}

/// Disjoint pairs `(left, left + 1)` coupled in `phase`. Cells not covered
/// are idle for that step.
pub fn phase_pairs(descriptor: &ArrayDescriptor, phase: Phase) -> Vec<(usize, usize)> {
    let n = descriptor.n_cells();
    (phase.start()..n.saturating_sub(1)).step_by(2).map(|l| (l, l + 1)).collect()
}

/// True if `cell` has no partner in `phase`.
pub fn is_idle(n_cells: usize, cell: usize, phase: Phase) -> bool {
    partner(n_cells, cell, phase).is_none()
}

/// Partner of `cell` in `phase`, if any.
pub fn partner(n_cells: usize, cell: usize, phase: Phase) -> Option<usize> {
    let s = phase.start();
    if cell < s || cell >= n_cells {
        None
    } else if (cell - s).is_multiple_of(2) {
        (cell + 1 < n_cells).then_some(cell + 1)
    } else {
        Some(cell - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateId {
    Swap,
    Cnot,
    CtrlH,
    CtrlY,
    Nand,
    CtrlU,
}

impl GateId {
    pub const ALL: [GateId; 6] =
        [GateId::Swap, GateId::Cnot, GateId::CtrlH, GateId::CtrlY, GateId::Nand, GateId::CtrlU];

    pub fn is_controlled(self) -> bool {
        !matches!(self, GateId::Swap | GateId::Nand)
    }
}

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateId::Swap => "SWAP",
            GateId::Cnot => "CNOT",
            GateId::CtrlH => "CTRL_H",
            GateId::CtrlY => "CTRL_Y",
            GateId::Nand => "NAND",
            GateId::CtrlU => "CTRL_U",
        })
    }
}

impl FromStr for GateId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        GateId::ALL
            .into_iter()
            .find(|g| g.to_string() == s)
            .ok_or_else(|| format!("unknown gate id '{s}'"))
    }
}

/// Which cell of each pair controls a controlled gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    CtrlLeft,
    CtrlRight,
    Symmetric,
}

impl Orientation {
    pub fn flipped(self) -> Orientation {
        match self {
            Orientation::CtrlLeft => Orientation::CtrlRight,
            Orientation::CtrlRight => Orientation::CtrlLeft,
            Orientation::Symmetric => Orientation::Symmetric,
        }
    }

    /// Orientation whose control side is `control` in the pair with `target`.
    pub fn toward(control: usize, target: usize) -> Orientation {
        if control < target {
            Orientation::CtrlLeft
        } else {
            Orientation::CtrlRight
        }
    }

    fn tag(self) -> Option<&'static str> {
        match self {
            Orientation::CtrlLeft => Some("L"),
            Orientation::CtrlRight => Some("R"),
            Orientation::Symmetric => None,
        }
    }
}

/// One two-cell unitary, applied identically to every pair of a phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveGate<T> {
    id: GateId,
    orientation: Orientation,
    param: Option<Mat2<T>>,
}

impl<T: Real> CollectiveGate<T> {
    pub fn new(id: GateId, orientation: Orientation, param: Option<Mat2<T>>) -> Result<Self> {
        let symmetric = orientation == Orientation::Symmetric;
        if id.is_controlled() == symmetric {
            return Err(Error::MalformedGate(format!("{id} cannot have orientation {orientation:?}")));
        }
        match (id, &param) {
            (GateId::CtrlU, None) => return Err(Error::MissingParameter),
            (GateId::CtrlU, Some(u)) => {
                let err = u.unitarity_error();
                if err > T::tolerance() {
                    return Err(Error::NonUnitaryGate(err.to_f64_lossy()));
                }
            }
            (_, Some(_)) => {
                return Err(Error::MalformedGate(format!("{id} takes no parameter")));
            }
            (_, None) => {}
        }
        Ok(CollectiveGate { id, orientation, param })
    }

    pub fn swap() -> Self {
        CollectiveGate { id: GateId::Swap, orientation: Orientation::Symmetric, param: None }
    }

    pub fn nand() -> Self {
        CollectiveGate { id: GateId::Nand, orientation: Orientation::Symmetric, param: None }
    }

    /// A parameter-free controlled gate (`CNOT`, `CTRL_H`, `CTRL_Y`).
    pub fn controlled(id: GateId, orientation: Orientation) -> Result<Self> {
        Self::new(id, orientation, None)
    }

    pub fn ctrl_u(orientation: Orientation, u: Mat2<T>) -> Result<Self> {
        Self::new(GateId::CtrlU, orientation, Some(u))
    }

    pub fn id(&self) -> GateId {
        self.id
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn param(&self) -> Option<&Mat2<T>> {
        self.param.as_ref()
    }

    /// Operator applied to the target cell when the control reads 1.
    fn target_operator(&self) -> Option<Mat2<T>> {
        match self.id {
            GateId::Cnot => Some(Mat2::pauli_x()),
            GateId::CtrlH => Some(Mat2::hadamard()),
            GateId::CtrlY => Some(Mat2::pauli_y()),
            GateId::CtrlU => self.param,
            GateId::Swap | GateId::Nand => None,
        }
    }

    /// The gate with control and target sides exchanged.
    pub fn flipped(&self) -> Self {
        CollectiveGate { orientation: self.orientation.flipped(), ..*self }
    }

    pub fn inverse(&self) -> Self {
        match self.id {
            GateId::CtrlU => CollectiveGate { param: self.param.map(|u| u.adjoint()), ..*self },
            _ => *self,
        }
    }

    /// True when the gate is its own inverse.
    pub fn is_involution(&self) -> bool {
        match self.param {
            Some(u) => (u * u).max_deviation(&Mat2::identity()) <= T::tolerance(),
            None => true,
        }
    }

    /// Canonical text form: `<GATEID> [L|R] [8 floats]`.
    pub fn to_text(&self) -> String {
        let mut out = self.id.to_string();
        if let Some(tag) = self.orientation.tag() {
            out.push(' ');
            out.push_str(tag);
        }
        if let Some(u) = &self.param {
            for (re, im) in u.to_f64_pairs() {
                out.push_str(&format!(" {re:.16e} {im:.16e}"));
            }
        }
        out
    }

    /// Parses the tokens produced by [`to_text`](Self::to_text).
    pub fn parse_tokens(tokens: &[&str]) -> Result<Self, String> {
        let (&id_tok, rest) = tokens.split_first().ok_or("missing gate id")?;
        let id: GateId = id_tok.parse()?;
        if !id.is_controlled() {
            if !rest.is_empty() {
                return Err(format!("{id} takes no operands"));
            }
            return Self::new(id, Orientation::Symmetric, None).map_err(|e| e.to_string());
        }
        let (&o, rest) = rest.split_first().ok_or("missing control orientation L|R")?;
        let orientation = match o {
            "L" => Orientation::CtrlLeft,
            "R" => Orientation::CtrlRight,
            other => return Err(format!("bad orientation '{other}'")),
        };
        let param = if id == GateId::CtrlU {
            Some(parse_mat2(rest)?)
        } else if !rest.is_empty() {
            return Err(format!("{id} takes no parameters"));
        } else {
            None
        };
        Self::new(id, orientation, param).map_err(|e| e.to_string())
    }
}

/// Parses `re00 im00 re01 im01 re10 im10 re11 im11`.
pub fn parse_mat2<T: Real>(tokens: &[&str]) -> Result<Mat2<T>, String> {
    if tokens.len() != 8 {
        return Err(format!("expected 8 matrix entries, got {}", tokens.len()));
    }
    let vals = tokens
        .iter()
        .map(|t| t.parse::<T>().map_err(|_| format!("bad number '{t}'")))
        .collect::<Result<Vec<T>, String>>()?;
    let mut m = Mat2::zeros();
    for k in 0..4 {
        m.0[k / 2][k % 2] = num_complex::Complex::new(vals[2 * k], vals[2 * k + 1]);
    }
    Ok(m)
}

/// 4x4 matrix over `|left right⟩ ∈ {00, 01, 10, 11}`.
pub fn gate_matrix<T: Real>(gate: &CollectiveGate<T>) -> Mat4<T> {
    match gate.id {
        GateId::Swap => {
            let mut m = Mat4::zeros();
            m.0[0][0] = One::one();
            m.0[1][2] = One::one();
            m.0[2][1] = One::one();
            m.0[3][3] = One::one();
            m
        }
        GateId::Nand => {
            let mut m = Mat4::identity();
            m.0[3][3] = -m.0[3][3];
            m
        }
        _ => {
            let v = gate.target_operator().expect("controlled gate carries an operator");
            let mut m = Mat4::zeros();
            match gate.orientation {
                Orientation::CtrlLeft => {
                    m.0[0][0] = One::one();
                    m.0[1][1] = One::one();
                    for r in 0..2 {
                        for c in 0..2 {
                            m.0[2 + r][2 + c] = v.0[r][c];
                        }
                    }
                }
                _ => {
                    // Control on the right (less significant) cell.
                    m.0[0][0] = One::one();
                    m.0[2][2] = One::one();
                    for r in 0..2 {
                        for c in 0..2 {
                            m.0[2 * r + 1][2 * c + 1] = v.0[r][c];
                        }
                    }
                }
            }
            for row in m.0.iter_mut() {
                for z in row.iter_mut() {
                    if z.norm() == T::zero() {
                        *z = Zero::zero();
                    }
                }
            }
            m
        }
    }
}

/// One global operation: a phase plus the gate every active pair receives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseStep<T> {
    pub phase: Phase,
    pub gate: CollectiveGate<T>,
}

impl<T: Real> PulseStep<T> {
    pub fn new(phase: Phase, gate: CollectiveGate<T>) -> Self {
        PulseStep { phase, gate }
    }

    pub fn swap(phase: Phase) -> Self {
        PulseStep::new(phase, CollectiveGate::swap())
    }

    pub fn is_swap(&self) -> bool {
        self.gate.id == GateId::Swap
    }

    pub fn inverse(&self) -> Self {
        PulseStep { phase: self.phase, gate: self.gate.inverse() }
    }

    /// Same step seen from an array shifted by one cell (phases exchanged).
    pub fn phase_swapped(&self) -> Self {
        PulseStep { phase: self.phase.other(), gate: self.gate }
    }

    /// Same step seen in a left-right mirrored array.
    pub fn mirrored(&self) -> Self {
        PulseStep { phase: self.phase.other(), gate: self.gate.flipped() }
    }

    /// Cell holding the control in the pair starting at `left`.
    pub fn control_cell(&self, left: usize) -> Option<usize> {
        match self.gate.orientation {
            Orientation::CtrlLeft => Some(left),
            Orientation::CtrlRight => Some(left + 1),
            Orientation::Symmetric => None,
        }
    }

    pub fn to_text(&self) -> String {
        format!("{} {}", self.phase, self.gate.to_text())
    }
}

impl<T: Real> fmt::Display for PulseStep<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl<T: Real> FromStr for PulseStep<T> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        let (&phase, rest) = tokens.split_first().ok_or("empty step")?;
        Ok(PulseStep { phase: phase.parse()?, gate: CollectiveGate::parse_tokens(rest)? })
    }
}

/// A step checked once and ready to apply to many states of one array.
#[derive(Debug, Clone)]
pub struct PreparedStep<T> {
    descriptor: ArrayDescriptor,
    kernel: PairKernel<T>,
    pairs: Vec<(usize, usize)>,
}

impl<T: Real> PreparedStep<T> {
    pub fn new(descriptor: ArrayDescriptor, step: &PulseStep<T>) -> Result<Self> {
        let m = gate_matrix(&step.gate);
        let err = m.unitarity_error();
        if err > T::tolerance() {
            return Err(Error::NonUnitaryGate(err.to_f64_lossy()));
        }
        Ok(PreparedStep { descriptor, kernel: PairKernel::new(&m), pairs: phase_pairs(&descriptor, step.phase) })
    }

    pub fn apply(&self, state: &mut QuantumState<T>) -> Result<()> {
        if *state.descriptor() != self.descriptor {
            return Err(Error::Dimension(format!(
                "step prepared for {} cells, state has {}",
                self.descriptor.n_cells(),
                state.descriptor().n_cells()
            )));
        }
        for &(l, r) in &self.pairs {
            state.apply_pair_unchecked(l, r, &self.kernel);
        }
        Ok(())
    }
}

/// Applies `step` to every pair of its phase.
pub fn apply_collective<T: Real>(state: &mut QuantumState<T>, step: &PulseStep<T>) -> Result<()> {
    PreparedStep::new(*state.descriptor(), step)?.apply(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{basis_index, make_descriptor};
    use crate::linalg::C;

    fn alphabet() -> Vec<CollectiveGate<f64>> {
        let mut v = vec![CollectiveGate::swap(), CollectiveGate::nand()];
        for id in [GateId::Cnot, GateId::CtrlH, GateId::CtrlY] {
            for o in [Orientation::CtrlLeft, Orientation::CtrlRight] {
                v.push(CollectiveGate::controlled(id, o).unwrap());
            }
        }
        v
    }

    #[test]
    fn pairs_per_phase() {
        let d = make_descriptor(6).unwrap();
        assert_eq!(phase_pairs(&d, Phase::Alpha), vec![(0, 1), (2, 3), (4, 5)]);
        assert_eq!(phase_pairs(&d, Phase::Beta), vec![(1, 2), (3, 4)]);
        assert!(phase_pairs(&make_descriptor(2).unwrap(), Phase::Beta).is_empty());
        assert!(is_idle(6, 0, Phase::Beta));
        assert!(is_idle(6, 5, Phase::Beta));
        assert!(!is_idle(6, 5, Phase::Alpha));
        assert!(is_idle(5, 4, Phase::Alpha));
        assert_eq!(partner(6, 3, Phase::Beta), Some(4));
        assert_eq!(partner(6, 3, Phase::Alpha), Some(2));
        assert_eq!(partner(6, 0, Phase::Beta), None);
    }

    #[test]
    fn nand_matrix() {
        let m = gate_matrix(&CollectiveGate::<f64>::nand());
        let mut expected = Mat4::identity();
        expected.0[3][3] = C::new(-1.0, 0.0);
        assert_eq!(m, expected);
    }

    #[test]
    fn cnot_left_truth_table() {
        let m = gate_matrix(&CollectiveGate::<f64>::controlled(GateId::Cnot, Orientation::CtrlLeft).unwrap());
        assert_eq!(m.0[3][2], C::new(1.0, 0.0));
        assert_eq!(m.0[2][3], C::new(1.0, 0.0));
        let m = gate_matrix(&CollectiveGate::<f64>::controlled(GateId::Cnot, Orientation::CtrlRight).unwrap());
        // |01⟩ -> |11⟩
        assert_eq!(m.0[3][1], C::new(1.0, 0.0));
    }

    #[test]
    fn ctrl_u_identity_is_identity() {
        let g = CollectiveGate::<f64>::ctrl_u(Orientation::CtrlLeft, Mat2::identity()).unwrap();
        assert_eq!(gate_matrix(&g), Mat4::identity());
    }

    #[test]
    fn malformed_gates() {
        assert_eq!(CollectiveGate::<f64>::new(GateId::CtrlU, Orientation::CtrlLeft, None), Err(Error::MissingParameter));
        let mut bad = Mat2::<f64>::identity();
        bad.0[0][1] = C::new(1.0, 0.0);
        assert!(matches!(
            CollectiveGate::ctrl_u(Orientation::CtrlLeft, bad),
            Err(Error::NonUnitaryGate(_))
        ));
        assert!(CollectiveGate::<f64>::new(GateId::Swap, Orientation::CtrlLeft, None).is_err());
        assert!(CollectiveGate::<f64>::new(GateId::Cnot, Orientation::Symmetric, None).is_err());
    }

    #[test]
    fn alphabet_gates_are_unitary_involutions() {
        for g in alphabet() {
            let m = gate_matrix(&g);
            assert!(m.is_unitary(1e-12), "{g:?}");
            assert!((m * m).max_deviation(&Mat4::identity()) <= 1e-12, "{g:?}");
            assert!(g.is_involution());
        }
        let t = CollectiveGate::<f64>::ctrl_u(Orientation::CtrlLeft, Mat2::phase_t()).unwrap();
        assert!(!t.is_involution());
        let x = CollectiveGate::<f64>::ctrl_u(Orientation::CtrlLeft, Mat2::pauli_x()).unwrap();
        assert!(x.is_involution());
    }

    #[test]
    fn alpha_swap_on_basis_configuration() {
        let d = make_descriptor(4).unwrap();
        let mut s = QuantumState::<f64>::basis(d, basis_index(&[0, 1, 0, 0])).unwrap();
        apply_collective(&mut s, &PulseStep::swap(Phase::Alpha)).unwrap();
        assert_eq!(s.amplitude(basis_index(&[1, 0, 0, 0])), C::new(1.0, 0.0));
    }

    #[test]
    fn step_text_round_trip() {
        for text in ["ALPHA SWAP", "BETA CNOT L", "ALPHA CTRL_H R", "BETA NAND", "ALPHA CTRL_Y L"] {
            let step: PulseStep<f64> = text.parse().unwrap();
            assert_eq!(step.to_text(), text);
        }
        let u = Mat2::<f64>::phase_t() * Mat2::hadamard();
        let step = PulseStep::new(Phase::Beta, CollectiveGate::ctrl_u(Orientation::CtrlRight, u).unwrap());
        let back: PulseStep<f64> = step.to_text().parse().unwrap();
        assert_eq!(back, step);
        assert!("GAMMA SWAP".parse::<PulseStep<f64>>().is_err());
        assert!("ALPHA SWAP L".parse::<PulseStep<f64>>().is_err());
        assert!("ALPHA CTRL_U L 1 0".parse::<PulseStep<f64>>().is_err());
    }
}
