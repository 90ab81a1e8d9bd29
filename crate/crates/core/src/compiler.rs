// SPDX-License-Identifier: Apache-2.0

//! Lowering of logical circuits to collective pulse programs.
//!
//! A single-qubit gate moves the CU next to the qubit and fires one
//! collective CTRL_U with the CU on the control side. A controlled gate
//! runs `P ∥ G ∥ reverse(P)`, where `P` brings the CU to the control qubit,
//! runs the copy kernel and carries the copied value to the target, and `G`
//! is the CTRL_U fired from the carrier.

use std::ops::Range;
use std::sync::OnceLock;

use crate::array::ArrayDescriptor;
use crate::circuit::{CircuitIR, Instruction};
use crate::collective::{partner, CollectiveGate, GateId, Orientation, Phase, PulseStep};
use crate::error::{Error, Result};
use crate::layout::{gaps_at, track_step, validate_layout, Layout, Occupant, Padding, Positions};
use crate::linalg::Mat2;
use crate::scalar::Real;
use crate::synthesizer::{default_kernel, Kernel};

/// Inverse sequence: reversed order, each step inverted.
pub fn reverse_steps<T: Real>(steps: &[PulseStep<T>]) -> Vec<PulseStep<T>> {
    steps.iter().rev().map(|s| s.inverse()).collect()
}

/// [`reverse_steps`], failing with the index of the first step whose
/// inverse is not in `alphabet`.
pub fn reverse_steps_within<T: Real>(
    steps: &[PulseStep<T>],
    alphabet: &[CollectiveGate<T>],
) -> Result<Vec<PulseStep<T>>> {
    for (i, s) in steps.iter().enumerate() {
        if !alphabet.contains(&s.gate.inverse()) {
            return Err(Error::NonInvertibleInAlphabet(i));
        }
    }
    Ok(reverse_steps(steps))
}

/// Step range produced for one circuit instruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub instruction: usize,
    pub label: String,
    pub steps: Range<usize>,
}

/// Steps during which a copy kernel (or its reversal) is active, and the
/// cells it may disturb.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelSpan {
    pub steps: Range<usize>,
    pub cells: Range<usize>,
    /// Cells other than the control qubit's that the kernel leaves
    /// disturbed, as of `steps.end`. They follow SWAP transport until the
    /// reversal starts at `ghosts_until`.
    pub ghosts: Vec<usize>,
    pub ghosts_until: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseProgram<T> {
    pub layout: Layout,
    pub steps: Vec<PulseStep<T>>,
    pub final_positions: Positions,
    pub annotations: Vec<Annotation>,
    pub kernel_spans: Vec<KernelSpan>,
    /// Digest of the copy kernel the program was built with.
    pub kernel_digest: Option<String>,
}

impl<T: Real> PulseProgram<T> {
    pub fn descriptor(&self) -> &ArrayDescriptor {
        self.layout.descriptor()
    }

    pub fn n_cells(&self) -> usize {
        self.layout.descriptor().n_cells()
    }

    /// Tracked positions before each step and after the last one.
    pub fn position_history(&self) -> Vec<Positions> {
        let n = self.n_cells();
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        out.push(self.layout.positions());
        for s in &self.steps {
            let next = track_step(out.last().expect("non-empty"), s, n);
            out.push(next);
        }
        out
    }

    /// Checks the structural invariants: tracking reproduces the final
    /// positions, every occupant stays on the array, and no CTRL_U step has
    /// a logical qubit on its control side. Kernel steps are exempt from
    /// the last rule; their transparency is established by verification.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.n_cells();
        let history = self.position_history();
        if history.last() != Some(&self.final_positions) {
            return Err("tracked positions do not reach the recorded final positions".into());
        }
        for (i, (pos, step)) in history.iter().zip(&self.steps).enumerate() {
            if let Some((o, c)) = pos.iter().find(|(_, &c)| c >= n) {
                return Err(format!("{o} at cell {c} outside the array before step {i}"));
            }
            if step.gate.id() != GateId::CtrlU {
                continue;
            }
            for (o, &c) in pos {
                if let (Occupant::Qubit(q), Some(p)) = (o, partner(n, c, step.phase)) {
                    if step.control_cell(c.min(p)) == Some(c) {
                        return Err(format!("qubit {q} on the control side at step {i} ({step})"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn cell_of(positions: &Positions, o: Occupant) -> std::result::Result<usize, String> {
    positions.get(&o).copied().ok_or_else(|| format!("{o} is not on the array"))
}

/// Applies a SWAP step to the tracked positions, refusing to leave any
/// occupant on an idle cell (it would fall out of step with the others).
fn swap_positions<T: Real>(
    positions: &Positions,
    step: &PulseStep<T>,
    n: usize,
) -> std::result::Result<Positions, String> {
    for (o, &c) in positions {
        if partner(n, c, step.phase).is_none() {
            return Err(format!("{o} at cell {c} has no partner during {} SWAP", step.phase));
        }
    }
    Ok(track_step(positions, step, n))
}

/// SWAP steps bringing the CU to the offset `goal` (CU cell minus qubit
/// cell) from qubit `q`. Each SWAP changes that offset by exactly two, so
/// the plan is forced once the goal is fixed.
fn transport_to<T: Real>(
    positions: &Positions,
    n: usize,
    q: Occupant,
    goal: i64,
) -> std::result::Result<(Vec<PulseStep<T>>, Positions), String> {
    let mut pos = positions.clone();
    let mut steps = Vec::new();
    loop {
        let qc = cell_of(&pos, q)? as i64;
        let d = cell_of(&pos, Occupant::Cu)? as i64 - qc;
        if d == goal {
            return Ok((steps, pos));
        }
        let q_even = qc % 2 == 0;
        let phase = if (d < goal) == q_even { Phase::Beta } else { Phase::Alpha };
        let step = PulseStep::swap(phase);
        pos = swap_positions(&pos, &step, n)?;
        steps.push(step);
    }
}

fn nearest_side(positions: &Positions, q: Occupant) -> std::result::Result<i64, String> {
    let d = cell_of(positions, Occupant::Cu)? as i64 - cell_of(positions, q)? as i64;
    Ok(if d > 0 { 1 } else { -1 })
}

/// SWAP-only steps that leave the CU and qubit `q` as the two cells of one
/// pair, on whichever side is closer. Returns the steps, the positions
/// after them, and the phase pairing the two.
pub fn transport<T: Real>(
    positions: &Positions,
    n_cells: usize,
    q: usize,
) -> Result<(Vec<PulseStep<T>>, Positions, Phase)> {
    let wrap = |detail: String| Error::MarginExceeded { instruction: 0, detail };
    let goal = nearest_side(positions, Occupant::Qubit(q)).map_err(wrap)?;
    let (steps, pos) = transport_to(positions, n_cells, Occupant::Qubit(q), goal).map_err(wrap)?;
    let left = pos[&Occupant::Cu].min(pos[&Occupant::Qubit(q)]);
    Ok((steps, pos, Phase::pairing(left)))
}

/// CTRL_U step fired from `control` onto its paired neighbour `target`.
fn fire<T: Real>(control: usize, target: usize, u: Mat2<T>) -> std::result::Result<PulseStep<T>, String> {
    let gate = CollectiveGate::ctrl_u(Orientation::toward(control, target), u).map_err(|e| e.to_string())?;
    Ok(PulseStep::new(Phase::pairing(control.min(target)), gate))
}

fn single_qubit<T: Real>(
    positions: &Positions,
    n: usize,
    q: usize,
    u: Mat2<T>,
) -> std::result::Result<(Vec<PulseStep<T>>, Positions), String> {
    let target = Occupant::Qubit(q);
    let goal = nearest_side(positions, target)?;
    let (mut steps, pos) = transport_to(positions, n, target, goal)?;
    steps.push(fire(pos[&Occupant::Cu], pos[&target], u)?);
    Ok((steps, pos))
}

/// Transport next to qubit `q` followed by one CTRL_U step with the CU as
/// control. Returns the steps and the positions afterwards (qubits keep
/// the drift the transport caused).
pub fn compile_single_qubit<T: Real>(
    positions: &Positions,
    n_cells: usize,
    q: usize,
    u: Mat2<T>,
) -> Result<(Vec<PulseStep<T>>, Positions)> {
    single_qubit(positions, n_cells, q, u).map_err(|detail| Error::MarginExceeded { instruction: 0, detail })
}

/// Output of one routine, with kernel spans relative to its first step.
struct Routine<T> {
    steps: Vec<PulseStep<T>>,
    positions: Positions,
    spans: Vec<KernelSpan>,
}

fn convert_step<T: Real>(s: &PulseStep<f64>) -> PulseStep<T> {
    s.to_text().parse().expect("canonical step text re-parses")
}

/// Compiles circuits against a verified copy kernel and its mirror image.
#[derive(Debug, Clone)]
pub struct Compiler {
    kernels: [Kernel; 2],
    padding: Padding,
}

impl Compiler {
    pub fn new(kernel: Kernel) -> Result<Self> {
        let mirrored = kernel.mirrored()?;
        let padding = kernel.spec.padding;
        Ok(Compiler { kernels: [kernel, mirrored], padding })
    }

    /// Uses the kernel shipped with the crate, verified once per process.
    pub fn with_default_kernel() -> Result<Self> {
        static DEFAULT: OnceLock<Result<Compiler>> = OnceLock::new();
        DEFAULT.get_or_init(|| Compiler::new(default_kernel()?)).clone()
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernels[0]
    }

    pub fn padding(&self) -> Padding {
        self.padding
    }

    /// `P ∥ G ∥ reverse(P)` for controlled-`u` from `q_c` onto `q_t`.
    /// Positions afterwards equal those before.
    pub fn compile_two_qubit<T: Real>(
        &self,
        positions: &Positions,
        n_cells: usize,
        q_c: usize,
        q_t: usize,
        u: Mat2<T>,
    ) -> Result<(Vec<PulseStep<T>>, Positions)> {
        self.two_qubit(positions, n_cells, q_c, q_t, u)
            .map(|r| (r.steps, r.positions))
            .map_err(|detail| Error::MarginExceeded { instruction: 0, detail })
    }

    fn two_qubit<T: Real>(
        &self,
        positions: &Positions,
        n: usize,
        q_c: usize,
        q_t: usize,
        u: Mat2<T>,
    ) -> std::result::Result<Routine<T>, String> {
        if q_c == q_t {
            return Err(format!("control and target are both qubit {q_c}"));
        }
        let qubit_cells: Vec<usize> = positions
            .iter()
            .filter_map(|(o, &c)| matches!(o, Occupant::Qubit(_)).then_some(c))
            .collect();
        let y0 = cell_of(positions, Occupant::Qubit(q_c))?;
        let idx = qubit_cells.iter().position(|&c| c == y0).expect("control qubit listed");
        let (gap_l, gap_r) = gaps_at(&qubit_cells, idx);
        let cu0 = cell_of(positions, Occupant::Cu)? as i64;
        let mut candidates: Vec<&Kernel> = self
            .kernels
            .iter()
            .filter(|k| {
                let fp = k.footprint();
                gap_l.is_none_or(|g| g >= fp.blanks_left) && gap_r.is_none_or(|g| g >= fp.blanks_right)
            })
            .collect();
        candidates.sort_by_key(|k| (cu0 - y0 as i64 - k.cu_offset() as i64).abs());
        let mut last_err = format!(
            "qubit {q_c} has {gap_l:?}/{gap_r:?} blanks, too few for the copy kernel in either orientation"
        );
        for k in candidates {
            match self.forward_part(positions, n, q_c, q_t, k) {
                Ok(mut p) => {
                    let back = reverse_steps(&p.steps);
                    let g_at = p.steps.len();
                    let cu = p.positions[&Occupant::Cu];
                    let target = p.positions[&Occupant::Qubit(q_t)];
                    p.steps.push(fire(cu, target, u)?);
                    let total = 2 * g_at + 1;
                    for s in p.spans.iter_mut() {
                        s.ghosts_until = total - s.steps.end;
                    }
                    let mirrored: Vec<KernelSpan> = p
                        .spans
                        .iter()
                        .rev()
                        .map(|s| KernelSpan {
                            steps: total - s.steps.end..total - s.steps.start,
                            cells: s.cells.clone(),
                            ghosts: Vec::new(),
                            ghosts_until: total - s.steps.end,
                        })
                        .collect();
                    p.spans.extend(mirrored);
                    p.steps.extend(back);
                    p.positions = positions.clone();
                    return Ok(p);
                }
                Err(e) => last_err = e,
            }
        }
        Err(last_err)
    }

    /// `P`: transport to the control, the copy kernel, transport of the
    /// carrier to the target.
    fn forward_part<T: Real>(
        &self,
        positions: &Positions,
        n: usize,
        q_c: usize,
        q_t: usize,
        kernel: &Kernel,
    ) -> std::result::Result<Routine<T>, String> {
        let control = Occupant::Qubit(q_c);
        let (mut steps, mut pos) = transport_to::<T>(positions, n, control, kernel.cu_offset() as i64)?;
        let y = pos[&control] as i64;
        let fp = kernel.footprint();
        let (lo, hi) = (y + fp.cu_region.0 as i64, y + fp.cu_region.1 as i64);
        if lo < 0 || hi >= n as i64 {
            return Err(format!("copy kernel at cell {y} needs cells {lo}..={hi}, array has {n}"));
        }
        for (o, &c) in &pos {
            if matches!(o, Occupant::Qubit(_)) && *o != control {
                let (sl, sr) = (c as i64 + fp.spectator.0 as i64, c as i64 + fp.spectator.1 as i64);
                if sl < 0 || sr >= n as i64 {
                    return Err(format!("spectator {o} at cell {c} too close to the array end for the copy kernel"));
                }
            }
        }
        let start = steps.len();
        let kernel_steps: Vec<PulseStep<T>> =
            kernel.steps_for_parity(y as usize % 2).iter().map(convert_step).collect();
        // Spectators come back to their cells; only the CU region changes.
        steps.extend(kernel_steps);
        pos.insert(Occupant::Cu, (y + kernel.carrier_offset() as i64) as usize);
        let ghosts: Vec<usize> = fp.remainder.iter().map(|r| (y + *r as i64) as usize).collect();
        for (i, &c) in ghosts.iter().enumerate() {
            pos.insert(Occupant::Ghost(i), c);
        }
        let spans = vec![KernelSpan {
            steps: start..steps.len(),
            cells: lo as usize..hi as usize + 1,
            ghosts,
            ghosts_until: steps.len(),
        }];
        let target = Occupant::Qubit(q_t);
        let goal = nearest_side(&pos, target)?;
        let (carry, after) = transport_to::<T>(&pos, n, target, goal)?;
        steps.extend(carry);
        Ok(Routine { steps, positions: after, spans })
    }

    /// Lowers `circuit` onto `layout`.
    pub fn compile<T: Real>(&self, circuit: &CircuitIR<T>, layout: &Layout) -> Result<PulseProgram<T>> {
        validate_layout(layout, self.padding).map_err(Error::LayoutInvalid)?;
        if circuit.n_qubits() > layout.n_qubits() {
            return Err(Error::Dimension(format!(
                "circuit uses {} qubit(s), layout holds {}",
                circuit.n_qubits(),
                layout.n_qubits()
            )));
        }
        let n = layout.descriptor().n_cells();
        let mut program = PulseProgram {
            layout: layout.clone(),
            steps: Vec::new(),
            final_positions: layout.positions(),
            annotations: Vec::new(),
            kernel_spans: Vec::new(),
            kernel_digest: None,
        };
        for (i, labeled) in circuit.instructions().iter().enumerate() {
            let pos = &program.final_positions;
            let routine = match labeled.instruction {
                Instruction::U1 { qubit, u } => single_qubit(pos, n, qubit, u)
                    .map(|(steps, positions)| Routine { steps, positions, spans: Vec::new() }),
                Instruction::CU2 { control, target, u } => self.two_qubit(pos, n, control, target, u),
            }
            .map_err(|detail| Error::MarginExceeded { instruction: i, detail })?;
            let offset = program.steps.len();
            if !routine.spans.is_empty() {
                program.kernel_digest = Some(self.kernels[0].digest());
            }
            program.kernel_spans.extend(routine.spans.into_iter().map(|s| KernelSpan {
                steps: s.steps.start + offset..s.steps.end + offset,
                cells: s.cells,
                ghosts: s.ghosts,
                ghosts_until: s.ghosts_until + offset,
            }));
            program.steps.extend(routine.steps);
            program.annotations.push(Annotation {
                instruction: i,
                label: labeled.label.clone(),
                steps: offset..program.steps.len(),
            });
            program.final_positions = routine.positions;
        }
        Ok(program)
    }
}

/// [`Compiler::compile`] with the shipped kernel.
pub fn compile<T: Real>(circuit: &CircuitIR<T>, layout: &Layout) -> Result<PulseProgram<T>> {
    Compiler::with_default_kernel()?.compile(circuit, layout)
}
