// SPDX-License-Identifier: Apache-2.0

//! Placement of logical qubits and the control unit (CU) on the array, the
//! working-room rule between qubits, and occupancy tracking through steps.

use std::collections::BTreeMap;
use std::fmt;

use crate::array::ArrayDescriptor;
use crate::collective::{partner, PulseStep};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Blank cells a qubit needs towards its nearest neighbouring qubit: at
/// least `far` on one side and at least `near` on the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Padding {
    pub near: usize,
    pub far: usize,
}

impl Default for Padding {
    fn default() -> Self {
        Padding { near: 3, far: 5 }
    }
}

impl Padding {
    /// True if `(left, right)` blank counts satisfy the rule on some side.
    pub fn admits(&self, left: usize, right: usize) -> bool {
        (left >= self.far && right >= self.near) || (left >= self.near && right >= self.far)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    descriptor: ArrayDescriptor,
    qubit_cells: Vec<usize>,
    cu_cell: usize,
}

impl Layout {
    /// Layout from explicit cells; checked only by [`validate_layout`].
    pub fn new(descriptor: ArrayDescriptor, qubit_cells: Vec<usize>, cu_cell: usize) -> Self {
        Layout { descriptor, qubit_cells, cu_cell }
    }

    pub fn descriptor(&self) -> &ArrayDescriptor {
        &self.descriptor
    }

    pub fn n_qubits(&self) -> usize {
        self.qubit_cells.len()
    }

    pub fn qubit_cells(&self) -> &[usize] {
        &self.qubit_cells
    }

    pub fn qubit_cell(&self, q: usize) -> usize {
        self.qubit_cells[q]
    }

    pub fn cu_cell(&self) -> usize {
        self.cu_cell
    }

    /// Blank cells between the array start and the leftmost occupant.
    pub fn left_margin(&self) -> usize {
        self.occupied().min().unwrap_or(0)
    }

    /// Blank cells between the rightmost occupant and the array end.
    pub fn right_margin(&self) -> usize {
        let last = self.occupied().max().unwrap_or(0);
        self.descriptor.n_cells().saturating_sub(last + 1)
    }

    fn occupied(&self) -> impl Iterator<Item = usize> + '_ {
        self.qubit_cells.iter().copied().chain(std::iter::once(self.cu_cell))
    }

    pub fn positions(&self) -> Positions {
        let mut p: Positions =
            self.qubit_cells.iter().enumerate().map(|(q, &c)| (Occupant::Qubit(q), c)).collect();
        p.insert(Occupant::Cu, self.cu_cell);
        p
    }

    /// Blank cells between qubit `q` and the nearest other qubit on each
    /// side; `None` when no qubit lies on that side.
    pub fn gaps(&self, q: usize) -> (Option<usize>, Option<usize>) {
        gaps_at(&self.qubit_cells, q)
    }
}

pub(crate) fn gaps_at(cells: &[usize], q: usize) -> (Option<usize>, Option<usize>) {
    let c = cells[q];
    let left = cells.iter().filter(|&&o| o < c).max().map(|&o| c - o - 1);
    let right = cells.iter().filter(|&&o| o > c).min().map(|&o| o - c - 1);
    (left, right)
}

impl fmt::Display for Layout {
    /// `<qubit:cell,...;cu:cell>`, e.g. `0:6,1:10;cu:5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs: Vec<String> =
            self.qubit_cells.iter().enumerate().map(|(q, c)| format!("{q}:{c}")).collect();
        write!(f, "{};cu:{}", qs.join(","), self.cu_cell)
    }
}

/// Parses the [`Display`](Layout) form against a known array.
pub fn parse_layout(descriptor: ArrayDescriptor, text: &str) -> Result<Layout, String> {
    let (qubits, cu) = text.split_once(';').ok_or("layout needs ';cu:<cell>'")?;
    let cu_cell = cu
        .strip_prefix("cu:")
        .ok_or("missing 'cu:' entry")?
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("bad CU cell: {e}"))?;
    let mut qubit_cells = Vec::new();
    for (expected, entry) in qubits.split(',').filter(|s| !s.trim().is_empty()).enumerate() {
        let (q, c) = entry.split_once(':').ok_or_else(|| format!("bad entry '{entry}'"))?;
        let q: usize = q.trim().parse().map_err(|e| format!("bad qubit index: {e}"))?;
        if q != expected {
            return Err(format!("qubit {q} listed out of order"));
        }
        qubit_cells.push(c.trim().parse().map_err(|e| format!("bad cell: {e}"))?);
    }
    Ok(Layout::new(descriptor, qubit_cells, cu_cell))
}

/// Places `k` qubits on even cells with alternating `first_gap` / other
/// blank gaps (3 and 5), `margin` blanks at each end, and the CU on the odd
/// cell immediately left of the middle qubit `(k - 1) / 2`.
pub fn build_layout(k: usize, margin: usize, first_gap: usize) -> Result<(ArrayDescriptor, Layout)> {
    if k == 0 {
        return Err(Error::LayoutInvalid(vec![Violation::Empty]));
    }
    if !margin.is_multiple_of(2) {
        return Err(Error::Parity(format!("margin {margin} is odd; qubits must sit on even cells")));
    }
    let second_gap = match first_gap {
        3 => 5,
        5 => 3,
        other => {
            return Err(Error::LayoutInvalid(vec![Violation::Gap(other)]));
        }
    };
    let mut cells = Vec::with_capacity(k);
    let mut cell = margin;
    for q in 0..k {
        cells.push(cell);
        cell += 1 + if q % 2 == 0 { first_gap } else { second_gap };
    }
    let last = *cells.last().expect("k >= 1");
    let home = cells[(k - 1) / 2];
    if home == 0 {
        return Err(Error::MarginExceeded {
            instruction: 0,
            detail: "no cell left of the middle qubit for the CU".into(),
        });
    }
    let descriptor = ArrayDescriptor::new(last + 1 + margin)?;
    Ok((descriptor, Layout::new(descriptor, cells, home - 1)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Empty,
    Gap(usize),
    OutOfRange { cell: usize },
    Collision { cell: usize },
    QubitParity { qubit: usize, cell: usize },
    CuParity { cell: usize },
    Padding { qubit: usize, left: Option<usize>, right: Option<usize>, required: Padding },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &Option<usize>| s.map_or("none".to_string(), |b| b.to_string());
        match self {
            Violation::Empty => write!(f, "layout holds no qubits"),
            Violation::Gap(g) => write!(f, "first gap must be 3 or 5, got {g}"),
            Violation::OutOfRange { cell } => write!(f, "cell {cell} outside the array"),
            Violation::Collision { cell } => write!(f, "cell {cell} occupied twice"),
            Violation::QubitParity { qubit, cell } => {
                write!(f, "ParityViolation: qubit {qubit} on odd cell {cell}")
            }
            Violation::CuParity { cell } => write!(f, "ParityViolation: CU on even cell {cell}"),
            Violation::Padding { qubit, left, right, required } => write!(
                f,
                "PaddingViolation: qubit {qubit} has {} blank(s) left and {} right, needs {} and {}",
                side(left),
                side(right),
                required.far,
                required.near
            ),
        }
    }
}

/// Every parity, collision and working-room violation in `layout`.
pub fn validate_layout(layout: &Layout, padding: Padding) -> Result<(), Vec<Violation>> {
    let n = layout.descriptor.n_cells();
    let mut out = Vec::new();
    if layout.qubit_cells.is_empty() {
        out.push(Violation::Empty);
    }
    let mut seen = std::collections::BTreeSet::new();
    for cell in layout.occupied() {
        if cell >= n {
            out.push(Violation::OutOfRange { cell });
        } else if !seen.insert(cell) {
            out.push(Violation::Collision { cell });
        }
    }
    for (q, &cell) in layout.qubit_cells.iter().enumerate() {
        if cell % 2 != 0 {
            out.push(Violation::QubitParity { qubit: q, cell });
        }
    }
    if layout.cu_cell % 2 != 1 {
        out.push(Violation::CuParity { cell: layout.cu_cell });
    }
    for q in 0..layout.qubit_cells.len() {
        let (left, right) = layout.gaps(q);
        let l = left.unwrap_or(usize::MAX);
        let r = right.unwrap_or(usize::MAX);
        if !padding.admits(l, r) {
            out.push(Violation::Padding { qubit: q, left, right, required: padding });
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Anything whose cell is tracked through SWAP transport.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Occupant {
    Qubit(usize),
    Cu,
    /// A cell left disturbed by the copy kernel until it is uncomputed.
    Ghost(usize),
}

impl fmt::Display for Occupant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Occupant::Qubit(q) => write!(f, "q{q}"),
            Occupant::Cu => f.write_str("CU"),
            Occupant::Ghost(g) => write!(f, "ghost{g}"),
        }
    }
}

pub type Positions = BTreeMap<Occupant, usize>;

/// Occupant positions after `step`. A SWAP moves every paired occupant to
/// its partner cell; occupants on idle cells and every non-SWAP step leave
/// positions unchanged.
pub fn track_step<T: Real>(positions: &Positions, step: &PulseStep<T>, n_cells: usize) -> Positions {
    if !step.is_swap() {
        return positions.clone();
    }
    positions
        .iter()
        .map(|(&o, &c)| (o, partner(n_cells, c, step.phase).unwrap_or(c)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collective::{CollectiveGate, GateId, Orientation, Phase};

    #[test]
    fn single_qubit_layout() {
        let (d, l) = build_layout(1, 6, 3).unwrap();
        assert_eq!(d.n_cells(), 13);
        assert_eq!(l.qubit_cells(), &[6]);
        assert_eq!(l.cu_cell(), 5);
        assert_eq!((l.left_margin(), l.right_margin()), (5, 6));
    }

    #[test]
    fn three_qubit_gap_pattern() {
        let (d, l) = build_layout(3, 6, 3).unwrap();
        assert_eq!(l.qubit_cells(), &[6, 10, 16]);
        assert_eq!(d.n_cells(), 23);
        assert_eq!(l.cu_cell(), 9);
        let (_, l5) = build_layout(3, 6, 5).unwrap();
        assert_eq!(l5.qubit_cells(), &[6, 12, 16]);
    }

    #[test]
    fn build_errors() {
        assert!(matches!(build_layout(2, 3, 3), Err(Error::Parity(_))));
        assert!(matches!(build_layout(2, 6, 4), Err(Error::LayoutInvalid(_))));
        assert!(matches!(build_layout(0, 6, 3), Err(Error::LayoutInvalid(_))));
    }

    #[test]
    fn built_layouts_validate() {
        for k in 1..8 {
            for gap in [3, 5] {
                let (_, l) = build_layout(k, 6, gap).unwrap();
                assert_eq!(validate_layout(&l, Padding::default()), Ok(()), "k={k} gap={gap}");
            }
        }
    }

    #[test]
    fn two_blank_gap_is_padding_violation_on_both() {
        let d = ArrayDescriptor::new(20).unwrap();
        // Two blanks (11, 12); the odd cell also trips the parity check.
        let l = Layout::new(d, vec![10, 13], 5);
        let errs = validate_layout(&l, Padding::default()).unwrap_err();
        let padded: Vec<usize> = errs
            .iter()
            .filter_map(|v| match v {
                Violation::Padding { qubit, .. } => Some(*qubit),
                _ => None,
            })
            .collect();
        assert_eq!(padded, vec![0, 1]);
    }

    #[test]
    fn cu_on_even_cell_is_parity_violation() {
        let (d, l) = build_layout(2, 6, 3).unwrap();
        let bad = Layout::new(d, l.qubit_cells().to_vec(), 4);
        let errs = validate_layout(&bad, Padding::default()).unwrap_err();
        assert_eq!(errs, vec![Violation::CuParity { cell: 4 }]);
    }

    #[test]
    fn layout_text_round_trip() {
        let (d, l) = build_layout(3, 6, 3).unwrap();
        assert_eq!(l.to_string(), "0:6,1:10,2:16;cu:9");
        assert_eq!(parse_layout(d, &l.to_string()).unwrap(), l);
        assert!(parse_layout(d, "0:6").is_err());
    }

    #[test]
    fn swap_tracking_examples() {
        let mut p = Positions::new();
        p.insert(Occupant::Qubit(0), 8);
        p.insert(Occupant::Cu, 9);
        let alpha: PulseStep<f64> = PulseStep::swap(Phase::Alpha);
        let beta: PulseStep<f64> = PulseStep::swap(Phase::Beta);
        let after = track_step(&p, &alpha, 20);
        // The qubit and the CU share the pair (8, 9) and pass through each other.
        assert_eq!(after[&Occupant::Qubit(0)], 9);
        assert_eq!(after[&Occupant::Cu], 8);
        let cnot: PulseStep<f64> = PulseStep::new(
            Phase::Beta,
            CollectiveGate::controlled(GateId::Cnot, Orientation::CtrlRight).unwrap(),
        );
        assert_eq!(track_step(&p, &cnot, 20), p);
        let two = track_step(&track_step(&p, &alpha, 20), &beta, 20);
        assert_eq!(two[&Occupant::Qubit(0)], 10);
        assert_eq!(two[&Occupant::Cu], 7);
        let back = track_step(&track_step(&p, &beta, 20), &alpha, 20);
        assert_eq!(back[&Occupant::Qubit(0)], 6);
        assert_eq!(back[&Occupant::Cu], 11);
    }

    #[test]
    fn idle_cells_stay() {
        let mut p = Positions::new();
        p.insert(Occupant::Qubit(0), 0);
        let beta: PulseStep<f64> = PulseStep::swap(Phase::Beta);
        assert_eq!(track_step(&p, &beta, 6)[&Occupant::Qubit(0)], 0);
    }
}
