// SPDX-License-Identifier: Apache-2.0

//! Search and verification of the copy kernel: a short collective step
//! sequence that moves the value of a qubit `Y` onto the CU's cell (the
//! carrier) while acting as the exact identity on CU-free regions.
//!
//! Kernel candidates are judged on a small set of probe inputs simulated on
//! an unbounded line with sparse amplitudes:
//!
//! * the CU region with `Y = 0` and `Y = 1` (CU = 1, all else blank);
//! * a lone spectator qubit in state 1 (all odd cells blank).
//!
//! Everything a kernel does to a layout follows from its action on these
//! probes by linearity, translation by two cells, and the product structure
//! of regions whose disturbed cells stay two or more cells apart.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::array::{ArrayDescriptor, QuantumState};
use crate::collective::{gate_matrix, PreparedStep, CollectiveGate, GateId, Orientation, Phase, PulseStep};
use crate::compiler::reverse_steps_within;
use crate::error::{Error, Result};
use crate::layout::Padding;

pub type Step = PulseStep<f64>;
pub type Gate = CollectiveGate<f64>;

/// Bit offset of window cell 0 inside a probe key. Even, so bit parity and
/// cell parity agree.
const OFFSET: i32 = 16;
/// Largest window the sparse probes can hold with full guard room.
pub const MAX_WINDOW: usize = 32;
const AMP_EPS: f64 = 1e-14;
const TOL: f64 = 1e-12;

/// Gates named for the copy routine: SWAP, CNOT, CTRL_H, CTRL_Y, NAND.
pub fn default_alphabet() -> Vec<Gate> {
    let mut v = vec![CollectiveGate::swap()];
    for id in [GateId::Cnot, GateId::CtrlH, GateId::CtrlY] {
        for o in [Orientation::CtrlLeft, Orientation::CtrlRight] {
            v.push(CollectiveGate::controlled(id, o).expect("parameter-free controlled gate"));
        }
    }
    v.push(CollectiveGate::nand());
    v
}

/// Expands gate ids (`SWAP,CNOT,...`) into both orientations where relevant.
pub fn alphabet_from_ids(ids: &[GateId]) -> Result<Vec<Gate>> {
    let mut v = Vec::new();
    for &id in ids {
        match id {
            GateId::CtrlU => return Err(Error::MissingParameter),
            GateId::Swap => v.push(CollectiveGate::swap()),
            GateId::Nand => v.push(CollectiveGate::nand()),
            _ => {
                for o in [Orientation::CtrlLeft, Orientation::CtrlRight] {
                    v.push(CollectiveGate::controlled(id, o)?);
                }
            }
        }
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub window_size: usize,
    /// Even window cell holding the control qubit `Y`.
    pub y_cell: usize,
    /// Odd window cell next to `y_cell` holding the CU.
    pub cu_cell: usize,
    /// Odd window cell that must hold `Y`'s value afterwards.
    pub carrier_cell: usize,
    pub max_len: usize,
    pub alphabet: Vec<Gate>,
    pub padding: Padding,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec {
            window_size: 10,
            y_cell: 4,
            cu_cell: 5,
            carrier_cell: 5,
            max_len: 12,
            alphabet: default_alphabet(),
            padding: Padding::default(),
        }
    }
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::MalformedGate(m));
        if self.window_size < 3 || self.window_size > MAX_WINDOW {
            return bad(format!("window size {} outside 3..={MAX_WINDOW}", self.window_size));
        }
        if !self.y_cell.is_multiple_of(2) || self.cu_cell % 2 != 1 || self.carrier_cell % 2 != 1 {
            return Err(Error::Parity(format!(
                "need even Y cell and odd CU/carrier cells, got y={} cu={} carrier={}",
                self.y_cell, self.cu_cell, self.carrier_cell
            )));
        }
        if self.y_cell.abs_diff(self.cu_cell) != 1 {
            return bad(format!("CU cell {} is not adjacent to Y cell {}", self.cu_cell, self.y_cell));
        }
        for c in [self.y_cell, self.cu_cell, self.carrier_cell] {
            if c >= self.window_size {
                return Err(Error::Index { index: c, n_cells: self.window_size });
            }
        }
        if self.alphabet.iter().any(|g| g.id() == GateId::CtrlU && g.param().is_none()) {
            return Err(Error::MissingParameter);
        }
        Ok(())
    }

    /// The same geometry reflected left to right.
    pub fn mirrored(&self) -> KernelSpec {
        let w = self.window_size + (self.window_size + 1) % 2;
        let m = |c: usize| w - 1 - c;
        KernelSpec {
            window_size: w,
            y_cell: m(self.y_cell),
            cu_cell: m(self.cu_cell),
            carrier_cell: m(self.carrier_cell),
            max_len: self.max_len,
            alphabet: self.alphabet.iter().map(|g| g.flipped()).collect(),
            padding: self.padding,
        }
    }

    /// All `(phase, gate)` moves in search order.
    pub fn moves(&self) -> Vec<Step> {
        let mut out = Vec::new();
        for phase in Phase::ALL {
            for g in &self.alphabet {
                let step = PulseStep::new(phase, *g);
                if !out.contains(&step) {
                    out.push(step);
                }
            }
        }
        out
    }

    fn cu_offset(&self) -> i32 {
        self.cu_cell as i32 - self.y_cell as i32
    }
}

/// Sparse amplitudes keyed by probe bit patterns.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Probe {
    amps: Vec<(u64, Complex64)>,
}

#[inline]
fn bit(cell: i32) -> u64 {
    1u64 << (cell + OFFSET)
}

fn cells_of(bits: u64) -> impl Iterator<Item = i32> {
    (0..64).filter(move |b| bits & (1u64 << b) != 0).map(|b| b - OFFSET)
}

/// Column structure of one collective gate, for sparse application.
struct SparseGate {
    phase_start: i32,
    /// `columns[c]` lists `(row, amplitude)` for input pair value `c`.
    columns: [Vec<(u8, Complex64)>; 4],
}

impl SparseGate {
    fn new(step: &Step) -> Self {
        let m = gate_matrix(&step.gate);
        let columns = std::array::from_fn(|c| {
            (0..4u8).filter(|&r| m.0[r as usize][c].norm() > 0.0).map(|r| (r, m.0[r as usize][c])).collect()
        });
        SparseGate { phase_start: if step.phase == Phase::Alpha { 0 } else { 1 }, columns }
    }
}

impl Probe {
    fn basis(cells: &[i32]) -> Self {
        Probe { amps: vec![(cells.iter().fold(0, |acc, &c| acc | bit(c)), Complex64::new(1.0, 0.0))] }
    }

    fn support(&self) -> u64 {
        self.amps.iter().fold(0, |acc, (k, _)| acc | k)
    }

    fn apply(&self, gate: &SparseGate) -> Probe {
        let mut out: HashMap<u64, Complex64> = HashMap::with_capacity(self.amps.len() * 2);
        for &(key, amp) in &self.amps {
            // Every alphabet gate fixes |00⟩ with amplitude one, so only
            // pairs holding an excitation need expanding.
            let mut lefts = BTreeSet::new();
            for c in cells_of(key) {
                let left = if (c - gate.phase_start).rem_euclid(2) == 0 { c } else { c - 1 };
                lefts.insert(left);
            }
            let mut branches = vec![(key, amp)];
            for &l in &lefts {
                let (bl, br) = (bit(l), bit(l + 1));
                let mut next = Vec::with_capacity(branches.len() * 2);
                for (k, a) in branches {
                    let col = (usize::from(k & bl != 0) << 1) | usize::from(k & br != 0);
                    let cleared = k & !(bl | br);
                    for &(row, m) in &gate.columns[col] {
                        let mut nk = cleared;
                        if row & 2 != 0 {
                            nk |= bl;
                        }
                        if row & 1 != 0 {
                            nk |= br;
                        }
                        next.push((nk, a * m));
                    }
                }
                branches = next;
            }
            for (k, a) in branches {
                *out.entry(k).or_default() += a;
            }
        }
        let mut amps: Vec<(u64, Complex64)> = out.into_iter().filter(|(_, a)| a.norm() > AMP_EPS).collect();
        amps.sort_by_key(|(k, _)| *k);
        Probe { amps }
    }

    fn quantized(&self) -> Vec<(u64, i64, i64)> {
        let q = |x: f64| {
            let v = (x * 1e8).round() as i64;
            if v == 0 {
                0
            } else {
                v
            }
        };
        self.amps.iter().map(|(k, a)| (*k, q(a.re), q(a.im))).collect()
    }

    fn render(&self) -> String {
        let terms: Vec<String> = self
            .amps
            .iter()
            .map(|(k, a)| {
                let cells: Vec<String> = cells_of(*k).map(|c| c.to_string()).collect();
                format!("({:.3}{:+.3}i)|{{{}}}⟩", a.re, a.im, cells.join(","))
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// Probe set evolved together during search.
#[derive(Debug, Clone)]
struct Probes {
    cu: [Probe; 2],
    spectator: Probe,
    cu_support: u64,
    spectator_support: u64,
}

impl Probes {
    fn initial(spec: &KernelSpec) -> Self {
        let y = spec.y_cell as i32;
        let cu = spec.cu_cell as i32;
        let p0 = Probe::basis(&[cu]);
        let p1 = Probe::basis(&[y, cu]);
        let s = Probe::basis(&[y]);
        let cu_support = p0.support() | p1.support();
        let spectator_support = s.support();
        Probes { cu: [p0, p1], spectator: s, cu_support, spectator_support }
    }

    fn step(&self, gate: &SparseGate) -> Self {
        let cu = [self.cu[0].apply(gate), self.cu[1].apply(gate)];
        let spectator = self.spectator.apply(gate);
        Probes {
            cu_support: self.cu_support | cu[0].support() | cu[1].support(),
            spectator_support: self.spectator_support | spectator.support(),
            cu,
            spectator,
        }
    }

    fn key(&self) -> ProbeKey {
        ProbeKey {
            cu0: self.cu[0].quantized(),
            cu1: self.cu[1].quantized(),
            spectator: self.spectator.quantized(),
            supports: (self.cu_support, self.spectator_support),
        }
    }
}

/// Quantized probe action plus the footprint so far; two step sequences
/// with equal keys are interchangeable for every later decision.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProbeKey {
    cu0: Vec<(u64, i64, i64)>,
    cu1: Vec<(u64, i64, i64)>,
    spectator: Vec<(u64, i64, i64)>,
    supports: (u64, u64),
}

fn window_mask(w: usize) -> u64 {
    ((1u64 << w) - 1) << OFFSET
}

/// Extent of a set of cells relative to `origin`.
fn extent(bits: u64, origin: i32) -> (i32, i32) {
    let cells: Vec<i32> = cells_of(bits).collect();
    (cells.iter().min().copied().unwrap_or(origin) - origin, cells.iter().max().copied().unwrap_or(origin) - origin)
}

fn even_up(d: i32) -> i32 {
    d + d.rem_euclid(2)
}

/// Working room a kernel needs, measured from the probes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Footprint {
    /// Cells ever excited in the CU region, relative to `Y`.
    pub cu_region: (i32, i32),
    /// Cells ever excited around a lone spectator, relative to it.
    pub spectator: (i32, i32),
    /// Blank cells needed between `Y` and its left / right neighbour.
    pub blanks_left: usize,
    pub blanks_right: usize,
    /// Blank cells needed between two spectators.
    pub blanks_between_spectators: usize,
    /// Qubit-parity cells other than `Y` that may hold an excitation after
    /// the kernel, relative to `Y`.
    pub remainder: Vec<i32>,
}

impl Footprint {
    fn measure(spec: &KernelSpec, probes: &Probes) -> Self {
        let y = spec.y_cell as i32;
        let cu_region = extent(probes.cu_support, y);
        let spectator = extent(probes.spectator_support, y);
        // Neighbouring regions must stay at least two cells apart so no
        // pair ever straddles them.
        let d_left = even_up(spectator.1 - cu_region.0 + 2);
        let d_right = even_up(cu_region.1 - spectator.0 + 2);
        let d_spec = even_up(spectator.1 - spectator.0 + 2);
        let carrier = spec.carrier_cell as i32;
        let mut remainder = BTreeSet::new();
        for p in &probes.cu {
            for c in cells_of(p.support()) {
                if c != y && c != carrier {
                    remainder.insert(c - y);
                }
            }
        }
        Footprint {
            cu_region,
            spectator,
            blanks_left: (d_left - 1) as usize,
            blanks_right: (d_right - 1) as usize,
            blanks_between_spectators: (d_spec - 1) as usize,
            remainder: remainder.into_iter().collect(),
        }
    }

    pub fn fits(&self, padding: &Padding) -> bool {
        self.blanks_between_spectators <= padding.near
            && ((self.blanks_left <= padding.near && self.blanks_right <= padding.far)
                || (self.blanks_left <= padding.far && self.blanks_right <= padding.near))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub passed: bool,
    pub witness: Option<String>,
}

impl Check {
    fn pass() -> Self {
        Check { passed: true, witness: None }
    }

    fn fail(witness: impl Into<String>) -> Self {
        Check { passed: false, witness: Some(witness.into()) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    /// The carrier ends holding `Y`'s value and is the only CU-parity
    /// excitation left.
    pub copy: Check,
    /// Identity, phases included, on every CU-free single-qubit window.
    pub spectator: Check,
    /// Every step inverts within the alphabet and the sequence followed by
    /// its reversal is the identity window unitary.
    pub reversibility: Check,
    /// The disturbed cells fit the window and the padding allowance.
    pub footprint_check: Check,
    pub footprint: Footprint,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.copy.passed && self.spectator.passed && self.reversibility.passed && self.footprint_check.passed
    }

    pub fn checks(&self) -> [(&'static str, &Check); 4] {
        [
            ("R1 copy", &self.copy),
            ("R2 spectator transparency", &self.spectator),
            ("R3 reversibility", &self.reversibility),
            ("R4 footprint", &self.footprint_check),
        ]
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, check) in self.checks() {
            write!(f, "{name}: {}", if check.passed { "pass" } else { "FAIL" })?;
            if let Some(w) = &check.witness {
                write!(f, " ({w})")?;
            }
            writeln!(f)?;
        }
        let fp = &self.footprint;
        write!(
            f,
            "footprint: CU region {:?}, spectator {:?}, blanks left {} right {}",
            fp.cu_region, fp.spectator, fp.blanks_left, fp.blanks_right
        )
    }
}

fn run_probes(spec: &KernelSpec, seq: &[Step]) -> Probes {
    seq.iter().fold(Probes::initial(spec), |p, s| p.step(&SparseGate::new(s)))
}

fn check_copy(spec: &KernelSpec, probes: &Probes) -> Check {
    let carrier = bit(spec.carrier_cell as i32);
    let parity = (spec.carrier_cell % 2) as i32;
    let other_cu_parity: u64 = (-OFFSET..64 - OFFSET)
        .filter(|c| c.rem_euclid(2) == parity && *c != spec.carrier_cell as i32)
        .fold(0, |acc, c| acc | bit(c));
    for (y, probe) in probes.cu.iter().enumerate() {
        let norm: f64 = probe.amps.iter().map(|(_, a)| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > TOL {
            return Check::fail(format!("Y={y}: probe norm {norm}"));
        }
        for (k, a) in &probe.amps {
            if (k & carrier != 0) != (y == 1) {
                return Check::fail(format!(
                    "Y={y}: carrier cell {} not deterministic; amplitude {:.3} on {}",
                    spec.carrier_cell,
                    a.norm(),
                    probe.render()
                ));
            }
            if k & other_cu_parity != 0 {
                return Check::fail(format!("Y={y}: stray CU-parity excitation in {}", probe.render()));
            }
        }
    }
    Check::pass()
}

fn spectator_identity(start: i32, seq: &[Step]) -> std::result::Result<(), String> {
    let mut probe = Probe::basis(&[start]);
    for s in seq {
        probe = probe.apply(&SparseGate::new(s));
        if cells_of(probe.support()).any(|c| !(-OFFSET + 2..=62 - OFFSET).contains(&c)) {
            return Err(format!("spectator at {start} escaped the probe range"));
        }
    }
    let ok = probe.amps.len() == 1
        && probe.amps[0].0 == bit(start)
        && (probe.amps[0].1 - Complex64::new(1.0, 0.0)).norm() <= TOL;
    if ok {
        Ok(())
    } else {
        Err(format!("spectator at cell {start} became {}", probe.render()))
    }
}

fn check_spectators(spec: &KernelSpec, seq: &[Step]) -> Check {
    for e in (0..spec.window_size as i32).filter(|c| c % 2 == spec.y_cell as i32 % 2) {
        if let Err(w) = spectator_identity(e, seq) {
            return Check::fail(w);
        }
    }
    Check::pass()
}

/// Each reversed step must undo its forward step exactly; the product then
/// telescopes to the identity. A dense run on one generic window state
/// cross-checks the composition end to end.
fn check_reversibility(spec: &KernelSpec, seq: &[Step]) -> Check {
    let back = match reverse_steps_within(seq, &spec.alphabet) {
        Ok(b) => b,
        Err(e) => return Check::fail(e.to_string()),
    };
    for (i, (f, b)) in seq.iter().zip(back.iter().rev()).enumerate() {
        let dev = (gate_matrix(&b.gate) * gate_matrix(&f.gate)).max_deviation(&crate::linalg::Mat4::identity());
        if f.phase != b.phase || dev > TOL {
            return Check::fail(format!("reverse of step {i} ({f}) is {b}, off by {dev:e}"));
        }
    }
    let descriptor = match ArrayDescriptor::new(spec.window_size) {
        Ok(d) => d,
        Err(e) => return Check::fail(e.to_string()),
    };
    let amps: Vec<Complex64> = (0..descriptor.dim())
        .map(|i| Complex64::from_polar(1.0 + (i % 7) as f64, i as f64 * 0.618))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let start = QuantumState::from_amplitudes(descriptor, amps.iter().map(|a| a / norm).collect())
        .expect("normalized window state");
    let mut state = start.clone();
    for s in seq.iter().chain(&back) {
        if let Err(e) = PreparedStep::new(descriptor, s).and_then(|p| p.apply(&mut state)) {
            return Check::fail(e.to_string());
        }
    }
    let dev = state.max_deviation(&start);
    if dev > TOL {
        return Check::fail(format!("sequence followed by its reverse deviates by {dev:e}"));
    }
    Check::pass()
}

fn check_footprint(spec: &KernelSpec, probes: &Probes, fp: &Footprint) -> Check {
    let mask = window_mask(spec.window_size);
    if probes.cu_support & !mask != 0 || probes.spectator_support & !mask != 0 {
        return Check::fail(format!("disturbance leaves the {}-cell window", spec.window_size));
    }
    if !fp.fits(&spec.padding) {
        return Check::fail(format!(
            "needs {} blank(s) left and {} right (spectator spacing {}), allowance is {}/{}",
            fp.blanks_left, fp.blanks_right, fp.blanks_between_spectators, spec.padding.near, spec.padding.far
        ));
    }
    Check::pass()
}

/// Judges `seq` against the copy, transparency, reversibility and
/// footprint requirements.
pub fn verify_kernel(seq: &[Step], spec: &KernelSpec) -> VerificationReport {
    let probes = run_probes(spec, seq);
    let footprint = Footprint::measure(spec, &probes);
    let in_alphabet = seq.iter().enumerate().find(|(_, s)| !spec.alphabet.contains(&s.gate));
    let reversibility = match in_alphabet {
        Some((i, s)) => Check::fail(format!("step {i} ({s}) is not in the alphabet")),
        None => check_reversibility(spec, seq),
    };
    VerificationReport {
        copy: check_copy(spec, &probes),
        spectator: check_spectators(spec, seq),
        reversibility,
        footprint_check: check_footprint(spec, &probes, &footprint),
        footprint,
    }
}

/// Cheap necessary condition checked before the full predicate.
fn promising(spec: &KernelSpec, probes: &Probes) -> bool {
    let y = bit(spec.y_cell as i32);
    let s = &probes.spectator.amps;
    s.len() == 1 && s[0].0 == y && (s[0].1 - Complex64::new(1.0, 0.0)).norm() <= TOL && check_copy(spec, probes).passed
}

struct Search<'a> {
    spec: &'a KernelSpec,
    moves: Vec<(Step, SparseGate)>,
    mask: u64,
    seen: HashMap<ProbeKey, usize>,
    path: Vec<Step>,
    prune: bool,
    visited: u64,
}

impl<'a> Search<'a> {
    fn new(spec: &'a KernelSpec, prune: bool) -> Self {
        let moves = spec.moves().into_iter().map(|s| (s, SparseGate::new(&s))).collect();
        Search {
            spec,
            moves,
            mask: window_mask(spec.window_size),
            seen: HashMap::new(),
            path: Vec::new(),
            prune,
            visited: 0,
        }
    }

    fn confined(&self, p: &Probes) -> bool {
        (p.cu_support | p.spectator_support) & !self.mask == 0
    }

    /// Depth-first search to `limit`; returns the first verified kernel.
    fn dfs(&mut self, probes: &Probes, limit: usize) -> Option<Vec<Step>> {
        self.visited += 1;
        let depth = self.path.len();
        let key = probes.key();
        if self.prune {
            if let Some(&d) = self.seen.get(&key) {
                if d <= depth {
                    return None;
                }
            }
        }
        self.seen.insert(key, depth);
        if promising(self.spec, probes) && verify_kernel(&self.path, self.spec).passed() {
            return Some(self.path.clone());
        }
        if depth == limit {
            return None;
        }
        for i in 0..self.moves.len() {
            let next = probes.step(&self.moves[i].1);
            if !self.confined(&next) {
                continue;
            }
            self.path.push(self.moves[i].0);
            let found = self.dfs(&next, limit);
            self.path.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub steps: Vec<Step>,
    pub report: VerificationReport,
    pub nodes_visited: u64,
}

/// Iterative-deepening search over alphabet sequences up to `spec.max_len`.
/// Sequences whose probe action was already reached at an equal or smaller
/// depth are pruned. Moves are tried in [`KernelSpec::moves`] order, so the
/// result is deterministic.
pub fn synthesize(spec: &KernelSpec) -> Result<SynthesisResult> {
    spec.validate()?;
    let root = Probes::initial(spec);
    let mut search = Search::new(spec, true);
    for limit in 0..=spec.max_len {
        search.seen.clear();
        if let Some(steps) = search.dfs(&root, limit) {
            let report = verify_kernel(&steps, spec);
            return Ok(SynthesisResult { steps, report, nodes_visited: search.visited });
        }
    }
    Err(Error::NotFound { max_len: spec.max_len })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Enumeration {
    /// Every sequence, no memo.
    Exhaustive,
    /// The search's memoized traversal.
    Pruned,
}

/// Number of distinct probe actions reachable with at most `depth` steps.
pub fn count_distinct_actions(spec: &KernelSpec, depth: usize, how: Enumeration) -> usize {
    let mut search = Search::new(spec, how == Enumeration::Pruned);
    let mut keys = std::collections::HashSet::new();
    fn walk(s: &mut Search<'_>, p: &Probes, depth: usize, keys: &mut std::collections::HashSet<ProbeKey>) {
        let key = p.key();
        if s.prune {
            if let Some(&d) = s.seen.get(&key) {
                if d <= s.path.len() {
                    return;
                }
            }
            s.seen.insert(key.clone(), s.path.len());
        }
        keys.insert(key);
        if s.path.len() == depth {
            return;
        }
        for i in 0..s.moves.len() {
            let next = p.step(&s.moves[i].1);
            if !s.confined(&next) {
                continue;
            }
            s.path.push(s.moves[i].0);
            walk(s, &next, depth, keys);
            s.path.pop();
        }
    }
    let root = Probes::initial(spec);
    walk(&mut search, &root, depth, &mut keys);
    keys.len()
}

/// A verified copy kernel together with its geometry relative to `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    pub spec: KernelSpec,
    pub steps: Vec<Step>,
    pub report: VerificationReport,
}

impl Kernel {
    /// Verifies `steps` against `spec`.
    pub fn new(spec: KernelSpec, steps: Vec<Step>) -> Result<Self> {
        spec.validate()?;
        let report = verify_kernel(&steps, &spec);
        if !report.passed() {
            return Err(Error::KernelUnavailable(format!("verification failed:\n{report}")));
        }
        Ok(Kernel { spec, steps, report })
    }

    /// CU cell relative to `Y` (+1 or -1).
    pub fn cu_offset(&self) -> i32 {
        self.spec.cu_offset()
    }

    /// Carrier cell relative to `Y`.
    pub fn carrier_offset(&self) -> i32 {
        self.spec.carrier_cell as i32 - self.spec.y_cell as i32
    }

    pub fn footprint(&self) -> &Footprint {
        &self.report.footprint
    }

    /// The left-right reflection, re-verified.
    pub fn mirrored(&self) -> Result<Self> {
        Kernel::new(self.spec.mirrored(), self.steps.iter().map(|s| s.mirrored()).collect())
    }

    /// Steps for a `Y` that currently sits on a cell of parity `parity`.
    pub fn steps_for_parity(&self, parity: usize) -> Vec<Step> {
        if parity % 2 == self.spec.y_cell % 2 {
            self.steps.clone()
        } else {
            self.steps.iter().map(|s| s.phase_swapped()).collect()
        }
    }

    pub fn digest(&self) -> String {
        steps_digest(&self.steps)
    }

    /// Line-based file form: one header line, then one step per line.
    pub fn to_file_string(&self) -> String {
        let s = &self.spec;
        let ids: Vec<String> = alphabet_ids(&s.alphabet).iter().map(|g| g.to_string()).collect();
        let mut out = String::from("# copy kernel\n");
        out.push_str(&format!(
            "kernel window={} y={} cu={} carrier={} max-len={} padding={}/{} alphabet={} digest={}\n",
            s.window_size,
            s.y_cell,
            s.cu_cell,
            s.carrier_cell,
            s.max_len,
            s.padding.near,
            s.padding.far,
            ids.join(","),
            self.digest()
        ));
        for step in &self.steps {
            out.push_str(&step.to_text());
            out.push('\n');
        }
        out
    }
}

fn alphabet_ids(alphabet: &[Gate]) -> Vec<GateId> {
    let mut ids: Vec<GateId> = Vec::new();
    for g in alphabet {
        if !ids.contains(&g.id()) {
            ids.push(g.id());
        }
    }
    ids
}

/// SHA-256 over the canonical step lines, hex encoded.
pub fn steps_digest(steps: &[Step]) -> String {
    let mut h = Sha256::new();
    for s in steps {
        h.update(s.to_text().as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

/// Parses and re-verifies a kernel file.
pub fn parse_kernel(text: &str) -> Result<Kernel> {
    let unavailable = |m: String| Error::KernelUnavailable(m);
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or_else(|| unavailable("empty kernel file".into()))?;
    let fields = header
        .strip_prefix("kernel ")
        .ok_or_else(|| unavailable(format!("expected 'kernel' header, got '{header}'")))?;
    let mut spec = KernelSpec::default();
    let mut digest = None;
    for field in fields.split_whitespace() {
        let (k, v) = field.split_once('=').ok_or_else(|| unavailable(format!("bad header field '{field}'")))?;
        let num = || v.parse::<usize>().map_err(|e| unavailable(format!("{k}: {e}")));
        match k {
            "window" => spec.window_size = num()?,
            "y" => spec.y_cell = num()?,
            "cu" => spec.cu_cell = num()?,
            "carrier" => spec.carrier_cell = num()?,
            "max-len" => spec.max_len = num()?,
            "padding" => {
                let (n, f) = v.split_once('/').ok_or_else(|| unavailable("padding must be near/far".into()))?;
                spec.padding = Padding {
                    near: n.parse().map_err(|e| unavailable(format!("padding: {e}")))?,
                    far: f.parse().map_err(|e| unavailable(format!("padding: {e}")))?,
                };
            }
            "alphabet" => {
                let ids = v
                    .split(',')
                    .map(|t| t.parse::<GateId>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(unavailable)?;
                spec.alphabet = alphabet_from_ids(&ids)?;
            }
            "digest" => digest = Some(v.to_string()),
            other => return Err(unavailable(format!("unknown header field '{other}'"))),
        }
    }
    let mut steps = Vec::new();
    for (line, text) in lines {
        steps.push(text.parse::<Step>().map_err(|e| unavailable(format!("line {line}: {e}")))?);
    }
    let actual = steps_digest(&steps);
    match digest {
        Some(d) if d == actual => {}
        Some(d) => return Err(unavailable(format!("digest mismatch: header {d}, steps {actual}"))),
        None => return Err(unavailable("missing digest".into())),
    }
    Kernel::new(spec, steps).map_err(|e| match e {
        Error::KernelUnavailable(m) => Error::KernelUnavailable(m),
        other => unavailable(other.to_string()),
    })
}

pub fn load_kernel(path: &std::path::Path) -> Result<Kernel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::KernelUnavailable(format!("{}: {e}", path.display())))?;
    parse_kernel(&text)
}

const DEFAULT_KERNEL: &str = include_str!("../data/copy_kernel.txt");

/// The synthesized kernel shipped with the crate, verified on load.
pub fn default_kernel() -> Result<Kernel> {
    parse_kernel(DEFAULT_KERNEL)
}
