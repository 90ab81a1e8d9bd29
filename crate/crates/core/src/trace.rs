// SPDX-License-Identifier: Apache-2.0

//! Occupancy trace of a pulse program: one row per step boundary, built
//! from tracked positions only.

use std::fmt;

use crate::compiler::PulseProgram;
use crate::layout::{track_step, Occupant};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    /// Number of steps applied before this row.
    pub step: usize,
    /// Per-cell symbol, leftmost cell first.
    pub cells: Vec<String>,
    /// The step applied next, if any.
    pub annotation: Option<String>,
}

impl fmt::Display for TraceRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:>5} |", self.step)?;
        for c in &self.cells {
            write!(f, " {c:<3}")?;
        }
        if let Some(a) = &self.annotation {
            write!(f, "| {a}")?;
        }
        Ok(())
    }
}

fn step_label<T: Real>(program: &PulseProgram<T>, i: usize) -> String {
    let step = &program.steps[i];
    let mut text = step.phase.to_string();
    text.push(' ');
    text.push_str(&step.gate.id().to_string());
    if let Some(tag) = step.to_text().split_whitespace().nth(2).filter(|t| *t == "L" || *t == "R") {
        text.push(' ');
        text.push_str(tag);
    }
    if let Some(a) = program.annotations.iter().find(|a| a.steps.end == i + 1) {
        text.push_str(&format!("  [{}]", a.label));
    }
    text
}

/// Rows for every step boundary. Cells inside a running kernel, and cells
/// the kernel left disturbed, show `?`.
pub fn trace_rows<T: Real>(program: &PulseProgram<T>) -> Vec<TraceRow> {
    let n = program.n_cells();
    let mut disturbed = vec![Vec::new(); program.steps.len() + 1];
    for span in &program.kernel_spans {
        let mut cells = span.ghosts.clone();
        let until = span.ghosts_until.min(program.steps.len());
        for (i, slot) in disturbed.iter_mut().enumerate().take(until + 1).skip(span.steps.end) {
            slot.extend(cells.iter().copied());
            if let Some(step) = program.steps.get(i) {
                let tracked = track_step(&cells.iter().enumerate().map(|(g, &c)| (Occupant::Ghost(g), c)).collect(), step, n);
                cells = tracked.into_values().collect();
            }
        }
    }
    program
        .position_history()
        .iter()
        .enumerate()
        .map(|(i, pos)| {
            let mut cells = vec![".".to_string(); n];
            for (o, &c) in pos {
                if c < n {
                    cells[c] = match o {
                        Occupant::Qubit(q) => format!("q{q}"),
                        Occupant::Cu => "C".into(),
                        Occupant::Ghost(_) => "?".into(),
                    };
                }
            }
            for &c in disturbed[i].iter().filter(|&&c| c < n) {
                cells[c] = "?".into();
            }
            for span in program.kernel_spans.iter().filter(|s| s.steps.start < i && i < s.steps.end) {
                for c in span.cells.clone().filter(|&c| c < n) {
                    cells[c] = "?".into();
                }
            }
            TraceRow { step: i, cells, annotation: (i < program.steps.len()).then(|| step_label(program, i)) }
        })
        .collect()
}
