// SPDX-License-Identifier: Apache-2.0

//! Text form of pulse programs.
//!
//! ```text
//! cells=17
//! layout=0:6,1:10;cu:5
//! kernel-digest=<hex>|none
//! # instruction 0 0..1 H 0
//! # kernel 3..8 cells 5..9 ghosts [9] until 14
//! BETA CTRL_U L 7.0710678118654757e-1 0e0 ...
//! ```
//!
//! Instruction and kernel annotations ride in `#` lines; other comments
//! are ignored. Final positions are recomputed by tracking the steps.

use std::fmt::Write as _;

use crate::array::ArrayDescriptor;
use crate::compiler::{Annotation, KernelSpan, PulseProgram};
use crate::error::{Error, Result};
use crate::layout::{parse_layout, track_step};
use crate::scalar::Real;

pub fn write_program<T: Real>(program: &PulseProgram<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "cells={}", program.n_cells());
    let _ = writeln!(out, "layout={}", program.layout);
    let _ = writeln!(out, "kernel-digest={}", program.kernel_digest.as_deref().unwrap_or("none"));
    let mut annotations = program.annotations.iter().peekable();
    let mut spans = program.kernel_spans.iter().peekable();
    for (i, step) in program.steps.iter().enumerate() {
        while let Some(a) = annotations.next_if(|a| a.steps.start <= i) {
            let _ = writeln!(out, "# instruction {} {}..{} {}", a.instruction, a.steps.start, a.steps.end, a.label);
        }
        while let Some(s) = spans.next_if(|s| s.steps.start <= i) {
            let ghosts: Vec<String> = s.ghosts.iter().map(|g| g.to_string()).collect();
            let _ = writeln!(
                out,
                "# kernel {}..{} cells {}..{} ghosts [{}] until {}",
                s.steps.start,
                s.steps.end,
                s.cells.start,
                s.cells.end,
                ghosts.join(","),
                s.ghosts_until
            );
        }
        let _ = writeln!(out, "{}", step.to_text());
    }
    for a in annotations {
        let _ = writeln!(out, "# instruction {} {}..{} {}", a.instruction, a.steps.start, a.steps.end, a.label);
    }
    out
}

fn parse_range(text: &str) -> Option<std::ops::Range<usize>> {
    let (a, b) = text.split_once("..")?;
    Some(a.parse().ok()?..b.parse().ok()?)
}

pub fn read_program<T: Real>(text: &str) -> Result<PulseProgram<T>> {
    let mut cells = None;
    let mut layout_text = None;
    let mut digest = None;
    let mut steps = Vec::new();
    let mut annotations = Vec::new();
    let mut kernel_spans = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| Error::Parse { line, message };
        let body = raw.trim();
        if body.is_empty() {
            continue;
        }
        if let Some(comment) = body.strip_prefix('#') {
            let tokens: Vec<&str> = comment.split_whitespace().collect();
            match tokens.as_slice() {
                ["instruction", idx, range, label @ ..] => {
                    let instruction = idx.parse().map_err(|_| err(format!("bad instruction index '{idx}'")))?;
                    let steps = parse_range(range).ok_or_else(|| err(format!("bad range '{range}'")))?;
                    annotations.push(Annotation { instruction, label: label.join(" "), steps });
                }
                ["kernel", range, "cells", cells, "ghosts", ghosts, "until", until] => {
                    let steps = parse_range(range).ok_or_else(|| err(format!("bad range '{range}'")))?;
                    let cells = parse_range(cells).ok_or_else(|| err(format!("bad range '{cells}'")))?;
                    let ghosts = ghosts
                        .trim_start_matches('[')
                        .trim_end_matches(']')
                        .split(',')
                        .filter(|t| !t.is_empty())
                        .map(|t| t.parse::<usize>().map_err(|_| err(format!("bad ghost cell '{t}'"))))
                        .collect::<Result<Vec<_>>>()?;
                    let ghosts_until = until.parse().map_err(|_| err(format!("bad step '{until}'")))?;
                    kernel_spans.push(KernelSpan { steps, cells, ghosts, ghosts_until });
                }
                _ => {}
            }
            continue;
        }
        if let Some(v) = body.strip_prefix("cells=") {
            cells = Some(v.trim().parse::<usize>().map_err(|e| err(format!("bad cell count: {e}")))?);
        } else if let Some(v) = body.strip_prefix("layout=") {
            layout_text = Some((line, v.trim().to_string()));
        } else if let Some(v) = body.strip_prefix("kernel-digest=") {
            let v = v.trim();
            digest = (v != "none").then(|| v.to_string());
        } else {
            steps.push(body.parse().map_err(err)?);
        }
    }
    let n = cells.ok_or(Error::Parse { line: 0, message: "missing 'cells=' header".into() })?;
    let descriptor = ArrayDescriptor::new(n)?;
    let (line, text) = layout_text.ok_or(Error::Parse { line: 0, message: "missing 'layout=' header".into() })?;
    let layout = parse_layout(descriptor, &text).map_err(|message| Error::Parse { line, message })?;
    let mut final_positions = layout.positions();
    for s in &steps {
        final_positions = track_step(&final_positions, s, n);
    }
    Ok(PulseProgram { layout, steps, final_positions, annotations, kernel_spans, kernel_digest: digest })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::compiler::compile;
    use crate::layout::build_layout;

    #[test]
    fn round_trip_is_step_identical() {
        let (_, layout) = build_layout(2, 6, 3).unwrap();
        let c = parse_circuit::<f64>("T 1\nCU 0 1 0.6 0.0 0.0 0.8 0.0 0.8 0.6 0.0\nH 0", None).unwrap();
        let p = compile(&c, &layout).unwrap();
        let back: PulseProgram<f64> = read_program(&write_program(&p)).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn missing_header() {
        assert!(matches!(read_program::<f64>("ALPHA SWAP\n"), Err(Error::Parse { .. })));
        let e = read_program::<f64>("cells=5\nlayout=0:2;cu:1\nALPHA FOO\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
    }
}
