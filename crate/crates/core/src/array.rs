// SPDX-License-Identifier: Apache-2.0

//! The cell array and its dense state vector.
//!
//! Cells are indexed `0..n_cells` left to right. Even cells are species A,
//! odd cells species B. A configuration `(v_0, ..., v_{n-1})` maps to the
//! basis index `Σ v_i · 2^(n-1-i)`, so the leftmost cell is the most
//! significant bit.

use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Mat4, C};
use crate::scalar::Real;

/// Largest array the dense simulator accepts.
pub const MAX_DENSE_CELLS: usize = 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Species {
    A,
    B,
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Species::A => f.write_str("A"),
            Species::B => f.write_str("B"),
        }
    }
}

/// One-dimensional ABAB... array of two-state cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ArrayDescriptor {
    n_cells: usize,
}

impl ArrayDescriptor {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < 2 {
            return Err(Error::InvalidArraySize(n_cells));
        }
        Ok(ArrayDescriptor { n_cells })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn species(&self, cell: usize) -> Species {
        if cell.is_multiple_of(2) {
            Species::A
        } else {
            Species::B
        }
    }

    pub fn species_list(&self) -> Vec<Species> {
        (0..self.n_cells).map(|i| self.species(i)).collect()
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_cells
    }

    /// Bit mask of `cell` inside a basis index.
    #[inline]
    pub fn cell_mask(&self, cell: usize) -> usize {
        1usize << (self.n_cells - 1 - cell)
    }

    pub fn basis_index(&self, cell_values: &[u8]) -> Result<usize> {
        basis_index_checked(cell_values, self.n_cells)
    }

    /// Inverse of [`basis_index`](Self::basis_index).
    pub fn cell_values(&self, index: usize) -> Vec<u8> {
        (0..self.n_cells).map(|c| u8::from(index & self.cell_mask(c) != 0)).collect()
    }
}

pub fn make_descriptor(n_cells: usize) -> Result<ArrayDescriptor> {
    ArrayDescriptor::new(n_cells)
}

/// Basis index of a configuration, leftmost cell most significant.
pub fn basis_index(cell_values: &[u8]) -> usize {
    cell_values.iter().fold(0usize, |acc, &v| (acc << 1) | usize::from(v != 0))
}

fn basis_index_checked(cell_values: &[u8], n_cells: usize) -> Result<usize> {
    if cell_values.len() != n_cells {
        return Err(Error::Dimension(format!(
            "expected {n_cells} cell values, got {}",
            cell_values.len()
        )));
    }
    if let Some(v) = cell_values.iter().find(|&&v| v > 1) {
        return Err(Error::Dimension(format!("cell value {v} is not a bit")));
    }
    Ok(basis_index(cell_values))
}

/// Amplitudes per row of the occupancy index kept by [`QuantumState`].
const ROW_BITS: usize = 12;

/// Dense state vector over all `2^n` cell configurations.
///
/// The vector is split into rows of `2^12` consecutive amplitudes. A clear
/// per-row flag guarantees the row is all zero, and pair updates skip such
/// rows. This is exact. It pays off when states stay close to basis states,
/// as they do in program verification.
#[derive(Debug, Clone)]
pub struct QuantumState<T> {
    descriptor: ArrayDescriptor,
    amplitudes: Vec<C<T>>,
    live: Vec<bool>,
}

impl<T: PartialEq> PartialEq for QuantumState<T> {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor == other.descriptor && self.amplitudes == other.amplitudes
    }
}

impl<T: Real> QuantumState<T> {
    fn build(descriptor: ArrayDescriptor, amplitudes: Vec<C<T>>) -> Self {
        let row_len = 1usize << descriptor.n_cells().min(ROW_BITS);
        let live = amplitudes.chunks(row_len).map(|row| row.iter().any(|z| !z.is_zero())).collect();
        QuantumState { descriptor, amplitudes, live }
    }

    fn row_len(&self) -> usize {
        1usize << self.descriptor.n_cells().min(ROW_BITS)
    }

    fn refresh_row(&mut self, r: usize) {
        let len = self.row_len();
        self.live[r] = self.amplitudes[r * len..(r + 1) * len].iter().any(|z| !z.is_zero());
    }

    fn check_size(descriptor: &ArrayDescriptor) -> Result<()> {
        if descriptor.n_cells() > MAX_DENSE_CELLS {
            return Err(Error::Dimension(format!(
                "{} cells exceed the dense simulator limit of {MAX_DENSE_CELLS}",
                descriptor.n_cells()
            )));
        }
        Ok(())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(descriptor: ArrayDescriptor, index: usize) -> Result<Self> {
        Self::check_size(&descriptor)?;
        if index >= descriptor.dim() {
            return Err(Error::Dimension(format!("basis index {index} out of range")));
        }
        let mut amplitudes = vec![C::zero(); descriptor.dim()];
        amplitudes[index] = C::one();
        Ok(Self::build(descriptor, amplitudes))
    }

    pub fn zero(descriptor: ArrayDescriptor) -> Result<Self> {
        Self::basis(descriptor, 0)
    }

    pub fn from_amplitudes(descriptor: ArrayDescriptor, amplitudes: Vec<C<T>>) -> Result<Self> {
        Self::check_size(&descriptor)?;
        if amplitudes.len() != descriptor.dim() {
            return Err(Error::Dimension(format!(
                "expected {} amplitudes, got {}",
                descriptor.dim(),
                amplitudes.len()
            )));
        }
        let state = Self::build(descriptor, amplitudes);
        let dev = (state.norm_sqr() - T::one()).abs();
        if dev > T::tolerance() {
            return Err(Error::Normalization(format!("norm deviates from 1 by {dev:e}")));
        }
        Ok(state)
    }

    pub fn descriptor(&self) -> &ArrayDescriptor {
        &self.descriptor
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C<T> {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// Probability that `cell` reads 1.
    pub fn excitation(&self, cell: usize) -> T {
        let mask = self.descriptor.cell_mask(cell);
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .fold(T::zero(), |acc, (_, z)| acc + z.norm_sqr())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        if self.descriptor != other.descriptor {
            return Err(Error::Dimension(format!(
                "states over {} and {} cells",
                self.descriptor.n_cells(),
                other.descriptor.n_cells()
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(C::zero(), |acc, (a, b)| acc + a.conj() * b))
    }

    pub fn max_deviation(&self, other: &Self) -> T {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }

    /// Applies `u4` to cells `(i, j)`. Row/column order of `u4` is
    /// `|v_i v_j⟩ ∈ {00, 01, 10, 11}` with `v_i` the more significant bit.
    pub fn apply_pair_unitary(&mut self, i: usize, j: usize, u4: &Mat4<T>) -> Result<()> {
        let n = self.descriptor.n_cells();
        for idx in [i, j] {
            if idx >= n {
                return Err(Error::Index { index: idx, n_cells: n });
            }
        }
        if i == j {
            return Err(Error::Index { index: j, n_cells: n });
        }
        let err = u4.unitarity_error();
        if err > T::tolerance() {
            return Err(Error::NonUnitaryGate(err.to_f64_lossy()));
        }
        self.apply_pair_unchecked(i, j, &PairKernel::new(u4));
        Ok(())
    }

    /// Hot path shared with collective application; indices and unitarity
    /// already validated by the caller.
    pub(crate) fn apply_pair_unchecked(&mut self, i: usize, j: usize, kernel: &PairKernel<T>) {
        if kernel.is_identity() {
            return;
        }
        let bi = self.descriptor.cell_mask(i);
        let bj = self.descriptor.cell_mask(j);
        let (lo, hi) = if bi < bj { (bi, bj) } else { (bj, bi) };
        let row_len = self.row_len();
        let shift = row_len.trailing_zeros();
        let rows = self.live.len();
        if hi < row_len {
            // Both cells inside a row.
            for r in 0..rows {
                if !self.live[r] {
                    continue;
                }
                for g in 0..row_len >> 2 {
                    let base = r * row_len + insert_zero_bit(insert_zero_bit(g, lo), hi);
                    kernel.apply(&mut self.amplitudes, [base, base | bj, base | bi, base | bi | bj]);
                }
            }
        } else if lo >= row_len {
            // Both cells select rows.
            let (rlo, rhi) = (lo >> shift, hi >> shift);
            for g in 0..rows >> 2 {
                let rb = insert_zero_bit(insert_zero_bit(g, rlo), rhi);
                let group = [rb, rb | rlo, rb | rhi, rb | rlo | rhi];
                if group.iter().all(|&r| !self.live[r]) {
                    continue;
                }
                for c in 0..row_len {
                    let base = rb * row_len + c;
                    kernel.apply(&mut self.amplitudes, [base, base | bj, base | bi, base | bi | bj]);
                }
                for r in group {
                    self.refresh_row(r);
                }
            }
        } else {
            // One cell inside a row, the other selecting rows.
            let rh = hi >> shift;
            for g in 0..rows >> 1 {
                let rb = insert_zero_bit(g, rh);
                if !self.live[rb] && !self.live[rb | rh] {
                    continue;
                }
                for c in 0..row_len >> 1 {
                    let base = rb * row_len + insert_zero_bit(c, lo);
                    kernel.apply(&mut self.amplitudes, [base, base | bj, base | bi, base | bi | bj]);
                }
                self.refresh_row(rb);
                self.refresh_row(rb | rh);
            }
        }
    }
}

#[inline]
fn insert_zero_bit(x: usize, mask: usize) -> usize {
    ((x & !(mask - 1)) << 1) | (x & (mask - 1))
}

/// Nonzero structure of a 4x4 gate, with rows that act as identity dropped.
#[derive(Debug, Clone)]
pub(crate) struct PairKernel<T> {
    rows: Vec<(usize, Vec<(usize, C<T>)>)>,
}

impl<T: Real> PairKernel<T> {
    pub(crate) fn new(u4: &Mat4<T>) -> Self {
        let mut rows = Vec::new();
        for r in 0..4 {
            let entries: Vec<(usize, C<T>)> = (0..4)
                .filter(|&c| !u4.0[r][c].is_zero())
                .map(|c| (c, u4.0[r][c]))
                .collect();
            let identity_row = entries.len() == 1 && entries[0].0 == r && entries[0].1 == Complex::one();
            if !identity_row {
                rows.push((r, entries));
            }
        }
        PairKernel { rows }
    }

    fn is_identity(&self) -> bool {
        self.rows.is_empty()
    }

    /// Applies the kernel to the four amplitudes at `idx`, ordered as
    /// `|00⟩, |01⟩, |10⟩, |11⟩`.
    #[inline]
    fn apply(&self, amps: &mut [C<T>], idx: [usize; 4]) {
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        if v.iter().all(|z| z.is_zero()) {
            return;
        }
        for row in &self.rows {
            let mut acc = C::zero();
            for &(col, m) in &row.1 {
                acc = acc + m * v[col];
            }
            amps[idx[row.0]] = acc;
        }
    }
}

/// Tensor product of per-cell single-cell states.
pub fn product_state<T: Real>(
    descriptor: ArrayDescriptor,
    per_cell: &[[C<T>; 2]],
) -> Result<QuantumState<T>> {
    QuantumState::<T>::check_size(&descriptor)?;
    if per_cell.len() != descriptor.n_cells() {
        return Err(Error::Dimension(format!(
            "expected {} cell states, got {}",
            descriptor.n_cells(),
            per_cell.len()
        )));
    }
    for (cell, v) in per_cell.iter().enumerate() {
        let dev = (v[0].norm_sqr() + v[1].norm_sqr() - T::one()).abs();
        if dev > T::tolerance() {
            return Err(Error::Normalization(format!(
                "cell {cell} state deviates from unit norm by {dev:e}"
            )));
        }
    }
    let mut amplitudes = vec![C::one()];
    for v in per_cell {
        amplitudes = amplitudes.iter().flat_map(|a| [*a * v[0], *a * v[1]]).collect();
    }
    Ok(QuantumState::build(descriptor, amplitudes))
}

/// `|⟨s1|s2⟩|²`.
pub fn fidelity<T: Real>(s1: &QuantumState<T>, s2: &QuantumState<T>) -> Result<T> {
    Ok(s1.inner(s2)?.norm_sqr().min(T::one()))
}
