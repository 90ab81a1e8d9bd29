// SPDX-License-Identifier: Apache-2.0

//! Small dense complex matrices: fixed 2x2 and 4x4 gate matrices plus a
//! square matrix of runtime dimension for logical unitaries.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

pub type C<T> = Complex<T>;

#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// Fixed-size square complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat<T, const N: usize>(pub [[C<T>; N]; N]);

pub type Mat2<T> = Mat<T, 2>;
pub type Mat4<T> = Mat<T, 4>;

impl<T: Real, const N: usize> Mat<T, N> {
    pub fn zeros() -> Self {
        Mat([[C::zero(); N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = C::one();
        }
        m
    }

    pub fn from_f64(rows: [[(f64, f64); N]; N]) -> Self {
        let mut m = Self::zeros();
        for (i, row) in rows.iter().enumerate() {
            for (j, &(re, im)) in row.iter().enumerate() {
                m.0[i][j] = c(re, im);
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_deviation(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    /// Deviation of `self† · self` from the identity.
    pub fn unitarity_error(&self) -> T {
        (self.adjoint() * *self).max_deviation(&Self::identity())
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_error() <= tol
    }

    /// Entries flattened row-major as `(re, im)` pairs.
    pub fn to_f64_pairs(&self) -> Vec<(f64, f64)> {
        self.0
            .iter()
            .flat_map(|row| row.iter().map(|z| (z.re.to_f64_lossy(), z.im.to_f64_lossy())))
            .collect()
    }
}

impl<T: Real, const N: usize> Mul for Mat<T, N> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] = m.0[i][j] + a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl<T: Real> Mat2<T> {
    pub fn hadamard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_f64([[(s, 0.0), (s, 0.0)], [(s, 0.0), (-s, 0.0)]])
    }

    pub fn pauli_x() -> Self {
        Self::from_f64([[(0.0, 0.0), (1.0, 0.0)], [(1.0, 0.0), (0.0, 0.0)]])
    }

    pub fn pauli_y() -> Self {
        Self::from_f64([[(0.0, 0.0), (0.0, -1.0)], [(0.0, 1.0), (0.0, 0.0)]])
    }

    pub fn pauli_z() -> Self {
        Self::from_f64([[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (-1.0, 0.0)]])
    }

    pub fn phase_s() -> Self {
        Self::from_f64([[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (0.0, 1.0)]])
    }

    pub fn phase_t() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_f64([[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (s, s)]])
    }

    /// Kronecker product `self ⊗ rhs`; `self` acts on the more significant bit.
    pub fn kron(&self, rhs: &Self) -> Mat4<T> {
        let mut m = Mat4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m.0[2 * i + k][2 * j + l] = self.0[i][j] * rhs.0[k][l];
                    }
                }
            }
        }
        m
    }
}

/// Square complex matrix of runtime dimension, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        CMatrix { dim, data: vec![C::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn from_fixed<const N: usize>(m: &Mat<T, N>) -> Self {
        let mut out = Self::zeros(N);
        for i in 0..N {
            for j in 0..N {
                out[(i, j)] = m.0[i][j];
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        let d = self.dim * rhs.dim;
        let mut m = Self::zeros(d);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.dim {
                    for l in 0..rhs.dim {
                        m[(i * rhs.dim + k, j * rhs.dim + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        m
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        let d = self.dim;
        let mut m = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    m.data[i * d + j] = m.data[i * d + j] + a * rhs.data[k * d + j];
                }
            }
        }
        m
    }

    pub fn apply(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                (0..self.dim).fold(C::zero(), |acc, j| acc + self.data[i * self.dim + j] * v[j])
            })
            .collect()
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).fold(C::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn max_deviation(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }

    pub fn unitarity_error(&self) -> T {
        self.adjoint().matmul(self).max_deviation(&Self::identity(self.dim))
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[C<T>]) {
        for (i, z) in col.iter().enumerate() {
            self[(i, j)] = *z;
        }
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;

    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.dim + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_gates_are_unitary() {
        for g in [
            Mat2::<f64>::hadamard(),
            Mat2::pauli_x(),
            Mat2::pauli_y(),
            Mat2::pauli_z(),
            Mat2::phase_s(),
            Mat2::phase_t(),
        ] {
            assert!(g.is_unitary(1e-12));
        }
    }

    #[test]
    fn t_squared_is_s() {
        let t = Mat2::<f64>::phase_t();
        assert!((t * t).max_deviation(&Mat2::phase_s()) < 1e-15);
    }

    #[test]
    fn fixed_and_dynamic_kron_agree() {
        let a = Mat2::<f64>::hadamard();
        let b = Mat2::<f64>::pauli_y();
        let fixed = CMatrix::from_fixed(&a.kron(&b));
        let dynamic = CMatrix::from_fixed(&a).kron(&CMatrix::from_fixed(&b));
        assert!(fixed.max_deviation(&dynamic) < 1e-15);
    }
}
