//! Small dense complex matrices.
//!
//! Everything in this crate is at most a few dozen rows wide, so a plain
//! row-major `Vec` with naive `O(n^3)` products is all that is needed.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)] // needed without std for the libm-backed methods
use num_traits::Float;

use crate::error::{Error, Result};

/// Double-precision complex scalar.
#[allow(non_camel_case_types)]
pub type c64 = Complex64;

/// Shorthand constructor for a complex number.
#[inline]
pub const fn cx(re: f64, im: f64) -> c64 {
    Complex64::new(re, im)
}

/// `exp(i * phase)`.
#[inline]
pub fn expi(phase: f64) -> c64 {
    cx(phase.cos(), phase.sin())
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<c64>,
}

impl CMatrix {
    /// All-zero `rows x cols` matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![c64::new(0.0, 0.0); rows * cols] }
    }

    /// Identity of size `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix entry by entry.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> c64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Wraps row-major data. Fails when the length does not match.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<c64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Diagonal matrix.
    pub fn diag(entries: &[c64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    /// `|v><v|`.
    pub fn outer(v: &[c64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// True for square matrices.
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[c64] {
        &self.data
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<c64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Plain transpose.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Multiplies every entry by `k`.
    pub fn scale(&self, k: c64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * k).collect(),
        }
    }

    /// Sum of the diagonal.
    pub fn trace(&self) -> c64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[c64]) -> Result<Vec<c64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Checked matrix product.
    pub fn try_mul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == c64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product `self (x) rhs`; the left factor is the most
    /// significant index.
    pub fn kron(&self, rhs: &CMatrix) -> CMatrix {
        CMatrix::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |i, j| {
            self[(i / rhs.rows, j / rhs.cols)] * rhs[(i % rhs.rows, j % rhs.cols)]
        })
    }

    /// `self * rho * self^dagger`.
    pub fn conjugate(&self, rho: &CMatrix) -> CMatrix {
        &(self * rho) * &self.adjoint()
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation of `self^dagger * self` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&CMatrix::identity(self.rows))
    }

    /// `U^dagger U = I` within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    /// `A = A^dagger` within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Equality up to a global phase: finds the phase from the largest
    /// entry of `other` and compares entrywise.
    pub fn approx_eq_up_to_phase(&self, other: &CMatrix, tol: f64) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        match global_phase(&self.data, &other.data) {
            Some(phase) => self.max_abs_diff(&other.scale(phase)) <= tol,
            None => self.max_abs() <= tol,
        }
    }

    /// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
    /// rotations. Eigenvalues come back in ascending order; column `k` of
    /// the returned matrix is the eigenvector for eigenvalue `k`.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, CMatrix)> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut v = CMatrix::identity(n);
        let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let g = apq.norm();
                    if g <= 1e-300 {
                        continue;
                    }
                    // Phase-rotate so the (p, q) entry is real, then apply a
                    // real Jacobi rotation in the (p, q) plane.
                    let phase = apq / g;
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let theta = (aqq - app) / (2.0 * g);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let jpp = cx(c, 0.0);
                    let jpq = cx(s, 0.0);
                    let jqp = phase.conj() * (-s);
                    let jqq = phase.conj() * c;

                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * jpp + akq * jqp;
                        a[(k, q)] = akp * jpq + akq * jqq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                    }
                    a[(p, q)] = c64::new(0.0, 0.0);
                    a[(q, p)] = c64::new(0.0, 0.0);
                    a[(p, p)] = cx(a[(p, p)].re, 0.0);
                    a[(q, q)] = cx(a[(q, q)].re, 0.0);

                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * jpp + vkq * jqp;
                        v[(k, q)] = vkp * jpq + vkq * jqq;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
        let values = order.iter().map(|&i| a[(i, i)].re).collect();
        let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
        Ok((values, vectors))
    }
}

/// Unit-modulus `c` such that `a ~= c * b`, estimated from the largest
/// entry of `b`. `None` when `b` vanishes.
pub fn global_phase(a: &[c64], b: &[c64]) -> Option<c64> {
    let (idx, big) = b.iter().enumerate().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))?;
    if big.norm() < 1e-300 {
        return None;
    }
    let ratio = a[idx] / big;
    let r = ratio.norm();
    if r < 1e-300 {
        return Some(c64::new(1.0, 0.0));
    }
    Some(ratio / r)
}

/// `<a|b>`.
pub fn inner(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Squared Euclidean norm.
pub fn norm_sqr(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Kronecker product of two vectors, left factor most significant.
pub fn kron_vec(a: &[c64], b: &[c64]) -> Vec<c64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

impl Index<(usize, usize)> for CMatrix {
    type Output = c64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &c64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut c64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    /// Panics on shape mismatch; use [`CMatrix::try_mul`] for a checked product.
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hermitian_from(entries: &[(f64, f64)], n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        let mut it = entries.iter();
        for i in 0..n {
            for j in i..n {
                let &(re, im) = it.next().unwrap();
                if i == j {
                    m[(i, i)] = cx(re, 0.0);
                } else {
                    m[(i, j)] = cx(re, im);
                    m[(j, i)] = cx(re, -im);
                }
            }
        }
        m
    }

    #[test]
    fn kron_orders_left_factor_first() {
        let x =
            CMatrix::from_rows(2, 2, vec![cx(0., 0.), cx(1., 0.), cx(1., 0.), cx(0., 0.)]).unwrap();
        let i2 = CMatrix::identity(2);
        let xi = x.kron(&i2);
        // |00> -> |10>
        assert_eq!(xi[(2, 0)], cx(1.0, 0.0));
        assert_eq!(xi[(0, 0)], cx(0.0, 0.0));
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = CMatrix::zeros(2, 3);
        let b = CMatrix::zeros(2, 3);
        assert!(a.try_mul(&b).is_err());
        assert!(a.mul_vec(&[cx(1.0, 0.0)]).is_err());
    }

    #[test]
    fn eigen_of_pauli_y() {
        let y = CMatrix::from_rows(2, 2, vec![cx(0., 0.), cx(0., -1.), cx(0., 1.), cx(0., 0.)])
            .unwrap();
        let (vals, _) = y.hermitian_eigen().unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn jacobi_reconstructs_hermitian(entries in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 10)) {
            let m = hermitian_from(&entries, 4);
            let (vals, vecs) = m.hermitian_eigen().unwrap();
            prop_assert!(vecs.is_unitary(1e-10));
            let rebuilt = &(&vecs * &CMatrix::diag(&vals.iter().map(|&v| cx(v, 0.0)).collect::<Vec<_>>())) * &vecs.adjoint();
            prop_assert!(rebuilt.max_abs_diff(&m) < 1e-10);
            prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
