//! Dense complex matrices.
//!
//! A deliberately small row-major matrix type: just what the spin operators,
//! rotation matrices, and the Monte-Carlo oracle need. Dimensions stay at
//! oracle scale (a few hundred at most), so no blocking or external linear
//! algebra is warranted.

use num_complex::Complex64;
use std::ops::{Index, IndexMut};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::from_fn(rows, cols, |r, c| Complex64::new(f(r, c), 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for r in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..self.cols {
                acc += self[(r, c)] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn scaled_re(&self, s: f64) -> Self {
        self.scaled(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// max |(H - H†)_rc|, zero for Hermitian matrices.
    pub fn hermiticity_error(&self) -> f64 {
        assert!(self.is_square());
        let mut err: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                err = err.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        err
    }

    /// max |(U†U - 1)_rc|, zero for unitary matrices.
    pub fn unitarity_error(&self) -> f64 {
        let gram = self.adjoint().mul(self);
        let mut err: f64 = 0.0;
        for r in 0..gram.rows {
            for c in 0..gram.cols {
                let target = if r == c { 1.0 } else { 0.0 };
                err = err.max((gram[(r, c)] - Complex64::new(target, 0.0)).norm());
            }
        }
        err
    }

    /// Re Tr(self * rhs), evaluated without forming the product.
    pub fn trace_product_re(&self, rhs: &Self) -> f64 {
        assert_eq!(self.cols, rhs.rows);
        assert_eq!(self.rows, rhs.cols);
        let mut acc = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let prod = self[(r, c)] * rhs[(c, r)];
                acc += prod.re;
            }
        }
        acc
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn ensure_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_and_adjoint() {
        let a = ComplexMatrix::from_fn(2, 2, |r, cc| match (r, cc) {
            (0, 0) => c(1.0, 1.0),
            (0, 1) => c(0.0, -2.0),
            (1, 0) => c(3.0, 0.0),
            _ => c(-1.0, 0.5),
        });
        let prod = a.adjoint().mul(&a);
        // A†A is Hermitian with nonnegative diagonal.
        assert!(prod.hermiticity_error() < 1e-15);
        assert!(prod[(0, 0)].re >= 0.0 && prod[(1, 1)].re >= 0.0);
        assert!(prod[(0, 0)].im.abs() < 1e-15);

        let tr = prod.trace().re;
        let frob: f64 = (0..2)
            .flat_map(|r| (0..2).map(move |cc| (r, cc)))
            .map(|rc| a[rc].norm_sqr())
            .sum();
        assert!((tr - frob).abs() < 1e-14);
    }

    #[test]
    fn unitarity_check_detects_both_cases() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let hadamard = ComplexMatrix::from_fn(2, 2, |r, cc| {
            if (r, cc) == (1, 1) {
                c(-s, 0.0)
            } else {
                c(s, 0.0)
            }
        });
        assert!(hadamard.unitarity_error() < 1e-15);
        assert!(hadamard.scaled_re(2.0).unitarity_error() > 1.0);
    }

    #[test]
    fn trace_product_matches_explicit_product() {
        let a = ComplexMatrix::from_fn(3, 3, |r, cc| c((r + 2 * cc) as f64, (r as f64) - 1.0));
        let b = ComplexMatrix::from_fn(3, 3, |r, cc| c(1.0 / (1.0 + r as f64 + cc as f64), 0.3));
        let direct = a.mul(&b).trace().re;
        assert!((a.trace_product_re(&b) - direct).abs() < 1e-12);
    }
}
