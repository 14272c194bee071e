//! Dense complex matrices at small dimension, with the Hermitian
//! eigendecomposition backing all entropic functionals.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// A row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "entry count {} does not equal {}x{}",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(ComplexMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, entries: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds from real entries (imaginary parts zero).
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        ComplexMatrix::new(rows, cols, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * n + i] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Rank-1 projector |psi><psi| from a (not necessarily normalized) vector.
    pub fn projector(psi: &[Complex64]) -> Self {
        let n = psi.len();
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.entries[i * n + j] = psi[i] * psi[j].conj() / norm2;
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[c * self.rows + r] = self.entries[r * self.cols + c].conj();
            }
        }
        out
    }

    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.entries[i * self.cols + k];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.entries[i * other.cols + j] += aik * other.entries[k * other.cols + j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn scale(&self, s: f64) -> ComplexMatrix {
        let entries = self.entries.iter().map(|a| a * s).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.entries[i * self.cols + i]).sum()
    }

    /// Maximum absolute deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = (self.get(r, c) - self.get(c, r).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c))
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.hermitian_eigen()?.0)
    }

    /// Eigendecomposition of a Hermitian matrix.
    ///
    /// Returns `(eigenvalues ascending, eigenvectors)` with eigenvector `k`
    /// stored as column `k` of the returned matrix.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        if self.rows != self.cols {
            return Err(Error::InvalidState("eigendecomposition of non-square matrix".into()));
        }
        let m = self.to_nalgebra();
        let eig = SymmetricEigen::new(m);
        let n = self.rows;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("eigendecomposition produced non-finite values".into()));
        }
        let mut vectors = ComplexMatrix::zeros(n, n);
        for (k, &src) in order.iter().enumerate() {
            for r in 0..n {
                vectors.set(r, k, eig.eigenvectors[(r, src)]);
            }
        }
        Ok((values, vectors))
    }

    /// Column `k` as a vector.
    pub fn column(&self, k: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, k)).collect()
    }
}

/// Frobenius norm `sqrt(sum |a_ij|^2)`; equals `sqrt(tr(A^dagger A))`.
pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn frobenius_identity_2x2() {
        assert_relative_eq!(frobenius_norm(&ComplexMatrix::identity(2)), 2.0_f64.sqrt());
    }

    #[test]
    fn frobenius_zero_3x3() {
        assert_eq!(frobenius_norm(&ComplexMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn frobenius_real_example() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_relative_eq!(frobenius_norm(&m), 30.0_f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn frobenius_agrees_with_trace_formula() {
        let m = ComplexMatrix::new(
            2,
            3,
            vec![c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.5), c(-2.0, 0.0), c(0.0, 0.0), c(1.5, -1.5)],
        )
        .unwrap();
        let via_trace = m.dagger().mul(&m).trace().re.sqrt();
        assert_relative_eq!(frobenius_norm(&m), via_trace, max_relative = 1e-12);
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        // H = [[2, i], [-i, 3]]
        let h = ComplexMatrix::new(2, 2, vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)])
            .unwrap();
        let (vals, vecs) = h.hermitian_eigen().unwrap();
        // reconstruct sum_k lambda_k v_k v_k^dagger
        let mut recon = ComplexMatrix::zeros(2, 2);
        for (k, &l) in vals.iter().enumerate() {
            let v = vecs.column(k);
            recon = recon.add(&ComplexMatrix::projector(&v).scale(l));
        }
        for r in 0..2 {
            for cidx in 0..2 {
                assert_relative_eq!(recon.get(r, cidx).re, h.get(r, cidx).re, epsilon = 1e-12);
                assert_relative_eq!(recon.get(r, cidx).im, h.get(r, cidx).im, epsilon = 1e-12);
            }
        }
        // exact eigenvalues of [[2, i], [-i, 3]]: (5 +- sqrt(5)) / 2
        assert_relative_eq!(vals[0], (5.0 - 5.0_f64.sqrt()) / 2.0, epsilon = 1e-12);
        assert_relative_eq!(vals[1], (5.0 + 5.0_f64.sqrt()) / 2.0, epsilon = 1e-12);
    }
}
