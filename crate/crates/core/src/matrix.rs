//! Dense realization of the structured matrix family and its triangular
//! factors.
//!
//! The family is defined as the product U * L of an upper and a lower
//! triangular matrix sharing the parameters: both factors carry
//! (alpha_i + 1)/2 on the diagonal, row i of U repeats alpha_j in every
//! column j > i, and column j of L repeats alpha_j in every row i > j.
//! Construction always uses these explicit entries, so zero parameters are
//! fully supported (the equivalent diagonally-factored form divides by
//! alpha_i and is only used as a test oracle).

use crate::params::ParameterSet;

/// Row-major dense n x n matrix of f64.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Plain O(n^3) product.
    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.at(k, j);
                }
            }
        }
        out
    }
}

/// The dense matrix together with the two triangular factors it came from.
///
/// Immutable after construction; `dense` equals `upper * lower` exactly as
/// the stored floating-point product.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredMatrix {
    pub dense: DenseMatrix,
    pub upper: DenseMatrix,
    pub lower: DenseMatrix,
}

impl StructuredMatrix {
    /// Build the matrix for a validated parameter set.
    ///
    /// Deterministic: identical inputs give bit-identical outputs.
    pub fn new(params: &ParameterSet) -> Self {
        let a = params.alphas();
        let n = a.len();
        let mut upper = DenseMatrix::zeros(n);
        let mut lower = DenseMatrix::zeros(n);
        for i in 0..n {
            let d = (a[i] + 1.0) / 2.0;
            upper.set(i, i, d);
            lower.set(i, i, d);
            for j in (i + 1)..n {
                upper.set(i, j, a[j]);
            }
            for j in 0..i {
                lower.set(i, j, a[j]);
            }
        }
        let dense = upper.matmul(&lower);
        StructuredMatrix {
            dense,
            upper,
            lower,
        }
    }

    pub fn n(&self) -> usize {
        self.dense.n()
    }
}
