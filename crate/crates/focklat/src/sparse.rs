//! Compressed-sparse-row complex matrices for sector Hamiltonians.
//!
//! Matvec dominates the propagation cost, so operators are stored in CSR;
//! dense conversion is available for the small dimensions where direct
//! eigendecomposition wins.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<Complex64>,
}

impl CsrMatrix {
    /// Builds from (row, col, value) triplets, summing duplicates and
    /// dropping entries that cancel to exact zero.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(u32, u32, Complex64)>) -> Result<Self> {
        if triplets
            .iter()
            .any(|&(r, c, _)| r as usize >= dim || c as usize >= dim)
        {
            return Err(Error::invalid("triplet index out of range"));
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(u32, u32, Complex64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|&(_, _, v)| v != Complex64::new(0.0, 0.0));

        let mut row_ptr = vec![0usize; dim + 1];
        for &(r, _, _) in &merged {
            row_ptr[r as usize + 1] += 1;
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        let cols = merged.iter().map(|&(_, c, _)| c).collect();
        let vals = merged.iter().map(|&(_, _, v)| v).collect();
        Ok(CsrMatrix {
            dim,
            row_ptr,
            cols,
            vals,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for r in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            y[r] = acc;
        }
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        let c = c as u32;
        for k in self.row_ptr[r]..self.row_ptr[r + 1] {
            if self.cols[k] == c {
                return self.vals[k];
            }
        }
        Complex64::new(0.0, 0.0)
    }

    /// Max |A_ij − conj(A_ji)| over stored entries.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k] as usize;
                let mirror = self.entry(c, r);
                worst = worst.max((self.vals[k] - mirror.conj()).norm());
            }
        }
        worst
    }

    /// Gershgorin bound on the spectral radius.
    pub fn gershgorin_bound(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            let mut sum = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                sum += self.vals[k].norm();
            }
            worst = worst.max(sum);
        }
        worst
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k] as usize)] = self.vals[k];
            }
        }
        m
    }

    pub fn triplets(&self) -> Vec<(u32, u32, Complex64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out.push((r as u32, self.cols[k], self.vals[k]));
            }
        }
        out
    }
}

/// Sparse-triplet export `{dim, triplets: [[r, c, re, im]]}` for
/// cross-checking operators against external tools.
#[derive(Serialize, Deserialize)]
pub struct TripletsJson {
    pub dim: usize,
    pub triplets: Vec<(u32, u32, f64, f64)>,
}

impl TripletsJson {
    pub fn from_matrix(m: &CsrMatrix) -> Self {
        TripletsJson {
            dim: m.dim(),
            triplets: m
                .triplets()
                .into_iter()
                .map(|(r, c, v)| (r, c, v.re, v.im))
                .collect(),
        }
    }

    pub fn into_matrix(self) -> Result<CsrMatrix> {
        CsrMatrix::from_triplets(
            self.dim,
            self.triplets
                .into_iter()
                .map(|(r, c, re, im)| (r, c, Complex64::new(re, im)))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn triplets_merge_and_matvec() {
        let m = CsrMatrix::from_triplets(
            3,
            vec![
                (0, 1, c(2.0)),
                (0, 1, c(1.0)),
                (2, 0, c(-1.0)),
                (1, 1, c(4.0)),
                (1, 1, c(-4.0)),
            ],
        )
        .unwrap();
        assert_eq!(m.nnz(), 2); // (1,1) cancelled exactly
        let y = m.matvec(&[c(1.0), c(1.0), c(1.0)]);
        assert_eq!(y[0], c(3.0));
        assert_eq!(y[1], c(0.0));
        assert_eq!(y[2], c(-1.0));
    }

    #[test]
    fn dense_round_trip_and_bounds() {
        let m = CsrMatrix::from_triplets(
            2,
            vec![
                (0, 1, Complex64::new(0.0, -1.5)),
                (1, 0, Complex64::new(0.0, 1.5)),
                (1, 1, c(2.0)),
            ],
        )
        .unwrap();
        assert!(m.hermiticity_error() < 1e-15);
        assert!((m.gershgorin_bound() - 3.5).abs() < 1e-15);
        let d = m.to_dense();
        assert_eq!(d[(0, 1)], Complex64::new(0.0, -1.5));
        let json = serde_json::to_string(&TripletsJson::from_matrix(&m)).unwrap();
        let back: TripletsJson = serde_json::from_str(&json).unwrap();
        let m2 = back.into_matrix().unwrap();
        assert_eq!(m2.entry(1, 1), c(2.0));
        assert_eq!(m2.nnz(), m.nnz());
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(CsrMatrix::from_triplets(2, vec![(0, 5, c(1.0))]).is_err());
    }
}
