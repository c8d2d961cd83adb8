//! Density matrices, partial trace and partial transposition.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fockspace::basis::{Basis, OccupationVector};
use crate::fockspace::state::{sorted_subset, StateVector};
use crate::linalg;
use crate::tol;

/// Hermitian, unit-trace, positive-semidefinite operator over a basis.
#[derive(Clone)]
pub struct DensityMatrix {
    basis: Arc<Basis>,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validating constructor: Hermiticity and unit trace are enforced here;
    /// positivity is left to [`DensityMatrix::min_eigenvalue`] because it
    /// costs a full eigensolve.
    pub fn new(basis: Arc<Basis>, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != basis.dim() || matrix.ncols() != basis.dim() {
            return Err(Error::mismatch("matrix shape does not match basis"));
        }
        let herm = linalg::hermiticity_error(&matrix);
        if herm > tol::ALGEBRA {
            return Err(Error::NumericalInvariant(format!(
                "Hermiticity violation {herm:.3e}"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol::ALGEBRA || tr.im.abs() > tol::ALGEBRA {
            return Err(Error::NumericalInvariant(format!(
                "trace {tr} deviates from 1"
            )));
        }
        Ok(DensityMatrix { basis, matrix })
    }

    /// |s⟩⟨s| for a normalized state.
    pub fn from_pure(state: &StateVector) -> Result<Self> {
        state.assert_normalized()?;
        let dim = state.basis().dim();
        let amps = state.amplitudes();
        let matrix = DMatrix::from_fn(dim, dim, |i, j| amps[i] * amps[j].conj());
        Ok(DensityMatrix {
            basis: state.basis().clone(),
            matrix,
        })
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += (self.matrix[(i, j)] * self.matrix[(j, i)]).re;
            }
        }
        acc
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// ⟨state|ρ|state⟩.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        if !self.basis.same_space(state.basis()) {
            return Err(Error::mismatch("state lives on a different basis"));
        }
        let amps = state.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += amps[i].conj() * self.matrix[(i, j)] * amps[j];
            }
        }
        Ok(acc.re)
    }

    /// ⟨a|ρ|b⟩.
    pub fn matrix_element(&self, a: &StateVector, b: &StateVector) -> Result<Complex64> {
        if !self.basis.same_space(a.basis()) || !self.basis.same_space(b.basis()) {
            return Err(Error::mismatch("states live on a different basis"));
        }
        let av = a.amplitudes();
        let bv = b.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += av[i].conj() * self.matrix[(i, j)] * bv[j];
            }
        }
        Ok(acc)
    }

    /// Partial trace onto `keep_modes`; the result lives on the truncated
    /// basis of the kept modes with N_max equal to the input's max total.
    pub fn partial_trace(&self, keep_modes: &[usize]) -> Result<DensityMatrix> {
        let (keep, _rest) = split_sets(keep_modes, self.basis.mode_count())?;
        let target = Basis::truncated(keep.len(), self.basis.max_total())?;
        let kept_idx = precompute_split(&self.basis, &keep, &target);
        let mut out = DMatrix::<Complex64>::zeros(target.dim(), target.dim());
        let dim = self.dim();
        for i in 0..dim {
            let (ki, ref wi) = kept_idx[i];
            for j in 0..dim {
                let (kj, ref wj) = kept_idx[j];
                if wi == wj {
                    out[(ki, kj)] += self.matrix[(i, j)];
                }
            }
        }
        DensityMatrix::new(target, out)
    }

    /// Partial trace of |s⟩⟨s| without materializing the full outer product.
    pub fn partial_trace_of_pure(state: &StateVector, keep_modes: &[usize]) -> Result<DensityMatrix> {
        state.assert_normalized()?;
        let basis = state.basis();
        let (keep, _rest) = split_sets(keep_modes, basis.mode_count())?;
        let target = Basis::truncated(keep.len(), basis.max_total())?;
        // group nonzero amplitudes by the discarded-mode occupation
        let mut groups: std::collections::HashMap<Vec<u32>, Vec<(usize, Complex64)>> =
            std::collections::HashMap::new();
        let rest: Vec<usize> = (0..basis.mode_count())
            .filter(|m| !keep.contains(m))
            .collect();
        for (occ, &a) in basis.states().iter().zip(state.amplitudes()) {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let kept_occ = OccupationVector::new(occ.select(&keep));
            let ki = target
                .index_of(&kept_occ)
                .expect("kept occupation fits the truncated target");
            groups.entry(occ.select(&rest)).or_default().push((ki, a));
        }
        let mut out = DMatrix::<Complex64>::zeros(target.dim(), target.dim());
        for (_, members) in groups {
            for &(i, ai) in &members {
                for &(j, aj) in &members {
                    out[(i, j)] += ai * aj.conj();
                }
            }
        }
        DensityMatrix::new(target, out)
    }

    /// Partial transpose over `transpose_modes`.
    ///
    /// Index pairs of the transposed subsystem are exchanged, which moves
    /// weight between photon-number sectors, so the result lives on the
    /// truncated basis with twice the input's max total. Hermiticity and the
    /// trace are preserved; positivity generally is not.
    pub fn partial_transpose(&self, transpose_modes: &[usize]) -> Result<PartialTranspose> {
        pt_core(&self.basis, &self.matrix, transpose_modes)
    }
}

fn pt_core(
    basis: &Arc<Basis>,
    matrix: &DMatrix<Complex64>,
    transpose_modes: &[usize],
) -> Result<PartialTranspose> {
    let modes = basis.mode_count();
    let (tset, rest) = split_sets(transpose_modes, modes)?;
    let target = Basis::truncated(modes, 2 * basis.max_total())?;
    let dim = basis.dim();
    // cache the (transposed, rest) split of every input ordinal
    let splits: Vec<(Vec<u32>, Vec<u32>)> = basis
        .states()
        .iter()
        .map(|occ| (occ.select(&tset), occ.select(&rest)))
        .collect();
    let mut out = DMatrix::<Complex64>::zeros(target.dim(), target.dim());
    for i in 0..dim {
        for j in 0..dim {
            let v = matrix[(i, j)];
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let u = combine(&tset, &splits[j].0, &rest, &splits[i].1, modes);
            let w = combine(&tset, &splits[i].0, &rest, &splits[j].1, modes);
            let ui = target.index_of(&u).expect("swap fits the doubled basis");
            let wi = target.index_of(&w).expect("swap fits the doubled basis");
            out[(ui, wi)] += v;
        }
    }
    Ok(PartialTranspose {
        basis: target,
        matrix: out,
    })
}

/// Result of a partial transposition: Hermitian but possibly indefinite.
pub struct PartialTranspose {
    pub basis: Arc<Basis>,
    pub matrix: DMatrix<Complex64>,
}

impl PartialTranspose {
    /// Transposing the same subset again; restricted to the original
    /// support this inverts the first transposition.
    pub fn partial_transpose(&self, transpose_modes: &[usize]) -> Result<PartialTranspose> {
        pt_core(&self.basis, &self.matrix, transpose_modes)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn trace_norm(&self) -> f64 {
        linalg::trace_norm_hermitian(&self.matrix)
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        linalg::hermiticity_error(&self.matrix)
    }
}

fn split_sets(subset: &[usize], mode_count: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let keep = sorted_subset(subset, mode_count)?;
    if keep.len() == mode_count {
        return Err(Error::invalid(
            "subset must be a proper subset of the modes",
        ));
    }
    let rest = (0..mode_count).filter(|m| !keep.contains(m)).collect();
    Ok((keep, rest))
}

/// For each basis ordinal: (index of kept part in target, discarded part).
fn precompute_split(
    basis: &Basis,
    keep: &[usize],
    target: &Basis,
) -> Vec<(usize, Vec<u32>)> {
    let rest: Vec<usize> = (0..basis.mode_count())
        .filter(|m| !keep.contains(m))
        .collect();
    basis
        .states()
        .iter()
        .map(|occ| {
            let kept = OccupationVector::new(occ.select(keep));
            let ki = target
                .index_of(&kept)
                .expect("kept occupation fits the truncated target");
            (ki, occ.select(&rest))
        })
        .collect()
}

/// Reassembles a full occupation vector from its two sorted-mode parts.
fn combine(
    set_a: &[usize],
    occ_a: &[u32],
    set_b: &[usize],
    occ_b: &[u32],
    modes: usize,
) -> OccupationVector {
    let mut parts = vec![0u32; modes];
    for (&m, &n) in set_a.iter().zip(occ_a) {
        parts[m] = n;
    }
    for (&m, &n) in set_b.iter().zip(occ_b) {
        parts[m] = n;
    }
    OccupationVector::new(parts)
}
