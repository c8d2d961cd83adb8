//! Pure states over occupation-number bases.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fockspace::basis::{Basis, OccupationVector};
use crate::fockspace::density::DensityMatrix;
use crate::tol;

/// Which ladder operator to apply.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Ladder {
    Raise,
    Lower,
}

/// Complex amplitudes over a shared basis.
#[derive(Clone)]
pub struct StateVector {
    basis: Arc<Basis>,
    amplitudes: Vec<Complex64>,
}

impl std::fmt::Debug for StateVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "StateVector(modes={}, max_total={}, dim={})",
            self.basis.mode_count(),
            self.basis.max_total(),
            self.basis.dim()
        )
    }
}

impl StateVector {
    /// Wraps raw amplitudes without normalizing (ladder-operator images and
    /// channel branches are naturally unnormalized).
    pub fn from_amplitudes(basis: Arc<Basis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::mismatch(format!(
                "amplitude count {} does not match basis dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        Ok(StateVector { basis, amplitudes })
    }

    /// Normalizing constructor; the result has unit norm.
    pub fn new_normalized(basis: Arc<Basis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let s = Self::from_amplitudes(basis, amplitudes)?;
        s.normalized()
    }

    pub fn zero(basis: Arc<Basis>) -> Self {
        let n = basis.dim();
        StateVector {
            basis,
            amplitudes: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// The Fock ket |occ⟩.
    pub fn basis_state(basis: Arc<Basis>, occ: &OccupationVector) -> Result<Self> {
        let idx = basis
            .index_of(occ)
            .ok_or_else(|| Error::invalid(format!("{occ} not in basis")))?;
        let mut s = Self::zero(basis);
        s.amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn amplitude_of(&self, occ: &OccupationVector) -> Complex64 {
        self.basis
            .index_of(occ)
            .map(|i| self.amplitudes[i])
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::invalid("cannot normalize the zero vector"));
        }
        for a in &mut self.amplitudes {
            *a /= n;
        }
        Ok(self)
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        for a in &mut self.amplitudes {
            *a *= c;
        }
        self
    }

    fn check_same_space(&self, other: &StateVector) -> Result<()> {
        if !self.basis.same_space(&other.basis) {
            return Err(Error::mismatch(
                "states live on different bases".to_string(),
            ));
        }
        Ok(())
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_space(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨self|other⟩| — state comparison modulo global phase.
    pub fn overlap_magnitude(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm())
    }

    /// |⟨self|other⟩|² for pure states.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    /// Mean photon number per mode, Σ |a|² n_m.
    pub fn site_populations(&self) -> Vec<f64> {
        let modes = self.basis.mode_count();
        let mut pops = vec![0.0; modes];
        for (occ, a) in self.basis.states().iter().zip(&self.amplitudes) {
            let w = a.norm_sqr();
            if w == 0.0 {
                continue;
            }
            for (m, &n) in occ.as_slice().iter().enumerate() {
                pops[m] += w * n as f64;
            }
        }
        pops
    }

    /// Applies a single-mode ladder operator; the result is unnormalized.
    ///
    /// Lowering maps |…,n,…⟩ to √n |…,n−1,…⟩ and sends the vacuum sector to
    /// the zero vector. Raising maps with √(n+1); on a truncated basis it is
    /// an error when any populated component sits at the truncation edge.
    pub fn apply_ladder(&self, mode: usize, kind: Ladder) -> Result<StateVector> {
        if mode >= self.basis.mode_count() {
            return Err(Error::invalid(format!("mode {mode} out of range")));
        }
        let target: Arc<Basis> = match (&*self.basis, kind) {
            (Basis::Fixed(b), Ladder::Raise) => Basis::fixed(b.mode_count(), b.total() + 1)?,
            (Basis::Fixed(b), Ladder::Lower) => {
                if b.total() == 0 {
                    // a|vac⟩ = 0: keep the vacuum-sector basis
                    return Ok(Self::zero(self.basis.clone()));
                }
                Basis::fixed(b.mode_count(), b.total() - 1)?
            }
            (Basis::Truncated(_), _) => self.basis.clone(),
        };
        if let (Basis::Truncated(b), Ladder::Raise) = (&*self.basis, kind) {
            if let Some(top) = b.sector(b.max_total()) {
                if self.amplitudes[top].iter().any(|a| a.norm_sqr() > 0.0) {
                    return Err(Error::invalid(format!(
                        "raising beyond the truncation N_max = {}",
                        b.max_total()
                    )));
                }
            }
        }

        let mut out = vec![Complex64::new(0.0, 0.0); target.dim()];
        for (occ, &a) in self.basis.states().iter().zip(&self.amplitudes) {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let n = occ.get(mode);
            let mut parts = occ.as_slice().to_vec();
            let factor = match kind {
                Ladder::Lower => {
                    if n == 0 {
                        continue;
                    }
                    parts[mode] = n - 1;
                    (n as f64).sqrt()
                }
                Ladder::Raise => {
                    parts[mode] = n + 1;
                    ((n + 1) as f64).sqrt()
                }
            };
            let new_occ = OccupationVector::new(parts);
            let idx = target
                .index_of(&new_occ)
                .expect("ladder image must stay inside the target basis");
            out[idx] += a * factor;
        }
        StateVector::from_amplitudes(target, out)
    }

    /// Maps this state into `target`, sending source mode m to
    /// `mode_map[m]`; every unmapped target mode is left in vacuum.
    pub fn embed_into(&self, target: &Arc<Basis>, mode_map: &[usize]) -> Result<StateVector> {
        if mode_map.len() != self.basis.mode_count() {
            return Err(Error::invalid(
                "mode map length must equal the source mode count",
            ));
        }
        let tmodes = target.mode_count();
        let mut seen = vec![false; tmodes];
        for &t in mode_map {
            if t >= tmodes || seen[t] {
                return Err(Error::invalid("mode map must be injective and in range"));
            }
            seen[t] = true;
        }
        let mut out = vec![Complex64::new(0.0, 0.0); target.dim()];
        for (occ, &a) in self.basis.states().iter().zip(&self.amplitudes) {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut parts = vec![0u32; tmodes];
            for (m, &n) in occ.as_slice().iter().enumerate() {
                parts[mode_map[m]] = n;
            }
            let idx = target.index_of(&OccupationVector::new(parts)).ok_or_else(|| {
                Error::invalid(format!("{occ} does not fit inside the target basis"))
            })?;
            out[idx] += a;
        }
        StateVector::from_amplitudes(target.clone(), out)
    }

    /// Restriction to a subset of modes. All other modes must be in vacuum
    /// up to `residual_tol` in squared norm; the residual is projected out
    /// and the state renormalized.
    pub fn restricted_to(&self, keep: &[usize], residual_tol: f64) -> Result<StateVector> {
        let keep = sorted_subset(keep, self.basis.mode_count())?;
        let target: Arc<Basis> = match &*self.basis {
            Basis::Fixed(b) => Basis::fixed(keep.len(), b.total())?,
            Basis::Truncated(b) => Basis::truncated(keep.len(), b.max_total())?,
        };
        let mut out = vec![Complex64::new(0.0, 0.0); target.dim()];
        let mut dropped = 0.0;
        for (occ, &a) in self.basis.states().iter().zip(&self.amplitudes) {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            if !occ.supported_on(&keep) {
                dropped += a.norm_sqr();
                continue;
            }
            let sub = OccupationVector::new(occ.select(&keep));
            if let Some(idx) = target.index_of(&sub) {
                out[idx] += a;
            } else {
                dropped += a.norm_sqr();
            }
        }
        if dropped > residual_tol {
            return Err(Error::NumericalInvariant(format!(
                "population {dropped:.3e} outside the kept modes exceeds {residual_tol:.1e}"
            )));
        }
        StateVector::new_normalized(target, out)
    }

    /// Reduced density matrix over `keep_modes` (partial trace of |s⟩⟨s|).
    pub fn partial_trace(&self, keep_modes: &[usize]) -> Result<DensityMatrix> {
        DensityMatrix::partial_trace_of_pure(self, keep_modes)
    }

    /// Asserts unit norm within the construction tolerance.
    pub fn assert_normalized(&self) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > tol::ALGEBRA {
            return Err(Error::NumericalInvariant(format!(
                "norm {n} deviates from 1 beyond {:.0e}",
                tol::ALGEBRA
            )));
        }
        Ok(())
    }
}

/// Validates and sorts a strict subset-of-modes argument.
pub(crate) fn sorted_subset(modes: &[usize], mode_count: usize) -> Result<Vec<usize>> {
    if modes.is_empty() {
        return Err(Error::invalid("mode subset must not be empty"));
    }
    let mut v = modes.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.len() != modes.len() {
        return Err(Error::invalid("mode subset contains duplicates"));
    }
    if *v.last().unwrap() >= mode_count {
        return Err(Error::invalid("mode index out of range"));
    }
    Ok(v)
}
