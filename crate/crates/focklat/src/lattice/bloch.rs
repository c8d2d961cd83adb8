//! Single-particle Bloch Hamiltonians and band structures.
//!
//! Matrix elements carry the −κ sign of the hopping Hamiltonian, so
//! flat-band frequencies land at 0 (rhomboidal, stub, Lieb), κ (symmetric
//! rhomboidal) and 2κ (Kagome) relative to ε. For the 2D lattices the
//! wavevector components are the reduced coordinates k·a1, k·a2 ∈ [−π, π].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::LatticeKind;
use crate::linalg;

/// Wavevector samples, 1D scalars or 2D reduced pairs.
#[derive(Clone, Debug)]
pub enum KGrid {
    OneD(Vec<f64>),
    TwoD(Vec<[f64; 2]>),
}

impl KGrid {
    /// `n` points spanning [−π, π].
    pub fn line(n: usize) -> KGrid {
        KGrid::OneD(linspace_closed(n))
    }

    /// An n×n grid over [−π, π]².
    pub fn square(n: usize) -> KGrid {
        let axis = linspace_closed(n);
        let mut pts = Vec::with_capacity(n * n);
        for &k1 in &axis {
            for &k2 in &axis {
                pts.push([k1, k2]);
            }
        }
        KGrid::TwoD(pts)
    }

    pub fn len(&self) -> usize {
        match self {
            KGrid::OneD(v) => v.len(),
            KGrid::TwoD(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_two_dimensional(&self) -> bool {
        matches!(self, KGrid::TwoD(_))
    }
}

fn linspace_closed(n: usize) -> Vec<f64> {
    use std::f64::consts::PI;
    if n == 1 {
        return vec![0.0];
    }
    (0..n)
        .map(|i| -PI + 2.0 * PI * i as f64 / (n as f64 - 1.0))
        .collect()
}

/// Sorted real band energies per wavevector sample.
#[derive(Clone, Debug)]
pub struct BandStructure {
    pub k_samples: KGrid,
    pub bands: Vec<Vec<f64>>,
}

impl BandStructure {
    pub fn band_count(&self) -> usize {
        self.bands.first().map_or(0, |b| b.len())
    }

    /// Spread (max − min) of band `b` over all samples.
    pub fn band_spread(&self, b: usize) -> f64 {
        let lo = self
            .bands
            .iter()
            .map(|bs| bs[b])
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .bands
            .iter()
            .map(|bs| bs[b])
            .fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }

    pub fn band_mean(&self, b: usize) -> f64 {
        self.bands.iter().map(|bs| bs[b]).sum::<f64>() / self.bands.len() as f64
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn phase(k: f64) -> Complex64 {
    Complex64::new(0.0, k).exp()
}

/// Bloch matrix of the unit-cell Hamiltonian at one wavevector.
pub fn bloch_matrix(kind: LatticeKind, kappa: f64, epsilon: f64, k: &[f64]) -> Result<DMatrix<Complex64>> {
    let mk = c(-kappa, 0.0);
    let mut h = match (kind, k) {
        (LatticeKind::Rhomboidal, [k1]) | (LatticeKind::SymmetricRhomboidal, [k1]) => {
            // order A, B, S; S couples A, B of this cell and the next
            let f = mk * (c(1.0, 0.0) + phase(-k1));
            let mut h = DMatrix::<Complex64>::zeros(3, 3);
            h[(0, 2)] = f;
            h[(1, 2)] = f;
            if kind == LatticeKind::SymmetricRhomboidal {
                h[(0, 1)] = mk;
            }
            h
        }
        (LatticeKind::Stub, [k1]) => {
            // order A (dangling), B (bridge), S (hub); B couples S and S+1
            let mut h = DMatrix::<Complex64>::zeros(3, 3);
            h[(0, 2)] = mk;
            h[(1, 2)] = mk * (c(1.0, 0.0) + phase(*k1));
            h
        }
        (LatticeKind::Lieb, [k1, k2]) => {
            // order N (corner), EX, EY
            let mut h = DMatrix::<Complex64>::zeros(3, 3);
            h[(0, 1)] = mk * (c(1.0, 0.0) + phase(-k1));
            h[(0, 2)] = mk * (c(1.0, 0.0) + phase(-k2));
            h
        }
        (LatticeKind::Kagome, [k1, k2]) => {
            // order a, b, c with reduced coordinates k1 = k·a1, k2 = k·a2
            let mut h = DMatrix::<Complex64>::zeros(3, 3);
            h[(0, 1)] = mk * (c(1.0, 0.0) + phase(-k1));
            h[(0, 2)] = mk * (c(1.0, 0.0) + phase(-k2));
            h[(1, 2)] = mk * (c(1.0, 0.0) + phase(k1 - k2));
            h
        }
        (LatticeKind::Custom, _) => {
            return Err(Error::UnsupportedLattice(
                "custom lattices have no periodic unit cell".into(),
            ))
        }
        _ => {
            return Err(Error::invalid(
                "wavevector dimension does not match the lattice",
            ))
        }
    };
    // mirror the upper triangle and set the diagonal
    for i in 0..h.nrows() {
        for j in 0..i {
            h[(i, j)] = h[(j, i)].conj();
        }
        h[(i, i)] = c(epsilon, 0.0);
    }
    Ok(h)
}

/// Diagonalizes the Bloch Hamiltonian over a wavevector grid.
pub fn bloch_bands(
    kind: LatticeKind,
    kappa: f64,
    epsilon: f64,
    k_grid: &KGrid,
) -> Result<BandStructure> {
    if k_grid.is_empty() {
        return Err(Error::invalid("empty wavevector grid"));
    }
    if !(kappa > 0.0) {
        return Err(Error::invalid("kappa must be positive"));
    }
    let two_d = matches!(kind, LatticeKind::Lieb | LatticeKind::Kagome);
    if two_d != k_grid.is_two_dimensional() {
        return Err(Error::invalid(
            "wavevector grid dimensionality does not match the lattice",
        ));
    }
    let mut bands = Vec::with_capacity(k_grid.len());
    let mut eval = |k: &[f64]| -> Result<()> {
        let h = bloch_matrix(kind, kappa, epsilon, k)?;
        bands.push(linalg::hermitian_eigenvalues(&h));
        Ok(())
    };
    match k_grid {
        KGrid::OneD(ks) => {
            for &k in ks {
                eval(&[k])?;
            }
        }
        KGrid::TwoD(ks) => {
            for k in ks {
                eval(k)?;
            }
        }
    }
    Ok(BandStructure {
        k_samples: k_grid.clone(),
        bands,
    })
}

/// Mean frequency of a band whose spread stays below `tol`; `None` when
/// every band disperses.
///
/// Flat bands may be crossed by dispersive ones (the symmetric rhomboidal
/// flat band at κ is), which scrambles index-wise sorted bands, so the
/// search is by value: a candidate frequency from the first sample counts
/// as flat when every sample has an eigenvalue within `tol` of it.
pub fn flat_band_frequency(bands: &BandStructure, tol: f64) -> Option<f64> {
    let first = bands.bands.first()?;
    'candidate: for &cand in first {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for sample in &bands.bands {
            let nearest = sample
                .iter()
                .copied()
                .min_by(|a, b| (a - cand).abs().partial_cmp(&(b - cand).abs()).unwrap())?;
            if (nearest - cand).abs() > tol {
                continue 'candidate;
            }
            lo = lo.min(nearest);
            hi = hi.max(nearest);
            sum += nearest;
        }
        if hi - lo < tol {
            return Some(sum / bands.bands.len() as f64);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;

    const KAPPA: f64 = 1.0;

    fn flat(kind: LatticeKind) -> Option<f64> {
        let grid = if matches!(kind, LatticeKind::Lieb | LatticeKind::Kagome) {
            KGrid::square(64)
        } else {
            KGrid::line(64)
        };
        let bands = bloch_bands(kind, KAPPA, 0.0, &grid).unwrap();
        flat_band_frequency(&bands, 1e-10 * KAPPA)
    }

    #[test]
    fn bloch_matrices_are_hermitian() {
        for (kind, k) in [
            (LatticeKind::Rhomboidal, vec![0.7]),
            (LatticeKind::SymmetricRhomboidal, vec![-2.1]),
            (LatticeKind::Stub, vec![1.3]),
            (LatticeKind::Lieb, vec![0.4, -0.9]),
            (LatticeKind::Kagome, vec![2.2, 0.3]),
        ] {
            let h = bloch_matrix(kind, 1.3, 0.2, &k).unwrap();
            assert!(crate::linalg::hermiticity_error(&h) < tol::STRICT);
        }
    }

    #[test]
    fn rhomboidal_flat_band_at_zero() {
        let fb = flat(LatticeKind::Rhomboidal).expect("flat band must exist");
        assert!(fb.abs() < 1e-12);
    }

    #[test]
    fn stub_flat_band_at_zero() {
        let fb = flat(LatticeKind::Stub).expect("flat band must exist");
        assert!(fb.abs() < 1e-12);
    }

    #[test]
    fn symmetric_rhomboidal_flat_band_at_kappa() {
        let fb = flat(LatticeKind::SymmetricRhomboidal).expect("flat band must exist");
        assert!((fb - KAPPA).abs() < 1e-12);
    }

    #[test]
    fn lieb_flat_band_at_zero() {
        let fb = flat(LatticeKind::Lieb).expect("flat band must exist");
        assert!(fb.abs() < 1e-12);
    }

    #[test]
    fn kagome_flat_band_at_two_kappa() {
        let fb = flat(LatticeKind::Kagome).expect("flat band must exist");
        assert!((fb - 2.0 * KAPPA).abs() < 1e-12);
    }

    #[test]
    fn band_count_and_sample_count() {
        let grid = KGrid::line(33);
        let bands = bloch_bands(LatticeKind::Stub, 1.0, 0.0, &grid).unwrap();
        assert_eq!(bands.band_count(), 3);
        assert_eq!(bands.bands.len(), 33);
        let total: usize = bands.bands.iter().map(|b| b.len()).sum();
        assert_eq!(total, 3 * 33);
    }

    #[test]
    fn epsilon_offsets_the_whole_spectrum() {
        let grid = KGrid::line(17);
        let b0 = bloch_bands(LatticeKind::Rhomboidal, 1.0, 0.0, &grid).unwrap();
        let b1 = bloch_bands(LatticeKind::Rhomboidal, 1.0, 0.75, &grid).unwrap();
        for (x, y) in b0.bands.iter().flatten().zip(b1.bands.iter().flatten()) {
            assert!((y - x - 0.75).abs() < 1e-12);
        }
    }

    #[test]
    fn dispersive_only_spectra_have_no_flat_band() {
        // cosine band of a monatomic chain: never flat
        let ks = linspace_closed(64);
        let bands = BandStructure {
            bands: ks.iter().map(|k| vec![-2.0 * KAPPA * k.cos()]).collect(),
            k_samples: KGrid::OneD(ks),
        };
        assert_eq!(flat_band_frequency(&bands, 1e-10 * KAPPA), None);
    }

    #[test]
    fn custom_kind_has_no_bloch_hamiltonian() {
        assert!(bloch_bands(LatticeKind::Custom, 1.0, 0.0, &KGrid::line(8)).is_err());
    }
}
