//! Second-quantized Hamiltonians on photon-number sectors.
//!
//! The full Hamiltonian splits as H = H₀ + H_int with a free part
//! H₀ = Σ_n ε_n a†_n a_n and a hopping part
//! H_int = −Σ_{edges} κ_{nm} (a†_n a_m + a†_m a_n). Both commute with the
//! total photon number, so every operator here acts block-diagonally and is
//! built on one basis (a fixed-N sector, or a truncated stack of sectors).
//!
//! Connector hop operators carry unit coupling — the coupling constant is
//! factored out so annihilation checks are manifestly κ-independent.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fockspace::{Basis, OccupationVector, StateVector};
use crate::lattice::Lattice;
use crate::sparse::{CsrMatrix, TripletsJson};
use crate::tol;

/// A (sparse) operator acting within one Fock basis.
#[derive(Clone)]
pub struct SectorOperator {
    basis: Arc<Basis>,
    matrix: CsrMatrix,
    label: String,
    hermitian: bool,
}

impl SectorOperator {
    pub fn new(basis: Arc<Basis>, matrix: CsrMatrix, label: impl Into<String>) -> Result<Self> {
        if matrix.dim() != basis.dim() {
            return Err(Error::mismatch("matrix dimension does not match basis"));
        }
        let herm = matrix.hermiticity_error();
        if herm > tol::ALGEBRA {
            return Err(Error::NumericalInvariant(format!(
                "operator is not Hermitian (deviation {herm:.3e})"
            )));
        }
        Ok(SectorOperator {
            basis,
            matrix,
            label: label.into(),
            hermitian: true,
        })
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// O|s⟩ (unnormalized).
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if !self.basis.same_space(state.basis()) {
            return Err(Error::mismatch("state lives on a different basis"));
        }
        StateVector::from_amplitudes(self.basis.clone(), self.matrix.matvec(state.amplitudes()))
    }

    /// ⟨s|O|s⟩ for a normalized state.
    pub fn expectation(&self, state: &StateVector) -> Result<Complex64> {
        let image = self.apply(state)?;
        state.inner_product(&image)
    }

    /// ‖O|s⟩ − λ|s⟩‖: residual of an eigenvalue claim.
    pub fn eigen_residual(&self, state: &StateVector, lambda: f64) -> Result<f64> {
        let image = self.apply(state)?;
        let mut acc = 0.0;
        for (a, b) in image.amplitudes().iter().zip(state.amplitudes()) {
            acc += (a - b * lambda).norm_sqr();
        }
        Ok(acc.sqrt())
    }

    /// Scales every matrix element (κ rescaling of unit-coupling operators).
    pub fn scaled(&self, factor: f64) -> Result<SectorOperator> {
        let triplets = self
            .matrix
            .triplets()
            .into_iter()
            .map(|(r, c, v)| (r, c, v * factor))
            .collect();
        SectorOperator::new(
            self.basis.clone(),
            CsrMatrix::from_triplets(self.dim(), triplets)?,
            format!("{} (scaled)", self.label),
        )
    }

    /// Pointwise sum of two operators on the same basis.
    pub fn add(&self, other: &SectorOperator) -> Result<SectorOperator> {
        if !self.basis.same_space(&other.basis) {
            return Err(Error::mismatch("operators live on different bases"));
        }
        let mut triplets = self.matrix.triplets();
        triplets.extend(other.matrix.triplets());
        SectorOperator::new(
            self.basis.clone(),
            CsrMatrix::from_triplets(self.dim(), triplets)?,
            format!("{} + {}", self.label, other.label),
        )
    }

    pub fn to_triplets_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&TripletsJson::from_matrix(
            &self.matrix,
        ))?)
    }
}

fn check_lattice_basis(lattice: &Lattice, basis: &Basis) -> Result<()> {
    if lattice.site_count() != basis.mode_count() {
        return Err(Error::mismatch(format!(
            "lattice has {} sites but basis has {} modes",
            lattice.site_count(),
            basis.mode_count()
        )));
    }
    Ok(())
}

/// Adds the Hermitian hop pair c·(a†_i a_j + a†_j a_i) for every basis
/// state, as triplets.
fn hop_triplets(
    basis: &Basis,
    i: usize,
    j: usize,
    coupling: Complex64,
    out: &mut Vec<(u32, u32, Complex64)>,
) {
    for (s, occ) in basis.states().iter().enumerate() {
        for (from, to) in [(j, i), (i, j)] {
            let n_from = occ.get(from);
            if n_from == 0 {
                continue;
            }
            let mut parts = occ.as_slice().to_vec();
            parts[from] -= 1;
            parts[to] += 1;
            let amp = coupling * ((n_from as f64) * (parts[to] as f64)).sqrt();
            let target = basis
                .index_of(&OccupationVector::new(parts))
                .expect("hopping conserves the total photon number");
            out.push((target as u32, s as u32, amp));
        }
    }
}

/// The hopping Hamiltonian H_int = −Σ κ_{nm}(a†_n a_m + a†_m a_n) on the
/// given sector. Matrix element for one hop: ⟨…,n_i+1,…,n_j−1,…|H|…⟩ =
/// −κ_{ij} √(n_j) √(n_i+1).
pub fn build_interaction(lattice: &Lattice, basis: &Arc<Basis>) -> Result<SectorOperator> {
    check_lattice_basis(lattice, basis)?;
    let mut triplets = Vec::new();
    for e in &lattice.edges {
        hop_triplets(
            basis,
            e.i,
            e.j,
            Complex64::new(-e.kappa, 0.0),
            &mut triplets,
        );
    }
    SectorOperator::new(
        basis.clone(),
        CsrMatrix::from_triplets(basis.dim(), triplets)?,
        "H_int",
    )
}

/// The free Hamiltonian H₀ = Σ_n ε_n a†_n a_n (diagonal).
pub fn build_free(lattice: &Lattice, basis: &Arc<Basis>) -> Result<SectorOperator> {
    check_lattice_basis(lattice, basis)?;
    let eps = lattice.epsilons();
    let mut triplets = Vec::with_capacity(basis.dim());
    for (s, occ) in basis.states().iter().enumerate() {
        let diag: f64 = occ
            .as_slice()
            .iter()
            .zip(&eps)
            .map(|(&n, &e)| e * n as f64)
            .sum();
        if diag != 0.0 {
            triplets.push((s as u32, s as u32, Complex64::new(diag, 0.0)));
        }
    }
    SectorOperator::new(
        basis.clone(),
        CsrMatrix::from_triplets(basis.dim(), triplets)?,
        "H_0",
    )
}

/// The full Hamiltonian H = H₀ + H_int.
pub fn build_full(lattice: &Lattice, basis: &Arc<Basis>) -> Result<SectorOperator> {
    build_free(lattice, basis)?.add(&build_interaction(lattice, basis)?)
}

/// Unit-coupling hop operator between a tagged connector site and its
/// neighbors inside the localized cell:
/// Σ_{n ∈ cell neighbors} (a†_S a_n + a†_n a_S).
pub fn connector_operator(
    lattice: &Lattice,
    basis: &Arc<Basis>,
    connector_site: usize,
) -> Result<SectorOperator> {
    check_lattice_basis(lattice, basis)?;
    if !lattice.connectors.contains(&connector_site) {
        return Err(Error::invalid(format!(
            "site {connector_site} is not tagged as a connector"
        )));
    }
    let mut triplets = Vec::new();
    for n in lattice.neighbors(connector_site) {
        if lattice.cell_sites.contains(&n) {
            hop_triplets(
                basis,
                connector_site,
                n,
                Complex64::new(1.0, 0.0),
                &mut triplets,
            );
        }
    }
    SectorOperator::new(
        basis.clone(),
        CsrMatrix::from_triplets(basis.dim(), triplets)?,
        format!("H_S[{connector_site}]"),
    )
}

/// Connector operators for every tagged connector of the lattice.
pub fn connector_operators(lattice: &Lattice, basis: &Arc<Basis>) -> Result<Vec<SectorOperator>> {
    lattice
        .connectors
        .iter()
        .map(|&s| connector_operator(lattice, basis, s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, Edge, Extent, Lattice, LatticeKind, Site};

    fn two_site_lattice(kappa: f64) -> Lattice {
        Lattice::custom(
            vec![
                Site {
                    id: 0,
                    label: "L".into(),
                    epsilon: 0.0,
                },
                Site {
                    id: 1,
                    label: "R".into(),
                    epsilon: 0.0,
                },
            ],
            vec![Edge {
                i: 0,
                j: 1,
                kappa,
            }],
            vec![0],
            vec![1],
        )
        .unwrap()
    }

    #[test]
    fn single_photon_hop_matrix() {
        let lat = two_site_lattice(0.8);
        let basis = Basis::fixed(2, 1).unwrap();
        let h = build_interaction(&lat, &basis).unwrap();
        let d = h.matrix().to_dense();
        assert!((d[(0, 1)] - Complex64::new(-0.8, 0.0)).norm() < 1e-15);
        assert!((d[(1, 0)] - Complex64::new(-0.8, 0.0)).norm() < 1e-15);
        assert_eq!(d[(0, 0)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn free_hamiltonian_is_eps_times_n_on_homogeneous_sectors() {
        let lat = build_lattice(LatticeKind::Rhomboidal, Extent::Chain(2), 1.0, 0.4).unwrap();
        for n in 0u32..=3 {
            let basis = Basis::fixed(lat.site_count(), n).unwrap();
            let h0 = build_free(&lat, &basis).unwrap();
            let d = h0.matrix().to_dense();
            for i in 0..basis.dim() {
                assert!((d[(i, i)].re - 0.4 * n as f64).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn free_hamiltonian_zero_for_zero_epsilon() {
        let lat = two_site_lattice(1.0);
        let basis = Basis::fixed(2, 3).unwrap();
        let h0 = build_free(&lat, &basis).unwrap();
        assert_eq!(h0.matrix().nnz(), 0);
    }

    #[test]
    fn heterogeneous_epsilon_diagonal() {
        // two modes with different propagation constants
        let lat = Lattice::custom(
            vec![
                Site {
                    id: 0,
                    label: "L".into(),
                    epsilon: 0.3,
                },
                Site {
                    id: 1,
                    label: "R".into(),
                    epsilon: -0.7,
                },
            ],
            vec![Edge {
                i: 0,
                j: 1,
                kappa: 1.0,
            }],
            vec![0],
            vec![1],
        )
        .unwrap();
        let basis = Basis::fixed(2, 2).unwrap();
        let h0 = build_free(&lat, &basis).unwrap();
        let d = h0.matrix().to_dense();
        // basis order: |2,0⟩, |1,1⟩, |0,2⟩
        assert!((d[(0, 0)].re - 0.6).abs() < 1e-14);
        assert!((d[(1, 1)].re - (0.3 - 0.7)).abs() < 1e-14);
        assert!((d[(2, 2)].re - (-1.4)).abs() < 1e-14);
    }

    #[test]
    fn interaction_conserves_photon_number_structurally() {
        // on a truncated basis, H_int must never mix sectors
        let lat = build_lattice(LatticeKind::Stub, Extent::Chain(2), 1.0, 0.0).unwrap();
        let basis = Basis::truncated(lat.site_count(), 3).unwrap();
        let h = build_interaction(&lat, &basis).unwrap();
        for (r, c, _) in h.matrix().triplets() {
            let tr = basis.occupation(r as usize).total();
            let tc = basis.occupation(c as usize).total();
            assert_eq!(tr, tc);
        }
    }

    #[test]
    fn hermiticity_of_all_builders() {
        let lat = build_lattice(LatticeKind::Kagome, Extent::Grid(3, 3), 1.3, 0.2)
            .unwrap()
            .localized_fragment()
            .unwrap();
        let basis = Basis::fixed(lat.site_count(), 2).unwrap();
        for op in [
            build_interaction(&lat, &basis).unwrap(),
            build_free(&lat, &basis).unwrap(),
            build_full(&lat, &basis).unwrap(),
            connector_operator(&lat, &basis, lat.connectors[0]).unwrap(),
        ] {
            assert!(op.matrix().hermiticity_error() < tol::ALGEBRA);
        }
    }

    #[test]
    fn interaction_single_photon_sector_matches_bloch_restriction() {
        // the N=1 block of H_int is exactly the single-particle hopping
        // matrix of the finite lattice
        let lat = build_lattice(LatticeKind::Rhomboidal, Extent::Chain(3), 0.9, 0.0).unwrap();
        let basis = Basis::fixed(lat.site_count(), 1).unwrap();
        let h = build_interaction(&lat, &basis).unwrap().matrix().to_dense();
        // single-particle matrix assembled directly from the edge list
        let m = lat.site_count();
        let mut sp = nalgebra::DMatrix::<Complex64>::zeros(m, m);
        for e in &lat.edges {
            sp[(e.i, e.j)] = Complex64::new(-e.kappa, 0.0);
            sp[(e.j, e.i)] = Complex64::new(-e.kappa, 0.0);
        }
        // basis order for N=1 is |1,0,…⟩, |0,1,…⟩, …: mode m ↔ ordinal m
        for i in 0..m {
            for j in 0..m {
                assert!((h[(i, j)] - sp[(i, j)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn connector_requires_tag() {
        let lat = build_lattice(LatticeKind::Rhomboidal, Extent::Chain(3), 1.0, 0.0).unwrap();
        let basis = Basis::fixed(lat.site_count(), 1).unwrap();
        let cell_site = lat.cell_sites[0];
        assert!(connector_operator(&lat, &basis, cell_site).is_err());
        assert!(connector_operator(&lat, &basis, lat.connectors[0]).is_ok());
    }

    #[test]
    fn connector_couples_unbalanced_input() {
        // |1⟩ on A alone leaks into the connector with unit amplitude
        let lat = build_lattice(LatticeKind::Rhomboidal, Extent::Chain(3), 1.0, 0.0).unwrap();
        let basis = Basis::fixed(lat.site_count(), 1).unwrap();
        let a_site = lat.cell_sites[0];
        let mut occ = vec![0u32; lat.site_count()];
        occ[a_site] = 1;
        let ket = StateVector::basis_state(basis.clone(), &OccupationVector::new(occ)).unwrap();
        let s_site = lat.connectors[0];
        let h_s = connector_operator(&lat, &basis, s_site).unwrap();
        let image = h_s.apply(&ket).unwrap();
        let mut s_occ = vec![0u32; lat.site_count()];
        s_occ[s_site] = 1;
        let amp = image.amplitude_of(&OccupationVector::new(s_occ));
        assert!((amp - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn basis_size_mismatch_rejected() {
        let lat = two_site_lattice(1.0);
        let basis = Basis::fixed(3, 1).unwrap();
        assert!(build_interaction(&lat, &basis).is_err());
    }

    #[test]
    fn triplet_export_round_trips() {
        let lat = two_site_lattice(0.5);
        let basis = Basis::fixed(2, 2).unwrap();
        let h = build_interaction(&lat, &basis).unwrap();
        let text = h.to_triplets_json().unwrap();
        let parsed: TripletsJson = serde_json::from_str(&text).unwrap();
        let back = parsed.into_matrix().unwrap();
        assert_eq!(back.nnz(), h.matrix().nnz());
        for (r, c, v) in h.matrix().triplets() {
            assert!((back.entry(r as usize, c as usize) - v).norm() < 1e-15);
        }
    }
}
