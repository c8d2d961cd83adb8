//! Localized (non-diffractive) quantum states of flat-band lattices.
//!
//! On every catalog lattice the compact flat-band state with N photons is a
//! superposition of Fock states over the cell sites with real amplitudes
//!
//! ```text
//! amplitude(occ) = (−1)^{Σ signed occ}  ·  √multinomial(N; occ)  /  base^{N/2}
//! ```
//!
//! where `base` is the number of participating sites. The alternating signs
//! make every hop into a connector site interfere destructively, so the
//! state is annihilated by all connector operators and is an eigenstate of
//! the hopping Hamiltonian with eigenvalue 0, κN or 2κN depending on the
//! intra-cell couplings. States with different N occupy orthogonal photon
//! number sectors.
//!
//! The classical (coherent-light) localized excitation is recovered as a
//! poissonian superposition over N; for the two-site cell this factorizes
//! into a product of opposite-phase coherent states.

use std::sync::Arc;

use num_complex::Complex64;

use crate::combinatorics::{ln_factorial, sqrt_multinomial};
use crate::error::{Error, Result};
use crate::fockspace::{Basis, FockBasis, OccupationVector, StateVector};
use crate::lattice::{Lattice, LatticeKind};
use crate::tol;

/// Recipe for a localized state: which modes participate, which carry the
/// alternating sign, the normalization base and the flat-band eigenvalue
/// coefficient (eigenvalue = coeff · κ · N).
#[derive(Clone, Debug, PartialEq)]
pub struct LocalizedStateSpec {
    pub kind: LatticeKind,
    /// Basis-mode indices of the cell sites, in catalog order.
    pub cell_modes: Vec<usize>,
    /// Positions within `cell_modes` whose occupation enters the sign.
    pub signed_slots: Vec<usize>,
    /// Normalization base; equals the number of participating sites.
    pub base: u32,
    /// Hopping-Hamiltonian eigenvalue in units of κN.
    pub fb_coefficient: f64,
}

/// Sign slots and flat-band coefficient for each catalog kind.
fn catalog_entry(kind: LatticeKind) -> Result<(usize, Vec<usize>, f64)> {
    match kind {
        LatticeKind::Rhomboidal => Ok((2, vec![1], 0.0)),
        LatticeKind::SymmetricRhomboidal => Ok((2, vec![1], 1.0)),
        LatticeKind::Stub => Ok((3, vec![1], 0.0)),
        LatticeKind::Lieb => Ok((4, vec![1, 3], 0.0)),
        LatticeKind::Kagome => Ok((6, vec![1, 3, 5], 2.0)),
        LatticeKind::Custom => Err(Error::UnsupportedLattice(
            "no catalog localized state for custom lattices".into(),
        )),
    }
}

/// The localized-state recipe for a built lattice, using its tagged cell.
pub fn catalog_spec(lattice: &Lattice) -> Result<LocalizedStateSpec> {
    let (cell_len, signed_slots, fb) = catalog_entry(lattice.kind)?;
    if lattice.cell_sites.len() != cell_len {
        return Err(Error::invalid(format!(
            "{} lattice must tag {cell_len} cell sites",
            lattice.kind
        )));
    }
    Ok(LocalizedStateSpec {
        kind: lattice.kind,
        cell_modes: lattice.cell_sites.clone(),
        signed_slots,
        base: cell_len as u32,
        fb_coefficient: fb,
    })
}

/// The same recipe on a minimal basis holding only the cell modes,
/// convenient for entanglement analysis.
pub fn cell_spec(kind: LatticeKind) -> Result<LocalizedStateSpec> {
    let (cell_len, signed_slots, fb) = catalog_entry(kind)?;
    Ok(LocalizedStateSpec {
        kind,
        cell_modes: (0..cell_len).collect(),
        signed_slots,
        base: cell_len as u32,
        fb_coefficient: fb,
    })
}

impl LocalizedStateSpec {
    /// Amplitude parts for an occupation restricted to the cell slots.
    fn slot_amplitude(&self, slots: &[u32]) -> f64 {
        let n: u32 = slots.iter().sum();
        let sign_exponent: u32 = self.signed_slots.iter().map(|&s| slots[s]).sum();
        let sign = if sign_exponent % 2 == 0 { 1.0 } else { -1.0 };
        let norm = (-0.5 * n as f64 * (self.base as f64).ln()).exp();
        sign * sqrt_multinomial(slots) * norm
    }

    /// Real amplitude of one Fock ket of the localized state with
    /// N = occ.total(). The occupation must be supported on the cell.
    pub fn amplitude(&self, occ: &OccupationVector) -> Result<f64> {
        if !occ.supported_on(&self.cell_modes) {
            return Err(Error::invalid(format!(
                "{occ} has photons outside the cell modes {:?}",
                self.cell_modes
            )));
        }
        Ok(self.slot_amplitude(&occ.select(&self.cell_modes)))
    }

    /// The N-photon localized state on `basis` (all non-cell modes vacuum).
    pub fn state(&self, n: u32, basis: &Arc<Basis>) -> Result<StateVector> {
        if basis.sector(n).is_none() {
            return Err(Error::invalid(format!(
                "basis does not contain the N = {n} sector"
            )));
        }
        let modes = basis.mode_count();
        if self.cell_modes.iter().any(|&m| m >= modes) {
            return Err(Error::mismatch("cell modes exceed the basis modes"));
        }
        let cell = FockBasis::new(self.cell_modes.len(), n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
        for slots in cell.states() {
            let mut parts = vec![0u32; modes];
            for (&mode, &occ_n) in self.cell_modes.iter().zip(slots.as_slice()) {
                parts[mode] = occ_n;
            }
            let idx = basis
                .index_of(&OccupationVector::new(parts))
                .expect("cell occupation fits the basis sector");
            amps[idx] = Complex64::new(self.slot_amplitude(slots.as_slice()), 0.0);
        }
        let state = StateVector::from_amplitudes(basis.clone(), amps)?;
        state.assert_normalized()?;
        Ok(state)
    }

    /// Spec with all signs dropped: the state the preparation coupler
    /// produces before the phase stage installs the sign pattern.
    pub fn sign_free(&self) -> LocalizedStateSpec {
        LocalizedStateSpec {
            signed_slots: Vec::new(),
            ..self.clone()
        }
    }
}

/// The N-photon localized state on a minimal cell-only basis.
pub fn cell_state(kind: LatticeKind, n: u32) -> Result<StateVector> {
    let spec = cell_spec(kind)?;
    let basis = Basis::fixed(spec.cell_modes.len(), n)?;
    spec.state(n, &basis)
}

/// Checks the two-site coefficient recursion
/// C_{p+1,q} = −√(q+1)/√(p+1) · C_{p,q+1} for all pairs with p+q+1 = N.
pub fn verify_recursion(spec: &LocalizedStateSpec, n: u32) -> Result<bool> {
    if spec.cell_modes.len() != 2 {
        return Err(Error::invalid(
            "the coefficient recursion applies to two-site cells",
        ));
    }
    if n == 0 {
        return Ok(true);
    }
    let c = |p: u32, q: u32| spec.slot_amplitude(&[p, q]);
    for p in 0..n {
        let q = n - 1 - p;
        let lhs = c(p + 1, q);
        let rhs = -((q + 1) as f64).sqrt() / ((p + 1) as f64).sqrt() * c(p, q + 1);
        if (lhs - rhs).abs() > tol::STRICT {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Default truncation for a poissonian superposition: keeps the omitted
/// Poisson tail below 1e-12 for |β| ≤ 3.
pub fn default_poisson_cutoff(beta: Complex64) -> u32 {
    let b = beta.norm();
    20u32.max((b * b + 10.0 * b + 10.0).ceil() as u32)
}

/// Probability weight of the Poisson tail beyond the cutoff.
fn poisson_tail(mean: f64, cutoff: u32) -> f64 {
    // 1 − CDF via the complement of the partial sums in log space
    let mut cdf = 0.0f64;
    for k in 0..=cutoff {
        cdf += (-mean + k as f64 * mean.ln() - ln_factorial(k as u64)).exp();
    }
    (1.0 - cdf).max(0.0)
}

/// Poissonian superposition of localized states,
/// e^{−|β|²/2} Σ_N β^N/√(N!) |ψ_N⟩, renormalized on the truncated basis.
///
/// Fails when the truncated tail Σ_{N>cutoff} e^{−|β|²} |β|^{2N}/N!
/// exceeds 1e-12.
pub fn poissonian_superposition(
    spec: &LocalizedStateSpec,
    beta: Complex64,
    cutoff: u32,
    basis: &Arc<Basis>,
) -> Result<StateVector> {
    if basis.is_fixed() {
        return Err(Error::invalid(
            "poissonian superpositions need a truncated basis",
        ));
    }
    if basis.max_total() < cutoff {
        return Err(Error::invalid(
            "basis truncation is below the requested cutoff",
        ));
    }
    let tail = poisson_tail(beta.norm_sqr(), cutoff);
    if tail > 1e-12 {
        return Err(Error::invalid(format!(
            "cutoff {cutoff} leaves a poisson tail of {tail:.3e} > 1e-12"
        )));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
    for n in 0..=cutoff {
        // β^N / √(N!) in log space to stay finite at large cutoffs
        let ln_mag = n as f64 * beta.norm().ln() - 0.5 * ln_factorial(n as u64);
        let coeff = if beta.norm() == 0.0 {
            if n == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                continue;
            }
        } else {
            let phase = beta / beta.norm();
            phase.powu(n) * ln_mag.exp()
        };
        let psi_n = spec.state(n, basis)?;
        for (a, b) in amps.iter_mut().zip(psi_n.amplitudes()) {
            *a += coeff * b;
        }
    }
    StateVector::new_normalized(basis.clone(), amps)
}

/// Truncated tensor product of single-mode coherent states, renormalized.
pub fn coherent_product(alphas: &[Complex64], basis: &Arc<Basis>) -> Result<StateVector> {
    if basis.is_fixed() {
        return Err(Error::invalid("coherent states need a truncated basis"));
    }
    if alphas.len() != basis.mode_count() {
        return Err(Error::mismatch("one amplitude per mode required"));
    }
    let mut amps = Vec::with_capacity(basis.dim());
    for occ in basis.states() {
        let mut a = Complex64::new(1.0, 0.0);
        for (&n, alpha) in occ.as_slice().iter().zip(alphas) {
            if alpha.norm() == 0.0 {
                if n > 0 {
                    a = Complex64::new(0.0, 0.0);
                    break;
                }
                continue;
            }
            let ln_mag = n as f64 * alpha.norm().ln() - 0.5 * ln_factorial(n as u64);
            a *= (alpha / alpha.norm()).powu(n) * ln_mag.exp();
        }
        amps.push(a);
    }
    StateVector::new_normalized(basis.clone(), amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_interaction, connector_operators};
    use crate::lattice::{build_lattice, Extent};

    fn lattice_for(kind: LatticeKind) -> Lattice {
        let extent = match kind {
            LatticeKind::Lieb => Extent::Grid(2, 2),
            LatticeKind::Kagome => Extent::Grid(3, 3),
            _ => Extent::Chain(3),
        };
        build_lattice(kind, extent, 1.0, 0.0).unwrap()
    }

    const CATALOG: [LatticeKind; 5] = [
        LatticeKind::Rhomboidal,
        LatticeKind::SymmetricRhomboidal,
        LatticeKind::Stub,
        LatticeKind::Lieb,
        LatticeKind::Kagome,
    ];

    #[test]
    fn rhomboidal_edge_amplitudes() {
        let spec = cell_spec(LatticeKind::Rhomboidal).unwrap();
        for n in 1u32..=6 {
            let all_a = OccupationVector::new(vec![n, 0]);
            let all_b = OccupationVector::new(vec![0, n]);
            let expect = 0.5f64.powf(n as f64 / 2.0);
            assert!((spec.amplitude(&all_a).unwrap() - expect).abs() < 1e-15);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((spec.amplitude(&all_b).unwrap() - sign * expect).abs() < 1e-15);
        }
    }

    #[test]
    fn stub_single_photon_amplitudes() {
        // (|100⟩ − |010⟩ + |001⟩)/√3
        let s = cell_state(LatticeKind::Stub, 1).unwrap();
        let r3 = 3.0f64.sqrt().recip();
        assert!((s.amplitude_of(&OccupationVector::new(vec![1, 0, 0])).re - r3).abs() < 1e-15);
        assert!((s.amplitude_of(&OccupationVector::new(vec![0, 1, 0])).re + r3).abs() < 1e-15);
        assert!((s.amplitude_of(&OccupationVector::new(vec![0, 0, 1])).re - r3).abs() < 1e-15);
    }

    #[test]
    fn support_outside_cell_is_rejected() {
        let lat = lattice_for(LatticeKind::Rhomboidal);
        let spec = catalog_spec(&lat).unwrap();
        let mut occ = vec![0u32; lat.site_count()];
        occ[lat.connectors[0]] = 1;
        assert!(spec.amplitude(&OccupationVector::new(occ)).is_err());
    }

    #[test]
    fn vacuum_state_for_every_spec() {
        for kind in CATALOG {
            let s = cell_state(kind, 0).unwrap();
            assert_eq!(s.basis().dim(), 1);
            assert!((s.amplitudes()[0].re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn normalization_holds_for_all_catalog_states() {
        for kind in CATALOG {
            for n in 0u32..=6 {
                let s = cell_state(kind, n).unwrap();
                assert!(
                    (s.norm() - 1.0).abs() < tol::ALGEBRA,
                    "{kind} N={n}: norm {}",
                    s.norm()
                );
            }
        }
    }

    #[test]
    fn kagome_two_photon_amplitude_census() {
        // compositions of 2 photons over the 6 hexagon sites:
        // binom(7,5) = 21 nonzero amplitudes, each ±√(multinomial)/6
        let s = cell_state(LatticeKind::Kagome, 2).unwrap();
        let nonzero: Vec<f64> = s
            .amplitudes()
            .iter()
            .filter(|a| a.norm_sqr() > 0.0)
            .map(|a| a.re)
            .collect();
        assert_eq!(nonzero.len(), 21);
        for a in nonzero {
            let m = a.abs() * 6.0; // √multinomial ∈ {1, √2}
            assert!(
                (m - 1.0).abs() < 1e-12 || (m - 2.0f64.sqrt()).abs() < 1e-12,
                "unexpected magnitude {a}"
            );
        }
    }

    #[test]
    fn orthogonality_across_photon_sectors() {
        // structural: different N live on disjoint sectors of a truncated basis
        let spec = cell_spec(LatticeKind::Stub).unwrap();
        let basis = Basis::truncated(3, 4).unwrap();
        for n in 0u32..=4 {
            for m in 0u32..=4 {
                let a = spec.state(n, &basis).unwrap();
                let b = spec.state(m, &basis).unwrap();
                let ip = a.inner_product(&b).unwrap().norm();
                if n == m {
                    assert!((ip - 1.0).abs() < tol::ALGEBRA);
                } else {
                    assert!(ip < 1e-15);
                }
            }
        }
    }

    #[test]
    fn connectors_annihilate_catalog_states() {
        for kind in CATALOG {
            let lat = lattice_for(kind).localized_fragment().unwrap();
            let spec = catalog_spec(&lat).unwrap();
            for n in 0u32..=4 {
                let basis = Basis::fixed(lat.site_count(), n).unwrap();
                let psi = spec.state(n, &basis).unwrap();
                for op in connector_operators(&lat, &basis).unwrap() {
                    let res = op.apply(&psi).unwrap().norm();
                    assert!(res < tol::ALGEBRA, "{kind} N={n}: residual {res:.2e}");
                }
            }
        }
    }

    #[test]
    fn interaction_eigenvalue_matches_catalog_coefficient() {
        let kappa = 1.7;
        for kind in CATALOG {
            let extent = match kind {
                LatticeKind::Lieb => Extent::Grid(2, 2),
                LatticeKind::Kagome => Extent::Grid(3, 3),
                _ => Extent::Chain(3),
            };
            let lat = build_lattice(kind, extent, kappa, 0.0)
                .unwrap()
                .localized_fragment()
                .unwrap();
            let spec = catalog_spec(&lat).unwrap();
            for n in 0u32..=4 {
                let basis = Basis::fixed(lat.site_count(), n).unwrap();
                let psi = spec.state(n, &basis).unwrap();
                let h = build_interaction(&lat, &basis).unwrap();
                let lambda = spec.fb_coefficient * kappa * n as f64;
                let res = h.eigen_residual(&psi, lambda).unwrap();
                assert!(res < tol::SPECTRAL, "{kind} N={n}: residual {res:.2e}");
            }
        }
    }

    #[test]
    fn recursion_holds_and_detects_sign_flips() {
        let spec = cell_spec(LatticeKind::Rhomboidal).unwrap();
        assert!(verify_recursion(&spec, 1).unwrap());
        assert!(verify_recursion(&spec, 3).unwrap());
        assert!(verify_recursion(&spec, 12).unwrap());
        let unsigned = spec.sign_free();
        assert!(!verify_recursion(&unsigned, 3).unwrap());
        let stub = cell_spec(LatticeKind::Stub).unwrap();
        assert!(verify_recursion(&stub, 2).is_err());
    }

    #[test]
    fn poissonian_beta_zero_is_vacuum() {
        let spec = cell_spec(LatticeKind::Rhomboidal).unwrap();
        let basis = Basis::truncated(2, 20).unwrap();
        let s =
            poissonian_superposition(&spec, Complex64::new(0.0, 0.0), 20, &basis).unwrap();
        assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn poissonian_matches_opposite_phase_coherent_product() {
        // β = √2 α factorizes into |α⟩_A |−α⟩_B
        let alpha = Complex64::new(0.5, 0.0);
        let beta = alpha * 2.0f64.sqrt();
        let spec = cell_spec(LatticeKind::Rhomboidal).unwrap();
        let basis = Basis::truncated(2, 20).unwrap();
        let pois = poissonian_superposition(&spec, beta, 20, &basis).unwrap();
        let prod = coherent_product(&[alpha, -alpha], &basis).unwrap();
        let fid = pois.fidelity(&prod).unwrap();
        assert!(fid >= 1.0 - 1e-10, "fidelity {fid}");
    }

    #[test]
    fn poissonian_stays_annihilated_by_connectors() {
        // linearity over the photon-number sectors
        let lat = lattice_for(LatticeKind::Stub).localized_fragment().unwrap();
        let spec = catalog_spec(&lat).unwrap();
        let cutoff = default_poisson_cutoff(Complex64::new(0.3, 0.0));
        let basis = Basis::truncated(lat.site_count(), cutoff).unwrap();
        let s =
            poissonian_superposition(&spec, Complex64::new(0.3, 0.0), cutoff, &basis).unwrap();
        for op in connector_operators(&lat, &basis).unwrap() {
            let res = op.apply(&s).unwrap().norm();
            assert!(res < tol::SPECTRAL, "residual {res:.2e}");
        }
    }

    #[test]
    fn poisson_cutoff_guard_rejects_small_cutoffs() {
        let spec = cell_spec(LatticeKind::Rhomboidal).unwrap();
        let basis = Basis::truncated(2, 8).unwrap();
        let beta = Complex64::new(2.5, 0.0);
        assert!(poissonian_superposition(&spec, beta, 8, &basis).is_err());
    }

    #[test]
    fn two_disjoint_cells_are_simultaneously_annihilated() {
        // two rhomboidal channels side by side in one four-mode space:
        // cell (0,1) with connector pattern matching cell (2,3)
        use crate::lattice::{Edge, Site};
        let mk_site = |id: usize, label: &str| Site {
            id,
            label: label.into(),
            epsilon: 0.0,
        };
        // diamond: both (0,1) and (2,3) are localized cells for each other
        let lat = Lattice::custom(
            vec![
                mk_site(0, "A"),
                mk_site(1, "B"),
                mk_site(2, "S'"),
                mk_site(3, "S"),
            ],
            vec![
                Edge { i: 0, j: 2, kappa: 1.0 },
                Edge { i: 0, j: 3, kappa: 1.0 },
                Edge { i: 1, j: 2, kappa: 1.0 },
                Edge { i: 1, j: 3, kappa: 1.0 },
            ],
            vec![0, 1],
            vec![2, 3],
        )
        .unwrap();
        let basis = Basis::truncated(4, 3).unwrap();
        let spec_ab = LocalizedStateSpec {
            kind: LatticeKind::Rhomboidal,
            cell_modes: vec![0, 1],
            signed_slots: vec![1],
            base: 2,
            fb_coefficient: 0.0,
        };
        let spec_ss = LocalizedStateSpec {
            cell_modes: vec![2, 3],
            ..spec_ab.clone()
        };
        let h = build_interaction(&lat, &basis).unwrap();
        for spec in [&spec_ab, &spec_ss] {
            for n in 0u32..=3 {
                let psi = spec.state(n, &basis).unwrap();
                let res = h.apply(&psi).unwrap().norm();
                assert!(res < tol::ALGEBRA, "residual {res:.2e}");
            }
        }
    }
}
