//! Propagation along z and the on-chip preparation pipeline.
//!
//! States evolve under U(z) = exp(−iHz). Localized states only pick up the
//! phase e^{−i(ε + λ_int/N·…)Nz}, so their overlap with the initial state
//! stays at modulus one and no population ever reaches a connector site.
//!
//! The preparation coupler feeds a Fock state |N⟩ from one input waveguide
//! into the cell sites through equal couplings. The effective Rabi coupling
//! is √(base)·κ, so all N photons arrive in the sign-free multinomial state
//! at l_c = π/(2√(base)κ) — the same length for every N. A Δβ phase stage
//! then multiplies each Fock component by e^{iΔβℓq} and installs the
//! (−1)^q sign pattern at Δβℓ = π.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fockspace::{Basis, StateVector};
use crate::hamiltonian::{build_interaction, SectorOperator};
use crate::lattice::{Edge, Lattice, LatticeKind, Site};
use crate::linalg;
use crate::sparse::CsrMatrix;
use crate::states::{cell_spec, LocalizedStateSpec};

/// Dimension at which exp(−iHz) switches from a cached dense
/// eigendecomposition to Lanczos stepping. The pure-Rust Hermitian
/// eigensolver crosses over against sparse Lanczos near this size.
pub const EIGEN_DIM_LIMIT: usize = 512;

/// Krylov subspace size per Lanczos step.
const LANCZOS_M: usize = 36;

/// Largest ‖H‖·Δz handled by one Lanczos step.
const LANCZOS_STEP_BUDGET: f64 = 5.0;

/// Reusable exp(−iHz) applier for one Hermitian sector operator.
pub enum Propagator {
    Eigen {
        basis: Arc<Basis>,
        eigenvalues: Vec<f64>,
        eigenvectors: DMatrix<Complex64>,
    },
    Krylov {
        op: SectorOperator,
        norm_bound: f64,
    },
}

impl Propagator {
    /// Picks the method by dimension ([`EIGEN_DIM_LIMIT`]).
    pub fn new(op: &SectorOperator) -> Result<Self> {
        if op.dim() <= EIGEN_DIM_LIMIT {
            Self::eigen(op)
        } else {
            Self::krylov(op)
        }
    }

    pub fn eigen(op: &SectorOperator) -> Result<Self> {
        let (eigenvalues, eigenvectors) = linalg::hermitian_eigen(&op.matrix().to_dense());
        Ok(Propagator::Eigen {
            basis: op.basis().clone(),
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn krylov(op: &SectorOperator) -> Result<Self> {
        Ok(Propagator::Krylov {
            norm_bound: op.matrix().gershgorin_bound().max(f64::MIN_POSITIVE),
            op: op.clone(),
        })
    }

    pub fn basis(&self) -> &Arc<Basis> {
        match self {
            Propagator::Eigen { basis, .. } => basis,
            Propagator::Krylov { op, .. } => op.basis(),
        }
    }

    /// U(z)|state⟩ = exp(−iHz)|state⟩.
    pub fn apply(&self, state: &StateVector, z: f64) -> Result<StateVector> {
        if !self.basis().same_space(state.basis()) {
            return Err(Error::mismatch("state lives on a different basis"));
        }
        match self {
            Propagator::Eigen {
                basis,
                eigenvalues,
                eigenvectors,
            } => {
                let v = DVector::from_column_slice(state.amplitudes());
                let mut w = eigenvectors.adjoint() * v;
                for (wi, &lambda) in w.iter_mut().zip(eigenvalues) {
                    *wi *= Complex64::new(0.0, -lambda * z).exp();
                }
                let out = eigenvectors * w;
                StateVector::from_amplitudes(basis.clone(), out.as_slice().to_vec())
            }
            Propagator::Krylov { op, norm_bound } => {
                let mut amps = state.amplitudes().to_vec();
                let steps = ((z.abs() * norm_bound / LANCZOS_STEP_BUDGET).ceil() as usize).max(1);
                let dz = z / steps as f64;
                for _ in 0..steps {
                    amps = lanczos_step(op.matrix(), &amps, dz, *norm_bound);
                }
                StateVector::from_amplitudes(op.basis().clone(), amps)
            }
        }
    }
}

/// One Lanczos step of exp(−iH·dz)·x with full reorthogonalization.
fn lanczos_step(h: &CsrMatrix, x: &[Complex64], dz: f64, norm_bound: f64) -> Vec<Complex64> {
    let n = h.dim();
    let beta0 = x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if beta0 == 0.0 {
        return x.to_vec();
    }
    let breakdown = 1e-14 * norm_bound.max(1.0);

    let mut vs: Vec<Vec<Complex64>> = Vec::with_capacity(LANCZOS_M);
    vs.push(x.iter().map(|a| a / beta0).collect());
    let mut alphas: Vec<f64> = Vec::with_capacity(LANCZOS_M);
    let mut betas: Vec<f64> = Vec::with_capacity(LANCZOS_M);

    let mut w = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..LANCZOS_M {
        h.matvec_into(&vs[j], &mut w);
        let alpha = vs[j]
            .iter()
            .zip(&w)
            .map(|(v, wi)| (v.conj() * wi).re)
            .sum::<f64>();
        alphas.push(alpha);
        for (wi, v) in w.iter_mut().zip(&vs[j]) {
            *wi -= v * alpha;
        }
        if j > 0 {
            let b = betas[j - 1];
            for (wi, v) in w.iter_mut().zip(&vs[j - 1]) {
                *wi -= v * b;
            }
        }
        // full reorthogonalization keeps the basis clean at these sizes
        for v in &vs {
            let overlap: Complex64 = v.iter().zip(&w).map(|(vi, wi)| vi.conj() * wi).sum();
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= vi * overlap;
            }
        }
        let beta = w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if beta <= breakdown || j + 1 == LANCZOS_M {
            break;
        }
        betas.push(beta);
        vs.push(w.iter().map(|a| a / beta).collect());
    }

    // exponentiate the small real tridiagonal projection
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.symmetric_eigen();
    // coeffs = Q · exp(−i·dz·Λ) · Qᵀ · e₀ · β₀
    let q0: Vec<f64> = (0..m).map(|k| eig.eigenvectors[(0, k)]).collect();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..m {
        let phase = Complex64::new(0.0, -eig.eigenvalues[k] * dz).exp() * q0[k] * beta0;
        for i in 0..m {
            coeffs[i] += phase * eig.eigenvectors[(i, k)];
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (i, v) in vs.iter().enumerate() {
        let c = coeffs[i];
        for (o, vi) in out.iter_mut().zip(v) {
            *o += vi * c;
        }
    }
    out
}

/// exp(−iHz)|state⟩ with the method picked by dimension.
pub fn propagate(op: &SectorOperator, state: &StateVector, z: f64) -> Result<StateVector> {
    Propagator::new(op)?.apply(state, z)
}

/// Per-z record of site populations, fidelity against a reference state
/// (|⟨ref|ψ(z)⟩|²) and leakage (total population on the watch modes).
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub z: Vec<f64>,
    pub site_populations: Vec<Vec<f64>>,
    pub fidelity: Vec<f64>,
    pub leakage: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn max_leakage(&self) -> f64 {
        self.leakage.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_fidelity(&self) -> f64 {
        self.fidelity.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Uniform grid of `steps` points from 0 to `zmax` inclusive.
pub fn z_grid(zmax: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![0.0];
    }
    (0..steps)
        .map(|i| zmax * i as f64 / (steps - 1) as f64)
        .collect()
}

/// Evolves `initial` across an ascending z grid, recording populations,
/// fidelity against `reference` and leakage onto `leak_modes`.
pub fn evolve_trajectory(
    op: &SectorOperator,
    initial: &StateVector,
    reference: &StateVector,
    leak_modes: &[usize],
    zs: &[f64],
) -> Result<Trajectory> {
    if zs.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("z grid must be ascending"));
    }
    let prop = Propagator::new(op)?;
    let mut out = Trajectory {
        z: Vec::with_capacity(zs.len()),
        site_populations: Vec::with_capacity(zs.len()),
        fidelity: Vec::with_capacity(zs.len()),
        leakage: Vec::with_capacity(zs.len()),
    };
    let mut current = initial.clone();
    let mut z_prev = 0.0;
    for &z in zs {
        current = match &prop {
            // sequential stepping re-uses the Krylov work between grid points
            Propagator::Krylov { .. } => prop.apply(&current, z - z_prev)?,
            Propagator::Eigen { .. } => prop.apply(initial, z)?,
        };
        z_prev = z;
        let pops = current.site_populations();
        out.leakage
            .push(leak_modes.iter().map(|&m| pops[m]).sum());
        out.fidelity.push(current.fidelity(reference)?);
        out.site_populations.push(pops);
        out.z.push(z);
    }
    Ok(out)
}

/// Builds Σ_N D_N |ψ_N⟩ on the truncated basis the components embed into.
pub fn stack_sectors(
    components: &[(Complex64, StateVector)],
    basis: &Arc<Basis>,
) -> Result<StateVector> {
    let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
    for (coeff, state) in components {
        let identity_map: Vec<usize> = (0..state.basis().mode_count()).collect();
        let embedded = state.embed_into(basis, &identity_map)?;
        for (a, b) in amps.iter_mut().zip(embedded.amplitudes()) {
            *a += coeff * b;
        }
    }
    StateVector::new_normalized(basis.clone(), amps)
}

/// Evolves a superposition of fixed-N localized states under a Hamiltonian
/// on the stacked (truncated) basis.
pub fn superposition_evolution(
    components: &[(Complex64, StateVector)],
    op: &SectorOperator,
    z: f64,
) -> Result<StateVector> {
    let stacked = stack_sectors(components, op.basis())?;
    propagate(op, &stacked, z)
}

/// Multiplies each Fock component by e^{iΔβ·ℓ·q}, q the occupation of
/// `mode`: the refractive-index phase stage. Δβ·ℓ = π flips the sign of
/// every odd-q component.
pub fn phase_stage(state: &StateVector, mode: usize, delta_beta: f64, length: f64) -> StateVector {
    let mut out = state.clone();
    let basis = state.basis().clone();
    for (occ, amp) in basis.states().iter().zip(out.amplitudes_mut()) {
        let q = occ.get(mode) as f64;
        *amp *= Complex64::new(0.0, delta_beta * length * q).exp();
    }
    out
}

/// z expressed in physical units: with κ given per unit length, a distance
/// of z/κ in normalized units is z/κ length units.
pub fn physical_length(z_in_inverse_kappa: f64, kappa_per_length: f64) -> f64 {
    z_in_inverse_kappa / kappa_per_length
}

/// Outcome of a preparation-coupler scan.
#[derive(Clone, Debug)]
pub struct PreparationResult {
    pub trajectory: Trajectory,
    /// First transfer maximum, refined beyond the grid resolution.
    pub l_c: f64,
    /// Transfer probability at `l_c`.
    pub peak_probability: f64,
    /// Index of the input waveguide in the coupler basis.
    pub input_mode: usize,
    /// Cell-mode indices in catalog order.
    pub cell_modes: Vec<usize>,
}

/// The coupler stage: one input waveguide coupled with equal κ to the cell
/// sites of the target state (A,B for the two-site cell, A,B,C for the
/// stub), nothing else coupled.
pub fn coupler_lattice(kind: LatticeKind, kappa: f64) -> Result<Lattice> {
    let base = match kind {
        LatticeKind::Rhomboidal => 2,
        LatticeKind::Stub => 3,
        other => {
            return Err(Error::UnsupportedLattice(format!(
                "preparation coupler is defined for rhomboidal and stub cells, not {other}"
            )))
        }
    };
    let mut sites = vec![Site {
        id: 0,
        label: "IN".into(),
        epsilon: 0.0,
    }];
    let mut edges = Vec::new();
    for k in 0..base {
        sites.push(Site {
            id: k + 1,
            label: format!("C{k}"),
            epsilon: 0.0,
        });
        edges.push(Edge {
            i: 0,
            j: k + 1,
            kappa,
        });
    }
    Lattice::custom(sites, edges, (1..=base).collect(), vec![0])
}

/// Scans the coupler transfer probability P(z) = |⟨ψ'_N|U(z)|N,0,…⟩|² and
/// finds the first maximum, refined by golden-section search.
pub fn prepare(
    kind: LatticeKind,
    n: u32,
    kappa: f64,
    zmax: f64,
    zsteps: usize,
) -> Result<PreparationResult> {
    if n < 1 {
        return Err(Error::invalid("need at least one photon"));
    }
    let lat = coupler_lattice(kind, kappa)?;
    let modes = lat.site_count();
    let basis = Basis::fixed(modes, n)?;
    let h = build_interaction(&lat, &basis)?;
    let prop = Propagator::new(&h)?;

    // the input Fock state |N⟩ on the input waveguide
    let mut occ = vec![0u32; modes];
    occ[0] = n;
    let initial =
        StateVector::basis_state(basis.clone(), &crate::fockspace::OccupationVector::new(occ))?;

    // the sign-free multinomial target on the cell modes
    let spec = LocalizedStateSpec {
        cell_modes: (1..modes).collect(),
        ..cell_spec(kind)?
    }
    .sign_free();
    let target = spec.state(n, &basis)?;

    let zs = z_grid(zmax, zsteps);
    let trajectory = evolve_trajectory(&h, &initial, &target, &[0], &zs)?;

    // first local maximum of the transfer probability
    let p = &trajectory.fidelity;
    let mut peak_idx = p.len() - 1;
    for i in 1..p.len() - 1 {
        if p[i] >= p[i - 1] && p[i] >= p[i + 1] && p[i] > 0.5 {
            peak_idx = i;
            break;
        }
    }
    let lo = zs[peak_idx.saturating_sub(1)];
    let hi = zs[(peak_idx + 1).min(zs.len() - 1)];
    let eval = |z: f64| -> f64 {
        prop.apply(&initial, z)
            .and_then(|s| s.fidelity(&target))
            .unwrap_or(0.0)
    };
    let (l_c, peak_probability) = golden_section_max(eval, lo, hi, 1e-13);

    Ok(PreparationResult {
        trajectory,
        l_c,
        peak_probability,
        input_mode: 0,
        cell_modes: (1..modes).collect(),
    })
}

/// Golden-section search for the maximum of a unimodal function.
fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}
