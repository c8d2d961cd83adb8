//! Photon loss as an amplitude-damping channel in Kraus form.
//!
//! Loss to a zero-temperature environment with survival probability
//! 1 − γ per photon is the channel ρ ↦ Σ_k E_k ρ E_k† with
//!
//! ```text
//! ⟨n−k| E_k |n⟩ = √( binom(n,k) γ^k (1−γ)^{n−k} )
//! ```
//!
//! which satisfies Σ_k E_k†E_k = 1 exactly (binomial theorem). Applied to
//! both sites of a two-site localized state the channel never leaves the
//! localized family: a_A|ψ_N⟩ = √(N/2)|ψ_{N−1}⟩ and
//! a_B|ψ_N⟩ = −√(N/2)|ψ_{N−1}⟩, and the surviving-photon weight factor is
//! a function of the total photon number only, so each loss branch lands on
//! |ψ_{N−k}⟩ exactly. A qubit encoded as α|ψ_N⟩ + β|ψ_{N+M}⟩ therefore
//! degrades gracefully: conditioned on the number of photons lost, the
//! state remains a pure coherent superposition within the family.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::combinatorics::binomial_f64;
use crate::error::{Error, Result};
use crate::fockspace::{Basis, DensityMatrix, StateVector};
use crate::lattice::LatticeKind;
use crate::states::cell_spec;
use crate::tol;

/// ⟨n−k|E_k|n⟩ for the single-mode damping channel.
fn kraus_coefficient(n: u32, k: u32, gamma: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    (binomial_f64(n as u64, k as u64) * gamma.powi(k as i32) * (1.0 - gamma).powi((n - k) as i32))
        .sqrt()
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::invalid(format!(
            "loss parameter gamma = {gamma} outside [0, 1)"
        )));
    }
    Ok(())
}

/// Single-mode amplitude-damping Kraus operators E_0..E_{n_max} on the
/// truncated number basis {|0⟩..|n_max⟩}.
#[derive(Clone, Debug)]
pub struct KrausSet {
    pub gamma: f64,
    pub n_max: u32,
    pub operators: Vec<DMatrix<Complex64>>,
}

/// Builds the trace-preserving damping channel for one mode.
pub fn kraus_set(gamma: f64, n_max: u32) -> Result<KrausSet> {
    check_gamma(gamma)?;
    let dim = n_max as usize + 1;
    let operators = (0..=n_max)
        .map(|k| {
            DMatrix::from_fn(dim, dim, |r, c| {
                let n = c as u32;
                if r as u32 + k == n {
                    Complex64::new(kraus_coefficient(n, k, gamma), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    Ok(KrausSet {
        gamma,
        n_max,
        operators,
    })
}

impl KrausSet {
    /// max |Σ_k E_k†E_k − 1| entry: zero for a trace-preserving channel.
    pub fn completeness_error(&self) -> f64 {
        let dim = self.n_max as usize + 1;
        let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
        for e in &self.operators {
            acc += e.adjoint() * e;
        }
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc[(i, j)] - Complex64::new(expect, 0.0)).norm());
            }
        }
        worst
    }
}

/// Applies the damping channel to one mode of a multimode state.
pub fn apply_damping(rho: &DensityMatrix, mode: usize, gamma: f64) -> Result<DensityMatrix> {
    check_gamma(gamma)?;
    let basis = rho.basis().clone();
    if basis.is_fixed() {
        return Err(Error::invalid(
            "loss channels need a truncated basis (photon number drops)",
        ));
    }
    if mode >= basis.mode_count() {
        return Err(Error::invalid("mode out of range"));
    }
    let dim = basis.dim();
    let n_max = basis.max_total();
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    // precompute the k-lowered ordinal of every basis state
    let lowered: Vec<Vec<Option<usize>>> = (0..=n_max)
        .map(|k| {
            basis
                .states()
                .iter()
                .map(|occ| {
                    if occ.get(mode) < k {
                        return None;
                    }
                    let mut parts = occ.as_slice().to_vec();
                    parts[mode] -= k;
                    basis.index_of(&crate::fockspace::OccupationVector::new(parts))
                })
                .collect()
        })
        .collect();
    for k in 0..=n_max {
        for i in 0..dim {
            let Some(ti) = lowered[k as usize][i] else {
                continue;
            };
            let ci = kraus_coefficient(basis.occupation(i).get(mode), k, gamma);
            for j in 0..dim {
                let Some(tj) = lowered[k as usize][j] else {
                    continue;
                };
                let v = rho.matrix()[(i, j)];
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let cj = kraus_coefficient(basis.occupation(j).get(mode), k, gamma);
                out[(ti, tj)] += v * ci * cj;
            }
        }
    }
    DensityMatrix::new(basis, out)
}

/// The two-core channel Σ_{k,m} E_m^B E_k^A ρ (E_k^A)†(E_m^B)†: damping on
/// both cores with a common loss parameter, applied as the factorized
/// per-core product.
pub fn apply_two_core_channel(
    rho: &DensityMatrix,
    cores: (usize, usize),
    gamma: f64,
) -> Result<DensityMatrix> {
    let after_a = apply_damping(rho, cores.0, gamma)?;
    apply_damping(&after_a, cores.1, gamma)
}

/// Damping on every listed mode (independent environments, equal γ).
pub fn apply_damping_all(rho: &DensityMatrix, modes: &[usize], gamma: f64) -> Result<DensityMatrix> {
    let mut acc = rho.clone();
    for &m in modes {
        acc = apply_damping(&acc, m, gamma)?;
    }
    Ok(acc)
}

/// Mean photon number Tr(ρ Σ n̂_m).
pub fn mean_photon_number(rho: &DensityMatrix) -> f64 {
    let basis = rho.basis();
    basis
        .states()
        .iter()
        .enumerate()
        .map(|(i, occ)| rho.matrix()[(i, i)].re * occ.total() as f64)
        .sum()
}

/// Right-hand side of the damping master equation for one mode,
/// L(ρ) = κ′ ( a ρ a† − ½{a†a, ρ} ).
pub fn damping_generator(rho: &DensityMatrix, mode: usize, kappa_prime: f64) -> DMatrix<Complex64> {
    let basis = rho.basis();
    let dim = basis.dim();
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        let ni = basis.occupation(i).get(mode);
        for j in 0..dim {
            let v = rho.matrix()[(i, j)];
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let nj = basis.occupation(j).get(mode);
            // anticommutator part
            out[(i, j)] -= 0.5 * kappa_prime * (ni + nj) as f64 * v;
            // jump part a ρ a†
            if ni > 0 && nj > 0 {
                let mut pi = basis.occupation(i).as_slice().to_vec();
                let mut pj = basis.occupation(j).as_slice().to_vec();
                pi[mode] -= 1;
                pj[mode] -= 1;
                let ti = basis
                    .index_of(&crate::fockspace::OccupationVector::new(pi))
                    .expect("lowered state stays in a truncated basis");
                let tj = basis
                    .index_of(&crate::fockspace::OccupationVector::new(pj))
                    .expect("lowered state stays in a truncated basis");
                out[(ti, tj)] += kappa_prime * ((ni * nj) as f64).sqrt() * v;
            }
        }
    }
    out
}

/// One conditional branch of the damped encoded qubit.
#[derive(Clone, Debug, Serialize)]
pub struct LossBranch {
    pub photons_lost: u32,
    /// Probability of losing exactly this many photons.
    pub weight: f64,
    /// Purity of the conditional state; 1 means the branch stays coherent.
    pub purity: f64,
    /// Weight of the conditional state inside span{|ψ_{N−k}⟩, |ψ_{N+M−k}⟩}.
    pub span_fidelity: f64,
    /// |⟨ψ_{N−k}|φ⟩| of the conditional state (0 once the lower rung dies).
    pub low_component: f64,
    /// |⟨ψ_{N+M−k}|φ⟩|.
    pub high_component: f64,
    /// |⟨ψ_{N−k}| ρ |ψ_{N+M−k}⟩| / weight: the surviving off-diagonal
    /// coherence between the two rungs.
    pub coherence: f64,
}

/// Loss analysis of the two-site encoded qubit α|ψ_N⟩ + β|ψ_{N+M}⟩.
#[derive(Clone, Debug, Serialize)]
pub struct LossyQubitReport {
    pub n: u32,
    pub m: u32,
    pub gamma: f64,
    pub branches: Vec<LossBranch>,
}

/// Sends the encoded qubit through the two-core channel and reports every
/// total-loss branch.
pub fn lossy_qubit_report(
    alpha: Complex64,
    beta: Complex64,
    n: u32,
    m: u32,
    gamma: f64,
) -> Result<LossyQubitReport> {
    check_gamma(gamma)?;
    if m < 1 {
        return Err(Error::invalid("the two rungs must differ, M >= 1"));
    }
    if (alpha.norm_sqr() + beta.norm_sqr() - 1.0).abs() > tol::ALGEBRA {
        return Err(Error::invalid("qubit amplitudes must be normalized"));
    }
    let top = n + m;
    let basis = Basis::truncated(2, top)?;
    let spec = cell_spec(LatticeKind::Rhomboidal)?;
    let psi: Vec<StateVector> = (0..=top)
        .map(|j| spec.state(j, &basis))
        .collect::<Result<_>>()?;
    let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
    for (a, b) in amps.iter_mut().zip(psi[n as usize].amplitudes()) {
        *a += alpha * b;
    }
    for (a, b) in amps.iter_mut().zip(psi[top as usize].amplitudes()) {
        *a += beta * b;
    }
    let input = StateVector::new_normalized(basis.clone(), amps)?;

    let dim = basis.dim();
    // conditional (unnormalized) density matrix per total photons lost
    let mut conditional: Vec<DMatrix<Complex64>> =
        (0..=top).map(|_| DMatrix::zeros(dim, dim)).collect();
    for ka in 0..=top {
        for kb in 0..=(top - ka) {
            // branch vector E_kb^B E_ka^A |input⟩
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            for (occ, &a) in basis.states().iter().zip(input.amplitudes()) {
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let (p, q) = (occ.get(0), occ.get(1));
                if p < ka || q < kb {
                    continue;
                }
                let c = kraus_coefficient(p, ka, gamma) * kraus_coefficient(q, kb, gamma);
                let idx = basis
                    .index_of(&crate::fockspace::OccupationVector::new(vec![
                        p - ka,
                        q - kb,
                    ]))
                    .expect("lowered occupation fits");
                v[idx] += a * c;
            }
            let j = (ka + kb) as usize;
            for r in 0..dim {
                if v[r] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..dim {
                    conditional[j][(r, c)] += v[r] * v[c].conj();
                }
            }
        }
    }

    let mut branches = Vec::new();
    for (j, block) in conditional.iter().enumerate() {
        let weight = block.trace().re;
        if weight < 1e-15 {
            continue;
        }
        let purity = {
            let mut acc = 0.0;
            for r in 0..dim {
                for c in 0..dim {
                    acc += (block[(r, c)] * block[(c, r)]).re;
                }
            }
            acc / (weight * weight)
        };
        let low = n as i64 - j as i64;
        let high = top as i64 - j as i64;
        let project = |idx: i64| -> Option<&StateVector> {
            (idx >= 0).then(|| &psi[idx as usize])
        };
        let quad = |a: &StateVector, b: &StateVector| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..dim {
                for c in 0..dim {
                    acc += a.amplitudes()[r].conj() * block[(r, c)] * b.amplitudes()[c];
                }
            }
            acc
        };
        let (mut span, mut low_c, mut coh) = (0.0, 0.0, 0.0);
        let hi_state = project(high).expect("the upper rung survives while weight > 0");
        span += quad(hi_state, hi_state).re;
        let high_c = (quad(hi_state, hi_state).re / weight).max(0.0).sqrt();
        if let Some(lo_state) = project(low) {
            span += quad(lo_state, lo_state).re;
            low_c = (quad(lo_state, lo_state).re / weight).max(0.0).sqrt();
            coh = quad(lo_state, hi_state).norm() / weight;
        }
        branches.push(LossBranch {
            photons_lost: j as u32,
            weight,
            purity,
            span_fidelity: span / weight,
            low_component: low_c,
            high_component: high_c,
            coherence: coh,
        });
    }
    Ok(LossyQubitReport {
        n,
        m,
        gamma,
        branches,
    })
}

/// Tr(P ρ) with P the projector onto the given (orthonormal) states: how
/// much of ρ lives inside their span.
pub fn span_weight(rho: &DensityMatrix, states: &[StateVector]) -> Result<f64> {
    let mut acc = 0.0;
    for s in states {
        acc += rho.expectation(s)?;
    }
    Ok(acc)
}
