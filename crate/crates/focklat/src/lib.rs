//! Exact Fock-space simulation of localized quantum states of light in
//! flat-band photonic lattices.
//!
//! Waveguide arrays whose linear spectrum contains a perfectly flat band
//! support compact states that never diffract: destructive interference
//! cancels every hopping amplitude out of a small group of sites. This
//! crate builds those lattices (rhomboidal, symmetric rhomboidal, stub,
//! Lieb, Kagome), constructs the corresponding N-photon localized states —
//! superpositions of Fock states weighted by signed square roots of
//! multinomial coefficients — and verifies their properties by exact dense
//! and sparse linear algebra:
//!
//! * band structures and flat-band detection ([`lattice`]),
//! * second-quantized sector Hamiltonians and connector operators
//!   ([`hamiltonian`]),
//! * the localized states, their coefficient recursion and poissonian
//!   (coherent-like) superpositions ([`states`]),
//! * propagation along z, phase-only evolution and the on-chip preparation
//!   pipeline ([`evolution`]),
//! * Schmidt spectra, negativity, concurrence, Peres–Horodecki tests and
//!   the monogamy comparison ([`entanglement`]),
//! * photon-loss channels in Kraus form ([`losses`]),
//! * multi-core-fiber crosstalk scenarios ([`scenarios`]).
//!
//! Everything is deterministic: bases enumerate occupation vectors in a
//! documented order, and the CLI (`focklat`) emits byte-stable CSV/JSON.
//! Lengths are expressed in units of the inverse coupling constant 1/κ.

pub mod combinatorics;
pub mod entanglement;
pub mod error;
pub mod evolution;
pub mod fockspace;
mod linalg;
pub mod hamiltonian;
pub mod lattice;
pub mod losses;
pub mod scenarios;
pub mod sparse;
pub mod states;
pub mod tol;

pub use error::{Error, Result};
