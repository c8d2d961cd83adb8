//! Multimode bosonic Fock spaces: bases, pure states, density matrices,
//! ladder operators, partial trace and partial transposition.
//!
//! Everything is exact dense linear algebra at desk scale. State equality is
//! always judged modulo a global phase (compare |⟨a|b⟩|, never components),
//! because propagation attaches physical global phases.

pub mod basis;
pub mod density;
pub mod serial;
pub mod state;

pub use basis::{enumerate_basis, Basis, BasisKey, FockBasis, OccupationVector, TruncatedFockBasis};
pub use density::{DensityMatrix, PartialTranspose};
pub use serial::{state_from_json, state_to_json, StateJson};
pub use state::{Ladder, StateVector};
