//! JSON schema for bases and states:
//! `{modes, total, kind, amplitudes: [{occ: [..], re, im}]}`.
//!
//! `kind` is `"fixed"` for a fixed-total basis and `"truncated"` for the
//! stacked 0..=total basis; `total` is the (maximum) photon number. Zero
//! amplitudes are omitted; entries are sorted by basis ordinal.


use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::basis::{Basis, OccupationVector};
use crate::fockspace::state::StateVector;

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct AmplitudeJson {
    pub occ: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct StateJson {
    pub modes: usize,
    pub total: u32,
    pub kind: String,
    pub amplitudes: Vec<AmplitudeJson>,
}

impl StateJson {
    pub fn from_state(state: &StateVector) -> Self {
        let basis = state.basis();
        let amplitudes = basis
            .states()
            .iter()
            .zip(state.amplitudes())
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(occ, a)| AmplitudeJson {
                occ: occ.as_slice().to_vec(),
                re: a.re,
                im: a.im,
            })
            .collect();
        StateJson {
            modes: basis.mode_count(),
            total: basis.max_total(),
            kind: if basis.is_fixed() { "fixed" } else { "truncated" }.to_string(),
            amplitudes,
        }
    }

    pub fn into_state(self) -> Result<StateVector> {
        let basis: std::sync::Arc<Basis> = match self.kind.as_str() {
            "fixed" => Basis::fixed(self.modes, self.total)?,
            "truncated" => Basis::truncated(self.modes, self.total)?,
            other => return Err(Error::invalid(format!("unknown basis kind {other:?}"))),
        };
        let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
        for entry in self.amplitudes {
            if entry.occ.len() != self.modes {
                return Err(Error::invalid("occupation length differs from mode count"));
            }
            let occ = OccupationVector::new(entry.occ);
            let idx = basis
                .index_of(&occ)
                .ok_or_else(|| Error::invalid(format!("{occ} outside the declared basis")))?;
            amps[idx] = Complex64::new(entry.re, entry.im);
        }
        StateVector::from_amplitudes(basis, amps)
    }
}

pub fn state_to_json(state: &StateVector) -> Result<String> {
    Ok(serde_json::to_string_pretty(&StateJson::from_state(state))?)
}

pub fn state_from_json(text: &str) -> Result<StateVector> {
    let parsed: StateJson = serde_json::from_str(text)?;
    parsed.into_state()
}
