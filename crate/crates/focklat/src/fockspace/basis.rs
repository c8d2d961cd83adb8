//! Occupation-number bases for multimode bosonic Fock spaces.
//!
//! [`FockBasis`] enumerates every distribution of a fixed total photon
//! number over a set of modes; [`TruncatedFockBasis`] stacks all totals
//! 0..=N_max grouped by total in ascending order. Within a sector,
//! occupation vectors are ordered descending-lexicographically with mode 0
//! most significant, so ordinals are reproducible across runs and machines.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::combinatorics::composition_count;
use crate::error::{Error, Result};

/// Photon counts per mode; the label of the Fock ket |n_0, n_1, ...⟩.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn new(occ: Vec<u32>) -> Self {
        OccupationVector(occ)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mode_count(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Occupations at the listed modes, in list order.
    pub fn select(&self, modes: &[usize]) -> Vec<u32> {
        modes.iter().map(|&m| self.0[m]).collect()
    }

    /// True when every mode outside `modes` is empty.
    pub fn supported_on(&self, modes: &[usize]) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(m, &n)| n == 0 || modes.contains(&m))
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

impl fmt::Debug for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Guard against runaway basis sizes; desk-scale problems stay far below.
const MAX_BASIS_DIM: u128 = 4_000_000;

fn compositions_desc(modes: usize, total: u32) -> Vec<OccupationVector> {
    fn fill(out: &mut Vec<OccupationVector>, cur: &mut Vec<u32>, mode: usize, remaining: u32) {
        if mode + 1 == cur.len() {
            cur[mode] = remaining;
            out.push(OccupationVector(cur.clone()));
            cur[mode] = 0;
            return;
        }
        for n in (0..=remaining).rev() {
            cur[mode] = n;
            fill(out, cur, mode + 1, remaining - n);
        }
        cur[mode] = 0;
    }

    let mut out = Vec::with_capacity(composition_count(total, modes as u32) as usize);
    let mut cur = vec![0u32; modes];
    fill(&mut out, &mut cur, 0, total);
    out
}

fn check_modes(modes: usize) -> Result<()> {
    if modes == 0 {
        return Err(Error::invalid("mode count must be at least 1"));
    }
    Ok(())
}

fn check_dim(dim: u128) -> Result<usize> {
    if dim > MAX_BASIS_DIM {
        return Err(Error::DimensionLimit(format!(
            "basis would contain {dim} states (limit {MAX_BASIS_DIM})"
        )));
    }
    Ok(dim as usize)
}

/// All occupation vectors with a fixed total photon number.
#[derive(Clone)]
pub struct FockBasis {
    modes: usize,
    total: u32,
    states: Vec<OccupationVector>,
    index: HashMap<OccupationVector, usize>,
}

impl FockBasis {
    pub fn new(modes: usize, total: u32) -> Result<Self> {
        check_modes(modes)?;
        check_dim(composition_count(total, modes as u32))?;
        let states = compositions_desc(modes, total);
        let index = states
            .iter()
            .enumerate()
            .map(|(i, occ)| (occ.clone(), i))
            .collect();
        Ok(FockBasis {
            modes,
            total,
            states,
            index,
        })
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn mode_count(&self) -> usize {
        self.modes
    }

    pub fn states(&self) -> &[OccupationVector] {
        &self.states
    }

    pub fn index_of(&self, occ: &OccupationVector) -> Option<usize> {
        self.index.get(occ).copied()
    }
}

/// Union of the fixed-N bases for all N = 0..=max_total, ascending by N.
#[derive(Clone)]
pub struct TruncatedFockBasis {
    modes: usize,
    max_total: u32,
    states: Vec<OccupationVector>,
    index: HashMap<OccupationVector, usize>,
    offsets: Vec<usize>,
}

impl TruncatedFockBasis {
    pub fn new(modes: usize, max_total: u32) -> Result<Self> {
        check_modes(modes)?;
        let dim: u128 = (0..=max_total)
            .map(|n| composition_count(n, modes as u32))
            .sum();
        check_dim(dim)?;
        let mut states = Vec::with_capacity(dim as usize);
        let mut offsets = Vec::with_capacity(max_total as usize + 2);
        for n in 0..=max_total {
            offsets.push(states.len());
            states.extend(compositions_desc(modes, n));
        }
        offsets.push(states.len());
        let index = states
            .iter()
            .enumerate()
            .map(|(i, occ)| (occ.clone(), i))
            .collect();
        Ok(TruncatedFockBasis {
            modes,
            max_total,
            states,
            index,
            offsets,
        })
    }

    pub fn max_total(&self) -> u32 {
        self.max_total
    }

    pub fn mode_count(&self) -> usize {
        self.modes
    }

    pub fn states(&self) -> &[OccupationVector] {
        &self.states
    }

    pub fn index_of(&self, occ: &OccupationVector) -> Option<usize> {
        self.index.get(occ).copied()
    }

    /// Ordinal range of the fixed-N sector.
    pub fn sector(&self, n: u32) -> Option<Range<usize>> {
        if n > self.max_total {
            return None;
        }
        Some(self.offsets[n as usize]..self.offsets[n as usize + 1])
    }
}

/// Either basis flavor, shared behind an `Arc` by states and operators.
#[derive(Clone)]
pub enum Basis {
    Fixed(FockBasis),
    Truncated(TruncatedFockBasis),
}

/// Structural identifier: two bases with equal keys enumerate identical
/// state lists, so values living on them are interoperable.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BasisKey {
    pub fixed: bool,
    pub modes: usize,
    pub total: u32,
}

impl Basis {
    pub fn fixed(modes: usize, total: u32) -> Result<Arc<Basis>> {
        Ok(Arc::new(Basis::Fixed(FockBasis::new(modes, total)?)))
    }

    pub fn truncated(modes: usize, max_total: u32) -> Result<Arc<Basis>> {
        Ok(Arc::new(Basis::Truncated(TruncatedFockBasis::new(
            modes, max_total,
        )?)))
    }

    pub fn mode_count(&self) -> usize {
        match self {
            Basis::Fixed(b) => b.modes,
            Basis::Truncated(b) => b.modes,
        }
    }

    pub fn dim(&self) -> usize {
        self.states().len()
    }

    pub fn states(&self) -> &[OccupationVector] {
        match self {
            Basis::Fixed(b) => &b.states,
            Basis::Truncated(b) => &b.states,
        }
    }

    pub fn occupation(&self, ordinal: usize) -> &OccupationVector {
        &self.states()[ordinal]
    }

    pub fn index_of(&self, occ: &OccupationVector) -> Option<usize> {
        match self {
            Basis::Fixed(b) => b.index.get(occ).copied(),
            Basis::Truncated(b) => b.index.get(occ).copied(),
        }
    }

    /// Largest total photon number representable (N itself for fixed-N).
    pub fn max_total(&self) -> u32 {
        match self {
            Basis::Fixed(b) => b.total,
            Basis::Truncated(b) => b.max_total,
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, Basis::Fixed(_))
    }

    /// Ordinal range of the fixed-n block.
    pub fn sector(&self, n: u32) -> Option<Range<usize>> {
        match self {
            Basis::Fixed(b) => (n == b.total).then(|| 0..b.states.len()),
            Basis::Truncated(b) => b.sector(n),
        }
    }

    pub fn key(&self) -> BasisKey {
        BasisKey {
            fixed: self.is_fixed(),
            modes: self.mode_count(),
            total: self.max_total(),
        }
    }

    pub fn same_space(&self, other: &Basis) -> bool {
        self.key() == other.key()
    }
}

/// All weak compositions of `total_photons` into `mode_count` parts,
/// deterministically ordered.
pub fn enumerate_basis(mode_count: usize, total_photons: u32) -> Result<FockBasis> {
    FockBasis::new(mode_count, total_photons)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_modes() {
        assert!(FockBasis::new(0, 3).is_err());
        assert!(TruncatedFockBasis::new(0, 3).is_err());
    }

    #[test]
    fn single_photon_two_modes() {
        let b = FockBasis::new(2, 1).unwrap();
        assert_eq!(b.states.len(), 2);
        assert_eq!(b.states[0].as_slice(), &[1, 0]);
        assert_eq!(b.states[1].as_slice(), &[0, 1]);
    }

    #[test]
    fn vacuum_only() {
        let b = FockBasis::new(3, 0).unwrap();
        assert_eq!(b.states.len(), 1);
        assert_eq!(b.states[0].as_slice(), &[0, 0, 0]);
    }

    #[test]
    fn four_modes_two_photons_counts() {
        // stars and bars gives binom(5,3) = 10; cross-check by brute force
        let b = FockBasis::new(4, 2).unwrap();
        let mut brute = 0usize;
        for a in 0..=2u32 {
            for c in 0..=2u32 {
                for d in 0..=2u32 {
                    for e in 0..=2u32 {
                        if a + c + d + e == 2 {
                            brute += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(brute, 10);
        assert_eq!(b.states.len(), brute);
    }

    #[test]
    fn ordering_is_descending_lex_mode0_most_significant() {
        let b = FockBasis::new(3, 4).unwrap();
        for w in b.states.windows(2) {
            assert!(w[0] > w[1], "{} !> {}", w[0], w[1]);
        }
        assert_eq!(b.states[0].as_slice(), &[4, 0, 0]);
        assert_eq!(b.states.last().unwrap().as_slice(), &[0, 0, 4]);
    }

    #[test]
    fn index_map_is_bijective() {
        let b = Basis::fixed(4, 3).unwrap();
        for (i, occ) in b.states().iter().enumerate() {
            assert_eq!(b.index_of(occ), Some(i));
        }
        assert_eq!(
            b.dim() as u128,
            composition_count(3, 4),
            "size must equal stars-and-bars count"
        );
    }

    #[test]
    fn truncated_sectors_ascend_and_cover() {
        let b = TruncatedFockBasis::new(3, 4).unwrap();
        let total: usize = (0..=4u32)
            .map(|n| composition_count(n, 3) as usize)
            .sum();
        assert_eq!(b.states.len(), total);
        for n in 0..=4u32 {
            let r = b.sector(n).unwrap();
            for occ in &b.states[r] {
                assert_eq!(occ.total(), n);
            }
        }
        assert!(b.sector(5).is_none());
    }

    #[test]
    fn truncated_blocks_match_fixed_bases() {
        let t = TruncatedFockBasis::new(3, 5).unwrap();
        for n in 0..=5u32 {
            let f = FockBasis::new(3, n).unwrap();
            let r = t.sector(n).unwrap();
            assert_eq!(&t.states[r], &f.states[..]);
        }
    }
}
