//! Lattice geometries with flat bands, and their finite realizations.
//!
//! Each catalog lattice designates one localized-state cell (the sites a
//! compact flat-band state occupies) and tags its connector sites — the
//! neighbors into which all hopping amplitude cancels by destructive
//! interference. Couplings κ and propagation constants ε carry units of
//! inverse length; frequencies are reported relative to ε, which only
//! offsets the spectrum.

pub mod bloch;
pub mod catalog;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bloch::{bloch_bands, flat_band_frequency, BandStructure, KGrid};
pub use catalog::{build_lattice, Extent};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize, Hash)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    Rhomboidal,
    SymmetricRhomboidal,
    Stub,
    Lieb,
    Kagome,
    Custom,
}

impl std::fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            LatticeKind::Rhomboidal => "rhomboidal",
            LatticeKind::SymmetricRhomboidal => "symmetric-rhomboidal",
            LatticeKind::Stub => "stub",
            LatticeKind::Lieb => "lieb",
            LatticeKind::Kagome => "kagome",
            LatticeKind::Custom => "custom",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for LatticeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rhomboidal" | "diamond" => Ok(LatticeKind::Rhomboidal),
            "symmetric-rhomboidal" | "symmetric_rhomboidal" => {
                Ok(LatticeKind::SymmetricRhomboidal)
            }
            "stub" => Ok(LatticeKind::Stub),
            "lieb" => Ok(LatticeKind::Lieb),
            "kagome" => Ok(LatticeKind::Kagome),
            "custom" => Ok(LatticeKind::Custom),
            other => Err(Error::UnsupportedLattice(format!("unknown kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Site {
    pub id: usize,
    pub label: String,
    #[serde(rename = "eps")]
    pub epsilon: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub kappa: f64,
}

/// Unit-cell metadata for the periodic parent of a finite lattice.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnitCell {
    pub labels: Vec<String>,
    pub offsets: Vec<[f64; 2]>,
}

/// A finite lattice with a designated localized-state cell.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lattice {
    pub kind: LatticeKind,
    pub sites: Vec<Site>,
    /// Undirected couplings, each pair stored once with i < j.
    pub edges: Vec<Edge>,
    /// Sites the localized state occupies, in the catalog's sign order.
    pub cell_sites: Vec<usize>,
    /// Sites adjacent to the cell into which hopping cancels.
    pub connectors: Vec<usize>,
    #[serde(rename = "cell")]
    pub unit_cell: Option<UnitCell>,
}

impl Lattice {
    /// Validating constructor for custom lattices.
    pub fn custom(
        sites: Vec<Site>,
        edges: Vec<Edge>,
        cell_sites: Vec<usize>,
        connectors: Vec<usize>,
    ) -> Result<Lattice> {
        let lat = Lattice {
            kind: LatticeKind::Custom,
            sites,
            edges,
            cell_sites,
            connectors,
            unit_cell: None,
        };
        lat.validate()?;
        Ok(lat)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.sites.len();
        if n == 0 {
            return Err(Error::invalid("lattice has no sites"));
        }
        for (i, s) in self.sites.iter().enumerate() {
            if s.id != i {
                return Err(Error::invalid("site ids must be 0..n in order"));
            }
            if !s.epsilon.is_finite() {
                return Err(Error::invalid("propagation constants must be finite"));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for e in &self.edges {
            if e.i >= n || e.j >= n || e.i == e.j {
                return Err(Error::invalid("edge endpoints out of range"));
            }
            if !(e.kappa > 0.0) {
                return Err(Error::invalid("couplings must be positive"));
            }
            let key = (e.i.min(e.j), e.i.max(e.j));
            if !seen.insert(key) {
                return Err(Error::invalid("duplicate edge"));
            }
        }
        for &s in self.cell_sites.iter().chain(&self.connectors) {
            if s >= n {
                return Err(Error::invalid("tagged site out of range"));
            }
        }
        if self
            .connectors
            .iter()
            .any(|c| self.cell_sites.contains(c))
        {
            return Err(Error::invalid(
                "connector set must be disjoint from the cell",
            ));
        }
        Ok(())
    }

    pub fn site_count(&self) -> usize {
        self.sites.len()
    }

    pub fn neighbors(&self, site: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for e in &self.edges {
            if e.i == site {
                out.push(e.j);
            } else if e.j == site {
                out.push(e.i);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn degree(&self, site: usize) -> usize {
        self.neighbors(site).len()
    }

    pub fn epsilons(&self) -> Vec<f64> {
        self.sites.iter().map(|s| s.epsilon).collect()
    }

    /// Index of a site by label.
    pub fn site_by_label(&self, label: &str) -> Option<usize> {
        self.sites.iter().position(|s| s.label == label)
    }

    /// The sub-lattice spanned by the localized cell and its connectors,
    /// with tags preserved. The compact state is an exact eigenstate of any
    /// lattice containing this fragment, so it is the cheapest faithful
    /// arena for Fock-space checks.
    pub fn localized_fragment(&self) -> Result<Lattice> {
        let mut keep: Vec<usize> = self
            .cell_sites
            .iter()
            .chain(&self.connectors)
            .copied()
            .collect();
        keep.sort_unstable();
        keep.dedup();
        let mut remap = vec![usize::MAX; self.sites.len()];
        let mut sites = Vec::with_capacity(keep.len());
        for (new_id, &old) in keep.iter().enumerate() {
            remap[old] = new_id;
            let mut s = self.sites[old].clone();
            s.id = new_id;
            sites.push(s);
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| remap[e.i] != usize::MAX && remap[e.j] != usize::MAX)
            .map(|e| Edge {
                i: remap[e.i],
                j: remap[e.j],
                kappa: e.kappa,
            })
            .collect();
        let lat = Lattice {
            kind: self.kind,
            sites,
            edges,
            cell_sites: self.cell_sites.iter().map(|&s| remap[s]).collect(),
            connectors: self.connectors.iter().map(|&s| remap[s]).collect(),
            unit_cell: self.unit_cell.clone(),
        };
        lat.validate()?;
        Ok(lat)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Lattice> {
        let lat: Lattice = serde_json::from_str(text)?;
        lat.validate()?;
        Ok(lat)
    }
}
