//! Finite builders for the catalog lattices.
//!
//! All builders use open boundary conditions. The designated localized cell
//! sits near the middle of the patch so its connectors always exist.

use crate::error::{Error, Result};
use crate::lattice::{Edge, Lattice, LatticeKind, Site, UnitCell};

/// Patch size: a cell count for quasi-1D chains, (rows, cols) for 2D.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extent {
    Chain(usize),
    Grid(usize, usize),
}

impl Extent {
    fn chain(self, kind: LatticeKind) -> Result<usize> {
        match self {
            Extent::Chain(c) => Ok(c),
            Extent::Grid(_, _) => Err(Error::invalid(format!(
                "{kind} takes a cell count, not (rows, cols)"
            ))),
        }
    }

    fn grid(self, kind: LatticeKind) -> Result<(usize, usize)> {
        match self {
            Extent::Grid(r, c) => Ok((r, c)),
            Extent::Chain(_) => Err(Error::invalid(format!("{kind} takes (rows, cols)"))),
        }
    }
}

impl std::str::FromStr for Extent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some((r, c)) = s.split_once('x') {
            let r = r.parse().map_err(|_| Error::invalid("bad extent"))?;
            let c = c.parse().map_err(|_| Error::invalid("bad extent"))?;
            Ok(Extent::Grid(r, c))
        } else {
            Ok(Extent::Chain(
                s.parse().map_err(|_| Error::invalid("bad extent"))?,
            ))
        }
    }
}

/// Builds a finite catalog lattice with its localized cell and connectors
/// tagged. `kind = Custom` is rejected here; use [`Lattice::custom`].
pub fn build_lattice(
    kind: LatticeKind,
    extent: Extent,
    kappa: f64,
    epsilon: f64,
) -> Result<Lattice> {
    if !(kappa > 0.0) {
        return Err(Error::invalid("kappa must be positive"));
    }
    if !epsilon.is_finite() {
        return Err(Error::invalid("epsilon must be finite"));
    }
    match kind {
        LatticeKind::Rhomboidal => rhomboidal(extent.chain(kind)?, kappa, epsilon, false),
        LatticeKind::SymmetricRhomboidal => {
            rhomboidal(extent.chain(kind)?, kappa, epsilon, true)
        }
        LatticeKind::Stub => stub(extent.chain(kind)?, kappa, epsilon),
        LatticeKind::Lieb => lieb(extent.grid(kind)?, kappa, epsilon),
        LatticeKind::Kagome => kagome(extent.grid(kind)?, kappa, epsilon),
        LatticeKind::Custom => Err(Error::UnsupportedLattice(
            "custom lattices are built from explicit site/edge lists".into(),
        )),
    }
}

struct Builder {
    sites: Vec<Site>,
    edges: Vec<Edge>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            sites: Vec::new(),
            edges: Vec::new(),
        }
    }

    fn site(&mut self, label: String, epsilon: f64) -> usize {
        let id = self.sites.len();
        self.sites.push(Site { id, label, epsilon });
        id
    }

    fn edge(&mut self, i: usize, j: usize, kappa: f64) {
        let (i, j) = (i.min(j), i.max(j));
        self.edges.push(Edge { i, j, kappa });
    }

    fn finish(
        self,
        kind: LatticeKind,
        cell_sites: Vec<usize>,
        connectors: Vec<usize>,
        unit_cell: UnitCell,
    ) -> Result<Lattice> {
        let lat = Lattice {
            kind,
            sites: self.sites,
            edges: self.edges,
            cell_sites,
            connectors,
            unit_cell: Some(unit_cell),
        };
        lat.validate()?;
        Ok(lat)
    }
}

/// Diamond chain: cell {A, B, S}; S couples A and B of its own and the next
/// cell. The symmetric variant adds the A–B edge inside every cell.
fn rhomboidal(cells: usize, kappa: f64, epsilon: f64, symmetric: bool) -> Result<Lattice> {
    if cells < 1 {
        return Err(Error::invalid("need at least 1 cell"));
    }
    let mut b = Builder::new();
    let mut a_ids = Vec::new();
    let mut b_ids = Vec::new();
    let mut s_ids = Vec::new();
    for j in 0..cells {
        a_ids.push(b.site(format!("A{j}"), epsilon));
        b_ids.push(b.site(format!("B{j}"), epsilon));
        s_ids.push(b.site(format!("S{j}"), epsilon));
    }
    for j in 0..cells {
        b.edge(s_ids[j], a_ids[j], kappa);
        b.edge(s_ids[j], b_ids[j], kappa);
        if j + 1 < cells {
            b.edge(s_ids[j], a_ids[j + 1], kappa);
            b.edge(s_ids[j], b_ids[j + 1], kappa);
        }
        if symmetric {
            b.edge(a_ids[j], b_ids[j], kappa);
        }
    }
    let m = cells / 2;
    let mut connectors = Vec::new();
    if m > 0 {
        connectors.push(s_ids[m - 1]);
    }
    connectors.push(s_ids[m]);
    let kind = if symmetric {
        LatticeKind::SymmetricRhomboidal
    } else {
        LatticeKind::Rhomboidal
    };
    b.finish(
        kind,
        vec![a_ids[m], b_ids[m]],
        connectors,
        UnitCell {
            labels: vec!["A".into(), "B".into(), "S".into()],
            offsets: vec![[0.0, 0.5], [0.0, -0.5], [0.5, 0.0]],
        },
    )
}

/// Stub chain: cell {A, B, S} with A dangling on the hub S and B bridging
/// S to the next hub. The localized cell spans A_m, B_m, A_{m+1} with the
/// two hubs S_m, S_{m+1} as connectors.
fn stub(cells: usize, kappa: f64, epsilon: f64) -> Result<Lattice> {
    if cells < 2 {
        return Err(Error::invalid("need at least 2 cells"));
    }
    let mut b = Builder::new();
    let mut a_ids = Vec::new();
    let mut b_ids = Vec::new();
    let mut s_ids = Vec::new();
    for j in 0..cells {
        a_ids.push(b.site(format!("A{j}"), epsilon));
        b_ids.push(b.site(format!("B{j}"), epsilon));
        s_ids.push(b.site(format!("S{j}"), epsilon));
    }
    for j in 0..cells {
        b.edge(s_ids[j], a_ids[j], kappa);
        b.edge(s_ids[j], b_ids[j], kappa);
        if j + 1 < cells {
            b.edge(b_ids[j], s_ids[j + 1], kappa);
        }
    }
    let m = (cells - 1) / 2;
    b.finish(
        LatticeKind::Stub,
        vec![a_ids[m], b_ids[m], a_ids[m + 1]],
        vec![s_ids[m], s_ids[m + 1]],
        UnitCell {
            labels: vec!["A".into(), "B".into(), "S".into()],
            offsets: vec![[0.0, 0.5], [0.5, 0.0], [0.0, 0.0]],
        },
    )
}

/// Lieb lattice: corner sites N(x,y) plus edge-center sites EX(x,y) and
/// EY(x,y). The localized cell is the four edge centers around one square
/// plaquette; the four corner sites of that plaquette are the connectors.
fn lieb((rows, cols): (usize, usize), kappa: f64, epsilon: f64) -> Result<Lattice> {
    if rows < 2 || cols < 2 {
        return Err(Error::invalid("need at least 2x2 cells"));
    }
    let mut b = Builder::new();
    let mut corner = vec![vec![0usize; cols]; rows];
    let mut ex = vec![vec![0usize; cols]; rows];
    let mut ey = vec![vec![0usize; cols]; rows];
    for y in 0..rows {
        for x in 0..cols {
            corner[y][x] = b.site(format!("N{x},{y}"), epsilon);
            ex[y][x] = b.site(format!("EX{x},{y}"), epsilon);
            ey[y][x] = b.site(format!("EY{x},{y}"), epsilon);
        }
    }
    for y in 0..rows {
        for x in 0..cols {
            b.edge(corner[y][x], ex[y][x], kappa);
            b.edge(corner[y][x], ey[y][x], kappa);
            if x + 1 < cols {
                b.edge(ex[y][x], corner[y][x + 1], kappa);
            }
            if y + 1 < rows {
                b.edge(ey[y][x], corner[y + 1][x], kappa);
            }
        }
    }
    let x0 = ((cols - 1) / 2).min(cols - 2);
    let y0 = ((rows - 1) / 2).min(rows - 2);
    // loop order A (bottom), B (right), C (top), D (left): signs sit on B, D
    let cell = vec![ex[y0][x0], ey[y0][x0 + 1], ex[y0 + 1][x0], ey[y0][x0]];
    let connectors = vec![
        corner[y0][x0],
        corner[y0][x0 + 1],
        corner[y0 + 1][x0],
        corner[y0 + 1][x0 + 1],
    ];
    b.finish(
        LatticeKind::Lieb,
        cell,
        connectors,
        UnitCell {
            labels: vec!["N".into(), "EX".into(), "EY".into()],
            offsets: vec![[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]],
        },
    )
}

/// Kagome lattice of corner-sharing triangles, lattice vectors
/// a1 = (1, 0), a2 = (1/2, √3/2); sites a(R), b(R) = R + a1/2,
/// c(R) = R + a2/2. The localized cell is the hexagon around one void,
/// listed cyclically so signs alternate; the six triangle apexes touching
/// the hexagon are the connectors.
fn kagome((rows, cols): (usize, usize), kappa: f64, epsilon: f64) -> Result<Lattice> {
    if rows < 3 || cols < 3 {
        return Err(Error::invalid("need at least 3x3 cells"));
    }
    let mut b = Builder::new();
    let mut a = vec![vec![0usize; cols]; rows];
    let mut bb = vec![vec![0usize; cols]; rows];
    let mut cc = vec![vec![0usize; cols]; rows];
    // index (m, n) means the cell at m*a1 + n*a2
    for n in 0..rows {
        for m in 0..cols {
            a[n][m] = b.site(format!("a{m},{n}"), epsilon);
            bb[n][m] = b.site(format!("b{m},{n}"), epsilon);
            cc[n][m] = b.site(format!("c{m},{n}"), epsilon);
        }
    }
    for n in 0..rows {
        for m in 0..cols {
            b.edge(a[n][m], bb[n][m], kappa);
            b.edge(a[n][m], cc[n][m], kappa);
            b.edge(bb[n][m], cc[n][m], kappa);
            if m + 1 < cols {
                b.edge(bb[n][m], a[n][m + 1], kappa);
            }
            if n + 1 < rows {
                b.edge(cc[n][m], a[n + 1][m], kappa);
            }
            if m + 1 < cols && n > 0 {
                b.edge(bb[n][m], cc[n - 1][m + 1], kappa);
            }
        }
    }
    let m0 = ((cols - 1) / 2).clamp(1, cols - 2);
    let n0 = ((rows - 1) / 2).clamp(1, rows - 2);
    // hexagon around the void at R0 + (a1+a2)/2, in cyclic order
    let cell = vec![
        cc[n0][m0],
        a[n0 + 1][m0],
        bb[n0 + 1][m0],
        cc[n0][m0 + 1],
        a[n0][m0 + 1],
        bb[n0][m0],
    ];
    // apex of the triangle carrying each hexagon edge
    let connectors = vec![
        bb[n0 + 1][m0 - 1],
        cc[n0 + 1][m0],
        a[n0 + 1][m0 + 1],
        bb[n0][m0 + 1],
        cc[n0 - 1][m0 + 1],
        a[n0][m0],
    ];
    b.finish(
        LatticeKind::Kagome,
        cell,
        connectors,
        UnitCell {
            labels: vec!["a".into(), "b".into(), "c".into()],
            offsets: vec![[0.0, 0.0], [0.5, 0.0], [0.25, 0.4330127018922193]],
        },
    )
}
