//! Ground states for the one-level and nearest-neighbour couplings.
//!
//! The energy decomposes over cells (a vertex and its two children), and a
//! cell can only take four energy values. A configuration is a ground state
//! in an open coupling region exactly when every cell attains the minimum
//! of those four values.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{volume_size, Vertex};
use crate::spins::{cell_energy, hamiltonian_kronecker, BoundaryKind, CellConfig, Configuration, CouplingSet, Spin};
use crate::tolerances::ENERGY;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegionB {
    B1,
    B2,
    B3,
    B4,
    Boundary,
}

impl RegionB {
    /// Cell class realising the minimum energy in this region.
    pub fn cell_class(self) -> Option<u8> {
        match self {
            RegionB::B1 => Some(1),
            RegionB::B2 => Some(2),
            RegionB::B3 => Some(3),
            RegionB::B4 => Some(4),
            RegionB::Boundary => None,
        }
    }
}

impl std::fmt::Display for RegionB {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegionB::B1 => "B1",
            RegionB::B2 => "B2",
            RegionB::B3 => "B3",
            RegionB::B4 => "B4",
            RegionB::Boundary => "boundary",
        };
        f.write_str(s)
    }
}

/// The four possible cell energies `[U1, U2, U3, U4]`.
pub fn cell_energy_levels(j: &CouplingSet) -> [f64; 4] {
    [-2.0 * j.nearest - j.one_level, -j.nearest, -j.one_level, 0.0]
}

pub fn classify_couplings(j: &CouplingSet) -> RegionB {
    let (jo, jn) = (j.one_level, j.nearest);
    let near_zero = |x: f64| x.abs() <= ENERGY;
    if near_zero(jn) {
        return RegionB::Boundary;
    }
    if jn > 0.0 {
        if near_zero(jn + jo) {
            RegionB::Boundary
        } else if jn + jo > 0.0 {
            RegionB::B1
        } else {
            RegionB::B2
        }
    } else if near_zero(jo) {
        RegionB::Boundary
    } else if jo > 0.0 {
        RegionB::B3
    } else {
        RegionB::B4
    }
}

/// 1: all equal; 2: the origin matches exactly one child; 3: children
/// equal and differ from the origin; 4: all different.
pub fn classify_cell(c: &CellConfig) -> u8 {
    let (r, a, b) = (c.root, c.left, c.right);
    if a == b {
        if r == a {
            1
        } else {
            3
        }
    } else if r == a || r == b {
        2
    } else {
        4
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum GroundStateSpec {
    Constant(Spin),
    /// Root `i`; every left child `i`, every right child `j`.
    Quasi(Spin, Spin),
    /// Level `l` carries `word[l mod k]`.
    Periodic(Vec<Spin>),
}

/// Neighbouring letters differ, including the last and the first.
fn cyclically_proper(w: &[Spin]) -> bool {
    w.windows(2).all(|p| p[0] != p[1]) && w.first() != w.last()
}

impl GroundStateSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            GroundStateSpec::Constant(_) => Ok(()),
            GroundStateSpec::Quasi(i, j) if i == j => {
                Err(Error::InvalidParameter("quasi-periodic spec needs two distinct states".into()))
            }
            GroundStateSpec::Quasi(..) => Ok(()),
            GroundStateSpec::Periodic(w) => {
                if w.len() < 2 {
                    return Err(Error::InvalidParameter("periodic word needs at least two letters".into()));
                }
                if !cyclically_proper(w) {
                    return Err(Error::InvalidParameter("periodic word has equal adjacent letters, counting wrap-around".into()));
                }
                Ok(())
            }
        }
    }
}

pub fn build_ground_state(spec: &GroundStateSpec, depth: usize) -> Result<Configuration> {
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be at least one".into()));
    }
    spec.validate()?;
    let c = match spec {
        GroundStateSpec::Constant(m) => Configuration::from_fn(depth, BoundaryKind::Free, |_| *m),
        GroundStateSpec::Quasi(i, j) => Configuration::from_fn(depth, BoundaryKind::Free, |x| match x.word().last() {
            Some(2) => *j,
            _ => *i,
        }),
        GroundStateSpec::Periodic(w) => {
            Configuration::from_fn(depth, BoundaryKind::Free, |x| w[x.level() % w.len()])
        }
    };
    Ok(c)
}

/// Spins of the cell with origin at heap index `k`.
fn cell_at(c: &Configuration, k: usize) -> CellConfig {
    let s = c.spins();
    CellConfig { root: s[k], left: s[2 * k + 1], right: s[2 * k + 2] }
}

fn cell_origins(c: &Configuration) -> std::ops::Range<usize> {
    origins(c.depth())
}

/// Heap indices of the vertices whose children lie inside depth `depth`.
fn origins(depth: usize) -> std::ops::Range<usize> {
    if depth == 0 {
        0..0
    } else {
        0..volume_size(depth - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundStateVerdict {
    pub is_ground_state: bool,
    pub region: RegionB,
    /// Origin of the first cell (heap order) that misses the minimum.
    pub first_violation: Option<Vertex>,
}

pub fn verify_ground_state(c: &Configuration, j: &CouplingSet) -> Result<GroundStateVerdict> {
    let region = classify_couplings(j);
    let Some(target) = region.cell_class() else {
        return Err(Error::OnBoundary(format!("couplings {j:?}")));
    };
    let first_violation = cell_origins(c).find(|&k| classify_cell(&cell_at(c, k)) != target).map(Vertex::from_heap_index);
    Ok(GroundStateVerdict { is_ground_state: first_violation.is_none(), region, first_violation })
}

/// `E(sigma) - E(phi)` as a sum over cells, checked against the pair sum.
pub fn relative_hamiltonian(sigma: &Configuration, phi: &Configuration, j: &CouplingSet) -> Result<f64> {
    if sigma.depth() != phi.depth() {
        return Err(Error::InvalidParameter("configurations have different depths".into()));
    }
    let cells: f64 = cell_origins(sigma)
        .map(|k| cell_energy(&cell_at(sigma, k), j) - cell_energy(&cell_at(phi, k), j))
        .sum();
    let planar = CouplingSet { prolonged: 0.0, ..*j };
    let free = |c: &Configuration| Configuration::new(c.depth(), c.spins().to_vec(), BoundaryKind::Free);
    let pairs = hamiltonian_kronecker(&free(sigma)?, &planar) - hamiltonian_kronecker(&free(phi)?, &planar);
    if (cells - pairs).abs() > 1e-9 * (1.0 + cells.abs()) {
        return Err(Error::Numerical(format!("cell sum {cells} disagrees with pair sum {pairs}")));
    }
    Ok(cells)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    TranslationInvariant,
    Quasi,
    /// Level-periodic words of the given length.
    Periodic(usize),
}

/// Every spec of a family.
pub fn family_specs(family: Family) -> Vec<GroundStateSpec> {
    match family {
        Family::TranslationInvariant => Spin::ALL.iter().map(|&m| GroundStateSpec::Constant(m)).collect(),
        Family::Quasi => Spin::ALL
            .iter()
            .flat_map(|&i| Spin::ALL.iter().filter(move |&&j| j != i).map(move |&j| GroundStateSpec::Quasi(i, j)))
            .collect(),
        Family::Periodic(k) => {
            let mut out = Vec::new();
            if k < 2 {
                return out;
            }
            for code in 0..3usize.pow(k as u32) {
                let mut w = Vec::with_capacity(k);
                let mut c = code;
                for _ in 0..k {
                    w.push(Spin::ALL[c % 3]);
                    c /= 3;
                }
                w.reverse();
                if cyclically_proper(&w) {
                    out.push(GroundStateSpec::Periodic(w));
                }
            }
            out
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundStateCount {
    pub family: Family,
    pub depth: usize,
    pub checked: usize,
    pub verified: Vec<GroundStateSpec>,
}

impl GroundStateCount {
    pub fn count(&self) -> usize {
        self.verified.len()
    }
}

/// Builds every member of `family` at `depth` and keeps those that verify
/// as ground states for couplings in `region`.
pub fn count_ground_states(region: RegionB, depth: usize, family: Family) -> Result<GroundStateCount> {
    let j = representative_couplings(region)?;
    let specs = family_specs(family);
    let mut verified = Vec::new();
    for spec in &specs {
        let c = build_ground_state(spec, depth)?;
        if verify_ground_state(&c, &j)?.is_ground_state {
            verified.push(spec.clone());
        }
    }
    Ok(GroundStateCount { family, depth, checked: specs.len(), verified })
}

/// A coupling point strictly inside the region.
pub fn representative_couplings(region: RegionB) -> Result<CouplingSet> {
    let (jo, jn) = match region {
        RegionB::B1 => (1.0, 1.0),
        RegionB::B2 => (-3.0, 1.0),
        RegionB::B3 => (1.0, -1.0),
        RegionB::B4 => {
            return Err(Error::Unsupported("region B4 has a continuum of ground states and no finite family".into()))
        }
        RegionB::Boundary => return Err(Error::OnBoundary("no representative point".into())),
    };
    CouplingSet::new(jo, 0.0, jn)
}

/// A random configuration in which every cell has three distinct states.
pub fn random_tricolor<R: Rng>(depth: usize, rng: &mut R) -> Configuration {
    let mut spins = vec![Spin::S1; volume_size(depth)];
    spins[0] = Spin::ALL[rng.gen_range(0..3)];
    for k in origins(depth) {
        let r = spins[k].index();
        let (a, b) = ((r + 1) % 3, (r + 2) % 3);
        let (l, rr) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
        spins[2 * k + 1] = Spin::ALL[l];
        spins[2 * k + 2] = Spin::ALL[rr];
    }
    Configuration::new(depth, spins, BoundaryKind::Free).expect("sizes agree")
}
