//! Spin values, coupling constants and Hamiltonians.
//!
//! The three spin states are unit vectors in the plane at mutual angles of
//! 120 degrees, so `s · s = 1` and `s · t = -1/2` for `s != t`. Couplings are
//! specified in the Kronecker normalisation (`-J δ(s, t)` per pair); the
//! equivalent vector couplings are two thirds of those.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::lattice::{neighbor_pairs, volume_size, PairKind, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spin {
    S1,
    S2,
    S3,
}

impl Spin {
    pub const ALL: [Spin; 3] = [Spin::S1, Spin::S2, Spin::S3];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Spin> {
        Spin::ALL
            .get(i)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("spin index {i} out of range")))
    }

    /// Planar coordinates of the spin vector.
    pub fn cartesian(self) -> [f64; 2] {
        let h = 3f64.sqrt() / 2.0;
        match self {
            Spin::S1 => [1.0, 0.0],
            Spin::S2 => [-0.5, h],
            Spin::S3 => [-0.5, -h],
        }
    }
}

impl std::fmt::Display for Spin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.index() + 1)
    }
}

#[inline]
pub fn kronecker(a: Spin, b: Spin) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Scalar product of two spin vectors.
#[inline]
pub fn spin_dot(a: Spin, b: Spin) -> f64 {
    if a == b {
        1.0
    } else {
        -0.5
    }
}

/// Scalar product of a field with a spin vector.
pub fn field_dot(h: &Field, s: Spin) -> f64 {
    h.projections()[s.index()]
}

/// A permutation of the three spin states, stored as images of `S1, S2, S3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinPermutation([Spin; 3]);

impl SpinPermutation {
    pub fn new(images: [Spin; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for s in images {
            seen[s.index()] = true;
        }
        if seen.iter().all(|&b| b) {
            Ok(SpinPermutation(images))
        } else {
            Err(Error::InvalidParameter("spin images do not form a permutation".into()))
        }
    }

    pub fn identity() -> Self {
        SpinPermutation(Spin::ALL)
    }

    /// Exchange of two states.
    pub fn transposition(a: Spin, b: Spin) -> Self {
        let mut images = Spin::ALL;
        images.swap(a.index(), b.index());
        SpinPermutation(images)
    }

    pub fn all() -> [SpinPermutation; 6] {
        use Spin::*;
        [[S1, S2, S3], [S1, S3, S2], [S2, S1, S3], [S2, S3, S1], [S3, S1, S2], [S3, S2, S1]].map(SpinPermutation)
    }

    pub fn apply(&self, s: Spin) -> Spin {
        self.0[s.index()]
    }

    pub fn inverse(&self) -> Self {
        let mut images = Spin::ALL;
        for s in Spin::ALL {
            images[self.apply(s).index()] = s;
        }
        SpinPermutation(images)
    }
}

/// Coupling constants in the Kronecker normalisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSet {
    /// Between the two children of a vertex.
    pub one_level: f64,
    /// Between a vertex and its grandchildren.
    pub prolonged: f64,
    /// Between a vertex and its children.
    pub nearest: f64,
}

impl CouplingSet {
    pub fn new(one_level: f64, prolonged: f64, nearest: f64) -> Result<Self> {
        for (name, v) in [("one-level", one_level), ("prolonged", prolonged), ("nearest", nearest)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} coupling must be finite")));
            }
        }
        Ok(CouplingSet { one_level, prolonged, nearest })
    }

    /// One-level coupling in the vector normalisation.
    pub fn vector_one_level(&self) -> f64 {
        2.0 * self.one_level / 3.0
    }

    /// Nearest-neighbour coupling in the vector normalisation.
    pub fn vector_nearest(&self) -> f64 {
        2.0 * self.nearest / 3.0
    }

    pub fn coupling(&self, kind: PairKind) -> f64 {
        match kind {
            PairKind::Nearest => self.nearest,
            PairKind::OneLevel => self.one_level,
            PairKind::Prolonged => self.prolonged,
        }
    }
}

/// Inverse temperature together with the Boltzmann factors
/// `theta = exp(beta * one_level)`, `theta_p = exp(beta * prolonged)` and
/// `theta1 = exp(beta * nearest)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoltzmannParams {
    couplings: CouplingSet,
    beta: f64,
    theta: f64,
    theta_p: f64,
    theta1: f64,
}

impl BoltzmannParams {
    pub fn new(couplings: CouplingSet, beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be positive and finite, got {beta}")));
        }
        let theta = (beta * couplings.one_level).exp();
        let theta_p = (beta * couplings.prolonged).exp();
        let theta1 = (beta * couplings.nearest).exp();
        for (name, t) in [("theta", theta), ("theta_p", theta_p), ("theta1", theta1)] {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} = {t} is not a positive finite number")));
            }
        }
        Ok(BoltzmannParams { couplings, beta, theta, theta_p, theta1 })
    }

    /// Parameters given directly by their Boltzmann factors. The inverse
    /// temperature is fixed to one and the couplings are the logarithms.
    pub fn from_thetas(theta: f64, theta_p: f64, theta1: f64) -> Result<Self> {
        for (name, t) in [("theta", theta), ("theta_p", theta_p), ("theta1", theta1)] {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {t}")));
            }
        }
        let couplings = CouplingSet { one_level: theta.ln(), prolonged: theta_p.ln(), nearest: theta1.ln() };
        Ok(BoltzmannParams { couplings, beta: 1.0, theta, theta_p, theta1 })
    }

    pub fn couplings(&self) -> &CouplingSet {
        &self.couplings
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn theta_p(&self) -> f64 {
        self.theta_p
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    /// Same couplings at another inverse temperature.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        BoltzmannParams::new(self.couplings, beta)
    }

    /// Same parameters with the prolonged coupling switched off.
    pub fn without_prolonged(&self) -> Self {
        let mut p = *self;
        p.couplings.prolonged = 0.0;
        p.theta_p = 1.0;
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryKind {
    /// No spins outside the volume.
    Free,
    /// Every spin outside the volume equals the given state.
    Const(Spin),
    /// Field weights `exp(h · s)` on the outermost level of the volume.
    Field(Field),
}

/// A spin assignment on levels `0..=depth`, stored in heap order.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    depth: usize,
    spins: Vec<Spin>,
    boundary: BoundaryKind,
}

impl Configuration {
    pub fn new(depth: usize, spins: Vec<Spin>, boundary: BoundaryKind) -> Result<Self> {
        if spins.len() != volume_size(depth) {
            return Err(Error::InvalidParameter(format!(
                "expected {} spins for depth {depth}, got {}",
                volume_size(depth),
                spins.len()
            )));
        }
        Ok(Configuration { depth, spins, boundary })
    }

    pub fn from_fn(depth: usize, boundary: BoundaryKind, mut f: impl FnMut(&Vertex) -> Spin) -> Self {
        let spins = (0..volume_size(depth)).map(|i| f(&Vertex::from_heap_index(i))).collect();
        Configuration { depth, spins, boundary }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    pub fn boundary(&self) -> BoundaryKind {
        self.boundary
    }

    pub fn get(&self, x: &Vertex) -> Option<Spin> {
        self.spins.get(x.heap_index()).copied()
    }

    pub fn set(&mut self, x: &Vertex, s: Spin) -> Result<()> {
        let i = x.heap_index();
        match self.spins.get_mut(i) {
            Some(slot) => {
                *slot = s;
                Ok(())
            }
            None => Err(Error::InvalidParameter(format!("vertex {x} outside depth {}", self.depth))),
        }
    }

    /// Spin at `x`, falling back to the boundary value outside the volume.
    fn spin_or_boundary(&self, x: &Vertex) -> Option<Spin> {
        if x.level() <= self.depth {
            self.get(x)
        } else if let BoundaryKind::Const(s) = self.boundary {
            Some(s)
        } else {
            None
        }
    }
}

/// Kronecker-form Hamiltonian of a finite configuration, including the
/// crossing pairs when the boundary is constant.
pub fn hamiltonian_kronecker(c: &Configuration, j: &CouplingSet) -> f64 {
    let mut pairs = neighbor_pairs(c.depth, false);
    if matches!(c.boundary, BoundaryKind::Const(_)) {
        pairs.extend(neighbor_pairs(c.depth, true));
    }
    let mut e = 0.0;
    for p in pairs {
        let (Some(a), Some(b)) = (c.spin_or_boundary(&p.a), c.spin_or_boundary(&p.b)) else {
            continue;
        };
        e -= j.coupling(p.kind) * kronecker(a, b);
    }
    e
}

/// Vector-form Hamiltonian `-J Σ s·t` (one-level) `- J1 Σ s·t` (nearest).
/// Only defined without the prolonged coupling.
pub fn hamiltonian_vector(c: &Configuration, j: &CouplingSet) -> Result<f64> {
    if j.prolonged != 0.0 {
        return Err(Error::Unsupported("vector Hamiltonian requires a zero prolonged coupling".into()));
    }
    let mut pairs = neighbor_pairs(c.depth, false);
    if matches!(c.boundary, BoundaryKind::Const(_)) {
        pairs.extend(neighbor_pairs(c.depth, true));
    }
    let mut e = 0.0;
    for p in pairs {
        let (Some(a), Some(b)) = (c.spin_or_boundary(&p.a), c.spin_or_boundary(&p.b)) else {
            continue;
        };
        let coupling = match p.kind {
            PairKind::Nearest => j.vector_nearest(),
            PairKind::OneLevel => j.vector_one_level(),
            PairKind::Prolonged => 0.0,
        };
        e -= coupling * spin_dot(a, b);
    }
    Ok(e)
}

/// Spins on an elementary cell: a vertex and its two children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellConfig {
    pub root: Spin,
    pub left: Spin,
    pub right: Spin,
}

/// Energy of a cell: the two nearest bonds and the one-level bond.
pub fn cell_energy(cell: &CellConfig, j: &CouplingSet) -> f64 {
    -j.one_level * kronecker(cell.left, cell.right)
        - j.nearest * (kronecker(cell.root, cell.left) + kronecker(cell.root, cell.right))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_products() {
        for a in Spin::ALL {
            for b in Spin::ALL {
                let [x1, y1] = a.cartesian();
                let [x2, y2] = b.cartesian();
                assert!((x1 * x2 + y1 * y2 - spin_dot(a, b)).abs() < 1e-15);
                assert_eq!(spin_dot(a, b), 1.5 * kronecker(a, b) - 0.5);
            }
        }
    }

    #[test]
    fn field_projections() {
        let h = Field::new(0.7, -0.2);
        assert!((field_dot(&h, Spin::S1) - (0.7 + 0.1)).abs() < 1e-15);
        assert!((field_dot(&h, Spin::S2) - (-0.35 - 0.2)).abs() < 1e-15);
        assert!((field_dot(&h, Spin::S3) + 0.25).abs() < 1e-15);
    }

    #[test]
    fn params_construction() {
        let j = CouplingSet::new(1.0, 0.5, 2.0).unwrap();
        let p = BoltzmannParams::new(j, 0.3).unwrap();
        assert!((p.theta() - 0.3f64.exp()).abs() < 1e-15);
        assert!((p.theta1() - 0.6f64.exp()).abs() < 1e-15);
        assert!(BoltzmannParams::new(j, 0.0).is_err());
        assert!(BoltzmannParams::from_thetas(1.0, -1.0, 2.0).is_err());
        let q = BoltzmannParams::from_thetas(3.0, 1.0, 2.0).unwrap();
        assert_eq!(q.beta(), 1.0);
        assert!((q.couplings().nearest - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn vector_and_kronecker_differ_by_constant() {
        let j = CouplingSet::new(0.8, 0.0, -1.3).unwrap();
        let c1 = Configuration::from_fn(2, BoundaryKind::Const(Spin::S2), |v| Spin::ALL[v.heap_index() % 3]);
        let c2 = Configuration::from_fn(2, BoundaryKind::Const(Spin::S2), |v| Spin::ALL[(v.heap_index() * 7 + 1) % 3]);
        let d1 = hamiltonian_vector(&c1, &j).unwrap() - hamiltonian_kronecker(&c1, &j);
        let d2 = hamiltonian_vector(&c2, &j).unwrap() - hamiltonian_kronecker(&c2, &j);
        assert!((d1 - d2).abs() < 1e-12);
        let jp = CouplingSet::new(0.8, 0.1, -1.3).unwrap();
        assert!(hamiltonian_vector(&c1, &jp).is_err());
    }

    #[test]
    fn cell_energy_values() {
        let j = CouplingSet::new(0.4, 0.0, 1.1).unwrap();
        let c = |r, l, rr| cell_energy(&CellConfig { root: r, left: l, right: rr }, &j);
        use Spin::*;
        assert!((c(S1, S1, S1) - (-2.2 - 0.4)).abs() < 1e-15);
        assert!((c(S1, S1, S2) + 1.1).abs() < 1e-15);
        assert!((c(S1, S2, S2) + 0.4).abs() < 1e-15);
        assert_eq!(c(S1, S2, S3), 0.0);
    }

    #[test]
    fn permutations() {
        let all = SpinPermutation::all();
        for p in all {
            for s in Spin::ALL {
                assert_eq!(p.inverse().apply(p.apply(s)), s);
            }
        }
        assert!(SpinPermutation::new([Spin::S1, Spin::S1, Spin::S2]).is_err());
        let t = SpinPermutation::transposition(Spin::S1, Spin::S3);
        assert_eq!(t.apply(Spin::S1), Spin::S3);
        assert_eq!(t.apply(Spin::S2), Spin::S2);
    }
}
