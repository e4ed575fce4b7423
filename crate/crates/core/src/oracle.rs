//! Brute-force enumeration over every spin configuration of a finite volume.
//!
//! This module never touches the recursion. Vertices are visited in heap
//! order; each new vertex contributes its bonds to the parent, the
//! grandparent and (for a right child) the left sibling, plus a site weight
//! carrying the boundary condition. Sums are taken depth-first, so each
//! partial sum adds three positive terms and the rounding error grows only
//! with the number of vertices.

use serde::Serialize;

use crate::error::{check_depth, Error, Result};
use crate::exec::Execution;
use crate::field::Field;
use crate::lattice::volume_size;
use crate::spins::{
    field_dot, kronecker, spin_dot, BoltzmannParams, BoundaryKind, Configuration, CouplingSet, Spin,
};
use crate::sum::neumaier;
use crate::tolerances::ENERGY;

/// Largest depth accepted by the enumeration routines.
pub const MAX_DEPTH: usize = 3;

/// Default cap on the number of stored minimisers.
pub const MINIMIZER_CAP: usize = 10_000;

/// Pair and site weights for a finite volume of the tree.
#[derive(Debug, Clone)]
pub(crate) struct TreeWeights {
    n_vertices: usize,
    nearest: [[f64; 3]; 3],
    one_level: [[f64; 3]; 3],
    prolonged: [[f64; 3]; 3],
    site: Vec<[f64; 3]>,
}

fn pair_table(f: impl Fn(Spin, Spin) -> f64) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for a in Spin::ALL {
        for b in Spin::ALL {
            t[a.index()][b.index()] = f(a, b);
        }
    }
    t
}

impl TreeWeights {
    /// Kronecker weights `theta^δ`, `theta_p^δ`, `theta1^δ` with a free or
    /// constant boundary. A constant boundary `k` contributes
    /// `theta1^(2δ(s,k))` on the last level and `theta_p^(4δ(s,k))` one level
    /// above it.
    pub(crate) fn kronecker(n: usize, boundary: &BoundaryKind, p: &BoltzmannParams) -> Result<Self> {
        let nv = volume_size(n);
        let mut site = vec![[1.0; 3]; nv];
        match *boundary {
            BoundaryKind::Free => {}
            BoundaryKind::Const(k) => {
                for (i, w) in site.iter_mut().enumerate() {
                    let level = usize::BITS as usize - 1 - (i + 1).leading_zeros() as usize;
                    for s in Spin::ALL {
                        let d = kronecker(s, k);
                        if level == n {
                            w[s.index()] *= p.theta1().powf(2.0 * d);
                        }
                        if n >= 1 && level == n - 1 {
                            w[s.index()] *= p.theta_p().powf(4.0 * d);
                        }
                    }
                }
            }
            BoundaryKind::Field(_) => {
                return Err(Error::Unsupported("field boundaries use the vector weights".into()));
            }
        }
        let (t, tp, t1) = (p.theta(), p.theta_p(), p.theta1());
        Ok(TreeWeights {
            n_vertices: nv,
            nearest: pair_table(|a, b| if a == b { t1 } else { 1.0 }),
            one_level: pair_table(|a, b| if a == b { t } else { 1.0 }),
            prolonged: pair_table(|a, b| if a == b { tp } else { 1.0 }),
            site,
        })
    }

    /// Vector weights `exp(beta J s·t)` with field weights `exp(h·s)` on the
    /// last level. `leaf_fields` lists one field per leaf in heap order.
    pub(crate) fn vector(n: usize, p: &BoltzmannParams, leaf_fields: &[Field]) -> Result<Self> {
        if p.couplings().prolonged != 0.0 {
            return Err(Error::Unsupported("field boundaries require a zero prolonged coupling".into()));
        }
        if leaf_fields.len() != 1 << n {
            return Err(Error::InvalidParameter(format!("expected {} leaf fields, got {}", 1 << n, leaf_fields.len())));
        }
        let nv = volume_size(n);
        let first_leaf = (1 << n) - 1;
        let mut site = vec![[1.0; 3]; nv];
        for (k, h) in leaf_fields.iter().enumerate() {
            for s in Spin::ALL {
                site[first_leaf + k][s.index()] = field_dot(h, s).exp();
            }
        }
        let bj = p.beta() * p.couplings().vector_one_level();
        let bj1 = p.beta() * p.couplings().vector_nearest();
        Ok(TreeWeights {
            n_vertices: nv,
            nearest: pair_table(|a, b| (bj1 * spin_dot(a, b)).exp()),
            one_level: pair_table(|a, b| (bj * spin_dot(a, b)).exp()),
            prolonged: [[1.0; 3]; 3],
            site,
        })
    }

    /// Weight picked up by vertex `k` taking state `s`, given earlier vertices.
    #[inline]
    fn local(&self, k: usize, s: usize, spins: &[u8]) -> f64 {
        let mut w = self.site[k][s];
        if k > 0 {
            let parent = (k - 1) / 2;
            w *= self.nearest[s][spins[parent] as usize];
            if k % 2 == 0 {
                w *= self.one_level[s][spins[k - 1] as usize];
            }
            if parent > 0 {
                w *= self.prolonged[s][spins[(parent - 1) / 2] as usize];
            }
        }
        w
    }

    /// Sum over all states of vertices `k..` with the earlier ones fixed.
    fn sum_from(&self, k: usize, spins: &mut [u8]) -> f64 {
        if k == self.n_vertices {
            return 1.0;
        }
        let mut acc = 0.0;
        for s in 0..3 {
            let w = self.local(k, s, spins);
            spins[k] = s as u8;
            acc += w * self.sum_from(k + 1, spins);
        }
        acc
    }

    /// Weight of a complete assignment.
    pub(crate) fn weight(&self, spins: &[u8]) -> f64 {
        (0..self.n_vertices).map(|k| self.local(k, spins[k] as usize, spins)).product()
    }

    /// For every assignment of the first `m` vertices (base-3 index, vertex
    /// 0 most significant) the total weight of its extensions.
    pub(crate) fn prefix_sums(&self, m: usize, exec: Execution) -> Vec<f64> {
        let m = m.min(self.n_vertices);
        exec.map_range(3usize.pow(m as u32), |code| {
            let mut spins = vec![0u8; self.n_vertices];
            decode(code, m, &mut spins);
            let head: f64 = (0..m).map(|k| self.local(k, spins[k] as usize, &spins)).product();
            head * self.sum_from(m, &mut spins)
        })
    }

    pub(crate) fn total(&self, exec: Execution) -> f64 {
        neumaier(self.prefix_sums(3.min(self.n_vertices), exec))
    }
}

/// Writes the base-3 digits of `code` into `spins[..m]`.
pub(crate) fn decode(mut code: usize, m: usize, spins: &mut [u8]) {
    for k in (0..m).rev() {
        spins[k] = (code % 3) as u8;
        code /= 3;
    }
}

/// Partition function of a finite volume, split by the spins on levels 0 and 1.
#[derive(Debug, Clone, Serialize)]
pub struct EnumerationResult {
    pub depth: usize,
    /// Indexed by `9 a + 3 b + c` for root `a`, left child `b`, right child `c`.
    pub components: [f64; 27],
    pub total: f64,
}

impl EnumerationResult {
    pub fn component(&self, root: Spin, left: Spin, right: Spin) -> f64 {
        self.components[9 * root.index() + 3 * left.index() + right.index()]
    }

    /// Sum over children for each root state.
    pub fn root_sums(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (a, slot) in out.iter_mut().enumerate() {
            *slot = neumaier(self.components[9 * a..9 * a + 9].iter().copied());
        }
        out
    }
}

/// Exact partition function by enumeration, Kronecker form, free or constant
/// boundary. Depth `1..=3`.
pub fn enumerate_partition(n: usize, boundary: BoundaryKind, p: &BoltzmannParams) -> Result<EnumerationResult> {
    enumerate_partition_with(n, boundary, p, Execution::default())
}

pub fn enumerate_partition_with(
    n: usize,
    boundary: BoundaryKind,
    p: &BoltzmannParams,
    exec: Execution,
) -> Result<EnumerationResult> {
    check_depth(n, 1, MAX_DEPTH)?;
    let w = TreeWeights::kronecker(n, &boundary, p)?;
    let sums = w.prefix_sums(3, exec);
    let mut components = [0.0; 27];
    components.copy_from_slice(&sums);
    let total = neumaier(components.iter().copied());
    if !total.is_finite() {
        return Err(Error::Numerical("partition function overflowed".into()));
    }
    Ok(EnumerationResult { depth: n, components, total })
}

/// Partition function with leaf field weights and vector couplings.
pub fn enumerate_field_partition(n: usize, h: &Field, p: &BoltzmannParams) -> Result<f64> {
    check_depth(n, 0, MAX_DEPTH)?;
    let leaves = vec![*h; 1 << n];
    Ok(TreeWeights::vector(n, p, &leaves)?.total(Execution::default()))
}

/// Boltzmann weight `exp(-beta H)` of one configuration, Kronecker form.
pub fn configuration_weight(c: &Configuration, p: &BoltzmannParams) -> f64 {
    (-p.beta() * crate::spins::hamiltonian_kronecker(c, p.couplings())).exp()
}

#[derive(Debug, Clone)]
pub struct MinEnergyResult {
    pub energy: f64,
    /// Number of minimisers found, including any beyond the cap.
    pub count: usize,
    pub minimizers: Vec<Configuration>,
    pub truncated: bool,
}

/// All free-boundary configurations of minimal Kronecker energy, depth
/// `1..=3`. At most `cap` minimisers are stored; `count` is always exact.
pub fn enumerate_min_energy(n: usize, j: &CouplingSet, cap: usize) -> Result<MinEnergyResult> {
    check_depth(n, 1, MAX_DEPTH)?;
    let nv = volume_size(n);
    let mut state = MinSearch { j: *j, nv, best: f64::INFINITY, count: 0, stored: Vec::new(), cap };
    let mut spins = vec![0u8; nv];
    state.visit(0, 0.0, &mut spins);
    let minimizers = state
        .stored
        .iter()
        .map(|s| {
            let spins = s.iter().map(|&x| Spin::ALL[x as usize]).collect();
            Configuration::new(n, spins, BoundaryKind::Free)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MinEnergyResult { energy: state.best, count: state.count, truncated: state.count > minimizers.len(), minimizers })
}

struct MinSearch {
    j: CouplingSet,
    nv: usize,
    best: f64,
    count: usize,
    stored: Vec<Vec<u8>>,
    cap: usize,
}

impl MinSearch {
    fn visit(&mut self, k: usize, energy: f64, spins: &mut [u8]) {
        if k == self.nv {
            let tol = ENERGY * (1.0 + energy.abs());
            if energy < self.best - tol {
                self.best = energy;
                self.count = 0;
                self.stored.clear();
            }
            if (energy - self.best).abs() <= tol {
                self.count += 1;
                if self.stored.len() < self.cap {
                    self.stored.push(spins.to_vec());
                }
            }
            return;
        }
        for s in 0..3u8 {
            let mut e = energy;
            if k > 0 {
                let parent = (k - 1) / 2;
                if spins[parent] == s {
                    e -= self.j.nearest;
                }
                if k % 2 == 0 && spins[k - 1] == s {
                    e -= self.j.one_level;
                }
                if parent > 0 && spins[(parent - 1) / 2] == s {
                    e -= self.j.prolonged;
                }
            }
            spins[k] = s;
            self.visit(k + 1, e, spins);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spins::hamiltonian_kronecker;

    fn all_configs(n: usize, boundary: BoundaryKind) -> Vec<Configuration> {
        let nv = volume_size(n);
        (0..3usize.pow(nv as u32))
            .map(|code| {
                let mut s = vec![0u8; nv];
                decode(code, nv, &mut s);
                Configuration::new(n, s.iter().map(|&x| Spin::ALL[x as usize]).collect(), boundary).unwrap()
            })
            .collect()
    }

    #[test]
    fn matches_hamiltonian_sum() {
        let p = BoltzmannParams::from_thetas(1.7, 0.6, 2.3).unwrap();
        for boundary in [BoundaryKind::Free, BoundaryKind::Const(Spin::S2)] {
            for n in 1..=2 {
                let direct = neumaier(all_configs(n, boundary).iter().map(|c| configuration_weight(c, &p)));
                let fast = enumerate_partition(n, boundary, &p).unwrap().total;
                assert!((direct - fast).abs() / direct < 1e-13, "{boundary:?} n={n}");
            }
        }
    }

    #[test]
    fn depth_one_free_components() {
        let (t, t1) = (1.9, 2.7);
        let p = BoltzmannParams::from_thetas(t, 1.4, t1).unwrap();
        let r = enumerate_partition(1, BoundaryKind::Free, &p).unwrap();
        for a in Spin::ALL {
            for b in Spin::ALL {
                for c in Spin::ALL {
                    let expect = t.powf(kronecker(b, c)) * t1.powf(kronecker(a, b) + kronecker(a, c));
                    assert!((r.component(a, b, c) - expect).abs() < 1e-14);
                }
            }
        }
        let all_same = Configuration::new(1, vec![Spin::S1; 3], BoundaryKind::Free).unwrap();
        assert!((configuration_weight(&all_same, &p) - t * t1 * t1).abs() < 1e-13);
    }

    #[test]
    fn depth_range() {
        let p = BoltzmannParams::from_thetas(2.0, 2.0, 2.0).unwrap();
        assert!(enumerate_partition(0, BoundaryKind::Free, &p).is_err());
        assert!(enumerate_partition(4, BoundaryKind::Free, &p).is_err());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let p = BoltzmannParams::from_thetas(1.3, 2.1, 0.8).unwrap();
        let a = enumerate_partition_with(2, BoundaryKind::Const(Spin::S3), &p, Execution::Sequential).unwrap();
        let b = enumerate_partition_with(2, BoundaryKind::Const(Spin::S3), &p, Execution::Parallel).unwrap();
        assert_eq!(a.components, b.components);
    }

    #[test]
    fn min_energy_matches_exhaustive_scan() {
        let j = CouplingSet::new(-0.7, 0.3, 1.0).unwrap();
        let r = enumerate_min_energy(2, &j, MINIMIZER_CAP).unwrap();
        let energies: Vec<f64> = all_configs(2, BoundaryKind::Free).iter().map(|c| hamiltonian_kronecker(c, &j)).collect();
        let min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((r.energy - min).abs() < 1e-12);
        assert_eq!(r.count, energies.iter().filter(|&&e| (e - min).abs() < 1e-9).count());
        for c in &r.minimizers {
            assert!((hamiltonian_kronecker(c, &j) - min).abs() < 1e-12);
        }
    }

    #[test]
    fn min_energy_cap() {
        let j = CouplingSet::new(0.0, 0.0, 0.0).unwrap();
        let r = enumerate_min_energy(2, &j, 10).unwrap();
        assert_eq!(r.count, 3usize.pow(7));
        assert_eq!(r.minimizers.len(), 10);
        assert!(r.truncated);
    }
}
