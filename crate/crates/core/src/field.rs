//! Boundary fields, the compatibility equation linking the fields on two
//! consecutive levels, and the finite-volume measures built from them.
//!
//! A field `h = (h1, h2)` acts on a spin `s` through `h · s`. The
//! compatibility equation is most naturally written with the scaled field
//! `h' = 3h/2`, whose components are `h·s1 - h·s3` and `h·s2 - h·s3`.
//! Public functions take unscaled fields unless stated otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{check_depth, Error, Result};
use crate::exec::Execution;
use crate::lattice::volume_size;
use crate::oracle::{decode, TreeWeights, MAX_DEPTH};
use crate::spins::{field_dot, BoltzmannParams, Configuration, Spin, SpinPermutation};
use crate::sum::neumaier;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Field {
    pub h1: f64,
    pub h2: f64,
}

impl Field {
    pub const ZERO: Field = Field { h1: 0.0, h2: 0.0 };

    pub fn new(h1: f64, h2: f64) -> Self {
        Field { h1, h2 }
    }

    /// `[h·s1, h·s2, h·s3]`; the three values sum to zero.
    pub fn projections(&self) -> [f64; 3] {
        [self.h1 - 0.5 * self.h2, self.h2 - 0.5 * self.h1, -0.5 * (self.h1 + self.h2)]
    }

    /// Inverse of [`Field::projections`] after removing the mean.
    pub fn from_projections(p: [f64; 3]) -> Self {
        let m = (p[0] + p[1] + p[2]) / 3.0;
        let (a, b) = (p[0] - m, p[1] - m);
        Field { h1: (4.0 * a + 2.0 * b) / 3.0, h2: (4.0 * b + 2.0 * a) / 3.0 }
    }

    /// The field seen after relabelling spin states by `perm`.
    pub fn permuted(&self, perm: &SpinPermutation) -> Self {
        let p = self.projections();
        let mut q = [0.0; 3];
        for s in Spin::ALL {
            q[perm.apply(s).index()] = p[s.index()];
        }
        Field::from_projections(q)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Field { h1: c * self.h1, h2: c * self.h2 }
    }

    pub fn transposed(&self) -> Self {
        Field { h1: self.h2, h2: self.h1 }
    }

    pub fn is_finite(&self) -> bool {
        self.h1.is_finite() && self.h2.is_finite()
    }
}

const SCALE: f64 = 1.5;

/// `ln S_i` for `i = 1, 2, 3`, where `S_i` sums over the two children's
/// states the weights `theta1^(δ(i,b)+δ(i,c)) theta^δ(b,c) exp(h'_b + r'_c)`
/// with `h'_3 = r'_3 = 0`. Arguments are scaled fields.
fn log_child_sums(h: &Field, r: &Field, p: &BoltzmannParams) -> [f64; 3] {
    let hs = [h.h1, h.h2, 0.0];
    let rs = [r.h1, r.h2, 0.0];
    let (lt, lt1) = (p.theta().ln(), p.theta1().ln());
    let mut out = [0.0; 3];
    for (i, slot) in out.iter_mut().enumerate() {
        let mut terms = [0.0; 9];
        for b in 0..3 {
            for c in 0..3 {
                let mut e = hs[b] + rs[c];
                if b == c {
                    e += lt;
                }
                if b == i {
                    e += lt1;
                }
                if c == i {
                    e += lt1;
                }
                terms[3 * b + c] = e;
            }
        }
        let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        *slot = m + neumaier(terms.iter().map(|t| (t - m).exp())).ln();
    }
    out
}

/// The compatibility ratio for scaled fields `h`, `r` of the two children.
pub fn compatibility_ratio(h: &Field, r: &Field, p: &BoltzmannParams) -> f64 {
    let ls = log_child_sums(h, r, p);
    (ls[0] - ls[2]).exp()
}

/// Field at a vertex forced by the fields `h_y`, `h_z` on its children.
pub fn field_step(h_y: &Field, h_z: &Field, p: &BoltzmannParams) -> Field {
    let ls = log_child_sums(&h_y.scaled(SCALE), &h_z.scaled(SCALE), p);
    Field::new((ls[0] - ls[2]) / SCALE, (ls[1] - ls[2]) / SCALE)
}

/// Per-vertex normalising factor `a` with
/// `Σ_children exp(...) = a · exp(h_x · s_x)` for every parent state.
pub fn a_coefficient(h_y: &Field, h_z: &Field, p: &BoltzmannParams) -> f64 {
    log_a_coefficient(h_y, h_z, p).exp()
}

pub fn log_a_coefficient(h_y: &Field, h_z: &Field, p: &BoltzmannParams) -> f64 {
    log_a_printed(h_y, h_z, p) + field_dot(h_y, Spin::S3) + field_dot(h_z, Spin::S3)
}

/// The factor without the `exp((h_y + h_z)·s3)` term. It agrees with
/// [`a_coefficient`] only when that term vanishes (for example `h_y = h_z = 0`).
pub fn a_coefficient_printed(h_y: &Field, h_z: &Field, p: &BoltzmannParams) -> f64 {
    log_a_printed(h_y, h_z, p).exp()
}

/// Natural log of [`a_coefficient_printed`].
pub fn log_a_printed(h_y: &Field, h_z: &Field, p: &BoltzmannParams) -> f64 {
    let c = p.couplings();
    let ls = log_child_sums(&h_y.scaled(SCALE), &h_z.scaled(SCALE), p);
    -(c.vector_one_level() / 2.0 + c.vector_nearest()) * p.beta() + (ls[0] + ls[1] + ls[2]) / 3.0
}

/// Fields on the outermost level of a finite volume, in heap order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldAssignment {
    depth: usize,
    fields: Vec<Field>,
}

impl FieldAssignment {
    pub fn new(depth: usize, fields: Vec<Field>) -> Result<Self> {
        if fields.len() != 1 << depth {
            return Err(Error::InvalidParameter(format!("expected {} fields, got {}", 1 << depth, fields.len())));
        }
        if let Some(f) = fields.iter().find(|f| !f.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite field {f:?}")));
        }
        Ok(FieldAssignment { depth, fields })
    }

    pub fn constant(depth: usize, h: Field) -> Self {
        FieldAssignment { depth, fields: vec![h; 1 << depth] }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    /// Fields one level up, obtained from the compatibility equation.
    pub fn pull_back(&self, p: &BoltzmannParams) -> Result<FieldAssignment> {
        if self.depth == 0 {
            return Err(Error::InvalidParameter("the root has no parent level".into()));
        }
        let fields = self.fields.chunks(2).map(|yz| field_step(&yz[0], &yz[1], p)).collect();
        FieldAssignment::new(self.depth - 1, fields)
    }

    /// Product of the `a` factors over the parents of this level.
    pub fn log_a_product(&self, p: &BoltzmannParams) -> f64 {
        neumaier(self.fields.chunks(2).map(|yz| log_a_coefficient(&yz[0], &yz[1], p)))
    }
}

/// Exactly tabulated finite-volume measure with field weights on the last
/// level and vector-form couplings.
#[derive(Debug, Clone)]
pub struct FiniteVolumeMeasure {
    depth: usize,
    weights: TreeWeights,
    partition: f64,
    exec: Execution,
}

pub fn finite_volume_measure(
    n: usize,
    fa: &FieldAssignment,
    p: &BoltzmannParams,
) -> Result<FiniteVolumeMeasure> {
    finite_volume_measure_with(n, fa, p, Execution::default())
}

pub fn finite_volume_measure_with(
    n: usize,
    fa: &FieldAssignment,
    p: &BoltzmannParams,
    exec: Execution,
) -> Result<FiniteVolumeMeasure> {
    check_depth(n, 0, MAX_DEPTH)?;
    if fa.depth != n {
        return Err(Error::InvalidParameter(format!("field assignment depth {} != {n}", fa.depth)));
    }
    let weights = TreeWeights::vector(n, p, &fa.fields)?;
    let partition = weights.total(exec);
    if !(partition.is_finite() && partition > 0.0) {
        return Err(Error::Numerical(format!("partition function {partition}")));
    }
    Ok(FiniteVolumeMeasure { depth: n, weights, partition, exec })
}

impl FiniteVolumeMeasure {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn partition(&self) -> f64 {
        self.partition
    }

    pub fn probability(&self, c: &Configuration) -> Result<f64> {
        if c.depth() != self.depth {
            return Err(Error::InvalidParameter("configuration depth does not match the measure".into()));
        }
        let spins: Vec<u8> = c.spins().iter().map(|s| s.index() as u8).collect();
        Ok(self.weights.weight(&spins) / self.partition)
    }

    /// Probabilities of every configuration on the first `m` vertices in
    /// heap order, indexed in base 3 with vertex 0 most significant.
    pub fn prefix_marginal(&self, m: usize) -> Vec<f64> {
        self.weights.prefix_sums(m, self.exec).into_iter().map(|w| w / self.partition).collect()
    }

    /// Marginal on levels `0..depth-1`.
    pub fn inner_marginal(&self) -> Vec<f64> {
        self.prefix_marginal(volume_size(self.depth.saturating_sub(1)))
    }

    pub fn root_marginal(&self) -> [f64; 3] {
        let m = self.prefix_marginal(1);
        [m[0], m[1], m[2]]
    }

    /// The full probability table. Its length is `3^(2^(depth+1) - 1)`.
    pub fn table(&self) -> Vec<f64> {
        self.prefix_marginal(volume_size(self.depth))
    }

    /// Mean spin vector at the root.
    pub fn root_magnetization(&self) -> [f64; 2] {
        let m = self.root_marginal();
        let mut out = [0.0; 2];
        for s in Spin::ALL {
            let [x, y] = s.cartesian();
            out[0] += m[s.index()] * x;
            out[1] += m[s.index()] * y;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsistencyReport {
    /// Largest absolute gap between the projected depth-`n` measure and the
    /// depth-`n-1` measure.
    pub max_marginal_discrepancy: f64,
    /// `|Z_n - A_{n-1} Z_{n-1}| / Z_n`.
    pub normalization_discrepancy: f64,
}

/// Compares the depth-`n` measure built from `fa_child` (fields on level
/// `n`) with the depth-`n-1` measure built from `fa_parent`.
pub fn check_consistency(
    n: usize,
    fa_parent: &FieldAssignment,
    fa_child: &FieldAssignment,
    p: &BoltzmannParams,
) -> Result<ConsistencyReport> {
    check_depth(n, 1, MAX_DEPTH)?;
    let fine = finite_volume_measure(n, fa_child, p)?;
    let coarse = finite_volume_measure(n - 1, fa_parent, p)?;
    let projected = fine.inner_marginal();
    let direct = coarse.table();
    let max_marginal_discrepancy = projected.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let log_a = fa_child.log_a_product(p);
    let predicted = (log_a + coarse.partition().ln()).exp();
    let normalization_discrepancy = (fine.partition() - predicted).abs() / fine.partition();
    Ok(ConsistencyReport { max_marginal_discrepancy, normalization_discrepancy })
}

/// Spins on levels `0..depth` decoded from a base-3 prefix index.
pub fn decode_prefix(code: usize, depth: usize) -> Vec<Spin> {
    let nv = volume_size(depth);
    let mut s = vec![0u8; nv];
    decode(code, nv, &mut s);
    s.into_iter().map(|x| Spin::ALL[x as usize]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> BoltzmannParams {
        BoltzmannParams::from_thetas(2.2, 1.0, 1.7).unwrap()
    }

    #[test]
    fn projection_roundtrip() {
        let h = Field::new(0.3, -1.1);
        let p = h.projections();
        assert!((p.iter().sum::<f64>()).abs() < 1e-15);
        let back = Field::from_projections(p);
        assert!((back.h1 - h.h1).abs() < 1e-15 && (back.h2 - h.h2).abs() < 1e-15);
        assert!((p[0] - p[2] - 1.5 * h.h1).abs() < 1e-15);
        assert!((p[1] - p[2] - 1.5 * h.h2).abs() < 1e-15);
    }

    #[test]
    fn ratio_matches_direct_sums() {
        let p = params();
        let (t, t1) = (p.theta(), p.theta1());
        let (h, r) = (Field::new(0.4, -0.3), Field::new(-0.2, 0.9));
        let e = |x: f64| x.exp();
        let num = t1 * t1 * t * e(h.h1 + r.h1)
            + t1 * (e(h.h1 + r.h2) + e(h.h2 + r.h1))
            + t * e(h.h2 + r.h2)
            + t1 * (e(h.h1) + e(r.h1))
            + e(h.h2)
            + e(r.h2)
            + t;
        let den = t * e(h.h1 + r.h1)
            + e(h.h1 + r.h2)
            + e(h.h2 + r.h1)
            + t * e(h.h2 + r.h2)
            + t1 * (e(h.h1) + e(r.h1) + e(h.h2) + e(r.h2))
            + t1 * t1 * t;
        assert!((compatibility_ratio(&h, &r, &p) - num / den).abs() < 1e-13);
    }

    #[test]
    fn a_is_geometric_mean_of_parent_sums() {
        let p = BoltzmannParams::new(crate::CouplingSet::new(0.7, 0.0, 1.2).unwrap(), 0.9).unwrap();
        let (hy, hz) = (Field::new(0.5, -0.4), Field::new(0.1, 0.8));
        let bj = p.beta() * p.couplings().vector_one_level();
        let bj1 = p.beta() * p.couplings().vector_nearest();
        let mut prod = 1.0;
        for i in Spin::ALL {
            let mut l = 0.0;
            for b in Spin::ALL {
                for c in Spin::ALL {
                    l += (bj1 * (crate::spins::spin_dot(i, b) + crate::spins::spin_dot(i, c))
                        + bj * crate::spins::spin_dot(b, c)
                        + field_dot(&hy, b)
                        + field_dot(&hz, c))
                        .exp();
                }
            }
            prod *= l;
        }
        assert!((a_coefficient(&hy, &hz, &p) - prod.cbrt()).abs() < 1e-12 * prod.cbrt());
        let zero = Field::ZERO;
        assert!((a_coefficient(&zero, &zero, &p) - a_coefficient_printed(&zero, &zero, &p)).abs() < 1e-14);
    }

    #[test]
    fn depth_one_zero_field_is_uniform_when_couplings_vanish() {
        let p = BoltzmannParams::from_thetas(1.0, 1.0, 1.0).unwrap();
        let m = finite_volume_measure(1, &FieldAssignment::constant(1, Field::ZERO), &p).unwrap();
        let t = m.table();
        assert_eq!(t.len(), 27);
        assert!((neumaier(t.iter().copied()) - 1.0).abs() < 1e-15);
        assert!(t.iter().all(|&x| (x - 1.0 / 27.0).abs() < 1e-15));
    }

    #[test]
    fn rejects_mismatched_assignment() {
        let p = params();
        assert!(finite_volume_measure(2, &FieldAssignment::constant(1, Field::ZERO), &p).is_err());
        assert!(FieldAssignment::new(2, vec![Field::ZERO; 3]).is_err());
        assert!(FieldAssignment::new(1, vec![Field::new(f64::NAN, 0.0); 2]).is_err());
    }

    #[test]
    fn pulled_back_fields_are_consistent() {
        let p = params();
        let child = FieldAssignment::new(
            2,
            vec![Field::new(0.3, 0.1), Field::new(-0.5, 0.2), Field::new(0.0, 0.7), Field::new(1.1, -0.4)],
        )
        .unwrap();
        let parent = child.pull_back(&p).unwrap();
        let r = check_consistency(2, &parent, &child, &p).unwrap();
        assert!(r.max_marginal_discrepancy < 1e-13, "{r:?}");
        assert!(r.normalization_discrepancy < 1e-12, "{r:?}");
        let wrong = FieldAssignment::constant(1, Field::ZERO);
        let bad = check_consistency(2, &wrong, &child, &p).unwrap();
        assert!(bad.max_marginal_discrepancy > 1e-4);
    }
}
