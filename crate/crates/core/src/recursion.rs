//! Exact recursions for the partial partition functions.
//!
//! For a volume of depth `n` the partition function splits by the spins
//! `(a; b, c)` on the root and its two children. Since the two children are
//! interchangeable these 27 numbers collapse to 18: for each root state,
//! six unordered child pairs in the order `{11, 12, 13, 22, 23, 33}`.
//!
//! All states carry a log-scale accumulator: stored components are the true
//! ones divided by `exp(log_scale)`. The `step_*` functions rescale so that
//! the largest component is one; the `*_raw` variants do not.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spins::{BoltzmannParams, BoundaryKind, Spin, SpinPermutation};

/// Position of the unordered child pair `{b, c}` among the six pairs.
#[inline]
pub fn pair_index(b: usize, c: usize) -> usize {
    let (lo, hi) = if b <= c { (b, c) } else { (c, b) };
    match (lo, hi) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        _ => 5,
    }
}

/// Compressed position (0-based, of 18) of the ordered triple `(a; b, c)`.
#[inline]
pub fn compressed_index(a: usize, b: usize, c: usize) -> usize {
    6 * a + pair_index(b, c)
}

/// Children of each unordered pair position together with its multiplicity.
const PAIRS: [(usize, usize, f64); 6] =
    [(0, 0, 1.0), (0, 1, 2.0), (0, 2, 2.0), (1, 1, 1.0), (1, 2, 2.0), (2, 2, 1.0)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FullState {
    pub x: [f64; 18],
    /// Depth of the volume these components describe.
    pub level: usize,
    pub log_scale: f64,
}

impl FullState {
    pub fn component(&self, a: Spin, b: Spin, c: Spin) -> f64 {
        self.x[compressed_index(a.index(), b.index(), c.index())]
    }

    /// The 27 ordered components, indexed `9a + 3b + c`, in stored scale.
    pub fn expand(&self) -> [f64; 27] {
        let mut out = [0.0; 27];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    out[9 * a + 3 * b + c] = self.x[compressed_index(a, b, c)];
                }
            }
        }
        out
    }

    /// Builds the compressed state from 27 ordered components, checking
    /// that they are symmetric in the two children.
    pub fn from_expanded(z: &[f64; 27], level: usize) -> Result<Self> {
        let mut x = [0.0; 18];
        for a in 0..3 {
            for b in 0..3 {
                for c in b..3 {
                    let (l, r) = (z[9 * a + 3 * b + c], z[9 * a + 3 * c + b]);
                    if l != r {
                        return Err(Error::InvalidParameter(format!("components ({a};{b},{c}) are not child-symmetric")));
                    }
                    x[compressed_index(a, b, c)] = l;
                }
            }
        }
        Ok(FullState { x, level, log_scale: 0.0 })
    }

    /// Sums over the children for each root state, same scale.
    pub fn symmetric_sums(&self) -> SymmetricState {
        let mut z = [0.0; 3];
        for (a, slot) in z.iter_mut().enumerate() {
            *slot = PAIRS.iter().enumerate().map(|(k, &(_, _, m))| m * self.x[6 * a + k]).sum();
        }
        SymmetricState { z, level: self.level, log_scale: self.log_scale }
    }

    /// Natural log of the full partition function.
    pub fn log_partition(&self) -> f64 {
        self.symmetric_sums().log_partition()
    }

    /// Same state after relabelling spin states: component `(a; b, c)` of
    /// the result is component `(perm a; perm b, perm c)` of `self`.
    pub fn relabeled(&self, perm: &SpinPermutation) -> FullState {
        let mut x = [0.0; 18];
        for a in Spin::ALL {
            for (k, &(b, c, _)) in PAIRS.iter().enumerate() {
                let (b, c) = (Spin::ALL[b], Spin::ALL[c]);
                x[6 * a.index() + k] = self.component(perm.apply(a), perm.apply(b), perm.apply(c));
            }
        }
        FullState { x, level: self.level, log_scale: self.log_scale }
    }

    fn rescaled(mut self) -> Result<Self> {
        let m = self.x.iter().cloned().fold(0.0, f64::max);
        check_scale(m, self.x.iter().copied())?;
        self.x.iter_mut().for_each(|v| *v /= m);
        self.log_scale += m.ln();
        Ok(self)
    }
}

fn check_scale(m: f64, values: impl Iterator<Item = f64>) -> Result<()> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::Numerical(format!("component scale {m} is not positive and finite")));
    }
    for v in values {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Numerical(format!("component {v} is not finite and non-negative")));
        }
    }
    Ok(())
}

/// Components at depth one. Free and constant boundaries are supported; a
/// constant boundary other than `S1` is obtained from the `S1` table by
/// relabelling states.
pub fn initial_state(boundary: &BoundaryKind, p: &BoltzmannParams) -> Result<FullState> {
    let (t, tp, t1) = (p.theta(), p.theta_p(), p.theta1());
    match *boundary {
        BoundaryKind::Free => {
            let x = [
                t * t1 * t1, t1, t1, t, 1.0, t,
                t, t1, 1.0, t * t1 * t1, t1, t,
                t, 1.0, t1, t, t1, t * t1 * t1,
            ];
            Ok(FullState { x, level: 1, log_scale: 0.0 })
        }
        BoundaryKind::Const(Spin::S1) => {
            let tp4 = tp.powi(4);
            let x = [
                t * t1.powi(6) * tp4, t1.powi(3) * tp4, t1.powi(3) * tp4, t * tp4, tp4, t * tp4,
                t * t1.powi(4), t1.powi(3), t1 * t1, t * t1 * t1, t1, t,
                t * t1.powi(4), t1 * t1, t1.powi(3), t, t1, t * t1 * t1,
            ];
            Ok(FullState { x, level: 1, log_scale: 0.0 })
        }
        BoundaryKind::Const(k) => {
            let base = initial_state(&BoundaryKind::Const(Spin::S1), p)?;
            Ok(base.relabeled(&SpinPermutation::transposition(Spin::S1, k)))
        }
        BoundaryKind::Field(_) => Err(Error::Unsupported(
            "field boundaries are handled by SymmetricState::from_field".into(),
        )),
    }
}

/// The nine child-subtree sums `S(a, b)`: the subtree below a child in
/// state `b`, weighted by its prolonged bonds to a grandparent in state `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coefficients {
    /// `s[a][b]` for grandparent state `a` and child state `b`.
    pub s: [[f64; 3]; 3],
}

impl Coefficients {
    /// Child in state 1.
    pub fn a(&self, root: Spin) -> f64 {
        self.s[root.index()][0]
    }

    /// Child in state 2.
    pub fn b(&self, root: Spin) -> f64 {
        self.s[root.index()][1]
    }

    /// Child in state 3.
    pub fn c(&self, root: Spin) -> f64 {
        self.s[root.index()][2]
    }
}

pub fn abc_coefficients(state: &FullState, p: &BoltzmannParams) -> Coefficients {
    let tp = p.theta_p();
    let tp_pow = [1.0, tp, tp * tp];
    let mut s = [[0.0; 3]; 3];
    for (a, row) in s.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            *slot = PAIRS
                .iter()
                .enumerate()
                .map(|(k, &(d, e, m))| {
                    let hits = (d == a) as usize + (e == a) as usize;
                    m * tp_pow[hits] * state.x[6 * b + k]
                })
                .sum();
        }
    }
    Coefficients { s }
}

/// One level deeper without rescaling.
pub fn step_full_raw(state: &FullState, p: &BoltzmannParams) -> FullState {
    step_from_coefficients(state, &abc_coefficients(state, p), p)
}

/// Builds the next state from already computed child sums.
pub fn step_from_coefficients(state: &FullState, coef: &Coefficients, p: &BoltzmannParams) -> FullState {
    let (t, t1) = (p.theta(), p.theta1());
    let mut x = [0.0; 18];
    for a in 0..3 {
        for (k, &(b, c, _)) in PAIRS.iter().enumerate() {
            let mut w = coef.s[a][b] * coef.s[a][c];
            if b == c {
                w *= t;
            }
            if a == b {
                w *= t1;
            }
            if a == c {
                w *= t1;
            }
            x[6 * a + k] = w;
        }
    }
    FullState { x, level: state.level + 1, log_scale: 2.0 * state.log_scale }
}

pub fn step_full(state: &FullState, p: &BoltzmannParams) -> Result<FullState> {
    step_full_raw(state, p).rescaled()
}

/// Iterates [`step_full`] until the state describes depth `n`.
pub fn full_state_at(boundary: &BoundaryKind, p: &BoltzmannParams, n: usize) -> Result<FullState> {
    if n == 0 {
        return Err(Error::InvalidParameter("the full recursion starts at depth one".into()));
    }
    let mut s = initial_state(boundary, p)?;
    while s.level < n {
        s = step_full(&s, p)?;
    }
    Ok(s)
}

/// Nine independent components that survive under a constant `S1`
/// boundary, where states 2 and 3 are interchangeable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedState {
    pub y: [f64; 9],
    pub level: usize,
    pub log_scale: f64,
}

const REDUCED_FROM_FULL: [usize; 9] = [0, 1, 4, 6, 7, 8, 9, 10, 11];

impl ReducedState {
    pub fn from_full(full: &FullState) -> Self {
        let mut y = [0.0; 9];
        for (slot, &i) in y.iter_mut().zip(&REDUCED_FROM_FULL) {
            *slot = full.x[i];
        }
        ReducedState { y, level: full.level, log_scale: full.log_scale }
    }

    /// The 18 components implied by the 2-3 symmetry.
    pub fn to_full(&self, p: &BoltzmannParams) -> FullState {
        let y = &self.y;
        let t = p.theta();
        let x = [
            y[0], y[1], y[1], t * y[2], y[2], t * y[2],
            y[3], y[4], y[5], y[6], y[7], y[8],
            y[3], y[5], y[4], y[8], y[7], y[6],
        ];
        FullState { x, level: self.level, log_scale: self.log_scale }
    }

    pub fn symmetric_sums(&self, p: &BoltzmannParams) -> SymmetricState {
        let y = &self.y;
        let z1 = y[0] + 4.0 * y[1] + 2.0 * (p.theta() + 1.0) * y[2];
        let z2 = y[3] + 2.0 * y[4] + 2.0 * y[5] + y[6] + 2.0 * y[7] + y[8];
        SymmetricState { z: [z1, z2, z2], level: self.level, log_scale: self.log_scale }
    }
}

pub fn initial_reduced(p: &BoltzmannParams) -> Result<ReducedState> {
    Ok(ReducedState::from_full(&initial_state(&BoundaryKind::Const(Spin::S1), p)?))
}

pub fn step_reduced_raw(state: &ReducedState, p: &BoltzmannParams) -> ReducedState {
    let y = &state.y;
    let (t, tp, t1) = (p.theta(), p.theta_p(), p.theta1());
    let tp2 = tp * tp;
    let a1 = tp2 * y[0] + 4.0 * tp * y[1] + 2.0 * (t + 1.0) * y[2];
    let b1 = tp2 * y[3] + 2.0 * tp * y[4] + 2.0 * tp * y[5] + y[6] + 2.0 * y[7] + y[8];
    let a2 = y[0] + (2.0 * tp + 2.0) * y[1] + (tp2 * t + 2.0 * tp + t) * y[2];
    let b2 = y[3] + 2.0 * tp * y[4] + 2.0 * y[5] + tp2 * y[6] + 2.0 * tp * y[7] + y[8];
    let c2 = y[3] + 2.0 * y[4] + 2.0 * tp * y[5] + tp2 * y[8] + 2.0 * tp * y[7] + y[6];
    let y = [
        t * t1 * t1 * a1 * a1,
        t1 * a1 * b1,
        b1 * b1,
        t * a2 * a2,
        t1 * a2 * b2,
        a2 * c2,
        t * t1 * t1 * b2 * b2,
        t1 * b2 * c2,
        t * c2 * c2,
    ];
    ReducedState { y, level: state.level + 1, log_scale: 2.0 * state.log_scale }
}

pub fn step_reduced(state: &ReducedState, p: &BoltzmannParams) -> Result<ReducedState> {
    let mut s = step_reduced_raw(state, p);
    let m = s.y.iter().cloned().fold(0.0, f64::max);
    check_scale(m, s.y.iter().copied())?;
    s.y.iter_mut().for_each(|v| *v /= m);
    s.log_scale += m.ln();
    Ok(s)
}

/// Root-state partition sums `z_a`, valid without the prolonged coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricState {
    pub z: [f64; 3],
    pub level: usize,
    pub log_scale: f64,
}

impl SymmetricState {
    /// Single vertex with field weight `exp(h · s)`.
    pub fn from_field(h: &crate::field::Field) -> Self {
        let pr = h.projections();
        SymmetricState { z: pr.map(f64::exp), level: 0, log_scale: 0.0 }
    }

    /// `(z1 / z3, z2 / z3)`.
    pub fn ratios(&self) -> RatioState {
        RatioState { u: self.z[0] / self.z[2], v: self.z[1] / self.z[2] }
    }

    pub fn log_partition(&self) -> f64 {
        (self.z[0] + self.z[1] + self.z[2]).ln() + self.log_scale
    }
}

pub fn step_triple_raw(state: &SymmetricState, p: &BoltzmannParams) -> Result<SymmetricState> {
    if p.theta_p() != 1.0 {
        return Err(Error::Unsupported("the three-component recursion needs a zero prolonged coupling".into()));
    }
    let (t, t1) = (p.theta(), p.theta1());
    let z = &state.z;
    let mut out = [0.0; 3];
    for (a, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for b in 0..3 {
            for c in 0..3 {
                let mut w = z[b] * z[c];
                if b == c {
                    w *= t;
                }
                if a == b {
                    w *= t1;
                }
                if a == c {
                    w *= t1;
                }
                acc += w;
            }
        }
        *slot = acc;
    }
    Ok(SymmetricState { z: out, level: state.level + 1, log_scale: 2.0 * state.log_scale })
}

pub fn step_triple(state: &SymmetricState, p: &BoltzmannParams) -> Result<SymmetricState> {
    let mut s = step_triple_raw(state, p)?;
    let m = s.z.iter().cloned().fold(0.0, f64::max);
    check_scale(m, s.z.iter().copied())?;
    s.z.iter_mut().for_each(|v| *v /= m);
    s.log_scale += m.ln();
    Ok(s)
}

/// Ratios `(z1 / z3, z2 / z3)` of the root-state sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioState {
    pub u: f64,
    pub v: f64,
}

impl RatioState {
    pub fn new(u: f64, v: f64) -> Self {
        RatioState { u, v }
    }

    pub fn distance(&self, other: &RatioState) -> f64 {
        (self.u - other.u).hypot(self.v - other.v)
    }
}

/// One step of the ratio map. It is written around the fixed point
/// `(1, 1)` so that the lines `u = 1`, `v = 1` and `u = v` are preserved
/// exactly in floating point.
pub fn step_ratio(s: &RatioState, p: &BoltzmannParams) -> Result<RatioState> {
    let (u, v) = (s.u, s.v);
    if !(u.is_finite() && v.is_finite() && u > 0.0 && v > 0.0) {
        return Err(Error::InvalidParameter(format!("ratios must be positive and finite, got ({u}, {v})")));
    }
    let (t, t1) = (p.theta(), p.theta1());
    let d = t * u * u + 2.0 * u * v + t * v * v + 2.0 * t1 * u + 2.0 * t1 * v + t * t1 * t1;
    let k = t * (t1 + 1.0);
    let nu = 1.0 + (t1 - 1.0) * (u - 1.0) * (k * (u + 1.0) + 2.0 * v) / d;
    let nv = 1.0 + (t1 - 1.0) * (v - 1.0) * (k * (v + 1.0) + 2.0 * u) / d;
    if !(nu.is_finite() && nv.is_finite() && nu > 0.0 && nv > 0.0) {
        return Err(Error::Numerical(format!("ratio step left the positive quadrant: ({nu}, {nv})")));
    }
    Ok(RatioState { u: nu, v: nv })
}

/// The ratio map in its quotient form, kept as an independent reference.
pub fn step_ratio_quotient(s: &RatioState, p: &BoltzmannParams) -> RatioState {
    let (u, v) = (s.u, s.v);
    let (t, t1) = (p.theta(), p.theta1());
    let den = t * u * u + 2.0 * u * v + t * v * v + 2.0 * t1 * (u + v) + t * t1 * t1;
    let nu = t * t1 * t1 * u * u + 2.0 * t1 * u * v + t * v * v + 2.0 * t1 * u + 2.0 * v + t;
    let nv = t * u * u + 2.0 * t1 * u * v + t * t1 * t1 * v * v + 2.0 * u + 2.0 * t1 * v + t;
    RatioState { u: nu / den, v: nv / den }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_partition;

    fn params() -> BoltzmannParams {
        BoltzmannParams::from_thetas(1.8, 1.3, 2.4).unwrap()
    }

    #[test]
    fn pair_indices_cover_eighteen() {
        let mut seen = [0; 18];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    seen[compressed_index(a, b, c)] += 1;
                }
            }
        }
        for (k, &(b, c, m)) in PAIRS.iter().enumerate() {
            assert_eq!(pair_index(b, c), k);
            assert_eq!(seen[k], m as i32);
        }
    }

    #[test]
    fn initial_states_match_enumeration() {
        let p = params();
        for boundary in [BoundaryKind::Free, BoundaryKind::Const(Spin::S1), BoundaryKind::Const(Spin::S2), BoundaryKind::Const(Spin::S3)] {
            let s = initial_state(&boundary, &p).unwrap();
            let e = enumerate_partition(1, boundary, &p).unwrap();
            for (i, (a, b)) in s.expand().iter().zip(&e.components).enumerate() {
                assert!((a - b).abs() <= 1e-13 * b, "{boundary:?} component {i}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn full_steps_match_enumeration() {
        let p = params();
        for boundary in [BoundaryKind::Free, BoundaryKind::Const(Spin::S2)] {
            let s = full_state_at(&boundary, &p, 2).unwrap();
            let e = enumerate_partition(2, boundary, &p).unwrap();
            for (a, b) in s.expand().iter().zip(&e.components) {
                let a = a * s.log_scale.exp();
                assert!((a - b).abs() <= 1e-12 * b);
            }
        }
    }

    #[test]
    fn raw_and_rescaled_agree() {
        let p = params();
        let s0 = initial_state(&BoundaryKind::Const(Spin::S3), &p).unwrap();
        let raw = step_full_raw(&step_full_raw(&s0, &p), &p);
        let norm = step_full(&step_full(&s0, &p).unwrap(), &p).unwrap();
        for (a, b) in raw.x.iter().zip(&norm.x) {
            assert!((a.ln() - (b.ln() + norm.log_scale)).abs() < 1e-12);
        }
    }

    #[test]
    fn named_coefficients() {
        let p = params();
        let (t, tp) = (p.theta(), p.theta_p());
        let s = initial_state(&BoundaryKind::Free, &p).unwrap();
        let x = |i: usize| s.x[i - 1];
        let coef = abc_coefficients(&s, &p);
        let a1 = tp * tp * x(1) + 2.0 * tp * x(2) + 2.0 * tp * x(3) + x(4) + 2.0 * x(5) + x(6);
        let a2 = x(1) + 2.0 * tp * x(2) + 2.0 * x(3) + tp * tp * x(4) + 2.0 * tp * x(5) + x(6);
        let a3 = x(1) + 2.0 * x(2) + 2.0 * tp * x(3) + x(4) + 2.0 * tp * x(5) + tp * tp * x(6);
        let b2 = x(7) + 2.0 * tp * x(8) + 2.0 * x(9) + tp * tp * x(10) + 2.0 * tp * x(11) + x(12);
        let c2 = x(13) + 2.0 * tp * x(14) + 2.0 * x(15) + tp * tp * x(16) + 2.0 * tp * x(17) + x(18);
        assert!((coef.a(Spin::S1) - a1).abs() < 1e-12);
        assert!((coef.a(Spin::S2) - a2).abs() < 1e-12);
        assert!((coef.a(Spin::S3) - a3).abs() < 1e-12);
        assert!((coef.b(Spin::S2) - b2).abs() < 1e-12);
        assert!((coef.c(Spin::S2) - c2).abs() < 1e-12);
        let _ = t;
    }

    #[test]
    fn reduced_tracks_full() {
        let p = params();
        let mut full = initial_state(&BoundaryKind::Const(Spin::S1), &p).unwrap();
        let mut red = initial_reduced(&p).unwrap();
        for _ in 0..6 {
            full = step_full(&full, &p).unwrap();
            red = step_reduced(&red, &p).unwrap();
            let back = red.to_full(&p);
            for (a, b) in back.x.iter().zip(&full.x) {
                assert!((a - b).abs() < 1e-12 * b.max(1e-300));
            }
            let (zs, zr) = (full.symmetric_sums(), red.symmetric_sums(&p));
            for (a, b) in zs.z.iter().zip(&zr.z) {
                assert!((a - b).abs() < 1e-12 * a);
            }
        }
    }

    #[test]
    fn triple_matches_full_without_prolonged() {
        let p = BoltzmannParams::from_thetas(1.8, 1.0, 2.4).unwrap();
        let mut full = initial_state(&BoundaryKind::Free, &p).unwrap();
        let mut tri = full.symmetric_sums();
        for _ in 0..5 {
            full = step_full(&full, &p).unwrap();
            tri = step_triple(&tri, &p).unwrap();
            let fz = full.symmetric_sums();
            assert!((fz.log_partition() - tri.log_partition()).abs() < 1e-12);
        }
        assert!(step_triple(&tri, &params()).is_err());
    }

    #[test]
    fn ratio_forms_agree() {
        let p = params();
        for &(u, v) in &[(0.3, 2.0), (1.0, 1.0), (5.0, 0.7), (1.0, 3.3)] {
            let s = RatioState::new(u, v);
            let a = step_ratio(&s, &p).unwrap();
            let b = step_ratio_quotient(&s, &p);
            assert!((a.u - b.u).abs() < 1e-13 * b.u && (a.v - b.v).abs() < 1e-13 * b.v);
        }
        assert!(step_ratio(&RatioState::new(-1.0, 1.0), &p).is_err());
    }

    #[test]
    fn ratio_map_matches_triple_ratios() {
        let p = BoltzmannParams::from_thetas(0.7, 1.0, 3.1).unwrap();
        let tri = SymmetricState { z: [2.0, 0.5, 1.3], level: 0, log_scale: 0.0 };
        let next = step_triple(&tri, &p).unwrap().ratios();
        let direct = step_ratio(&tri.ratios(), &p).unwrap();
        assert!(next.distance(&direct) < 1e-13);
    }
}
