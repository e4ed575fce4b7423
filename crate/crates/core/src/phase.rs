//! Translation-invariant fixed points of the ratio map, their stability,
//! the parameter regions where several of them coexist, and the critical
//! temperature curve.
//!
//! All routines here assume a zero prolonged coupling.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::recursion::{step_ratio, RatioState};
use crate::spins::{BoltzmannParams, Spin};
use crate::tolerances::{BASIN_MATCH, FIXED_POINT_RESIDUAL, SPECTRAL_MARGIN, TANGENCY};

fn require_no_prolonged(p: &BoltzmannParams) -> Result<()> {
    if p.theta_p() != 1.0 {
        return Err(Error::Unsupported("fixed-point analysis needs a zero prolonged coupling".into()));
    }
    Ok(())
}

/// Coefficients `(a, b, c)` of `a u^2 + b u + c` whose roots are the
/// nontrivial fixed points on the line `v = 1`.
pub fn quadratic_coefficients(theta: f64, theta1: f64) -> (f64, f64, f64) {
    (theta, (theta1 + 1.0) * (theta * (1.0 - theta1) + 2.0), 2.0 * (theta + 1.0))
}

/// The ratio map restricted to the line `v = 1`.
pub fn restricted_map(u: f64, theta: f64, theta1: f64) -> f64 {
    let num = theta1 * theta1 * theta * u * u + 4.0 * theta1 * u + 2.0 * (theta + 1.0);
    let den = theta * u * u + 2.0 * (theta1 + 1.0) * u + theta1 * theta1 * theta + 2.0 * theta1 + theta;
    num / den
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FixedPointLabel {
    Disordered,
    /// `root` is 1 for the larger quadratic root and 2 for the smaller;
    /// `phase` is the favoured spin state.
    Ordered { root: u8, phase: Spin },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    pub state: RatioState,
    pub label: FixedPointLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointSet {
    pub theta: f64,
    pub theta1: f64,
    /// Nontrivial roots on the line `v = 1`, largest first. Empty when the
    /// quadratic has no positive roots, a single entry at a tangency.
    pub roots: Vec<f64>,
    pub tangency: bool,
    /// `(1, 1)` followed by the three images `(u, 1)`, `(1, u)`, `(1/u, 1/u)`
    /// of each root.
    pub points: Vec<FixedPoint>,
}

impl FixedPointSet {
    /// Closest listed fixed point within `tol`.
    pub fn classify(&self, s: &RatioState, tol: f64) -> Option<FixedPoint> {
        self.points
            .iter()
            .filter(|fp| fp.state.distance(s) <= tol * (1.0 + fp.state.u.hypot(fp.state.v)))
            .min_by(|a, b| a.state.distance(s).total_cmp(&b.state.distance(s)))
            .copied()
    }

    pub fn orbit(u: f64) -> [RatioState; 3] {
        [RatioState::new(u, 1.0), RatioState::new(1.0, u), RatioState::new(1.0 / u, 1.0 / u)]
    }
}

pub fn solve_fixed_points(p: &BoltzmannParams) -> Result<FixedPointSet> {
    require_no_prolonged(p)?;
    let (theta, theta1) = (p.theta(), p.theta1());
    let (a, b, c) = quadratic_coefficients(theta, theta1);
    let disc = b * b - 4.0 * a * c;
    let scale = (b * b).max(4.0 * a * c);
    let mut roots = Vec::new();
    let mut tangency = false;
    if b < 0.0 {
        if disc.abs() <= TANGENCY * scale {
            tangency = true;
            roots.push(-b / (2.0 * a));
        } else if disc > 0.0 {
            let q = 0.5 * (-b + disc.sqrt());
            roots.push(q / a);
            roots.push(c / q);
        }
    }
    let mut points = vec![FixedPoint { state: RatioState::new(1.0, 1.0), label: FixedPointLabel::Disordered }];
    for (k, &u) in roots.iter().enumerate() {
        for (phase, state) in Spin::ALL.into_iter().zip(FixedPointSet::orbit(u)) {
            let next = step_ratio(&state, p)?;
            let residual = ((next.u - state.u) / state.u.max(1.0)).abs().max(((next.v - state.v) / state.v.max(1.0)).abs());
            if residual > FIXED_POINT_RESIDUAL && !tangency {
                return Err(Error::Numerical(format!("fixed point {state:?} has residual {residual:e}")));
            }
            points.push(FixedPoint { state, label: FixedPointLabel::Ordered { root: k as u8 + 1, phase } });
        }
    }
    Ok(FixedPointSet { theta, theta1, roots, tangency, points })
}

/// `(x - 1)(sqrt((x + 1)^3 + 1) - 1)`, increasing for `x > 1`.
pub fn theta_star_function(x: f64) -> f64 {
    (x - 1.0) * (((x + 1.0).powi(3) + 1.0).sqrt() - 1.0)
}

/// Bisection on an increasing function for `f(x) = target` in `[lo, hi]`.
fn bisect_increasing(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Root of `theta_star_function(x) = 4` above one.
pub fn theta_star() -> f64 {
    bisect_increasing(theta_star_function, 4.0, 1.0, 3.0, 1e-14)
}

/// The two roots `(xi1, xi2)` in `theta` of the discriminant condition.
/// `xi1` uses the rationalised form and is finite for every `theta1 > 1`.
pub fn xi(theta1: f64) -> (f64, f64) {
    let pp = (theta1 + 1.0).powi(2) * (theta1 - 1.0) + 2.0;
    let rq = 4.0 * ((theta1 + 1.0).powi(3) + 1.0).sqrt();
    let den = (theta1 * theta1 - 1.0).powi(2) - 8.0;
    let xi1 = 4.0 * (theta1 + 1.0).powi(2) / (2.0 * pp + rq);
    let xi2 = (2.0 * pp + rq) / den;
    (xi1, xi2)
}

/// The second root in its unsimplified form, for comparison.
pub fn xi_unsimplified(theta1: f64) -> (f64, f64) {
    let pp = (theta1 + 1.0).powi(2) * (theta1 - 1.0) + 2.0;
    let rq = 4.0 * ((theta1 + 1.0).powi(3) + 1.0).sqrt();
    let den = (theta1 * theta1 - 1.0).powi(2) - 8.0;
    ((2.0 * pp - rq) / den, (2.0 * pp + rq) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ExistenceRegion {
    /// No `theta` gives two positive roots.
    Empty,
    /// Two positive roots exactly when `theta > threshold`.
    Above { threshold: f64 },
}

/// Range of `theta` for which three fixed points exist, at fixed `theta1`.
///
/// Two positive roots need `theta > 2 / (theta1 - 1)` and a positive
/// discriminant. When `(theta1^2 - 1)^2 <= 8` the discriminant is positive
/// only for `theta < xi1 < 2 / (theta1 - 1)`, so the region is empty; the
/// boundary `(theta1^2 - 1)^2 = 8` coincides with [`theta_star`]. Above it
/// the region is `theta > xi2`.
pub fn existence_region(theta1: f64) -> ExistenceRegion {
    if theta1 <= 1.0 || (theta1 * theta1 - 1.0).powi(2) - 8.0 <= 0.0 {
        return ExistenceRegion::Empty;
    }
    ExistenceRegion::Above { threshold: xi(theta1).1 }
}

/// The sufficient condition for two attracting ordered fixed points:
/// `theta1 > 2` and `theta > max(2 / (theta1 - 2), xi2)`.
pub fn has_transition(p: &BoltzmannParams) -> Result<bool> {
    require_no_prolonged(p)?;
    Ok(transition_condition(p.theta(), p.theta1()))
}

pub fn transition_condition(theta: f64, theta1: f64) -> bool {
    theta1 > 2.0 && theta > (2.0 / (theta1 - 2.0)).max(xi(theta1).1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Eigenvalues {
    Real(f64, f64),
    Complex { re: f64, im: f64 },
}

impl Eigenvalues {
    pub fn spectral_radius(&self) -> f64 {
        match *self {
            Eigenvalues::Real(a, b) => a.abs().max(b.abs()),
            Eigenvalues::Complex { re, im } => re.hypot(im),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Eigenvalues::Real(..))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jacobian2 {
    pub m: [[f64; 2]; 2],
}

impl Jacobian2 {
    pub fn eigenvalues(&self) -> Eigenvalues {
        let [[a, b], [c, d]] = self.m;
        let tr = a + d;
        let det = a * d - b * c;
        let disc = 0.25 * tr * tr - det;
        if disc >= 0.0 {
            let r = disc.sqrt();
            let big = 0.5 * tr + r.copysign(tr);
            let small = if big != 0.0 { det / big } else { 0.5 * tr - r.copysign(tr) };
            Eigenvalues::Real(big, small)
        } else {
            Eigenvalues::Complex { re: 0.5 * tr, im: (-disc).sqrt() }
        }
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues().spectral_radius()
    }
}

fn lambda(u: f64, v: f64, t: f64, t1: f64) -> f64 {
    let d = t * u * u + 2.0 * u * v + t * v * v + 2.0 * t1 * u + 2.0 * t1 * v + t * t1 * t1;
    2.0 * (t * t1 * t1 * u - t * u * u - u * v - t1 * u + t1 * v + t1) / d
}

fn kappa(u: f64, v: f64, t: f64, t1: f64) -> f64 {
    let d = t * u * u + 2.0 * u * v + t * v * v + 2.0 * t1 * u + 2.0 * t1 * v + t * t1 * t1;
    2.0 * (1.0 - u) * (t * v + 1.0 + u) / d
}

/// Jacobian of the ratio map, valid at fixed points.
pub fn jacobian_at(u: f64, v: f64, p: &BoltzmannParams) -> Result<Jacobian2> {
    require_no_prolonged(p)?;
    let (t, t1) = (p.theta(), p.theta1());
    Ok(Jacobian2 { m: [[lambda(u, v, t, t1), kappa(u, v, t, t1)], [kappa(v, u, t, t1), lambda(v, u, t, t1)]] })
}

/// Slope of the restricted map at a fixed point `(u, 1)`.
pub fn restricted_slope(u: f64, p: &BoltzmannParams) -> f64 {
    lambda(u, 1.0, p.theta(), p.theta1())
}

/// Attractivity within the invariant line through the fixed point.
pub fn attracting_on_line(u: f64, p: &BoltzmannParams) -> bool {
    restricted_slope(u, p).abs() < 1.0 - SPECTRAL_MARGIN
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhaseRegion {
    /// Only the disordered fixed point.
    Unique,
    /// The two ordered roots merge.
    Tangency,
    /// Three fixed points on the line, not both ordered ones attracting.
    ThreeFixedPoints,
    /// Both ordered roots attract along the invariant line.
    TwoAttracting,
}

pub fn classify_phase(p: &BoltzmannParams) -> Result<PhaseRegion> {
    let set = solve_fixed_points(p)?;
    Ok(if set.tangency {
        PhaseRegion::Tangency
    } else if set.roots.is_empty() {
        PhaseRegion::Unique
    } else if set.roots.iter().all(|&u| attracting_on_line(u, p)) {
        PhaseRegion::TwoAttracting
    } else {
        PhaseRegion::ThreeFixedPoints
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ProbeOutcome {
    Converged {
        limit: RatioState,
        iterations: usize,
        /// Matching entry of the fixed-point set, if any.
        matched: Option<FixedPoint>,
        /// Spectral radius of the Jacobian below one.
        attracting: bool,
        /// Slope along the invariant line through the limit below one.
        attracting_on_line: bool,
    },
    NotConverged {
        last: RatioState,
        iterations: usize,
    },
}

impl ProbeOutcome {
    pub fn limit(&self) -> Option<RatioState> {
        match self {
            ProbeOutcome::Converged { limit, .. } => Some(*limit),
            ProbeOutcome::NotConverged { .. } => None,
        }
    }
}

/// Iterates the ratio map from each seed until a step moves less than
/// `tol` or `max_iter` steps have been taken.
pub fn convergence_basin_probe(
    p: &BoltzmannParams,
    seeds: &[RatioState],
    max_iter: usize,
    tol: f64,
) -> Result<Vec<ProbeOutcome>> {
    let set = solve_fixed_points(p)?;
    seeds
        .iter()
        .map(|seed| {
            let mut s = *seed;
            for it in 1..=max_iter {
                let next = step_ratio(&s, p)?;
                let moved = next.distance(&s);
                s = next;
                if moved < tol {
                    let matched = set.classify(&s, BASIN_MATCH);
                    let jac = jacobian_at(s.u, s.v, p)?;
                    let on_line = line_slope(&s, p).abs() < 1.0 - SPECTRAL_MARGIN;
                    return Ok(ProbeOutcome::Converged {
                        limit: s,
                        iterations: it,
                        matched,
                        attracting: jac.spectral_radius() < 1.0 - SPECTRAL_MARGIN,
                        attracting_on_line: on_line,
                    });
                }
            }
            Ok(ProbeOutcome::NotConverged { last: s, iterations: max_iter })
        })
        .collect()
}

/// Derivative of the map along whichever invariant line (`v = 1`, `u = 1`
/// or `u = v`) contains the point, or the spectral radius otherwise.
fn line_slope(s: &RatioState, p: &BoltzmannParams) -> f64 {
    let (t, t1) = (p.theta(), p.theta1());
    if s.v == 1.0 {
        lambda(s.u, 1.0, t, t1)
    } else if s.u == 1.0 {
        lambda(s.v, 1.0, t, t1)
    } else if s.u == s.v {
        lambda(s.u, s.v, t, t1) + kappa(s.u, s.v, t, t1)
    } else {
        Jacobian2 { m: [[lambda(s.u, s.v, t, t1), kappa(s.u, s.v, t, t1)], [kappa(s.v, s.u, t, t1), lambda(s.v, s.u, t, t1)]] }
            .spectral_radius()
    }
}

/// `x ln(2 / (e^(1/x) - 2))` in a form that stays finite for small `x`.
pub fn phi(x: f64) -> f64 {
    let s = (-1.0 / x).exp();
    x * std::f64::consts::LN_2 - 1.0 - x * (-2.0 * s).ln_1p()
}

/// `x ln xi2(e^(1/x))`, rescaled by powers of `e^(1/x)` to avoid overflow.
pub fn zeta(x: f64) -> f64 {
    let s = (-1.0 / x).exp();
    let num = 2.0 * ((1.0 + s).powi(2) * (1.0 - s) + 2.0 * s.powi(3))
        + 4.0 * ((1.0 + s).powi(3) * s.powi(3) + s.powi(6)).sqrt();
    let den = (1.0 - s * s).powi(2) - 8.0 * s.powi(4);
    -1.0 + x * (num.ln() - den.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BindingBranch {
    Phi,
    Zeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalCurvePoint {
    pub j_ratio: f64,
    /// Critical `T / J1`.
    pub t_ratio: f64,
    pub phi_inverse: f64,
    /// `None` when the second branch stays below `j_ratio` on the whole bracket.
    pub zeta_inverse: Option<f64>,
    pub binding: BindingBranch,
}

/// Upper end of the temperature bracket, `1 / ln 2`.
pub const CRITICAL_BRACKET_HI: f64 = 1.0 / std::f64::consts::LN_2;
/// Lower end of the temperature bracket.
pub const CRITICAL_BRACKET_LO: f64 = 1e-3;

/// Critical `T / J1` for a given `J / J1`. Here `theta1 = exp(J1 / T)` and
/// `theta = exp(J / T)`, so the transition condition reads
/// `J / J1 > max(phi(T / J1), zeta(T / J1))`.
pub fn critical_curve(j_ratio: f64, tol: f64) -> Result<CriticalCurvePoint> {
    if !j_ratio.is_finite() || !(tol > 0.0) {
        return Err(Error::InvalidParameter("coupling ratio must be finite and tolerance positive".into()));
    }
    let (lo, hi) = (CRITICAL_BRACKET_LO, CRITICAL_BRACKET_HI);
    if j_ratio <= phi(lo) || j_ratio <= zeta(lo) {
        return Err(Error::NoSolution(format!("no critical temperature in (0, 1/ln 2) for J/J1 = {j_ratio}")));
    }
    let phi_inverse = bisect_increasing(phi, j_ratio, lo, hi, tol);
    let zeta_inverse = if zeta(hi) > j_ratio { Some(bisect_increasing(zeta, j_ratio, lo, hi, tol)) } else { None };
    let (t_ratio, binding) = match zeta_inverse {
        Some(z) if z < phi_inverse => (z, BindingBranch::Zeta),
        _ => (phi_inverse, BindingBranch::Phi),
    };
    Ok(CriticalCurvePoint { j_ratio, t_ratio, phi_inverse, zeta_inverse, binding })
}

/// Boltzmann factors for a point `(J / J1, T / J1)` of the phase diagram.
pub fn diagram_params(j_ratio: f64, t_ratio: f64) -> Result<BoltzmannParams> {
    if !(t_ratio > 0.0) {
        return Err(Error::InvalidParameter("temperature must be positive".into()));
    }
    BoltzmannParams::from_thetas((j_ratio / t_ratio).exp(), 1.0, (1.0 / t_ratio).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(theta: f64, theta1: f64) -> BoltzmannParams {
        BoltzmannParams::from_thetas(theta, 1.0, theta1).unwrap()
    }

    #[test]
    fn roots_at_three_three() {
        let set = solve_fixed_points(&p(3.0, 3.0)).unwrap();
        let r = 160f64.sqrt();
        assert!((set.roots[0] - (16.0 + r) / 6.0).abs() < 1e-12);
        assert!((set.roots[1] - (16.0 - r) / 6.0).abs() < 1e-12);
        assert!((set.roots[0] * set.roots[1] - 8.0 / 3.0).abs() < 1e-12);
        assert_eq!(set.points.len(), 7);
    }

    #[test]
    fn unit_root_always() {
        for &(t, t1) in &[(0.3, 0.5), (3.0, 3.0), (10.0, 1.2), (1.0, 7.0)] {
            assert!((restricted_map(1.0, t, t1) - 1.0).abs() < 1e-15);
            let (a, b, c) = quadratic_coefficients(t, t1);
            let cubic = |u: f64| t * u.powi(3) + (2.0 * t1 - t1 * t1 * t + 2.0) * u * u + (t1 * t1 * t + t - 2.0 * t1) * u - 2.0 * (t + 1.0);
            for &u in &[0.4, 1.7, 3.2] {
                assert!((cubic(u) - (u - 1.0) * (a * u * u + b * u + c)).abs() < 1e-10);
            }
        }
        assert!(solve_fixed_points(&p(5.0, 1.0)).unwrap().roots.is_empty());
    }

    #[test]
    fn tangency_detected() {
        let theta1 = 3.0;
        let theta = xi(theta1).1;
        let set = solve_fixed_points(&p(theta, theta1)).unwrap();
        assert!(set.tangency);
        assert_eq!(set.roots.len(), 1);
        assert_eq!(classify_phase(&p(theta, theta1)).unwrap(), PhaseRegion::Tangency);
    }

    #[test]
    fn theta_star_is_branch_boundary() {
        let ts = theta_star();
        assert!(ts > 1.95 && ts < 1.97);
        assert!((theta_star_function(ts) - 4.0).abs() < 1e-10);
        assert!((ts - (1.0 + 2.0 * 2f64.sqrt()).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn xi_values() {
        let (x1, x2) = xi(3.0);
        assert!((x2 - (68.0 + 4.0 * 65f64.sqrt()) / 56.0).abs() < 1e-12);
        assert!((x1 * x2 - 8.0 / 7.0).abs() < 1e-12);
        let (u1, u2) = xi_unsimplified(3.0);
        assert!((u1 - x1).abs() < 1e-12 && (u2 - x2).abs() < 1e-12);
        assert!(x1 < 1.0 && 1.0 < x2);
    }

    #[test]
    fn existence_matches_root_count() {
        for i in 0..60 {
            let theta1 = 0.5 + 0.1 * i as f64;
            for j in 1..80 {
                let theta = 0.25 * j as f64;
                let has = !solve_fixed_points(&p(theta, theta1)).unwrap().roots.is_empty();
                let predicted = match existence_region(theta1) {
                    ExistenceRegion::Empty => false,
                    ExistenceRegion::Above { threshold } => theta > threshold,
                };
                assert_eq!(has, predicted, "theta={theta} theta1={theta1}");
            }
        }
    }

    #[test]
    fn transition_examples() {
        assert!(has_transition(&p(3.0, 3.0)).unwrap());
        assert!(!has_transition(&p(50.0, 2.0)).unwrap());
        assert!(!has_transition(&p(100.0, 1.5)).unwrap());
        assert!(has_transition(&BoltzmannParams::from_thetas(3.0, 2.0, 3.0).unwrap()).is_err());
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let q = p(2.3, 3.7);
        for &(u, v) in &[(1.0, 1.0), (2.0, 0.5), (0.3, 1.7)] {
            let j = jacobian_at(u, v, &q).unwrap();
            let h = 1e-6;
            let f = |a: f64, b: f64| step_ratio(&RatioState::new(a, b), &q).unwrap();
            let du = (f(u + h, v).u - f(u - h, v).u) / (2.0 * h);
            let dv = (f(u, v + h).u - f(u, v - h).u) / (2.0 * h);
            let eu = (f(u + h, v).v - f(u - h, v).v) / (2.0 * h);
            let ev = (f(u, v + h).v - f(u, v - h).v) / (2.0 * h);
            // The closed form is exact at fixed points; away from them only
            // the diagonal at (1, 1) and the structure are comparable.
            if u == 1.0 && v == 1.0 {
                assert!((j.m[0][0] - du).abs() < 1e-8 && (j.m[1][1] - ev).abs() < 1e-8);
                assert!(j.m[0][1].abs() < 1e-15 && dv.abs() < 1e-8 && eu.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn jacobian_at_fixed_points_matches_finite_differences() {
        let q = p(3.0, 3.0);
        let set = solve_fixed_points(&q).unwrap();
        for fp in &set.points {
            let (u, v) = (fp.state.u, fp.state.v);
            let j = jacobian_at(u, v, &q).unwrap();
            let h = 1e-6;
            let f = |a: f64, b: f64| step_ratio(&RatioState::new(a, b), &q).unwrap();
            let fd = [
                [(f(u + h, v).u - f(u - h, v).u) / (2.0 * h), (f(u, v + h).u - f(u, v - h).u) / (2.0 * h)],
                [(f(u + h, v).v - f(u - h, v).v) / (2.0 * h), (f(u, v + h).v - f(u, v - h).v) / (2.0 * h)],
            ];
            for r in 0..2 {
                for c in 0..2 {
                    assert!((j.m[r][c] - fd[r][c]).abs() < 1e-7, "{fp:?} entry {r}{c}: {} vs {}", j.m[r][c], fd[r][c]);
                }
            }
        }
    }

    #[test]
    fn disordered_eigenvalue() {
        let (t, t1) = (2.5, 3.5);
        let j = jacobian_at(1.0, 1.0, &p(t, t1)).unwrap();
        let expect = 2.0 * (t1 - 1.0) * (t * t1 + t + 1.0) / (t * t1 * t1 + 2.0 * t + 4.0 * t1 + 2.0);
        assert!((j.m[0][0] - expect).abs() < 1e-14 && (j.m[1][1] - expect).abs() < 1e-14);
        assert_eq!(j.m[0][1], 0.0);
    }

    #[test]
    fn stability_at_three_three() {
        let q = p(3.0, 3.0);
        let set = solve_fixed_points(&q).unwrap();
        let j1 = jacobian_at(set.roots[0], 1.0, &q).unwrap();
        let j2 = jacobian_at(set.roots[1], 1.0, &q).unwrap();
        assert!(j1.spectral_radius() < 1.0);
        assert!(j2.spectral_radius() > 1.0);
        assert!(attracting_on_line(set.roots[1], &q));
    }

    #[test]
    fn probe_examples() {
        let q = p(3.0, 3.0);
        let set = solve_fixed_points(&q).unwrap();
        let u2 = set.roots[1];
        let seeds = [RatioState::new(10.0, 1.0), RatioState::new(1.0, 1.0), RatioState::new(u2, 1.0 + 1e-6)];
        let out = convergence_basin_probe(&q, &seeds, 10_000, 1e-14).unwrap();
        let l0 = out[0].limit().unwrap();
        assert!((l0.u - set.roots[0]).abs() < 1e-9 && l0.v == 1.0);
        assert_eq!(out[1].limit().unwrap(), RatioState::new(1.0, 1.0));
        let l2 = out[2].limit().unwrap();
        assert!(l2.distance(&RatioState::new(u2, 1.0)) > 1e-3);
    }

    #[test]
    fn critical_curve_at_zero() {
        let c = critical_curve(0.0, 1e-12).unwrap();
        assert!((c.t_ratio - 1.0 / 4f64.ln()).abs() < 1e-10);
        assert_eq!(c.binding, BindingBranch::Phi);
        assert!(critical_curve(-1.5, 1e-10).is_err());
    }

    #[test]
    fn small_argument_forms() {
        for &x in &[0.2f64, 0.5, 1.0, 1.4] {
            let t: f64 = (1.0 / x).exp();
            let direct_phi = x * (2.0 / (t - 2.0)).ln();
            assert!((phi(x) - direct_phi).abs() < 1e-12);
            let direct_zeta = x * xi(t).1.ln();
            assert!((zeta(x) - direct_zeta).abs() < 1e-12);
        }
    }
}
