//! Free energy, internal energy and magnetization of the ordered phases.
//!
//! Throughout, `J` and `J1` denote the vector-normalised couplings
//! (two thirds of the Kronecker ones) and `u` a nontrivial root of the
//! fixed-point quadratic.

use serde::Serialize;

use crate::error::{check_finite, Error, Result};
use crate::field::{field_step, finite_volume_measure, log_a_coefficient, log_a_printed, Field, FieldAssignment};
use crate::phase::{quadratic_coefficients, solve_fixed_points};
use crate::recursion::{step_triple, SymmetricState};
use crate::spins::{BoltzmannParams, Spin};
use crate::tolerances::FIXED_POINT_RESIDUAL;

fn require_no_prolonged(p: &BoltzmannParams) -> Result<()> {
    if p.theta_p() != 1.0 {
        return Err(Error::Unsupported("thermodynamics needs a zero prolonged coupling".into()));
    }
    Ok(())
}

/// Translation-invariant field favouring `phase`, built from a root `u`.
pub fn fixed_point_field(phase: Spin, u: f64) -> Field {
    let c = 2.0 * u.ln() / 3.0;
    match phase {
        Spin::S1 => Field::new(c, 0.0),
        Spin::S2 => Field::new(0.0, c),
        Spin::S3 => Field::new(-c, -c),
    }
}

/// Largest componentwise change of a constant field under one step.
pub fn field_residual(h: &Field, p: &BoltzmannParams) -> f64 {
    let next = field_step(h, h, p);
    (next.h1 - h.h1).abs().max((next.h2 - h.h2).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreeEnergySeries {
    /// `S_n` for `n = 0..=n_max`.
    pub partial_sums: Vec<f64>,
    /// `-(1 / (3 beta 2^n)) (ln Z_(n+1) - ln Z_0)` from the three-component
    /// recursion, index-aligned with `partial_sums`.
    pub recursion_sums: Vec<f64>,
    /// `-(1 / (3 beta 2^n)) ln Z_n` from the recursion for `n = 0..=n_max`.
    pub literal_recursion: Vec<f64>,
    /// Closed-form limit `-(2 / (3 beta)) ln a`.
    pub limit: f64,
    pub log_a: f64,
    /// `max |ln a|` over the levels used.
    pub tail_constant: f64,
    /// `(1 / beta) ln a`.
    pub log_a_over_beta: f64,
    /// `limit / log_a_over_beta`.
    pub ratio_to_log_a_over_beta: f64,
    pub fixed_point_residual: f64,
    pub is_fixed_point: bool,
}

/// Partial sums of the free-energy series for a constant boundary field.
pub fn free_energy_limit(h: &Field, p: &BoltzmannParams, n_max: usize) -> Result<FreeEnergySeries> {
    require_no_prolonged(p)?;
    if !h.is_finite() {
        return Err(Error::InvalidParameter("field must be finite".into()));
    }
    let beta = p.beta();
    let residual = field_residual(h, p);
    let log_a = log_a_coefficient(h, h, p);
    check_finite("ln a", log_a)?;

    let mut partial_sums = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    for n in 0..=n_max {
        acc = 2.0 * acc + log_a;
        partial_sums.push(-acc / (3.0 * beta * 2f64.powi(n as i32)));
    }

    let c = p.couplings();
    let (bj, bj1) = (beta * c.vector_one_level(), beta * c.vector_nearest());
    let mut state = SymmetricState::from_field(h);
    let log_z0 = state.log_partition();
    let mut log_z = vec![log_z0];
    for m in 1..=n_max + 1 {
        state = step_triple(&state, p)?;
        let pairs = 2f64.powi(m as i32) - 1.0;
        log_z.push(state.log_partition() - 0.5 * bj * pairs - 0.5 * bj1 * 2.0 * pairs);
    }
    let recursion_sums = (0..=n_max)
        .map(|n| -(log_z[n + 1] - log_z0) / (3.0 * beta * 2f64.powi(n as i32)))
        .collect();
    let literal_recursion =
        (0..=n_max).map(|n| -log_z[n] / (3.0 * beta * 2f64.powi(n as i32))).collect();

    let limit = -2.0 * log_a / (3.0 * beta);
    let log_a_over_beta = log_a / beta;
    Ok(FreeEnergySeries {
        partial_sums,
        recursion_sums,
        literal_recursion,
        limit,
        log_a,
        tail_constant: log_a.abs(),
        log_a_over_beta,
        ratio_to_log_a_over_beta: limit / log_a_over_beta,
        fixed_point_residual: residual,
        is_fixed_point: residual <= FIXED_POINT_RESIDUAL,
    })
}

fn check_root(p: &BoltzmannParams, u: f64) -> Result<()> {
    require_no_prolonged(p)?;
    if !(u.is_finite() && u > 0.0) {
        return Err(Error::InvalidParameter(format!("root must be positive, got {u}")));
    }
    let (a, b, c) = quadratic_coefficients(p.theta(), p.theta1());
    let r = a * u * u + b * u + c;
    if r.abs() > 1e-8 * (a * u * u).abs().max(c.abs()) {
        return Err(Error::InvalidParameter(format!("{u} is not a root of the fixed-point quadratic (residual {r:e})")));
    }
    Ok(())
}

/// `beta F = -(J/2 + J1) beta + ln(u)/3 + ln(theta1 - 1) + ln(theta (theta1 + 1)(u + 1) + 2)`.
pub fn free_energy_closed(p: &BoltzmannParams, u: f64) -> Result<f64> {
    check_root(p, u)?;
    let (t, t1) = (p.theta(), p.theta1());
    if t1 <= 1.0 {
        return Err(Error::Numerical("ln(theta1 - 1) is undefined for theta1 <= 1".into()));
    }
    let c = p.couplings();
    let v = -(c.vector_one_level() / 2.0 + c.vector_nearest()) * p.beta()
        + u.ln() / 3.0
        + (t1 - 1.0).ln()
        + (t * (t1 + 1.0) * (u + 1.0) + 2.0).ln();
    check_finite("free energy", v)
}

/// The same quantity before the quadratic is used to simplify it.
pub fn free_energy_unsimplified(p: &BoltzmannParams, u: f64) -> Result<f64> {
    check_root(p, u)?;
    let (t, t1) = (p.theta(), p.theta1());
    let c = p.couplings();
    let g = t * u * u + 2.0 * (t1 + 1.0) * u + t1 * t1 * t + 2.0 * t1 + t;
    check_finite("free energy", -(c.vector_one_level() / 2.0 + c.vector_nearest()) * p.beta() + u.ln() / 3.0 + g.ln())
}

/// `du/dbeta` by implicit differentiation of the quadratic.
pub fn du_dbeta(p: &BoltzmannParams, u: f64) -> Result<f64> {
    check_root(p, u)?;
    let (t, t1) = (p.theta(), p.theta1());
    let c = p.couplings();
    let (j, j1) = (c.vector_one_level(), c.vector_nearest());
    let den = 2.0 * t * u + (t1 + 1.0) * (t * (1.0 - t1) + 2.0);
    if den.abs() < 1e-12 * (2.0 * t * u).abs().max(1.0) {
        return Err(Error::Numerical("tangency: du/dbeta is singular".into()));
    }
    Ok(3.0 * ((j1 * t1 * (t * t1 - 1.0) + j * (t1 + 1.0)) * u + j) / den)
}

/// Internal energy, the beta-derivative of [`free_energy_closed`].
pub fn internal_energy(p: &BoltzmannParams, u: f64) -> Result<f64> {
    let du = du_dbeta(p, u)?;
    let (t, t1) = (p.theta(), p.theta1());
    if t1 <= 1.0 {
        return Err(Error::Numerical("theta1 must exceed one".into()));
    }
    let c = p.couplings();
    let (j, j1) = (c.vector_one_level(), c.vector_nearest());
    let d2 = t * (t1 + 1.0) * (u + 1.0) + 2.0;
    let v = -(j / 2.0 + j1)
        + du / (3.0 * u)
        + 1.5 * j1 * t1 / (t1 - 1.0)
        + (1.5 * j * t * (t1 + 1.0) * (u + 1.0) + 1.5 * j1 * t * t1 * (u + 1.0) + t * (t1 + 1.0) * du) / d2;
    check_finite("internal energy", v)
}

/// The two textbook rearrangements of the internal energy, evaluated as
/// written. They differ from [`internal_energy`]; kept for comparison.
pub fn internal_energy_printed(p: &BoltzmannParams, u: f64) -> Result<[f64; 2]> {
    let du = du_dbeta(p, u)?;
    let (t, t1) = (p.theta(), p.theta1());
    let c = p.couplings();
    let (j, j1) = (c.vector_one_level(), c.vector_nearest());
    let d2 = t * (t1 + 1.0) * (u + 1.0) + 2.0;
    let first = -(j / 2.0 + j1)
        + 1.5 * (j1 / (t1 - 1.0) + t * ((j + j1) * t1 + j) * (u + 1.0) / d2)
        + (t * (t1 + 1.0) * (4.0 * u + 1.0) + 2.0) / (3.0 * u * d2) * du;
    let second = -(j / 2.0 + j1)
        + 1.5 * (t * t1 * (j1 * (t1 * t1 + 1.0) + j * (t1 - 1.0)) * (u + 1.0) + 2.0 * j1)
            / (t * (t1 * t1 - 1.0) * (u + 1.0) + 2.0 * (t1 - 1.0))
        + (t * (t1 + 1.0) * (4.0 * u + 1.0) + 2.0)
            / ((t * (t1 + 1.0) * (t * t1 - 2.0) - 2.0) * u - 2.0 * (t + 1.0) * (t1 + 1.0))
            * (((j1 * t1 * (t * t1 - 1.0) + j * (t1 + 1.0)) * u + j)
                / (2.0 * t * u + (t1 + 1.0) * (t * (1.0 - t1) + 2.0)));
    Ok([first, second])
}

/// Free energy from the `a` factor with the scaled field dropped from the
/// exponent, which equals [`free_energy_unsimplified`] at `h*`.
pub fn log_a_printed_at_root(p: &BoltzmannParams, u: f64) -> f64 {
    let h = fixed_point_field(Spin::S1, u);
    log_a_printed(&h, &h, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MagnetizationVariant {
    /// Magnitude `(u - 1) / (u + 2)` for all three phases.
    Symmetric,
    /// Magnitude `(u - 1) / (2u + 1)` for the third phase.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Magnetization {
    pub phase: Spin,
    /// Mean spin vector in planar coordinates.
    pub vector: [f64; 2],
    pub magnitude: f64,
    /// Alternative magnitude for the third phase; equals `magnitude` otherwise.
    pub printed_magnitude: f64,
    /// Variant confirmed by exact root marginals.
    pub validated: MagnetizationVariant,
}

pub fn magnetization(phase: Spin, u: f64) -> Result<Magnetization> {
    if !(u.is_finite() && u > 0.0) {
        return Err(Error::InvalidParameter(format!("root must be positive, got {u}")));
    }
    let magnitude = (u - 1.0) / (u + 2.0);
    let printed_magnitude = if phase == Spin::S3 { (u - 1.0) / (2.0 * u + 1.0) } else { magnitude };
    let [x, y] = phase.cartesian();
    Ok(Magnetization {
        phase,
        vector: [magnitude * x, magnitude * y],
        magnitude,
        printed_magnitude,
        validated: MagnetizationVariant::Symmetric,
    })
}

/// Exact root marginal of the depth-`n` measure with constant field `h`
/// on its last level.
pub fn root_marginal(p: &BoltzmannParams, h: &Field, n: usize) -> Result<[f64; 3]> {
    require_no_prolonged(p)?;
    Ok(finite_volume_measure(n, &FieldAssignment::constant(n, *h), p)?.root_marginal())
}

/// Larger ordered root, if any.
pub fn ordered_root(p: &BoltzmannParams) -> Result<Option<f64>> {
    Ok(solve_fixed_points(p)?.roots.first().copied())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spins::CouplingSet;

    fn unit_couplings(beta: f64) -> BoltzmannParams {
        BoltzmannParams::new(CouplingSet::new(1.5, 0.0, 1.5).unwrap(), beta).unwrap()
    }

    fn three() -> BoltzmannParams {
        unit_couplings(2.0 * 3f64.ln() / 3.0)
    }

    #[test]
    fn free_energy_example() {
        let p = three();
        assert!((p.theta() - 3.0).abs() < 1e-14 && (p.theta1() - 3.0).abs() < 1e-14);
        let u = ordered_root(&p).unwrap().unwrap();
        let f = free_energy_closed(&p, u).unwrap();
        let expect = -3f64.ln() + u.ln() / 3.0 + 2f64.ln() + (12.0 * (u + 1.0) + 2.0).ln();
        assert!((f - expect).abs() < 1e-12);
        assert!((f - 4.3825).abs() < 1e-3);
        assert!((f - free_energy_unsimplified(&p, u).unwrap()).abs() < 1e-9);
        assert!((f - log_a_printed_at_root(&p, u)).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_roots() {
        let p = three();
        assert!(free_energy_closed(&p, 2.0).is_err());
        let q = BoltzmannParams::from_thetas(3.0, 1.0, 1.0).unwrap();
        assert!(free_energy_closed(&q, 1.0).is_err());
    }

    #[test]
    fn internal_energy_is_beta_derivative() {
        let beta0 = three().beta();
        let bf = |b: f64| {
            let q = unit_couplings(b);
            free_energy_closed(&q, ordered_root(&q).unwrap().unwrap()).unwrap()
        };
        let p = three();
        let u = ordered_root(&p).unwrap().unwrap();
        let fd = |h: f64| (bf(beta0 + h) - bf(beta0 - h)) / (2.0 * h);
        let (d1, d2) = (fd(1e-5), fd(5e-6));
        let richardson = (4.0 * d2 - d1) / 3.0;
        let exact = internal_energy(&p, u).unwrap();
        assert!((exact - d1).abs() < 1e-6, "{exact} vs {d1}");
        assert!((exact - richardson).abs() < 1e-6);
        let printed = internal_energy_printed(&p, u).unwrap();
        assert!((printed[0] - (exact - 1.5 * p.couplings().vector_nearest())).abs() < 1e-10);
    }

    #[test]
    fn du_dbeta_matches_finite_difference() {
        let p = three();
        let u = ordered_root(&p).unwrap().unwrap();
        let root = |b: f64| ordered_root(&unit_couplings(b)).unwrap().unwrap();
        let h = 1e-6;
        let fd = (root(p.beta() + h) - root(p.beta() - h)) / (2.0 * h);
        assert!((du_dbeta(&p, u).unwrap() - fd).abs() < 1e-6);
    }

    #[test]
    fn magnetization_values() {
        let m = magnetization(Spin::S1, 1.0).unwrap();
        assert_eq!(m.magnitude, 0.0);
        let u = ordered_root(&three()).unwrap().unwrap();
        assert!((magnetization(Spin::S1, u).unwrap().magnitude - 0.5572).abs() < 1e-4);
        assert!((magnetization(Spin::S2, 1e12).unwrap().magnitude - 1.0).abs() < 1e-11);
        let m3 = magnetization(Spin::S3, u).unwrap();
        assert!(m3.printed_magnitude < m3.magnitude);
    }

    #[test]
    fn series_constant_a() {
        let p = BoltzmannParams::from_thetas(1.0, 1.0, 1.0).unwrap();
        let s = free_energy_limit(&Field::ZERO, &p, 30).unwrap();
        assert!((s.log_a - 9f64.ln()).abs() < 1e-14);
        assert!((s.limit + 2.0 * 9f64.ln() / 3.0).abs() < 1e-14);
        assert!((s.ratio_to_log_a_over_beta + 2.0 / 3.0).abs() < 1e-14);
        assert!(s.is_fixed_point);
    }

    #[test]
    fn root_marginal_phases() {
        let p = three();
        let u = ordered_root(&p).unwrap().unwrap();
        let m = root_marginal(&p, &fixed_point_field(Spin::S1, u), 2).unwrap();
        assert!((m[0] - u / (u + 2.0)).abs() < 1e-12);
        assert!((m[1] - 1.0 / (u + 2.0)).abs() < 1e-12);
        let z = root_marginal(&p, &Field::ZERO, 2).unwrap();
        assert!(z.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-14));
    }
}
