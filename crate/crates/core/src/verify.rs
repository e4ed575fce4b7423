//! The acceptance suite: ten cross-checks between the recursion, the
//! closed forms and brute-force enumeration.
//!
//! Every check returns a [`CheckReport`]. A check that errors is reported
//! as failed with the error in `detail`; nothing is skipped.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::field::{check_consistency, Field, FieldAssignment};
use crate::ground_states::{count_ground_states, representative_couplings, Family, RegionB};
use crate::oracle::{enumerate_field_partition, enumerate_min_energy, enumerate_partition_with, MAX_DEPTH, MINIMIZER_CAP};
use crate::phase::{
    convergence_basin_probe, critical_curve, existence_region, has_transition, jacobian_at, restricted_map, solve_fixed_points,
    theta_star, theta_star_function, xi, Eigenvalues, ExistenceRegion, FixedPointLabel, ProbeOutcome, CRITICAL_BRACKET_HI,
};
use crate::recursion::{
    abc_coefficients, initial_reduced, initial_state, step_from_coefficients, step_full, step_reduced, FullState, RatioState,
};
use crate::spins::{BoltzmannParams, BoundaryKind, CouplingSet, Spin};
use crate::thermo::{
    fixed_point_field, free_energy_closed, free_energy_limit, internal_energy, magnetization, ordered_root, root_marginal,
};
use crate::tolerances::{relative_diff, BASIN_MATCH, CRITICAL_CURVE};

/// Relative error allowed between recursion and enumeration.
pub const ORACLE_ACCEPT: f64 = 1e-9;
/// Wall-clock budget for the enumeration sweep, seconds.
pub const ORACLE_BUDGET_SECS: f64 = 120.0;
/// Number of random parameter triples in the enumeration sweep.
pub const ORACLE_TRIPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Fault {
    /// Scales one child-sum coefficient of the full recursion by `1 + 1e-6`.
    RecursionCoefficient,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Largest enumeration depth, `1..=3`.
    pub max_depth: usize,
    pub seed: u64,
    pub fault: Option<Fault>,
    pub exec: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { max_depth: MAX_DEPTH, seed: 20240501, fault: None, exec: Execution::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub metrics: BTreeMap<String, f64>,
    pub failures: Vec<String>,
}

impl CheckReport {
    /// One line: `PASS [3] name: detail`.
    pub fn summary_line(&self) -> String {
        format!("{} [{}] {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

pub const CHECK_NAMES: [&str; 10] = [
    "oracle equivalence",
    "boundary symmetry of ratios",
    "reduced-system invariants",
    "fixed-point algebra",
    "stability of symmetric fixed points",
    "critical curve",
    "measure consistency",
    "ground states",
    "thermodynamics",
    "resolved discrepancies",
];

/// Collects metrics and failures for one check.
struct Recorder {
    metrics: BTreeMap<String, f64>,
    failures: Vec<String>,
}

impl Recorder {
    fn new() -> Self {
        Recorder { metrics: BTreeMap::new(), failures: Vec::new() }
    }

    fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    /// Keeps the largest value seen under `key`.
    fn worst(&mut self, key: &str, value: f64) {
        let slot = self.metrics.entry(key.to_string()).or_insert(f64::NEG_INFINITY);
        if value > *slot || value.is_nan() {
            *slot = value;
        }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn within(&mut self, key: &str, err: f64, tol: f64, what: impl FnOnce() -> String) {
        self.worst(key, err);
        if !(err <= tol) {
            self.failures.push(format!("{}: {err:e} > {tol:e}", what()));
        }
    }
}

pub fn run_all(opts: &VerifyOptions) -> Vec<CheckReport> {
    (1..=10).map(|id| run_check(id, opts)).collect()
}

pub fn run_check(id: u8, opts: &VerifyOptions) -> CheckReport {
    let mut rec = Recorder::new();
    let outcome = match id {
        1 => check_oracle(opts, &mut rec),
        2 => check_boundary_symmetry(opts, &mut rec),
        3 => check_reduced_invariants(&mut rec),
        4 => check_fixed_point_algebra(&mut rec),
        5 => check_stability(&mut rec),
        6 => check_critical_curve(&mut rec),
        7 => check_consistency_suite(opts, &mut rec),
        8 => check_ground_states(&mut rec),
        9 => check_thermodynamics(opts, &mut rec),
        10 => check_discrepancies(opts, &mut rec),
        _ => Err(Error::InvalidParameter(format!("no check with id {id}"))),
    };
    if let Err(e) = outcome {
        rec.failures.push(format!("error: {e}"));
    }
    let passed = rec.failures.is_empty();
    let detail = if passed {
        "ok".to_string()
    } else {
        let shown: Vec<_> = rec.failures.iter().take(3).cloned().collect();
        let more = rec.failures.len().saturating_sub(3);
        if more > 0 {
            format!("{} (+{more} more)", shown.join("; "))
        } else {
            shown.join("; ")
        }
    };
    let name = CHECK_NAMES.get(id.wrapping_sub(1) as usize).copied().unwrap_or("unknown");
    CheckReport { id, name, passed, detail, metrics: rec.metrics, failures: rec.failures }
}

fn params(theta: f64, theta_p: f64, theta1: f64) -> Result<BoltzmannParams> {
    BoltzmannParams::from_thetas(theta, theta_p, theta1)
}

fn boundaries() -> [BoundaryKind; 4] {
    [BoundaryKind::Free, BoundaryKind::Const(Spin::S1), BoundaryKind::Const(Spin::S2), BoundaryKind::Const(Spin::S3)]
}

fn random_triples(seed: u64, count: usize) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (rng.gen_range(0.5..=5.0), rng.gen_range(0.5..=5.0), rng.gen_range(0.5..=5.0))).collect()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Full recursion to depth `n`, optionally with a perturbed coefficient.
fn recursion_state(boundary: &BoundaryKind, p: &BoltzmannParams, n: usize, fault: Option<Fault>) -> Result<FullState> {
    let mut s = initial_state(boundary, p)?;
    while s.level < n {
        s = match fault {
            None => step_full(&s, p)?,
            Some(Fault::RecursionCoefficient) => {
                let mut coef = abc_coefficients(&s, p);
                coef.s[0][0] *= 1.0 + 1e-6;
                let next = step_from_coefficients(&s, &coef, p);
                let m = next.x.iter().cloned().fold(0.0, f64::max);
                FullState { x: next.x.map(|v| v / m), level: next.level, log_scale: next.log_scale + m.ln() }
            }
        };
    }
    Ok(s)
}

fn check_oracle(opts: &VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let start = Instant::now();
    let depth = opts.max_depth.clamp(1, MAX_DEPTH);
    let triples = random_triples(opts.seed, ORACLE_TRIPLES);
    let mut runs = 0;
    for n in 1..=depth {
        for &(t, tp, t1) in &triples {
            let p = params(t, tp, t1)?;
            for boundary in boundaries() {
                let s = recursion_state(&boundary, &p, n, opts.fault)?;
                let e = enumerate_partition_with(n, boundary, &p, opts.exec)?;
                let rec_z = s.expand().map(|x| (x.ln() + s.log_scale).exp());
                let err = rec_z.iter().zip(&e.components).map(|(a, b)| relative_diff(*a, *b)).fold(0.0, f64::max);
                rec.within(&format!("max_rel_err_n{n}"), err, ORACLE_ACCEPT, || {
                    format!("n={n} {boundary:?} theta=({t:.3},{tp:.3},{t1:.3})")
                });
                runs += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    rec.metric("runs", runs as f64);
    rec.metric("seconds", secs);
    rec.require(secs <= ORACLE_BUDGET_SECS, || format!("enumeration sweep took {secs:.1}s"));
    Ok(())
}

fn check_boundary_symmetry(opts: &VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let mut sets = random_triples(opts.seed ^ 0x5eed, 6);
    sets.push((3.0, 1.0, 3.0));
    sets.push((0.7, 2.0, 4.0));
    for (t, tp, t1) in sets {
        let p = params(t, tp, t1)?;
        for boundary in boundaries() {
            let mut s = initial_state(&boundary, &p)?;
            loop {
                let RatioState { u, v } = s.symmetric_sums().ratios();
                let (err, what) = match boundary {
                    BoundaryKind::Free => ((u - 1.0).abs().max((v - 1.0).abs()), "u=v=1"),
                    BoundaryKind::Const(Spin::S1) => ((v - 1.0).abs(), "v=1"),
                    BoundaryKind::Const(Spin::S2) => ((u - 1.0).abs(), "u=1"),
                    _ => (relative_diff(u, v), "u=v"),
                };
                let level = s.level;
                rec.within("max_deviation", err, 1e-12, || format!("{what} at n={level}, theta=({t:.3},{tp:.3},{t1:.3})"));
                if s.level >= 12 {
                    break;
                }
                s = step_full(&s, &p)?;
            }
        }
    }
    Ok(())
}

fn check_reduced_invariants(rec: &mut Recorder) -> Result<()> {
    for (t, tp, t1) in [(3.0, 1.0, 3.0), (1.7, 0.6, 2.3), (0.8, 2.5, 1.4), (4.2, 1.9, 0.7)] {
        let p = params(t, tp, t1)?;
        let mut s = initial_reduced(&p)?;
        loop {
            let y = |k: usize| s.y[k - 1];
            let rel = |a: f64, b: f64| relative_diff(a, b);
            let err = rel(t * y(2) * y(2), y(1) * y(3))
                .max(rel(t * t * y(5) * y(5), y(4) * y(7)))
                .max(rel(t * t * y(6) * y(6), y(4) * y(9)))
                .max(rel(t * t * y(8) * y(8), y(7) * y(9)));
            let level = s.level;
            rec.within("max_invariant_rel_err", err, 1e-10, || format!("n={level}, theta=({t},{tp},{t1})"));
            if s.level >= 10 {
                break;
            }
            s = step_reduced(&s, &p)?;
        }
    }
    for (t, tp) in [(2.0, 1.0), (3.0, 0.5), (0.7, 2.0), (4.0, 3.0)] {
        let p = params(t, tp, 1.0)?;
        let mut s = initial_state(&BoundaryKind::Const(Spin::S1), &p)?;
        let mut worst: f64 = 0.0;
        loop {
            let u = s.symmetric_sums().ratios().u;
            worst = worst.max((u - 1.0).abs());
            if s.level >= 10 {
                break;
            }
            s = step_full(&s, &p)?;
        }
        rec.within("theta1_one_max_ratio_deviation", worst, 1e-12, || format!("theta1=1 gives z1/z3 != 1 for theta={t}, theta_p={tp}"));
    }
    Ok(())
}

fn check_fixed_point_algebra(rec: &mut Recorder) -> Result<()> {
    let grid = linspace(0.5, 8.0, 16);
    for &t in &grid {
        for &t1 in &grid {
            let err = (restricted_map(1.0, t, t1) - 1.0).abs();
            rec.within("unit_root_residual", err, 1e-12, || format!("u=1 is not fixed at ({t},{t1})"));
            let set = solve_fixed_points(&params(t, 1.0, t1)?)?;
            if set.roots.len() == 2 {
                let prod = set.roots[0] * set.roots[1];
                let err = relative_diff(prod, 2.0 * (t + 1.0) / t);
                rec.within("root_product_rel_err", err, 1e-12, || format!("root product at ({t},{t1})"));
            }
        }
    }
    let set = solve_fixed_points(&params(3.0, 1.0, 3.0)?)?;
    let r = 160f64.sqrt();
    rec.require(set.roots.len() == 2, || "expected two roots at theta=theta1=3".into());
    if set.roots.len() == 2 {
        let err = (set.roots[0] - (16.0 + r) / 6.0).abs().max((set.roots[1] - (16.0 - r) / 6.0).abs());
        rec.within("roots_at_three", err, 1e-12, || "roots at theta=theta1=3".into());
    }
    let ts = theta_star();
    for t1 in linspace(ts + 0.05, 10.0, 25) {
        let (x1, x2) = xi(t1);
        let expect = 4.0 * (t1 + 1.0).powi(2) / ((t1 * t1 - 1.0).powi(2) - 8.0);
        rec.within("xi_product_rel_err", relative_diff(x1 * x2, expect), 1e-10, || format!("xi product at theta1={t1}"));
    }
    rec.metric("theta_star", ts);
    rec.require(ts > 1.95 && ts < 1.97, || format!("theta* = {ts} outside (1.95, 1.97)"));
    rec.within("theta_star_residual", (theta_star_function(ts) - 4.0).abs(), 1e-10, || "g(theta*) != 4".into());
    Ok(())
}

fn check_stability(rec: &mut Recorder) -> Result<()> {
    let seeds = [RatioState::new(10.0, 1.0), RatioState::new(0.1, 1.0)];
    let distinct_attractors = |p: &BoltzmannParams| -> Result<(bool, bool)> {
        let out = convergence_basin_probe(p, &seeds, 200_000, 1e-13)?;
        let mut limits = Vec::new();
        let mut all_converged = true;
        for o in &out {
            match o {
                ProbeOutcome::Converged { limit, matched, attracting_on_line, .. } => {
                    if matched.is_some() && *attracting_on_line {
                        limits.push(*limit);
                    }
                }
                ProbeOutcome::NotConverged { .. } => all_converged = false,
            }
        }
        let distinct = limits.len() == 2 && limits[0].distance(&limits[1]) > BASIN_MATCH;
        Ok((distinct, all_converged))
    };

    let mut inside = 0;
    for t1 in linspace(2.2, 6.0, 10) {
        let base = (2.0 / (t1 - 2.0)).max(xi(t1).1);
        for k in 0..10 {
            let t = base * 1.02 * (3.0f64 / 1.02).powf(k as f64 / 9.0);
            let p = params(t, 1.0, t1)?;
            if !has_transition(&p)? {
                rec.failures.push(format!("grid point ({t},{t1}) is outside the transition region"));
                continue;
            }
            inside += 1;
            let set = solve_fixed_points(&p)?;
            for fp in &set.points {
                let FixedPointLabel::Ordered { root, .. } = fp.label else { continue };
                let jac = jacobian_at(fp.state.u, fp.state.v, &p)?;
                let ev = jac.eigenvalues();
                rec.require(matches!(ev, Eigenvalues::Real(..)), || format!("complex eigenvalues at {:?}, ({t},{t1})", fp.state));
                let rho = jac.spectral_radius();
                if root == 1 {
                    rec.worst("max_radius_first_orbit", rho);
                    rec.require(rho < 1.0, || format!("radius {rho} >= 1 on the first orbit at ({t},{t1})"));
                } else {
                    rec.worst("max_neg_radius_second_orbit", -rho);
                    rec.require(rho > 1.0, || format!("radius {rho} <= 1 on the second orbit at ({t},{t1})"));
                }
            }
            let (distinct, converged) = distinct_attractors(&p)?;
            rec.require(converged && distinct, || format!("seeds do not reach distinct attractors at ({t},{t1})"));
        }
    }
    rec.metric("grid_points", inside as f64);

    // Points with no ordered fixed points: both seeds must share a limit.
    let mut outside = 0;
    for t1 in linspace(1.2, 6.0, 10) {
        let top = match existence_region(t1) {
            ExistenceRegion::Empty => 20.0,
            ExistenceRegion::Above { threshold } => 0.95 * threshold,
        };
        for t in linspace(0.2, top, 5) {
            let p = params(t, 1.0, t1)?;
            let (distinct, converged) = distinct_attractors(&p)?;
            outside += 1;
            rec.require(converged && !distinct && !has_transition(&p)?, || format!("seeds separate at ({t},{t1}) without ordered roots"));
        }
    }
    rec.metric("control_points", outside as f64);

    // Between the existence threshold and the transition condition the
    // seeds also separate; counted for the record.
    let mut sliver = 0;
    for t1 in linspace(2.2, 3.5, 6) {
        let (lo, hi) = (xi(t1).1, 2.0 / (t1 - 2.0));
        if lo >= hi {
            continue;
        }
        let t = 0.5 * (lo + hi);
        let p = params(t, 1.0, t1)?;
        if distinct_attractors(&p)?.0 && !has_transition(&p)? {
            sliver += 1;
        }
    }
    rec.metric("sliver_points_with_two_limits", sliver as f64);
    Ok(())
}

fn check_critical_curve(rec: &mut Recorder) -> Result<()> {
    let c0 = critical_curve(0.0, CRITICAL_CURVE)?;
    let target = 1.0 / 4f64.ln();
    rec.metric("t_c_at_zero", c0.t_ratio);
    rec.within("zero_ratio_err", (c0.t_ratio - target).abs(), 1e-6, || "critical_curve(0) != 1/ln 4".into());
    rec.within("critical_theta1_err", ((1.0 / c0.t_ratio).exp() - 4.0).abs(), 1e-5, || "critical theta1 != 4".into());
    for j in linspace(0.0, 5.0, 51) {
        let a = critical_curve(j, CRITICAL_CURVE)?;
        let b = critical_curve(j, CRITICAL_CURVE / 2.0)?;
        rec.require(a.t_ratio < CRITICAL_BRACKET_HI, || format!("T_c/J1 = {} at J/J1 = {j}", a.t_ratio));
        rec.worst("max_t_c", a.t_ratio);
        rec.within("halving_change", (a.t_ratio - b.t_ratio).abs(), 1e-8, || format!("unstable at J/J1 = {j}"));
    }
    Ok(())
}

fn check_consistency_suite(opts: &VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let p = params(3.0, 1.0, 3.0)?;
    let u = ordered_root(&p)?.ok_or_else(|| Error::NoSolution("no ordered root at theta=theta1=3".into()))?;
    let h = fixed_point_field(Spin::S1, u);
    let top = opts.max_depth.clamp(1, MAX_DEPTH);
    for n in 2..=top.clamp(2, MAX_DEPTH) {
        let report = check_consistency(n, &FieldAssignment::constant(n - 1, h), &FieldAssignment::constant(n, h), &p)?;
        rec.within("marginal_discrepancy", report.max_marginal_discrepancy, 1e-12, || format!("marginals at n={n}"));
        rec.within("normalization_discrepancy", report.normalization_discrepancy, 1e-12, || format!("Z recursion at n={n}"));
        let wrong = Field::new(1.0, 0.0);
        let bad = check_consistency(n, &FieldAssignment::constant(n - 1, wrong), &FieldAssignment::constant(n, wrong), &p)?;
        rec.metric(&format!("wrong_field_discrepancy_n{n}"), bad.max_marginal_discrepancy);
        rec.require(bad.max_marginal_discrepancy > 1e-3, || format!("wrong field not detected at n={n}"));
    }
    Ok(())
}

fn check_ground_states(rec: &mut Recorder) -> Result<()> {
    let b1 = representative_couplings(RegionB::B1)?;
    let min = enumerate_min_energy(2, &b1, MINIMIZER_CAP)?;
    rec.metric("b1_minimizers", min.count as f64);
    let all_constant = min.minimizers.iter().all(|c| c.spins().iter().all(|&s| s == c.spins()[0]));
    rec.require(min.count == 3 && all_constant, || format!("{} minimisers in B1 at depth 2", min.count));

    let ti = count_ground_states(RegionB::B1, 6, Family::TranslationInvariant)?;
    rec.metric("b1_translation_invariant", ti.count() as f64);
    rec.require(ti.count() == 3, || format!("{} translation-invariant ground states in B1", ti.count()));

    let quasi = count_ground_states(RegionB::B2, 6, Family::Quasi)?;
    rec.metric("b2_quasi", quasi.count() as f64);
    rec.require(quasi.count() == quasi.checked && quasi.count() == 6, || format!("{} of {} quasi states verify in B2", quasi.count(), quasi.checked));

    for k in 2..=4 {
        let per = count_ground_states(RegionB::B3, 6, Family::Periodic(k))?;
        rec.metric(&format!("b3_periodic_{k}"), per.count() as f64);
        rec.require(per.count() == per.checked, || format!("{} of {} period-{k} words verify in B3", per.count(), per.checked));
        if k == 2 {
            rec.require(per.count() == 6, || format!("{} period-2 ground states in B3", per.count()));
        }
    }
    Ok(())
}

fn unit_couplings(beta: f64) -> Result<BoltzmannParams> {
    BoltzmannParams::new(CouplingSet::new(1.5, 0.0, 1.5)?, beta)
}

fn check_thermodynamics(opts: &VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let beta0 = 2.0 * 3f64.ln() / 3.0;
    let p = unit_couplings(beta0)?;
    let u = ordered_root(&p)?.ok_or_else(|| Error::NoSolution("no ordered root".into()))?;
    let h = fixed_point_field(Spin::S1, u);

    let series = free_energy_limit(&h, &p, 40)?;
    for (n, w) in series.partial_sums.windows(2).enumerate() {
        let bound = series.tail_constant / p.beta() * 2f64.powi(-(n as i32));
        rec.require((w[1] - w[0]).abs() <= bound, || format!("increment {n} exceeds C 2^-n"));
    }
    let recursion_limit = *series.recursion_sums.last().expect("nonempty");
    rec.within("series_vs_recursion", (series.limit - recursion_limit).abs(), 1e-8, || "series limit vs recursion".into());
    let literal = *series.literal_recursion.last().expect("nonempty");
    rec.metric("literal_over_limit", literal / series.limit);

    let bf = |b: f64| -> Result<f64> {
        let q = unit_couplings(b)?;
        let r = ordered_root(&q)?.ok_or_else(|| Error::NoSolution("root vanished".into()))?;
        free_energy_closed(&q, r)
    };
    let step = 1e-5;
    let fd = (bf(beta0 + step)? - bf(beta0 - step)?) / (2.0 * step);
    rec.within("internal_energy_fd_err", (internal_energy(&p, u)? - fd).abs(), 1e-6, || "U vs d(beta F)/d beta".into());

    let expect = u / (u + 2.0);
    for n in 1..=opts.max_depth.clamp(1, MAX_DEPTH) {
        let m = root_marginal(&p, &h, n)?;
        rec.within("root_marginal_err", (m[0] - expect).abs(), 1e-9, || format!("root marginal at n={n}"));
    }

    let mut last = -1.0;
    let mut final_m = 0.0;
    for beta in linspace(1.0, 12.0, 23) {
        let q = unit_couplings(beta)?;
        let Some(r) = ordered_root(&q)? else {
            rec.failures.push(format!("no ordered phase at beta={beta}"));
            continue;
        };
        let m = magnetization(Spin::S1, r)?;
        let [x, y] = m.vector;
        let aligned = y.abs() <= 1e-14 && x >= 0.0;
        rec.require(aligned && m.magnitude > last, || format!("magnetization not monotone along eta1 at beta={beta}"));
        last = m.magnitude;
        final_m = m.magnitude;
    }
    rec.metric("final_magnetization", final_m);
    rec.require(final_m > 0.99, || format!("final |M1| = {final_m}"));
    Ok(())
}

fn check_discrepancies(opts: &VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let depth = opts.max_depth.clamp(1, MAX_DEPTH);
    for (t, t1) in [(3.0, 3.0), (2.5, 4.0), (1.2, 6.0), (10.0, 2.5)] {
        let p = params(t, 1.0, t1)?;
        let Some(u) = ordered_root(&p)? else {
            rec.failures.push(format!("no ordered root at ({t},{t1})"));
            continue;
        };
        let h = fixed_point_field(Spin::S3, u);
        let m = crate::field::finite_volume_measure(depth, &FieldAssignment::constant(depth, h), &p)?;
        let [x, y] = m.root_magnetization();
        let exact = x.hypot(y);
        let mag = magnetization(Spin::S3, u)?;
        let sym_err = (exact - mag.magnitude).abs();
        let printed_err = (exact - mag.printed_magnitude).abs();
        rec.within("m3_symmetric_err", sym_err, 1e-9, || format!("symmetric M3 at ({t},{t1})"));
        rec.worst("m3_printed_err", printed_err);

        let series = free_energy_limit(&fixed_point_field(Spin::S1, u), &p, 10)?;
        rec.within("prefactor_ratio_err", (series.ratio_to_log_a_over_beta + 2.0 / 3.0).abs(), 1e-9, || {
            format!("free-energy ratio at ({t},{t1})")
        });
        let z = enumerate_field_partition(depth, &fixed_point_field(Spin::S1, u), &p)?;
        rec.worst("field_partition_log", z.ln());
    }
    let printed_max = rec.metrics.get("m3_printed_err").copied().unwrap_or(0.0);
    rec.require(printed_max > 1e-3, || "alternative M3 denominator unexpectedly agrees with the exact marginal".into());
    Ok(())
}
