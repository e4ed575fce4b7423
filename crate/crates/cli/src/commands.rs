use bethe_potts::exec::Execution;
use bethe_potts::ground_states::{
    build_ground_state, classify_couplings, family_specs, verify_ground_state, Family, GroundStateSpec,
};
use bethe_potts::phase::{
    classify_phase, critical_curve, diagram_params, has_transition, jacobian_at, restricted_slope, solve_fixed_points,
    BindingBranch, Eigenvalues, FixedPointLabel,
};
use bethe_potts::recursion::{initial_state, step_full, step_triple, SymmetricState};
use bethe_potts::thermo::{
    fixed_point_field, free_energy_closed, free_energy_limit, internal_energy, magnetization, ordered_root, root_marginal,
};
use bethe_potts::verify::{run_all, Fault, VerifyOptions};
use bethe_potts::{BoltzmannParams, BoundaryKind, Error, Field, Spin};
use serde_json::{json, Value};

use crate::args::{Grid, ParamArgs};
use crate::output::*;
use crate::Failure;

pub fn recurse(p: &BoltzmannParams, boundary: BoundaryKind, depth: usize, full: bool) -> Result<Table, Failure> {
    if let BoundaryKind::Field(h) = boundary {
        if full {
            return Err(Failure::usage("--full needs a free or constant boundary"));
        }
        let mut t = Table::new("recurse", RECURSE_RATIO_V1);
        let mut s = SymmetricState::from_field(&h);
        loop {
            let r = s.ratios();
            t.push(vec![json!(s.level), num(r.u), num(r.v), num(s.log_partition())]);
            if s.level >= depth {
                break;
            }
            s = step_triple(&s, p)?;
        }
        return Ok(t);
    }
    if depth == 0 {
        return Err(Failure::usage("depth must be at least 1 for spin boundaries"));
    }
    let mut t = Table::new("recurse", if full { RECURSE_FULL_V1 } else { RECURSE_RATIO_V1 });
    let mut s = initial_state(&boundary, p)?;
    loop {
        if full {
            let mut row = vec![json!(s.level), num(s.log_scale)];
            row.extend(s.x.iter().map(|&x| num(x)));
            t.push(row);
        } else {
            let r = s.symmetric_sums().ratios();
            t.push(vec![json!(s.level), num(r.u), num(r.v), num(s.log_partition())]);
        }
        if s.level >= depth {
            break;
        }
        s = step_full(&s, p)?;
    }
    Ok(t)
}

fn region_name(p: &BoltzmannParams) -> Result<String, Error> {
    Ok(format!("{:?}", classify_phase(p)?))
}

pub fn fixed_points(p: &BoltzmannParams) -> Result<Table, Failure> {
    let set = solve_fixed_points(p)?;
    let region = region_name(p)?;
    let transition = has_transition(p)?;
    let mut t = Table::new("fixed-points", FIXED_POINTS_V1);
    for fp in &set.points {
        let (label, root, phase, line_u) = match fp.label {
            FixedPointLabel::Disordered => ("disordered", 0, Value::Null, 1.0),
            FixedPointLabel::Ordered { root, phase } => ("ordered", root, json!(phase.index() + 1), set.roots[root as usize - 1]),
        };
        let jac = jacobian_at(fp.state.u, fp.state.v, p)?;
        let (e1, e2) = match jac.eigenvalues() {
            Eigenvalues::Real(a, b) => ((a, 0.0), (b, 0.0)),
            Eigenvalues::Complex { re, im } => ((re, im), (re, -im)),
        };
        let rho = jac.spectral_radius();
        t.push(vec![
            num(p.theta()),
            num(p.theta1()),
            json!(region),
            json!(transition),
            json!(label),
            json!(root),
            phase,
            num(fp.state.u),
            num(fp.state.v),
            num(e1.0),
            num(e1.1),
            num(e2.0),
            num(e2.1),
            num(rho),
            num(restricted_slope(line_u, p)),
            json!(rho < 1.0),
        ]);
    }
    Ok(t)
}

pub fn phase_diagram(j_grid: &Grid, t_grid: &Grid, exec: Execution) -> Result<Table, Failure> {
    if t_grid.start <= 0.0 {
        return Err(Failure::usage("temperature grid must be positive"));
    }
    let points: Vec<(f64, f64)> =
        j_grid.points().into_iter().flat_map(|j| t_grid.points().into_iter().map(move |t| (j, t))).collect();
    let rows = exec.map(&points, |&(j, tr)| -> Result<Vec<Value>, Error> {
        let p = diagram_params(j, tr)?;
        let set = solve_fixed_points(&p)?;
        Ok(vec![
            num(j),
            num(tr),
            num(p.theta()),
            num(p.theta1()),
            json!(has_transition(&p)?),
            json!(set.points.len()),
            json!(region_name(&p)?),
        ])
    });
    let mut t = Table::new("phase-diagram", PHASE_DIAGRAM_V1);
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

pub fn critical(grid: &Grid, tol: f64, exec: Execution) -> Result<Table, Failure> {
    let rows = exec.map(&grid.points(), |&j| -> Result<Vec<Value>, Error> {
        match critical_curve(j, tol) {
            Ok(c) => Ok(vec![
                num(j),
                num(c.t_ratio),
                num(c.phi_inverse),
                opt(c.zeta_inverse),
                json!(match c.binding {
                    BindingBranch::Phi => "phi",
                    BindingBranch::Zeta => "zeta",
                }),
            ]),
            Err(Error::NoSolution(_)) => Ok(vec![num(j), Value::Null, Value::Null, Value::Null, json!("none")]),
            Err(e) => Err(e),
        }
    });
    let mut t = Table::new("critical-curve", CRITICAL_CURVE_V1);
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

fn spec_name(spec: &GroundStateSpec) -> String {
    let letters = |w: &[Spin]| w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
    match spec {
        GroundStateSpec::Constant(s) => format!("constant({s})"),
        GroundStateSpec::Quasi(i, j) => format!("quasi({i},{j})"),
        GroundStateSpec::Periodic(w) => format!("periodic({})", letters(w)),
    }
}

fn family_name(f: Family) -> String {
    match f {
        Family::TranslationInvariant => "translation-invariant".into(),
        Family::Quasi => "quasi".into(),
        Family::Periodic(k) => format!("periodic-{k}"),
    }
}

pub fn ground_states(params: &ParamArgs, depth: usize, families: &[Family]) -> Result<Table, Failure> {
    let j = params.couplings()?;
    if j.prolonged != 0.0 {
        return Err(Failure::usage("ground states are classified for zero prolonged coupling"));
    }
    let region = classify_couplings(&j);
    let mut t = Table::new("ground-states", GROUND_STATES_V1);
    for &family in families {
        for spec in family_specs(family) {
            let c = build_ground_state(&spec, depth)?;
            let verdict = verify_ground_state(&c, &j)?;
            t.push(vec![
                num(j.one_level),
                num(j.nearest),
                json!(region.to_string()),
                json!(family_name(family)),
                json!(spec_name(&spec)),
                json!(depth),
                json!(verdict.is_ground_state),
                verdict.first_violation.map(|v| json!(v.to_string())).unwrap_or(Value::Null),
            ]);
        }
    }
    Ok(t)
}

fn free_energy_row(p: &BoltzmannParams, terms: usize, depth: usize) -> Result<Vec<Value>, Error> {
    let root = ordered_root(p)?;
    let h = root.map(|u| fixed_point_field(Spin::S1, u)).unwrap_or(Field::ZERO);
    let series = free_energy_limit(&h, p, terms)?;
    let (closed, energy, m) = match root {
        Some(u) => (
            free_energy_closed(p, u).ok(),
            internal_energy(p, u).ok(),
            Some(magnetization(Spin::S1, u)?.magnitude),
        ),
        None => (None, None, Some(0.0)),
    };
    let marginal = root_marginal(p, &h, depth)?;
    Ok(vec![
        num(p.beta()),
        num(p.theta()),
        num(p.theta1()),
        opt(root),
        opt(closed),
        num(series.limit),
        opt(energy),
        opt(m),
        num(marginal[0]),
    ])
}

pub fn free_energy(
    params: &ParamArgs,
    betas: Option<&Grid>,
    terms: usize,
    depth: usize,
    exec: Execution,
) -> Result<Table, Failure> {
    let points: Vec<BoltzmannParams> = match betas {
        None => vec![params.resolve()?],
        Some(g) => {
            if params.beta.is_some() {
                return Err(Failure::usage("--beta and a beta --grid cannot both be given"));
            }
            let j = params.couplings()?;
            g.points().into_iter().map(|b| BoltzmannParams::new(j, b)).collect::<Result<_, _>>()?
        }
    };
    let rows = exec.map(&points, |p| free_energy_row(p, terms, depth));
    let mut t = Table::new("free-energy", FREE_ENERGY_V1);
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

/// Returns the report table and whether every check passed.
pub fn verify(depth: usize, seed: u64, fault: bool, exec: Execution) -> (Table, bool) {
    let opts = VerifyOptions { max_depth: depth, seed, fault: fault.then_some(Fault::RecursionCoefficient), exec };
    let reports = run_all(&opts);
    let mut t = Table::new("verify", VERIFY_V1);
    let mut ok = true;
    for r in &reports {
        ok &= r.passed;
        t.push(vec![json!(r.id), json!(r.name), json!(r.passed), json!(r.detail)]);
    }
    (t, ok)
}
