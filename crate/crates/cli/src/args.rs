//! Parsing of physical parameters, boundaries and grids.

use std::str::FromStr;

use bethe_potts::{BoltzmannParams, BoundaryKind, CouplingSet, Field, Spin};
use clap::Args;

use crate::Failure;

/// Either couplings with an inverse temperature or Boltzmann factors.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// One-level next-nearest coupling J'.
    #[arg(long, allow_hyphen_values = true)]
    pub jp: Option<f64>,
    /// Nearest-neighbour coupling J1'.
    #[arg(long, allow_hyphen_values = true)]
    pub j1p: Option<f64>,
    /// Prolonged next-nearest coupling Jp.
    #[arg(long, allow_hyphen_values = true)]
    pub jpp: Option<f64>,
    /// Inverse temperature (defaults to 1 with couplings).
    #[arg(long)]
    pub beta: Option<f64>,
    /// exp(beta J').
    #[arg(long)]
    pub theta: Option<f64>,
    /// exp(beta J1').
    #[arg(long)]
    pub theta1: Option<f64>,
    /// exp(beta Jp).
    #[arg(long)]
    pub thetap: Option<f64>,
}

impl ParamArgs {
    fn coupling_form(&self) -> bool {
        self.jp.is_some() || self.j1p.is_some() || self.jpp.is_some() || self.beta.is_some()
    }

    fn theta_form(&self) -> bool {
        self.theta.is_some() || self.theta1.is_some() || self.thetap.is_some()
    }

    pub fn couplings(&self) -> Result<CouplingSet, Failure> {
        if self.theta_form() {
            return Err(Failure::usage("this command takes --jp/--j1p/--jpp, not Boltzmann factors"));
        }
        let (Some(jp), Some(j1p)) = (self.jp, self.j1p) else {
            return Err(Failure::usage("--jp and --j1p are required"));
        };
        Ok(CouplingSet::new(jp, self.jpp.unwrap_or(0.0), j1p)?)
    }

    pub fn resolve(&self) -> Result<BoltzmannParams, Failure> {
        match (self.coupling_form(), self.theta_form()) {
            (true, true) => Err(Failure::usage("couplings (--jp/--j1p/--jpp/--beta) and Boltzmann factors (--theta/--theta1/--thetap) cannot be mixed")),
            (false, false) => Err(Failure::usage("give either --jp/--j1p [--jpp] [--beta] or --theta/--theta1 [--thetap]")),
            (true, false) => {
                let j = self.couplings()?;
                Ok(BoltzmannParams::new(j, self.beta.unwrap_or(1.0))?)
            }
            (false, true) => {
                let (Some(t), Some(t1)) = (self.theta, self.theta1) else {
                    return Err(Failure::usage("--theta and --theta1 are required"));
                };
                Ok(BoltzmannParams::from_thetas(t, self.thetap.unwrap_or(1.0), t1)?)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryArg(pub BoundaryKind);

impl FromStr for BoundaryArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let kind = match s {
            "free" => BoundaryKind::Free,
            "e1" => BoundaryKind::Const(Spin::S1),
            "e2" => BoundaryKind::Const(Spin::S2),
            "e3" => BoundaryKind::Const(Spin::S3),
            _ => {
                let rest = s.strip_prefix("field:").ok_or_else(|| format!("unknown boundary '{s}'"))?;
                let (a, b) = rest.split_once(',').ok_or("field boundary must be field:h1,h2")?;
                let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("bad field component '{x}': {e}"));
                let h = Field::new(parse(a)?, parse(b)?);
                if !h.is_finite() {
                    return Err("field components must be finite".into());
                }
                BoundaryKind::Field(h)
            }
        };
        Ok(BoundaryArg(kind))
    }
}

/// `a:b:n`, `n` evenly spaced points from `a` to `b` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        (0..self.count).map(|i| self.start + (self.end - self.start) * i as f64 / (self.count - 1) as f64).collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<_> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("grid '{s}' must look like a:b:n"));
        };
        let start: f64 = a.parse().map_err(|e| format!("bad grid start '{a}': {e}"))?;
        let end: f64 = b.parse().map_err(|e| format!("bad grid end '{b}': {e}"))?;
        let count: usize = n.parse().map_err(|e| format!("bad grid count '{n}': {e}"))?;
        if count == 0 {
            return Err("grid must have at least one point".into());
        }
        if !(start.is_finite() && end.is_finite()) || start > end {
            return Err(format!("grid range {start}..{end} must be finite and ordered"));
        }
        Ok(Grid { start, end, count })
    }
}
