//! Tolerances shared by the library checks, the CLI `verify` command and the
//! acceptance tests.

/// Recursion versus brute-force enumeration, relative, per component.
pub const ORACLE_RELATIVE: f64 = 1e-10;

/// Ratio-map symmetry, equivariance and invariant-line checks.
pub const SYMMETRY: f64 = 1e-12;

/// Quadratic-root agreement for the translation-invariant fixed points.
pub const ROOTS: f64 = 1e-12;

/// Fixed-point residual of the ratio map.
pub const FIXED_POINT_RESIDUAL: f64 = 1e-10;

/// Discriminant magnitude below which two quadratic roots are merged.
pub const TANGENCY: f64 = 1e-12;

/// Margin used when deciding whether a spectral radius is below or above one.
pub const SPECTRAL_MARGIN: f64 = 1e-9;

/// Distance at which an iterated seed is matched to a fixed point.
pub const BASIN_MATCH: f64 = 1e-6;

/// Consistency of finite-volume measures.
pub const CONSISTENCY: f64 = 1e-12;

/// Series against recursion-side free energy.
pub const FREE_ENERGY: f64 = 1e-8;

/// Closed-form identities (simplified versus unsimplified, ratios).
pub const CLOSED_FORM: f64 = 1e-9;

/// Finite-difference derivative checks.
pub const FINITE_DIFFERENCE: f64 = 1e-6;

/// Energy comparisons for ground states.
pub const ENERGY: f64 = 1e-12;

/// Critical-curve bisection default.
pub const CRITICAL_CURVE: f64 = 1e-10;

/// Relative difference `|a - b| / max(|a|, |b|, tiny)`.
pub fn relative_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
