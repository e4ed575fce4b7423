//! Exact engine for the three-state Potts model with competing interactions
//! (nearest neighbour, one-level next-nearest, prolonged next-nearest) on the
//! binary Bethe lattice.
//!
//! The crate covers:
//!
//! * lattice geometry on the rooted binary tree ([`lattice`]),
//! * spins, couplings and Hamiltonians ([`spins`]),
//! * the exact partial partition-function recursion ([`recursion`]),
//! * the field compatibility equation and finite-volume measures ([`field`]),
//! * fixed points, stability and phase boundaries ([`phase`]),
//! * ground-state verification ([`ground_states`]),
//! * free energy, internal energy and magnetization ([`thermo`]),
//! * a brute-force enumeration oracle ([`oracle`]),
//! * and the cross-checking harness used by the CLI and acceptance tests ([`verify`]).

pub mod error;
pub mod exec;
pub mod field;
pub mod ground_states;
pub mod lattice;
pub mod oracle;
pub mod phase;
pub mod recursion;
pub mod spins;
pub mod sum;
pub mod thermo;
pub mod tolerances;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Field, FieldAssignment};
pub use lattice::Vertex;
pub use spins::{BoltzmannParams, BoundaryKind, Configuration, CouplingSet, Spin};
