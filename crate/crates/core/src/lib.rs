//! Signed graph states, pivot minors and (X,Z)-plane measurement patterns.
//!
//! * [`graph`]: graphs, local complementation, pivots, grid generators.
//! * [`canon`]: exact canonical forms for graphs on at most ten vertices.
//! * [`signed`]: the rewrite rules on |G;S⟩ and plan replay.
//! * [`oracle`]: a dense state-vector simulator that checks all of the above.
//! * [`mbqc`]: open graphs, gadgets and Pauli-frame simulation.
//! * [`compiler`]: any graph as a pivot minor of a triangular grid.
//! * [`search`]: pivot orbits and pivot-minor search.

pub mod canon;
pub mod compiler;
pub mod graph;
pub mod mbqc;
pub mod oracle;
pub mod outcome;
pub mod search;
pub mod selftest;
pub mod signed;

pub use graph::{generate, Graph, GraphError, GridKind, VertexSet};
pub use outcome::{OutcomeMode, OutcomeSource};
pub use signed::{replay_plan, PairingStrategy, PauliWord, SignedGraphState};
