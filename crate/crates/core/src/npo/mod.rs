//! Noncommutative polynomial optimization: the capacity problem of a graph,
//! its reduction to Hermitian variables, moment relaxations and SDPA export.

pub mod assign;
pub mod hermitize;
pub mod moment;
pub mod poly;
pub mod problem;
pub mod rewrite;
pub mod sdpa;

pub use assign::{embed_reversible_dfa, verify_assignment, AssignmentReport, OperatorAssignment};
pub use hermitize::{eigen_gadget, hermitize};
pub use moment::{npa_moment_matrix, MomentRelaxation};
pub use poly::{Letter, Monomial, Poly};
pub use problem::{build_capacity_problem, BuildOptions, ClosureForm, NcProblem, Variant};
pub use sdpa::{parse_sdpa, to_sdpa, write_sdpa, SdpaProblem};
