//! Differentially private linear programming with guaranteed satisfaction of
//! the original constraints.
//!
//! The constraint matrix and vector are privatized with truncated Laplace
//! noise shifted so that every perturbed constraint is at least as tight as
//! the original, then clamped into the public envelope of realizable
//! constraints. The cost vector is privatized with the ordinary Laplace
//! mechanism. Solutions of the resulting program are private by
//! post-processing and feasible for the original program.

pub mod accuracy;
pub mod error;
pub mod experiments;
mod linalg;
pub mod lp;
pub mod mdp;
pub mod privacy;
pub mod privatizer;
pub mod solver;

pub use error::{Error, Result};
pub use lp::{
    blocking_profile_problems, validate_profile, Components, InstanceFile, LinearProgram, Mask, Matrix, PrivacyBudget,
    SensitivityProfile,
};
pub use privacy::{LaplaceDist, SupportVariant, TruncatedLaplaceDist};
pub use privatizer::{privatize, privatize_partial, solve_private, PrivatizeOptions, PrivatizedProgram};
pub use solver::{solve, SolveResult, Status};
