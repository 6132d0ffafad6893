//! Projected subgradient methods for paraconvex objectives under
//! Hölderian error bounds.
//!
//! The crate is organised around a small set of ideas:
//!
//! * a [`problem::ProblemInstance`] bundles the value, subgradient and
//!   projection oracles of a constrained nonsmooth problem, together with
//!   optional ground truth (reference minimizers, optimal value) and
//!   [`problem::TheoryConstants`] describing its paraconvexity and error
//!   bound;
//! * [`solver::run`] drives the normalized projected subgradient iteration
//!   `x_{k+1} = proj(x_k - alpha_k * zeta_k / |zeta_k|)` under one of six
//!   [`schedule::StepSizeRule`]s and records a full [`history::RunHistory`];
//! * [`certificates`] turns theory constants into closed-form convergence
//!   certificates (linear rates, envelopes, gap bounds) for each rule, and
//!   [`audit`] re-checks the per-iteration descent inequalities on a
//!   completed run;
//! * [`paracheck`] estimates paraconvexity and error-bound constants
//!   numerically from oracles alone;
//! * [`problems`] ships toy objectives and robust low-rank matrix recovery
//!   (L1 completion, nonnegative factorization, phase retrieval), with
//!   [`metrics`] for recovery quality and empirical rate fitting;
//! * [`io`] and [`cli`] provide file formats (CSV matrices, PGM images,
//!   MovieLens ratings) and the `solve` / `certify` / `bench` / `recover`
//!   subcommands.
//!
//! A narrative guide with runnable examples lives in `book/`; its chapters
//! are compiled as doc-tests through the [`guide`] module.

pub mod audit;
pub mod certificates;
pub mod cli;
pub mod guide;
pub mod history;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod paracheck;
pub mod point;
pub mod problem;
pub mod problems;
pub mod schedule;
pub mod solver;

pub use history::{IterateRecord, RunHistory, Termination};
pub use point::Point;
pub use problem::{
    distance_to_reference, Projection, ProblemInstance, ReferenceSolution, SubgradientSample,
    TheoryConstants,
};
pub use schedule::StepSizeRule;
pub use solver::{run, SolverConfig};
