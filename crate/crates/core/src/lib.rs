//! Spectral computations for a string carrying a concentrated mass
//! `eps^-2 h(x / eps)` near the origin, together with its non-self-adjoint
//! limit operator and a harness for measuring convergence as `eps -> 0`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod chain;
pub mod coeffs;
pub mod convergence;
pub mod curve;
pub mod error;
pub mod kernel;
pub mod limitop;
pub mod ode;
pub mod perturbed;
pub mod quad;
pub mod residual;
pub mod roots;
pub mod slsolve;
pub mod space;
pub mod specfile;

pub use catalog::{builtin, list_builtin_specs, CatalogEntry};
pub use chain::{Robin, TransferMatrix, EIG_TOL, SPECTRAL_GUARD};
pub use coeffs::{
    eval_weight_eps, validate_spec, CoefficientFunction, EpsWeight, PolyPiece, ProblemSpec,
    SpecIssue, ValidationReport,
};
pub use convergence::{run_sweep, ConvergenceReport, SweepConfig};
pub use curve::{Curve, GridFunction};
pub use error::{Error, Result};
pub use limitop::{Kind, LimitEigendata};
pub use num_complex::Complex64 as C64;
pub use perturbed::PerturbedEigenpair;
pub use slsolve::{Bc, BoundarySolution, Eigenpair, SLProblem};
pub use space::Triple;
pub use specfile::{load_spec, parse_spec, SpecFile};
