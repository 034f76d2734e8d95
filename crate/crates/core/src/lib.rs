//! Renormalization of the singular attractive `-g²/r⁴` potential.
//!
//! Units throughout are `ħ = 2m = 1`: lengths in units of choice, energies
//! in inverse length squared, `E = -κ²` for bound states.
//!
//! * [`rgflow`]: flow branches of the regulating square-well strength.
//! * [`levels`]: closed-form zero-energy solution and bound-state counting.
//! * [`solver`]: radial shooting for bound states and s-wave phase shifts.
//! * [`correspondence`]: hard-core dictionary, WKB estimates, molecular units.

// Negated comparisons reject NaN along with out-of-range input.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correspondence;
pub mod error;
pub mod levels;
pub mod ode;
pub mod quad;
pub mod rgflow;
pub mod roots;
pub mod solver;

pub use error::{Error, Result};
pub use rgflow::{BranchPolicy, CutoffConfig, FlowCurve, FlowSample, ModelParams, OmegaValue};
pub use solver::{BoundState, PhaseCurve, PotentialSpec, RadialSolution, SolverConfig};
