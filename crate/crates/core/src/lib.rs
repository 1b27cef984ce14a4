//! Nonlinear Budiansky–Sanders shell model.
//!
//! The crate is `no_std` (with `alloc`) and contains every numerical piece of
//! the model: analytic chart geometry, pointwise strain measures, a clamped
//! conforming discretization (biquadratic Lagrange for the tangential
//! components, Bogner–Fox–Schmit for the normal component), the total energy
//! with its analytic gradient, the special force family, an L-BFGS minimizer,
//! and the analysis tools (Korn and norm-equivalence constants, the quartic
//! expansion about a minimizer, uniqueness probes).
//!
//! IO, configuration and the command-line front end live in the `bsshell`
//! crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod discretization;
pub mod energy;
mod error;
pub mod forces;
pub mod geometry;
pub mod kinematics;
pub mod quadrature;
pub mod solver;
mod vec3;

pub use error::{Error, Result};

pub use discretization::{DisplacementField, Mesh, SobolevNorms, Space};
pub use energy::{EnergyBreakdown, Problem};
pub use forces::{ForceField, SpecialForceSpec};
pub use geometry::{Chart, ChartKind, GeometryFrame, Material, Rect};
pub use kinematics::{DisplacementJet, ExtendedJet, PointwiseStrain};
pub use solver::{Method, MinimizerResult, SolverOptions, Termination};

/// A point of the parameter domain.
pub type Point = [f64; 2];
/// A 2×2 matrix stored row-major, `m[α][β]`.
pub type Mat2 = [[f64; 2]; 2];
/// Fully contravariant fourth-order surface tensor, `t[α][β][σ][τ]`.
pub type Tensor4 = [[[[f64; 2]; 2]; 2]; 2];
