//! Maximal and minimal fidelity between a bipartite quantum state and the
//! local-unitary orbit of another.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense complex matrices, Jacobi eigensolver, SVD, matrix
//!   functions and bipartite tensor operations.
//! * [`states`]: Werner, isotropic, maximally entangled and random states,
//!   Haar unitaries and local unitaries.
//! * [`fidelity`]: fidelity, affine fidelity, relative entropy and Kraus
//!   channels.
//! * [`closed_form`]: analytic values of the extremal fidelities.
//! * [`orbit_opt`]: Riemannian multi-start optimization over `U(d1) x U(d2)`.
//! * [`sdp`]: the semidefinite program for fidelity, certificates and SDPA
//!   export.
//! * [`bounds`]: analytic upper and lower bounds and their checks.
//! * [`probes`]: the distillability probe and the commutativity experiment.

pub mod bounds;
pub mod closed_form;
pub mod error;
pub mod fidelity;
pub mod linalg;
pub mod orbit_opt;
pub mod par;
pub mod probes;
pub mod rng;
pub mod sdp;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use orbit_opt::{Mode, OptimizationReport, OptimizerConfig};
pub use par::Execution;
pub use states::{DensityMatrix, LocalUnitary, PureState};
