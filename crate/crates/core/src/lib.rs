//! Spectral Faedo-Galerkin simulation of the coupled non-degenerate
//! Kirchhoff-heat system
//!
//! ```text
//! y_tt - phi(|grad y|^2) Laplace y + alpha Laplace theta = 0
//! theta_t - Laplace theta - beta Laplace y_t = 0
//! ```
//!
//! with homogeneous Dirichlet conditions, `phi(s) = m0 + m1 s`, `m0 > 0` and
//! `alpha beta > 0`, together with diagnostics for its energy identity,
//! a-priori bounds and exponential decay.
//!
//! The crate is organized bottom-up:
//!
//! - [`spectrum`]: Dirichlet eigenbases on intervals and rectangles, projection
//!   of initial data.
//! - [`model`]: parameters, modal state and the Galerkin right-hand side.
//! - [`timeloop`]: implicit midpoint / RK4 stepping and trajectories.
//! - [`diagnostics`]: energies, dissipation identity, a-priori checks, decay
//!   fits, Gronwall and Martinez checkers.
//! - [`runner`]: scenario configs, CSV/JSON export, convergence studies,
//!   uniqueness probes, parameter sweeps and the verification suite.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod diagnostics;
pub mod error;
pub mod model;
pub mod runner;
pub mod spectrum;
pub mod timeloop;

pub use error::{Error, Result};
pub use model::{ModalState, ModelParams};
pub use spectrum::{build_basis, Domain, EigenBasis};
pub use timeloop::{simulate, Method, StepperConfig, Trajectory};
