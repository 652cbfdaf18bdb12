//! Exact finite-N statistics of the Gaussian Unitary Ensemble and the
//! convergent 1/N² expansion of its linear statistics.
//!
//! The crate is organised around a handful of independent pieces:
//!
//! - [`hermite`]: weighted Hermite functions, the GUE kernel `K_N`, the mean
//!   density `p_N` with analytic derivatives, and the third-order ODE it obeys.
//! - [`gegenbauer`]: the working basis `f_n(t) = C_n^{(2)}(t/2)`, Taylor to
//!   basis conversion, weighted sup-norms and the semicircle functional.
//! - [`expansion`]: the operators `D`, `H`, `S = HD`, `T = D³HD`, the α_k
//!   functionals and the resummation driver.
//! - [`laplace`]: closed-form bilateral Laplace transforms through a
//!   terminating ₁F₁, Stirling numbers and the 1/N series of the transform.
//! - [`quadrature`]: Gauss rules and adaptive line integration.
//! - [`mc`]: tridiagonal β = 2 sampling of GUE spectra.
//! - [`verify`]: named property suites used by the command-line front end.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exact;
pub mod expansion;
pub mod gegenbauer;
pub mod hermite;
pub mod laplace;
pub mod mc;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
pub use hermite::EnsembleSize;
