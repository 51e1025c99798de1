//! Multi-cut stochastic approximation methods for stochastic convex
//! composite optimization (SCCO), `min f(x) + h(x)` with
//! `f(x) = E[F(x, xi)]` known only through a stochastic first-order oracle.
//!
//! The toolkit contains:
//!
//! - [`model`]: one-cut aggregates with geometric weights, and the
//!   max-one-cut bundle model built by a recursive blend/spawn update.
//! - [`composite`]: the composite term `h` (zero, ball indicator, box
//!   indicator) with exact prox/projection operators.
//! - [`prox`]: a certified solver for the regularized model subproblem
//!   `argmin_u h(u) + max_k aff_k(u) + ||u - z0||^2 / (2 lambda)` via its
//!   dual over the simplex, returning a primal-dual gap certificate.
//! - [`algo`]: the single-stage cutting-plane driver, the max-one-cut
//!   method (single- and multi-stage), the RSA and DA baselines, stepsize
//!   rules, and the subgradient-bound estimator.
//! - [`problems`]: a two-stage stochastic QP with closed-form recourse and
//!   a known-optimum newsvendor (pinball loss) problem.
//! - [`verify`]: Monte Carlo checks of the model-noise, variance, and
//!   expected-max bounds that justify the methods.
//! - [`bench`]: a seeded, deterministic benchmark harness with CSV and
//!   markdown reporting.

pub mod algo;
pub mod bench;
pub mod composite;
pub mod model;
pub mod problems;
pub mod prox;
pub mod seedstream;
pub mod verify;

pub(crate) mod linalg;
