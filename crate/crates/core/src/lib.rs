//! Numerical laboratory for the Keller–Segel chemotaxis system with
//! logistic damping
//!
//! ```text
//! u_t = div(d1 grad u - chi u grad v) + f(u),   f(u) <= a - mu u^2
//! v_t = d2 lap v - beta v + alpha u
//! ```
//!
//! on boxes with no-flux boundaries. The crate evaluates the explicit
//! damping thresholds that rule out blow-up ([`thresholds`]), simulates the
//! system with an IMEX finite-difference scheme ([`solver`]), monitors norms
//! and Lyapunov-type functionals along trajectories ([`diagnostics`]), and
//! wraps all of it in reproducible scenarios and sweeps ([`harness`]).

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod harness;
pub mod params;
pub mod solver;
pub mod thresholds;

pub use params::{Grid, ParamError, Parameters, SourceFunction, State};
