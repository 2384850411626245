//! Monotone upper/lower-solution iteration for singular two-point diffusion
//! problems `-s'' - n s' - (m/x) s' = f(x, s)` on `[0, 1]` with `s'(0) = 0`
//! and `a1 s(1) + a2 s'(1) = C`.
//!
//! The shifted linear problems are solved through a Green's kernel built
//! from the fundamental pair of the operator, or by finite differences.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigen;
pub mod error;
pub mod expr;
pub mod greens;
pub mod linsolve;
pub mod model;
pub mod monotone;
pub mod ode;
pub mod problems;
pub mod quad;
pub mod specfun;
pub mod stencil;

pub use error::{BvpError, Result};
pub use model::{BoundaryForm, GridSpec, MeshFunction, ProblemSpec};
