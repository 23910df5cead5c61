//! Numerical laboratory for equivariant wave maps from `R x H^2` into
//! surfaces of revolution.
//!
//! The crate evolves the radially reduced Cauchy problem for wave maps on the
//! hyperbolic plane, measures soliton resolution onto the harmonic-map family
//! `P_lambda`, detects bubbling for the sphere target, and certifies the
//! pointwise inequalities behind the Morawetz estimate, including an
//! enclosure of the critical endpoint `Lambda ~= 0.57716`.
//!
//! See the `examples/` directory for one runnable program per capability, or
//! the `hypwave` binary for the batch subcommand interface.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod evolve;
pub mod grid;
pub mod model;
pub mod morawetz;

pub use error::{Error, Result};
