//! Variational linear-solver time stepping for diffusion, reaction-diffusion
//! and incompressible-flow problems on a statevector simulator.
//!
//! Each implicit time step `A u^{k+1} = b^k` is solved by minimizing a
//! variational cost over a layered RY/CX ansatz, with `A` given as a sum of
//! tensor products of single-qubit operators conjugated by cyclic shifts.
//! Every driver has a dense classical twin in [`oracle`].

pub mod config;
pub mod error;
pub mod evolution;
pub mod navier_stokes;
pub mod operators;
pub mod optimize;
pub mod oracle;
pub mod reaction;
pub mod runner;
pub mod state;
pub mod vqls;

pub use error::{Error, Result};
