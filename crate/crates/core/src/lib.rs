//! Hypercube quiver representations, the matrix functors relating the
//! categories `C_n` and `Qui^Σ1_n`, and numerical checks of the solution data
//! of quiver D-modules.

pub mod matrix;
pub mod cli;
pub mod functors;
pub mod io;
pub mod logexpr;
pub mod quiver;
pub mod report;
pub mod solutions;
