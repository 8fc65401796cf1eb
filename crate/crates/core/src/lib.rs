//! Optimal closed three-point quadrature with Peano-kernel error bounds.

pub mod constants;
pub mod expr;
pub mod kernels;
pub mod optimizer;
pub mod piecewise;
pub mod quad;
pub mod function;
pub mod rules;
pub mod analysis;
pub mod bounds;
pub mod composite;
pub mod cli;
