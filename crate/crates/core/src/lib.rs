//! Symmetry-analysis workbench for the barotropic potential vorticity equation
//!
//! ```text
//! ζ_t − F ψ_t + J(ψ, ζ) + β ψ_x = 0,   ζ = ψ_xx + ψ_yy
//! ```
//!
//! Modules, bottom-up: [`expr`] (computer-algebra core), [`liealg`] (vector
//! fields, brackets, adjoint actions, flows), [`classify`] (optimal systems of
//! one- and two-dimensional subalgebras), [`pde`] (residual operator and the
//! β-eliminating equivalence transformation), [`reduction`] (invariant
//! reductions and exact solutions) and [`solver`] (doubly periodic
//! pseudo-spectral integrator).

#![allow(clippy::needless_range_loop)]

pub mod checks;
pub mod classify;
pub mod expr;
pub mod liealg;
pub mod pde;
pub mod reduction;
pub mod solver;

pub use expr::{equal_expr, parse, EvalPoint, Expr};
pub use liealg::{AlgebraElement, Generator, PointTransformation, VectorField};
pub use pde::PveParams;
pub use solver::{Field, Grid, SolverConfig};
