//! Surfaces in su(N) built from solutions of the CP^(N-1) sigma model.
//!
//! Solutions are given as closed-form expressions in ξ and ξ̄ ([`expr`]).
//! [`model`] turns them into projectors and conserved currents, [`immersion`]
//! integrates the surface, [`geometry`] measures it, [`su3frame`] builds the
//! moving frame for N = 3 and [`symmetry`] acts on solutions.

pub mod basis;
pub mod cli;
pub mod config;
pub mod expr;
pub mod immersion;
pub mod jet;
pub mod geometry;
pub mod grid;
pub mod matrix;
pub mod model;
pub mod quadrature;
pub mod solutions;
pub mod su3frame;
pub mod symmetry;
