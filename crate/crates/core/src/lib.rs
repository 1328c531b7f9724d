//! Solver toolkit for nonlocal diffusion with Dirichlet volumetric
//! constraints: linear reproducing-kernel collocation on rectilinear grids,
//! Gauss and quasi-discrete (meshfree) integration backends, Fourier-symbol
//! stability diagnostics, and a convergence-study harness.
//!
//! The numerical core is generic over the scalar type via [`scalar::Real`]
//! (`f32` or `f64`); the aliases below fix `f64`, which is what the CLI and
//! the harness use.

pub mod bessel;
pub mod gauss;
pub mod grid;
pub mod harness;
pub mod kernels;
pub mod la;
pub mod linsolve;
pub mod operators;
pub mod quadrature;
pub mod rk_basis;
pub mod scalar;
pub mod sparse;
pub mod symbols;

/// Default-precision (f64) aliases for the main domain types.
pub type GridSpec = grid::GridSpec<f64>;
pub type DomainSpec = grid::DomainSpec<f64>;
pub type NonlocalKernelSpec = kernels::NonlocalKernelSpec<f64>;
pub type RKBasis = rk_basis::RKBasis<f64>;
pub type BallRule = quadrature::BallRule<f64>;
pub type SymmetricPointSet = quadrature::SymmetricPointSet<f64>;
pub type MeshfreeWeights = quadrature::MeshfreeWeights<f64>;
pub type CollocationSystem = operators::CollocationSystem<f64>;
pub type SolveReport = linsolve::SolveReport<f64>;
pub type SymbolScan = symbols::SymbolScan<f64>;
pub type CsrMat = sparse::CsrMat<f64>;
