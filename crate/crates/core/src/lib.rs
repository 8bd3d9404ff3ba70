//! Galerkin eigenpairs for nonlocal quasilinear operators in fractional
//! Orlicz–Sobolev settings, with the Young-function calculus they rest on.

pub mod energy;
pub mod error;
pub mod expr;
pub mod fracgrid;
pub mod kernels;
pub mod orlicz;
pub mod quadrature;
pub mod sampling;
pub mod solver;
pub mod young;

pub use energy::{EnergyContext, Problem};
pub use error::{Error, Result};
pub use fracgrid::{GalerkinBasis, PairQuadrature, QuadConfig};
pub use kernels::{Kernel, Source};
pub use orlicz::DiscreteMeasureSpace;
pub use solver::{k_study, linear_oracle, solve_first, solve_sequence, EigenpairResult, SolverConfig};
pub use young::YoungFunction;
