//! Finite element discretization and IMEX time stepping for the logarithmic
//! Schrödinger equation `i u_t + Δu = λ u ln|u|²` on intervals and rectangles.

pub mod banded;
pub mod error;
pub mod experiments;
pub mod fem;
pub mod gronwall;
pub mod imex;
pub mod mesh;
pub mod nonlinearity;
pub mod quadrature;

pub use error::{Error, Result};
pub use fem::{CoefficientVector, Degree, FeSpace};
pub use imex::{ImexSolver, SchemeConfig};
pub use mesh::{Dim, Mesh};
pub use num_complex::Complex64;
