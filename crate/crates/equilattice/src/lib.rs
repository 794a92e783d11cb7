//! Counting and equidistribution of vectors and sublattices in integral
//! quadratic lattices, with local densities, invariant forms on homogeneous
//! spaces and CM points of the modular curve.

pub mod arith;
pub mod cm;
pub mod density;
pub mod enumerate;
pub mod equidist;
pub mod error;
pub mod forms;
pub mod hnf;
pub mod lattice;
pub mod multiplicity;
mod parallel;
pub mod quadrature;

pub use error::{Error, Result};
pub use hnf::SublatticeHNF;
pub use lattice::{GramMatrix, QuadraticLattice, VectorTuple};
