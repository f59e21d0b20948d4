//! Adaptive hp virtual element method for the Poisson problem on
//! polygonal meshes.
//!
//! The crate is organised bottom-up:
//!
//! * [`polyquad`]: scaled monomials, orthonormal bases, Gauss rules
//!   (generic over the scalar type);
//! * [`mesh`]: polygonal meshes, generators, h-refinement, validation;
//! * [`vemspace`]: degree distribution and global dofs;
//! * [`projectors`]: the local `Pi^nabla` and `Pi^0` operators;
//! * [`assembly`]: stabilised stiffness, loads, global solve;
//! * [`estimator`]: residual a posteriori indicators;
//! * [`adaptivity`]: the hp marking/refinement loop;
//! * [`problems`]: manufactured solutions and the computable energy error.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptivity;
pub mod assembly;
pub mod error;
pub mod estimator;
pub mod mesh;
pub mod polyquad;
pub mod problems;
pub mod projectors;
pub mod scalar;
pub mod vemspace;

pub use error::{Error, Result};
pub use scalar::{Point, Scalar};

/// Double precision instances of the generic polynomial layer.
pub type QuadRule = polyquad::QuadRule<f64>;
pub type GaussLobattoRule = polyquad::GaussLobattoRule<f64>;
pub type MonomialBasis = polyquad::MonomialBasis<f64>;
pub type OrthoBasis = polyquad::OrthoBasis<f64>;
pub type EdgePoly = polyquad::EdgePoly<f64>;

/// Single precision instances of the polynomial layer.
pub type QuadRule32 = polyquad::QuadRule<f32>;
pub type GaussLobattoRule32 = polyquad::GaussLobattoRule<f32>;
pub type MonomialBasis32 = polyquad::MonomialBasis<f32>;
pub type OrthoBasis32 = polyquad::OrthoBasis<f32>;
