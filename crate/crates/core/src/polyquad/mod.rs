//! Polynomial bases, Gauss rules and cubature.
//!
//! Everything here is generic over [`Scalar`](crate::Scalar); the solver
//! layers instantiate it with `f64`.

mod edge;
mod gauss;
mod monomial;
mod ortho;
mod rules;

pub use edge::{point_at, poly_normal_derivative, EdgePoly};
pub use gauss::{
    gauss_jacobi_10, gauss_legendre, gauss_lobatto, lagrange_basis, lagrange_eval, legendre_all, legendre_pair,
    GaussLobattoRule, GaussRule,
};
pub use monomial::{dim_poly, exponents, monomial_index, poly_eval, poly_gradient, poly_laplacian, MonomialBasis};
pub use ortho::{orthonormalize, OrthoBasis};
pub(crate) use rules::tri_area;
pub use rules::{
    centroid, diameter, fan_triangles, map_triangle, polygon_quadrature, signed_area, triangle_quadrature, QuadRule,
};
