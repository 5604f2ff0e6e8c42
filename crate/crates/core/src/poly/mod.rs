//! Polynomial spaces, simplex quadrature and curl calculus.

mod basis;
mod curl;
mod quadrature;

pub use basis::{binomial, multi_indices, poly_dim, ScaledMonomialBasis};
pub use curl::{
    cross_normal, cross_normal_rows, curl_components, curl_matrix, curl_powers, PolyVectorField,
};
pub use quadrature::{
    face_quadrature, gauss_legendre, simplex_quadrature, QuadratureRule, MAX_EXACTNESS,
};
