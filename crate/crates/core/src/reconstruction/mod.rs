//! Patch reconstruction: element patches, the constrained least-squares
//! fit, and the reconstruction stability constants.

mod lambda;
mod operator;
mod patch;

pub use lambda::{compute_lambda, lambda_for_points, mass_matrix, LambdaReport, SINGULAR_TOL};
pub use operator::{fit_weights, ReconstructionOperator};
pub use patch::{
    build_patch, build_patches, check_unisolvence, collocation_rank, element_basis, vandermonde,
    ElementPatch, Unisolvence, UNISOLVENCE_TOL,
};

/// Default patch thresholds `#S` per dimension and degree.
pub fn default_patch_size(dim: usize, degree: usize) -> Option<usize> {
    match (dim, degree) {
        (2, 2) => Some(12),
        (2, 3) => Some(20),
        (2, 4) => Some(27),
        (3, 2) => Some(25),
        (3, 3) => Some(47),
        _ => None,
    }
}
