//! Patch-reconstruction interior-penalty DG for the fourth-order curl problem
//!
//! ```text
//! curl^4 u + u = f   in Ω
//! u × n = g1,  (curl u) × n = g2   on ∂Ω
//! ```
//!
//! on triangle and tetrahedron meshes. The discrete space carries one value per
//! element and component; a constrained least-squares fit over an element patch
//! lifts those values to a degree-`m` polynomial on each element. The
//! symmetric interior-penalty form is assembled over that space and solved
//! by a sparse Cholesky factorization or preconditioned conjugate gradients.
//!
//! Modules follow the pipeline: [`mesh`] → [`poly`] → [`reconstruction`] →
//! [`assembly`] → [`solver`] → [`analysis`], with [`harness`] orchestrating
//! manufactured-solution studies.

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod harness;
pub mod mesh;
pub mod poly;
pub mod reconstruction;
pub mod solver;

pub use error::{RdaError, Result};

/// Point or small vector in up to three dimensions. Two-dimensional data
/// leaves the last entry at zero.
pub type Vec3 = [f64; 3];
