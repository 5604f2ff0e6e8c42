//! Stability constants of the reconstruction.
//!
//! For each element, take an L²(K)-orthonormal basis `p_1..p_l` of P_m(K),
//! form `B_K[i][j] = Σ_{x ∈ I(K)} p_i(x) p_j(x)` and set
//! `Λ_{m,K} = (h_K^d σ_min(B_K))^{-1/2}`. The global constant is
//! `Λ_m = max_K (1 + Λ_{m,K} √#I(K))`.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::patch::{element_basis, vandermonde, ElementPatch};
use crate::mesh::Mesh;
use crate::poly::{simplex_quadrature, ScaledMonomialBasis};
use crate::{RdaError, Result, Vec3};

/// Relative threshold below which `B_K` counts as singular.
pub const SINGULAR_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaReport {
    pub lambda_k: Vec<f64>,
    pub patch_sizes: Vec<usize>,
    pub h_k: Vec<f64>,
    pub lambda_m: f64,
}

impl LambdaReport {
    /// CSV with columns `element_id,h_K,patch_size,lambda_mK`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("element_id,h_K,patch_size,lambda_mK\n");
        for (k, ((l, n), h)) in self
            .lambda_k
            .iter()
            .zip(&self.patch_sizes)
            .zip(&self.h_k)
            .enumerate()
        {
            let _ = writeln!(s, "{k},{h:.12e},{n},{l:.12e}");
        }
        s
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| RdaError::io(path, e))
    }
}

/// Mass matrix of `basis` over a simplex.
pub fn mass_matrix(basis: &ScaledMonomialBasis, vertices: &[Vec3], measure: f64) -> Result<DMatrix<f64>> {
    let rule = simplex_quadrature(basis.dim(), 2 * basis.degree())?;
    let l = basis.len();
    let mut m = DMatrix::zeros(l, l);
    let mut phi = vec![0.0; l];
    for (x, w) in rule.map(vertices, measure) {
        basis.eval_into(&x, &mut phi);
        for i in 0..l {
            for j in 0..l {
                m[(i, j)] += w * phi[i] * phi[j];
            }
        }
    }
    Ok(m)
}

/// `Λ_{m,K}` for an element and an arbitrary set of collocation points.
pub fn lambda_for_points(
    basis: &ScaledMonomialBasis,
    vertices: &[Vec3],
    measure: f64,
    h: f64,
    points: &[Vec3],
) -> Option<f64> {
    let mass = mass_matrix(basis, vertices, measure).ok()?;
    let chol = mass.cholesky()?;
    // Orthonormal basis p = φ C with C = L^{-T}; B = Cᵀ VᵀV C = L⁻¹ G L⁻ᵀ.
    let v = vandermonde(basis, points);
    let g = v.transpose() * v;
    let l = chol.l();
    let linv = l.solve_lower_triangular(&DMatrix::identity(g.nrows(), g.ncols()))?;
    let b = &linv * g * linv.transpose();
    let b = (&b + b.transpose()) * 0.5;
    let eig = b.symmetric_eigenvalues();
    let smax = eig.max();
    let smin = eig.min();
    if smax <= 0.0 || smin <= SINGULAR_TOL * smax {
        return None;
    }
    Some((h.powi(basis.dim() as i32) * smin).powf(-0.5))
}

/// Per-element and global reconstruction constants.
pub fn compute_lambda(mesh: &Mesh, patches: &[ElementPatch], degree: usize) -> Result<LambdaReport> {
    let lambda_k: Vec<f64> = patches
        .par_iter()
        .map(|p| {
            let k = p.element;
            let basis = element_basis(mesh, k, degree);
            lambda_for_points(
                &basis,
                &mesh.element_coords(k),
                mesh.volumes()[k],
                mesh.diameters()[k],
                &p.collocation_points(mesh),
            )
            .ok_or_else(|| RdaError::DeficientPatch {
                element: k,
                rank: super::patch::collocation_rank(&basis, &p.collocation_points(mesh)),
                required: basis.len(),
            })
        })
        .collect::<Result<_>>()?;
    let patch_sizes: Vec<usize> = patches.iter().map(|p| p.len()).collect();
    let lambda_m = lambda_k
        .iter()
        .zip(&patch_sizes)
        .map(|(l, &n)| 1.0 + l * (n as f64).sqrt())
        .fold(0.0, f64::max);
    Ok(LambdaReport {
        lambda_k,
        patch_sizes,
        h_k: patches.iter().map(|p| mesh.diameters()[p.element]).collect(),
        lambda_m,
    })
}
