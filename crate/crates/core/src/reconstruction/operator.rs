use nalgebra::DMatrix;
use rayon::prelude::*;

use super::patch::{build_patches, check_unisolvence, element_basis, vandermonde, ElementPatch, Unisolvence, UNISOLVENCE_TOL};
use crate::analysis::SolutionField;
use crate::mesh::Mesh;
use crate::poly::ScaledMonomialBasis;
use crate::{RdaError, Result, Vec3};

/// Least-squares fit with the value at the patch center pinned.
///
/// Returns `W` (`L × #I(K)`) such that `W g` are the coefficients, in
/// `basis` (which must be centered at the barycenter of `patch.element`), of
/// the degree-m polynomial closest to the samples `g` at the collocation
/// points that matches `g` exactly at the center.
pub fn fit_weights(mesh: &Mesh, patch: &ElementPatch, basis: &ScaledMonomialBasis) -> Result<DMatrix<f64>> {
    if let Unisolvence::Deficient { rank } = check_unisolvence(mesh, patch, basis.degree()) {
        return Err(RdaError::DeficientPatch {
            element: patch.element,
            rank,
            required: basis.len(),
        });
    }
    let l = basis.len();
    let n = patch.len();
    let center = patch.center_position();
    let mut w = DMatrix::zeros(l, n);
    w[(0, center)] = 1.0;
    if l == 1 {
        return Ok(w);
    }

    // Centering at x_K makes every non-constant basis function vanish there,
    // so the constraint fixes the constant coefficient and the rest solve an
    // unconstrained problem for g - g(x_K) on the other points.
    let others: Vec<usize> = (0..n).filter(|&i| i != center).collect();
    let points: Vec<Vec3> = others
        .iter()
        .map(|&i| mesh.barycenters()[patch.members[i]])
        .collect();
    let v = vandermonde(basis, &points);
    let reduced = v.columns(1, l - 1).into_owned();
    let svd = reduced.svd(true, true);
    let smax = svd.singular_values.max();
    let pinv = svd
        .pseudo_inverse(UNISOLVENCE_TOL * smax)
        .map_err(|_| RdaError::DeficientPatch {
            element: patch.element,
            rank: 0,
            required: l,
        })?;
    for (r, &i) in others.iter().enumerate() {
        for a in 1..l {
            w[(a, i)] = pinv[(a - 1, r)];
            w[(a, center)] -= pinv[(a - 1, r)];
        }
    }
    Ok(w)
}

/// Linear map from one value per element and component to a piecewise
/// degree-m polynomial field.
#[derive(Debug, Clone)]
pub struct ReconstructionOperator {
    dim: usize,
    degree: usize,
    patches: Vec<ElementPatch>,
    bases: Vec<ScaledMonomialBasis>,
    weights: Vec<DMatrix<f64>>,
    support: Vec<Vec<usize>>,
}

impl ReconstructionOperator {
    /// Builds patches with the given threshold and fits every element.
    pub fn build(mesh: &Mesh, degree: usize, threshold: usize) -> Result<Self> {
        let patches = build_patches(mesh, threshold);
        Self::from_patches(mesh, degree, patches)
    }

    pub fn from_patches(mesh: &Mesh, degree: usize, patches: Vec<ElementPatch>) -> Result<Self> {
        assert_eq!(patches.len(), mesh.num_elements());
        let fitted: Vec<(ScaledMonomialBasis, DMatrix<f64>)> = patches
            .par_iter()
            .map(|p| {
                let basis = element_basis(mesh, p.element, degree);
                let w = fit_weights(mesh, p, &basis)?;
                Ok((basis, w))
            })
            .collect::<Result<_>>()?;
        let (bases, weights) = fitted.into_iter().unzip();
        let mut support = vec![Vec::new(); mesh.num_elements()];
        for p in &patches {
            for &m in &p.members {
                support[m].push(p.element);
            }
        }
        Ok(ReconstructionOperator {
            dim: mesh.dim(),
            degree,
            patches,
            bases,
            weights,
            support,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_elements(&self) -> usize {
        self.patches.len()
    }

    /// Number of unknowns, `d · #elements`.
    pub fn num_dofs(&self) -> usize {
        self.dim * self.patches.len()
    }

    pub fn patch(&self, k: usize) -> &ElementPatch {
        &self.patches[k]
    }

    pub fn patches(&self) -> &[ElementPatch] {
        &self.patches
    }

    pub fn basis(&self, k: usize) -> &ScaledMonomialBasis {
        &self.bases[k]
    }

    /// `L × #S(K)` weight matrix of element `k`.
    pub fn weights(&self, k: usize) -> &DMatrix<f64> {
        &self.weights[k]
    }

    /// Elements whose patch contains `k`, i.e. where λ_{k,j} may be nonzero.
    pub fn support(&self, k: usize) -> &[usize] {
        &self.support[k]
    }

    /// Reconstructs from element-major, component-minor values
    /// (`values[k * d + j]`).
    pub fn reconstruct(&self, values: &[f64]) -> SolutionField {
        assert_eq!(values.len(), self.num_dofs());
        let d = self.dim;
        let coeffs: Vec<Vec<Vec<f64>>> = (0..self.num_elements())
            .into_par_iter()
            .map(|k| {
                let w = &self.weights[k];
                let members = &self.patches[k].members;
                (0..d)
                    .map(|j| {
                        let mut c = vec![0.0; w.nrows()];
                        for (p, &m) in members.iter().enumerate() {
                            let g = values[m * d + j];
                            if g != 0.0 {
                                for (a, ca) in c.iter_mut().enumerate() {
                                    *ca += w[(a, p)] * g;
                                }
                            }
                        }
                        c
                    })
                    .collect()
            })
            .collect();
        SolutionField::new(d, self.bases.clone(), coeffs)
    }

    /// Samples `g` at every barycenter and reconstructs.
    pub fn interpolate_smooth<F>(&self, mesh: &Mesh, g: F) -> SolutionField
    where
        F: Fn(&Vec3) -> Vec3,
    {
        self.reconstruct(&self.sample(mesh, g))
    }

    /// Element-major samples of `g` at barycenters.
    pub fn sample<F>(&self, mesh: &Mesh, g: F) -> Vec<f64>
    where
        F: Fn(&Vec3) -> Vec3,
    {
        let d = self.dim;
        let mut out = Vec::with_capacity(self.num_dofs());
        for x in mesh.barycenters() {
            let v = g(x);
            out.extend_from_slice(&v[..d]);
        }
        out
    }
}
