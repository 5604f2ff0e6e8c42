use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::mesh::Mesh;
use crate::poly::ScaledMonomialBasis;
use crate::Vec3;

/// Element patch S(K) with its collocation points (member barycenters).
#[derive(Debug, Clone, PartialEq)]
pub struct ElementPatch {
    pub element: usize,
    /// Member element ids in increasing order; contains `element`.
    pub members: Vec<usize>,
    /// Barycenter of `element`.
    pub center: Vec3,
    /// Largest distance between two collocation points.
    pub diameter: f64,
}

impl ElementPatch {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Position of the center element in `members`.
    pub fn center_position(&self) -> usize {
        self.members
            .binary_search(&self.element)
            .expect("patch contains its element")
    }

    pub fn collocation_points(&self, mesh: &Mesh) -> Vec<Vec3> {
        self.members.iter().map(|&k| mesh.barycenters()[k]).collect()
    }
}

/// Grows vertex-neighbour rings around `k` until the patch holds at least
/// `threshold` elements. The whole last ring is kept.
pub fn build_patch(mesh: &Mesh, k: usize, threshold: usize) -> ElementPatch {
    let mut members = vec![k];
    let mut in_patch = std::collections::HashSet::from([k]);
    while members.len() < threshold {
        let before = members.len();
        let mut ring = Vec::new();
        for &e in &members {
            for n in mesh.vertex_neighbors(e) {
                if in_patch.insert(n) {
                    ring.push(n);
                }
            }
        }
        members.extend(ring);
        if members.len() == before {
            break;
        }
    }
    members.sort_unstable();
    let pts: Vec<Vec3> = members.iter().map(|&e| mesh.barycenters()[e]).collect();
    let mut diameter: f64 = 0.0;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            let d2: f64 = (0..3).map(|c| (a[c] - b[c]).powi(2)).sum();
            diameter = diameter.max(d2.sqrt());
        }
    }
    ElementPatch {
        element: k,
        members,
        center: mesh.barycenters()[k],
        diameter,
    }
}

/// Patches for every element, in element order.
pub fn build_patches(mesh: &Mesh, threshold: usize) -> Vec<ElementPatch> {
    (0..mesh.num_elements())
        .into_par_iter()
        .map(|k| build_patch(mesh, k, threshold))
        .collect()
}

/// Outcome of the unisolvence check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unisolvence {
    Ok,
    Deficient { rank: usize },
}

/// Relative singular value cut-off separating rank deficiency from
/// ill-conditioning.
pub const UNISOLVENCE_TOL: f64 = 1e-10;

/// Collocation matrix `V[i, α] = φ_α(x_i)`.
pub fn vandermonde(basis: &ScaledMonomialBasis, points: &[Vec3]) -> DMatrix<f64> {
    let l = basis.len();
    let mut v = DMatrix::zeros(points.len(), l);
    let mut row = vec![0.0; l];
    for (i, x) in points.iter().enumerate() {
        basis.eval_into(x, &mut row);
        for (j, &r) in row.iter().enumerate() {
            v[(i, j)] = r;
        }
    }
    v
}

/// Numerical rank of the collocation matrix of `points` against `basis`.
pub fn collocation_rank(basis: &ScaledMonomialBasis, points: &[Vec3]) -> usize {
    let v = vandermonde(basis, points);
    let sv = v.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > UNISOLVENCE_TOL * smax).count()
}

/// Basis used on element `k`: centered at its barycenter, scaled by `h_K`.
pub fn element_basis(mesh: &Mesh, k: usize, degree: usize) -> ScaledMonomialBasis {
    ScaledMonomialBasis::new(mesh.dim(), degree, mesh.barycenters()[k], mesh.diameters()[k])
}

/// Checks that degree-`degree` polynomials are determined by their values
/// on the patch's collocation points.
pub fn check_unisolvence(mesh: &Mesh, patch: &ElementPatch, degree: usize) -> Unisolvence {
    let basis = element_basis(mesh, patch.element, degree);
    let rank = collocation_rank(&basis, &patch.collocation_points(mesh));
    if rank < basis.len() {
        Unisolvence::Deficient { rank }
    } else {
        Unisolvence::Ok
    }
}
