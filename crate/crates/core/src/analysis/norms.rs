use rayon::prelude::*;

use super::{ExactSolution, SolutionField};
use crate::mesh::Mesh;
use crate::poly::{cross_normal, curl_components, face_quadrature, simplex_quadrature, PolyVectorField};
use crate::{Result, Vec3};

/// Squared contributions to the mesh-dependent energy norms.
///
/// `⦀e⦀² = l2 + curl2 + jump + jump_curl` and
/// `⦀e⦀²_ext = ⦀e⦀² + avg_curl3 + avg_curl2`, with face weights
/// `h_e^{-3}, h_e^{-1}, h_e^{3}, h_e` respectively.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyParts {
    pub l2: f64,
    pub curl2: f64,
    pub jump: f64,
    pub jump_curl: f64,
    pub avg_curl3: f64,
    pub avg_curl2: f64,
}

impl EnergyParts {
    pub fn energy(&self) -> f64 {
        (self.l2 + self.curl2 + self.jump + self.jump_curl).sqrt()
    }

    pub fn energy_ext(&self) -> f64 {
        (self.l2 + self.curl2 + self.jump + self.jump_curl + self.avg_curl3 + self.avg_curl2).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2.sqrt()
    }

    fn add(mut self, o: &EnergyParts) -> Self {
        self.l2 += o.l2;
        self.curl2 += o.curl2;
        self.jump += o.jump;
        self.jump_curl += o.jump_curl;
        self.avg_curl3 += o.avg_curl3;
        self.avg_curl2 += o.avg_curl2;
        self
    }
}

fn sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// `curl^level` of the field on element `k` minus that of the exact solution.
fn diff_at(fields: &[PolyVectorField], exact: Option<&dyn ExactSolution>, level: usize, dim: usize, x: &Vec3) -> Vec<f64> {
    let mut v = fields[level].eval(x);
    if let Some(ex) = exact {
        let u = ex.curl_n(level, x);
        for (a, b) in v.iter_mut().zip(&u[..curl_components(dim, level)]) {
            *a -= b;
        }
    }
    v
}

/// L² error `‖u_h − u‖` over the mesh.
pub fn error_l2(mesh: &Mesh, field: &SolutionField, exact: &dyn ExactSolution, exactness: usize) -> Result<f64> {
    let rule = simplex_quadrature(mesh.dim(), exactness)?;
    let parts: Vec<f64> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|k| {
            rule.map(&mesh.element_coords(k), mesh.volumes()[k])
                .into_iter()
                .map(|(x, w)| {
                    let uh = field.eval(k, &x);
                    let u = exact.curl_n(0, &x);
                    w * (0..mesh.dim()).map(|i| (uh[i] - u[i]).powi(2)).sum::<f64>()
                })
                .sum()
        })
        .collect();
    Ok(parts.iter().sum::<f64>().sqrt())
}

/// Energy-norm pieces of `field − exact` (or of `field` alone when `exact`
/// is `None`). Exact solutions are assumed smooth, so they only contribute
/// to boundary jumps and to averages.
pub fn energy_parts(
    mesh: &Mesh,
    field: &SolutionField,
    exact: Option<&dyn ExactSolution>,
    exactness: usize,
) -> Result<EnergyParts> {
    let dim = mesh.dim();
    let vol_rule = simplex_quadrature(dim, exactness)?;
    let face_rule = face_quadrature(dim, exactness)?;
    let curls: Vec<Vec<PolyVectorField>> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|k| field.curl_fields(k, 3))
        .collect();

    let vol: Vec<EnergyParts> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|k| {
            let mut p = EnergyParts::default();
            for (x, w) in vol_rule.map(&mesh.element_coords(k), mesh.volumes()[k]) {
                p.l2 += w * sq(&diff_at(&curls[k], exact, 0, dim, &x));
                p.curl2 += w * sq(&diff_at(&curls[k], exact, 2, dim, &x));
            }
            p
        })
        .collect();

    let faces: Vec<EnergyParts> = (0..mesh.faces().len())
        .into_par_iter()
        .map(|f| {
            let face = &mesh.faces()[f];
            let he = face.diameter;
            let n = face.normal;
            let neg = [-n[0], -n[1], -n[2]];
            let (kp, km) = face.elements;
            let mut p = EnergyParts::default();
            for (x, w) in face_rule.map(&mesh.face_coords(f), face.measure) {
                let e0p = diff_at(&curls[kp], exact, 0, dim, &x);
                let e1p = diff_at(&curls[kp], exact, 1, dim, &x);
                let mut j0 = cross_normal(dim, &e0p, &n);
                let mut j1 = cross_normal(dim, &e1p, &n);
                let mut a2 = diff_at(&curls[kp], exact, 2, dim, &x);
                let mut a3 = diff_at(&curls[kp], exact, 3, dim, &x);
                if let Some(km) = km {
                    let e0m = diff_at(&curls[km], exact, 0, dim, &x);
                    let e1m = diff_at(&curls[km], exact, 1, dim, &x);
                    for (a, b) in j0.iter_mut().zip(cross_normal(dim, &e0m, &neg)) {
                        *a += b;
                    }
                    for (a, b) in j1.iter_mut().zip(cross_normal(dim, &e1m, &neg)) {
                        *a += b;
                    }
                    for (a, b) in a2.iter_mut().zip(diff_at(&curls[km], exact, 2, dim, &x)) {
                        *a = 0.5 * (*a + b);
                    }
                    for (a, b) in a3.iter_mut().zip(diff_at(&curls[km], exact, 3, dim, &x)) {
                        *a = 0.5 * (*a + b);
                    }
                }
                p.jump += w * sq(&j0) / he.powi(3);
                p.jump_curl += w * sq(&j1) / he;
                p.avg_curl3 += w * sq(&a3) * he.powi(3);
                p.avg_curl2 += w * sq(&a2) * he;
            }
            p
        })
        .collect();

    Ok(vol
        .iter()
        .chain(faces.iter())
        .fold(EnergyParts::default(), |acc, p| acc.add(p)))
}

/// `⦀u_h − u⦀`.
pub fn error_energy(mesh: &Mesh, field: &SolutionField, exact: &dyn ExactSolution, exactness: usize) -> Result<f64> {
    Ok(energy_parts(mesh, field, Some(exact), exactness)?.energy())
}
