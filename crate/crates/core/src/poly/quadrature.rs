//! Collapsed-coordinate Gauss rules on simplices of any exactness.
//!
//! The reference simplex is mapped from the unit cube by the Duffy
//! transform; tensor Gauss–Legendre rules sized for the Jacobian-weighted
//! degree in each direction give all-positive weights.

use crate::{RdaError, Result, Vec3};

/// Highest polynomial exactness provided.
pub const MAX_EXACTNESS: usize = 20;

/// Quadrature on the reference simplex with vertices `0, e_1, …, e_s`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    /// Topological dimension `s` of the simplex (1, 2 or 3).
    pub dim: usize,
    /// Barycentric coordinates, `s + 1` per point.
    pub points: Vec<Vec<f64>>,
    /// Weights summing to the reference measure `1/s!`.
    pub weights: Vec<f64>,
    pub exactness: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Reference measure `1/s!`.
    pub fn reference_measure(&self) -> f64 {
        1.0 / (1..=self.dim).product::<usize>() as f64
    }

    /// Physical points and weights on a simplex with the given vertices and
    /// measure.
    pub fn map(&self, vertices: &[Vec3], measure: f64) -> Vec<(Vec3, f64)> {
        assert_eq!(vertices.len(), self.dim + 1);
        let scale = measure / self.reference_measure();
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(bary, &w)| {
                let mut x = [0.0; 3];
                for (l, v) in bary.iter().zip(vertices) {
                    for i in 0..3 {
                        x[i] += l * v[i];
                    }
                }
                (x, w * scale)
            })
            .collect()
    }
}

/// Gauss–Legendre nodes and weights on [0, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn points_for(degree: usize) -> usize {
    degree / 2 + 1
}

/// Rule on the `dim`-simplex exact for polynomials of degree ≤ `exactness`.
pub fn simplex_quadrature(dim: usize, exactness: usize) -> Result<QuadratureRule> {
    if exactness > MAX_EXACTNESS || !(1..=3).contains(&dim) {
        return Err(RdaError::UnsupportedDegree(exactness));
    }
    let q = exactness;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    match dim {
        1 => {
            let (x, w) = gauss_legendre(points_for(q));
            for (t, wt) in x.into_iter().zip(w) {
                points.push(vec![1.0 - t, t]);
                weights.push(wt);
            }
        }
        2 => {
            let (xu, wu) = gauss_legendre(points_for(q + 1));
            let (xv, wv) = gauss_legendre(points_for(q));
            for (u, wu) in xu.iter().zip(&wu) {
                for (v, wv) in xv.iter().zip(&wv) {
                    let x = *u;
                    let y = (1.0 - u) * v;
                    points.push(vec![1.0 - x - y, x, y]);
                    weights.push(wu * wv * (1.0 - u));
                }
            }
        }
        _ => {
            let (xu, wu) = gauss_legendre(points_for(q + 2));
            let (xv, wv) = gauss_legendre(points_for(q + 1));
            let (xw, ww) = gauss_legendre(points_for(q));
            for (u, wu) in xu.iter().zip(&wu) {
                for (v, wv) in xv.iter().zip(&wv) {
                    for (w, www) in xw.iter().zip(&ww) {
                        let x = *u;
                        let y = (1.0 - u) * v;
                        let z = (1.0 - u) * (1.0 - v) * w;
                        points.push(vec![1.0 - x - y - z, x, y, z]);
                        weights.push(wu * wv * www * (1.0 - u) * (1.0 - u) * (1.0 - v));
                    }
                }
            }
        }
    }
    Ok(QuadratureRule {
        dim,
        points,
        weights,
        exactness,
    })
}

/// Rule on the faces of a `dim`-dimensional mesh.
pub fn face_quadrature(dim: usize, exactness: usize) -> Result<QuadratureRule> {
    simplex_quadrature(dim - 1, exactness)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// ∫ over the reference simplex of x^a y^b z^c = a! b! c! / (a + b + c + s)!.
    fn moment(dim: usize, e: [usize; 3]) -> f64 {
        factorial(e[0]) * factorial(e[1]) * factorial(e[2]) / factorial(e[0] + e[1] + e[2] + dim)
    }

    fn integrate(rule: &QuadratureRule, e: [usize; 3]) -> f64 {
        rule.points
            .iter()
            .zip(&rule.weights)
            .map(|(p, w)| {
                let mut v = *w;
                for i in 0..rule.dim {
                    v *= p[i + 1].powi(e[i] as i32);
                }
                v
            })
            .sum()
    }

    #[test]
    fn triangle_xy_moment() {
        let r = simplex_quadrature(2, 2).unwrap();
        assert!((integrate(&r, [1, 1, 0]) - 1.0 / 24.0).abs() < 1e-14);
    }

    #[test]
    fn tet_x2y_moment() {
        let r = simplex_quadrature(3, 4).unwrap();
        assert!((integrate(&r, [2, 1, 0]) - moment(3, [2, 1, 0])).abs() < 1e-15);
    }

    #[test]
    fn weight_sums() {
        let r = simplex_quadrature(2, 8).unwrap();
        assert!((r.weights.iter().sum::<f64>() - 0.5).abs() < 1e-15);
        assert!(r.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn all_monomials_up_to_exactness() {
        for dim in 1..=3 {
            for q in 0..=MAX_EXACTNESS {
                let r = simplex_quadrature(dim, q).unwrap();
                for a in 0..=q {
                    for b in 0..=(if dim >= 2 { q - a } else { 0 }) {
                        for c in 0..=(if dim == 3 { q - a - b } else { 0 }) {
                            let e = [a, b, c];
                            let exact = moment(dim, e);
                            let got = integrate(&r, e);
                            assert!(
                                ((got - exact) / exact).abs() < 1e-12,
                                "dim {dim} q {q} e {e:?}: {got} vs {exact}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn too_high_exactness() {
        assert!(matches!(
            simplex_quadrature(2, MAX_EXACTNESS + 1),
            Err(RdaError::UnsupportedDegree(_))
        ));
    }
}
