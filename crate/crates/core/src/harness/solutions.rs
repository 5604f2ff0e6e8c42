//! Manufactured solutions with closed-form curls.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::ExactSolution;
use crate::poly::{curl_components, PolyVectorField, ScaledMonomialBasis};
use crate::{Result, Vec3};

/// `u = curl(sin³(πx) sin³(πy))` on the unit square. Both `u` and
/// `curl u` vanish on the boundary.
#[derive(Debug, Clone, Copy, Default)]
pub struct Example1;

impl ExactSolution for Example1 {
    fn dim(&self) -> usize {
        2
    }

    fn curl_n(&self, k: usize, x: &Vec3) -> Vec3 {
        let (sx, cx) = (PI * x[0]).sin_cos();
        let (sy, cy) = (PI * x[1]).sin_cos();
        let (sx2, sy2) = (sx * sx, sy * sy);
        let p = PI;
        match k {
            0 => [
                3.0 * p * sx2 * sx * sy2 * cy,
                -3.0 * p * sx2 * cx * sy2 * sy,
                0.0,
            ],
            1 => [6.0 * p * p * (3.0 * sx2 * sy2 - sx2 - sy2) * sx * sy, 0.0, 0.0],
            2 => {
                let c = 6.0 * p.powi(3);
                [
                    c * (9.0 * sx2 * sy2 - sx2 - 3.0 * sy2) * sx * cy,
                    -c * (9.0 * sx2 * sy2 - 3.0 * sx2 - sy2) * sy * cx,
                    0.0,
                ]
            }
            3 => [
                12.0 * p.powi(4) * (27.0 * sx2 * sy2 - 14.0 * sx2 - 14.0 * sy2 + 6.0) * sx * sy,
                0.0,
                0.0,
            ],
            4 => {
                let c = 12.0 * p.powi(5);
                [
                    c * (81.0 * sx2 * sy2 - 14.0 * sx2 - 42.0 * sy2 + 6.0) * sx * cy,
                    -c * (81.0 * sx2 * sy2 - 42.0 * sx2 - 14.0 * sy2 + 6.0) * sy * cx,
                    0.0,
                ]
            }
            _ => panic!("curl power {k} not available"),
        }
    }

    fn source(&self, x: &Vec3) -> Vec3 {
        let a = self.curl_n(4, x);
        let u = self.curl_n(0, x);
        [a[0] + u[0], a[1] + u[1], 0.0]
    }
}

/// `u = (sin πy sin πz, sin πz sin πx, sin πx sin πy)` on the unit cube,
/// for which `curl² u = 2π² u`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Example2;

impl Example2 {
    fn curl1(x: &Vec3) -> Vec3 {
        let (sx, cx) = (PI * x[0]).sin_cos();
        let (sy, cy) = (PI * x[1]).sin_cos();
        let (sz, cz) = (PI * x[2]).sin_cos();
        [
            PI * (cy - cz) * sx,
            -PI * (cx - cz) * sy,
            PI * (cx - cy) * sz,
        ]
    }
}

impl ExactSolution for Example2 {
    fn dim(&self) -> usize {
        3
    }

    fn curl_n(&self, k: usize, x: &Vec3) -> Vec3 {
        let base = if k.is_multiple_of(2) {
            let (sx, sy, sz) = ((PI * x[0]).sin(), (PI * x[1]).sin(), (PI * x[2]).sin());
            [sy * sz, sz * sx, sx * sy]
        } else {
            Self::curl1(x)
        };
        let s = (2.0 * PI * PI).powi((k / 2) as i32);
        base.map(|v| s * v)
    }

    fn source(&self, x: &Vec3) -> Vec3 {
        let s = 4.0 * PI.powi(4) + 1.0;
        self.curl_n(0, x).map(|v| s * v)
    }
}

/// A global polynomial vector field with its curls precomputed.
#[derive(Debug, Clone)]
pub struct PolynomialSolution {
    dim: usize,
    curls: Vec<PolyVectorField>,
}

impl PolynomialSolution {
    pub fn new(field: PolyVectorField) -> Result<Self> {
        let dim = field.basis.dim();
        let mut curls = vec![field];
        for _ in 0..4 {
            let next = curls.last().unwrap().curl()?;
            curls.push(next);
        }
        Ok(PolynomialSolution { dim, curls })
    }

    /// Coefficients uniform in `[-1, 1]` over monomials in `x − (½, ½, ½)`
    /// of total degree at most `degree`.
    pub fn random(dim: usize, degree: usize, seed: u64) -> Self {
        let basis = ScaledMonomialBasis::new(dim, degree, [0.5; 3], 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let components = (0..dim)
            .map(|_| (0..basis.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect())
            .collect();
        Self::new(PolyVectorField::new(basis, components)).expect("dim components")
    }

    pub fn field(&self) -> &PolyVectorField {
        &self.curls[0]
    }
}

impl ExactSolution for PolynomialSolution {
    fn dim(&self) -> usize {
        self.dim
    }

    fn curl_n(&self, k: usize, x: &Vec3) -> Vec3 {
        let mut out = [0.0; 3];
        let v = self.curls[k].eval(x);
        debug_assert_eq!(v.len(), curl_components(self.dim, k));
        out[..v.len()].copy_from_slice(&v);
        out
    }

    fn source(&self, x: &Vec3) -> Vec3 {
        let a = self.curl_n(4, x);
        let u = self.curl_n(0, x);
        [a[0] + u[0], a[1] + u[1], a[2] + u[2]]
    }
}
