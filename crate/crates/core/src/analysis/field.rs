use nalgebra::DVector;

use crate::poly::{curl_components, curl_powers, PolyVectorField, ScaledMonomialBasis};
use crate::Vec3;

/// Piecewise polynomial vector field: one coefficient vector per element
/// and component, each over that element's basis.
#[derive(Debug, Clone)]
pub struct SolutionField {
    dim: usize,
    bases: Vec<ScaledMonomialBasis>,
    coeffs: Vec<Vec<Vec<f64>>>,
}

impl SolutionField {
    pub fn new(dim: usize, bases: Vec<ScaledMonomialBasis>, coeffs: Vec<Vec<Vec<f64>>>) -> Self {
        assert_eq!(bases.len(), coeffs.len());
        debug_assert!(coeffs.iter().all(|c| c.len() == dim));
        SolutionField { dim, bases, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_elements(&self) -> usize {
        self.coeffs.len()
    }

    pub fn basis(&self, k: usize) -> &ScaledMonomialBasis {
        &self.bases[k]
    }

    pub fn coefficients(&self, k: usize) -> &[Vec<f64>] {
        &self.coeffs[k]
    }

    pub fn element_field(&self, k: usize) -> PolyVectorField {
        PolyVectorField::new(self.bases[k].clone(), self.coeffs[k].clone())
    }

    /// Value on element `k` at `x` (the polynomial is extended beyond `k`).
    pub fn eval(&self, k: usize, x: &Vec3) -> Vec3 {
        let phi = self.bases[k].eval(x);
        let mut out = [0.0; 3];
        for (o, c) in out.iter_mut().zip(&self.coeffs[k]) {
            *o = c.iter().zip(&phi).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// `curl^j` of the restriction to element `k`, for `j = 0..=max_level`.
    pub fn curl_fields(&self, k: usize, max_level: usize) -> Vec<PolyVectorField> {
        let basis = &self.bases[k];
        let stacked = DVector::from_iterator(
            self.dim * basis.len(),
            self.coeffs[k].iter().flatten().copied(),
        );
        curl_powers(basis, max_level)
            .into_iter()
            .enumerate()
            .map(|(level, c)| {
                let v = c * &stacked;
                let l = basis.len();
                let comps = v.as_slice().chunks(l).map(|s| s.to_vec()).collect::<Vec<_>>();
                debug_assert_eq!(comps.len(), curl_components(self.dim, level));
                PolyVectorField::new(basis.clone(), comps)
            })
            .collect()
    }
}
