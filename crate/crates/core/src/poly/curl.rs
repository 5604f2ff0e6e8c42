//! Curl calculus on polynomial fields.
//!
//! In 2D a vector field `u` has the scalar curl `∂u₂/∂x − ∂u₁/∂y` and a
//! scalar `q` has the vector curl `(∂q/∂y, −∂q/∂x)`, so repeated curls
//! alternate between vector and scalar. The cross products with a normal
//! follow the same pattern: `a × n = a₁n₂ − a₂n₁` for a vector and
//! `q × n = (−q n₂, q n₁)` for a scalar. These are the choices that make
//! `∫_K curl A · B = ∫_K A · curl B − ∫_∂K (A × n) · B` hold in both
//! dimensions.

use nalgebra::{DMatrix, DVector};

use super::ScaledMonomialBasis;
use crate::{RdaError, Result, Vec3};

/// Number of components of `curl^k` of a vector field in `dim` dimensions.
pub fn curl_components(dim: usize, k: usize) -> usize {
    if dim == 3 || k.is_multiple_of(2) {
        dim
    } else {
        1
    }
}

/// Number of components of `curl v` for a field with `ncomp` components.
fn curl_output(dim: usize, ncomp: usize) -> Result<usize> {
    match (dim, ncomp) {
        (2, 2) => Ok(1),
        (2, 1) => Ok(2),
        (3, 3) => Ok(3),
        (2, _) => Err(RdaError::ArityMismatch { expected: 2, got: ncomp }),
        _ => Err(RdaError::ArityMismatch { expected: 3, got: ncomp }),
    }
}

/// Matrix taking stacked component coefficients (`ncomp · L`) to the stacked
/// coefficients of the curl.
pub fn curl_matrix(basis: &ScaledMonomialBasis, ncomp: usize) -> Result<DMatrix<f64>> {
    let dim = basis.dim();
    let out = curl_output(dim, ncomp)?;
    let l = basis.len();
    let d: Vec<DMatrix<f64>> = (0..dim).map(|i| basis.diff_matrix(i)).collect();
    let mut c = DMatrix::zeros(out * l, ncomp * l);
    let mut put = |row: usize, col: usize, m: &DMatrix<f64>, sign: f64| {
        let mut blk = c.view_mut((row * l, col * l), (l, l));
        blk += m * sign;
    };
    match (dim, ncomp) {
        (2, 2) => {
            put(0, 1, &d[0], 1.0);
            put(0, 0, &d[1], -1.0);
        }
        (2, 1) => {
            put(0, 0, &d[1], 1.0);
            put(1, 0, &d[0], -1.0);
        }
        _ => {
            put(0, 2, &d[1], 1.0);
            put(0, 1, &d[2], -1.0);
            put(1, 0, &d[2], 1.0);
            put(1, 2, &d[0], -1.0);
            put(2, 1, &d[0], 1.0);
            put(2, 0, &d[1], -1.0);
        }
    }
    Ok(c)
}

/// Matrices mapping the `dim · L` coefficients of a vector field to those
/// of `curl^k`, for `k = 0..=max_k`.
pub fn curl_powers(basis: &ScaledMonomialBasis, max_k: usize) -> Vec<DMatrix<f64>> {
    let dim = basis.dim();
    let mut out = vec![DMatrix::identity(dim * basis.len(), dim * basis.len())];
    for k in 1..=max_k {
        let c = curl_matrix(basis, curl_components(dim, k - 1)).expect("component counts follow curl chain");
        let next = c * &out[k - 1];
        out.push(next);
    }
    out
}

/// `a × n` for a value with 1, 2 or 3 components.
pub fn cross_normal(dim: usize, a: &[f64], n: &Vec3) -> Vec<f64> {
    match (dim, a.len()) {
        (2, 2) => vec![a[0] * n[1] - a[1] * n[0]],
        (2, 1) => vec![-a[0] * n[1], a[0] * n[0]],
        _ => vec![
            a[1] * n[2] - a[2] * n[1],
            a[2] * n[0] - a[0] * n[2],
            a[0] * n[1] - a[1] * n[0],
        ],
    }
}

/// Applies [`cross_normal`] to the rows of a matrix whose rows are the
/// components of a linear map's output.
pub fn cross_normal_rows(dim: usize, a: &DMatrix<f64>, n: &Vec3) -> DMatrix<f64> {
    let cols = a.ncols();
    match (dim, a.nrows()) {
        (2, 2) => DMatrix::from_fn(1, cols, |_, j| a[(0, j)] * n[1] - a[(1, j)] * n[0]),
        (2, 1) => DMatrix::from_fn(2, cols, |i, j| {
            if i == 0 {
                -a[(0, j)] * n[1]
            } else {
                a[(0, j)] * n[0]
            }
        }),
        _ => DMatrix::from_fn(3, cols, |i, j| {
            let (p, q) = ((i + 1) % 3, (i + 2) % 3);
            a[(p, j)] * n[q] - a[(q, j)] * n[p]
        }),
    }
}

/// A polynomial field with one coefficient vector per component over a
/// shared basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyVectorField {
    pub basis: ScaledMonomialBasis,
    pub components: Vec<Vec<f64>>,
}

impl PolyVectorField {
    pub fn new(basis: ScaledMonomialBasis, components: Vec<Vec<f64>>) -> Self {
        assert!(components.iter().all(|c| c.len() == basis.len()));
        PolyVectorField { basis, components }
    }

    pub fn zeros(basis: ScaledMonomialBasis, ncomp: usize) -> Self {
        let l = basis.len();
        PolyVectorField::new(basis, vec![vec![0.0; l]; ncomp])
    }

    pub fn ncomp(&self) -> usize {
        self.components.len()
    }

    fn stacked(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.ncomp() * self.basis.len(),
            self.components.iter().flatten().copied(),
        )
    }

    fn from_stacked(basis: ScaledMonomialBasis, v: &DVector<f64>) -> Self {
        let l = basis.len();
        let components = v.as_slice().chunks(l).map(|c| c.to_vec()).collect();
        PolyVectorField { basis, components }
    }

    /// Exact curl (vector↔scalar in 2D, vector→vector in 3D).
    pub fn curl(&self) -> Result<PolyVectorField> {
        let c = curl_matrix(&self.basis, self.ncomp())?;
        Ok(Self::from_stacked(self.basis.clone(), &(c * self.stacked())))
    }

    /// `curl` applied `k` times.
    pub fn curl_n(&self, k: usize) -> Result<PolyVectorField> {
        let mut f = self.clone();
        for _ in 0..k {
            f = f.curl()?;
        }
        Ok(f)
    }

    /// Partial derivative of every component.
    pub fn partial(&self, direction: usize) -> PolyVectorField {
        let d = self.basis.diff_matrix(direction);
        let components = self
            .components
            .iter()
            .map(|c| (&d * DVector::from_column_slice(c)).as_slice().to_vec())
            .collect();
        PolyVectorField::new(self.basis.clone(), components)
    }

    pub fn eval(&self, x: &Vec3) -> Vec<f64> {
        let phi = self.basis.eval(x);
        self.components
            .iter()
            .map(|c| c.iter().zip(&phi).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Componentwise sum with another field on the same basis.
    pub fn add(&self, other: &PolyVectorField) -> Result<PolyVectorField> {
        if other.ncomp() != self.ncomp() {
            return Err(RdaError::ArityMismatch {
                expected: self.ncomp(),
                got: other.ncomp(),
            });
        }
        assert_eq!(self.basis, other.basis);
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(PolyVectorField::new(self.basis.clone(), components))
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coeff(&self) -> f64 {
        self.components
            .iter()
            .flatten()
            .fold(0.0, |m: f64, &x| m.max(x.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis2(m: usize) -> ScaledMonomialBasis {
        ScaledMonomialBasis::new(2, m, [0.0; 3], 1.0)
    }

    fn coeff(b: &ScaledMonomialBasis, e: [u8; 3], v: f64) -> Vec<f64> {
        let mut c = vec![0.0; b.len()];
        c[b.index_of(e).unwrap()] = v;
        c
    }

    #[test]
    fn rotation_field_has_curl_two() {
        let b = basis2(1);
        let u = PolyVectorField::new(b.clone(), vec![coeff(&b, [0, 1, 0], -1.0), coeff(&b, [1, 0, 0], 1.0)]);
        let c = u.curl().unwrap();
        assert_eq!(c.ncomp(), 1);
        assert_eq!(c.components[0], coeff(&b, [0, 0, 0], 2.0));
    }

    #[test]
    fn scalar_curl_in_2d() {
        let b = basis2(1);
        let q = PolyVectorField::new(b.clone(), vec![coeff(&b, [1, 0, 0], 1.0)]);
        let c = q.curl().unwrap();
        assert_eq!(c.components, vec![vec![0.0; 3], coeff(&b, [0, 0, 0], -1.0)]);
    }

    #[test]
    fn curl_in_3d() {
        let b = ScaledMonomialBasis::new(3, 2, [0.0; 3], 1.0);
        let z = vec![0.0; b.len()];
        let u = PolyVectorField::new(b.clone(), vec![z.clone(), z.clone(), coeff(&b, [1, 1, 0], 1.0)]);
        let c = u.curl().unwrap();
        assert_eq!(c.components[0], coeff(&b, [1, 0, 0], 1.0));
        assert_eq!(c.components[1], coeff(&b, [0, 1, 0], -1.0));
        assert_eq!(c.components[2], z);
    }

    #[test]
    fn arity_mismatch() {
        let b = ScaledMonomialBasis::new(3, 1, [0.0; 3], 1.0);
        let f = PolyVectorField::zeros(b, 2);
        assert!(matches!(f.curl(), Err(RdaError::ArityMismatch { expected: 3, got: 2 })));
    }

    #[test]
    fn cross_products_match_definitions() {
        let n = [0.6, 0.8, 0.0];
        assert_eq!(cross_normal(2, &[1.0, 2.0], &n), vec![1.0 * 0.8 - 2.0 * 0.6]);
        assert_eq!(cross_normal(2, &[3.0], &n), vec![-3.0 * 0.8, 3.0 * 0.6]);
        let m = DMatrix::from_row_slice(2, 1, &[1.0, 2.0]);
        assert_eq!(cross_normal_rows(2, &m, &n)[(0, 0)], 1.0 * 0.8 - 2.0 * 0.6);
        let m = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, 3.0]);
        let n3 = [0.0, 0.6, 0.8];
        let r = cross_normal_rows(3, &m, &n3);
        let v = cross_normal(3, &[1.0, 2.0, 3.0], &n3);
        for i in 0..3 {
            assert_eq!(r[(i, 0)], v[i]);
        }
    }
}
