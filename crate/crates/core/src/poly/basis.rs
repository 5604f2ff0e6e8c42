use nalgebra::DMatrix;

use crate::Vec3;

/// Multi-indices of total degree ≤ `degree` in `dim` variables, ordered by
/// total degree and then lexicographically with higher powers of earlier
/// variables first (`1, x, y, x², xy, y², …`).
pub fn multi_indices(dim: usize, degree: usize) -> Vec<[u8; 3]> {
    let mut out = Vec::with_capacity(binomial(degree + dim, dim));
    for k in 0..=degree {
        for a in (0..=k).rev() {
            if dim == 2 {
                out.push([a as u8, (k - a) as u8, 0]);
            } else {
                for b in (0..=k - a).rev() {
                    out.push([a as u8, b as u8, (k - a - b) as u8]);
                }
            }
        }
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// dim P_m in `dim` variables.
pub fn poly_dim(dim: usize, degree: usize) -> usize {
    binomial(degree + dim, dim)
}

/// Monomials `((x - center) / scale)^α`, |α| ≤ degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledMonomialBasis {
    dim: usize,
    degree: usize,
    center: Vec3,
    scale: f64,
    exponents: Vec<[u8; 3]>,
}

impl ScaledMonomialBasis {
    pub fn new(dim: usize, degree: usize, center: Vec3, scale: f64) -> Self {
        assert!(dim == 2 || dim == 3, "dimension must be 2 or 3");
        assert!(scale > 0.0, "scale must be positive");
        ScaledMonomialBasis {
            dim,
            degree,
            center,
            scale,
            exponents: multi_indices(dim, degree),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Number of basis functions L = C(m + d, d).
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[[u8; 3]] {
        &self.exponents
    }

    pub fn index_of(&self, exp: [u8; 3]) -> Option<usize> {
        self.exponents.iter().position(|&e| e == exp)
    }

    /// Values of all basis functions at `x`.
    pub fn eval(&self, x: &Vec3) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(x, &mut out);
        out
    }

    pub fn eval_into(&self, x: &Vec3, out: &mut [f64]) {
        let m = self.degree;
        let mut powers = [[1.0f64; 8]; 3];
        debug_assert!(m < 8);
        for i in 0..self.dim {
            let t = (x[i] - self.center[i]) / self.scale;
            for p in 1..=m {
                powers[i][p] = powers[i][p - 1] * t;
            }
        }
        for (o, e) in out.iter_mut().zip(&self.exponents) {
            let mut v = powers[0][e[0] as usize] * powers[1][e[1] as usize];
            if self.dim == 3 {
                v *= powers[2][e[2] as usize];
            }
            *o = v;
        }
    }

    /// Evaluates the polynomial with the given coefficients at `x`.
    pub fn eval_poly(&self, coeffs: &[f64], x: &Vec3) -> f64 {
        debug_assert_eq!(coeffs.len(), self.len());
        self.eval(x).iter().zip(coeffs).map(|(a, b)| a * b).sum()
    }

    /// Matrix `D` with `D · c` the coefficients of `∂p/∂x_direction` for
    /// `p = Σ c_α φ_α`.
    pub fn diff_matrix(&self, direction: usize) -> DMatrix<f64> {
        assert!(direction < self.dim, "direction out of range");
        let n = self.len();
        let mut d = DMatrix::zeros(n, n);
        for (col, e) in self.exponents.iter().enumerate() {
            let a = e[direction];
            if a == 0 {
                continue;
            }
            let mut lower = *e;
            lower[direction] -= 1;
            let row = self.index_of(lower).expect("lowered index is in the basis");
            d[(row, col)] = a as f64 / self.scale;
        }
        d
    }

    /// Coefficients of a polynomial given in another basis of the same dimension,
    /// expressed in this one. Requires `self.degree() >= other.degree()`.
    pub fn convert_from(&self, other: &ScaledMonomialBasis, coeffs: &[f64]) -> Vec<f64> {
        // p(x) = Σ c_α ((x - c')/s')^α; with y = (x - c)/s,
        // (x - c')/s' = (s y + (c - c'))/s'.
        assert!(self.degree >= other.degree && self.dim == other.dim);
        let m = self.degree;
        // per-axis expansion of ((s y + δ)/s')^p into powers of y
        let mut axis: Vec<Vec<Vec<f64>>> = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let a = self.scale / other.scale;
            let b = (self.center[i] - other.center[i]) / other.scale;
            let mut table = vec![vec![0.0; m + 1]; m + 1];
            table[0][0] = 1.0;
            for p in 1..=m {
                for q in 0..=p {
                    let from_b = table[p - 1][q] * b;
                    let from_a = if q > 0 { table[p - 1][q - 1] * a } else { 0.0 };
                    table[p][q] = from_b + from_a;
                }
            }
            axis.push(table);
        }
        let mut out = vec![0.0; self.len()];
        for (c, e) in coeffs.iter().zip(other.exponents()) {
            if *c == 0.0 {
                continue;
            }
            for (o, f) in out.iter_mut().zip(&self.exponents) {
                let mut v = *c;
                for i in 0..self.dim {
                    v *= axis[i][e[i] as usize][f[i] as usize];
                }
                *o += v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_size() {
        let e = multi_indices(2, 2);
        assert_eq!(e, vec![[0, 0, 0], [1, 0, 0], [0, 1, 0], [2, 0, 0], [1, 1, 0], [0, 2, 0]]);
        assert_eq!(multi_indices(3, 3).len(), 20);
        assert_eq!(poly_dim(2, 4), 15);
        assert_eq!(poly_dim(3, 2), 10);
    }

    #[test]
    fn values_at_center() {
        let b = ScaledMonomialBasis::new(3, 3, [0.2, 0.3, 0.4], 0.5);
        let v = b.eval(&[0.2, 0.3, 0.4]);
        assert_eq!(v[0], 1.0);
        assert!(v[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn derivative_of_x_and_x_squared() {
        let b = ScaledMonomialBasis::new(2, 2, [0.0; 3], 1.0);
        let dx = b.diff_matrix(0);
        let mut p = vec![0.0; 6];
        p[1] = 1.0; // x
        let d = &dx * nalgebra::DVector::from_vec(p);
        assert_eq!(d.as_slice(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let mut p = vec![0.0; 6];
        p[3] = 1.0; // x²
        let d = &dx * nalgebra::DVector::from_vec(p);
        assert_eq!(d.as_slice(), &[0.0, 2.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn diff_matrix_is_nilpotent() {
        for dim in [2, 3] {
            for m in 1..=4 {
                let b = ScaledMonomialBasis::new(dim, m, [0.1, 0.2, 0.3], 0.7);
                for dir in 0..dim {
                    let d = b.diff_matrix(dir);
                    let mut p = d.clone();
                    for _ in 0..m {
                        p = &p * &d;
                    }
                    assert!(p.iter().all(|&x| x == 0.0));
                }
            }
        }
    }

    #[test]
    fn basis_change_preserves_values() {
        let a = ScaledMonomialBasis::new(2, 3, [0.5, 0.5, 0.0], 1.0);
        let b = ScaledMonomialBasis::new(2, 3, [0.1, 0.7, 0.0], 0.2);
        let c: Vec<f64> = (0..a.len()).map(|i| (i as f64 * 0.37).sin()).collect();
        let cb = b.convert_from(&a, &c);
        for x in [[0.3, 0.2, 0.0], [0.9, 0.1, 0.0], [0.15, 0.66, 0.0]] {
            assert!((a.eval_poly(&c, &x) - b.eval_poly(&cb, &x)).abs() < 1e-12);
        }
    }
}
