//! Linear solvers for the assembled system.

mod csr;
mod envelope;

pub use csr::CsrMatrix;
pub use envelope::{reverse_cuthill_mckee, EnvelopeCholesky};

use nalgebra::{DMatrix, DVector};

use crate::assembly::DGSystem;
use crate::{RdaError, Result};

/// Systems below this many unknowns are solved by dense Cholesky.
pub const DIRECT_THRESHOLD: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Pcg,
    DenseCholesky,
    EnvelopeCholesky,
}

impl SolveMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            SolveMethod::Pcg => "pcg",
            SolveMethod::DenseCholesky => "dense-cholesky",
            SolveMethod::EnvelopeCholesky => "envelope-cholesky",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    pub relative_residual: f64,
    /// Zero for direct solves.
    pub iterations: usize,
    pub method: SolveMethod,
    /// `½xᵀAx − bᵀx` after each CG step. It equals `½‖x − x*‖²_A` up to a
    /// constant, so it never increases for an SPD matrix.
    pub energy_history: Vec<f64>,
}

/// Which algorithm [`solve_matrix`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    /// Dense Cholesky below `direct_threshold` unknowns, envelope Cholesky
    /// above.
    #[default]
    Auto,
    /// Block-Jacobi preconditioned CG at every size.
    Pcg,
    /// Envelope Cholesky at every size.
    Direct,
}

impl std::str::FromStr for SolverKind {
    type Err = RdaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SolverKind::Auto),
            "pcg" => Ok(SolverKind::Pcg),
            "direct" => Ok(SolverKind::Direct),
            _ => Err(RdaError::InvalidConfig(format!(
                "unknown solver '{s}' (expected auto, pcg or direct)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub kind: SolverKind,
    pub tol: f64,
    pub max_iter: usize,
    /// Unknowns per preconditioner block.
    pub block_size: usize,
    pub direct_threshold: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            kind: SolverKind::Auto,
            tol: 1e-10,
            max_iter: 100_000,
            block_size: 1,
            direct_threshold: DIRECT_THRESHOLD,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `‖Ax − b‖ / ‖b‖`, or `‖Ax‖` when `b = 0`.
pub fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let r: Vec<f64> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
    let nb = norm(b);
    if nb > 0.0 {
        norm(&r) / nb
    } else {
        norm(&r)
    }
}

fn zero_report(n: usize, method: SolveMethod) -> SolveReport {
    SolveReport {
        solution: vec![0.0; n],
        relative_residual: 0.0,
        iterations: 0,
        method,
        energy_history: Vec::new(),
    }
}

/// Inverted diagonal blocks of size `block`.
struct BlockJacobi {
    block: usize,
    inv: Vec<DMatrix<f64>>,
}

impl BlockJacobi {
    fn new(a: &CsrMatrix, block: usize) -> Result<Self> {
        let n = a.nrows();
        let block = block.max(1);
        let inv = (0..n.div_ceil(block))
            .map(|b| {
                let lo = b * block;
                let sz = block.min(n - lo);
                let m = DMatrix::from_fn(sz, sz, |i, j| a.get(lo + i, lo + j));
                m.cholesky().map(|c| c.inverse()).ok_or(RdaError::NonSpd)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockJacobi { block, inv })
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        for (b, m) in self.inv.iter().enumerate() {
            let lo = b * self.block;
            let sz = m.nrows();
            for i in 0..sz {
                z[lo + i] = (0..sz).map(|j| m[(i, j)] * r[lo + j]).sum();
            }
        }
    }
}

/// Conjugate gradients preconditioned by the inverted `block × block`
/// diagonal blocks.
pub fn pcg(a: &CsrMatrix, b: &[f64], block: usize, tol: f64, max_iter: usize) -> Result<SolveReport> {
    let n = a.nrows();
    let nb = norm(b);
    if nb == 0.0 {
        return Ok(zero_report(n, SolveMethod::Pcg));
    }
    let prec = BlockJacobi::new(a, block)?;
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    prec.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut history = Vec::new();
    for it in 1..=max_iter {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap.is_nan() || pap <= 0.0 {
            return Err(RdaError::NonSpd);
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        history.push(-0.5 * (dot(b, &x) + dot(&r, &x)));
        if norm(&r) <= tol * nb {
            // The recurrence residual drifts from the true one; confirm.
            let rel = relative_residual(a, &x, b);
            if rel <= tol {
                return Ok(SolveReport {
                    solution: x,
                    relative_residual: rel,
                    iterations: it,
                    method: SolveMethod::Pcg,
                    energy_history: history,
                });
            }
            let ax = a.mul_vec(&x);
            for i in 0..n {
                r[i] = b[i] - ax[i];
            }
        }
        prec.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(RdaError::NoConvergence {
        iterations: max_iter,
        residual: relative_residual(a, &x, b),
    })
}

/// Dense Cholesky solve, refined towards `tol`.
pub fn dense_cholesky(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<SolveReport> {
    let chol = a.to_dense().cholesky().ok_or(RdaError::NonSpd)?;
    let solve = |r: &[f64]| chol.solve(&DVector::from_column_slice(r)).as_slice().to_vec();
    let mut x = solve(b);
    let rel = refine(a, b, &mut x, tol, solve);
    Ok(SolveReport {
        relative_residual: rel,
        solution: x,
        iterations: 0,
        method: SolveMethod::DenseCholesky,
        energy_history: Vec::new(),
    })
}

/// Rounds of iterative refinement allowed after a direct solve.
const REFINEMENT_STEPS: usize = 3;

/// Improves `x` with `x += A⁻¹(b − Ax)` until the relative residual is at
/// most `tol`; returns the final relative residual.
fn refine(a: &CsrMatrix, b: &[f64], x: &mut [f64], tol: f64, solve: impl Fn(&[f64]) -> Vec<f64>) -> f64 {
    let mut rel = relative_residual(a, x, b);
    for _ in 0..REFINEMENT_STEPS {
        if rel <= tol {
            break;
        }
        let ax = a.mul_vec(x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let dx = solve(&r);
        let trial: Vec<f64> = x.iter().zip(&dx).map(|(p, q)| p + q).collect();
        let next = relative_residual(a, &trial, b);
        if next >= rel {
            break;
        }
        x.copy_from_slice(&trial);
        rel = next;
    }
    rel
}

/// Sparse direct solve through [`EnvelopeCholesky`], refined towards `tol`.
pub fn envelope_cholesky(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<SolveReport> {
    let f = EnvelopeCholesky::factor(a)?;
    let mut x = f.solve(b);
    let rel = refine(a, b, &mut x, tol, |r| f.solve(r));
    Ok(SolveReport {
        relative_residual: rel,
        solution: x,
        iterations: 0,
        method: SolveMethod::EnvelopeCholesky,
        energy_history: Vec::new(),
    })
}

fn method_for(n: usize, opts: &SolverOptions) -> SolveMethod {
    match opts.kind {
        SolverKind::Pcg => SolveMethod::Pcg,
        SolverKind::Direct => SolveMethod::EnvelopeCholesky,
        SolverKind::Auto if n < opts.direct_threshold => SolveMethod::DenseCholesky,
        SolverKind::Auto => SolveMethod::EnvelopeCholesky,
    }
}

/// Solves `A x = b` with the method selected by `opts`.
pub fn solve_matrix(a: &CsrMatrix, b: &[f64], opts: &SolverOptions) -> Result<SolveReport> {
    let method = method_for(a.nrows(), opts);
    if b.iter().all(|&v| v == 0.0) {
        return Ok(zero_report(a.nrows(), method));
    }
    let report = match method {
        SolveMethod::DenseCholesky => dense_cholesky(a, b, opts.tol)?,
        SolveMethod::EnvelopeCholesky => envelope_cholesky(a, b, opts.tol)?,
        SolveMethod::Pcg => return pcg(a, b, opts.block_size, opts.tol, opts.max_iter),
    };
    if report.relative_residual > opts.tol {
        return Err(RdaError::NoConvergence {
            iterations: 0,
            residual: report.relative_residual,
        });
    }
    Ok(report)
}

/// Solves an assembled system with the default method selection.
pub fn solve(system: &DGSystem, tol: f64, max_iter: usize) -> Result<SolveReport> {
    solve_with(system, SolverKind::Auto, tol, max_iter)
}

/// Solves an assembled system; PCG uses the per-element blocks as
/// preconditioner.
pub fn solve_with(system: &DGSystem, kind: SolverKind, tol: f64, max_iter: usize) -> Result<SolveReport> {
    let opts = SolverOptions {
        kind,
        tol,
        max_iter,
        block_size: system.block_size(),
        ..Default::default()
    };
    solve_matrix(system.matrix(), system.rhs(), &opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize) -> CsrMatrix {
        let a = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                4.0 + i as f64 * 0.1
            } else if i.abs_diff(j) <= 2 {
                -0.7
            } else {
                0.0
            }
        });
        CsrMatrix::from_dense(&a)
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let r = pcg(&spd(10), &[0.0; 10], 2, 1e-10, 100).unwrap();
        assert_eq!(r.solution, vec![0.0; 10]);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn identity_system() {
        let mut b = vec![0.0; 5];
        b[0] = 1.0;
        let r = pcg(&CsrMatrix::identity(5), &b, 1, 1e-12, 10).unwrap();
        assert_eq!(r.solution, b);
    }

    #[test]
    fn pcg_matches_dense() {
        let a = spd(40);
        let b: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).cos()).collect();
        let it = pcg(&a, &b, 2, 1e-12, 500).unwrap();
        let de = dense_cholesky(&a, &b, 1e-14).unwrap();
        let env = envelope_cholesky(&a, &b, 1e-14).unwrap();
        for i in 0..40 {
            assert!((it.solution[i] - de.solution[i]).abs() < 1e-9);
            assert!((env.solution[i] - de.solution[i]).abs() < 1e-12);
        }
        assert!(it.energy_history.windows(2).all(|w| w[1] <= w[0] + 1e-14));
    }

    #[test]
    fn indefinite_breaks_down() {
        let a = CsrMatrix::from_dense(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        assert!(matches!(pcg(&a, &[1.0, 1.0], 1, 1e-10, 10), Err(RdaError::NonSpd)));
        assert!(matches!(dense_cholesky(&a, &[1.0, 1.0], 1e-10), Err(RdaError::NonSpd)));
    }

    #[test]
    fn selection_by_size() {
        let opts = SolverOptions {
            direct_threshold: 10,
            ..Default::default()
        };
        let a = spd(20);
        let b = vec![1.0; 20];
        assert_eq!(solve_matrix(&a, &b, &opts).unwrap().method, SolveMethod::EnvelopeCholesky);
        let pcg_opts = SolverOptions {
            kind: SolverKind::Pcg,
            ..opts
        };
        assert_eq!(solve_matrix(&a, &b, &pcg_opts).unwrap().method, SolveMethod::Pcg);
        let small = spd(5);
        assert_eq!(solve_matrix(&small, &[1.0; 5], &opts).unwrap().method, SolveMethod::DenseCholesky);
        assert_eq!(solve_matrix(&small, &[1.0; 5], &pcg_opts).unwrap().method, SolveMethod::Pcg);
    }

    #[test]
    fn iteration_cap() {
        let a = spd(60);
        let b = vec![1.0; 60];
        assert!(matches!(pcg(&a, &b, 1, 1e-14, 2), Err(RdaError::NoConvergence { iterations: 2, .. })));
    }
}
