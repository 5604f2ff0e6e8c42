//! Convergence studies, patch tests and Λ studies on structured meshes.

mod solutions;

pub use solutions::{Example1, Example2, PolynomialSolution};

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use crate::analysis::{
    energy_parts, error_l2, observed_rates, records_to_csv, ErrorRecord, ExactSolution, SolutionField,
};
use crate::assembly::{assemble, AssemblyOptions, DGSystem, ManufacturedData};
use crate::mesh::{build_unit_cube_mesh, build_unit_square_mesh, Mesh};
use crate::poly::MAX_EXACTNESS;
use crate::reconstruction::{build_patches, compute_lambda, default_patch_size, ReconstructionOperator};
use crate::solver::{solve_with, SolveReport, SolverKind};
use crate::{RdaError, Result};

/// Seed of the random polynomial used by the patch-test examples.
pub const POLY_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleId {
    Poly2d,
    Poly3d,
    Ex1,
    Ex2,
}

impl ExampleId {
    pub fn dim(&self) -> usize {
        match self {
            ExampleId::Poly2d | ExampleId::Ex1 => 2,
            ExampleId::Poly3d | ExampleId::Ex2 => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExampleId::Poly2d => "poly2d",
            ExampleId::Poly3d => "poly3d",
            ExampleId::Ex1 => "ex1",
            ExampleId::Ex2 => "ex2",
        }
    }

    /// The manufactured solution; polynomial examples use degree `m`.
    pub fn solution(&self, m: usize) -> Box<dyn ExactSolution> {
        match self {
            ExampleId::Poly2d => Box::new(PolynomialSolution::random(2, m, POLY_SEED)),
            ExampleId::Poly3d => Box::new(PolynomialSolution::random(3, m, POLY_SEED)),
            ExampleId::Ex1 => Box::new(Example1),
            ExampleId::Ex2 => Box::new(Example2),
        }
    }
}

impl FromStr for ExampleId {
    type Err = RdaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poly2d" => Ok(ExampleId::Poly2d),
            "poly3d" => Ok(ExampleId::Poly3d),
            "ex1" => Ok(ExampleId::Ex1),
            "ex2" => Ok(ExampleId::Ex2),
            _ => Err(RdaError::InvalidConfig(format!(
                "unknown example '{s}' (expected poly2d, poly3d, ex1 or ex2)"
            ))),
        }
    }
}

/// Unit square (`dim = 2`) or unit cube mesh with `n` cells per side.
pub fn structured_mesh(dim: usize, n: usize) -> Result<Mesh> {
    match dim {
        2 => Ok(build_unit_square_mesh(n)),
        3 => Ok(build_unit_cube_mesh(n)),
        _ => Err(RdaError::InvalidConfig(format!("dimension must be 2 or 3, got {dim}"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub example: ExampleId,
    pub order: usize,
    /// Cells per side of each mesh in the sequence.
    pub levels: Vec<usize>,
    pub eta: Option<f64>,
    pub patch_size: Option<usize>,
    pub solver: SolverKind,
    pub tol: f64,
    pub max_iter: usize,
    /// Compute `Λ_m` for each mesh.
    pub lambda: bool,
}

impl RunConfig {
    pub fn new(example: ExampleId, order: usize, levels: Vec<usize>) -> Self {
        RunConfig {
            example,
            order,
            levels,
            eta: None,
            patch_size: None,
            solver: SolverKind::Auto,
            tol: 1e-10,
            max_iter: 200_000,
            lambda: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.example.dim()
    }

    pub fn patch_threshold(&self) -> Result<usize> {
        self.patch_size.or_else(|| default_patch_size(self.dim(), self.order)).ok_or_else(|| {
            RdaError::InvalidConfig(format!(
                "no default patch size for d={} m={}; pass one explicitly",
                self.dim(),
                self.order
            ))
        })
    }

    pub fn assembly_options(&self) -> AssemblyOptions {
        let opts = AssemblyOptions::new(self.dim(), self.order);
        match self.eta {
            Some(eta) => opts.with_eta(eta),
            None => opts,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(RdaError::InvalidConfig(format!("order must be at least 2, got {}", self.order)));
        }
        if 2 * self.order + 4 > MAX_EXACTNESS {
            return Err(RdaError::UnsupportedDegree(self.order));
        }
        if self.levels.is_empty() || self.levels.contains(&0) {
            return Err(RdaError::InvalidConfig("mesh levels must be positive".into()));
        }
        self.patch_threshold()?;
        Ok(())
    }
}

/// Everything produced by one solve.
#[derive(Debug)]
pub struct RunOutcome {
    pub mesh: Mesh,
    pub operator: ReconstructionOperator,
    pub system: DGSystem,
    pub report: SolveReport,
    pub field: SolutionField,
    pub record: ErrorRecord,
}

/// Builds, assembles, solves and measures errors on one mesh.
pub fn run_single(config: &RunConfig, n: usize) -> Result<RunOutcome> {
    config.validate()?;
    let start = Instant::now();
    let dim = config.dim();
    let m = config.order;
    let exact = config.example.solution(m);
    let mesh = structured_mesh(dim, n)?;
    let threshold = config.patch_threshold()?;
    let patches = build_patches(&mesh, threshold);
    let lambda_m = if config.lambda {
        compute_lambda(&mesh, &patches, m).map_err(|e| e.in_stage("lambda"))?.lambda_m
    } else {
        f64::NAN
    };
    let operator =
        ReconstructionOperator::from_patches(&mesh, m, patches).map_err(|e| e.in_stage("reconstruction"))?;
    let opts = config.assembly_options();
    let system = assemble(&mesh, &operator, &ManufacturedData(exact.as_ref()), &opts)
        .map_err(|e| e.in_stage("assembly"))?;
    let report = solve_with(&system, config.solver, config.tol, config.max_iter).map_err(|e| e.in_stage("solve"))?;
    let field = operator.reconstruct(&report.solution);
    let exactness = (2 * m + 4).min(MAX_EXACTNESS);
    let err_l2 = error_l2(&mesh, &field, exact.as_ref(), exactness).map_err(|e| e.in_stage("errors"))?;
    let parts = energy_parts(&mesh, &field, Some(exact.as_ref()), exactness).map_err(|e| e.in_stage("errors"))?;
    let record = ErrorRecord {
        m,
        d: dim,
        h: mesh.h(),
        n_elem: mesh.num_elements(),
        dofs: system.num_dofs(),
        eta: opts.eta,
        patch_s: threshold,
        err_l2,
        err_energy: parts.energy(),
        err_energy_ext: parts.energy_ext(),
        rate_l2: None,
        rate_energy: None,
        lambda_m,
        solve_iters: report.iterations,
        wall_ms: start.elapsed().as_millis(),
    };
    Ok(RunOutcome {
        mesh,
        operator,
        system,
        report,
        field,
        record,
    })
}

/// Runs every level in order and fills in the observed rates.
pub fn run_example(config: &RunConfig) -> Result<Vec<ErrorRecord>> {
    config.validate()?;
    let mut records = Vec::with_capacity(config.levels.len());
    for &n in &config.levels {
        records.push(run_single(config, n)?.record);
    }
    observed_rates(&mut records)?;
    Ok(records)
}

/// Human-readable table of errors and rates.
pub fn rate_table(records: &[ErrorRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>10} {:>8} {:>9} {:>12} {:>7} {:>12} {:>7} {:>10} {:>6}",
        "h", "elems", "dofs", "err_l2", "rate", "err_energy", "rate", "lambda_m", "iters"
    );
    let fmt_rate = |r: Option<f64>| r.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
    for r in records {
        let _ = writeln!(
            s,
            "{:>10.4e} {:>8} {:>9} {:>12.4e} {:>7} {:>12.4e} {:>7} {:>10.3} {:>6}",
            r.h,
            r.n_elem,
            r.dofs,
            r.err_l2,
            fmt_rate(r.rate_l2),
            r.err_energy,
            fmt_rate(r.rate_energy),
            r.lambda_m,
            r.solve_iters
        );
    }
    s
}

/// CSV for a finished study.
pub fn study_csv(records: &[ErrorRecord], with_timing: bool) -> String {
    records_to_csv(records, with_timing)
}

/// One row of a Λ study.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaRow {
    pub dim: usize,
    pub order: usize,
    pub n: usize,
    pub h: f64,
    pub patch_size: usize,
    /// `None` when some patch is not unisolvent.
    pub lambda_m: Option<f64>,
    pub mean_patch: f64,
}

/// `Λ_m` for every combination of mesh size and patch threshold. Deficient
/// patches are reported in the row rather than aborting the study.
pub fn run_lambda_study(dim: usize, order: usize, sizes: &[usize], patch_sizes: &[usize]) -> Result<Vec<LambdaRow>> {
    let mut rows = Vec::new();
    for &n in sizes {
        let mesh = structured_mesh(dim, n)?;
        for &s in patch_sizes {
            let patches = build_patches(&mesh, s);
            let mean_patch = patches.iter().map(|p| p.len()).sum::<usize>() as f64 / patches.len() as f64;
            let lambda_m = match compute_lambda(&mesh, &patches, order) {
                Ok(r) => Some(r.lambda_m),
                Err(RdaError::DeficientPatch { .. }) => None,
                Err(e) => return Err(e),
            };
            rows.push(LambdaRow {
                dim,
                order,
                n,
                h: mesh.h(),
                patch_size: s,
                lambda_m,
                mean_patch,
            });
        }
    }
    Ok(rows)
}

pub const LAMBDA_CSV_HEADER: &str = "d,m,n,h,patch_S,mean_patch,lambda_m,status";

pub fn lambda_csv(rows: &[LambdaRow]) -> String {
    let mut s = String::from(LAMBDA_CSV_HEADER);
    s.push('\n');
    for r in rows {
        let (lam, status) = match r.lambda_m {
            Some(v) => (format!("{v:.10e}"), "ok"),
            None => (String::new(), "deficient"),
        };
        let _ = writeln!(
            s,
            "{},{},{},{:.10e},{},{:.4},{},{}",
            r.dim, r.order, r.n, r.h, r.patch_size, r.mean_patch, lam, status
        );
    }
    s
}
