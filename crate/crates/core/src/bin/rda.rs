use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rda::analysis::observed_rates;
use rda::harness::{
    lambda_csv, rate_table, run_example, run_lambda_study, run_single, study_csv, ExampleId, RunConfig,
};
use rda::mesh::load_gmsh;
use rda::solver::SolverKind;
use rda::{RdaError, Result};

#[derive(Parser)]
#[command(name = "rda", version, about = "Reconstructed discontinuous approximation for the quad-curl problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one example on one mesh.
    Solve {
        #[arg(long)]
        example: ExampleId,
        #[arg(long)]
        order: usize,
        /// Cells per side.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long = "patch-size")]
        patch_size: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// auto, pcg or direct.
        #[arg(long, default_value = "auto")]
        solver: SolverKind,
        /// Write the assembled matrix in triplet format.
        #[arg(long = "export-matrix")]
        export_matrix: Option<PathBuf>,
        /// Fill the wall_ms column.
        #[arg(long)]
        timing: bool,
    },
    /// Run a sequence of meshes and report observed rates.
    Convergence {
        #[arg(long)]
        example: ExampleId,
        #[arg(long)]
        order: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long = "patch-size")]
        patch_size: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// auto, pcg or direct.
        #[arg(long, default_value = "auto")]
        solver: SolverKind,
        /// Fail unless the finest-pair rates are within tolerance of m − 1.
        #[arg(long = "assert-rates")]
        assert_rates: bool,
        #[arg(long)]
        timing: bool,
    },
    /// Tabulate Λ_m against the patch threshold.
    Lambda {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        order: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long = "patch-sizes", value_delimiter = ',', required = true)]
        patch_sizes: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print element, vertex and face counts of a Gmsh file.
    MeshInfo {
        #[arg(long)]
        mesh: PathBuf,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| RdaError::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_rates(config: &RunConfig, records: &[rda::analysis::ErrorRecord]) -> Result<()> {
    let m = config.order as f64;
    let tol_energy = if config.dim() == 3 { 0.35 } else { 0.25 };
    let last = records
        .last()
        .filter(|r| r.rate_energy.is_some())
        .ok_or_else(|| RdaError::InvalidConfig("rate assertions need at least two levels".into()))?;
    let (re, rl) = (last.rate_energy.unwrap(), last.rate_l2.unwrap());
    let mut failures = Vec::new();
    if (re - (m - 1.0)).abs() > tol_energy {
        failures.push(format!("energy rate {re:.3} outside {} ± {tol_energy}", m - 1.0));
    }
    if rl < m - 1.0 - 0.25 {
        failures.push(format!("L2 rate {rl:.3} below {}", m - 1.25));
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(RdaError::InvalidConfig(failures.join("; ")))
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve {
            example,
            order,
            n,
            eta,
            patch_size,
            out,
            tol,
            solver,
            export_matrix,
            timing,
        } => {
            let mut config = RunConfig::new(example, order, vec![n]);
            config.eta = eta;
            config.patch_size = patch_size;
            config.tol = tol;
            config.solver = solver;
            let outcome = run_single(&config, n)?;
            if let Some(p) = export_matrix {
                outcome.system.matrix().write_triplets(p)?;
            }
            let mut records = vec![outcome.record];
            observed_rates(&mut records)?;
            eprintln!(
                "{} m={} n={}: {} via {}, relative residual {:.3e}, face sign {}",
                example.name(),
                order,
                n,
                outcome.system.num_dofs(),
                outcome.report.method.tag(),
                outcome.report.relative_residual,
                outcome.system.sign().tag()
            );
            eprint!("{}", rate_table(&records));
            emit(&study_csv(&records, timing), out.as_ref())
        }
        Command::Convergence {
            example,
            order,
            levels,
            eta,
            patch_size,
            out,
            tol,
            solver,
            assert_rates,
            timing,
        } => {
            let mut config = RunConfig::new(example, order, levels);
            config.eta = eta;
            config.patch_size = patch_size;
            config.tol = tol;
            config.solver = solver;
            let records = run_example(&config)?;
            eprint!("{}", rate_table(&records));
            emit(&study_csv(&records, timing), out.as_ref())?;
            if assert_rates {
                check_rates(&config, &records)?;
            }
            Ok(())
        }
        Command::Lambda {
            dim,
            order,
            n,
            patch_sizes,
            out,
        } => {
            let rows = run_lambda_study(dim, order, &n, &patch_sizes)?;
            emit(&lambda_csv(&rows), out.as_ref())
        }
        Command::MeshInfo { mesh } => {
            let m = load_gmsh(&mesh)?;
            println!("dimension: {}", m.dim());
            println!("vertices: {}", m.num_vertices());
            println!("elements: {}", m.num_elements());
            println!("faces: {} ({} interior, {} boundary)", m.faces().len(), m.num_interior_faces(), m.num_boundary_faces());
            println!("h: {:.6e}", m.h());
            println!("measure: {:.12e}", m.total_measure());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("RDA_THREADS") {
        match v.parse::<usize>() {
            Ok(t) if t > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
            _ => {
                eprintln!("error: RDA_THREADS must be a positive integer, got '{v}'");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
