//! C interface to the `rda` solver.
//!
//! Objects cross the boundary as opaque handles. Each is released with the
//! matching `rda_*_free`. Every fallible
//! call returns an [`RdaStatus`]; on failure the message is available from
//! [`rda_last_error_message`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rda::analysis::{energy_parts, error_l2, SolutionField};
use rda::assembly::{assemble, AssemblyOptions, DGSystem, ManufacturedData};
use rda::harness::{structured_mesh, ExampleId};
use rda::mesh::{load_gmsh, Mesh};
use rda::reconstruction::{default_patch_size, ReconstructionOperator};
use rda::solver::{solve_with, SolveReport, SolverKind};
use rda::RdaError;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    InvalidMesh = 5,
    DeficientPatch = 6,
    NotPositiveDefinite = 7,
    NoConvergence = 8,
    Panic = 9,
}

/// Solver selection for [`rda_system_solve`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdaSolver {
    Auto = 0,
    Pcg = 1,
    Direct = 2,
}

/// Error norms of a solution against the manufactured exact solution.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RdaErrors {
    pub h: f64,
    pub err_l2: f64,
    pub err_energy: f64,
}

/// Opaque mesh handle.
pub struct RdaMesh(Mesh);

/// Opaque handle to an assembled system together with its mesh and
/// reconstruction operator.
pub struct RdaSystem {
    mesh: Mesh,
    operator: ReconstructionOperator,
    system: DGSystem,
    example: ExampleId,
}

/// Opaque handle to a solved system.
pub struct RdaSolution {
    report: SolveReport,
    field: SolutionField,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &RdaError) -> RdaStatus {
    match err {
        RdaError::Stage { source, .. } => status_of(source),
        RdaError::Parse { .. } => RdaStatus::Parse,
        RdaError::Io { .. } => RdaStatus::Io,
        RdaError::EmptyMesh | RdaError::NonManifold { .. } => RdaStatus::InvalidMesh,
        RdaError::DeficientPatch { .. } => RdaStatus::DeficientPatch,
        RdaError::NonSpd => RdaStatus::NotPositiveDefinite,
        RdaError::NoConvergence { .. } => RdaStatus::NoConvergence,
        RdaError::ArityMismatch { .. }
        | RdaError::UnsupportedDegree(_)
        | RdaError::DegenerateH(_)
        | RdaError::InvalidConfig(_) => RdaStatus::InvalidArgument,
    }
}

enum Failure {
    Status(RdaStatus, String),
    Rda(RdaError),
}

impl From<RdaError> for Failure {
    fn from(e: RdaError) -> Self {
        Failure::Rda(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(RdaStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: String) -> Failure {
    Failure::Status(RdaStatus::InvalidArgument, message)
}

/// Runs `f`, turning errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RdaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RdaStatus::Ok,
        Ok(Err(Failure::Status(status, message))) => {
            set_last_error(message);
            status
        }
        Ok(Err(Failure::Rda(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            RdaStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

/// Message of the last failing call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rda_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Structured mesh of the unit square (`dim` 2) or cube (`dim` 3) with `n`
/// subdivisions per side.
///
/// # Safety
/// `out_mesh` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn rda_mesh_structured(dim: usize, n: usize, out_mesh: *mut *mut RdaMesh) -> RdaStatus {
    guard(|| {
        let slot = out(out_mesh, "out_mesh")?;
        let mesh = structured_mesh(dim, n)?;
        *slot = Box::into_raw(Box::new(RdaMesh(mesh)));
        Ok(())
    })
}

/// Reads a Gmsh ASCII mesh file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out_mesh` as for
/// [`rda_mesh_structured`].
#[no_mangle]
pub unsafe extern "C" fn rda_mesh_load_gmsh(path: *const c_char, out_mesh: *mut *mut RdaMesh) -> RdaStatus {
    guard(|| {
        let slot = out(out_mesh, "out_mesh")?;
        let mesh = load_gmsh(string(path, "path")?)?;
        *slot = Box::into_raw(Box::new(RdaMesh(mesh)));
        Ok(())
    })
}

/// Spatial dimension and element count of a mesh.
///
/// # Safety
/// `mesh` must come from an `rda_mesh_*` constructor; the outputs must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn rda_mesh_info(mesh: *const RdaMesh, dim: *mut usize, num_elements: *mut usize) -> RdaStatus {
    guard(|| {
        let mesh = &deref(mesh, "mesh")?.0;
        *out(dim, "dim")? = mesh.dim();
        *out(num_elements, "num_elements")? = mesh.num_elements();
        Ok(())
    })
}

/// Releases a mesh. Null is ignored.
///
/// # Safety
/// `mesh` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rda_mesh_free(mesh: *mut RdaMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Builds the reconstruction and assembles the system for one of the
/// manufactured examples (`poly2d`, `poly3d`, `ex1`, `ex2`) on `mesh`.
/// `eta <= 0` selects the default penalty; `patch_size == 0` selects the
/// default patch threshold. The mesh is copied, so it may be freed after.
///
/// # Safety
/// `mesh` must be a live handle, `example` a NUL-terminated string and
/// `out_system` writable.
#[no_mangle]
pub unsafe extern "C" fn rda_system_assemble(
    mesh: *const RdaMesh,
    example: *const c_char,
    order: usize,
    eta: f64,
    patch_size: usize,
    out_system: *mut *mut RdaSystem,
) -> RdaStatus {
    guard(|| {
        let slot = out(out_system, "out_system")?;
        let mesh = deref(mesh, "mesh")?.0.clone();
        let example: ExampleId = string(example, "example")?.parse()?;
        let d = mesh.dim();
        if example.dim() != d {
            return Err(invalid(format!("example {} needs a {}D mesh", example.name(), example.dim())));
        }
        if order < 2 {
            return Err(invalid(format!("order must be at least 2, got {order}")));
        }
        let threshold = match patch_size {
            0 => default_patch_size(d, order)
                .ok_or_else(|| invalid(format!("no default patch size for d={d} m={order}; pass one")))?,
            s => s,
        };
        let operator = ReconstructionOperator::build(&mesh, order, threshold).map_err(|e| e.in_stage("reconstruction"))?;
        let mut opts = AssemblyOptions::new(d, order);
        if eta > 0.0 {
            opts = opts.with_eta(eta);
        }
        let exact = example.solution(order);
        let system = assemble(&mesh, &operator, &ManufacturedData(exact.as_ref()), &opts)
            .map_err(|e| e.in_stage("assembly"))?;
        *slot = Box::into_raw(Box::new(RdaSystem {
            mesh,
            operator,
            system,
            example,
        }));
        Ok(())
    })
}

/// Number of unknowns of an assembled system.
///
/// # Safety
/// `system` must be a live handle and `num_dofs` writable.
#[no_mangle]
pub unsafe extern "C" fn rda_system_num_dofs(system: *const RdaSystem, num_dofs: *mut usize) -> RdaStatus {
    guard(|| {
        *out(num_dofs, "num_dofs")? = deref(system, "system")?.system.num_dofs();
        Ok(())
    })
}

/// Releases a system. Null is ignored.
///
/// # Safety
/// `system` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rda_system_free(system: *mut RdaSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Solves the system to relative residual `tol`.
///
/// # Safety
/// `system` must be a live handle and `out_solution` writable.
#[no_mangle]
pub unsafe extern "C" fn rda_system_solve(
    system: *const RdaSystem,
    solver: RdaSolver,
    tol: f64,
    max_iter: usize,
    out_solution: *mut *mut RdaSolution,
) -> RdaStatus {
    guard(|| {
        let slot = out(out_solution, "out_solution")?;
        let sys = deref(system, "system")?;
        if tol.is_nan() || tol <= 0.0 {
            return Err(invalid(format!("tolerance must be positive, got {tol}")));
        }
        let kind = match solver {
            RdaSolver::Auto => SolverKind::Auto,
            RdaSolver::Pcg => SolverKind::Pcg,
            RdaSolver::Direct => SolverKind::Direct,
        };
        let report = solve_with(&sys.system, kind, tol, max_iter)?;
        let field = sys.operator.reconstruct(&report.solution);
        *slot = Box::into_raw(Box::new(RdaSolution { report, field }));
        Ok(())
    })
}

/// Copies the barycenter values into `values` (capacity `len`) and stores
/// the full length in `written`. With a short buffer nothing is copied and
/// the status is `InvalidArgument`, so callers can query the size first by
/// passing `len == 0`.
///
/// # Safety
/// `values` must hold `len` doubles (may be null when `len` is 0);
/// `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rda_solution_values(
    solution: *const RdaSolution,
    values: *mut f64,
    len: usize,
    written: *mut usize,
) -> RdaStatus {
    guard(|| {
        let x = &deref(solution, "solution")?.report.solution;
        *out(written, "written")? = x.len();
        if len < x.len() {
            return Err(invalid(format!("buffer holds {len} values, need {}", x.len())));
        }
        if values.is_null() {
            return Err(null("values"));
        }
        ptr::copy_nonoverlapping(x.as_ptr(), values, x.len());
        Ok(())
    })
}

/// Iteration count (0 for direct solves) and final relative residual.
///
/// # Safety
/// `solution` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn rda_solution_stats(
    solution: *const RdaSolution,
    iterations: *mut usize,
    relative_residual: *mut f64,
) -> RdaStatus {
    guard(|| {
        let report = &deref(solution, "solution")?.report;
        *out(iterations, "iterations")? = report.iterations;
        *out(relative_residual, "relative_residual")? = report.relative_residual;
        Ok(())
    })
}

/// Evaluates the reconstructed solution on element `element` at `point`
/// (`dim` coordinates), writing `dim` components to `value`.
///
/// # Safety
/// `point` and `value` must each hold the mesh dimension's number of doubles.
#[no_mangle]
pub unsafe extern "C" fn rda_solution_eval(
    system: *const RdaSystem,
    solution: *const RdaSolution,
    element: usize,
    point: *const f64,
    value: *mut f64,
) -> RdaStatus {
    guard(|| {
        let d = deref(system, "system")?.mesh.dim();
        let field = &deref(solution, "solution")?.field;
        if element >= field.num_elements() {
            return Err(invalid(format!("element {element} out of range")));
        }
        if point.is_null() || value.is_null() {
            return Err(null("point or value"));
        }
        let mut x = [0.0; 3];
        x[..d].copy_from_slice(std::slice::from_raw_parts(point, d));
        let v = field.eval(element, &x);
        std::slice::from_raw_parts_mut(value, d).copy_from_slice(&v[..d]);
        Ok(())
    })
}

/// Errors of `solution` against the system's manufactured exact solution.
///
/// # Safety
/// `solution` must come from solving `system`; `errors` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rda_solution_errors(
    system: *const RdaSystem,
    solution: *const RdaSolution,
    errors: *mut RdaErrors,
) -> RdaStatus {
    guard(|| {
        let sys = deref(system, "system")?;
        let field = &deref(solution, "solution")?.field;
        let slot = out(errors, "errors")?;
        if field.num_elements() != sys.mesh.num_elements() {
            return Err(invalid("solution does not belong to this system".into()));
        }
        let m = sys.operator.degree();
        let exact = sys.example.solution(m);
        let exactness = 2 * m + 4;
        *slot = RdaErrors {
            h: sys.mesh.h(),
            err_l2: error_l2(&sys.mesh, field, exact.as_ref(), exactness)?,
            err_energy: energy_parts(&sys.mesh, field, Some(exact.as_ref()), exactness)?.energy(),
        };
        Ok(())
    })
}

/// Releases a solution. Null is ignored.
///
/// # Safety
/// `solution` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rda_solution_free(solution: *mut RdaSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}
