//! Assembly of the symmetric interior penalty system over the reconstructed
//! space.
//!
//! Local blocks are formed in each element's polynomial basis and then
//! contracted through the reconstruction weights, so the unknowns are the
//! element barycenter values (element-major, component-minor).

mod local;

pub use local::TraceEval;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use local::{boundary_load, face_matrix, face_point_ops_field, volume_load, volume_matrix, CurlCache};

use crate::analysis::{ExactSolution, SolutionField};
use crate::mesh::Mesh;
use crate::poly::{cross_normal, face_quadrature, simplex_quadrature, MAX_EXACTNESS};
use crate::reconstruction::ReconstructionOperator;
use crate::solver::CsrMatrix;
use crate::{RdaError, Result, Vec3};

/// Sign in front of the face consistency and symmetry terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FaceSign {
    #[default]
    Plus,
    Minus,
}

impl FaceSign {
    pub fn value(&self) -> f64 {
        match self {
            FaceSign::Plus => 1.0,
            FaceSign::Minus => -1.0,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            FaceSign::Plus => "+",
            FaceSign::Minus => "-",
        }
    }
}

/// Which parts of the form to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Terms {
    /// `curl²·curl²` and mass.
    pub volume: bool,
    /// Face consistency and symmetry terms.
    pub consistency: bool,
    /// Face penalties.
    pub penalty: bool,
}

impl Default for Terms {
    fn default() -> Self {
        Terms {
            volume: true,
            consistency: true,
            penalty: true,
        }
    }
}

impl Terms {
    pub fn penalty_only() -> Self {
        Terms {
            volume: false,
            consistency: false,
            penalty: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    pub eta: f64,
    pub sign: FaceSign,
    pub terms: Terms,
    /// Exactness of the load-vector quadrature; the matrix always uses `2m`.
    pub load_exactness: usize,
}

impl AssemblyOptions {
    /// Default penalty and a load quadrature four degrees above `2m`.
    pub fn new(dim: usize, degree: usize) -> Self {
        AssemblyOptions {
            eta: default_eta(dim, degree),
            sign: FaceSign::default(),
            terms: Terms::default(),
            load_exactness: (2 * degree + 4).min(MAX_EXACTNESS),
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }
}

/// `10 m²` in 2D and `20 m²` in 3D.
pub fn default_eta(dim: usize, degree: usize) -> f64 {
    let m2 = (degree * degree) as f64;
    if dim == 2 {
        10.0 * m2
    } else {
        20.0 * m2
    }
}

/// `(μ₁, μ₂) = (η / h_e³, η / h_e)`.
pub fn penalties(h_e: f64, eta: f64) -> (f64, f64) {
    (eta / h_e.powi(3), eta / h_e)
}

/// Right-hand side data: source term and the two boundary traces.
pub trait LoadData: Sync {
    fn dim(&self) -> usize;
    /// `f(x)`.
    fn source(&self, x: &Vec3) -> Vec3;
    /// `g₁ = u × n` on the boundary.
    fn g1(&self, x: &Vec3, n: &Vec3) -> Vec<f64>;
    /// `g₂ = (curl u) × n` on the boundary.
    fn g2(&self, x: &Vec3, n: &Vec3) -> Vec<f64>;
}

/// Load data manufactured from a known solution.
pub struct ManufacturedData<'a>(pub &'a dyn ExactSolution);

impl LoadData for ManufacturedData<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn source(&self, x: &Vec3) -> Vec3 {
        self.0.source(x)
    }

    fn g1(&self, x: &Vec3, n: &Vec3) -> Vec<f64> {
        let d = self.dim();
        cross_normal(d, &self.0.curl_n(0, x)[..d], n)
    }

    fn g2(&self, x: &Vec3, n: &Vec3) -> Vec<f64> {
        let d = self.dim();
        let c = self.0.curl_n(1, x);
        cross_normal(d, &c[..crate::poly::curl_components(d, 1)], n)
    }
}

/// Assembled matrix and load vector.
#[derive(Debug, Clone)]
pub struct DGSystem {
    matrix: CsrMatrix,
    rhs: Vec<f64>,
    eta: f64,
    sign: FaceSign,
    dim: usize,
    degree: usize,
    face_penalties: Vec<(f64, f64)>,
}

impl DGSystem {
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn set_rhs(&mut self, rhs: Vec<f64>) {
        assert_eq!(rhs.len(), self.matrix.nrows());
        self.rhs = rhs;
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn sign(&self) -> FaceSign {
        self.sign
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_dofs(&self) -> usize {
        self.rhs.len()
    }

    /// Unknowns per element, used as the preconditioner block size.
    pub fn block_size(&self) -> usize {
        self.dim
    }

    /// `(μ₁, μ₂)` for every face, in mesh face order.
    pub fn face_penalties(&self) -> &[(f64, f64)] {
        &self.face_penalties
    }

    /// `max |A − Aᵀ| / max |A|`.
    pub fn relative_asymmetry(&self) -> f64 {
        let m = self.matrix.max_abs();
        if m == 0.0 {
            0.0
        } else {
            self.matrix.symmetry_error() / m
        }
    }
}

/// Elements coupled to each element through some volume or face block.
pub fn element_pattern(mesh: &Mesh, op: &ReconstructionOperator) -> Vec<Vec<usize>> {
    // Everything reachable from element k's patch or its neighbours' patches.
    let reach: Vec<Vec<usize>> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|k| {
            let mut r = op.patch(k).members.clone();
            for &f in mesh.element_faces(k) {
                let (p, m) = mesh.faces()[f].elements;
                if let Some(m) = m {
                    let other = if p == k { m } else { p };
                    r.extend_from_slice(&op.patch(other).members);
                }
            }
            r.sort_unstable();
            r.dedup();
            r
        })
        .collect();
    (0..mesh.num_elements())
        .into_par_iter()
        .map(|a| {
            let mut row: Vec<usize> = op.support(a).iter().flat_map(|&k| reach[k].iter().copied()).collect();
            row.sort_unstable();
            row.dedup();
            row
        })
        .collect()
}

fn dof_pattern(mesh: &Mesh, op: &ReconstructionOperator) -> CsrMatrix {
    let d = mesh.dim();
    let elems = element_pattern(mesh, op);
    let rows: Vec<Vec<usize>> = elems
        .iter()
        .flat_map(|row| {
            let cols: Vec<usize> = row.iter().flat_map(|&b| (0..d).map(move |c| b * d + c)).collect();
            std::iter::repeat_n(cols, d)
        })
        .collect();
    CsrMatrix::from_pattern(d * mesh.num_elements(), &rows)
}

/// Maps the scalar coefficients of one or two elements (sides stacked) to
/// the barycenter values of the union of their patches. The same map acts on
/// every component.
struct Expansion {
    elems: Vec<usize>,
    matrix: DMatrix<f64>,
}

fn expansion(op: &ReconstructionOperator, sides: &[usize]) -> Expansion {
    let mut elems: Vec<usize> = sides.iter().flat_map(|&k| op.patch(k).members.iter().copied()).collect();
    elems.sort_unstable();
    elems.dedup();
    if let [k] = sides {
        return Expansion {
            elems,
            matrix: op.weights(*k).clone(),
        };
    }
    let ncoef: usize = sides.iter().map(|&k| op.basis(k).len()).sum();
    let mut x = DMatrix::zeros(ncoef, elems.len());
    let mut off = 0;
    for &k in sides {
        let w = op.weights(k);
        for (p, m) in op.patch(k).members.iter().enumerate() {
            let col = elems.binary_search(m).expect("member listed");
            for a in 0..w.nrows() {
                x[(off + a, col)] += w[(a, p)];
            }
        }
        off += w.nrows();
    }
    Expansion { elems, matrix: x }
}

/// Rows of the stacked coefficient vector holding component `c`.
fn component_rows(op: &ReconstructionOperator, sides: &[usize], c: usize) -> Vec<usize> {
    let d = op.dim();
    let mut rows = Vec::new();
    let mut off = 0;
    for &k in sides {
        let l = op.basis(k).len();
        rows.extend((0..l).map(|a| off + c * l + a));
        off += d * l;
    }
    rows
}

/// A contracted block: one `#elems × #elems` matrix per component pair.
struct LocalBlock {
    elems: Vec<usize>,
    blocks: Vec<DMatrix<f64>>,
}

fn contract(op: &ReconstructionOperator, sides: &[usize], local: &DMatrix<f64>) -> LocalBlock {
    let d = op.dim();
    let e = expansion(op, sides);
    let rows: Vec<Vec<usize>> = (0..d).map(|c| component_rows(op, sides, c)).collect();
    let mut blocks = Vec::with_capacity(d * d);
    for rc in &rows {
        for rc2 in &rows {
            let f = local.select_rows(rc).select_columns(rc2);
            blocks.push(e.matrix.tr_mul(&(f * &e.matrix)));
        }
    }
    LocalBlock { elems: e.elems, blocks }
}

fn scatter(a: &mut CsrMatrix, block: &LocalBlock, d: usize) {
    for (i, &ei) in block.elems.iter().enumerate() {
        for c in 0..d {
            let r = ei * d + c;
            let mut p = a.row_ptr()[r];
            for (j, &ej) in block.elems.iter().enumerate() {
                for c2 in 0..d {
                    let col = ej * d + c2;
                    while a.col_idx()[p] < col {
                        p += 1;
                    }
                    debug_assert_eq!(a.col_idx()[p], col, "entry outside pattern");
                    a.values_mut()[p] += block.blocks[c * d + c2][(i, j)];
                }
            }
        }
    }
}

/// Contracts a local load vector; returns global indices and values.
fn add_load(op: &ReconstructionOperator, sides: &[usize], v: &DVector<f64>) -> (Vec<usize>, Vec<f64>) {
    let d = op.dim();
    let e = expansion(op, sides);
    let mut out = vec![0.0; d * e.elems.len()];
    for c in 0..d {
        let vc = v.select_rows(&component_rows(op, sides, c));
        let g = e.matrix.tr_mul(&vc);
        for (i, x) in g.iter().enumerate() {
            out[i * d + c] = *x;
        }
    }
    let dofs = e.elems.iter().flat_map(|&m| (0..d).map(move |c| m * d + c)).collect();
    (dofs, out)
}

/// Entities are processed in chunks: local blocks in parallel, then
/// scattered in index order so the sums do not depend on scheduling.
const CHUNK: usize = 512;

fn check_degree(op: &ReconstructionOperator) -> Result<()> {
    if op.degree() < 2 {
        return Err(RdaError::InvalidConfig(format!(
            "the reconstructed space needs degree at least 2, got {}",
            op.degree()
        )));
    }
    Ok(())
}

/// Assembles `A`; the load vector is left zero.
pub fn assemble_matrix(mesh: &Mesh, op: &ReconstructionOperator, opts: &AssemblyOptions) -> Result<DGSystem> {
    check_degree(op)?;
    let dim = mesh.dim();
    let degree = op.degree();
    let cache = CurlCache::new(dim, degree);
    let face_rule = face_quadrature(dim, 2 * degree)?;
    let mut a = dof_pattern(mesh, op);

    let ne = mesh.num_elements();
    for start in (0..ne).step_by(CHUNK) {
        let blocks: Vec<LocalBlock> = (start..(start + CHUNK).min(ne))
            .into_par_iter()
            .map(|k| Ok(contract(op, &[k], &volume_matrix(mesh, op, &cache, k, opts)?)))
            .collect::<Result<_>>()?;
        blocks.iter().for_each(|b| scatter(&mut a, b, dim));
    }
    let nf = mesh.faces().len();
    for start in (0..nf).step_by(CHUNK) {
        let blocks: Vec<LocalBlock> = (start..(start + CHUNK).min(nf))
            .into_par_iter()
            .map(|f| {
                let local = face_matrix(mesh, op, &cache, &face_rule, f, opts);
                let sides: Vec<usize> = match mesh.faces()[f].elements {
                    (p, Some(m)) => vec![p, m],
                    (p, None) => vec![p],
                };
                contract(op, &sides, &local)
            })
            .collect();
        blocks.iter().for_each(|b| scatter(&mut a, b, dim));
    }

    let face_penalties = mesh.faces().iter().map(|f| penalties(f.diameter, opts.eta)).collect();
    Ok(DGSystem {
        rhs: vec![0.0; a.nrows()],
        matrix: a,
        eta: opts.eta,
        sign: opts.sign,
        dim,
        degree,
        face_penalties,
    })
}

/// Assembles the load vector `l_h(φ_i)`.
pub fn assemble_rhs(
    mesh: &Mesh,
    op: &ReconstructionOperator,
    data: &dyn LoadData,
    opts: &AssemblyOptions,
) -> Result<Vec<f64>> {
    check_degree(op)?;
    let dim = mesh.dim();
    let cache = CurlCache::new(dim, op.degree());
    let vol_rule = simplex_quadrature(dim, opts.load_exactness)?;
    let face_rule = face_quadrature(dim, opts.load_exactness)?;
    let mut b = vec![0.0; op.num_dofs()];
    let add = |b: &mut Vec<f64>, (dofs, v): (Vec<usize>, Vec<f64>)| {
        for (&i, x) in dofs.iter().zip(v.iter()) {
            b[i] += x;
        }
    };

    let ne = mesh.num_elements();
    if opts.terms.volume {
        for start in (0..ne).step_by(CHUNK) {
            let parts: Vec<(Vec<usize>, Vec<f64>)> = (start..(start + CHUNK).min(ne))
                .into_par_iter()
                .map(|k| add_load(op, &[k], &volume_load(mesh, op, &vol_rule, k, data)))
                .collect();
            parts.into_iter().for_each(|p| add(&mut b, p));
        }
    }
    let boundary: Vec<usize> = (0..mesh.faces().len()).filter(|&f| mesh.faces()[f].is_boundary()).collect();
    for chunk in boundary.chunks(CHUNK) {
        let parts: Vec<(Vec<usize>, Vec<f64>)> = chunk
            .par_iter()
            .map(|&f| {
                let k = mesh.faces()[f].elements.0;
                add_load(op, &[k], &boundary_load(mesh, op, &cache, &face_rule, f, data, opts))
            })
            .collect();
        parts.into_iter().for_each(|p| add(&mut b, p));
    }
    Ok(b)
}

/// Matrix and load vector together.
pub fn assemble(
    mesh: &Mesh,
    op: &ReconstructionOperator,
    data: &dyn LoadData,
    opts: &AssemblyOptions,
) -> Result<DGSystem> {
    let mut sys = assemble_matrix(mesh, op, opts)?;
    sys.rhs = assemble_rhs(mesh, op, data, opts)?;
    Ok(sys)
}

/// Residual of the discrete equations at the barycenter samples of an exact
/// solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyReport {
    /// `max_i |B_h(u*, φ_i) − l_h(φ_i)|`.
    pub max_residual: f64,
    /// `max_i (Σ_j |A_ij g_j| + |b_i|)`, the size of the cancelling terms.
    pub scale: f64,
}

impl ConsistencyReport {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.max_residual
        } else {
            self.max_residual / self.scale
        }
    }
}

/// Evaluates the discrete equations at `u*` with data manufactured from
/// `u*`. For a polynomial of degree at most `m` the reconstruction
/// reproduces `u*`, so the residual vanishes iff the scheme is consistent.
pub fn galerkin_consistency_check(
    mesh: &Mesh,
    op: &ReconstructionOperator,
    exact: &dyn ExactSolution,
    opts: &AssemblyOptions,
) -> Result<ConsistencyReport> {
    let sys = assemble(mesh, op, &ManufacturedData(exact), opts)?;
    let g = op.sample(mesh, |x| exact.value(x));
    let a = sys.matrix();
    let mut report = ConsistencyReport {
        max_residual: 0.0,
        scale: 0.0,
    };
    for i in 0..a.nrows() {
        let (cols, vals) = a.row(i);
        let ag: f64 = cols.iter().zip(vals).map(|(&j, &v)| v * g[j]).sum();
        let mag: f64 = cols.iter().zip(vals).map(|(&j, &v)| (v * g[j]).abs()).sum();
        report.max_residual = report.max_residual.max((ag - sys.rhs[i]).abs());
        report.scale = report.scale.max(mag + sys.rhs[i].abs());
    }
    Ok(report)
}

/// Largest `|⟦u⟧|` or `|⟦curl u⟧|` component over interior face quadrature
/// points.
pub fn max_interior_jump(mesh: &Mesh, field: &SolutionField, exactness: usize) -> Result<f64> {
    let dim = mesh.dim();
    let rule = face_quadrature(dim, exactness)?;
    let curls: Vec<_> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|k| field.curl_fields(k, 1))
        .collect();
    Ok((0..mesh.faces().len())
        .into_par_iter()
        .filter_map(|f| {
            let face = &mesh.faces()[f];
            let (kp, km) = face.elements;
            let km = km?;
            let mut worst: f64 = 0.0;
            for (x, _) in rule.map(&mesh.face_coords(f), face.measure) {
                for (p, q) in curls[kp].iter().zip(&curls[km]).take(2) {
                    let j = face_point_ops_field(dim, p, q, &x, &face.normal);
                    worst = j.iter().fold(worst, |m, v| m.max(v.abs()));
                }
            }
            Some(worst)
        })
        .reduce(|| 0.0, f64::max))
}
