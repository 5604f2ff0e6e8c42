//! Local blocks in each element's polynomial coefficient space.
//!
//! The coefficient vector of an element stacks its `d` components, each over
//! the element's scaled monomial basis (`d · L` entries). A face block acts
//! on the concatenation of the plus and minus side vectors.

use nalgebra::{DMatrix, DVector};

use super::{AssemblyOptions, LoadData};
use crate::mesh::Mesh;
use crate::poly::{cross_normal_rows, curl_components, curl_powers, QuadratureRule, ScaledMonomialBasis};
use crate::reconstruction::{mass_matrix, ReconstructionOperator};
use crate::{Result, Vec3};

/// Curl-power matrices of the unit-scale basis; a basis with scale `h`
/// has `curl^k` matrix `C_k / h^k`.
#[derive(Debug, Clone)]
pub(crate) struct CurlCache {
    reference: Vec<DMatrix<f64>>,
}

impl CurlCache {
    pub(crate) fn new(dim: usize, degree: usize) -> Self {
        let basis = ScaledMonomialBasis::new(dim, degree, [0.0; 3], 1.0);
        CurlCache {
            reference: curl_powers(&basis, 3),
        }
    }

    pub(crate) fn scaled(&self, k: usize, h: f64) -> DMatrix<f64> {
        &self.reference[k] / h.powi(k as i32)
    }
}

/// Values of `curl^k` (k = 0..3) of the element's polynomial space at a
/// point: one matrix per `k` with a row per component of `curl^k` and a
/// column per coefficient.
#[derive(Debug, Clone)]
pub struct TraceEval {
    pub curls: [DMatrix<f64>; 4],
}

impl TraceEval {
    pub(crate) fn at(basis: &ScaledMonomialBasis, cache: &CurlCache, x: &Vec3) -> Self {
        let dim = basis.dim();
        let l = basis.len();
        let phi = basis.eval(x);
        let h = basis.scale();
        let curls = std::array::from_fn(|k| {
            let c = &cache.reference[k];
            let rows = curl_components(dim, k);
            let s = h.powi(-(k as i32));
            DMatrix::from_fn(rows, c.ncols(), |i, col| {
                s * (0..l).map(|a| phi[a] * c[(i * l + a, col)]).sum::<f64>()
            })
        });
        TraceEval { curls }
    }
}

/// Element stiffness and mass: `∫ curl²u·curl²v + u·v`.
pub(crate) fn volume_matrix(
    mesh: &Mesh,
    op: &ReconstructionOperator,
    cache: &CurlCache,
    k: usize,
    opts: &AssemblyOptions,
) -> Result<DMatrix<f64>> {
    let basis = op.basis(k);
    let dim = mesh.dim();
    let l = basis.len();
    let mass = mass_matrix(basis, &mesh.element_coords(k), mesh.volumes()[k])?;
    let mut e = DMatrix::zeros(dim * l, dim * l);
    if !opts.terms.volume {
        return Ok(e);
    }
    let c2 = cache.scaled(2, basis.scale());
    let n2 = curl_components(dim, 2);
    let mut mc2 = DMatrix::zeros(n2 * l, dim * l);
    for i in 0..n2 {
        let blk = &mass * c2.rows(i * l, l);
        mc2.rows_mut(i * l, l).copy_from(&blk);
    }
    e += c2.tr_mul(&mc2);
    for i in 0..dim {
        let mut blk = e.view_mut((i * l, i * l), (l, l));
        blk += &mass;
    }
    Ok(e)
}

/// Per-side traces at one face point, combined into jumps and averages over
/// the concatenated coefficient space.
struct FacePointOps {
    j0: DMatrix<f64>,
    j1: DMatrix<f64>,
    a2: DMatrix<f64>,
    a3: DMatrix<f64>,
}

fn face_point_ops(
    dim: usize,
    plus: &TraceEval,
    minus: Option<&TraceEval>,
    n: &Vec3,
) -> FacePointOps {
    let neg = [-n[0], -n[1], -n[2]];
    let join = |a: DMatrix<f64>, b: Option<DMatrix<f64>>| match b {
        None => a,
        Some(b) => {
            let mut m = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
            m.columns_mut(0, a.ncols()).copy_from(&a);
            m.columns_mut(a.ncols(), b.ncols()).copy_from(&b);
            m
        }
    };
    let half = if minus.is_some() { 0.5 } else { 1.0 };
    FacePointOps {
        j0: join(
            cross_normal_rows(dim, &plus.curls[0], n),
            minus.map(|m| cross_normal_rows(dim, &m.curls[0], &neg)),
        ),
        j1: join(
            cross_normal_rows(dim, &plus.curls[1], n),
            minus.map(|m| cross_normal_rows(dim, &m.curls[1], &neg)),
        ),
        a2: join(plus.curls[2].clone(), minus.map(|m| m.curls[2].clone())) * half,
        a3: join(plus.curls[3].clone(), minus.map(|m| m.curls[3].clone())) * half,
    }
}

/// Face consistency, symmetry and penalty terms.
pub(crate) fn face_matrix(
    mesh: &Mesh,
    op: &ReconstructionOperator,
    cache: &CurlCache,
    rule: &QuadratureRule,
    f: usize,
    opts: &AssemblyOptions,
) -> DMatrix<f64> {
    let dim = mesh.dim();
    let face = &mesh.faces()[f];
    let (kp, km) = face.elements;
    let size = dim * op.basis(kp).len() + km.map_or(0, |k| dim * op.basis(k).len());
    let mut out = DMatrix::zeros(size, size);
    let (mu1, mu2) = super::penalties(face.diameter, opts.eta);
    let s = opts.sign.value();
    for (x, w) in rule.map(&mesh.face_coords(f), face.measure) {
        let tp = TraceEval::at(op.basis(kp), cache, &x);
        let tm = km.map(|k| TraceEval::at(op.basis(k), cache, &x));
        let o = face_point_ops(dim, &tp, tm.as_ref(), &face.normal);
        if opts.terms.consistency {
            let c = o.j0.tr_mul(&o.a3) + o.j1.tr_mul(&o.a2);
            out += (&c + c.transpose()) * (w * s);
        }
        if opts.terms.penalty {
            out += o.j0.tr_mul(&o.j0) * (w * mu1) + o.j1.tr_mul(&o.j1) * (w * mu2);
        }
    }
    out
}

/// `∫ f·v` over an element.
pub(crate) fn volume_load(
    mesh: &Mesh,
    op: &ReconstructionOperator,
    rule: &QuadratureRule,
    k: usize,
    data: &dyn LoadData,
) -> DVector<f64> {
    let basis = op.basis(k);
    let dim = mesh.dim();
    let l = basis.len();
    let mut v = DVector::zeros(dim * l);
    let mut phi = vec![0.0; l];
    for (x, w) in rule.map(&mesh.element_coords(k), mesh.volumes()[k]) {
        basis.eval_into(&x, &mut phi);
        let f = data.source(&x);
        for c in 0..dim {
            for a in 0..l {
                v[c * l + a] += w * f[c] * phi[a];
            }
        }
    }
    v
}

/// Boundary-data terms on a boundary face.
pub(crate) fn boundary_load(
    mesh: &Mesh,
    op: &ReconstructionOperator,
    cache: &CurlCache,
    rule: &QuadratureRule,
    f: usize,
    data: &dyn LoadData,
    opts: &AssemblyOptions,
) -> DVector<f64> {
    let dim = mesh.dim();
    let face = &mesh.faces()[f];
    let k = face.elements.0;
    let n = face.normal;
    let mut v = DVector::zeros(dim * op.basis(k).len());
    let (mu1, mu2) = super::penalties(face.diameter, opts.eta);
    let s = opts.sign.value();
    for (x, w) in rule.map(&mesh.face_coords(f), face.measure) {
        let t = TraceEval::at(op.basis(k), cache, &x);
        let o = face_point_ops(dim, &t, None, &n);
        let g1 = DVector::from_vec(data.g1(&x, &n));
        let g2 = DVector::from_vec(data.g2(&x, &n));
        if opts.terms.consistency {
            v += (o.a3.tr_mul(&g1) + o.a2.tr_mul(&g2)) * (w * s);
        }
        if opts.terms.penalty {
            v += o.j0.tr_mul(&g1) * (w * mu1) + o.j1.tr_mul(&g2) * (w * mu2);
        }
    }
    v
}

/// `q⁺ × n + q⁻ × (−n)` for two polynomial fields at a point.
pub(crate) fn face_point_ops_field(
    dim: usize,
    plus: &crate::poly::PolyVectorField,
    minus: &crate::poly::PolyVectorField,
    x: &Vec3,
    n: &Vec3,
) -> Vec<f64> {
    let neg = [-n[0], -n[1], -n[2]];
    let a = crate::poly::cross_normal(dim, &plus.eval(x), n);
    let b = crate::poly::cross_normal(dim, &minus.eval(x), &neg);
    a.iter().zip(&b).map(|(p, q)| p + q).collect()
}
