use proptest::prelude::*;

use rda::analysis::{error_l2, ExactSolution, SolutionField};
use rda::assembly::{
    assemble, assemble_matrix, assemble_rhs, galerkin_consistency_check, max_interior_jump, AssemblyOptions,
    FaceSign, LoadData, ManufacturedData, Terms,
};
use rda::harness::{run_single, structured_mesh, Example1, ExampleId, PolynomialSolution, RunConfig};
use rda::mesh::Mesh;
use rda::poly::{PolyVectorField, ScaledMonomialBasis};
use rda::reconstruction::{default_patch_size, ReconstructionOperator};
use rda::solver::{dense_cholesky, CsrMatrix};
use rda::Vec3;

fn operator(mesh: &Mesh, m: usize) -> ReconstructionOperator {
    ReconstructionOperator::build(mesh, m, default_patch_size(mesh.dim(), m).unwrap()).unwrap()
}

/// The global polynomial written out in every element's own basis.
fn as_element_field(op: &ReconstructionOperator, global: &PolyVectorField) -> SolutionField {
    let bases: Vec<ScaledMonomialBasis> = (0..op.num_elements()).map(|k| op.basis(k).clone()).collect();
    let coeffs = bases
        .iter()
        .map(|b| global.components.iter().map(|c| b.convert_from(&global.basis, c)).collect())
        .collect();
    SolutionField::new(op.dim(), bases, coeffs)
}

struct ZeroData(usize);

impl LoadData for ZeroData {
    fn dim(&self) -> usize {
        self.0
    }
    fn source(&self, _: &Vec3) -> Vec3 {
        [0.0; 3]
    }
    fn g1(&self, _: &Vec3, _: &Vec3) -> Vec<f64> {
        vec![0.0; if self.0 == 2 { 1 } else { 3 }]
    }
    fn g2(&self, _: &Vec3, _: &Vec3) -> Vec<f64> {
        vec![0.0; self.0]
    }
}

struct ConstantSolution(usize);

impl ExactSolution for ConstantSolution {
    fn dim(&self) -> usize {
        self.0
    }
    fn curl_n(&self, k: usize, _: &Vec3) -> Vec3 {
        if k == 0 {
            [0.7, -1.3, 0.4]
        } else {
            [0.0; 3]
        }
    }
    fn source(&self, x: &Vec3) -> Vec3 {
        self.curl_n(0, x)
    }
}

struct ZeroSolution(usize);

impl ExactSolution for ZeroSolution {
    fn dim(&self) -> usize {
        self.0
    }
    fn curl_n(&self, _: usize, _: &Vec3) -> Vec3 {
        [0.0; 3]
    }
    fn source(&self, _: &Vec3) -> Vec3 {
        [0.0; 3]
    }
}

fn max_entry_diff(a: &CsrMatrix, b: &CsrMatrix) -> f64 {
    let (da, db) = (a.to_dense(), b.to_dense());
    (da - db).abs().max()
}

#[test]
fn coarse_square_matrix_is_symmetric_positive_definite() {
    let mesh = structured_mesh(2, 2).unwrap();
    let op = operator(&mesh, 2);
    let sys = assemble_matrix(&mesh, &op, &AssemblyOptions::new(2, 2).with_eta(40.0)).unwrap();
    assert!(sys.relative_asymmetry() <= 1e-12);
    let b = vec![1.0; sys.num_dofs()];
    dense_cholesky(sys.matrix(), &b, 1e-10).unwrap();
}

#[test]
fn volume_terms_alone_are_symmetric_semidefinite() {
    let mesh = structured_mesh(2, 3).unwrap();
    let op = operator(&mesh, 3);
    let mut opts = AssemblyOptions::new(2, 3);
    opts.terms = Terms {
        volume: true,
        consistency: false,
        penalty: false,
    };
    let a = assemble_matrix(&mesh, &op, &opts).unwrap().matrix().to_dense();
    assert!((&a - a.transpose()).abs().max() <= 1e-12 * a.abs().max());
    let eig = a.symmetric_eigenvalues();
    assert!(eig.min() >= -1e-10 * eig.max());
}

#[test]
fn matrix_is_linear_in_eta() {
    for (d, n, m) in [(2, 3, 2), (2, 4, 3), (3, 2, 2)] {
        let mesh = structured_mesh(d, n).unwrap();
        let op = operator(&mesh, m);
        let eta = 37.0;
        let a1 = assemble_matrix(&mesh, &op, &AssemblyOptions::new(d, m).with_eta(eta)).unwrap();
        let a2 = assemble_matrix(&mesh, &op, &AssemblyOptions::new(d, m).with_eta(2.0 * eta)).unwrap();
        let mut popts = AssemblyOptions::new(d, m).with_eta(eta);
        popts.terms = Terms::penalty_only();
        let p = assemble_matrix(&mesh, &op, &popts).unwrap();
        let diff = (a2.matrix().to_dense() - a1.matrix().to_dense()) - p.matrix().to_dense();
        assert!(diff.abs().max() <= 1e-10 * p.matrix().max_abs(), "d={d} m={m}");
    }
}

#[test]
fn penalties_scale_with_face_size() {
    for d in [2usize, 3] {
        // Coarser 3D meshes have patches that wrap the whole cube, so the
        // patch geometry is only similar from n = 3 on.
        let (n, m) = if d == 2 { (4, 2) } else { (3, 2) };
        let coarse = structured_mesh(d, n).unwrap();
        let fine = structured_mesh(d, 2 * n).unwrap();
        let opts = AssemblyOptions::new(d, m);
        let pc = assemble_matrix(&coarse, &operator(&coarse, m), &opts).unwrap();
        let pf = assemble_matrix(&fine, &operator(&fine, m), &opts).unwrap();
        // Face 0 sits in the same corner position on both meshes.
        let (c1, c2) = pc.face_penalties()[0];
        let (f1, f2) = pf.face_penalties()[0];
        assert!(((f1 / c1) / 8.0 - 1.0).abs() < 0.05);
        assert!(((f2 / c2) / 2.0 - 1.0).abs() < 0.05);

        // With barycenter-value unknowns a penalty entry is μ₁|e| ~ h^{d-4}.
        let mut popts = opts;
        popts.terms = Terms::penalty_only();
        let ac = assemble_matrix(&coarse, &operator(&coarse, m), &popts).unwrap();
        let af = assemble_matrix(&fine, &operator(&fine, m), &popts).unwrap();
        let ratio = af.matrix().max_abs() / ac.matrix().max_abs();
        let expected = 2f64.powi(4 - d as i32);
        assert!((ratio / expected - 1.0).abs() < 0.05, "d={d}: {ratio} vs {expected}");
    }
}

#[test]
fn zero_data_gives_zero_load() {
    let mesh = structured_mesh(2, 4).unwrap();
    let op = operator(&mesh, 2);
    let b = assemble_rhs(&mesh, &op, &ZeroData(2), &AssemblyOptions::new(2, 2)).unwrap();
    assert!(b.iter().all(|&v| v == 0.0));
}

#[test]
fn example_one_load_is_finite_and_nonzero() {
    let mesh = structured_mesh(2, 8).unwrap();
    let op = operator(&mesh, 2);
    let b = assemble_rhs(&mesh, &op, &ManufacturedData(&Example1), &AssemblyOptions::new(2, 2)).unwrap();
    assert!(b.iter().all(|v| v.is_finite()));
    assert!(b.iter().map(|v| v * v).sum::<f64>() > 0.0);
}

#[test]
fn consistency_of_zero_and_constant_solutions() {
    for d in [2usize, 3] {
        let mesh = structured_mesh(d, if d == 2 { 4 } else { 2 }).unwrap();
        let op = operator(&mesh, 2);
        let opts = AssemblyOptions::new(d, 2);
        let r = galerkin_consistency_check(&mesh, &op, &ZeroSolution(d), &opts).unwrap();
        assert_eq!(r.max_residual, 0.0);
        let r = galerkin_consistency_check(&mesh, &op, &ConstantSolution(d), &opts).unwrap();
        assert!(r.max_residual <= 1e-10, "d={d}: {}", r.max_residual);
    }
}

#[test]
fn plus_sign_is_consistent_and_minus_is_not() {
    for (d, n, m) in [(2, 4, 2), (2, 4, 3), (2, 4, 4), (3, 2, 2)] {
        let mesh = structured_mesh(d, n).unwrap();
        let op = operator(&mesh, m);
        let exact = PolynomialSolution::random(d, m, 3);
        let mut opts = AssemblyOptions::new(d, m);
        let plus = galerkin_consistency_check(&mesh, &op, &exact, &opts).unwrap();
        assert!(plus.relative() <= 1e-9, "d={d} m={m}: {:e}", plus.relative());
        opts.sign = FaceSign::Minus;
        let minus = galerkin_consistency_check(&mesh, &op, &exact, &opts).unwrap();
        assert!(minus.relative() > 1e-6, "d={d} m={m}: {:e}", minus.relative());
    }
}

#[test]
fn polynomial_patch_test_recovers_solution() {
    let out = run_single(&RunConfig::new(ExampleId::Poly2d, 2, vec![4]), 4).unwrap();
    assert_eq!(out.system.sign(), FaceSign::Plus);
    let exact = ExampleId::Poly2d.solution(2);
    let norm = {
        let zero = out.operator.reconstruct(&vec![0.0; out.operator.num_dofs()]);
        error_l2(&out.mesh, &zero, exact.as_ref(), 8).unwrap()
    };
    assert!(out.record.err_l2 <= 1e-8 * norm.max(1.0), "{:e}", out.record.err_l2);
}

#[test]
fn minus_sign_breaks_the_patch_test() {
    let mesh = structured_mesh(2, 4).unwrap();
    let op = operator(&mesh, 2);
    let exact = PolynomialSolution::random(2, 2, 9);
    let mut opts = AssemblyOptions::new(2, 2);
    opts.sign = FaceSign::Minus;
    let sys = assemble(&mesh, &op, &ManufacturedData(&exact), &opts).unwrap();
    // The minus-sign form need not be definite; solve through LU.
    let x = sys.matrix().to_dense().lu().solve(&nalgebra::DVector::from_column_slice(sys.rhs())).unwrap();
    let field = op.reconstruct(x.as_slice());
    assert!(error_l2(&mesh, &field, &exact, 8).unwrap() > 1e-6);
}

#[test]
fn continuous_polynomial_has_no_jumps() {
    for (d, n, m) in [(2, 4, 3), (3, 2, 2)] {
        let mesh = structured_mesh(d, n).unwrap();
        let op = operator(&mesh, m);
        let exact = PolynomialSolution::random(d, m, 21);
        let field = as_element_field(&op, exact.field());
        assert!(max_interior_jump(&mesh, &field, 2 * m).unwrap() <= 1e-12);
    }
}

#[test]
fn degree_one_is_rejected() {
    let mesh = structured_mesh(2, 3).unwrap();
    let op = ReconstructionOperator::build(&mesh, 1, 6).unwrap();
    assert!(assemble_matrix(&mesh, &op, &AssemblyOptions::new(2, 1)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn assembled_matrix_is_symmetric(eta in 1.0f64..500.0, m in 2usize..=4, n in 4usize..7) {
        let mesh = structured_mesh(2, n).unwrap();
        let op = operator(&mesh, m);
        let sys = assemble_matrix(&mesh, &op, &AssemblyOptions::new(2, m).with_eta(eta)).unwrap();
        prop_assert!(sys.relative_asymmetry() <= 1e-12);
    }

    #[test]
    fn assembly_is_deterministic(n in 2usize..5) {
        let mesh = structured_mesh(2, n).unwrap();
        let op = operator(&mesh, 2);
        let opts = AssemblyOptions::new(2, 2);
        let a = assemble(&mesh, &op, &ManufacturedData(&Example1), &opts).unwrap();
        let b = assemble(&mesh, &op, &ManufacturedData(&Example1), &opts).unwrap();
        prop_assert_eq!(max_entry_diff(a.matrix(), b.matrix()), 0.0);
        prop_assert_eq!(a.rhs(), b.rhs());
    }
}
