use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rda::analysis::{energy_parts, error_energy, error_l2, ExactSolution, SolutionField};
use rda::harness::{run_single, structured_mesh, Example1, Example2, ExampleId, PolynomialSolution, RunConfig};
use rda::poly::curl_components;
use rda::reconstruction::{default_patch_size, ReconstructionOperator};
use rda::Vec3;

/// `curl` of `curl_n(k)` by central differences.
fn fd_curl(u: &dyn ExactSolution, k: usize, x: &Vec3) -> Vec<f64> {
    let step = 1e-4;
    let d = |comp: usize, dir: usize| {
        let (mut xp, mut xm) = (*x, *x);
        xp[dir] += step;
        xm[dir] -= step;
        (u.curl_n(k, &xp)[comp] - u.curl_n(k, &xm)[comp]) / (2.0 * step)
    };
    match (u.dim(), curl_components(u.dim(), k)) {
        (2, 2) => vec![d(1, 0) - d(0, 1)],
        (2, _) => vec![d(0, 1), -d(0, 0)],
        _ => vec![d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)],
    }
}

#[test]
fn closed_form_curls_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let cases: [&dyn ExactSolution; 2] = [&Example1, &Example2];
    for u in cases {
        let d = u.dim();
        for _ in 0..10 {
            let mut x = [0.0; 3];
            for xi in x.iter_mut().take(d) {
                *xi = rng.gen_range(0.05..0.95);
            }
            for k in 0..4 {
                let fd = fd_curl(u, k, &x);
                let exact = u.curl_n(k + 1, &x);
                let scale = (0..fd.len()).map(|i| exact[i].abs()).fold(1.0f64, f64::max);
                for i in 0..fd.len() {
                    assert!(
                        (fd[i] - exact[i]).abs() <= 1e-6 * scale,
                        "d={d} k={k} x={x:?}: {} vs {}",
                        fd[i],
                        exact[i]
                    );
                }
            }
            let f = u.source(&x);
            let (c4, v) = (u.curl_n(4, &x), u.value(&x));
            for i in 0..d {
                assert!((f[i] - c4[i] - v[i]).abs() <= 1e-12 * f[i].abs().max(1.0));
            }
        }
    }
}

#[test]
fn example_one_vanishes_with_its_curl_on_the_boundary() {
    for t in [0.0, 0.13, 0.5, 0.77, 1.0] {
        for x in [[t, 0.0, 0.0], [t, 1.0, 0.0], [0.0, t, 0.0], [1.0, t, 0.0]] {
            let u = Example1.value(&x);
            let c = Example1.curl_n(1, &x);
            assert!(u[0].abs() < 1e-12 && u[1].abs() < 1e-12 && c[0].abs() < 1e-12);
        }
    }
}

#[test]
fn own_polynomial_has_zero_error() {
    let mesh = structured_mesh(2, 4).unwrap();
    let op = ReconstructionOperator::build(&mesh, 3, 20).unwrap();
    let exact = PolynomialSolution::random(2, 3, 8);
    let field = op.interpolate_smooth(&mesh, |x| exact.value(x));
    assert!(error_l2(&mesh, &field, &exact, 10).unwrap() < 1e-12);
    assert!(error_energy(&mesh, &field, &exact, 10).unwrap() < 1e-9);
}

struct Ones(usize);

impl ExactSolution for Ones {
    fn dim(&self) -> usize {
        self.0
    }
    fn curl_n(&self, k: usize, _: &Vec3) -> Vec3 {
        if k == 0 {
            [1.0; 3]
        } else {
            [0.0; 3]
        }
    }
    fn source(&self, _: &Vec3) -> Vec3 {
        [1.0; 3]
    }
}

#[test]
fn zero_field_against_constant_one_is_root_d() {
    for d in [2usize, 3] {
        let mesh = structured_mesh(d, 2).unwrap();
        let op = ReconstructionOperator::build(&mesh, 2, default_patch_size(d, 2).unwrap()).unwrap();
        let zero = op.reconstruct(&vec![0.0; op.num_dofs()]);
        let e = error_l2(&mesh, &zero, &Ones(d), 4).unwrap();
        assert!((e - (d as f64).sqrt()).abs() < 1e-13);
    }
}

#[test]
fn continuous_exact_field_has_no_jump_terms() {
    let mesh = structured_mesh(2, 4).unwrap();
    let op = ReconstructionOperator::build(&mesh, 2, 12).unwrap();
    let exact = PolynomialSolution::random(2, 2, 4);
    let global = exact.field();
    let bases: Vec<_> = (0..op.num_elements()).map(|k| op.basis(k).clone()).collect();
    let coeffs = bases
        .iter()
        .map(|b| global.components.iter().map(|c| b.convert_from(&global.basis, c)).collect())
        .collect();
    let field = SolutionField::new(2, bases, coeffs);
    // Boundary faces compare against the exact traces, interior faces
    // against the neighbour.
    let p = energy_parts(&mesh, &field, Some(&exact), 6).unwrap();
    assert!(p.jump.sqrt() < 1e-12 && p.jump_curl.sqrt() < 1e-12, "{:e} {:e}", p.jump.sqrt(), p.jump_curl.sqrt());
}

fn check_norm_relations(mesh: &rda::mesh::Mesh, field: &SolutionField, exact: &dyn ExactSolution, m: usize) {
    let p = energy_parts(mesh, field, Some(exact), 2 * m + 4).unwrap();
    assert!(p.energy() >= p.l2_norm());
    assert!(p.energy_ext() >= p.energy());
    // Equivalence on the reconstructed space, applied to the discrete field
    // alone.
    let q = energy_parts(mesh, field, None, 2 * m + 4).unwrap();
    assert!(q.energy_ext() / q.energy() <= 10.0, "{}", q.energy_ext() / q.energy());
}

#[test]
fn energy_dominates_l2_and_extended_norm_is_equivalent() {
    for (ex, m, n) in [(ExampleId::Ex1, 2, 8), (ExampleId::Ex1, 3, 8), (ExampleId::Ex1, 4, 4), (ExampleId::Ex2, 2, 2)] {
        let out = run_single(&RunConfig::new(ex, m, vec![n]), n).unwrap();
        check_norm_relations(&out.mesh, &out.field, ex.solution(m).as_ref(), m);
    }
}

#[test]
fn example_one_l2_error_halves_under_refinement() {
    let cfg = RunConfig::new(ExampleId::Ex1, 2, vec![8, 16]);
    let e8 = run_single(&cfg, 8).unwrap().record.err_l2;
    let e16 = run_single(&cfg, 16).unwrap().record.err_l2;
    let ratio = e8 / e16;
    assert!((ratio / 2.0 - 1.0).abs() <= 0.3, "{ratio}");
}
