use proptest::prelude::*;
use rda::poly::{simplex_quadrature, PolyVectorField, ScaledMonomialBasis};
use rda::Vec3;

fn field(dim: usize, degree: usize, coeffs: &[f64], ncomp: usize, center: Vec3, scale: f64) -> PolyVectorField {
    let basis = ScaledMonomialBasis::new(dim, degree, center, scale);
    let l = basis.len();
    let components = (0..ncomp).map(|c| coeffs[c * l..(c + 1) * l].to_vec()).collect();
    PolyVectorField::new(basis, components)
}

fn point(dim: usize) -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-1.0f64..1.0).prop_map(move |mut p| {
        if dim == 2 {
            p[2] = 0.0;
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Central differences with step 1e-5 have truncation error ~1e-10 and
    // rounding error ~1e-11 for these coefficient ranges.
    #[test]
    fn partials_match_central_differences(
        dim in 2usize..=3,
        coeffs in prop::collection::vec(-1.0f64..1.0, 20),
        x in point(3),
        dir in 0usize..3,
    ) {
        let dir = dir % dim;
        let mut x = x;
        if dim == 2 { x[2] = 0.0; }
        let f = field(dim, 3, &coeffs, 1, [0.1, -0.2, 0.3], 0.7);
        let df = f.partial(dir);
        let step = 1e-5;
        let (mut xp, mut xm) = (x, x);
        xp[dir] += step;
        xm[dir] -= step;
        let fd = (f.eval(&xp)[0] - f.eval(&xm)[0]) / (2.0 * step);
        prop_assert!((df.eval(&x)[0] - fd).abs() <= 1e-8 * (1.0 + fd.abs()), "{} vs {}", df.eval(&x)[0], fd);
    }

    #[test]
    fn double_curl_of_scalar_is_negative_laplacian(
        coeffs in prop::collection::vec(-1.0f64..1.0, 15),
        scale in 0.2f64..2.0,
    ) {
        let q = field(2, 4, &coeffs, 1, [0.3, 0.4, 0.0], scale);
        let cc = q.curl_n(2).unwrap();
        let lap = q.partial(0).partial(0).add(&q.partial(1).partial(1)).unwrap();
        for (a, b) in cc.components[0].iter().zip(&lap.components[0]) {
            prop_assert!((a + b).abs() <= 1e-13 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn curl_of_curl_field_is_divergence_free(
        coeffs in prop::collection::vec(-1.0f64..1.0, 60),
        x in point(3),
    ) {
        let u = field(3, 3, &coeffs, 3, [0.0; 3], 1.0);
        let c = u.curl().unwrap();
        let div: f64 = (0..3).map(|i| c.partial(i).eval(&x)[i]).sum();
        prop_assert!(div.abs() <= 1e-12);
    }

    #[test]
    fn curl_matches_finite_differences_3d(
        coeffs in prop::collection::vec(-1.0f64..1.0, 30),
        x in point(3),
    ) {
        let u = field(3, 2, &coeffs, 3, [0.2, 0.2, 0.2], 0.5);
        let c = u.curl().unwrap().eval(&x);
        let step = 1e-5;
        let d = |comp: usize, dir: usize| {
            let (mut xp, mut xm) = (x, x);
            xp[dir] += step;
            xm[dir] -= step;
            (u.eval(&xp)[comp] - u.eval(&xm)[comp]) / (2.0 * step)
        };
        let fd = [d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)];
        for i in 0..3 {
            prop_assert!((c[i] - fd[i]).abs() <= 1e-7 * (1.0 + fd[i].abs()));
        }
    }
}

#[test]
fn x_squared_has_derivative_two_x() {
    let basis = ScaledMonomialBasis::new(2, 2, [0.0; 3], 1.0);
    let idx = basis.index_of([2, 0, 0]).unwrap();
    let mut c = vec![0.0; basis.len()];
    c[idx] = 1.0;
    let p = PolyVectorField::new(basis, vec![c]);
    let d = p.partial(0);
    for x in [0.0, 0.5, -1.25, 3.0] {
        assert!((d.eval(&[x, 0.7, 0.0])[0] - 2.0 * x).abs() < 1e-14);
    }
}

#[test]
fn vector_curl_of_x_is_minus_y_direction() {
    let basis = ScaledMonomialBasis::new(2, 1, [0.0; 3], 1.0);
    let idx = basis.index_of([1, 0, 0]).unwrap();
    let mut c = vec![0.0; basis.len()];
    c[idx] = 1.0;
    let v = PolyVectorField::new(basis, vec![c]).curl().unwrap().eval(&[0.3, 0.4, 0.0]);
    assert!((v[0]).abs() < 1e-15 && (v[1] + 1.0).abs() < 1e-15);
}

#[test]
fn quadrature_integrates_closed_form_moments() {
    // ∫ x^a y^b z^c over the reference simplex = a! b! c! / (a+b+c+d)!
    fn fact(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }
    let reference: [&[Vec3]; 2] = [
        &[[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
        &[[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    ];
    for dim in [2usize, 3] {
        let rule = simplex_quadrature(dim, 6).unwrap();
        let pts = rule.map(reference[dim - 2], 1.0 / fact(dim));
        let max_c = if dim == 3 { 6 } else { 0 };
        for a in 0..=6usize {
            for b in 0..=(6 - a) {
                for c in 0..=max_c.min(6 - a - b) {
                    let exact = fact(a) * fact(b) * fact(c) / fact(a + b + c + dim);
                    let got: f64 = pts
                        .iter()
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32))
                        .sum();
                    assert!((got - exact).abs() < 1e-15, "d={dim} ({a},{b},{c}): {got} vs {exact}");
                }
            }
        }
    }
}
