use dworklab::arith::{binomial, PadicModulus};
use dworklab::cartier::{
    cartier_shift, cartier_via_formula, expand_origin_exact, expand_vertex_exact,
    expand_vertex_mod, formal_derivative_order, interpolate_cartier, unit_root_projection_check,
    unit_vertex, working_precision, Form, InterpolationSpec,
};
use dworklab::hasse_witt::{lambda_unit_root, newton_polytope, Precision};
use dworklab::laurent::{ExponentVector, FrobeniusLift, LaurentPoly};
use dworklab::polytope::OpenSubset;
use num_bigint::BigInt;
use proptest::prelude::*;

fn poly(n: usize, terms: &[(&[i64], i64)]) -> LaurentPoly<BigInt> {
    LaurentPoly::from_int_terms(n, terms)
}

fn ev(e: &[i64]) -> ExponentVector {
    ExponentVector::new(e).unwrap()
}

fn triangle() -> LaurentPoly<BigInt> {
    poly(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1)])
}

fn hesse(c: i64) -> LaurentPoly<BigInt> {
    poly(
        2,
        &[(&[0, 0], c), (&[1, 0], 1), (&[0, 1], 1), (&[-1, -1], 1)],
    )
}

fn one(n: usize) -> LaurentPoly<BigInt> {
    poly(n, &[(&vec![0; n], 1)])
}

#[test]
fn geometric_expansion_is_binomial() {
    let f = triangle();
    let e = expand_vertex_exact(&Form::new(one(2), 1), &f, &ev(&[0, 0]), Some(12), None).unwrap();
    for a in 0..6i64 {
        for b in 0..6i64 {
            let v = ev(&[a, b]);
            assert!(e.is_complete(&v));
            let sign = if (a + b) % 2 == 0 { 1 } else { -1 };
            assert_eq!(
                e.coefficient(&v),
                binomial(a + b, a) * sign,
                "v = ({a},{b})"
            );
        }
    }
}

#[test]
fn origin_expansion_central_binomials() {
    let g = poly(1, &[(&[1], 1), (&[-1], 1)]);
    let f = LaurentPoly::one_minus_t_times(&g);
    let h = LaurentPoly::from_int_terms_with_params(1, 1, &[(&[0, 0], 1)]);
    let e = expand_origin_exact(&Form::new(h, 1), &f, 12).unwrap();
    let c0 = e.coefficient(&ev(&[0]));
    for k in 0..12usize {
        let expect = if k % 2 == 0 {
            binomial(k as i64, k as i64 / 2)
        } else {
            BigInt::from(0)
        };
        assert_eq!(c0.coeff(k), &expect);
    }
    // decimation fixes the constant term
    assert_eq!(cartier_shift(&e, 3).coefficient(&ev(&[0])), c0);
}

#[test]
fn zero_numerator_is_empty() {
    let f = triangle();
    let e = expand_vertex_exact(
        &Form::new(LaurentPoly::zero(2), 1),
        &f,
        &ev(&[0, 0]),
        Some(8),
        None,
    )
    .unwrap();
    assert!(e.is_empty());
    assert!(formal_derivative_order(
        &e.map(|c| PadicModulus::new(3, 2).unwrap().element_int(c)),
        5,
        3
    ));
}

#[test]
fn derivative_test_on_geometric_series() {
    let f = triangle();
    let md = PadicModulus::new(3, 2).unwrap();
    let e = expand_vertex_mod(&Form::new(one(2), 1), &f, &ev(&[0, 0]), md, Some(12), None).unwrap();
    assert!(!formal_derivative_order(&e, 1, 3));
    assert!(formal_derivative_order(&e.theta(0), 1, 3));
}

#[test]
fn shifting_twice_decimates_by_p_squared() {
    let f = triangle();
    let e = expand_vertex_exact(&Form::new(one(2), 1), &f, &ev(&[0, 0]), Some(40), None).unwrap();
    let twice = cartier_shift(&cartier_shift(&e, 3), 3);
    let once = cartier_shift(&e, 9);
    assert_eq!(twice.coefficients(), once.coefficients());
    assert_eq!(
        twice.coefficient(&ev(&[2, 1])),
        e.coefficient(&ev(&[18, 9]))
    );
}

#[test]
fn line_cartier_fixes_constant_term() {
    let (a, p) = (2i64, 5u64);
    let f = poly(1, &[(&[1], 1), (&[0], -a)]);
    let md = PadicModulus::new(p, 2).unwrap();
    let form = cartier_via_formula(&one(1), &f, 1, p, &FrobeniusLift::Identity, 2).unwrap();
    let b = unit_vertex(&f.reduce_mod(md)).unwrap();
    let lhs = expand_vertex_mod(&form, &f, &b, md, Some(20), None).unwrap();
    let rhs = expand_vertex_mod(&Form::new(one(1), 1), &f, &b, md, Some(20), None).unwrap();
    assert_eq!(lhs.coefficient(&ev(&[0])), rhs.coefficient(&ev(&[0])));
}

#[test]
fn interpolation_matches_beta_ratio() {
    let p = 5u64;
    let f = hesse(3);
    let md = PadicModulus::new(p, 2).unwrap();
    let b = unit_vertex(&f.reduce_mod(md)).unwrap();
    let spec = InterpolationSpec::new(vec![Form::new(one(2), 1)], vec![b.scale(-1)], p, 2);
    let out = interpolate_cartier(&f, &spec).unwrap();
    assert_eq!(out.modulus.precision(), working_precision(2, 1));
    let mu = OpenSubset::interior(&newton_polytope(&f).unwrap());
    let lam = lambda_unit_root(
        &f,
        &mu,
        p,
        &FrobeniusLift::Identity,
        2,
        Precision::new(p, 2),
    )
    .unwrap();
    let d = out.min_digits();
    assert!(d >= 1);
    let x = out.lambda.get(0, 0).coeff(0).reduce(d).unwrap();
    assert_eq!(x, lam.at_zero().get(0, 0).reduce(d).unwrap());
}

#[test]
fn interpolation_rejects_bad_levels() {
    let f = hesse(3);
    let mut spec = InterpolationSpec::new(vec![Form::new(one(2), 1)], vec![ev(&[1, 1])], 5, 1);
    spec.level = 5;
    assert!(interpolate_cartier(&f, &spec).is_err());
    assert!(interpolate_cartier(
        &f,
        &InterpolationSpec::new(vec![Form::new(one(2), 1)], vec![ev(&[1, 1])], 2, 1)
    )
    .is_err());
}

#[test]
fn basis_form_projects_to_itself() {
    let f = hesse(3);
    let omega = Form::monomial(&f, &ev(&[0, 0]), 1);
    let b = ev(&[1, 0]);
    let r = unit_root_projection_check(&f, &[ev(&[0, 0])], &omega, 5, 2, &[b.scale(-1)], Some(&b))
        .unwrap();
    assert_eq!(r.coefficients[0], PadicModulus::new(5, 2).unwrap().one());
    assert!(r.residual_passes);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn routes_agree_on_hesse(c in 1i64..25, p in prop::sample::select(vec![3u64, 5]), m in 1u32..3, n in 1u32..3) {
        let f = hesse(c);
        let md = PadicModulus::new(p, n).unwrap();
        let Ok(b) = unit_vertex(&f.reduce_mod(md)) else { return Ok(()) };
        let h = poly(2, &[(&[m as i64, 0], 1)]);
        let depth = 4 * p as usize;
        let direct = cartier_shift(&expand_vertex_mod(&Form::new(h.clone(), m), &f, &b, md, Some(depth), None).unwrap(), p);
        let via = cartier_via_formula(&h, &f, m, p, &FrobeniusLift::Identity, n).unwrap();
        let formula = expand_vertex_mod(&via, &f, &b, md, Some(depth), None).unwrap();
        let mut compared = 0;
        for (v, a) in direct.coefficients() {
            if direct.is_complete(v) && formula.is_complete(v) {
                prop_assert_eq!(a, &formula.coefficient(v));
                compared += 1;
            }
        }
        prop_assert!(compared > 0);
    }

    #[test]
    fn theta_images_are_formal_derivatives(c in 1i64..25, p in prop::sample::select(vec![3u64, 5, 7]), i in 0usize..2) {
        let f = hesse(c);
        let md = PadicModulus::new(p, 2).unwrap();
        let Ok(b) = unit_vertex(&f.reduce_mod(md)) else { return Ok(()) };
        let e = expand_vertex_mod(&Form::new(one(2), 1), &f, &b, md, Some(3 * p as usize), None).unwrap();
        prop_assert!(formal_derivative_order(&e.theta(i), 1, p));
        let cartier = cartier_shift(&e, p);
        prop_assert!(cartier.coefficients().iter().all(|(v, x)| *x == e.coefficient(&v.scale(p as i64))));
    }
}
