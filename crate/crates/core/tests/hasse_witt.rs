use dworklab::arith::{Matrix, PadicModulus, Ring};
use dworklab::cy::{constant_term_series, preset_family};
use dworklab::harness::curve_poly;
use dworklab::hasse_witt::{
    beta_matrix, higher_hw_condition, higher_hw_matrix, hw_condition, hw_matrix, lambda_sequence,
    lambda_unit_root, newton_polytope, Precision,
};
use dworklab::laurent::{ExponentVector, FrobeniusLift, LaurentPoly};
use dworklab::par::Execution;
use dworklab::polytope::OpenSubset;
use num_bigint::BigInt;
use proptest::prelude::*;

fn poly(n: usize, terms: &[(&[i64], i64)]) -> LaurentPoly<BigInt> {
    LaurentPoly::from_int_terms(n, terms)
}

fn interior(f: &LaurentPoly<BigInt>) -> OpenSubset {
    OpenSubset::interior(&newton_polytope(f).unwrap())
}

fn full(f: &LaurentPoly<BigInt>) -> OpenSubset {
    OpenSubset::full(&newton_polytope(f).unwrap())
}

fn hesse(c: i64) -> LaurentPoly<BigInt> {
    poly(
        2,
        &[(&[0, 0], c), (&[1, 0], 1), (&[0, 1], 1), (&[-1, -1], 1)],
    )
}

fn line(a: i64) -> LaurentPoly<BigInt> {
    poly(1, &[(&[1], 1), (&[0], -a)])
}

#[test]
fn beta_one_is_identity() {
    let f = hesse(3);
    let mu = full(&f);
    let b = beta_matrix(&f, &mu, 1, Precision::new(5, 2)).unwrap();
    assert_eq!(
        b.at_zero(),
        Matrix::identity(&PadicModulus::new(5, 2).unwrap().one(), 4)
    );
}

#[test]
fn beta_examples() {
    let e = curve_poly(-1, 0);
    let b = beta_matrix(&e, &interior(&e), 5, Precision::new(5, 3)).unwrap();
    assert_eq!(b.index, vec![ExponentVector::new(&[1, 1]).unwrap()]);
    assert_eq!(b.at_zero().get(0, 0).signed(), -12);
    let g = hesse(0);
    let b = beta_matrix(&g, &interior(&g), 4, Precision::new(5, 2)).unwrap();
    assert_eq!(b.at_zero().get(0, 0).value(), 6);
}

#[test]
fn family_hw_is_truncated_period() {
    let p = 7u64;
    let pre = preset_family("simplicial", 2).unwrap();
    let f = pre.family();
    let hw = hw_matrix(
        &f,
        &interior(&f),
        Precision::new(p, 1).with_t_order(p as usize),
    )
    .unwrap();
    let gamma = constant_term_series(&pre.g, p as usize);
    let md = PadicModulus::new(p, 1).unwrap();
    for i in 0..p as usize {
        let sign = if i % 2 == 0 { 1 } else { -1 };
        let expect = md.element_int(
            &(dworklab::arith::binomial(p as i64 - 1, i as i64) * sign * gamma.coeff(i)),
        );
        assert_eq!(hw.entries.get(0, 0).coeff(i), &expect, "t^{i}");
    }
}

#[test]
fn line_hw_is_diagonal() {
    let (a, p) = (3i64, 5u64);
    let f = line(a);
    let hw = hw_matrix(&f, &full(&f), Precision::new(p, 2)).unwrap();
    let m = hw.at_zero();
    let md = PadicModulus::new(p, 2).unwrap();
    let at = |u: i64| hw.index.iter().position(|v| v.get(0) == u).unwrap();
    assert_eq!(m.get(at(0), at(0)), &md.element((-a).pow(p as u32 - 1)));
    assert_eq!(m.get(at(1), at(1)), &md.one());
    assert!(m.get(at(0), at(1)).is_zero());
}

#[test]
fn gauss_vertex_star_hw() {
    let f = poly(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1)]);
    let star =
        OpenSubset::vertex_star(&newton_polytope(&f).unwrap(), &ExponentVector::zeros(2)).unwrap();
    for p in [3u64, 5, 7, 11] {
        let hw = hw_matrix(&f, &star, Precision::new(p, 1)).unwrap();
        assert_eq!(hw.at_zero().get(0, 0).value(), 1);
        assert!(hw_condition(&f, &star, p).unwrap());
    }
}

#[test]
fn elliptic_hw_condition() {
    let e = curve_poly(-1, 0);
    assert!(hw_condition(&e, &interior(&e), 5).unwrap());
    assert!(!hw_condition(&e, &interior(&e), 3).unwrap());
}

#[test]
fn unit_roots() {
    let f = line(2);
    let l = lambda_unit_root(
        &f,
        &full(&f),
        5,
        &FrobeniusLift::Identity,
        2,
        Precision::new(5, 2),
    )
    .unwrap();
    assert_eq!(
        l.at_zero(),
        Matrix::identity(&PadicModulus::new(5, 2).unwrap().one(), 2)
    );
    let e = curve_poly(-1, 0);
    let l = lambda_unit_root(
        &e,
        &interior(&e),
        5,
        &FrobeniusLift::Identity,
        1,
        Precision::new(5, 1),
    )
    .unwrap();
    assert_eq!(l.at_zero().get(0, 0).value(), 3);
    let l = lambda_unit_root(
        &e,
        &interior(&e),
        5,
        &FrobeniusLift::Identity,
        2,
        Precision::new(5, 2),
    )
    .unwrap();
    // the unit root of X² + 2X + 5, which is 13 mod 25
    let x = l.at_zero().get(0, 0).clone();
    let md = x.modulus();
    assert!(x
        .mul(&x)
        .add(&md.element(2).mul(&x))
        .add(&md.element(5))
        .is_zero());
    assert_eq!(x.value(), 13);
}

#[test]
fn supersingular_lambda_errors() {
    let e = curve_poly(-1, 0);
    assert!(lambda_unit_root(
        &e,
        &interior(&e),
        3,
        &FrobeniusLift::Identity,
        1,
        Precision::new(3, 1)
    )
    .is_err());
}

#[test]
fn higher_hw_level_one_is_hw() {
    let f = hesse(2);
    let mu = full(&f);
    let h = higher_hw_matrix(&f, &mu, 1, 7).unwrap();
    let hw = hw_matrix(&f, &mu, Precision::new(7, 1)).unwrap().at_zero();
    let md = PadicModulus::new(7, 1).unwrap();
    for i in 0..h.index.len() {
        for j in 0..h.index.len() {
            assert_eq!(md.element_int(&h.entries[i][j][0]), *hw.get(i, j));
        }
    }
}

#[test]
fn higher_hw_levels() {
    let f = hesse(1);
    let r = higher_hw_condition(&f, &full(&f), 2, 7, Execution::Sequential).unwrap();
    assert_eq!(r.levels[1].expected, 6);
    assert!(r.levels[1].valuation >= 6);
    let fam = preset_family("simplicial", 2).unwrap().family();
    assert!(
        higher_hw_condition(&fam, &full(&fam), 2, 7, Execution::Sequential)
            .unwrap()
            .holds()
    );
    let e = curve_poly(-1, 0);
    assert!(
        !higher_hw_condition(&e, &interior(&e), 1, 3, Execution::Sequential)
            .unwrap()
            .holds()
    );
}

#[test]
fn sequential_and_parallel_agree() {
    let f = hesse(3);
    let mu = full(&f);
    let a = hw_matrix(
        &f,
        &mu,
        Precision::new(7, 2).with_exec(Execution::Sequential),
    )
    .unwrap();
    let b = hw_matrix(&f, &mu, Precision::new(7, 2).with_exec(Execution::Parallel)).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dwork_congruence_between_steps(c in 1i64..40, p in prop::sample::select(vec![5u64, 7])) {
        let f = hesse(c);
        let mu = interior(&f);
        prop_assume!(hw_condition(&f, &mu, p).unwrap());
        let steps = lambda_sequence(&f, &mu, p, &FrobeniusLift::Identity, 3, Precision::new(p, 3)).unwrap();
        for w in steps.windows(2) {
            let lo = w[0].at_zero();
            let hi = w[1].at_zero();
            let k = w[0].modulus.precision();
            let a = lo.get(0, 0).reduce(k).unwrap();
            let b = hi.get(0, 0).reduce(k).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn hw_condition_is_invariant_under_scaling(c in 1i64..30, k in 1i64..6) {
        // f and k·f share HW up to the unit k^{p−1}
        let f = hesse(c);
        let g = f.scale(&BigInt::from(k));
        prop_assume!(k % 7 != 0);
        prop_assert_eq!(hw_condition(&f, &interior(&f), 7).unwrap(), hw_condition(&g, &interior(&g), 7).unwrap());
    }
}
