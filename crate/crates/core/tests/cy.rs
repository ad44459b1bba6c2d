use dworklab::arith::{Rational, TruncatedSeries};
use dworklab::cy::{
    canonical_coordinate, constant_term_series, excellent_lift_check, frobenius_lambda0,
    p_integral, preset_family, preset_operator, simplicial_period_oracle, standard_solutions,
    yukawa_and_instantons, ThetaOperator,
};
use dworklab::laurent::{power_mod, ExponentVector, LaurentPoly};
use dworklab::par::Execution;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn poly(n: usize, terms: &[(&[i64], i64)]) -> LaurentPoly<BigInt> {
    LaurentPoly::from_int_terms(n, terms)
}

fn int(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

fn as_rational(s: &TruncatedSeries<BigInt>) -> Vec<Rational> {
    s.coeffs()
        .iter()
        .map(|c| Rational::from_integer(c.clone()))
        .collect()
}

#[test]
fn presets() {
    assert_eq!(
        preset_family("simplicial", 2).unwrap().g,
        poly(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[-1, -1], 1)])
    );
    assert_eq!(
        preset_family("hyperoctahedral", 2).unwrap().g,
        poly(
            2,
            &[(&[1, 0], 1), (&[-1, 0], 1), (&[0, 1], 1), (&[0, -1], 1)]
        )
    );
    assert_eq!(
        preset_family("a_n", 1).unwrap().g,
        poly(1, &[(&[1], 1), (&[0], 2), (&[-1], 1)])
    );
    assert!(preset_family("tetrahedral", 2).is_err());
    assert!(preset_operator("hyperoctahedral", 3).is_err());
}

#[test]
fn simplicial_operator_shape() {
    // θ² − 27t³(θ+1)(θ+2)
    let op = preset_operator("simplicial", 2).unwrap();
    assert_eq!(op.order(), 2);
    assert_eq!(op.terms[0], vec![int(0), int(0), int(1)]);
    assert_eq!(op.terms[3], vec![int(-54), int(-81), int(-27)]);
    assert!(op.is_mum());
}

#[test]
fn period_matches_constant_terms() {
    for n in [1usize, 2, 3] {
        let pre = preset_family("simplicial", n).unwrap();
        let op = preset_operator("simplicial", n).unwrap();
        let t = 13;
        let sols = standard_solutions(&op, t).unwrap();
        assert_eq!(
            sols[0].components[0].coeffs(),
            as_rational(&constant_term_series(&pre.g, t)).as_slice()
        );
        assert_eq!(
            constant_term_series(&pre.g, t),
            simplicial_period_oracle(n, t)
        );
    }
    let hyp = preset_family("hyperoctahedral", 4).unwrap();
    let sols = standard_solutions(&preset_operator("hyperoctahedral", 4).unwrap(), 9).unwrap();
    assert_eq!(
        sols[0].components[0].coeffs(),
        as_rational(&constant_term_series(&hyp.g, 9)).as_slice()
    );
}

#[test]
fn solutions_are_annihilated() {
    let op = preset_operator("quintic", 4).unwrap();
    let sols = standard_solutions(&op, 10).unwrap();
    assert_eq!(sols.len(), 4);
    for s in &sols {
        assert!(op.apply(&s.as_log_series()).is_zero(), "y_{}", s.index);
        for f in &s.components[1..] {
            assert!(f.coeff(0).is_zero());
        }
    }
}

#[test]
fn constant_term_examples() {
    let g = poly(1, &[(&[1], 1), (&[-1], 1)]);
    let c = constant_term_series(&g, 8);
    assert_eq!(
        c.coeffs(),
        [1, 0, 2, 0, 6, 0, 20, 0].map(BigInt::from).as_slice()
    );
    let x = poly(1, &[(&[1], 1)]);
    assert_eq!(
        constant_term_series(&x, 5),
        TruncatedSeries::constant(BigInt::one(), 5)
    );
}

#[test]
fn mirror_map_round_trip() {
    let op = preset_operator("quintic", 4).unwrap();
    let t = 12;
    let sols = standard_solutions(&op, t).unwrap();
    let m = canonical_coordinate(&sols, t).unwrap();
    assert!(m.q.coeff(0).is_zero());
    assert_eq!(m.q.coeff(1), &int(1));
    let id = m.q.compose(&m.t_of_q).unwrap();
    assert_eq!(id, TruncatedSeries::monomial(int(1), 1, t));
    assert!(p_integral(m.q.coeffs(), 7));
    let inst = yukawa_and_instantons(&sols, &m, 6).unwrap();
    assert_eq!(inst.yukawa.coeff(0), &int(1));
}

#[test]
fn integrality_predicate() {
    let v = [Rational::new(BigInt::from(1), BigInt::from(7)), int(3)];
    assert!(!p_integral(&v, 7));
    assert!(p_integral(&v, 5));
}

#[test]
fn lambda0_for_simplicial_curve() {
    let pre = preset_family("simplicial", 2).unwrap();
    let op = preset_operator("simplicial", 2).unwrap();
    let r = frobenius_lambda0(&pre, &op, 5, 1, 10, Execution::Sequential).unwrap();
    assert!(r.holds());
    assert_eq!(r.is_diagonal_mod(2), Some(true));
    assert_eq!(r.is_diagonal_mod(9), None);
    let v = r.to_json();
    assert_eq!(v["p"], 5);
}

#[test]
fn excellent_lift_for_simplicial_curve() {
    let pre = preset_family("simplicial", 2).unwrap();
    let op = preset_operator("simplicial", 2).unwrap();
    let r = excellent_lift_check(&pre, &op, 5, 8, 1, Execution::Sequential).unwrap();
    assert!(r.lifts_frobenius);
    assert!(r.holds(), "{}", r.to_json());
}

#[test]
fn operator_validation() {
    assert!(ThetaOperator::new(vec![vec![int(0)]]).is_err());
    assert!(ThetaOperator::new(vec![]).is_err());
}

fn arb_laurent() -> impl Strategy<Value = LaurentPoly<BigInt>> {
    prop::collection::vec(((-2i64..=2, -2i64..=2), -3i64..=3), 1..5).prop_map(|ts| {
        let mut f = LaurentPoly::zero(2);
        for ((a, b), c) in ts {
            f.add_term(ExponentVector::new(&[a, b]).unwrap(), BigInt::from(c));
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constant_terms_are_powers(g in arb_laurent()) {
        let t = 6;
        let c = constant_term_series(&g, t);
        for k in 0..t {
            let gk = power_mod(&g, k as u64, None);
            prop_assert_eq!(c.coeff(k), &gk.coefficient_or(&ExponentVector::zeros(2), &BigInt::zero()));
        }
    }
}
