use dworklab::arith::PadicModulus;
use dworklab::laurent::json::{poly_from_json, poly_to_json};
use dworklab::laurent::{power_mod, ExponentVector, FrobeniusLift, LaurentPoly};
use num_bigint::BigInt;
use proptest::prelude::*;

fn poly(n: usize, terms: &[(&[i64], i64)]) -> LaurentPoly<BigInt> {
    LaurentPoly::from_int_terms(n, terms)
}

fn ev(e: &[i64]) -> ExponentVector {
    ExponentVector::new(e).unwrap()
}

fn coeff(f: &LaurentPoly<BigInt>, e: &[i64]) -> BigInt {
    f.coefficient_or(&ev(e), &BigInt::from(0))
}

fn mirror_quintic_g() -> LaurentPoly<BigInt> {
    poly(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[-1, -1], 1)])
}

#[test]
fn multiply_examples() {
    let a = poly(1, &[(&[0], 1), (&[1], 1)]);
    let b = poly(1, &[(&[0], 1), (&[1], -1)]);
    assert_eq!(a.multiply(&b).unwrap(), poly(1, &[(&[0], 1), (&[2], -1)]));
    let g = mirror_quintic_g();
    let g2 = g.multiply(&g).unwrap();
    assert_eq!(coeff(&g2, &[2, 0]), BigInt::from(1));
    assert_eq!(coeff(&g2, &[1, 1]), BigInt::from(2));
    assert!(g.multiply(&LaurentPoly::zero(2)).unwrap().is_empty());
}

#[test]
fn power_examples() {
    let a = poly(1, &[(&[0], 1), (&[1], 1)]);
    assert_eq!(
        power_mod(&a, 2, None),
        poly(1, &[(&[0], 1), (&[1], 2), (&[2], 1)])
    );
    let md = PadicModulus::new(5, 1).unwrap();
    assert_eq!(power_mod(&a, 5, Some(md)), poly(1, &[(&[0], 1), (&[5], 1)]));
    let g3 = power_mod(&mirror_quintic_g(), 3, None);
    assert_eq!(coeff(&g3, &[0, 0]), BigInt::from(6));
    assert_eq!(coeff(&g3, &[3, 0]), BigInt::from(1));
    assert_eq!(coeff(&g3, &[7, 7]), BigInt::from(0));
}

#[test]
fn coefficient_lookup() {
    let f = poly(1, &[(&[0], 1), (&[1], 2)]);
    assert_eq!(f.coefficient_at(&ev(&[1])), Some(&BigInt::from(2)));
    assert_eq!(f.coefficient_at(&ev(&[4])), None);
}

#[test]
fn frobenius_twists() {
    let g = mirror_quintic_g();
    assert_eq!(
        g.frobenius_twist(&FrobeniusLift::Identity, false, 5)
            .unwrap(),
        g
    );
    let xy = poly(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
    assert_eq!(
        xy.frobenius_twist(&FrobeniusLift::Identity, true, 3)
            .unwrap(),
        poly(2, &[(&[3, 0], 1), (&[0, 3], 1)])
    );
    let fam = LaurentPoly::one_minus_t_times(&g);
    let sigma = FrobeniusLift::t_power(&BigInt::from(1), 5, 20);
    let twisted = fam.frobenius_twist(&sigma, false, 5).unwrap();
    let expect = LaurentPoly::from_int_terms_with_params(
        2,
        1,
        &[
            (&[0, 0, 0], 1),
            (&[1, 0, 5], -1),
            (&[0, 1, 5], -1),
            (&[-1, -1, 5], -1),
        ],
    );
    assert_eq!(twisted, expect);
}

#[test]
fn family_shorthand_parses() {
    let v = serde_json::json!({"form": "1-t*g", "g": {"n": 2, "terms": [
        {"e": [1, 0], "c": 1}, {"e": [0, 1], "c": 1}, {"e": [-1, -1], "c": 1}]}});
    let f = poly_from_json(&v).unwrap();
    assert_eq!(f.params(), 1);
    assert_eq!(f.family_g().unwrap(), mirror_quintic_g());
    assert!(poly_from_json(&serde_json::json!({"form": "t*g", "g": {}})).is_err());
    assert!(poly_from_json(&serde_json::json!({"n": 2, "terms": [{"e": [1], "c": 1}]})).is_err());
}

#[test]
fn specialize_family() {
    let fam = LaurentPoly::one_minus_t_times(&mirror_quintic_g());
    let f = fam.specialize(&BigInt::from(2));
    assert_eq!(
        f,
        poly(
            2,
            &[(&[0, 0], 1), (&[1, 0], -2), (&[0, 1], -2), (&[-1, -1], -2)]
        )
    );
}

fn arb_poly() -> impl Strategy<Value = LaurentPoly<BigInt>> {
    prop::collection::vec(((-3i64..=3, -3i64..=3), -5i64..=5), 0..6).prop_map(|ts| {
        let mut f = LaurentPoly::zero(2);
        for ((a, b), c) in ts {
            f.add_term(ExponentVector::new(&[a, b]).unwrap(), BigInt::from(c));
        }
        f
    })
}

proptest! {
    #[test]
    fn multiplication_is_commutative_and_distributive(f in arb_poly(), g in arb_poly(), h in arb_poly()) {
        prop_assert_eq!(f.multiply(&g).unwrap(), g.multiply(&f).unwrap());
        let lhs = f.multiply(&g.add(&h).unwrap()).unwrap();
        let rhs = f.multiply(&g).unwrap().add(&f.multiply(&h).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn power_matches_repeated_product(f in arb_poly(), m in 0u64..5) {
        let mut acc = f.one_like(&BigInt::from(1));
        for _ in 0..m {
            acc = acc.multiply(&f).unwrap();
        }
        prop_assert_eq!(power_mod(&f, m, None), acc);
    }

    #[test]
    fn json_round_trip(f in arb_poly()) {
        prop_assert_eq!(poly_from_json(&poly_to_json(&f)).unwrap(), f);
    }

    #[test]
    fn reduced_power_is_power_reduced(f in arb_poly(), m in 0u64..6) {
        let md = PadicModulus::new(3, 2).unwrap();
        let direct = power_mod(&f, m, Some(md)).reduce_mod(md);
        prop_assert_eq!(direct, power_mod(&f, m, None).reduce_mod(md));
    }
}
