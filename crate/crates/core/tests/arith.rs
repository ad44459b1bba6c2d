use dworklab::arith::{
    binomial, factorial, gamma_p, gamma_ratio_check, teichmuller, GammaArg, Matrix, PadicModulus,
    Rational, Ring, TruncatedSeries,
};
use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn teichmuller_examples() {
    assert_eq!(teichmuller(0, 5, 3).unwrap().value(), 0);
    assert_eq!(teichmuller(1, 7, 4).unwrap().value(), 1);
    assert_eq!(teichmuller(2, 5, 2).unwrap().value(), 7);
}

#[test]
fn gamma_examples() {
    let one = q(1, 1);
    assert_eq!(
        gamma_p(GammaArg::Rational(&one), 7, 3).unwrap().value(),
        7u64.pow(3) - 1
    );
    assert_eq!(
        gamma_p(GammaArg::Rational(&q(2, 1)), 7, 3).unwrap().value(),
        1
    );
    assert_eq!(
        gamma_p(GammaArg::Rational(&q(5, 1)), 5, 1).unwrap().value(),
        1
    );
    assert!(gamma_p(GammaArg::Rational(&one), 2, 1).is_err());
}

#[test]
fn gamma_ratio() {
    assert!(gamma_ratio_check(5, 1, 2).unwrap());
    assert!(gamma_ratio_check(7, 1, 2).unwrap());
    assert!(gamma_ratio_check(5, 2, 3).unwrap());
}

#[test]
fn gamma_matches_morita_product() {
    // Γ_p(k) = (−1)^k ∏_{j<k, p∤j} j
    let p = 5u64;
    let md = PadicModulus::new(p, 2).unwrap();
    for k in 1..30i64 {
        let prod: BigInt = (1..k)
            .filter(|j| j % p as i64 != 0)
            .map(BigInt::from)
            .product();
        let expect = if k % 2 == 0 { prod } else { -prod };
        let got = gamma_p(GammaArg::Rational(&q(k, 1)), p, 2).unwrap();
        assert_eq!(got, md.element_int(&expect), "k = {k}");
    }
}

#[test]
fn modulus_rejects_composites() {
    assert!(PadicModulus::new(9, 2).is_err());
    assert!(PadicModulus::new(5, 0).is_err());
}

#[test]
fn rational_reduction() {
    let md = PadicModulus::new(7, 3).unwrap();
    let x = md.element_rational(&q(1, 3)).unwrap();
    assert_eq!(x.mul(&md.element(3)), md.one());
    assert!(md.element_rational(&q(1, 7)).is_err());
}

#[test]
fn binomials_and_factorials() {
    assert_eq!(factorial(10), BigInt::from(3628800));
    assert_eq!(binomial(10, 3), BigInt::from(120));
    assert_eq!(binomial(3, 5), BigInt::from(0));
}

#[test]
fn matrix_inverse_and_det() {
    let md = PadicModulus::new(5, 3).unwrap();
    let m = Matrix::from_rows(vec![
        vec![md.element(2), md.element(1)],
        vec![md.element(5), md.element(3)],
    ]);
    assert_eq!(m.det(), md.element(1));
    let inv = m.inverse().unwrap();
    assert_eq!(m.mul(&inv), Matrix::identity(&md.one(), 2));
    let singular = Matrix::from_rows(vec![
        vec![md.element(5), md.element(0)],
        vec![md.element(0), md.element(1)],
    ]);
    assert!(singular.inverse().is_err());
}

#[test]
fn series_exp_log_and_reversion() {
    let t = 10;
    let s = TruncatedSeries::new(vec![
        q(0, 1),
        q(1, 1),
        q(3, 2),
        q(-2, 1),
        q(0, 1),
        q(0, 1),
        q(0, 1),
        q(0, 1),
        q(0, 1),
        q(0, 1),
    ]);
    let back = s.exp().unwrap().log().unwrap();
    assert_eq!(back, s);
    let r = s.reversion().unwrap();
    let id = s.compose(&r).unwrap();
    assert_eq!(id, TruncatedSeries::monomial(q(1, 1), 1, t));
}

proptest! {
    #[test]
    fn scalar_ops_agree_with_integers(a in -10_000i64..10_000, b in -10_000i64..10_000, p in prop::sample::select(vec![3u64, 5, 7, 11]), n in 1u32..5) {
        let md = PadicModulus::new(p, n).unwrap();
        let m = BigInt::from(p).pow(n);
        let red = |x: BigInt| md.element_int(&x.mod_floor(&m));
        let (x, y) = (md.element(a), md.element(b));
        prop_assert_eq!(x.add(&y), red(BigInt::from(a + b)));
        prop_assert_eq!(x.mul(&y), red(BigInt::from(a) * b));
        prop_assert_eq!(x.sub(&y).add(&y), x);
    }

    #[test]
    fn units_invert(a in 1i64..100_000, p in prop::sample::select(vec![3u64, 5, 7, 13]), n in 1u32..6) {
        prop_assume!(a % p as i64 != 0);
        let md = PadicModulus::new(p, n).unwrap();
        let x = md.element(a);
        prop_assert_eq!(x.mul(&x.inv().unwrap()), md.one());
    }

    #[test]
    fn teichmuller_is_a_root_of_unity(a in 1i64..50, p in prop::sample::select(vec![3u64, 5, 7]), n in 1u32..5) {
        prop_assume!(a % p as i64 != 0);
        let t = teichmuller(a, p, n).unwrap();
        prop_assert_eq!(Ring::pow(&t, p - 1), t.modulus().one());
        prop_assert_eq!(t.reduce(1).unwrap().value(), a as u64 % p);
    }

    #[test]
    fn series_inverse(c in prop::collection::vec(-20i64..20, 1..8)) {
        let mut coeffs: Vec<Rational> = c.iter().map(|&x| q(x, 1)).collect();
        coeffs[0] = q(1, 1);
        let s = TruncatedSeries::new(coeffs);
        let one = s.series_mul(&s.inverse().unwrap());
        prop_assert_eq!(one, TruncatedSeries::constant(q(1, 1), s.order()));
    }
}
