use dworklab::arith::{Matrix, PadicModulus, Ring, TruncatedSeries};
use dworklab::laurent::LaurentPoly;
use dworklab::par::Execution;
use dworklab::zeta::{
    asd_alpha, asd_unit_root, count_elliptic_points, count_torus_points, eigenvalue_crosscheck,
    frobenius_trace_elliptic, power_sum_of_roots, teichmuller_specialize, FiniteField,
};
use num_bigint::BigInt;
use proptest::prelude::*;

const SEQ: Execution = Execution::Sequential;

fn poly(n: usize, terms: &[(&[i64], i64)]) -> LaurentPoly<BigInt> {
    LaurentPoly::from_int_terms(n, terms)
}

fn hesse(c: i64) -> LaurentPoly<BigInt> {
    poly(
        2,
        &[(&[0, 0], c), (&[1, 0], 1), (&[0, 1], 1), (&[-1, -1], 1)],
    )
}

/// Affine points of y² = x³ + Ax + B over 𝔽_p, plus the point at infinity.
fn brute_elliptic(a: i64, b: i64, p: i64) -> i64 {
    let mut n = 1;
    for x in 0..p {
        for y in 0..p {
            if (y * y - x * x * x - a * x - b).rem_euclid(p) == 0 {
                n += 1;
            }
        }
    }
    n
}

#[test]
fn torus_counts() {
    assert_eq!(
        count_torus_points(
            &poly(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[0, 0], 1)]),
            3,
            1,
            SEQ
        )
        .unwrap(),
        1
    );
    let line = poly(1, &[(&[1], 1), (&[0], -3)]);
    for (p, s) in [(5, 1), (5, 2), (7, 3)] {
        assert_eq!(count_torus_points(&line, p, s, SEQ).unwrap(), 1);
    }
    assert_eq!(
        count_torus_points(&poly(2, &[(&[1, 1], 1)]), 5, 2, SEQ).unwrap(),
        0
    );
}

#[test]
fn elliptic_traces() {
    assert_eq!(frobenius_trace_elliptic(-1, 0, 5).unwrap().trace, -2);
    assert_eq!(frobenius_trace_elliptic(0, 1, 5).unwrap().trace, 0);
    assert_eq!(
        frobenius_trace_elliptic(-1, 0, 7).unwrap().trace,
        7 + 1 - brute_elliptic(-1, 0, 7)
    );
    // singular curve
    assert!(frobenius_trace_elliptic(0, 0, 5).is_err());
}

#[test]
fn asd_examples() {
    assert_eq!(asd_alpha(-1, 0, 1), BigInt::from(1));
    assert_eq!(asd_alpha(-1, 0, 5), BigInt::from(-2));
    for m in [2u64, 4, 10] {
        assert_eq!(asd_alpha(1, 1, m), BigInt::from(0));
    }
}

#[test]
fn unit_root_solves_the_quadratic() {
    for (a, b, p) in [(-1i64, 0i64, 5u64), (1, 1, 7), (-2, 1, 11)] {
        let ap = frobenius_trace_elliptic(a, b, p).unwrap().trace;
        if ap % p as i64 == 0 {
            continue;
        }
        let l = asd_unit_root(a, b, p, 3).unwrap();
        let md = l.modulus();
        let q = l
            .mul(&l)
            .sub(&md.element(ap).mul(&l))
            .add(&md.element(p as i64));
        assert!(q.is_zero(), "({a},{b}) p = {p}");
    }
}

#[test]
fn extension_counts_follow_the_trace() {
    for (a, b, p) in [(-1i64, 0i64, 5u64), (1, 1, 7), (2, 3, 7)] {
        let ap = frobenius_trace_elliptic(a, b, p).unwrap().trace;
        for s in 1..=3 {
            let n = count_elliptic_points(a, b, p, s).unwrap();
            let expect = BigInt::from(p).pow(s) + 1 - power_sum_of_roots(ap, p, s);
            assert_eq!(BigInt::from(n), expect, "({a},{b}) over 𝔽_{p}^{s}");
        }
    }
}

#[test]
fn crosschecks() {
    let line = poly(1, &[(&[1], 1), (&[0], -2)]);
    let r = eigenvalue_crosscheck(&line, 5, 2, SEQ).unwrap();
    assert!(r.holds());
    assert!(r.rows.iter().all(|row| row.trace == 2));
    for c in [2i64, 3, 4] {
        assert!(
            eigenvalue_crosscheck(&hesse(c), 7, 2, SEQ).unwrap().holds(),
            "c = {c}"
        );
    }
}

#[test]
fn teichmuller_specialization_at_zero_and_one() {
    let md = PadicModulus::new(5, 2).unwrap();
    let s = TruncatedSeries::new(vec![md.element(3), md.element(1), md.element(4)]);
    let m = Matrix::from_rows(vec![vec![s]]);
    assert_eq!(
        teichmuller_specialize(&m, 0, 5, 2).unwrap().get(0, 0),
        &md.element(3)
    );
    assert_eq!(
        teichmuller_specialize(&m, 1, 5, 2).unwrap().get(0, 0),
        &md.element(8)
    );
}

#[test]
fn parallel_count_matches_sequential() {
    let f = hesse(3);
    assert_eq!(
        count_torus_points(&f, 7, 2, Execution::Parallel).unwrap(),
        count_torus_points(&f, 7, 2, SEQ).unwrap()
    );
}

proptest! {
    #[test]
    fn prime_field_counts_match_brute_force(c in -6i64..6, d in -6i64..6, p in prop::sample::select(vec![3u64, 5, 7, 11])) {
        // c + x + d·y + x⁻¹y⁻¹ = 0 ⇔ c·xy + x²y + d·xy² + 1 = 0 on the torus
        let f = poly(2, &[(&[0, 0], c), (&[1, 0], 1), (&[0, 1], d), (&[-1, -1], 1)]);
        let p64 = p as i64;
        let mut brute = 0;
        for x in 1..p64 {
            for y in 1..p64 {
                if (c * x * y + x * x * y + d * x * y * y + 1).rem_euclid(p64) == 0 {
                    brute += 1;
                }
            }
        }
        prop_assert_eq!(count_torus_points(&f, p, 1, SEQ).unwrap(), brute);
    }

    #[test]
    fn field_axioms(p in prop::sample::select(vec![3u64, 5, 7]), s in 1u32..4, i in 0u64..10_000, j in 0u64..10_000) {
        let k = FiniteField::new(p, s).unwrap();
        let q = k.size();
        let elems: Vec<_> = k.elements().collect();
        let (x, y) = (elems[(i % q) as usize], elems[(j % q) as usize]);
        // Frobenius is additive and x^q = x
        let fr = |z| k.pow(z, p as i64);
        prop_assert_eq!(fr(k.add(x, y)), k.add(fr(x), fr(y)));
        prop_assert_eq!(k.pow(x, q as i64), x);
        if x != k.zero() {
            prop_assert_eq!(k.mul(x, k.inv(x).unwrap()), k.one());
        }
        prop_assert_eq!(k.sub(k.add(x, y), y), x);
    }
}
