use dworklab::error::Error;
use dworklab::polytope::{points, LatticePolytope, OpenSubset};
use proptest::prelude::*;

fn simplex() -> LatticePolytope {
    LatticePolytope::newton_polytope(&points(&[&[1, 0], &[0, 1], &[-1, -1]])).unwrap()
}

#[test]
fn newton_polytopes() {
    let s = simplex();
    assert_eq!(s.dim(), 2);
    assert_eq!(s.facets().len(), 3);
    assert_eq!(s.vertices().len(), 3);
    let unit =
        LatticePolytope::newton_polytope(&points(&[&[0, 0], &[1, 0], &[0, 1], &[0, 0]])).unwrap();
    assert_eq!(unit.vertices().len(), 3);
    let seg = LatticePolytope::newton_polytope(&points(&[&[0], &[1]])).unwrap();
    assert_eq!(seg.dim(), 1);
    assert_eq!(seg.vertices().len(), 2);
    // the midpoint is not a vertex
    let dup = LatticePolytope::newton_polytope(&points(&[&[0], &[1], &[2]])).unwrap();
    assert_eq!(dup.vertices().len(), 2);
}

#[test]
fn dilate_points() {
    let s = simplex();
    assert_eq!(
        OpenSubset::interior(&s).lattice_points_in_dilate(1),
        points(&[&[0, 0]])
    );
    let full = OpenSubset::full(&s).lattice_points_in_dilate(1);
    assert_eq!(full.len(), 4);
    for u in points(&[&[-1, -1], &[0, 0], &[0, 1], &[1, 0]]) {
        assert!(full.contains(&u));
    }
    assert_eq!(
        OpenSubset::interior(&s).lattice_points_in_dilate(2).len(),
        4
    );
    assert_eq!(OpenSubset::full(&s).lattice_points_in_dilate(2).len(), 10);
}

#[test]
fn reflexivity() {
    assert!(simplex().is_reflexive().unwrap());
    let octa =
        LatticePolytope::newton_polytope(&points(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]])).unwrap();
    assert!(octa.is_reflexive().unwrap());
    let centered = LatticePolytope::newton_polytope(&points(&[&[-1], &[1]])).unwrap();
    assert!(centered.is_reflexive().unwrap());
    let seg = LatticePolytope::newton_polytope(&points(&[&[0], &[2]])).unwrap();
    assert!(matches!(seg.is_reflexive(), Err(Error::OriginNotInterior)));
    let big = LatticePolytope::newton_polytope(&points(&[&[2, 0], &[0, 2], &[-2, -2]])).unwrap();
    assert!(!big.is_reflexive().unwrap());
}

#[test]
fn vertex_stars() {
    let unit = LatticePolytope::newton_polytope(&points(&[&[0, 0], &[1, 0], &[0, 1]])).unwrap();
    let star = OpenSubset::vertex_star(&unit, &points(&[&[0, 0]])[0]).unwrap();
    assert_eq!(star.lattice_points(), points(&[&[0, 0]]));
    let square =
        LatticePolytope::newton_polytope(&points(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])).unwrap();
    let star = OpenSubset::vertex_star(&square, &points(&[&[1, 1]])[0]).unwrap();
    assert_eq!(star.lattice_points(), points(&[&[1, 1]]));
    let seg = LatticePolytope::newton_polytope(&points(&[&[0], &[1]])).unwrap();
    let star = OpenSubset::vertex_star(&seg, &points(&[&[0]])[0]).unwrap();
    assert_eq!(star.lattice_points(), points(&[&[0]]));
    assert!(OpenSubset::vertex_star(&square, &points(&[&[2, 2]])[0]).is_err());
}

#[test]
fn higher_valuations() {
    let s = simplex();
    assert_eq!(OpenSubset::full(&s).higher_valuation(2), 6);
    assert_eq!(OpenSubset::full(&s).higher_valuation(1), 0);
}

proptest! {
    #[test]
    fn counts_match_brute_force(pts in prop::collection::vec((-3i64..=3, -3i64..=3), 3..7), k in 1i64..4) {
        let pts: Vec<_> = pts.iter().map(|&(a, b)| points(&[&[a, b]])[0].clone()).collect();
        let Ok(poly) = LatticePolytope::newton_polytope(&pts) else { return Ok(()) };
        prop_assume!(poly.dim() == 2);
        let by_enum = poly.lattice_points(k);
        // every enumerated point is inside and the vertices of kΔ are found
        for v in poly.vertices() {
            prop_assert!(by_enum.contains(&v.scale(k)));
        }
        let mut brute = 0;
        for a in -3 * k..=3 * k {
            for b in -3 * k..=3 * k {
                if poly.contains_dilate(&points(&[&[a, b]])[0], k) {
                    brute += 1;
                }
            }
        }
        prop_assert_eq!(by_enum.len(), brute);
        // the interior misses exactly the boundary
        let interior = OpenSubset::interior(&poly).lattice_points_in_dilate(k);
        prop_assert!(interior.iter().all(|u| poly.tight_facets(u, k).is_empty()));
    }

    #[test]
    fn vertices_are_extreme(pts in prop::collection::vec((-4i64..=4, -4i64..=4), 3..8)) {
        let pts: Vec<_> = pts.iter().map(|&(a, b)| points(&[&[a, b]])[0].clone()).collect();
        let Ok(poly) = LatticePolytope::newton_polytope(&pts) else { return Ok(()) };
        for v in poly.vertices() {
            prop_assert!(pts.contains(v));
            prop_assert!(poly.facets().iter().all(|f| f.eval(v) >= f.offset));
        }
        for u in &pts {
            prop_assert!(poly.contains(u));
        }
    }
}
