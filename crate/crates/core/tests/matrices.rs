use qshelf::laurent::PolyMatrix;
use qshelf::matrices::{
    build_a, build_aprime, build_b, build_c, first_vector_mismatch, h12_stabilized, h_first_step,
    h_two_routes, shelf_vector,
};
use qshelf::shelves::closed_form_g;

#[test]
fn a_inverts_b() {
    for k in 2..=6 {
        for j in 1..=4 {
            let a = build_a(k, j).unwrap_or_else(|e| panic!("{e}"));
            assert!((&a * &build_b(k, j)).is_identity());
            assert!((&build_b(k, j) * &a).is_identity());
        }
    }
}

#[test]
fn aprime_is_polynomial_and_nonnegative() {
    for k in 2..=6 {
        for j in 1..=4 {
            let ap = build_aprime(k, j).unwrap();
            for row in ap.rows() {
                assert!(row.iter().all(|p| p.is_nonnegative()));
            }
        }
    }
}

#[test]
fn c_determinant_is_diagonal_power() {
    // Lower triangular: the determinant is the product of the diagonal.
    let c = build_c(4, 2);
    let det = (0..4).fold(qshelf::LaurentPoly::one(), |acc, r| &acc * c.get(r, r));
    let expect = (0..3).fold(qshelf::LaurentPoly::one(), |acc, _| &acc * &qshelf::LaurentPoly::binomial(1, 4));
    assert_eq!(det, expect);
}

#[test]
fn vector_recursions_on_shelves() {
    let n = 40;
    for k in 2..=5 {
        for j in 1..=3 {
            let prev = shelf_vector(k, j - 1, n);
            let cur = shelf_vector(k, j, n);
            let lhs = build_c(k, j).apply(&cur);
            assert_eq!(first_vector_mismatch(&build_b(k, j), &prev, &lhs), None, "k={k} j={j}");
            assert_eq!(first_vector_mismatch(&build_aprime(k, j).unwrap(), &cur, &prev), None);
        }
    }
}

#[test]
fn h_routes_and_first_step() {
    for k in 2..=5 {
        for start in 0..=2 {
            assert_eq!(h_two_routes(k, start, start + 1).unwrap(), h_first_step(k, start), "k={k} J={start}");
            for j in start..=start + 4 {
                let h = h_two_routes(k, start, j).unwrap();
                assert!(h.rows().iter().flatten().all(|p| p.is_nonnegative()));
            }
        }
    }
}

#[test]
fn h_product_reproduces_shelf_vector() {
    let (k, start, j, n) = (3, 1, 4, 40);
    let h: PolyMatrix = h_two_routes(k, start, j).unwrap();
    assert_eq!(first_vector_mismatch(&h, &shelf_vector(k, j, n), &shelf_vector(k, start, n)), None);
}

#[test]
fn h12_limit() {
    for k in 2..=4 {
        for start in 0..=1 {
            for i in 1..=k {
                let s = h12_stabilized(k, i, start, 20, 40).unwrap();
                assert_eq!(s.series.first_mismatch(&closed_form_g(k, start, i, 21)), None, "k={k} J={start} i={i}");
                assert!(s.stopped_at <= 20 / 2 + start + 2);
            }
        }
    }
}
