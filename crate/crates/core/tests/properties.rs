use num_bigint::BigInt;
use proptest::prelude::*;
use qshelf::axq::{mono, TriSeries};
use qshelf::partitions::enumerate_partitions;
use qshelf::series::{pochhammer, Length, Sign};
use qshelf::Series;

fn series() -> impl Strategy<Value = Series> {
    (-3i64..4, prop::collection::vec(-20i64..20, 0..10), 6i64..16)
        .prop_map(|(low, c, prec)| Series::from_i64s(low, &c, prec))
}

fn unit_series() -> impl Strategy<Value = Series> {
    (-2i64..3, prop::bool::ANY, prop::collection::vec(-9i64..9, 0..8), 8i64..16).prop_map(|(low, neg, mut c, prec)| {
        c.insert(0, if neg { -1 } else { 1 });
        Series::from_i64s(low, &c, prec)
    })
}

fn agree(a: &Series, b: &Series) -> bool {
    a.first_mismatch(b).is_none()
}

proptest! {
    #[test]
    fn addition_is_a_group(a in series(), b in series(), c in series()) {
        prop_assert!(agree(&(&(&a + &b) + &c), &(&a + &(&b + &c))));
        prop_assert!(agree(&(&a + &b), &(&b + &a)));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn multiplication_distributes(a in series(), b in series(), c in series()) {
        prop_assert!(agree(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c))));
        prop_assert!(agree(&(&(&a * &b) * &c), &(&a * &(&b * &c))));
        prop_assert!(agree(&(&a * &b), &(&b * &a)));
    }

    #[test]
    fn inverse_is_two_sided(s in unit_series()) {
        let inv = s.invert().unwrap();
        let prod = &s * &inv;
        prop_assert!(agree(&prod, &Series::one(prod.prec())));
        prop_assert!(prod.prec() >= s.prec() - 2 * s.low().abs());
    }

    #[test]
    fn binomial_division_undoes_multiplication(s in series(), c in prop::sample::select(vec![-1i64, 1]), e in 1i64..5) {
        let back = s.mul_binomial(c, e).div_binomial(c, e);
        prop_assert!(agree(&back, &s));
    }

    #[test]
    fn refinement_is_monotone(e in 1i64..4, step in 1i64..4, p in 5i64..25, extra in 1i64..15) {
        let lo = pochhammer(Sign::Plus, e, step, Length::Infinite, p).unwrap();
        let hi = pochhammer(Sign::Plus, e, step, Length::Infinite, p + extra).unwrap();
        prop_assert_eq!(hi.truncate(p), lo);
    }

    #[test]
    fn pochhammer_tail_is_invisible(e in 1i64..4, step in 1i64..4, p in 5i64..25, n in 0u64..30) {
        // factors past the window do not change the truncation
        let needed = ((p - e) / step + 1) as u64;
        let inf = pochhammer(Sign::Minus, e, step, Length::Infinite, p).unwrap();
        let fin = pochhammer(Sign::Minus, e, step, Length::Finite(needed + n), p).unwrap();
        prop_assert_eq!(inf, fin);
    }

    #[test]
    fn geometric_division_round_trips(c in -3i64..4, a in 0u32..3, x in 0i64..3, q in 1i64..4, extra in 0i64..3) {
        let t = TriSeries::from_monos(&[mono(1, 0, 0, 0), mono(c, a, x, q + extra)], 12);
        let m = mono(1, a, x, q);
        let back = t.div_one_minus(m).mul_poly(&[mono(1, 0, 0, 0), mono(-1, m.a, m.x, m.q)]);
        prop_assert!(back.first_mismatch(&t).is_none());
    }

    #[test]
    fn one_plus_x_division_is_exact_on_multiples(c in -5i64..6, a in 0u32..3, x in -2i64..3, q in 0i64..6) {
        let g = TriSeries::from_monos(&[mono(c, a, x, q), mono(1, 0, 0, 0)], 8);
        let f = g.mul_poly(&[mono(1, 0, 0, 0), mono(1, 0, 1, 0)]);
        prop_assert_eq!(f.div_one_plus_x_exact().unwrap(), g);
    }
}

#[test]
fn partition_numbers_match_euler_product() {
    let n = 30;
    let euler = pochhammer(Sign::Plus, 1, 1, Length::Infinite, n + 1).unwrap().invert().unwrap();
    for m in 0..=n {
        assert_eq!(euler.coeff(m), Some(BigInt::from(enumerate_partitions(m).len())), "p({m})");
    }
}
