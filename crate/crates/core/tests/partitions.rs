use qshelf::axq::{j_ghost_full, j_tilde};
use qshelf::matrices::{h12_stabilized, h_by_recursion};
use qshelf::partitions::*;
use qshelf::shelves::{closed_form_g, closed_form_ghost, product_side};
use qshelf::Series;

#[test]
fn partition_counts() {
    let counts: Vec<usize> = (0..=20).map(|n| enumerate_partitions(n).len()).collect();
    assert_eq!(counts[5], 7);
    assert_eq!(counts[20], 627);
}

#[test]
fn product_side_small() {
    let s = gen_fn(ConditionSet::ProductSide { k: 2, i: 2 }, 5);
    assert_eq!(s, Series::from_i64s(0, &[1, 0, 0, 1, 1, 0], 6));
}

#[test]
fn identity_both_sides() {
    let n = 25;
    for k in 2..=4 {
        for i in 2..=k {
            let sum = gen_fn(ConditionSet::BggSum { k, i }, n);
            let prod = gen_fn(ConditionSet::ProductSide { k, i }, n);
            assert_eq!(sum.first_mismatch(&prod), None, "k={k} i={i}");
            assert_eq!(sum.first_mismatch(&product_side(k, i, n + 1)), None);
            assert_eq!(sum.first_mismatch(&closed_form_g(k, 0, i, n + 1)), None);
        }
    }
}

#[test]
fn shelf_conditions_match_closed_forms() {
    let n = 22;
    for k in 2..=4 {
        for start in 0..=2 {
            for i in 1..=k {
                let g = gen_fn(ConditionSet::G { k, i, start }, n);
                assert_eq!(g.first_mismatch(&closed_form_g(k, start, i, n + 1)), None, "G k={k} J={start} i={i}");
                let gh = gen_fn(ConditionSet::Ghost { k, i, start }, n);
                let want = if i >= 2 { closed_form_ghost(k, start, i, n + 1) } else { closed_form_g(k, start, 2, n + 1) };
                assert_eq!(gh.first_mismatch(&want), None, "ghost k={k} J={start} i={i}");
            }
        }
    }
}

#[test]
fn h_oracle() {
    let n = 20;
    for k in 2..=4 {
        for start in 0..=1 {
            for j in start + 1..=start + 3 {
                let h = h_by_recursion(k, start, j);
                for i in 1..=k {
                    for ell in 1..=k {
                        let o = gen_fn(ConditionSet::H { k, i, ell, j, start }, n);
                        let a = h.get((i - 1) as usize, (ell - 1) as usize).to_series(n + 1);
                        assert_eq!(o.first_mismatch(&a), None, "k={k} J={start} j={j} i={i} l={ell}");
                    }
                    let o = gen_fn(ConditionSet::H12 { k, i, j, start }, n);
                    let a = (h.get((i - 1) as usize, 0) + h.get((i - 1) as usize, 1)).to_series(n + 1);
                    assert_eq!(o.first_mismatch(&a), None, "h12 k={k} J={start} j={j} i={i}");
                }
            }
        }
    }
}

#[test]
fn h12_limit_is_g() {
    for k in 2..=4 {
        for start in 0..=1 {
            for i in 1..=k {
                let s = h12_stabilized(k, i, start, 20, 30).unwrap();
                assert_eq!(s.series.first_mismatch(&gen_fn(ConditionSet::G { k, i, start }, 20)), None);
            }
        }
    }
}

#[test]
fn unconstrained_h12_overcounts() {
    // k=3, J=0, j=1, i=1: h11 + h12 = 1 + q + q^3, the partition 2 has the wrong parity.
    let h = h_by_recursion(3, 0, 1);
    let sum = (h.get(0, 0) + h.get(0, 1)).to_series(6);
    assert_eq!(sum, Series::from_i64s(0, &[1, 1, 0, 1, 0, 0], 6));
    assert_eq!(gen_fn(ConditionSet::H12 { k: 3, i: 1, j: 1, start: 0 }, 5), sum);
    let loose = gen_fn(ConditionSet::H12Unconstrained { k: 3, i: 1, j: 1, start: 0 }, 5);
    assert_eq!(loose, Series::from_i64s(0, &[1, 1, 1, 1, 0, 0], 6));
    // both describe G once 2j exceeds the weight
    let n = 12;
    let a = gen_fn(ConditionSet::H12Unconstrained { k: 3, i: 1, j: 7, start: 0 }, n);
    assert_eq!(a, gen_fn(ConditionSet::H12 { k: 3, i: 1, j: 7, start: 0 }, n));
}

#[test]
fn overpartition_counts() {
    let n = 12;
    for k in 2..=4 {
        for i in 1..=k {
            let o = overpartition_gen_fn(OverCondition::Official { k, i }, n);
            assert_eq!(o.first_mismatch(&j_tilde(k, i, n)), None, "official k={k} i={i}");
            let g = overpartition_gen_fn(OverCondition::Ghost { k, i }, n);
            assert_eq!(g.first_mismatch(&j_ghost_full(k, i, n)), None, "ghost k={k} i={i}");
            let lit = overpartition_gen_fn(OverCondition::GhostFromOne { k, i }, n);
            assert_eq!(lit.first_mismatch(&g).is_some(), i == k, "k={k} i={i}");
        }
    }
}

#[test]
fn ghost_from_one_extra_term() {
    // k=2: the lone overlined 1 is admitted by the windows from 1 but not by J̃̃_{2,2} = J̃_{2,1}.
    let lit = overpartition_gen_fn(OverCondition::GhostFromOne { k: 2, i: 2 }, 3);
    let m = lit.first_mismatch(&j_ghost_full(2, 2, 3)).unwrap();
    assert_eq!((m.a, m.x, m.q), (1, 1, 1));
}
