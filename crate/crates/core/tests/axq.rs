use qshelf::axq::*;
use qshelf::shelves::{closed_form_g, closed_form_ghost};

const Q: i64 = 16;

#[test]
fn j_tilde_two_routes() {
    for k in 2..=4 {
        for i in 1..=k + 1 {
            let a = j_tilde(k, i, Q);
            let b = j_tilde_full(k, i, Q);
            assert_eq!(a.first_mismatch(&b), None, "k={k} i={i}");
            a.check_support().unwrap();
        }
        assert_eq!(j_tilde(k, k + 1, Q).first_mismatch(&j_tilde(k, k - 1, Q)), None);
    }
}

#[test]
fn ghost_three_routes() {
    for k in 2..=4 {
        for i in 1..=k {
            let a = j_ghost_from_h(k, i, Q).unwrap();
            let b = j_ghost_interp(k, i, Q);
            let c = j_ghost_full(k, i, Q);
            assert_eq!(a.first_mismatch(&b), None, "k={k} i={i} h vs interp");
            assert_eq!(a.first_mismatch(&c), None, "k={k} i={i} h vs full");
        }
    }
}

#[test]
fn dictionary() {
    let n = 14;
    for k in 2..=4 {
        for j in 0..=2 {
            for i in 1..=k {
                let t = j_tilde(k, k - i + 1, n).specialize(j, n).unwrap();
                assert_eq!(t.first_mismatch(&closed_form_g(k, j, i, n + 1)), None, "G k={k} j={j} i={i}");
                let g = j_ghost_full(k, k - i + 1, n).specialize(j, n).unwrap();
                let want = if i >= 2 { closed_form_ghost(k, j, i, n + 1) } else { closed_form_g(k, j, 2, n + 1) };
                assert_eq!(g.first_mismatch(&want), None, "ghost k={k} j={j} i={i}");
            }
        }
    }
}

#[test]
fn functional_equations() {
    for k in 2..=5 {
        let fam = AxqFamily::new(k, 18);
        for id in fam.identities() {
            let (l, r) = id.sides.unwrap_or_else(|e| panic!("k={k} {}: {e}", id.id));
            assert_eq!(l.first_mismatch(&r), None, "k={k} {}", id.id);
        }
        for (name, res) in fam.support_checks() {
            res.unwrap_or_else(|e| panic!("k={k} {name}: {e}"));
        }
    }
}
