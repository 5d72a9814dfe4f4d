//! Acceptance criteria 1–9, one PASS/FAIL line each.

use std::time::{Duration, Instant};

use qshelf::partitions::{gen_fn, ConditionSet};
use qshelf::series::jacobi_triple_product_check;
use qshelf::shelves::{
    closed_form_g, closed_form_ghost, empirical_hypothesis_check, next_shelf, product_side, shelf0_sum_form,
    ShelfPair,
};
use qshelf_verify::suites::build;
use qshelf_verify::{run_suite, Config, Fault, Status, VerificationReport};

struct Outcome {
    ok: bool,
    note: String,
}

fn outcome(ok: bool, note: impl Into<String>) -> Outcome {
    Outcome { ok, note: note.into() }
}

fn timed(budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let t0 = Instant::now();
    let mut o = f();
    let dt = t0.elapsed();
    if let Some(b) = budget {
        if dt > b {
            o.ok = false;
            o.note = format!("{} (took {:.2?}, budget {:.0?})", o.note, dt, b);
            return o;
        }
    }
    o.note = format!("{} [{:.2?}]", o.note, dt);
    o
}

fn first_failure(r: &VerificationReport) -> Option<String> {
    r.checks.iter().find(|c| c.status != Status::Pass).map(|c| {
        let m = c.mismatch.as_ref().map(|m| m.describe()).unwrap_or_default();
        format!("{} {} {}", c.id, c.status.label(), m)
    })
}

fn suite(name: &str, c: &Config) -> Outcome {
    match run_suite(name, c, None) {
        Ok(r) => match first_failure(&r) {
            None => outcome(true, format!("{} checks", r.checks.len())),
            Some(f) => outcome(false, f),
        },
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c1() -> Outcome {
    for k in 2..=5 {
        for i in 1..=k {
            if let Err(e) = jacobi_triple_product_check(2 * i - 2, 2 * k - 1, 61) {
                return outcome(false, format!("k={k} i={i}: {e}"));
            }
        }
    }
    outcome(true, "k ≤ 5 through degree 60")
}

fn c2() -> Outcome {
    for k in 2..=4 {
        for i in 2..=k {
            let prod = product_side(k, i, 26);
            let sum = gen_fn(ConditionSet::BggSum { k, i }, 25);
            if let Some(m) = sum.first_mismatch(&prod) {
                return outcome(false, format!("k={k} i={i}: {m}"));
            }
        }
    }
    outcome(true, "k ∈ {2,3,4}, n ≤ 25")
}

fn c3() -> Outcome {
    for k in 2..=5 {
        for i in 1..=k {
            let p = product_side(k, i, 61);
            for (name, other) in [("sum form", shelf0_sum_form(k, i, 61)), ("closed form", closed_form_g(k, 0, i, 61))] {
                if let Some(m) = p.first_mismatch(&other) {
                    return outcome(false, format!("k={k} i={i} {name}: {m}"));
                }
            }
        }
    }
    outcome(true, "k ≤ 5 through degree 60")
}

fn c4() -> Outcome {
    let mut min_window = i64::MAX;
    for k in 2..=4 {
        let mut pair = ShelfPair::from_closed_forms(k, 0, 81);
        for j in 1..=3 {
            let prev_top = pair.official(k).clone();
            pair = match next_shelf(&pair) {
                Ok(p) => p,
                Err(e) => return outcome(false, format!("k={k} j={j}: {e}")),
            };
            if let Some(m) = pair.official(1).first_mismatch(&prev_top) {
                return outcome(false, format!("edge k={k} j={j}: {m}"));
            }
            let reference = ShelfPair::from_closed_forms(k, j, 81);
            for i in 1..=k {
                if let Some(m) = pair.official(i).first_mismatch(reference.official(i)) {
                    return outcome(false, format!("G k={k} j={j} i={i}: {m}"));
                }
                if i >= 2 {
                    if let Some(m) = pair.ghost(i).first_mismatch(reference.ghost(i)) {
                        return outcome(false, format!("ghost k={k} j={j} i={i}: {m}"));
                    }
                }
            }
            min_window = min_window.min(pair.effective_prec());
        }
        for j in 0..=3 {
            if let Some(m) = closed_form_g(k, j, k, 81).first_mismatch(&closed_form_g(k, j + 1, 1, 81)) {
                return outcome(false, format!("closed edge k={k} j={j}: {m}"));
            }
        }
    }
    outcome(true, format!("k ≤ 4, j ≤ 3 from degree 80, smallest window {min_window}"))
}

fn c5() -> Outcome {
    for k in 2..=5 {
        for j in 0..=4 {
            for i in 1..=k {
                for ghost in [false, true] {
                    if ghost && i < 2 {
                        continue;
                    }
                    let r = empirical_hypothesis_check(k, j, i, 60, ghost);
                    if !r.pass {
                        return outcome(false, format!("{r:?}"));
                    }
                }
            }
        }
    }
    outcome(true, "k ≤ 5, j ≤ 4")
}

fn c6() -> Outcome {
    let c = Config { k: 2..=5, start: 0..=2, shelves: 0..=3, degree: 40, ..Config::default() };
    suite("matrices", &c)
}

fn c7() -> Outcome {
    let c = Config { k: 2..=4, start: 0..=1, nmax: 20, degree: 40, ..Config::default() };
    let o = suite("combinatorics", &c);
    if !o.ok {
        return o;
    }
    for k in 2..=4 {
        for s in 0..=2 {
            for i in 1..=k {
                let g = gen_fn(ConditionSet::G { k, i, start: s }, 25);
                if let Some(m) = g.first_mismatch(&closed_form_g(k, s, i, 26)) {
                    return outcome(false, format!("G k={k} J={s} i={i}: {m}"));
                }
                let want = if i >= 2 { closed_form_ghost(k, s, i, 26) } else { closed_form_g(k, s, 2, 26) };
                if let Some(m) = gen_fn(ConditionSet::Ghost { k, i, start: s }, 25).first_mismatch(&want) {
                    return outcome(false, format!("ghost k={k} J={s} i={i}: {m}"));
                }
            }
        }
    }
    outcome(true, format!("{}; G and ghost oracles n ≤ 25, J ≤ 2", o.note))
}

fn c8() -> Outcome {
    let c = Config { k: 2..=4, degree: 30, shelves: 0..=2, nmax_over: 14, ..Config::default() };
    suite("axq", &c)
}

fn c9() -> Outcome {
    let c = Config {
        k: 2..=3,
        degree: 24,
        shelves: 0..=2,
        start: 0..=0,
        nmax: 10,
        nmax_over: 6,
        ..Config::default()
    };
    let checks = match build("all", &c) {
        Ok(ch) => ch,
        Err(e) => return outcome(false, e.to_string()),
    };
    for ch in &checks {
        let clean = ch.execute(None, false);
        if clean.status != Status::Pass {
            return outcome(false, format!("{} not clean: {:?}", ch.id, clean.status));
        }
        let fault = Fault { check: ch.id.clone(), exponent: None };
        let hit = ch.execute(Some(&fault), false);
        if hit.status != Status::Fail || hit.mismatch.is_none() {
            return outcome(false, format!("{} survived a corrupted coefficient: {:?} {:?}", ch.id, hit.status, hit.detail));
        }
    }
    outcome(true, format!("{} checks each caught a single corrupted coefficient", checks.len()))
}

fn main() {
    let criteria: [(&str, Option<Duration>, fn() -> Outcome); 9] = [
        ("1 triple product", Some(Duration::from_secs(1)), c1),
        ("2 identity, product vs partitions", Some(Duration::from_secs(30)), c2),
        ("3 shelf-0 equivalence", None, c3),
        ("4 shelf recursion", None, c4),
        ("5 valuation bounds", None, c5),
        ("6 matrices", None, c6),
        ("7 combinatorics", None, c7),
        ("8 trivariate suite", Some(Duration::from_secs(120)), c8),
        ("9 fault injection", None, c9),
    ];
    let mut failed = Vec::new();
    for (name, budget, f) in criteria {
        let o = timed(budget, f);
        println!("{} criterion {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.note);
        if !o.ok {
            failed.push(name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
