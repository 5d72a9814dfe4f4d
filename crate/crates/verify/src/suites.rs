//! Suite catalogue: every check is a named closure producing [`Evidence`].

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use qshelf::axq::{j_ghost_full, AxqFamily, TriIdentity};
use qshelf::matrices::{
    build_a_pattern, build_aprime, build_b, build_c, h12_stabilized, h_by_product, h_by_recursion, h_first_step,
    shelf_vector,
};
use qshelf::partitions::{gen_fn, overpartition_gen_fn, ConditionSet, OverCondition};
use qshelf::series::jacobi_triple_product_sides;
use qshelf::shelves::{
    closed_form_g, closed_form_ghost, ghost0_closed, ghosts_from_officials, hypothesis_bound, next_shelf,
    product_side, shelf0_sum_form, ShelfPair,
};
use qshelf::{PolyMatrix, Series};

use crate::config::{Config, ConfigError};
use crate::evidence::{Evidence, Fault};
use crate::report::{CheckRecord, VerificationReport};

pub const SUITES: [&str; 7] = ["identities", "shelves", "empirical", "matrices", "combinatorics", "axq", "all"];

type Run = Box<dyn Fn(Option<&Fault>) -> Evidence + Send + Sync>;

pub struct Check {
    pub id: String,
    pub anchor: String,
    run: Run,
    /// The closure plants faults in its own inputs instead of its output.
    corrupts_input: bool,
}

impl Check {
    fn new(id: String, anchor: &str, run: impl Fn() -> Evidence + Send + Sync + 'static) -> Self {
        Check { id, anchor: anchor.to_string(), run: Box::new(move |_| run()), corrupts_input: false }
    }

    fn with_input_fault(id: String, anchor: &str, run: impl Fn(Option<&Fault>) -> Evidence + Send + Sync + 'static) -> Self {
        Check { id, anchor: anchor.to_string(), run: Box::new(run), corrupts_input: true }
    }

    pub fn execute(&self, fault: Option<&Fault>, timings: bool) -> CheckRecord {
        let fault = fault.filter(|f| f.check == self.id);
        let t0 = Instant::now();
        let mut ev = (self.run)(fault);
        if let (Some(f), false) = (fault, self.corrupts_input) {
            ev = ev.corrupt(f.exponent);
        }
        let v = ev.judge();
        CheckRecord {
            id: self.id.clone(),
            anchor: self.anchor.clone(),
            status: v.status,
            mismatch: v.mismatch,
            detail: v.detail,
            wall_ms: timings.then(|| t0.elapsed().as_millis() as u64),
        }
    }
}

fn pair(left: Series, right: Series) -> Evidence {
    Evidence::Series { left, right }
}

/// Checks that need the shelf recursion, or the trivariate engine.
fn needs(suite: &str) -> (bool, bool) {
    match suite {
        "shelves" => (true, false),
        "axq" => (false, true),
        "all" => (true, true),
        _ => (false, false),
    }
}

pub fn build(suite: &str, c: &Config) -> Result<Vec<Check>, ConfigError> {
    let (rec, tri) = needs(suite);
    c.validate(rec, tri)?;
    let mut out = Vec::new();
    let all = suite == "all";
    if all || suite == "identities" {
        identities(c, &mut out);
    }
    if all || suite == "shelves" {
        shelves(c, &mut out);
    }
    if all || suite == "empirical" {
        empirical(c, &mut out);
    }
    if all || suite == "matrices" {
        matrices(c, &mut out);
    }
    if all || suite == "combinatorics" {
        combinatorics(c, &mut out);
    }
    if all || suite == "axq" {
        axq(c, &mut out);
    }
    Ok(out)
}

/// Runs a suite on the current rayon pool; records come back ordered by id.
pub fn run_suite(suite: &str, c: &Config, fault: Option<&Fault>) -> Result<VerificationReport, ConfigError> {
    let checks = build(suite, c)?;
    if let Some(f) = fault {
        if !checks.iter().any(|ch| ch.id == f.check) {
            return Err(ConfigError::UnknownFaultTarget(f.check.clone()));
        }
    }
    let records: Vec<CheckRecord> = checks.par_iter().map(|ch| ch.execute(fault, c.timings)).collect();
    Ok(VerificationReport::new(suite, c, records))
}

fn identities(c: &Config, out: &mut Vec<Check>) {
    let n = c.degree + 1;
    let m = c.nmax;
    for k in c.k.clone() {
        for i in 1..=k {
            out.push(Check::new(
                format!("identities.jtp.k{k}.i{i}"),
                "Σ(-1)^n z^n q^{n²}(1 - z^{-2n-1}q^{2n+1}) = (q², zq, q/z; q²)_∞ at q→q^{2k-1}, z→q^{2i-2}",
                move || match jacobi_triple_product_sides(2 * i - 2, 2 * k - 1, n) {
                    Ok((s, p)) => pair(s, p),
                    Err(e) => Evidence::failed(e.to_string()),
                },
            ));
            out.push(Check::new(
                format!("identities.shelf0.k{k}.i{i}"),
                "product side = shelf-0 theta sum / F",
                move || pair(product_side(k, i, n), shelf0_sum_form(k, i, n)),
            ));
            out.push(Check::new(
                format!("identities.shelf0_closed.k{k}.i{i}"),
                "shelf-0 theta sum / F = closed form of G at j = 0",
                move || pair(shelf0_sum_form(k, i, n), closed_form_g(k, 0, i, n)),
            ));
            if i >= 2 {
                out.push(Check::new(
                    format!("identities.bgg.k{k}.i{i}"),
                    "partitions with f_1+f_2 ≤ k-i, window and parity conditions = product side",
                    move || pair(gen_fn(ConditionSet::BggSum { k, i }, m), product_side(k, i, m + 1)),
                ));
                out.push(Check::new(
                    format!("identities.bgg_product_parts.k{k}.i{i}"),
                    "partitions into the product-side parts = product side",
                    move || pair(gen_fn(ConditionSet::ProductSide { k, i }, m), product_side(k, i, m + 1)),
                ));
                out.push(Check::new(
                    format!("identities.ghost0.k{k}.i{i}"),
                    "shelf-0 ghost single sum = interpolation of neighbouring officials",
                    move || {
                        let officials: Vec<Series> = (1..=k).map(|t| shelf0_sum_form(k, t, n)).collect();
                        let interp = ghosts_from_officials(k, 0, &officials);
                        pair(ghost0_closed(k, i, n), interp[(i - 2) as usize].clone())
                    },
                ));
            }
        }
    }
}

/// Officials then ghosts of one shelf.
fn shelf_flat(p: &ShelfPair) -> Vec<Series> {
    p.officials.iter().chain(&p.ghosts).cloned().collect()
}

fn shelves(c: &Config, out: &mut Vec<Check>) {
    let n = c.degree + 1;
    for k in c.k.clone() {
        for j in c.shelves.clone() {
            if j >= 1 {
                out.push(Check::with_input_fault(
                    format!("shelves.recursion.k{k}.j{j}"),
                    "shelf recursion from shelf 0 with exact q-power divisions = closed forms",
                    move |fault| {
                        let mut p = ShelfPair::from_closed_forms(k, 0, n);
                        if let Some(f) = fault {
                            // Corrupt an input of the recursion, not its output.
                            let e = f.exponent.unwrap_or(1).min(n - 1);
                            p.officials[0] = p.officials[0].perturbed(e, &1.into());
                        }
                        for _ in 0..j {
                            p = match next_shelf(&p) {
                                Ok(q) => q,
                                Err(e) => return Evidence::from_shelf_error(&e),
                            };
                        }
                        let reference = ShelfPair::from_closed_forms(k, j, n);
                        Evidence::Vector { left: shelf_flat(&p), right: shelf_flat(&reference) }
                    },
                ));
            }
            out.push(Check::new(
                format!("shelves.edge.k{k}.j{j}"),
                "G_{(k-1)j+k} = G_{(k-1)(j+1)+1}",
                move || pair(closed_form_g(k, j, k, n), closed_form_g(k, j + 1, 1, n)),
            ));
            out.push(Check::new(
                format!("shelves.ghost_interpolation.k{k}.j{j}"),
                "closed-form ghosts = interpolation of closed-form officials",
                move || {
                    let p = ShelfPair::from_closed_forms(k, j, n);
                    Evidence::Vector { left: p.ghosts.clone(), right: ghosts_from_officials(k, j, &p.officials) }
                },
            ));
        }
    }
}

fn empirical(c: &Config, out: &mut Vec<Check>) {
    let n = c.degree + 1;
    for k in c.k.clone() {
        for j in c.shelves.clone() {
            for i in 1..=k {
                out.push(Check::new(
                    format!("empirical.official.k{k}.j{j}.i{i}"),
                    if i == k { "val(G_{(k-1)j+k} - 1) ≥ 2j+3" } else { "val(G_{(k-1)j+i} - 1) ≥ 2j+1" },
                    move || Evidence::Valuation {
                        diff: &closed_form_g(k, j, i, n) - &Series::one(n),
                        required: hypothesis_bound(k, j, i, false),
                    },
                ));
                if i >= 2 {
                    out.push(Check::new(
                        format!("empirical.ghost.k{k}.j{j}.i{i}"),
                        "val(G̃_{(k-1)j+i} - 1) ≥ 2j+1",
                        move || Evidence::Valuation {
                            diff: &closed_form_ghost(k, j, i, n) - &Series::one(n),
                            required: hypothesis_bound(k, j, i, true),
                        },
                    ));
                }
            }
        }
    }
}

fn matrices(c: &Config, out: &mut Vec<Check>) {
    let n = c.degree + 1;
    let top = (*c.start.end() + 5).max(*c.shelves.end()).max(1);
    for k in c.k.clone() {
        for j in 1..=top {
            out.push(Check::new(
                format!("matrices.a_times_b.k{k}.j{j}"),
                "A_(j) B_(j) = I",
                move || Evidence::Matrix {
                    left: &build_a_pattern(k, j) * &build_b(k, j),
                    right: PolyMatrix::identity(k as usize),
                },
            ));
            out.push(Check::new(
                format!("matrices.aprime_polynomial.k{k}.j{j}"),
                "A'_(j) = A_(j) C_(j) has no negative powers of q",
                move || match build_aprime(k, j) {
                    Ok(ap) => Evidence::Matrix { left: ap, right: &build_a_pattern(k, j) * &build_c(k, j) },
                    Err(e) => Evidence::failed(e.to_string()),
                },
            ));
            out.push(Check::new(
                format!("matrices.c_vector.k{k}.j{j}"),
                "C_(j) G_(j) = B_(j) G_(j-1)",
                move || Evidence::Vector {
                    left: build_c(k, j).apply(&shelf_vector(k, j, n)),
                    right: build_b(k, j).apply(&shelf_vector(k, j - 1, n)),
                },
            ));
            out.push(Check::new(
                format!("matrices.aprime_vector.k{k}.j{j}"),
                "G_(j-1) = A'_(j) G_(j)",
                move || match build_aprime(k, j) {
                    Ok(ap) => Evidence::Vector { left: shelf_vector(k, j - 1, n), right: ap.apply(&shelf_vector(k, j, n)) },
                    Err(e) => Evidence::failed(e.to_string()),
                },
            ));
        }
        for s in c.start.clone() {
            for j in s + 1..=s + 5 {
                out.push(Check::new(
                    format!("matrices.h_routes.k{k}.J{s}.j{j}"),
                    "ᴶh⁽ʲ⁾ = A'_(J+1) ⋯ A'_(j) = entrywise recursion",
                    move || match h_by_product(k, s, j) {
                        Ok(p) => Evidence::Matrix { left: p, right: h_by_recursion(k, s, j) },
                        Err(e) => Evidence::failed(e.to_string()),
                    },
                ));
            }
            out.push(Check::new(
                format!("matrices.h_first_step.k{k}.J{s}"),
                "ᴶh⁽ᴶ⁺¹⁾ case split",
                move || Evidence::Matrix { left: h_first_step(k, s), right: h_by_recursion(k, s, s + 1) },
            ));
            out.push(Check::new(
                format!("matrices.h_shelf_vector.k{k}.J{s}"),
                "G_(J) = ᴶh⁽ʲ⁾ G_(j)",
                move || Evidence::Vector {
                    left: shelf_vector(k, s, n),
                    right: h_by_recursion(k, s, s + 3).apply(&shelf_vector(k, s + 3, n)),
                },
            ));
        }
    }
}

fn combinatorics(c: &Config, out: &mut Vec<Check>) {
    let m = c.nmax;
    let n = c.degree + 1;
    for k in c.k.clone() {
        for s in c.start.clone() {
            for j in s + 1..=s + 3 {
                for i in 1..=k {
                    for ell in 1..=k {
                        out.push(Check::new(
                            format!("combinatorics.h.k{k}.J{s}.j{j}.i{i}.l{ell}"),
                            "ᴶh_{iℓ}⁽ʲ⁾ counts partitions under conditions 1-8",
                            move || {
                                let h = h_by_recursion(k, s, j);
                                let poly = h.get((i - 1) as usize, (ell - 1) as usize).to_series(m + 1);
                                pair(gen_fn(ConditionSet::H { k, i, ell, j, start: s }, m), poly)
                            },
                        ));
                    }
                    out.push(Check::new(
                        format!("combinatorics.h12.k{k}.J{s}.j{j}.i{i}"),
                        "ᴶh_{i1}⁽ʲ⁾ + ᴶh_{i2}⁽ʲ⁾ counts the union of the ℓ = 1, 2 sets",
                        move || {
                            let h = h_by_recursion(k, s, j);
                            let r = (i - 1) as usize;
                            let poly = (h.get(r, 0) + h.get(r, 1)).to_series(m + 1);
                            pair(gen_fn(ConditionSet::H12 { k, i, j, start: s }, m), poly)
                        },
                    ));
                }
            }
            for i in 1..=k {
                out.push(Check::new(
                    format!("combinatorics.g.k{k}.J{s}.i{i}"),
                    "G_{(k-1)J+i} counts partitions under conditions 1-5",
                    move || pair(gen_fn(ConditionSet::G { k, i, start: s }, m), closed_form_g(k, s, i, m + 1)),
                ));
                let anchor = if i == 1 {
                    "G̃_{(k-1)J+1} = G_{(k-1)J+2} counts the flipped-parity conditions (extension to i = 1)"
                } else {
                    "G̃_{(k-1)J+i} counts partitions under the flipped-parity conditions"
                };
                out.push(Check::new(format!("combinatorics.ghost.k{k}.J{s}.i{i}"), anchor, move || {
                    let want = if i >= 2 { closed_form_ghost(k, s, i, m + 1) } else { closed_form_g(k, s, 2, m + 1) };
                    pair(gen_fn(ConditionSet::Ghost { k, i, start: s }, m), want)
                }));
                out.push(Check::new(
                    format!("combinatorics.h12_limit.k{k}.J{s}.i{i}"),
                    "lim_j (ᴶh_{i1}⁽ʲ⁾ + ᴶh_{i2}⁽ʲ⁾) = G_{(k-1)J+i}, by coefficient stabilization",
                    move || match h12_stabilized(k, i, s, m, m + 10) {
                        Ok(st) => pair(st.series, closed_form_g(k, s, i, m + 1)),
                        Err(e) => Evidence::failed(e.to_string()),
                    },
                ));
            }
        }
        out.push(Check::new(
            format!("combinatorics.ghost_one.k{k}"),
            "G̃_1 = G_2",
            move || {
                let t = j_ghost_full(k, k, n - 1);
                match t.specialize(0, n - 1) {
                    Ok(s) => pair(s, closed_form_g(k, 0, 2, n)),
                    Err(e) => Evidence::from_axq_error(&e),
                }
            },
        ));
    }
}

fn tri_identity(id: &TriIdentity) -> Evidence {
    match &id.sides {
        Ok((l, r)) => Evidence::Tri { left: l.clone(), right: r.clone() },
        Err(e) => Evidence::from_axq_error(e),
    }
}

fn axq(c: &Config, out: &mut Vec<Check>) {
    let n = c.degree;
    let qp = c.q_prec();
    let nmo = c.nmax_over;
    let ks: Vec<i64> = c.k.clone().collect();
    let families: Vec<Arc<AxqFamily>> = ks.par_iter().map(|&k| Arc::new(AxqFamily::new(k, qp))).collect();
    for (&k, fam) in ks.iter().zip(families) {
        let ids: Arc<Vec<TriIdentity>> = Arc::new(fam.identities());
        for (t, id) in ids.iter().enumerate() {
            let ids = Arc::clone(&ids);
            out.push(Check::new(format!("axq.k{k}.{}", id.id), &id.anchor, move || tri_identity(&ids[t])));
        }
        for (name, res) in fam.support_checks() {
            let ev = res.err();
            out.push(Check::new(format!("axq.k{k}.{name}"), "every a and x carries at least one q", move || {
                match &ev {
                    Some(e) => Evidence::from_axq_error(e),
                    None => Evidence::Series { left: Series::zero(1), right: Series::zero(1) },
                }
            }));
        }
        for j in c.shelves.clone() {
            for i in 1..=k {
                let f = Arc::clone(&fam);
                out.push(Check::new(
                    format!("axq.k{k}.dictionary.j{j}.i{i}"),
                    "G_{(k-1)j+i} = J̃_{k,k-i+1}(1/q; q^{2j}; q²)",
                    move || match f.jt(k - i + 1).specialize(j, n) {
                        Ok(s) => pair(s, closed_form_g(k, j, i, n + 1)),
                        Err(e) => Evidence::from_axq_error(&e),
                    },
                ));
                let f = Arc::clone(&fam);
                out.push(Check::new(
                    format!("axq.k{k}.dictionary_ghost.j{j}.i{i}"),
                    "G̃_{(k-1)j+i} = J̃̃_{k,k-i+1}(1/q; q^{2j}; q²)",
                    move || match f.jtt(k - i + 1).and_then(|g| g.specialize(j, n)) {
                        Ok(s) => {
                            let want = if i >= 2 { closed_form_ghost(k, j, i, n + 1) } else { closed_form_g(k, j, 2, n + 1) };
                            pair(s, want)
                        }
                        Err(e) => Evidence::from_axq_error(&e),
                    },
                ));
            }
        }
        for i in 1..=k {
            let f = Arc::clone(&fam);
            out.push(Check::new(
                format!("axq.k{k}.overpartitions.i{i}"),
                "J̃_{k,i} = Σ c_{k,i}(j,m,n) a^j x^m q^n",
                move || Evidence::Tri {
                    left: overpartition_gen_fn(OverCondition::Official { k, i }, nmo),
                    right: f.jt(i).truncate(nmo),
                },
            ));
            let f = Arc::clone(&fam);
            out.push(Check::new(
                format!("axq.k{k}.overpartitions_ghost.i{i}"),
                "J̃̃_{k,i} = Σ c̃_{k,i}(j,m,n) a^j x^m q^n, windows from ℓ = 0",
                move || match f.jtt(i) {
                    Ok(g) => Evidence::Tri { left: overpartition_gen_fn(OverCondition::Ghost { k, i }, nmo), right: g.truncate(nmo) },
                    Err(e) => Evidence::from_axq_error(&e),
                },
            ));
        }
    }
}
