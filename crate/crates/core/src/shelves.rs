//! Official series `G` and ghost series `G̃` on every shelf.
//!
//! Shelf `j` holds positions `i = 1..=k`; the series at `(j, i)` is
//! `G_{(k-1)j+i}`. Three generators are provided: the infinite product
//! (shelf 0 only), the single-sum closed forms, and the shelf-to-shelf
//! recursion with strict `q`-power divisions.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::series::{f_inverse, pochhammer, Length, Mismatch, Series, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShelfError {
    #[error("shelf {shelf}, position {position}: numerator not divisible by q^{divisor} (coefficient {coefficient} at q^{exponent})")]
    NotDivisible { shelf: i64, position: i64, divisor: i64, exponent: i64, coefficient: BigInt },
    #[error("shelf step needs precision above {needed}, only {available} available")]
    PrecisionExhausted { needed: i64, available: i64 },
    #[error("shelf {shelf}, position {position}: the two recursion numerators disagree at {mismatch}")]
    AlternativeMismatch { shelf: i64, position: i64, mismatch: Mismatch },
    #[error("shelf {shelf}, position 2 does not reproduce the ghost at position k: {mismatch}")]
    GhostMismatch { shelf: i64, mismatch: Mismatch },
    #[error("invalid shelf label k={k}, j={j}, i={i}")]
    InvalidLabel { k: i64, j: i64, i: i64 },
}

/// `(k, j, i)` naming `G_{(k-1)j+i}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ShelfLabel {
    pub k: i64,
    pub j: i64,
    pub i: i64,
}

impl ShelfLabel {
    pub fn new(k: i64, j: i64, i: i64) -> Result<Self, ShelfError> {
        if k < 2 || j < 0 || !(1..=k).contains(&i) {
            return Err(ShelfError::InvalidLabel { k, j, i });
        }
        Ok(ShelfLabel { k, j, i })
    }

    /// Global index `ℓ = (k-1)j + i`.
    pub fn ell(&self) -> i64 {
        (self.k - 1) * self.j + self.i
    }

    /// Position `k` of shelf `j` is the same series as position 1 of shelf `j + 1`.
    pub fn canonical(self) -> Self {
        if self.i == self.k {
            ShelfLabel { k: self.k, j: self.j + 1, i: 1 }
        } else {
            self
        }
    }
}

fn f_inverse_cached(prec: i64) -> Arc<Series> {
    static MEMO: OnceLock<Mutex<HashMap<i64, Arc<Series>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(s) = memo.lock().expect("memo poisoned").get(&prec) {
        return Arc::clone(s);
    }
    let s = Arc::new(f_inverse(prec));
    memo.lock().expect("memo poisoned").entry(prec).or_insert(s).clone()
}

fn binom2(n: i64) -> i64 {
    n * (n - 1) / 2
}

/// `(-q;q²)_∞ (q^{2k-2i+1}, q^{2k+2i-3}, q^{4k-2}; q^{4k-2})_∞ / (q²;q²)_∞` below `prec`.
pub fn product_side(k: i64, i: i64, prec: i64) -> Series {
    assert!(k >= 2 && (1..=k).contains(&i), "product side needs k ≥ 2, 1 ≤ i ≤ k");
    let m = 4 * k - 2;
    let inf = |sign, e, step| pochhammer(sign, e, step, Length::Infinite, prec).expect("positive exponent");
    let mut acc = inf(Sign::Minus, 1, 2);
    for e in [2 * k - 2 * i + 1, 2 * k + 2 * i - 3, m] {
        acc = &acc * &inf(Sign::Plus, e, m);
    }
    let mut e = 2;
    while e < prec {
        acc = acc.div_binomial(-1, e);
        e += 2;
    }
    acc
}

/// Sums `Σ_n (-1)^n q^{quad·C(n,2) + lin·n} · term(n)` below `prec`, where
/// `term(n)` receives the relative precision it must reach.
fn theta_sum(quad: i64, lin: i64, prec: i64, mut term: impl FnMut(i64, i64) -> Series) -> Series {
    assert!(quad >= 0 && lin > 0, "cutoff needs increasing exponents");
    let mut acc = Series::zero(prec);
    let mut n = 0;
    loop {
        let e = quad * binom2(n) + lin * n;
        if e >= prec {
            break;
        }
        let t = term(n, prec - e).shift(e);
        acc = if n % 2 == 0 { &acc + &t } else { &acc - &t };
        n += 1;
    }
    acc
}

/// `1 + c_1 q^{e_1} + ...` as a series known below `prec`.
fn poly_series(terms: &[(i64, i64)], prec: i64) -> Series {
    let lo = terms.iter().map(|&(_, e)| e).min().unwrap_or(0).min(0);
    let hi = terms.iter().map(|&(_, e)| e).max().unwrap_or(0).max(0);
    let mut coeffs = vec![BigInt::from(0); (hi - lo + 1) as usize];
    coeffs[(-lo) as usize] += 1;
    for &(c, e) in terms {
        coeffs[(e - lo) as usize] += c;
    }
    Series::new(lo, coeffs, prec)
}

/// Shelf-0 sum form `(1/F) Σ (-1)^n q^{(4k-2)C(n,2)+(2i+2k-3)n}(1 - q^{(2k-2i+1)(2n+1)})`.
pub fn shelf0_sum_form(k: i64, i: i64, prec: i64) -> Series {
    assert!(k >= 2 && (1..=k).contains(&i));
    let sum = theta_sum(4 * k - 2, 2 * i + 2 * k - 3, prec, |n, p| {
        poly_series(&[(-1, (2 * k - 2 * i + 1) * (2 * n + 1))], p)
    });
    &sum * &f_inverse_cached(prec)
}

/// Single-sum form of the shelf-0 ghost `G̃_i`, `2 ≤ i ≤ k`.
pub fn ghost0_closed(k: i64, i: i64, prec: i64) -> Series {
    assert!(k >= 2 && (2..=k).contains(&i));
    let sum = theta_sum(4 * k - 2, 2 * k + 2 * i - 5, prec, |n, p| {
        let a = 2 * (2 * n + 1);
        let b = (2 * k - 2 * i + 1) * (2 * n + 1);
        poly_series(&[(1, a), (-1, b), (-1, a + b)], p)
    });
    (&sum * &f_inverse_cached(prec)).div_binomial(1, 2)
}

/// One summand of the shelf-`j` closed forms without its sign and leading power.
fn closed_term(k: i64, j: i64, i: i64, n: i64, ghost: bool, prec: i64) -> Series {
    let mut t = Series::one(prec);
    for s in 0..n {
        t = t.mul_binomial(1, 2 * j + 2 + 2 * s); // (-q^{2j+2};q²)_n
        t = t.div_binomial(1, 2 + 2 * s); // 1/(-q²;q²)_n
    }
    for s in 0..j {
        t = t.mul_binomial(-1, 2 * n + 2 + 2 * s); // (q^{2n+2};q²)_j
    }
    for s in 0..=j {
        t = t.div_binomial(1, 2 * n + 1 + 2 * s); // 1/(-q^{2n+1};q²)_{j+1}
    }
    let w = 2 * (2 * n + j + 1);
    let odd = 2 * n + 2 * j + 1;
    let tail = poly_series(&[(-1, w * (k - i + 1)), (1, odd), (-1, odd + w * (k - i))], prec);
    t = &t * &tail;
    if ghost {
        t = t.mul_binomial(1, w);
    }
    t
}

/// Closed form of the official series `G_{(k-1)j+i}`, `j ≥ 0`, `1 ≤ i ≤ k`.
pub fn closed_form_g(k: i64, j: i64, i: i64, prec: i64) -> Series {
    assert!(k >= 2 && j >= 0 && (1..=k).contains(&i));
    let lin = 2 * k * (j + 1) + 2 * (i - j) - 3;
    let sum = theta_sum(4 * k - 2, lin, prec, |n, p| closed_term(k, j, i, n, false, p));
    &sum * &f_inverse_cached(prec)
}

/// Closed form of the ghost `G̃_{(k-1)j+i}`, `j ≥ 0`, `2 ≤ i ≤ k`.
pub fn closed_form_ghost(k: i64, j: i64, i: i64, prec: i64) -> Series {
    assert!(k >= 2 && j >= 0 && (2..=k).contains(&i));
    let lin = 2 * k * (j + 1) + 2 * (i - j - 1) - 3;
    let sum = theta_sum(4 * k - 2, lin, prec, |n, p| closed_term(k, j, i, n, true, p));
    (&sum * &f_inverse_cached(prec)).div_binomial(1, 2 * j + 2)
}

/// The officials of one shelf together with its ghosts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShelfPair {
    pub k: i64,
    pub j: i64,
    /// `G` at positions `1..=k`.
    pub officials: Vec<Series>,
    /// `G̃` at positions `2..=k`.
    pub ghosts: Vec<Series>,
}

impl ShelfPair {
    pub fn from_closed_forms(k: i64, j: i64, prec: i64) -> Self {
        ShelfPair {
            k,
            j,
            officials: (1..=k).map(|i| closed_form_g(k, j, i, prec)).collect(),
            ghosts: (2..=k).map(|i| closed_form_ghost(k, j, i, prec)).collect(),
        }
    }

    /// Official at position `i` (1-based).
    pub fn official(&self, i: i64) -> &Series {
        &self.officials[(i - 1) as usize]
    }

    /// Ghost at position `i`, `2 ≤ i ≤ k`.
    pub fn ghost(&self, i: i64) -> &Series {
        &self.ghosts[(i - 2) as usize]
    }

    pub fn effective_prec(&self) -> i64 {
        self.officials.iter().chain(&self.ghosts).map(Series::prec).min().unwrap_or(0)
    }
}

/// Ghosts of shelf `j` from its officials by interpolation.
pub fn ghosts_from_officials(k: i64, j: i64, officials: &[Series]) -> Vec<Series> {
    let g = |i: i64| &officials[(i - 1) as usize];
    let e = 2 * (j + 1);
    (2..=k)
        .map(|i| {
            let num = if i < k {
                g(i - 1) + &g(i + 1).shift(e)
            } else {
                g(k - 1) - &g(k).shift(2 * j + 1)
            };
            num.div_binomial(1, e)
        })
        .collect()
}

/// Total precision lost stepping `shelves` times from shelf `start`.
pub fn recursion_loss(k: i64, start: i64, shelves: i64) -> i64 {
    (start..start + shelves).map(|j| 2 * (j + 1) * (k - 1)).sum()
}

/// Degree to compute the starting shelf at so that `shelves` steps still
/// leave a window of `target`.
pub fn required_degree(k: i64, start: i64, shelves: i64, target: i64) -> i64 {
    target + recursion_loss(k, start, shelves)
}

fn exact_div(num: &Series, m: i64, shelf: i64, position: i64) -> Result<Series, ShelfError> {
    use crate::series::SeriesError;
    num.divide_exact_by_q_power(m).map_err(|e| match e {
        SeriesError::NotDivisible { exponent, coefficient } => {
            ShelfError::NotDivisible { shelf, position, divisor: m, exponent, coefficient }
        }
        _ => ShelfError::PrecisionExhausted { needed: m, available: num.prec() },
    })
}

/// `(num - q^{d-1} prev) / q^d`, i.e. `num / q^d - q^{-1} prev`, with the
/// division required to be exact.
fn shelf_step(num: &Series, prev: &Series, d: i64, shelf: i64, position: i64) -> Result<Series, ShelfError> {
    exact_div(&(num - &prev.shift(d - 1)), d, shelf, position)
}

/// Steps from shelf `j` to shelf `j + 1`.
///
/// Each new official is `num / q^d - q^{-1} prev`. The numerator alone is in
/// general *not* divisible by `q^d`; the combination is, and that divisibility
/// is enforced strictly. Both numerators of the general step are evaluated and
/// compared, and position 2 must reproduce the old ghost at position `k`.
pub fn next_shelf(pair: &ShelfPair) -> Result<ShelfPair, ShelfError> {
    let (k, j) = (pair.k, pair.j);
    let sj = j + 1;
    let d = 2 * (j + 1);
    let needed = d * (k - 1);
    if pair.effective_prec() <= needed {
        return Err(ShelfError::PrecisionExhausted { needed, available: pair.effective_prec() });
    }
    let g = |i: i64| pair.official(i);
    let gt = |i: i64| pair.ghost(i);
    let mut next: Vec<Series> = vec![g(k).clone()];
    let second = shelf_step(&(g(k - 1) - gt(k)), &next[0], d, sj, 2)?;
    if let Some(mismatch) = second.first_mismatch(gt(k)) {
        return Err(ShelfError::GhostMismatch { shelf: sj, mismatch });
    }
    next.push(second);
    for i in 3..=k {
        let prev = &next[(i - 2) as usize];
        let a = shelf_step(&(g(k - i + 1) - gt(k - i + 2)), prev, d * (i - 1), sj, i)?;
        let b = shelf_step(&(gt(k - i + 2) - g(k - i + 3)), prev, d * (i - 2), sj, i)?;
        if let Some(mismatch) = a.first_mismatch(&b) {
            return Err(ShelfError::AlternativeMismatch { shelf: sj, position: i, mismatch });
        }
        next.push(if a.prec() <= b.prec() { a } else { b });
    }
    let ghosts = ghosts_from_officials(k, sj, &next);
    Ok(ShelfPair { k, j: sj, officials: next, ghosts })
}

/// Result of checking `val(series - 1)` against its lower bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValuationReport {
    pub label: ShelfLabel,
    pub ghost: bool,
    /// `None` when `series - 1` vanishes on the whole window.
    pub valuation: Option<i64>,
    pub required: i64,
    pub prec: i64,
    pub pass: bool,
}

/// Lower bound on `val(series - 1)` at `(j, i)`: `2j + 1`, or `2j + 3` for
/// the official series at the last position.
pub fn hypothesis_bound(k: i64, j: i64, i: i64, ghost: bool) -> i64 {
    if !ghost && i == k {
        2 * j + 3
    } else {
        2 * j + 1
    }
}

pub fn empirical_hypothesis_check(k: i64, j: i64, i: i64, prec: i64, ghost: bool) -> ValuationReport {
    let s = if ghost { closed_form_ghost(k, j, i, prec) } else { closed_form_g(k, j, i, prec) };
    valuation_report(ShelfLabel { k, j, i }, ghost, &s)
}

/// Valuation report for an already computed series.
pub fn valuation_report(label: ShelfLabel, ghost: bool, s: &Series) -> ValuationReport {
    let diff = s - &Series::one(s.prec());
    let valuation = diff.valuation();
    let required = hypothesis_bound(label.k, label.j, label.i, ghost);
    let pass = match valuation {
        Some(v) => v >= required,
        None => s.prec() >= required,
    };
    ValuationReport { label, ghost, valuation, required, prec: s.prec(), pass }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_side_small_case() {
        // k=2, i=2: allowed parts up to 4 are 3 and 4.
        assert_eq!(product_side(2, 2, 5), Series::from_i64s(0, &[1, 0, 0, 1, 1], 5));
    }

    #[test]
    fn labels() {
        let l = ShelfLabel::new(3, 1, 2).unwrap();
        assert_eq!(l.ell(), 4);
        assert_eq!(ShelfLabel::new(3, 0, 3).unwrap().canonical(), ShelfLabel { k: 3, j: 1, i: 1 });
        assert!(ShelfLabel::new(3, 0, 4).is_err());
    }

    #[test]
    fn recursion_loss_ledger() {
        assert_eq!(recursion_loss(4, 0, 3), 2 * 3 * (1 + 2 + 3));
        assert_eq!(required_degree(3, 0, 1, 30), 34);
    }

    #[test]
    fn next_shelf_tautology_position() {
        let p = ShelfPair::from_closed_forms(3, 0, 30);
        let n = next_shelf(&p).unwrap();
        assert_eq!(n.official(1), p.official(3));
    }

    #[test]
    fn next_shelf_rejects_thin_window() {
        let p = ShelfPair::from_closed_forms(3, 0, 4);
        assert!(matches!(next_shelf(&p), Err(ShelfError::PrecisionExhausted { .. })));
    }

    #[test]
    fn corrupted_shelf_fails_divisibility() {
        let mut p = ShelfPair::from_closed_forms(3, 0, 30);
        p.officials[1] = p.officials[1].perturbed(1, &BigInt::from(1));
        assert!(matches!(next_shelf(&p), Err(ShelfError::NotDivisible { shelf: 1, position: 2, .. })));
    }
}
