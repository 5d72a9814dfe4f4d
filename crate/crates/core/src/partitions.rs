//! Brute-force partition and overpartition enumeration, used as an
//! independent oracle for the analytic series.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::axq::{mono, TriSeries};
use crate::series::Series;

/// A partition as a multiplicity map `part -> f_part`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Partition {
    freq: BTreeMap<i64, i64>,
}

impl Partition {
    pub fn from_parts(parts: &[i64]) -> Self {
        let mut freq = BTreeMap::new();
        for &p in parts {
            assert!(p >= 1, "parts are positive");
            *freq.entry(p).or_insert(0) += 1;
        }
        Partition { freq }
    }

    /// Multiplicity `f_t` (zero for `t ≤ 0`).
    pub fn f(&self, t: i64) -> i64 {
        self.freq.get(&t).copied().unwrap_or(0)
    }

    pub fn weight(&self) -> i64 {
        self.freq.iter().map(|(p, f)| p * f).sum()
    }

    pub fn num_parts(&self) -> i64 {
        self.freq.values().sum()
    }

    pub fn largest(&self) -> Option<i64> {
        self.freq.keys().next_back().copied()
    }

    pub fn smallest(&self) -> Option<i64> {
        self.freq.keys().next().copied()
    }

    /// Number of odd parts `≤ bound`, with multiplicity.
    pub fn odd_parts_up_to(&self, bound: i64) -> i64 {
        self.freq.range(..=bound).filter(|(p, _)| *p % 2 == 1).map(|(_, f)| f).sum()
    }

    /// Parts in weakly decreasing order.
    pub fn parts(&self) -> Vec<i64> {
        self.freq.iter().rev().flat_map(|(&p, &f)| std::iter::repeat_n(p, f as usize)).collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.parts();
        if parts.is_empty() {
            return write!(f, "∅");
        }
        let s: Vec<String> = parts.iter().map(i64::to_string).collect();
        write!(f, "{}", s.join("+"))
    }
}

/// All partitions of `n`, parts in descending generation order.
pub fn enumerate_partitions(n: i64) -> Vec<Partition> {
    fn go(rest: i64, max: i64, cur: &mut Vec<i64>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition::from_parts(cur));
            return;
        }
        for p in (1..=max.min(rest)).rev() {
            cur.push(p);
            go(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n >= 0 {
        go(n, n, &mut Vec::new(), &mut out);
    }
    out
}

/// Partition condition sets with closed-form counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConditionSet {
    /// Multiplicative side: even parts `≡ 0 (mod 4)` avoiding `0 (mod 8k-4)`,
    /// odd parts avoiding `±(2k-2i+1) (mod 4k-2)`, parts `≡ 2k-1 (mod 4k-2)`
    /// at most once. Only meaningful for `2 ≤ i ≤ k`.
    ProductSide { k: i64, i: i64 },
    /// Sum side of the identity; the `G` conditions at `J = 0`.
    BggSum { k: i64, i: i64 },
    /// Partitions counted by `G_{(k-1)J+i}`.
    G { k: i64, i: i64, start: i64 },
    /// Partitions counted by the ghost `G̃_{(k-1)J+i}`; `i = 1` is an
    /// extension of the stated range.
    Ghost { k: i64, i: i64, start: i64 },
    /// Partitions counted by `ᴶh_{iℓ}⁽ʲ⁾`.
    H { k: i64, i: i64, ell: i64, j: i64, start: i64 },
    /// Partitions counted by `ᴶh_{i1}⁽ʲ⁾ + ᴶh_{i2}⁽ʲ⁾`: the union of the `ℓ = 1`
    /// and `ℓ = 2` sets of [`ConditionSet::H`]. Partitions with `f_{2j} = 1`
    /// only occur in the `ℓ = 2` set, so they keep its parity constraint on
    /// the odd parts.
    H12 { k: i64, i: i64, j: i64, start: i64 },
    /// Conditions 1–5 with largest part `≤ 2j` and `f_{2j} ∈ {0, 1}` and no
    /// parity constraint. Overcounts `H12` at finite `j` (both agree once
    /// `2j` exceeds the weight); kept to exhibit the difference.
    H12Unconstrained { k: i64, i: i64, j: i64, start: i64 },
}

fn even(n: i64) -> bool {
    n.rem_euclid(2) == 0
}

/// Conditions 1–5 of the shelf description with an extra parity offset
/// (0 for officials, 1 for ghosts).
fn shelf_conditions(p: &Partition, k: i64, i: i64, start: i64, offset: i64) -> bool {
    if p.freq.iter().any(|(b, f)| b % 2 == 1 && *f > 1) {
        return false;
    }
    if p.f(2 * start + 1) + p.f(2 * start + 2) > k - i {
        return false;
    }
    if p.smallest().is_some_and(|s| s <= 2 * start) {
        return false;
    }
    let top = p.largest().unwrap_or(0) / 2;
    for t in 0..=top {
        let window = p.f(2 * t) + p.f(2 * t + 1) + p.f(2 * t + 2);
        if window > k - 1 {
            return false;
        }
        if window == k - 1 {
            let lhs = t * p.f(2 * t) + (t + 1) * (p.f(2 * t + 1) + p.f(2 * t + 2));
            let rhs = (k - 1) * start + k - i + p.odd_parts_up_to(2 * t) + offset;
            if !even(lhs - rhs) {
                return false;
            }
        }
    }
    true
}

impl ConditionSet {
    pub fn admits(&self, p: &Partition) -> bool {
        match *self {
            ConditionSet::ProductSide { k, i } => {
                let m = 4 * k - 2;
                let (bad1, bad2) = ((2 * k - 2 * i + 1).rem_euclid(m), (-(2 * k - 2 * i + 1)).rem_euclid(m));
                p.freq.iter().all(|(&b, &f)| {
                    if b % 2 == 0 {
                        b % 4 == 0 && b % (8 * k - 4) != 0
                    } else {
                        let r = b.rem_euclid(m);
                        r != bad1 && r != bad2 && (r != 2 * k - 1 || f <= 1)
                    }
                })
            }
            ConditionSet::BggSum { k, i } => shelf_conditions(p, k, i, 0, 0),
            ConditionSet::G { k, i, start } => shelf_conditions(p, k, i, start, 0),
            ConditionSet::Ghost { k, i, start } => shelf_conditions(p, k, i, start, 1),
            ConditionSet::H { k, i, ell, j, start } => {
                if !shelf_conditions(p, k, i, start, 0) || p.largest().is_some_and(|b| b > 2 * j) {
                    return false;
                }
                let want_even = even(ell + (k - 1) * (j - start) - i);
                if even(p.odd_parts_up_to(2 * j)) != want_even {
                    return false;
                }
                let top = p.f(2 * j);
                top == ell - 1 || top == ell - 2
            }
            ConditionSet::H12 { k, i, j, start } => [1, 2]
                .iter()
                .any(|&ell| ConditionSet::H { k, i, ell, j, start }.admits(p)),
            ConditionSet::H12Unconstrained { k, i, j, start } => {
                shelf_conditions(p, k, i, start, 0) && p.largest().is_none_or(|b| b <= 2 * j) && p.f(2 * j) <= 1
            }
        }
    }

    /// True for the ghost at `i = 1`, which lies outside the stated range.
    pub fn is_extension(&self) -> bool {
        matches!(self, ConditionSet::Ghost { i: 1, .. })
    }
}

/// Generating function `Σ_{n ≤ n_max} #{λ ⊢ n admitted} q^n`, known below `n_max + 1`.
pub fn gen_fn(cond: ConditionSet, n_max: i64) -> Series {
    let coeffs = (0..=n_max).map(|n| BigInt::from(enumerate_partitions(n).iter().filter(|p| cond.admits(p)).count())).collect();
    Series::new(0, coeffs, n_max + 1)
}

/// Several condition sets over one enumeration.
pub fn gen_fns(conds: &[ConditionSet], n_max: i64) -> Vec<Series> {
    let mut counts = vec![vec![0u64; (n_max + 1) as usize]; conds.len()];
    for n in 0..=n_max {
        for p in enumerate_partitions(n) {
            for (c, row) in conds.iter().zip(counts.iter_mut()) {
                if c.admits(&p) {
                    row[n as usize] += 1;
                }
            }
        }
    }
    counts.into_iter().map(|row| Series::new(0, row.into_iter().map(BigInt::from).collect(), n_max + 1)).collect()
}

/// The admitted partitions of `n`, for reporting.
pub fn witnesses(cond: ConditionSet, n: i64) -> Vec<Partition> {
    enumerate_partitions(n).into_iter().filter(|p| cond.admits(p)).collect()
}

/// An overpartition: plain multiplicities plus the set of overlined sizes
/// (each size may be overlined at most once).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Overpartition {
    plain: BTreeMap<i64, i64>,
    overlined: BTreeSet<i64>,
}

impl Overpartition {
    /// Plain multiplicity `f_t`.
    pub fn f(&self, t: i64) -> i64 {
        self.plain.get(&t).copied().unwrap_or(0)
    }

    /// Overlined multiplicity `f_{t̄}` (0 or 1).
    pub fn f_bar(&self, t: i64) -> i64 {
        i64::from(self.overlined.contains(&t))
    }

    pub fn weight(&self) -> i64 {
        self.plain.iter().map(|(p, f)| p * f).sum::<i64>() + self.overlined.iter().sum::<i64>()
    }

    pub fn num_parts(&self) -> i64 {
        self.plain.values().sum::<i64>() + self.overlined.len() as i64
    }

    pub fn num_overlined(&self) -> i64 {
        self.overlined.len() as i64
    }

    /// Overlined parts `≤ bound`.
    pub fn overlined_up_to(&self, bound: i64) -> i64 {
        self.overlined.range(..=bound).count() as i64
    }

    pub fn largest(&self) -> i64 {
        self.plain.keys().next_back().copied().unwrap_or(0).max(self.overlined.iter().next_back().copied().unwrap_or(0))
    }
}

impl fmt::Display for Overpartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(i64, bool)> = self.overlined.iter().map(|&b| (b, true)).collect();
        for (&b, &m) in &self.plain {
            parts.extend(std::iter::repeat_n((b, false), m as usize));
        }
        parts.sort_by(|a, b| b.cmp(a));
        if parts.is_empty() {
            return write!(f, "∅");
        }
        let s: Vec<String> = parts.iter().map(|(b, o)| if *o { format!("{b}'") } else { b.to_string() }).collect();
        write!(f, "{}", s.join("+"))
    }
}

/// All overpartitions of `n`.
pub fn enumerate_overpartitions(n: i64) -> Vec<Overpartition> {
    fn go(rest: i64, size: i64, cur: &mut Overpartition, out: &mut Vec<Overpartition>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        if size == 0 {
            return;
        }
        for bar in [false, true] {
            let used = if bar { size } else { 0 };
            if used > rest {
                continue;
            }
            if bar {
                cur.overlined.insert(size);
            }
            let mut m = 0;
            while used + m * size <= rest {
                if m > 0 {
                    cur.plain.insert(size, m);
                }
                go(rest - used - m * size, size - 1, cur, out);
                m += 1;
            }
            cur.plain.remove(&size);
            if bar {
                cur.overlined.remove(&size);
            }
        }
    }
    let mut out = Vec::new();
    let mut cur = Overpartition { plain: BTreeMap::new(), overlined: BTreeSet::new() };
    if n >= 0 {
        go(n, n, &mut cur, &mut out);
    }
    out
}

/// Overpartition conditions attached to the trivariate families.
///
/// `f_ℓ` counts non-overlined parts only; overlined ones enter through
/// `f_{ℓ̄}` and the count `V(ℓ)` of overlined parts `≤ ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OverCondition {
    /// Counted by `J̃_{k,i}`.
    Official { k: i64, i: i64 },
    /// Counted by `J̃̃_{k,i}`. The window conditions also run over `ℓ = 0`
    /// (with `f_0 = 0`), which only bites at `i = k`, where it removes the
    /// overpartitions with `f_1 + f_{1̄} = k - 1` of the wrong parity.
    Ghost { k: i64, i: i64 },
    /// Ghost conditions with windows from `ℓ = 1` only; overcounts `J̃̃_{k,k}`.
    GhostFromOne { k: i64, i: i64 },
}

impl OverCondition {
    pub fn admits(&self, p: &Overpartition) -> bool {
        let (k, i, offset, first) = match *self {
            OverCondition::Official { k, i } => (k, i, 1, 1),
            OverCondition::Ghost { k, i } => (k, i, 0, 0),
            OverCondition::GhostFromOne { k, i } => (k, i, 0, 1),
        };
        if p.f(1) + p.f_bar(1) > i - 1 {
            return false;
        }
        for ell in first..=p.largest() {
            let window = p.f(ell) + p.f(ell + 1) + p.f_bar(ell + 1);
            if window > k - 1 {
                return false;
            }
            if window == k - 1 {
                let lhs = ell * p.f(ell) + (ell + 1) * (p.f(ell + 1) + p.f_bar(ell + 1));
                if !even(lhs - i - offset - p.overlined_up_to(ell)) {
                    return false;
                }
            }
        }
        true
    }
}

/// `Σ c(j, m, n) a^j x^m q^n` over admitted overpartitions with `n ≤ n_max`.
pub fn overpartition_gen_fn(cond: OverCondition, n_max: i64) -> TriSeries {
    let mut out = TriSeries::zero(n_max);
    for n in 0..=n_max {
        for p in enumerate_overpartitions(n) {
            if cond.admits(&p) {
                let m = TriSeries::from_monos(&[mono(1, p.num_overlined() as u32, p.num_parts(), n)], n_max);
                out = out.add(&m);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_partitions(5).len(), 7);
        assert_eq!(enumerate_partitions(0).len(), 1);
        // overpartitions of 3: 3, 3', 2+1, 2'+1, 2+1', 2'+1', 1+1+1, 1'+1+1
        assert_eq!(enumerate_overpartitions(3).len(), 8);
    }

    #[test]
    fn display() {
        assert_eq!(Partition::from_parts(&[1, 3, 3]).to_string(), "3+3+1");
    }
}
