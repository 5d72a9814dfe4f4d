//! Trivariate series in `(a, x, q)` truncated by `q`-degree, and the
//! families `H̃`, `J̃`, `H̃̃`, `J̃̃` together with their specialization to
//! univariate shelf series.
//!
//! A [`TriSeries`] is exact for every monomial `a^α x^β q^γ` with
//! `γ ≤ q_prec`. Exponents of `a` and `q` are nonnegative; `x` exponents are
//! signed so the reflection identities at negative index can be stated
//! directly.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::series::Series;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxqError {
    #[error("not divisible by {divisor}: coefficient {coefficient} at a^{a} x^{x} q^{q}")]
    NotDivisible { divisor: String, a: u32, x: i64, q: i64, coefficient: BigInt },
    #[error("support violation at a^{a} x^{x} q^{q}: every a and x must carry a q")]
    SupportViolation { a: u32, x: i64, q: i64 },
    #[error("specialization produced negative exponent {exponent} from a^{a} x^{x} q^{q}")]
    NegativeExponent { a: u32, x: i64, q: i64, exponent: i64 },
    #[error("requested degree {needed} exceeds q precision {q_prec}")]
    InsufficientPrecision { needed: i64, q_prec: i64 },
}

/// First monomial where two trivariate series differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriMismatch {
    pub a: u32,
    pub x: i64,
    pub q: i64,
    #[serde(with = "crate::decimal")]
    pub left: BigInt,
    #[serde(with = "crate::decimal")]
    pub right: BigInt,
}

impl fmt::Display for TriMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a^{} x^{} q^{}: {} != {}", self.a, self.x, self.q, self.left, self.right)
    }
}

/// One monomial `c a^a x^x q^q` of a small multiplier polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mono {
    pub c: i64,
    pub a: u32,
    pub x: i64,
    pub q: i64,
}

pub const fn mono(c: i64, a: u32, x: i64, q: i64) -> Mono {
    Mono { c, a, x, q }
}

/// Series in `a, x, q`; each `(a, x)` slice stores a dense `q` vector of
/// length `q_prec + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriSeries {
    terms: BTreeMap<(u32, i64), Vec<BigInt>>,
    q_prec: i64,
}

impl TriSeries {
    pub fn zero(q_prec: i64) -> Self {
        TriSeries { terms: BTreeMap::new(), q_prec }
    }

    pub fn one(q_prec: i64) -> Self {
        Self::from_monos(&[mono(1, 0, 0, 0)], q_prec)
    }

    pub fn from_monos(ms: &[Mono], q_prec: i64) -> Self {
        let mut s = Self::zero(q_prec);
        for m in ms {
            s.add_coeff(m.a, m.x, m.q, &BigInt::from(m.c));
        }
        s
    }

    pub fn q_prec(&self) -> i64 {
        self.q_prec
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn width(&self) -> usize {
        (self.q_prec + 1).max(0) as usize
    }

    fn add_coeff(&mut self, a: u32, x: i64, q: i64, c: &BigInt) {
        if q < 0 || q > self.q_prec || c.is_zero() {
            assert!(q >= 0 || c.is_zero(), "negative q exponent {q}");
            return;
        }
        let w = self.width();
        let v = self.terms.entry((a, x)).or_insert_with(|| vec![BigInt::zero(); w]);
        v[q as usize] += c;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, v| v.iter().any(|c| !c.is_zero()));
    }

    pub fn coeff(&self, a: u32, x: i64, q: i64) -> BigInt {
        if q < 0 || q > self.q_prec {
            return BigInt::zero();
        }
        self.terms.get(&(a, x)).map(|v| v[q as usize].clone()).unwrap_or_default()
    }

    /// Nonzero monomials as `(a, x, q, coefficient)` in `(a, x, q)` order.
    pub fn monomials(&self) -> impl Iterator<Item = (u32, i64, i64, &BigInt)> {
        self.terms
            .iter()
            .flat_map(|(&(a, x), v)| v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(q, c)| (a, x, q as i64, c)))
    }

    pub fn truncate(&self, q_prec: i64) -> Self {
        let q_prec = q_prec.min(self.q_prec);
        let w = (q_prec + 1).max(0) as usize;
        let mut s = TriSeries {
            terms: self.terms.iter().map(|(k, v)| (*k, v[..w].to_vec())).collect(),
            q_prec,
        };
        s.prune();
        s
    }

    fn combine(&self, other: &TriSeries, sign: i64) -> TriSeries {
        let q_prec = self.q_prec.min(other.q_prec);
        let mut out = self.truncate(q_prec);
        let s = BigInt::from(sign);
        for (a, x, q, c) in other.monomials() {
            if q <= q_prec {
                out.add_coeff(a, x, q, &(c * &s));
            }
        }
        out.prune();
        out
    }

    pub fn add(&self, other: &TriSeries) -> TriSeries {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &TriSeries) -> TriSeries {
        self.combine(other, -1)
    }

    pub fn neg(&self) -> TriSeries {
        self.scale(-1)
    }

    pub fn scale(&self, c: i64) -> TriSeries {
        let c = BigInt::from(c);
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            for e in v.iter_mut() {
                *e *= &c;
            }
        }
        out.prune();
        out
    }

    /// Multiplies by `a^a x^x q^q`. A positive `q` raises the known window by
    /// the same amount, a negative one requires the low coefficients to vanish.
    pub fn mul_monomial(&self, a: u32, x: i64, q: i64) -> TriSeries {
        let q_prec = self.q_prec + q;
        let mut out = TriSeries::zero(q_prec);
        for (a0, x0, q0, c) in self.monomials() {
            out.add_coeff(a0 + a, x0 + x, q0 + q, c);
        }
        out
    }

    /// Multiplies by a small polynomial. A negative `q` exponent in the
    /// polynomial lowers the known window accordingly.
    pub fn mul_poly(&self, p: &[Mono]) -> TriSeries {
        let low = p.iter().map(|m| m.q).min().unwrap_or(0).min(0);
        let q_prec = self.q_prec + low;
        let mut out = TriSeries::zero(q_prec);
        for m in p {
            let c = BigInt::from(m.c);
            for (a0, x0, q0, v) in self.monomials() {
                out.add_coeff(a0 + m.a, x0 + m.x, q0 + m.q, &(v * &c));
            }
        }
        out.prune();
        out
    }

    /// Full product; both factors must have nonnegative `q` exponents.
    pub fn mul(&self, other: &TriSeries) -> TriSeries {
        let q_prec = self.q_prec.min(other.q_prec);
        let mut out = TriSeries::zero(q_prec);
        for (a1, x1, q1, c1) in self.monomials() {
            for (a2, x2, q2, c2) in other.monomials() {
                if q1 + q2 <= q_prec {
                    out.add_coeff(a1 + a2, x1 + x2, q1 + q2, &(c1 * c2));
                }
            }
        }
        out.prune();
        out
    }

    /// Divides by `1 - c a^a x^x q^q` with `q ≥ 1` (a geometric series).
    pub fn div_one_minus(&self, m: Mono) -> TriSeries {
        assert!(m.q >= 1, "geometric division needs a positive q exponent");
        let mut out = self.clone();
        let c = BigInt::from(m.c);
        for level in m.q..=self.q_prec {
            let src = (level - m.q) as usize;
            let adds: Vec<((u32, i64), BigInt)> = out
                .terms
                .iter()
                .filter(|(_, v)| !v[src].is_zero())
                .map(|(&(a, x), v)| ((a + m.a, x + m.x), &v[src] * &c))
                .collect();
            for ((a, x), v) in adds {
                out.add_coeff(a, x, level, &v);
            }
        }
        out.prune();
        out
    }

    /// Exact division by `1 + x`, slice by slice in `(a, q)`.
    pub fn div_one_plus_x_exact(&self) -> Result<TriSeries, AxqError> {
        let mut slices: BTreeMap<(u32, i64), BTreeMap<i64, BigInt>> = BTreeMap::new();
        for (a, x, q, c) in self.monomials() {
            slices.entry((a, q)).or_default().insert(x, c.clone());
        }
        let mut out = TriSeries::zero(self.q_prec);
        for ((a, q), mut poly) in slices {
            // Peel the lowest x power: p = (1 + x) g  ⇒  g_lo = p_lo, p -= g_lo (x^lo + x^{lo+1}).
            while let Some((&lo, c)) = poly.iter().next() {
                let c = c.clone();
                let hi = *poly.keys().next_back().expect("nonempty");
                if lo == hi {
                    return Err(AxqError::NotDivisible { divisor: "1+x".into(), a, x: lo, q, coefficient: c });
                }
                out.add_coeff(a, lo, q, &c);
                poly.remove(&lo);
                let next = poly.entry(lo + 1).or_default();
                *next -= &c;
                if next.is_zero() {
                    poly.remove(&(lo + 1));
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Exact division by `(xq)^p`: every monomial needs `x ≥ p` and `q ≥ p`.
    pub fn div_xq_power_exact(&self, p: i64) -> Result<TriSeries, AxqError> {
        if let Some((a, x, q, c)) = self.monomials().find(|&(_, x, q, _)| x < p || q < p) {
            return Err(AxqError::NotDivisible { divisor: format!("(xq)^{p}"), a, x, q, coefficient: c.clone() });
        }
        Ok(self.mul_monomial(0, -p, -p))
    }

    /// `x -> x q`. Requires nonnegative `x` exponents so no monomial leaves the window.
    pub fn subst_xq(&self) -> TriSeries {
        let mut out = TriSeries::zero(self.q_prec);
        for (a, x, q, c) in self.monomials() {
            assert!(x >= 0, "x -> xq needs nonnegative x exponents, found x^{x}");
            out.add_coeff(a, x, q + x, c);
        }
        out
    }

    /// Multiplies by `x^m`.
    pub fn shift_x(&self, m: i64) -> TriSeries {
        TriSeries { terms: self.terms.iter().map(|(&(a, x), v)| ((a, x + m), v.clone())).collect(), q_prec: self.q_prec }
    }

    /// First disagreement on the common window, in `(a, x, q)` order.
    pub fn first_mismatch(&self, other: &TriSeries) -> Option<TriMismatch> {
        let q_prec = self.q_prec.min(other.q_prec);
        let keys: std::collections::BTreeSet<(u32, i64)> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        for (a, x) in keys {
            for q in 0..=q_prec {
                let (l, r) = (self.coeff(a, x, q), other.coeff(a, x, q));
                if l != r {
                    return Some(TriMismatch { a, x, q, left: l, right: r });
                }
            }
        }
        None
    }

    /// Checks `q ≥ x ≥ 0` and `q ≥ a` on every stored monomial.
    pub fn check_support(&self) -> Result<(), AxqError> {
        match self.monomials().find(|&(a, x, q, _)| x < 0 || q < x || q < a as i64) {
            Some((a, x, q, _)) => Err(AxqError::SupportViolation { a, x, q }),
            None => Ok(()),
        }
    }

    /// Adds `delta` to one coefficient (fault injection for the harness).
    pub fn perturbed(&self, a: u32, x: i64, q: i64, delta: &BigInt) -> TriSeries {
        let mut out = self.clone();
        out.add_coeff(a, x, q, delta);
        out.prune();
        out
    }

    /// `(a, x, q) -> (1/q, q^{2j}, q²)`, exact through `degree`.
    ///
    /// A monomial `a^α x^β q^γ` lands on `q^{2γ - α + 2jβ}`; with `γ ≥ α` and
    /// `β ≥ 0` that exponent is at least `γ`, so unknown monomials (`γ >
    /// q_prec`) only reach degrees above `q_prec`.
    pub fn specialize(&self, j_shelf: i64, degree: i64) -> Result<Series, AxqError> {
        if degree > self.q_prec {
            return Err(AxqError::InsufficientPrecision { needed: degree, q_prec: self.q_prec });
        }
        self.check_support()?;
        let mut coeffs = vec![BigInt::zero(); (degree + 1).max(0) as usize];
        for (a, x, q, c) in self.monomials() {
            let e = 2 * q - a as i64 + 2 * j_shelf * x;
            if e < 0 {
                return Err(AxqError::NegativeExponent { a, x, q, exponent: e });
            }
            if e <= degree {
                coeffs[e as usize] += c;
            }
        }
        Ok(Series::new(0, coeffs, degree + 1))
    }
}

impl Serialize for TriSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Record<'a> {
            a: u32,
            x: i64,
            q: i64,
            #[serde(with = "crate::decimal")]
            coeff: &'a BigInt,
        }
        let mut seq = serializer.serialize_seq(None)?;
        for (a, x, q, coeff) in self.monomials() {
            seq.serialize_element(&Record { a, x, q, coeff })?;
        }
        seq.end()
    }
}

fn binom2(n: i64) -> i64 {
    n * (n - 1) / 2
}

/// Smallest `n` past which every summand with quadratic exponent
/// `(k - 1/2) n² + lin·n` (shifted by `extra(n)`) lies above `q_prec`.
fn summands(k: i64, lin: i64, q_prec: i64, extra: impl Fn(i64) -> i64) -> Vec<i64> {
    let e = |n: i64| k * n * n - binom2(n) + lin * n + extra(n).min(0);
    let mut out = Vec::new();
    let mut n = 0;
    loop {
        if e(n) <= q_prec {
            out.push(n);
        } else if e(n + 1) > e(n) && n > 0 {
            break;
        }
        n += 1;
        assert!(n < 10_000, "summation cutoff not reached");
    }
    out
}

/// `(-1)^n ∏_{t<n}(a + q^t)` — the fraction-free form of `(-a)^n (-1/a;q)_n`.
fn signed_a_product(n: i64, q_prec: i64) -> TriSeries {
    let mut t = TriSeries::one(q_prec);
    for s in 0..n {
        t = t.mul_poly(&[mono(1, 1, 0, 0), mono(1, 0, 0, s)]);
    }
    if n % 2 == 1 {
        t.neg()
    } else {
        t
    }
}

/// `(-a x q^{from}; q)_∞` divided by `(x q^{den_from}; q)_∞`, both truncated.
fn infinite_factors(t: TriSeries, from: i64, den_from: i64) -> TriSeries {
    assert!(from >= 1 && den_from >= 1);
    let q_prec = t.q_prec();
    let mut t = t;
    for s in from..=q_prec {
        t = t.mul_poly(&[mono(1, 0, 0, 0), mono(1, 1, 1, s)]);
    }
    for s in den_from..=q_prec {
        t = t.div_one_minus(mono(1, 0, 1, s));
    }
    t
}

/// `H̃_{k,i}(a; x q^s; q)` for `s ∈ {0, 1}`.
///
/// With `s = 1` every `x` already carries its `q`, which keeps the truncation
/// tight for the `J̃` combinations. Negative `i` is supported for `s = 0`.
pub fn h_tilde_at(k: i64, i: i64, s: i64, q_prec: i64) -> TriSeries {
    assert!(k >= 2 && (s == 0 || s == 1));
    assert!(i >= 0 || s == 0, "negative index only without substitution");
    let mut acc = TriSeries::zero(q_prec);
    for n in summands(k, 1 - i, q_prec, |n| (s + 2 * n) * i) {
        let term = if n == 0 {
            // (1 - (xq^s)^i) / (1 - xq^s) as a finite sum, times the tails.
            let poly: Vec<Mono> = if i >= 0 {
                (0..i).map(|t| mono(1, 0, t, s * t)).collect()
            } else {
                (i..0).map(|t| mono(-1, 0, t, s * t)).collect()
            };
            let base = TriSeries::one(q_prec).mul_poly(&poly);
            infinite_factors(base, 1 + s, 1 + s)
        } else {
            let e = k * n * n - binom2(n) + n - i * n;
            let bin_q = (s + 2 * n) * i;
            let body_prec = q_prec - e - bin_q.min(0) - s * (k - 1) * n;
            let mut t = signed_a_product(n, body_prec);
            for u in 0..n {
                t = t.mul_poly(&[mono(1, 0, 0, 0), mono(1, 0, 1, s + u)]);
                t = t.div_one_minus(mono(1, 0, 0, 2 + 2 * u));
            }
            t = infinite_factors(t, n + 1 + s, n + s);
            t = t.mul_monomial(0, (k - 1) * n, e + s * (k - 1) * n);
            t.mul_poly(&[mono(1, 0, 0, 0), mono(-1, 0, i, bin_q)])
        };
        acc = acc.add(&term.truncate(q_prec));
    }
    acc
}

pub fn h_tilde(k: i64, i: i64, q_prec: i64) -> TriSeries {
    h_tilde_at(k, i, 0, q_prec)
}

/// `J̃_{k,i} = H̃_{k,i}(a;xq;q) + a x q H̃_{k,i-1}(a;xq;q)`, `i ≥ 1`.
pub fn j_tilde(k: i64, i: i64, q_prec: i64) -> TriSeries {
    assert!(i >= 1);
    let h = h_tilde_at(k, i, 1, q_prec);
    let h1 = h_tilde_at(k, i - 1, 1, q_prec);
    h.add(&h1.mul_monomial(1, 1, 1).truncate(q_prec))
}

/// Shared shape of the single-sum forms of `J̃` and `J̃̃`.
fn full_sum(k: i64, i: i64, q_prec: i64, ghost: bool) -> TriSeries {
    let shift = if ghost { i + 1 } else { i };
    let mut acc = TriSeries::zero(q_prec);
    for n in summands(k, k - shift, q_prec, |_| 0) {
        let e = k * n * n - binom2(n) + k * n - shift * n;
        let mut t = signed_a_product(n, q_prec - e);
        for u in 0..n {
            t = t.mul_poly(&[mono(1, 0, 0, 0), mono(1, 0, 1, 1 + u)]);
            t = t.div_one_minus(mono(1, 0, 0, 2 + 2 * u));
        }
        t = infinite_factors(t, n + 2, n + 1);
        let w = 2 * n + 1;
        t = t.mul_poly(&[
            mono(1, 0, 0, 0),
            mono(-1, 0, i, w * i),
            mono(1, 1, 1, n + 1),
            mono(-1, 1, i, n + 1 + w * (i - 1)),
        ]);
        if ghost {
            t = t.mul_poly(&[mono(1, 0, 0, 0), mono(1, 0, 1, w)]);
        }
        t = t.mul_monomial(0, (k - 1) * n, e);
        acc = acc.add(&t.truncate(q_prec));
    }
    if ghost {
        acc = acc.div_one_minus(mono(-1, 0, 1, 1));
    }
    acc
}

/// Single-sum form of `J̃_{k,i}`, `i ≥ 1`.
pub fn j_tilde_full(k: i64, i: i64, q_prec: i64) -> TriSeries {
    assert!(i >= 1);
    full_sum(k, i, q_prec, false)
}

/// Single-sum form of `J̃̃_{k,i}`, `1 ≤ i ≤ k`.
pub fn j_ghost_full(k: i64, i: i64, q_prec: i64) -> TriSeries {
    assert!((1..=k).contains(&i));
    full_sum(k, i, q_prec, true)
}

/// `H̃̃_{k,i} = (H̃_{k,i+1} + x H̃_{k,i-1}) / (1 + x)`, the division checked exact.
pub fn h_ghost(k: i64, i: i64, q_prec: i64) -> Result<TriSeries, AxqError> {
    let num = h_tilde(k, i + 1, q_prec).add(&h_tilde(k, i - 1, q_prec).shift_x(1));
    num.div_one_plus_x_exact()
}

/// `J̃̃_{k,i} = H̃̃_{k,i}(a;xq;q) + a x q H̃̃_{k,i-1}(a;xq;q)`.
pub fn j_ghost_from_h(k: i64, i: i64, q_prec: i64) -> Result<TriSeries, AxqError> {
    assert!((1..=k).contains(&i));
    let h = h_ghost(k, i, q_prec)?.subst_xq();
    let h1 = h_ghost(k, i - 1, q_prec)?.subst_xq();
    Ok(h.add(&h1.mul_monomial(1, 1, 1).truncate(q_prec)))
}

/// `J̃̃_{k,i}` by interpolation between neighbouring `J̃`:
/// `(J̃_{i+1} + xq J̃_{i-1}) / (1 + xq)`, and `(J̃_2 - axq J̃_1)/(1 + xq)` at `i = 1`.
pub fn j_ghost_interp(k: i64, i: i64, q_prec: i64) -> TriSeries {
    assert!((1..=k).contains(&i));
    let num = if i == 1 {
        j_tilde(k, 2, q_prec).sub(&j_tilde(k, 1, q_prec).mul_monomial(1, 1, 1).truncate(q_prec))
    } else {
        j_tilde(k, i + 1, q_prec).add(&j_tilde(k, i - 1, q_prec).mul_monomial(0, 1, 1).truncate(q_prec))
    };
    num.div_one_minus(mono(-1, 0, 1, 1))
}

/// Divides by `1 + xq`.
pub fn div_one_plus_xq(t: &TriSeries) -> TriSeries {
    t.div_one_minus(mono(-1, 0, 1, 1))
}

/// One identity between trivariate series: both sides, or the error hit
/// while forming them (a failed exact division is a failure in itself).
#[derive(Debug, Clone)]
pub struct TriIdentity {
    pub id: String,
    pub anchor: String,
    pub sides: Result<(TriSeries, TriSeries), AxqError>,
}

impl TriIdentity {
    fn new(id: impl Into<String>, anchor: impl Into<String>, sides: Result<(TriSeries, TriSeries), AxqError>) -> Self {
        TriIdentity { id: id.into(), anchor: anchor.into(), sides }
    }
}

/// `J̃_{k,1..=k+1}`, `J̃̃_{k,1..=k}` and `H̃_{k,-k-1..=k+1}` at one precision.
pub struct AxqFamily {
    pub k: i64,
    pub q_prec: i64,
    jt: Vec<TriSeries>,
    jt_sub: Vec<TriSeries>,
    h: BTreeMap<i64, TriSeries>,
}

impl AxqFamily {
    pub fn new(k: i64, q_prec: i64) -> Self {
        let jt: Vec<TriSeries> = (1..=k + 1).map(|i| j_tilde(k, i, q_prec)).collect();
        let jt_sub = jt.iter().map(TriSeries::subst_xq).collect();
        let h = (-k - 1..=k + 1).map(|i| (i, h_tilde(k, i, q_prec))).collect();
        AxqFamily { k, q_prec, jt, jt_sub, h }
    }

    /// `J̃_{k,i}(a;x;q)`, `1 ≤ i ≤ k+1`.
    pub fn jt(&self, i: i64) -> &TriSeries {
        &self.jt[(i - 1) as usize]
    }

    /// `J̃_{k,i}(a;xq;q)`.
    pub fn jt_xq(&self, i: i64) -> &TriSeries {
        &self.jt_sub[(i - 1) as usize]
    }

    /// `H̃_{k,i}(a;x;q)`, `|i| ≤ k+1`.
    pub fn h(&self, i: i64) -> &TriSeries {
        &self.h[&i]
    }

    /// `(H̃_{i+1} + x H̃_{i-1}) / (1 + x)`, `|i| ≤ k`.
    pub fn h_ghost(&self, i: i64) -> Result<TriSeries, AxqError> {
        self.h(i + 1).add(&self.h(i - 1).shift_x(1)).div_one_plus_x_exact()
    }

    /// The ghost `J̃̃_{k,i}` from `H̃̃`, `1 ≤ i ≤ k`.
    pub fn jtt(&self, i: i64) -> Result<TriSeries, AxqError> {
        let top = self.h_ghost(i)?.subst_xq();
        let low = self.h_ghost(i - 1)?.subst_xq();
        Ok(top.add(&low.mul_monomial(1, 1, 1).truncate(self.q_prec)))
    }

    /// [`j_ghost_interp`] on the cached `J̃`.
    pub fn ghost_interp(&self, i: i64) -> TriSeries {
        let num = if i == 1 {
            self.jt(2).sub(&self.jt(1).mul_monomial(1, 1, 1).truncate(self.q_prec))
        } else {
            self.jt(i + 1).add(&self.jt(i - 1).mul_monomial(0, 1, 1).truncate(self.q_prec))
        };
        div_one_plus_xq(&num)
    }

    /// Every functional equation and cross-route identity at this `k`.
    pub fn identities(&self) -> Vec<TriIdentity> {
        let (k, qp) = (self.k, self.q_prec);
        let zero = TriSeries::zero(qp);
        let axq = |t: &TriSeries| t.mul_monomial(1, 1, 1).truncate(qp);
        let one_plus_xq = |t: &TriSeries| t.mul_poly(&[mono(1, 0, 0, 0), mono(1, 0, 1, 1)]).truncate(qp);
        let a_times = |t: &TriSeries| t.mul_monomial(1, 0, 0);
        let mut out = Vec::new();

        out.push(TriIdentity::new("h_tilde_index_zero", "H̃_{k,0} = 0", Ok((self.h(0).clone(), zero.clone()))));
        for i in 1..=k {
            out.push(TriIdentity::new(
                format!("h_tilde_reflection_i{i}"),
                "H̃_{k,-i} = -x^{-i} H̃_{k,i}",
                Ok((self.h(-i).clone(), self.h(i).shift_x(-i).neg())),
            ));
        }
        for i in 2..=k {
            let rhs = self.jt(k - i + 1).mul_poly(&[mono(1, 0, i - 2, 0), mono(1, 0, i - 1, 0)]);
            out.push(TriIdentity::new(
                format!("h_tilde_difference_i{i}"),
                "H̃_{k,i} - H̃_{k,i-2} = x^{i-2}(1+x) J̃_{k,k-i+1}",
                Ok((self.h(i).sub(self.h(i - 2)), rhs)),
            ));
        }
        for i in 1..=k + 1 {
            out.push(TriIdentity::new(
                format!("j_tilde_routes_i{i}"),
                "J̃_{k,i} = H̃_{k,i}(xq) + axq H̃_{k,i-1}(xq) = single sum",
                Ok((self.jt(i).clone(), j_tilde_full(k, i, qp))),
            ));
        }
        out.push(TriIdentity::new("j_tilde_top", "J̃_{k,k+1} = J̃_{k,k-1}", Ok((self.jt(k + 1).clone(), self.jt(k - 1).clone()))));

        out.push(TriIdentity::new("j_tilde_fe1", "J̃_{k,1} = J̃_{k,k}(xq)", Ok((self.jt(1).clone(), self.jt_xq(k).clone()))));
        out.push(TriIdentity::new(
            "j_tilde_fe2",
            "J̃_{k,2} = (1+xq) J̃_{k,k-1}(xq) + axq J̃_{k,k}(xq)",
            Ok((self.jt(2).clone(), one_plus_xq(self.jt_xq(k - 1)).add(&axq(self.jt_xq(k))))),
        ));
        out.push(TriIdentity::new(
            "j_tilde_fe2_solved",
            "J̃_{k,k-1}(xq) = (J̃_{k,2} - axq J̃_{k,1}) / (1+xq)",
            Ok((self.jt_xq(k - 1).clone(), div_one_plus_xq(&self.jt(2).sub(&axq(self.jt(1)))))),
        ));
        for i in 3..=k {
            let inner = self.jt_xq(k - i + 1).add(&a_times(self.jt_xq(k - i + 2)));
            let rhs = one_plus_xq(&inner).mul_monomial(0, i - 2, i - 2).truncate(qp);
            out.push(TriIdentity::new(
                format!("j_tilde_fe3_i{i}"),
                "J̃_{k,i} - J̃_{k,i-2} = (xq)^{i-2}(1+xq)[J̃_{k,k-i+1}(xq) + a J̃_{k,k-i+2}(xq)]",
                Ok((self.jt(i).sub(self.jt(i - 2)), rhs)),
            ));
            let solved = self
                .jt(i)
                .sub(self.jt(i - 2))
                .div_xq_power_exact(i - 2)
                .map(|d| div_one_plus_xq(&d).sub(&a_times(self.jt_xq(k - i + 2))));
            out.push(TriIdentity::new(
                format!("j_tilde_fe3_solved_i{i}"),
                "J̃_{k,k-i+1}(xq) = (J̃_{k,i} - J̃_{k,i-2}) / ((xq)^{i-2}(1+xq)) - a J̃_{k,k-i+2}(xq)",
                solved.map(|r| (self.jt_xq(k - i + 1).clone(), r)),
            ));
        }

        let ghosts: Vec<Result<TriSeries, AxqError>> = (1..=k).map(|i| self.jtt(i)).collect();
        let ghost = |i: i64| ghosts[(i - 1) as usize].clone();
        for i in 1..=k {
            out.push(TriIdentity::new(
                format!("ghost_interpolation_i{i}"),
                "J̃̃_{k,i} = H̃̃_{k,i}(xq) + axq H̃̃_{k,i-1}(xq) = (J̃_{k,i+1} + xq J̃_{k,i-1}) / (1+xq)",
                ghost(i).map(|g| (g, self.ghost_interp(i))),
            ));
            out.push(TriIdentity::new(
                format!("ghost_single_sum_i{i}"),
                "J̃̃_{k,i} = H̃̃_{k,i}(xq) + axq H̃̃_{k,i-1}(xq) = single sum",
                ghost(i).map(|g| (g, j_ghost_full(k, i, qp))),
            ));
        }
        out.push(TriIdentity::new("ghost_top", "J̃̃_{k,k} = J̃_{k,k-1}", ghost(k).map(|g| (g, self.jt(k - 1).clone()))));
        out.push(TriIdentity::new(
            "ghost_first",
            "J̃̃_{k,1} = H̃_{k,2}(xq) / (1+xq)",
            ghost(1).map(|g| (g, div_one_plus_xq(&self.h(2).subst_xq()))),
        ));
        out.push(TriIdentity::new(
            "ghost_fe1_left",
            "J̃_{k,k-1}(xq) = (J̃_{k,2} - J̃̃_{k,1}) / (xq) - a J̃_{k,k}(xq)",
            ghost(1)
                .and_then(|g| self.jt(2).sub(&g).div_xq_power_exact(1))
                .map(|d| (self.jt_xq(k - 1).clone(), d.sub(&a_times(self.jt_xq(k))))),
        ));
        out.push(TriIdentity::new(
            "ghost_fe1_right",
            "J̃_{k,k-1}(xq) = J̃̃_{k,1}",
            ghost(1).map(|g| (self.jt_xq(k - 1).clone(), g)),
        ));
        for i in 3..=k {
            let tail = a_times(self.jt_xq(k - i + 2));
            out.push(TriIdentity::new(
                format!("ghost_fe2_left_i{i}"),
                "J̃_{k,k-i+1}(xq) = (J̃_{k,i} - J̃̃_{k,i-1}) / (xq)^{i-1} - a J̃_{k,k-i+2}(xq)",
                ghost(i - 1)
                    .and_then(|g| self.jt(i).sub(&g).div_xq_power_exact(i - 1))
                    .map(|d| (self.jt_xq(k - i + 1).clone(), d.sub(&tail))),
            ));
            out.push(TriIdentity::new(
                format!("ghost_fe2_right_i{i}"),
                "J̃_{k,k-i+1}(xq) = (J̃̃_{k,i-1} - J̃_{k,i-2}) / (xq)^{i-2} - a J̃_{k,k-i+2}(xq)",
                ghost(i - 1)
                    .and_then(|g| g.sub(self.jt(i - 2)).div_xq_power_exact(i - 2))
                    .map(|d| (self.jt_xq(k - i + 1).clone(), d.sub(&tail))),
            ));
        }

        out.push(TriIdentity::new("h_ghost_index_zero", "H̃̃_{k,0} = 0", self.h_ghost(0).map(|h| (h, zero.clone()))));
        for i in 1..=k {
            let sides = self.h_ghost(-i).and_then(|l| self.h_ghost(i).map(|r| (l, r.shift_x(-i).neg())));
            out.push(TriIdentity::new(format!("h_ghost_reflection_i{i}"), "H̃̃_{k,-i} = -x^{-i} H̃̃_{k,i}", sides));
        }
        out
    }

    /// Support of every `J̃_{k,i}` and `J̃̃_{k,i}`: each `a` and `x` carries a `q`.
    pub fn support_checks(&self) -> Vec<(String, Result<(), AxqError>)> {
        let mut out: Vec<(String, Result<(), AxqError>)> =
            (1..=self.k + 1).map(|i| (format!("j_tilde_support_i{i}"), self.jt(i).check_support())).collect();
        for i in 1..=self.k {
            out.push((format!("ghost_support_i{i}"), self.jtt(i).and_then(|g| g.check_support())));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn geometric_division_round_trip() {
        let t = TriSeries::from_monos(&[mono(1, 0, 0, 0), mono(2, 1, 1, 2)], 10);
        let d = t.div_one_minus(mono(1, 0, 1, 1));
        let back = d.mul_poly(&[mono(1, 0, 0, 0), mono(-1, 0, 1, 1)]);
        assert_eq!(back.first_mismatch(&t), None);
    }

    #[test]
    fn exact_one_plus_x_division() {
        let t = TriSeries::from_monos(&[mono(1, 0, 0, 3), mono(1, 0, 1, 3)], 5);
        assert_eq!(t.div_one_plus_x_exact().unwrap(), TriSeries::from_monos(&[mono(1, 0, 0, 3)], 5));
        let bad = TriSeries::from_monos(&[mono(1, 0, 0, 3)], 5);
        assert!(matches!(bad.div_one_plus_x_exact(), Err(AxqError::NotDivisible { .. })));
    }

    #[test]
    fn xq_division_is_strict() {
        let t = TriSeries::from_monos(&[mono(1, 0, 2, 3)], 8);
        assert_eq!(t.div_xq_power_exact(2).unwrap(), TriSeries::from_monos(&[mono(1, 0, 0, 1)], 6));
        assert!(t.div_xq_power_exact(3).is_err());
    }

    #[test]
    fn substitution_and_specialization() {
        let t = TriSeries::from_monos(&[mono(1, 1, 1, 1)], 6);
        let s = t.subst_xq();
        assert_eq!(s.coeff(1, 1, 2), BigInt::one());
        // a x q^2 -> q^{4 - 1 + 2j}
        assert_eq!(s.specialize(1, 6).unwrap().coeff(5), Some(BigInt::one()));
        assert!(TriSeries::from_monos(&[mono(1, 2, 0, 1)], 4).specialize(0, 4).is_err());
    }

    #[test]
    fn h_at_zero_index_vanishes() {
        assert!(h_tilde(3, 0, 12).is_zero());
    }

    #[test]
    fn serde_records() {
        let t = TriSeries::from_monos(&[mono(-3, 1, 2, 4)], 5);
        assert_eq!(serde_json::to_string(&t).unwrap(), r#"[{"a":1,"x":2,"q":4,"coeff":"-3"}]"#);
    }
}
