//! Truncated Laurent series in `q` with arbitrary-precision integer coefficients.
//!
//! A [`Series`] is known exactly on the window `[low, prec)`: every coefficient
//! below `low` is zero, every coefficient at or above `prec` is unknown. All
//! operations propagate the precision they can actually prove, so identities
//! checked on the result hold on the reported window and nowhere else.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::laurent::LaurentPoly;

/// First exponent where two series disagree, with both coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub exponent: i64,
    #[serde(with = "crate::decimal")]
    pub left: BigInt,
    #[serde(with = "crate::decimal")]
    pub right: BigInt,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q^{}: {} != {}", self.exponent, self.left, self.right)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("lowest coefficient {coefficient} at q^{exponent} is not a unit")]
    NotAUnit { exponent: i64, coefficient: BigInt },
    #[error("series is zero on its whole known window (prec {prec})")]
    AllZero { prec: i64 },
    #[error("not divisible: coefficient {coefficient} at q^{exponent}")]
    NotDivisible { exponent: i64, coefficient: BigInt },
    #[error("need coefficients below q^{needed} but the series is only known below q^{prec}")]
    InsufficientPrecision { needed: i64, prec: i64 },
    #[error("infinite product starting at q^{exponent} does not converge")]
    DivergentProduct { exponent: i64 },
    #[error("triple product instantiation q -> q^{q_step}, z -> q^{z_exponent} leaves a non-positive exponent")]
    InvalidInstantiation { z_exponent: i64, q_step: i64 },
    #[error("series disagree at {0}")]
    Mismatch(Mismatch),
}

/// A Laurent series in `q` known exactly below `prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    low: i64,
    coeffs: Vec<BigInt>,
    prec: i64,
}

impl Series {
    /// Builds a series whose coefficient of `q^(low + t)` is `coeffs[t]`.
    /// Entries at or beyond `prec` are discarded.
    pub fn new(low: i64, coeffs: Vec<BigInt>, prec: i64) -> Self {
        let mut s = Series { low, coeffs, prec };
        s.normalize();
        s
    }

    pub fn from_i64s(low: i64, coeffs: &[i64], prec: i64) -> Self {
        Self::new(low, coeffs.iter().map(|&c| BigInt::from(c)).collect(), prec)
    }

    pub fn zero(prec: i64) -> Self {
        Series { low: prec, coeffs: Vec::new(), prec }
    }

    pub fn one(prec: i64) -> Self {
        Self::monomial(BigInt::one(), 0, prec)
    }

    pub fn monomial(coeff: BigInt, exp: i64, prec: i64) -> Self {
        Self::new(exp, vec![coeff], prec)
    }

    /// An exact Laurent polynomial viewed as a series known below `prec`.
    pub fn from_poly(p: &LaurentPoly, prec: i64) -> Self {
        let Some(lo) = p.min_exp() else {
            return Self::zero(prec);
        };
        let hi = p.max_exp().unwrap_or(lo);
        let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (e, c) in p.terms() {
            coeffs[(e - lo) as usize] = c.clone();
        }
        Self::new(lo, coeffs, prec)
    }

    fn normalize(&mut self) {
        let keep = (self.prec - self.low).clamp(0, self.coeffs.len() as i64) as usize;
        self.coeffs.truncate(keep);
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.low = self.prec;
        } else if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
    }

    /// Smallest exponent with a stored (nonzero) coefficient; equals `prec` for
    /// a series that vanishes on its window.
    pub fn low(&self) -> i64 {
        self.low
    }

    /// First exponent at which the series is not known.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponent of the lowest nonzero known term, `None` when the series is
    /// zero on its whole window.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.low)
    }

    /// Coefficient of `q^e`, or `None` when `e` lies beyond the precision.
    pub fn coeff(&self, e: i64) -> Option<BigInt> {
        if e >= self.prec {
            return None;
        }
        let t = e - self.low;
        if t < 0 || t >= self.coeffs.len() as i64 {
            Some(BigInt::zero())
        } else {
            Some(self.coeffs[t as usize].clone())
        }
    }

    fn coeff_ref(&self, e: i64) -> Option<&BigInt> {
        let t = e - self.low;
        if t < 0 || t >= self.coeffs.len() as i64 {
            None
        } else {
            Some(&self.coeffs[t as usize])
        }
    }

    /// Iterates the stored `(exponent, coefficient)` pairs, zeros included.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().enumerate().map(move |(t, c)| (self.low + t as i64, c))
    }

    /// Drops everything at or above `prec` (no-op if already coarser).
    pub fn truncate(&self, prec: i64) -> Self {
        Self::new(self.low, self.coeffs.clone(), prec.min(self.prec))
    }

    /// Returns a copy with the coefficient of `q^e` increased by `delta`.
    /// `e` must lie inside the known window.
    pub fn perturbed(&self, e: i64, delta: &BigInt) -> Self {
        assert!(e < self.prec, "cannot perturb q^{e} beyond precision {}", self.prec);
        let lo = self.low.min(e);
        let hi = (self.low + self.coeffs.len() as i64).max(e + 1);
        let mut coeffs = vec![BigInt::zero(); (hi - lo) as usize];
        for (x, c) in self.iter() {
            coeffs[(x - lo) as usize] = c.clone();
        }
        coeffs[(e - lo) as usize] += delta;
        Self::new(lo, coeffs, self.prec)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.low, self.coeffs.iter().map(|x| x * c).collect(), self.prec)
    }

    /// Multiplies by `q^m`; exponents and precision move together.
    pub fn shift(&self, m: i64) -> Self {
        Series { low: self.low + m, coeffs: self.coeffs.clone(), prec: self.prec + m }
    }

    /// Divides by `q^m`, allowing negative exponents in the result.
    pub fn divide_by_q_power(&self, m: i64) -> Self {
        self.shift(-m)
    }

    /// Divides by `q^m`, requiring every known coefficient below `q^m` to vanish.
    pub fn divide_exact_by_q_power(&self, m: i64) -> Result<Self, SeriesError> {
        if let Some(v) = self.valuation() {
            if v < m {
                return Err(SeriesError::NotDivisible {
                    exponent: v,
                    coefficient: self.coeffs[0].clone(),
                });
            }
        } else if self.prec < m {
            return Err(SeriesError::InsufficientPrecision { needed: m, prec: self.prec });
        }
        if self.prec < m {
            return Err(SeriesError::InsufficientPrecision { needed: m, prec: self.prec });
        }
        Ok(self.shift(-m))
    }

    /// Multiplies by the exact binomial `1 + c q^s`.
    pub fn mul_binomial(&self, c: i64, s: i64) -> Self {
        if c == 0 {
            return self.clone();
        }
        let prec = self.prec + s.min(0);
        if self.is_zero() {
            return Self::zero(prec);
        }
        let low = self.low + s.min(0);
        let len = self.coeffs.len() + s.unsigned_abs() as usize;
        let mut out = vec![BigInt::zero(); len];
        let base = (self.low - low) as usize;
        let cb = BigInt::from(c);
        for (t, x) in self.coeffs.iter().enumerate() {
            out[base + t] += x;
            let idx = (base as i64 + t as i64 + s) as usize;
            out[idx] += x * &cb;
        }
        Self::new(low, out, prec)
    }

    /// Divides by `1 + c q^s` for `s ≥ 1` (a unit in the power series ring).
    pub fn div_binomial(&self, c: i64, s: i64) -> Self {
        assert!(s >= 1, "div_binomial needs a positive exponent, got {s}");
        if self.is_zero() || c == 0 {
            return self.clone();
        }
        let len = (self.prec - self.low) as usize;
        let mut g: Vec<BigInt> = Vec::with_capacity(len);
        let cb = BigInt::from(c);
        let s = s as usize;
        for t in 0..len {
            let mut v = self.coeffs.get(t).cloned().unwrap_or_default();
            if t >= s {
                v -= &cb * &g[t - s];
            }
            g.push(v);
        }
        Self::new(self.low, g, self.prec)
    }

    /// Multiplicative inverse; the lowest nonzero coefficient must be ±1.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let Some(v) = self.valuation() else {
            return Err(SeriesError::AllZero { prec: self.prec });
        };
        let lead = &self.coeffs[0];
        if lead.abs() != BigInt::one() {
            return Err(SeriesError::NotAUnit { exponent: v, coefficient: lead.clone() });
        }
        // s = q^v u with u known below prec - v, so 1/s = q^-v / u is known below prec - 2v.
        let len = (self.prec - 2 * v - (-v)).max(0) as usize;
        let mut inv: Vec<BigInt> = Vec::with_capacity(len);
        for t in 0..len {
            let mut acc = if t == 0 { BigInt::one() } else { BigInt::zero() };
            for r in 1..=t.min(self.coeffs.len() - 1) {
                acc -= &self.coeffs[r] * &inv[t - r];
            }
            // lead is ±1, so dividing is multiplying.
            inv.push(acc * lead);
        }
        Ok(Self::new(-v, inv, self.prec - 2 * v))
    }

    /// Substitutes `q -> q^m` for `m ≥ 1`.
    pub fn substitute_q_power(&self, m: i64) -> Self {
        assert!(m >= 1, "substitution exponent must be positive, got {m}");
        if m == 1 {
            return self.clone();
        }
        let mut out = vec![BigInt::zero(); (self.coeffs.len().max(1) - 1) * m as usize + 1];
        for (t, c) in self.coeffs.iter().enumerate() {
            out[t * m as usize] = c.clone();
        }
        Self::new(self.low * m, out, self.prec * m)
    }

    /// First disagreement on the common window, if any.
    pub fn first_mismatch(&self, other: &Series) -> Option<Mismatch> {
        let hi = self.prec.min(other.prec);
        let lo = self.low.min(other.low);
        let zero = BigInt::zero();
        for e in lo..hi {
            let a = self.coeff_ref(e).unwrap_or(&zero);
            let b = other.coeff_ref(e).unwrap_or(&zero);
            if a != b {
                return Some(Mismatch { exponent: e, left: a.clone(), right: b.clone() });
            }
        }
        None
    }

    /// Equality on the common known window.
    pub fn agrees_with(&self, other: &Series) -> bool {
        self.first_mismatch(other).is_none()
    }

    /// Like [`first_mismatch`](Self::first_mismatch) but as a `Result`.
    pub fn check_agrees(&self, other: &Series) -> Result<(), Mismatch> {
        self.first_mismatch(other).map_or(Ok(()), Err)
    }

    /// First negative coefficient on the window.
    pub fn first_negative(&self) -> Option<(i64, BigInt)> {
        self.iter().find(|(_, c)| c.is_negative()).map(|(e, c)| (e, c.clone()))
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.iter() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            first = false;
            let a = c.abs();
            match (e, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (_, true) => write!(f, "q^{e}")?,
                (_, false) => write!(f, "{a}q^{e}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^{})", self.prec)
    }
}

impl<'a> Add<&'a Series> for &'a Series {
    type Output = Series;

    fn add(self, rhs: &'a Series) -> Series {
        combine(self, rhs, false)
    }
}

impl<'a> Sub<&'a Series> for &'a Series {
    type Output = Series;

    fn sub(self, rhs: &'a Series) -> Series {
        combine(self, rhs, true)
    }
}

impl Neg for &Series {
    type Output = Series;

    fn neg(self) -> Series {
        Series { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect(), prec: self.prec }
    }
}

impl<'a> Mul<&'a Series> for &'a Series {
    type Output = Series;

    fn mul(self, rhs: &'a Series) -> Series {
        let prec = (self.prec + rhs.low).min(rhs.prec + self.low);
        if self.is_zero() || rhs.is_zero() {
            return Series::zero(prec);
        }
        let low = self.low + rhs.low;
        let len = (prec - low).max(0) as usize;
        let mut out = vec![BigInt::zero(); len];
        for (s, a) in self.coeffs.iter().enumerate() {
            if s >= len {
                break;
            }
            if a.is_zero() {
                continue;
            }
            for (t, b) in rhs.coeffs.iter().enumerate().take(len - s) {
                out[s + t] += a * b;
            }
        }
        Series::new(low, out, prec)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Series> for Series {
            type Output = Series;

            fn $m(self, rhs: Series) -> Series {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn combine(a: &Series, b: &Series, subtract: bool) -> Series {
    let prec = a.prec.min(b.prec);
    let low = a.low.min(b.low).min(prec);
    let len = (prec - low).max(0) as usize;
    let mut out = vec![BigInt::zero(); len];
    for (e, c) in a.iter() {
        if e < prec {
            out[(e - low) as usize] += c;
        }
    }
    for (e, c) in b.iter() {
        if e < prec {
            if subtract {
                out[(e - low) as usize] -= c;
            } else {
                out[(e - low) as usize] += c;
            }
        }
    }
    Series::new(low, out, prec)
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    low: i64,
    prec: i64,
    coeffs: Vec<String>,
}

impl Serialize for Series {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SeriesRepr {
            low: self.low,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(ToString::to_string).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Series {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Series::new(repr.low, coeffs, repr.prec))
    }
}

/// Sign of the base monomial of a q-Pochhammer symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Number of factors in a q-Pochhammer symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Length {
    Finite(u64),
    Infinite,
}

/// `(c; q^step)_n` for `c = ±q^e`, i.e. `∏_{t<n} (1 - c q^(step t))`, truncated below `prec`.
pub fn pochhammer(sign: Sign, e: i64, step: i64, n: Length, prec: i64) -> Result<Series, SeriesError> {
    assert!(step >= 1, "pochhammer step must be positive");
    // 1 - c q^x with c = +q^e is 1 - q^(e+x); with c = -q^e it is 1 + q^(e+x).
    let c = match sign {
        Sign::Plus => -1,
        Sign::Minus => 1,
    };
    let mut acc = Series::one(prec);
    match n {
        Length::Finite(n) => {
            for t in 0..n as i64 {
                let x = e + step * t;
                if x >= acc.prec() {
                    break;
                }
                acc = acc.mul_binomial(c, x);
            }
        }
        Length::Infinite => {
            if e <= 0 {
                return Err(SeriesError::DivergentProduct { exponent: e });
            }
            let mut x = e;
            while x < prec {
                acc = acc.mul_binomial(c, x);
                x += step;
            }
        }
    }
    Ok(acc)
}

/// `1/F(q) = ∏_{m ≢ 2 (mod 4)} 1/(1 - q^m)`, counting partitions into parts not ≡ 2 mod 4.
pub fn f_inverse(prec: i64) -> Series {
    let mut acc = Series::one(prec);
    for m in 1..prec.max(0) {
        if m % 4 != 2 {
            acc = acc.div_binomial(-1, m);
        }
    }
    acc
}

/// Both sides of the triple product `Σ_{n≥0} (-1)^n z^n q^(n²)(1 - z^(-2n-1) q^(2n+1)) = (q², zq, q/z; q²)_∞`
/// after substituting `q -> q^q_step`, `z -> q^z_exponent`. Returns `(sum side, product side)`.
pub fn jacobi_triple_product_sides(
    z_exponent: i64,
    q_step: i64,
    prec: i64,
) -> Result<(Series, Series), SeriesError> {
    if q_step < 1 || q_step + z_exponent < 1 || q_step - z_exponent < 1 {
        return Err(SeriesError::InvalidInstantiation { z_exponent, q_step });
    }
    let (s, z) = (q_step, z_exponent);
    let mut sum = Series::zero(prec);
    let len = prec.max(0) as usize;
    let mut coeffs = vec![BigInt::zero(); len];
    let mut n: i64 = 0;
    loop {
        // (-1)^n q^(s n² + z n) - (-1)^n q^(s (n+1)² - z (n+1))
        let e1 = s * n * n + z * n;
        let e2 = s * (n + 1) * (n + 1) - z * (n + 1);
        if e1 >= prec && e2 >= prec {
            break;
        }
        let sign = if n % 2 == 0 { 1 } else { -1 };
        if (0..prec).contains(&e1) {
            coeffs[e1 as usize] += sign;
        }
        if (0..prec).contains(&e2) {
            coeffs[e2 as usize] -= sign;
        }
        n += 1;
    }
    sum = &sum + &Series::new(0, coeffs, prec);
    let product = &(&pochhammer(Sign::Plus, 2 * s, 2 * s, Length::Infinite, prec)?
        * &pochhammer(Sign::Plus, s + z, 2 * s, Length::Infinite, prec)?)
        * &pochhammer(Sign::Plus, s - z, 2 * s, Length::Infinite, prec)?;
    Ok((sum, product))
}

/// Checks the substituted triple product identity below `prec`.
pub fn jacobi_triple_product_check(z_exponent: i64, q_step: i64, prec: i64) -> Result<(), SeriesError> {
    let (sum, product) = jacobi_triple_product_sides(z_exponent, q_step, prec)?;
    sum.check_agrees(&product).map_err(SeriesError::Mismatch)
}
