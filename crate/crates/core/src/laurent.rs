//! Exact Laurent polynomials in `q` and square matrices over them.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::series::{Mismatch, Series};

/// A finite Laurent polynomial; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `c q^e`.
    pub fn monomial(c: i64, e: i64) -> Self {
        Self::from_terms([(e, BigInt::from(c))])
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigInt)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, &c);
        }
        p
    }

    /// `1 + c q^e`, the binomials that fill the shelf matrices.
    pub fn binomial(c: i64, e: i64) -> Self {
        &Self::one() + &Self::monomial(c, e)
    }

    pub fn add_term(&mut self, e: i64, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(One::is_one)
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn shift(&self, m: i64) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(&e, c)| (e + m, c.clone())).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_terms(self.terms.iter().map(|(&e, x)| (e, x * c)))
    }

    /// True when every coefficient is nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// The polynomial as a series known below `prec`.
    pub fn to_series(&self, prec: i64) -> Series {
        Series::from_poly(self, prec)
    }

    /// First exponent where two polynomials differ.
    pub fn first_mismatch(&self, other: &LaurentPoly) -> Option<Mismatch> {
        let exps: std::collections::BTreeSet<i64> =
            self.terms.keys().chain(other.terms.keys()).copied().collect();
        exps.into_iter().find_map(|e| {
            let (a, b) = (self.coeff(e), other.coeff(e));
            (a != b).then_some(Mismatch { exponent: e, left: a, right: b })
        })
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, (e, c)) in self.terms().enumerate() {
            if n > 0 {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let a = c.abs();
            match (e, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (_, true) => write!(f, "q^{e}")?,
                _ => write!(f, "{a}q^{e}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c);
        }
        out
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, &-c);
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(&e, c)| (e, -c)).collect() }
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.add_term(e1 + e2, &(c1 * c2));
            }
        }
        out
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        // Keys go out in numeric exponent order, not string order.
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            map.serialize_entry(&e.to_string(), &c.to_string())?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let m = BTreeMap::<String, String>::deserialize(deserializer)?;
        let mut p = LaurentPoly::zero();
        for (e, c) in m {
            let e: i64 = e.parse().map_err(serde::de::Error::custom)?;
            let c: BigInt = c.parse().map_err(serde::de::Error::custom)?;
            p.add_term(e, &c);
        }
        Ok(p)
    }
}

impl Series {
    /// Multiplies by an exact Laurent polynomial. Precision moves by the
    /// polynomial's lowest exponent.
    pub fn mul_poly(&self, p: &LaurentPoly) -> Series {
        let Some(lo) = p.min_exp() else {
            return Series::zero(self.prec());
        };
        let prec = self.prec() + lo;
        let mut acc = Series::zero(prec);
        for (e, c) in p.terms() {
            acc = &acc + &self.shift(e).scale(c);
        }
        acc.truncate(prec)
    }
}

/// A `k × k` matrix of Laurent polynomials, indexed from 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    k: usize,
    entries: Vec<LaurentPoly>,
}

impl PolyMatrix {
    pub fn zero(k: usize) -> Self {
        PolyMatrix { k, entries: vec![LaurentPoly::zero(); k * k] }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zero(k);
        for r in 0..k {
            m.set(r, r, LaurentPoly::one());
        }
        m
    }

    pub fn from_fn(k: usize, mut f: impl FnMut(usize, usize) -> LaurentPoly) -> Self {
        let mut m = Self::zero(k);
        for r in 0..k {
            for c in 0..k {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn get(&self, r: usize, c: usize) -> &LaurentPoly {
        &self.entries[r * self.k + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: LaurentPoly) {
        self.entries[r * self.k + c] = v;
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.k)
    }

    /// First differing entry `(row, col)` together with its first differing exponent.
    pub fn first_mismatch(&self, other: &PolyMatrix) -> Option<(usize, usize, Mismatch)> {
        assert_eq!(self.k, other.k, "dimension mismatch");
        (0..self.k)
            .flat_map(|r| (0..self.k).map(move |c| (r, c)))
            .find_map(|(r, c)| self.get(r, c).first_mismatch(other.get(r, c)).map(|m| (r, c, m)))
    }

    /// Applies the matrix to a column of series.
    pub fn apply(&self, v: &[Series]) -> Vec<Series> {
        assert_eq!(v.len(), self.k, "vector length must equal matrix dimension");
        (0..self.k)
            .map(|r| {
                let parts: Vec<Series> = (0..self.k)
                    .filter(|&c| !self.get(r, c).is_zero())
                    .map(|c| v[c].mul_poly(self.get(r, c)))
                    .collect();
                let prec = parts.iter().map(Series::prec).min().unwrap_or(i64::MAX / 4);
                parts.iter().fold(Series::zero(prec), |acc, s| &acc + s)
            })
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<LaurentPoly>> {
        self.entries.chunks(self.k).map(<[LaurentPoly]>::to_vec).collect()
    }
}

impl<'a> Mul<&'a PolyMatrix> for &'a PolyMatrix {
    type Output = PolyMatrix;

    fn mul(self, rhs: &'a PolyMatrix) -> PolyMatrix {
        assert_eq!(self.k, rhs.k, "dimension mismatch");
        PolyMatrix::from_fn(self.k, |r, c| {
            let mut acc = LaurentPoly::zero();
            for m in 0..self.k {
                let (a, b) = (self.get(r, m), rhs.get(m, c));
                if !a.is_zero() && !b.is_zero() {
                    acc = &acc + &(a * b);
                }
            }
            acc
        })
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for PolyMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PolyMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<LaurentPoly>>::deserialize(deserializer)?;
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(serde::de::Error::custom("matrix rows must form a square"));
        }
        Ok(PolyMatrix { k, entries: rows.into_iter().flatten().collect() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_arithmetic() {
        let a = LaurentPoly::binomial(1, 1);
        let cube = &(&a * &a) * &a;
        assert_eq!(cube.coeff(1), BigInt::from(3));
        assert_eq!(cube.max_exp(), Some(3));
        assert!((&cube - &cube).is_zero());
        let m = LaurentPoly::monomial(-2, -3);
        assert_eq!((&m * &LaurentPoly::monomial(1, 3)).coeff(0), BigInt::from(-2));
        assert_eq!(m.to_string(), "-2q^-3");
    }

    #[test]
    fn poly_serde_orders_exponents_numerically() {
        let p = LaurentPoly::from_terms([(-1, BigInt::from(2)), (10, BigInt::from(-3))]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"-1":"2","10":"-3"}"#);
        assert_eq!(serde_json::from_str::<LaurentPoly>(&s).unwrap(), p);
    }

    #[test]
    fn matrix_identity_and_apply() {
        let i3 = PolyMatrix::identity(3);
        assert!((&i3 * &i3).is_identity());
        let v = vec![Series::one(10), Series::from_i64s(0, &[1, 1], 8), Series::zero(12)];
        let out = i3.apply(&v);
        for (a, b) in out.iter().zip(&v) {
            assert!(a.agrees_with(b));
        }
        let shift = PolyMatrix::from_fn(1, |_, _| LaurentPoly::monomial(1, -2));
        assert_eq!(shift.apply(&[Series::one(10)])[0], Series::monomial(BigInt::one(), -2, 8));
    }
}
