//! Shelf transfer matrices `B`, `C`, `A = B^{-1}`, `A' = AC` and the
//! `h` polynomials `ᴶh⁽ʲ⁾ = A'_(J+1) ⋯ A'_(j)`.
//!
//! Indices in the public API are 1-based (`i`, `ℓ` in `1..=k`) to match the
//! usual labelling; [`PolyMatrix`] itself is 0-based.

use serde::Serialize;
use thiserror::Error;

use crate::laurent::{LaurentPoly, PolyMatrix};
use crate::series::{Mismatch, Series};
use crate::shelves::closed_form_g;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("A·B differs from the identity at ({row}, {col}) for k={k}, j={j}: {mismatch}")]
    PatternMismatch { k: i64, j: i64, row: usize, col: usize, mismatch: Mismatch },
    #[error("A' entry ({row}, {col}) has a negative power q^{exponent} for k={k}, j={j}")]
    NegativeExponent { k: i64, j: i64, row: usize, col: usize, exponent: i64 },
    #[error("h routes disagree at entry ({i}, {ell}): {mismatch}")]
    RouteMismatch { i: usize, ell: usize, mismatch: Mismatch },
    #[error("h1 + h2 did not stabilize within {budget} shelves")]
    NoStabilization { budget: i64 },
}

fn check_dims(k: i64, j: i64) {
    assert!(k >= 2 && j >= 1, "shelf matrices need k ≥ 2 and j ≥ 1 (got k={k}, j={j})");
}

/// `B_(j)`: rows `e_k`, `e_{k-1}`, then `q^{-2j(r-2)}(e_{k-r+1} - e_{k-r+3})`.
pub fn build_b(k: i64, j: i64) -> PolyMatrix {
    check_dims(k, j);
    let ku = k as usize;
    let mut m = PolyMatrix::zero(ku);
    m.set(0, ku - 1, LaurentPoly::one());
    m.set(1, ku - 2, LaurentPoly::one());
    for r in 3..=ku {
        let e = -2 * j * (r as i64 - 2);
        m.set(r - 1, ku - r, LaurentPoly::monomial(1, e));
        m.set(r - 1, ku - r + 2, LaurentPoly::monomial(-1, e));
    }
    m
}

/// `C_(j)`: lower bidiagonal with diagonal `1 + q^{2j}` (first entry 1).
pub fn build_c(k: i64, j: i64) -> PolyMatrix {
    check_dims(k, j);
    let ku = k as usize;
    let diag = LaurentPoly::binomial(1, 2 * j);
    let mut m = PolyMatrix::zero(ku);
    m.set(0, 0, LaurentPoly::one());
    m.set(1, 0, LaurentPoly::monomial(1, 2 * j - 1));
    m.set(1, 1, diag.clone());
    for r in 2..ku {
        m.set(r, r - 1, diag.shift(-1));
        m.set(r, r, diag.clone());
    }
    m
}

/// `A_(j)` from its displayed staircase pattern; the parity of `k` decides
/// which columns of each row are occupied. Row `r` holds `q^{2j·max(c-2,0)}`
/// in every column `c ≤ k-r+1` with `c ≡ k-r+1 (mod 2)`.
pub fn build_a_pattern(k: i64, j: i64) -> PolyMatrix {
    check_dims(k, j);
    PolyMatrix::from_fn(k as usize, |r, c| {
        let (r, c) = (r as i64 + 1, c as i64 + 1);
        let last = k - r + 1;
        if c <= last && (last - c) % 2 == 0 {
            LaurentPoly::monomial(1, 2 * j * (c - 2).max(0))
        } else {
            LaurentPoly::zero()
        }
    })
}

/// `A_(j)`, checked to invert `B_(j)`.
pub fn build_a(k: i64, j: i64) -> Result<PolyMatrix, MatrixError> {
    let a = build_a_pattern(k, j);
    let prod = &a * &build_b(k, j);
    if let Some((row, col, mismatch)) = prod.first_mismatch(&PolyMatrix::identity(k as usize)) {
        return Err(MatrixError::PatternMismatch { k, j, row: row + 1, col: col + 1, mismatch });
    }
    Ok(a)
}

/// `A'_(j) = A_(j) C_(j)`, checked to be an honest polynomial matrix.
pub fn build_aprime(k: i64, j: i64) -> Result<PolyMatrix, MatrixError> {
    let ap = &build_a(k, j)? * &build_c(k, j);
    for r in 0..k as usize {
        for c in 0..k as usize {
            if let Some(e) = ap.get(r, c).min_exp().filter(|&e| e < 0) {
                return Err(MatrixError::NegativeExponent { k, j, row: r + 1, col: c + 1, exponent: e });
            }
        }
    }
    Ok(ap)
}

/// `ᴶh⁽ʲ⁾` as the ordered product `A'_(J+1) ⋯ A'_(j)`.
pub fn h_by_product(k: i64, start: i64, j: i64) -> Result<PolyMatrix, MatrixError> {
    assert!(j >= start && start >= 0);
    let mut h = PolyMatrix::identity(k as usize);
    for s in start + 1..=j {
        h = &h * &build_aprime(k, s)?;
    }
    Ok(h)
}

/// One step of the entrywise recursion on a single row of `h`.
/// `prev[m-1]` is `h_{i m}^{(j-1)}`; returns the row at shelf `j`.
/// With `max_degree`, terms above it are discarded (valid because every
/// multiplier has nonnegative exponent).
pub fn h_row_step(k: i64, j: i64, prev: &[LaurentPoly], max_degree: Option<i64>) -> Vec<LaurentPoly> {
    (1..=k)
        .map(|ell| {
            let mut same = LaurentPoly::zero();
            let mut other = LaurentPoly::zero();
            for m in 1..=k {
                let h = &prev[(m - 1) as usize];
                if (m - ell - k).rem_euclid(2) == 0 {
                    if m <= k - ell {
                        same = &same + h;
                    }
                } else if m <= k - ell + 1 {
                    other = &other + h;
                }
            }
            let x = &same.shift(2 * j - 1) + &other;
            let mut out = x.shift(2 * j * (ell - 1));
            if ell != 1 {
                out = &out + &x.shift(2 * j * (ell - 2));
            }
            match max_degree {
                Some(n) => LaurentPoly::from_terms(out.terms().filter(|(e, _)| *e <= n).map(|(e, c)| (e, c.clone()))),
                None => out,
            }
        })
        .collect()
}

/// `ᴶh⁽ʲ⁾` from the Kronecker-delta start by the entrywise recursion.
pub fn h_by_recursion(k: i64, start: i64, j: i64) -> PolyMatrix {
    assert!(j >= start && start >= 0);
    let ku = k as usize;
    let mut rows: Vec<Vec<LaurentPoly>> = PolyMatrix::identity(ku).rows();
    for s in start + 1..=j {
        rows = rows.iter().map(|row| h_row_step(k, s, row, None)).collect();
    }
    PolyMatrix::from_fn(ku, |r, c| rows[r][c].clone())
}

/// Both routes, compared entrywise.
pub fn h_two_routes(k: i64, start: i64, j: i64) -> Result<PolyMatrix, MatrixError> {
    let p = h_by_product(k, start, j)?;
    let r = h_by_recursion(k, start, j);
    if let Some((i, ell, mismatch)) = p.first_mismatch(&r) {
        return Err(MatrixError::RouteMismatch { i: i + 1, ell: ell + 1, mismatch });
    }
    Ok(p)
}

/// The case split for the first step, `ᴶh⁽ᴶ⁺¹⁾`.
pub fn h_first_step(k: i64, start: i64) -> PolyMatrix {
    let step = 2 * start + 2;
    PolyMatrix::from_fn(k as usize, |i, ell| {
        let (i, ell) = (i as i64 + 1, ell as i64 + 1);
        let mut base = LaurentPoly::monomial(1, (ell - 1) * step);
        if ell != 1 {
            base = &base + &LaurentPoly::monomial(1, (ell - 2) * step);
        }
        let matched = (ell + k - 1 - i).rem_euclid(2) == 0;
        if matched && ell <= k - i + 1 {
            base
        } else if !matched && ell <= k - i {
            base.shift(2 * start + 1)
        } else {
            LaurentPoly::zero()
        }
    })
}

/// First row where `M v` and `w` disagree on their common window.
pub fn first_vector_mismatch(m: &PolyMatrix, v: &[Series], w: &[Series]) -> Option<(usize, Mismatch)> {
    m.apply(v).iter().zip(w).enumerate().find_map(|(r, (a, b))| a.first_mismatch(b).map(|x| (r + 1, x)))
}

/// Shelf vector `G_(j)` from the closed forms.
pub fn shelf_vector(k: i64, j: i64, prec: i64) -> Vec<Series> {
    (1..=k).map(|i| closed_form_g(k, j, i, prec)).collect()
}

/// Outcome of the stabilization of `h_{i1} + h_{i2}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stabilized {
    /// Known below `degree + 1`.
    pub series: Series,
    /// The shelf `j` at which all stopping conditions first held.
    pub stopped_at: i64,
}

/// Computes `h_{i1}⁽ʲ⁾ + h_{i2}⁽ʲ⁾` through degree `degree` for increasing
/// `j` and stops at the first `j ≥ J+2` where the prefix is unchanged from
/// `j-1`, `2j+1 > degree`, and every `h_{iℓ}`, `ℓ ≥ 3`, vanishes through
/// `degree`. Together these certify that the prefix equals `G_{(k-1)J+i}`.
pub fn h12_stabilized(k: i64, i: i64, start: i64, degree: i64, budget: i64) -> Result<Stabilized, MatrixError> {
    assert!((1..=k).contains(&i));
    let ku = k as usize;
    let mut row: Vec<LaurentPoly> = (0..ku)
        .map(|c| if c as i64 + 1 == i { LaurentPoly::one() } else { LaurentPoly::zero() })
        .collect();
    let mut prev_sum: Option<LaurentPoly> = None;
    for j in start + 1..=start + budget {
        row = h_row_step(k, j, &row, Some(degree));
        let sum = &row[0] + &row[1];
        let tail_vanishes = row.iter().skip(2).all(LaurentPoly::is_zero);
        if j >= start + 2 && 2 * j + 1 > degree && tail_vanishes && prev_sum.as_ref() == Some(&sum) {
            return Ok(Stabilized { series: sum.to_series(degree + 1), stopped_at: j });
        }
        prev_sum = Some(sum);
    }
    Err(MatrixError::NoStabilization { budget })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k2_b_is_swap() {
        let b = build_b(2, 3);
        assert!(b.get(0, 1).is_one() && b.get(1, 0).is_one());
        assert!(b.get(0, 0).is_zero() && b.get(1, 1).is_zero());
    }

    #[test]
    fn k3_b_third_row() {
        let b = build_b(3, 1);
        assert_eq!(*b.get(2, 0), LaurentPoly::monomial(1, -2));
        assert!(b.get(2, 1).is_zero());
        assert_eq!(*b.get(2, 2), LaurentPoly::monomial(-1, -2));
    }

    #[test]
    fn k2_c() {
        let c = build_c(2, 1);
        assert!(c.get(0, 0).is_one());
        assert_eq!(*c.get(1, 0), LaurentPoly::monomial(1, 1));
        assert_eq!(*c.get(1, 1), LaurentPoly::binomial(1, 2));
    }

    #[test]
    fn identity_at_start() {
        assert!(h_by_recursion(4, 2, 2).is_identity());
        assert!(h_by_product(4, 2, 2).unwrap().is_identity());
    }

    #[test]
    fn corrupted_pattern_is_caught() {
        let mut a = build_a_pattern(4, 1);
        a.set(0, 1, LaurentPoly::monomial(1, 1));
        assert!((&a * &build_b(4, 1)).first_mismatch(&PolyMatrix::identity(4)).is_some());
    }
}
