//! What a check produces, how it is judged, and how a fault is planted in it.

use num_bigint::BigInt;

use qshelf::axq::{AxqError, TriSeries};
use qshelf::laurent::{LaurentPoly, PolyMatrix};
use qshelf::shelves::ShelfError;
use qshelf::{Mismatch, Series};

use crate::report::{MismatchDetail, Status};

/// A deliberate single-coefficient corruption, `CHECK[@EXP]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fault {
    pub check: String,
    pub exponent: Option<i64>,
}

impl Fault {
    pub fn parse(spec: &str) -> Result<Fault, String> {
        match spec.split_once('@') {
            Some((c, e)) => Ok(Fault {
                check: c.to_string(),
                exponent: Some(e.parse().map_err(|_| format!("bad fault exponent in {spec:?}"))?),
            }),
            None => Ok(Fault { check: spec.to_string(), exponent: None }),
        }
    }
}

pub enum Evidence {
    Series { left: Series, right: Series },
    Tri { left: TriSeries, right: TriSeries },
    Matrix { left: PolyMatrix, right: PolyMatrix },
    Vector { left: Vec<Series>, right: Vec<Series> },
    /// `diff` must vanish below `required`.
    Valuation { diff: Series, required: i64 },
    Failed { detail: String, mismatch: Option<MismatchDetail> },
    Skipped(String),
}

pub struct Verdict {
    pub status: Status,
    pub mismatch: Option<MismatchDetail>,
    pub detail: Option<String>,
}

fn scalar(m: Mismatch, entry: Option<Vec<usize>>) -> MismatchDetail {
    MismatchDetail {
        exponent: m.exponent,
        a: None,
        x: None,
        entry,
        left: m.left.to_string(),
        right: m.right.to_string(),
    }
}

fn one() -> BigInt {
    BigInt::from(1)
}

impl Evidence {
    pub fn failed(detail: impl Into<String>) -> Self {
        Evidence::Failed { detail: detail.into(), mismatch: None }
    }

    pub fn from_shelf_error(e: &ShelfError) -> Self {
        let mismatch = match e {
            ShelfError::NotDivisible { exponent, coefficient, .. } => Some(MismatchDetail {
                exponent: *exponent,
                a: None,
                x: None,
                entry: None,
                left: coefficient.to_string(),
                right: "0".into(),
            }),
            ShelfError::AlternativeMismatch { mismatch, .. } | ShelfError::GhostMismatch { mismatch, .. } => {
                Some(scalar(mismatch.clone(), None))
            }
            _ => None,
        };
        Evidence::Failed { detail: e.to_string(), mismatch }
    }

    pub fn from_axq_error(e: &AxqError) -> Self {
        let mismatch = match e {
            AxqError::NotDivisible { a, x, q, coefficient, .. } => Some(MismatchDetail {
                exponent: *q,
                a: Some(*a),
                x: Some(*x),
                entry: None,
                left: coefficient.to_string(),
                right: "0".into(),
            }),
            AxqError::SupportViolation { a, x, q } | AxqError::NegativeExponent { a, x, q, .. } => {
                Some(MismatchDetail {
                    exponent: *q,
                    a: Some(*a),
                    x: Some(*x),
                    entry: None,
                    left: "nonzero".into(),
                    right: "0".into(),
                })
            }
            _ => None,
        };
        Evidence::Failed { detail: e.to_string(), mismatch }
    }

    /// Adds one to a single coefficient of the left-hand side.
    pub fn corrupt(self, exponent: Option<i64>) -> Self {
        match self {
            Evidence::Series { left, right } => {
                let e = pick_exponent(&left, &right, exponent);
                Evidence::Series { left: left.perturbed(e, &one()), right }
            }
            Evidence::Tri { left, right } => {
                let e = exponent.unwrap_or(0);
                Evidence::Tri { left: left.perturbed(0, 0, e, &one()), right }
            }
            Evidence::Matrix { mut left, right } => {
                let e = exponent.unwrap_or_else(|| left.get(0, 0).min_exp().unwrap_or(0));
                let v = left.get(0, 0) + &LaurentPoly::monomial(1, e);
                left.set(0, 0, v);
                Evidence::Matrix { left, right }
            }
            Evidence::Vector { mut left, right } => {
                let e = pick_exponent(&left[0], &right[0], exponent);
                left[0] = left[0].perturbed(e, &one());
                Evidence::Vector { left, right }
            }
            Evidence::Valuation { diff, required } => {
                let e = exponent.unwrap_or(required - 1).min(diff.prec() - 1);
                Evidence::Valuation { diff: diff.perturbed(e, &one()), required }
            }
            other => other,
        }
    }

    pub fn judge(&self) -> Verdict {
        let pass = Verdict { status: Status::Pass, mismatch: None, detail: None };
        let fail = |m: MismatchDetail| Verdict { status: Status::Fail, mismatch: Some(m), detail: None };
        match self {
            Evidence::Series { left, right } => match left.first_mismatch(right) {
                Some(m) => fail(scalar(m, None)),
                None => Verdict { detail: Some(format!("agree below q^{}", left.prec().min(right.prec()))), ..pass },
            },
            Evidence::Tri { left, right } => match left.first_mismatch(right) {
                Some(m) => fail(MismatchDetail {
                    exponent: m.q,
                    a: Some(m.a),
                    x: Some(m.x),
                    entry: None,
                    left: m.left.to_string(),
                    right: m.right.to_string(),
                }),
                None => Verdict {
                    detail: Some(format!("agree through q^{}", left.q_prec().min(right.q_prec()))),
                    ..pass
                },
            },
            Evidence::Matrix { left, right } => match left.first_mismatch(right) {
                Some((r, c, m)) => fail(scalar(m, Some(vec![r + 1, c + 1]))),
                None => pass,
            },
            Evidence::Vector { left, right } => {
                if left.len() != right.len() {
                    return Verdict {
                        status: Status::Fail,
                        mismatch: None,
                        detail: Some(format!("length {} != {}", left.len(), right.len())),
                    };
                }
                for (r, (a, b)) in left.iter().zip(right).enumerate() {
                    if let Some(m) = a.first_mismatch(b) {
                        return fail(scalar(m, Some(vec![r + 1])));
                    }
                }
                let window = left.iter().chain(right).map(Series::prec).min().unwrap_or(0);
                Verdict { detail: Some(format!("agree below q^{window}")), ..pass }
            }
            Evidence::Valuation { diff, required } => {
                if diff.prec() < *required {
                    return Verdict {
                        status: Status::Skipped,
                        mismatch: None,
                        detail: Some(format!("window below q^{} cannot certify valuation {}", diff.prec(), required)),
                    };
                }
                match diff.iter().find(|(e, c)| *e < *required && **c != BigInt::default()) {
                    Some((e, c)) => fail(MismatchDetail {
                        exponent: e,
                        a: None,
                        x: None,
                        entry: None,
                        left: c.to_string(),
                        right: "0".into(),
                    }),
                    None => {
                        let v = diff.valuation().map_or_else(|| format!("≥ {}", diff.prec()), |v| v.to_string());
                        Verdict { detail: Some(format!("valuation {v} ≥ {required}")), ..pass }
                    }
                }
            }
            Evidence::Failed { detail, mismatch } => Verdict {
                status: Status::Fail,
                mismatch: mismatch.clone(),
                detail: Some(detail.clone()),
            },
            Evidence::Skipped(why) => Verdict { status: Status::Skipped, mismatch: None, detail: Some(why.clone()) },
        }
    }
}

/// Requested exponent, or the lowest stored exponent of either side, kept
/// inside the common window.
fn pick_exponent(left: &Series, right: &Series, exponent: Option<i64>) -> i64 {
    let window = left.prec().min(right.prec());
    exponent.unwrap_or_else(|| left.low().min(right.low())).min(window - 1)
}
