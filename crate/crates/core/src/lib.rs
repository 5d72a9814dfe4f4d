//! Exact q-series machinery for the Bressoud–Göllnitz–Gordon shelf families.
//!
//! * [`series`] — truncated Laurent series with explicit precision, q-Pochhammer symbols.
//! * [`laurent`] — exact Laurent polynomials and the small matrices built from them.
//! * [`shelves`] — official and ghost series by product, closed form and recursion.
//! * [`matrices`] — the shelf transfer matrices and the `h` polynomials.
//! * [`partitions`] — brute-force (over)partition oracles.
//! * [`axq`] — trivariate `(a; x; q)` series and the dictionary back to shelves.

mod decimal;

pub mod axq;
pub mod laurent;
pub mod matrices;
pub mod partitions;
pub mod series;
pub mod shelves;

pub use laurent::{LaurentPoly, PolyMatrix};
pub use series::{Mismatch, Series, SeriesError};
