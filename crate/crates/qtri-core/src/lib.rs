//! Exact computation of triangular-basis elements of bipartite quantum
//! cluster algebras with principal quantization, together with the quiver
//! combinatorics (dominance, dimension counts, Poincare polynomials, the
//! fiber generating series) that bound their supports.
//!
//! Everything is carried out over `Z[v^{+-1}]` with arbitrary-precision
//! integer coefficients; there is no floating point anywhere.
//!
//! Module map:
//!
//! * [`qlaurent`] - sparse Laurent polynomials, the bar substitution
//!   `v -> v^{-1}`, q-integers and q-binomials, symmetry/unimodality tests.
//! * [`qtorus`] - the based quantum torus `X^e X^f = v^{L(e,f)} X^{e+f}`
//!   for a skew form `L`, with its bar-involution.
//! * [`seedkit`] - quantum seeds `(Lambda, Btilde)`, mutation, the bipartite
//!   quiver model and the index bookkeeping maps.
//! * [`stratdata`] - dominance, the maximal dominant vector below `v`,
//!   variety dimensions, Poincare polynomials and the support bound `f(v)`.
//! * [`tribasis`] - standard monomials, bar-involution triangularization,
//!   the `E*` family and the degree-bound verifier.
//! * [`sweep`] - seeded random instance generation and batch verification.

pub mod matrix;
pub mod qlaurent;
pub mod qtorus;
pub mod seedkit;
pub mod stratdata;
pub mod sweep;
pub mod tribasis;

pub use matrix::IntMat;
pub use qlaurent::LaurentPoly;
pub use qtorus::{ExpVec, SkewForm, TorusElem};
pub use seedkit::{BipartiteQuiver, Seed, WVector};
pub use stratdata::DimPair;
pub use tribasis::{StdExpansion, StdIndex, SupportBoundReport, TriBasisElem, TriangularContext};

use std::sync::OnceLock;

/// Errors reported by the fallible operations of this crate.
///
/// Size/shape mismatches between values that were built against different
/// ambient seeds are programming errors and panic instead.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degree of the zero polynomial is undefined")]
    ZeroDegree,
    #[error("polynomial is not anti-invariant under bar (p != -bar(p))")]
    NotAntiInvariant,
    #[error("matrix is not skew-symmetric at entry ({0}, {1})")]
    NotSkew(usize, usize),
    #[error("matrix is not bipartite: vertex {vertex} both emits and receives arrows")]
    NotBipartite { vertex: usize },
    #[error("mutation index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("order is not acyclic: b[{i}][{j}] = {value} > 0 with {i} before {j}")]
    NotAcyclic { i: usize, j: usize, value: i64 },
    #[error("dimension pair indexes an empty variety")]
    EmptyVariety,
    #[error("exponent is not a valid leading exponent of a standard monomial")]
    NotInImage,
    #[error("element is outside the standard-monomial span")]
    NotInSpan,
    #[error("iteration cap of {0} exceeded (set QTRI_ITER_CAP to raise)")]
    IterationCap(usize),
    #[error("w has a negative component")]
    NegativeW,
    #[error("no index i has min(w_i, w'_i) > 0; nothing to reduce")]
    NothingToReduce,
    #[error("exponent has a negative source coordinate; X(t')^u is not defined in the torus")]
    NegativeSourceExponent,
    #[error("basis element violates the exponent lattice a + Btilde v, v >= 0")]
    BasisStructure,
    #[error("invalid input: {0}")]
    Input(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Iteration cap for the reduction and triangularization loops.
///
/// Defaults to 1_000_000 steps; the `QTRI_ITER_CAP` environment variable
/// overrides it (read once per process).
pub fn iter_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("QTRI_ITER_CAP")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(1_000_000)
    })
}
