//! Exact arithmetic for nonarchimedean dynamical systems.
//!
//! The crate provides four layers:
//!
//! * [`field`] — the ring of integers of a finite extension of the p-adic
//!   numbers, with absolute-precision tracking, valuations and residue
//!   fields;
//! * [`series`] — truncated power series in `T·O_K[[T]]`: composition,
//!   iteration, reversion, Weierstrass degrees and reductions;
//! * [`formal`] — Lubin-Tate formal groups, their endomorphisms, and the
//!   coefficient-recurrence solver for isogeny/semiconjugacy equations;
//! * [`dynamics`] — analysis of commuting pairs `(P, U)`: the reduction
//!   decomposition, commutant solving, normalization to `T^{p^d}`,
//!   valuation traces, quotient-ring towers over consistent root
//!   sequences, and the Galois certifier.
//!
//! Every element carries the precision it is actually known to, every
//! solver records the precision it consumed, and every certificate can be
//! re-checked from its serialized form alone.

pub mod error;
pub mod field;
pub mod formal;
pub mod newton;
pub mod rat;
pub mod ring;
pub mod series;
pub mod wire;

pub mod dynamics;

pub use error::Error;
pub use field::{Field, LocalFieldSpec, OkElem, ResidueElem, ResidueField, Val};
pub use newton::NewtonPolygon;
pub use rat::Rat;
pub use series::{BivariateTruncated, ResidueSeries, TruncatedSeries};

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Artifact version reported in CLI envelopes.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
