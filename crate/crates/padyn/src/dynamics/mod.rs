//! Analysis of commuting pairs `(P, U)`: validation, the reduction
//! decomposition, commutant solving, normalization to `T^{p^d}`, valuation
//! traces, quotient towers over consistent root sequences, the Galois
//! certifier, and the combined criterion check.

pub mod commutant;
pub mod decompose;
pub mod fixed_points;
pub mod galois;
pub mod normalize;
pub mod pair;
pub mod tower;
pub mod valuations;

pub mod criterion;

pub use commutant::commutant_solve;
pub use criterion::{criterion_check, CriterionOptions, CriterionReport};
pub use decompose::{lubin_decompose, LubinDecomposition};
pub use fixed_points::fixed_point_valuations;
pub use galois::{galois_certify, GaloisVerdict, LevelCertificate};
pub use normalize::{normalize_to_q, Normalization};
pub use pair::{check_commute, CommutingPair};
pub use tower::{IrredCert, QuotientTower, TElem, TowerLevel, TowerRing};
pub use valuations::{valuation_sequence, TraceEntry, ValuationTrace};
