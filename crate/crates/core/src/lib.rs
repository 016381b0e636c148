//! Exact aggregation of interval-partition vocabularies.
//!
//! Individual vocabularies are encoded as ordered endpoint multisets over a
//! bounded open domain, aggregated by endpoint rules (p-rules, the symmetric
//! median, the mean, dictatorships, the multiset rule and extended medians),
//! and checked against the axioms and strategic properties those rules are
//! expected to satisfy. All arithmetic is exact.

pub mod axioms;
pub mod error;
pub mod exemplars;
pub mod io;
pub mod rules;
pub mod sample;
pub mod strategic;
pub mod vocab;

pub use error::{Error, Result};
pub use rules::{Aggregator, PhantomMatrix, PositionVector, Rule};
pub use vocab::{Domain, EndpointMultiset, Extent, Profile, Rational, Vocabulary};
