//! Linear complementary-dual (LCD) codes and linear complementary pairs (LCP)
//! over mixed alphabets `R^a ⊕ Ř^b`, where `R` is a finite chain ring and
//! `Ř = R/γ^s R` is a proper quotient of it.
//!
//! The crate is organised bottom-up:
//!
//! * [`ring`] — table-driven arithmetic for the supported chain rings
//!   (`Z4, Z8, Z9, Z27, F4u2, F8u2, F9u2`, plus their quotients and residue
//!   fields), Frobenius powers, Teichmüller lifts and γ-valuations.
//! * [`matrix`] — dense matrices over a chain ring: twisted products
//!   `X·σ^h(Y)^T`, residue projections, field Gaussian elimination, and
//!   γ-adic solving of `X·P = D` with invertible `P`.
//! * [`space`] — the mixed module `M = R^a ⊕ Ř^b`: words, generator
//!   matrices, Galois inner products, the `⋄` product, span closures, code
//!   types, standard forms, duals and a plain-text code file format.
//! * [`lcd`] — complementary-dual tests (brute force, Gram, residue), the
//!   sufficient-but-not-necessary block constraint, direct constructions and
//!   monomial repair of non-LCD codes.
//! * [`metrics`] — Gray map, Lee/Hamming weights and exact distance scans.
//! * [`enumerate`] — census machinery: submodule enumeration, closed-form
//!   counts, monomial classification and verification of the bundled
//!   classified tables.
//! * [`lcp`] — complementary pairs, parity checks, direct-sum masking,
//!   fault-injection and side-channel checks, and the two-user adder channel.
//! * [`fixtures`] — bundled worked examples and classified code tables.

pub mod enumerate;
pub mod error;
pub mod fixtures;
pub mod lcd;
pub mod lcp;
pub mod matrix;
pub mod metrics;
pub mod ring;
pub mod space;

pub use error::{Error, Result};
