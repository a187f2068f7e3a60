//! Complete line colorings of finite projective spaces PG(n,q).
//!
//! The crate builds PG(n,q) over small Galois fields, constructs geometric spreads by
//! field reduction and line packings by exact-cover search, assembles the packing-based
//! lower-bound coloring of PG(5,q), and verifies colorings for properness and
//! completeness. The [`pg32`] module holds the smallest case, PG(3,2), in detail.

pub mod certificate;
pub mod coloring;
pub mod construct;
pub mod geometry;
pub mod gf;
pub mod packings;
pub mod pg32;
pub mod spreads;
