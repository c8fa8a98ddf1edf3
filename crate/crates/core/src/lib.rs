//! Computational study of l-isogeny graphs of ordinary elliptic curves over
//! finite fields of characteristic p, enhanced with Γ₁(Np^m)-level structure.
//!
//! The crate builds the graphs G_N^m whose vertices are equivalence classes of
//! pairs (E, P) with P a point of exact order Np^m, verifies that raising the
//! p-power level yields abelian p-towers of graph coverings, classifies the
//! level-zero subgraph (the crater), generates and recognizes abstract
//! tectonic craters, fits graph Iwasawa invariants to spanning-tree counts,
//! and realizes towers through voltage assignments.
//!
//! The core is `no_std` (alloc only); IO, JSON/DOT files and the CLI live in
//! the companion `isotower-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod arith;
pub mod qfield;
pub mod ecurve;
pub mod isogeny;
pub mod graphcore;
pub mod volcano;
pub mod crater;
pub mod tectonic;
pub mod tower;
pub mod voltage;

pub use qfield::{FieldCtx, FieldElement};


