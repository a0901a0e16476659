//! Exact toric and polyhedral geometry for exoflops of gauged
//! Landau–Ginzburg models.
//!
//! The crate is layered bottom-up: [`arith`] supplies exact linear algebra,
//! [`cone`] and [`polytope`] the polyhedral kernel, [`fan`] toric fans and
//! vector-bundle constructions, [`gorenstein`] and [`triangulate`] the
//! certificates, and [`exoflop`] the end-to-end pipeline.

pub mod arith;
pub mod cone;
pub mod error;
pub mod exoflop;
pub mod fan;
pub mod fixtures;
pub mod gorenstein;
pub mod polytope;
pub mod triangulate;

pub use error::{Error, Result};
