//! Independent reference implementations used by the test suites to
//! cross-check the production numeric paths.
//!
//! Everything here is deliberately written from first principles on plain
//! `Vec`-based storage and shares no code with the main crate: eigenvalues
//! come from a hand-rolled cyclic Jacobi sweep instead of a bidiagonalization
//! SVD, pseudoinverses go through explicit Gram matrices, and decimal-to-double
//! conversion runs on big integers instead of the standard float parser. A bug
//! in one side cannot hide the same bug on the other.
//!
//! This crate is a dev-dependency only; nothing in it ships in the harness.

pub mod decimal;
pub mod linalg;
pub mod reference;
pub mod stats;
